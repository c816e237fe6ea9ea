"""Qubit information equations: basis-pure parity constraints and gate rules.

A system holds two sets of XOR equations over qubit values, one for the
computational basis (``c``) and one for the Hadamard-rotated basis (``h``),
plus a per-qubit, per-basis information status. Both sets are kept in
reduced row-echelon form, so two systems describe the same constraints
exactly when their equation tuples are equal.

Qubits are 0-based here; the text form prints them 1-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import gf2
from .gf2 import InconsistentSystemError, Row

__all__ = [
    "Basis",
    "QubitVar",
    "ParityEquation",
    "StatusKind",
    "InfoStatus",
    "UNDETERMINED",
    "LOST",
    "determined",
    "QieSystem",
    "H",
    "X",
    "Z",
    "CNOT",
    "U1Q",
    "Gate",
    "RepresentabilityError",
    "UnsupportedGateError",
    "InvalidSizeError",
    "InconsistentSystemError",
    "new_system",
    "apply_x",
    "apply_z",
    "apply_h",
    "apply_cnot",
    "apply_gate",
    "derive_from_circuit",
    "span_contains",
    "eliminate_variable",
    "parse_qie_text",
]


class Basis(enum.Enum):
    C = "c"
    H = "h"

    @property
    def other(self) -> "Basis":
        return Basis.H if self is Basis.C else Basis.C

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class QubitVar:
    qubit: int
    basis: Basis

    def __str__(self) -> str:
        return f"q{self.qubit + 1}({self.basis})"


@dataclass(frozen=True)
class ParityEquation:
    """XOR of the ``basis`` values of the qubits in ``members`` equals ``rhs``."""

    basis: Basis
    members: int
    rhs: int

    def __post_init__(self):
        if self.rhs not in (0, 1):
            raise ValueError(f"rhs must be 0 or 1, got {self.rhs!r}")
        if self.members < 0:
            raise ValueError("members must be a non-negative bitmask")
        if self.members == 0 and self.rhs == 1:
            raise InconsistentSystemError("equation 0 = 1")

    @classmethod
    def of(cls, basis: Basis, qubits: Iterable[int], rhs: int = 0) -> "ParityEquation":
        mask = 0
        for q in qubits:
            mask ^= 1 << q
        return cls(basis, mask, rhs)

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(gf2.bits(self.members))

    @property
    def row(self) -> Row:
        return (self.members, self.rhs)

    def __str__(self) -> str:
        return "+".join(str(q + 1) for q in self.qubits) + f"={self.rhs}"


class StatusKind(enum.Enum):
    UNDETERMINED = "undetermined"
    DETERMINED = "determined"
    LOST = "lost"


@dataclass(frozen=True)
class InfoStatus:
    kind: StatusKind
    value: Optional[int] = None

    def __post_init__(self):
        if (self.kind is StatusKind.DETERMINED) != (self.value is not None):
            raise ValueError("only a determined status carries a value")

    @property
    def is_determined(self) -> bool:
        return self.kind is StatusKind.DETERMINED

    @property
    def is_lost(self) -> bool:
        return self.kind is StatusKind.LOST

    def __str__(self) -> str:
        if self.is_determined:
            return f"determined({self.value})"
        return self.kind.value


UNDETERMINED = InfoStatus(StatusKind.UNDETERMINED)
LOST = InfoStatus(StatusKind.LOST)
_DETERMINED = {0: InfoStatus(StatusKind.DETERMINED, 0), 1: InfoStatus(StatusKind.DETERMINED, 1)}


def determined(value: int) -> InfoStatus:
    return _DETERMINED[value]


# (status in c, status in h)
StatusPair = Tuple[InfoStatus, InfoStatus]


class RepresentabilityError(Exception):
    """The state has no basis-pure equation system (left the Bell class)."""


class UnsupportedGateError(ValueError):
    pass


class InvalidSizeError(ValueError):
    pass


@dataclass(frozen=True)
class QieSystem:
    n: int
    eqs_c: Tuple[ParityEquation, ...]
    eqs_h: Tuple[ParityEquation, ...]
    status: Tuple[StatusPair, ...]

    def eqs(self, basis: Basis) -> Tuple[ParityEquation, ...]:
        return self.eqs_c if basis is Basis.C else self.eqs_h

    def rows(self, basis: Basis) -> List[Row]:
        return [eq.row for eq in self.eqs(basis)]

    def rank(self, basis: Basis) -> int:
        return len(self.eqs(basis))

    def status_of(self, qubit: int, basis: Basis) -> InfoStatus:
        return self.status[qubit][0 if basis is Basis.C else 1]

    def same_equations(self, other: "QieSystem") -> bool:
        """Span equality in both bases (statuses ignored)."""
        return self.n == other.n and self.eqs_c == other.eqs_c and self.eqs_h == other.eqs_h

    def to_text(self) -> str:
        return f"c: {_eqs_text(self.eqs_c)} | h: {_eqs_text(self.eqs_h)}"

    def __str__(self) -> str:
        return self.to_text()

    def check_invariants(self) -> None:
        """Raise AssertionError if a structural invariant is broken."""
        for basis in Basis:
            rows = self.rows(basis)
            assert gf2.rref(rows) == rows, f"{basis}-set not in reduced form"
            assert all(eq.basis is basis for eq in self.eqs(basis))
            for q in range(self.n):
                st = self.status_of(q, basis)
                if st.is_lost:
                    assert not gf2.union(rows) >> q & 1, f"lost q{q + 1}({basis}) in equations"
                if st.is_determined:
                    assert (1 << q, st.value) in rows, f"q{q + 1}({basis}) not a singleton"
        for c_st, h_st in self.status:
            assert not (c_st.is_determined and h_st.is_determined)


def _eqs_text(eqs: Sequence[ParityEquation]) -> str:
    return "; ".join(str(eq) for eq in eqs) if eqs else "none"


def _build(
    n: int,
    rows_c: Iterable[Row],
    rows_h: Iterable[Row],
    prior: Sequence[StatusPair],
    lost: Iterable[QubitVar] = (),
) -> QieSystem:
    """Reduce both sets and settle statuses against the new spans.

    A variable fixed by its span is determined; one appearing in some equation
    is undetermined; one appearing nowhere keeps a prior lost mark.
    """
    red = {Basis.C: gf2.rref(rows_c), Basis.H: gf2.rref(rows_h)}
    lost = set(lost)
    status = []
    for q in range(n):
        pair = []
        for k, basis in enumerate(Basis):
            rows = red[basis]
            value = gf2.span_value(rows, 1 << q)
            if value is not None:
                st = determined(value)
            elif gf2.union(rows) >> q & 1:
                st = UNDETERMINED
            elif QubitVar(q, basis) in lost or prior[q][k].is_lost:
                st = LOST
            else:
                st = UNDETERMINED
            pair.append(st)
        status.append(tuple(pair))
    return QieSystem(
        n,
        tuple(ParityEquation(Basis.C, m, r) for m, r in red[Basis.C]),
        tuple(ParityEquation(Basis.H, m, r) for m, r in red[Basis.H]),
        tuple(status),
    )


def _check_qubit(sys: QieSystem, i: int) -> None:
    if not 0 <= i < sys.n:
        raise IndexError(f"qubit {i} out of range for {sys.n} qubits")


def new_system(n: int, init_bits: Optional[Sequence[int]] = None) -> QieSystem:
    """Product state |x1 ... xn> as n singleton c-equations."""
    if n < 1:
        raise InvalidSizeError(f"need at least one qubit, got {n}")
    init_bits = [0] * n if init_bits is None else list(init_bits)
    if len(init_bits) != n or any(b not in (0, 1) for b in init_bits):
        raise InvalidSizeError(f"init bits {init_bits!r} do not match {n} qubits")
    rows = [(1 << q, b) for q, b in enumerate(init_bits)]
    return _build(n, rows, [], [(UNDETERMINED, UNDETERMINED)] * n)


def _flip(sys: QieSystem, i: int, basis: Basis) -> QieSystem:
    _check_qubit(sys, i)
    flipped = {
        basis: [(m, r ^ (m >> i & 1)) for m, r in sys.rows(basis)],
        basis.other: sys.rows(basis.other),
    }
    return _build(sys.n, flipped[Basis.C], flipped[Basis.H], sys.status)


def apply_x(sys: QieSystem, i: int) -> QieSystem:
    """X negates every c-equation containing qubit ``i``."""
    return _flip(sys, i, Basis.C)


def apply_z(sys: QieSystem, i: int) -> QieSystem:
    """Z negates every h-equation containing qubit ``i``."""
    return _flip(sys, i, Basis.H)


def apply_h(sys: QieSystem, qubits: Union[int, Iterable[int]]) -> QieSystem:
    """Swap the c and h labels of ``qubits`` in every equation at once.

    The relabelled span is expressible with basis-pure equations only if each
    basis set is generated by equations lying entirely inside or entirely
    outside ``qubits``. Those pieces are extracted first; if they do not
    generate the full spans, RepresentabilityError is raised.
    """
    qubits = {qubits} if isinstance(qubits, int) else set(qubits)
    if not qubits:
        raise ValueError("apply_h needs at least one qubit")
    for q in qubits:
        _check_qubit(sys, q)
    inside = sum(1 << q for q in qubits)
    outside = ((1 << sys.n) - 1) & ~inside
    pieces = {}
    for basis in Basis:
        rows = sys.rows(basis)
        pieces[basis] = (gf2.restrict(rows, inside), gf2.restrict(rows, outside))
    kept = sum(len(a) + len(b) for a, b in pieces.values())
    if kept != sys.rank(Basis.C) + sys.rank(Basis.H):
        moved = "+".join(str(q + 1) for q in sorted(qubits))
        raise RepresentabilityError(f"H on {{{moved}}} mixes c and h variables in one equation")
    rows_c = pieces[Basis.C][1] + pieces[Basis.H][0]
    rows_h = pieces[Basis.H][1] + pieces[Basis.C][0]
    prior = [st[::-1] if q in qubits else st for q, st in enumerate(sys.status)]
    return _build(sys.n, rows_c, rows_h, prior)


def apply_cnot(sys: QieSystem, control: int, target: int) -> QieSystem:
    """c-equations on the target pick up the control; h-equations on the control pick up the target."""
    _check_qubit(sys, control)
    _check_qubit(sys, target)
    if control == target:
        raise ValueError("CNOT control equals target")
    c_bit, t_bit = 1 << control, 1 << target
    rows_c = [(m ^ c_bit if m & t_bit else m, r) for m, r in sys.rows(Basis.C)]
    rows_h = [(m ^ t_bit if m & c_bit else m, r) for m, r in sys.rows(Basis.H)]
    return _build(sys.n, rows_c, rows_h, sys.status)


# -- gates ---------------------------------------------------------------


@dataclass(frozen=True)
class H:
    """Hadamard on one qubit or simultaneously on a set of qubits."""

    qubits: Tuple[int, ...]

    def __init__(self, qubits: Union[int, Iterable[int]]):
        qs = (qubits,) if isinstance(qubits, int) else tuple(qubits)
        if not qs or len(set(qs)) != len(qs):
            raise ValueError(f"H needs distinct qubits, got {qs!r}")
        object.__setattr__(self, "qubits", qs)


@dataclass(frozen=True)
class X:
    qubit: int


@dataclass(frozen=True)
class Z:
    qubit: int


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("CNOT control equals target")


@dataclass(frozen=True)
class U1Q:
    """Arbitrary single-qubit unitary [[a1, a2* e^{ia}], [a2, -a1* e^{ia}]]; oracle only."""

    qubit: int
    a1: complex
    a2: complex
    alpha: float

    def __post_init__(self):
        norm = abs(self.a1) ** 2 + abs(self.a2) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"|a1|^2 + |a2|^2 = {norm}, expected 1")


Gate = Union[H, X, Z, CNOT, U1Q]


def apply_gate(sys: QieSystem, gate: Gate) -> QieSystem:
    if isinstance(gate, H):
        return apply_h(sys, gate.qubits)
    if isinstance(gate, X):
        return apply_x(sys, gate.qubit)
    if isinstance(gate, Z):
        return apply_z(sys, gate.qubit)
    if isinstance(gate, CNOT):
        return apply_cnot(sys, gate.control, gate.target)
    raise UnsupportedGateError(f"{gate!r} has no symbolic rule")


def _merge_hadamards(circuit: Iterable[Gate]) -> List[Gate]:
    # Adjacent Hadamards on distinct qubits commute, so apply them as one layer:
    # a layer can stay representable where its single-qubit steps would not.
    out: List[Gate] = []
    for gate in circuit:
        if isinstance(gate, H) and out and isinstance(out[-1], H) and not set(out[-1].qubits) & set(gate.qubits):
            out[-1] = H(out[-1].qubits + gate.qubits)
        else:
            out.append(gate)
    return out


def derive_from_circuit(circuit: Iterable[Gate], n: int, init_bits: Optional[Sequence[int]] = None) -> QieSystem:
    circuit = list(circuit)
    for gate in circuit:
        if isinstance(gate, U1Q):
            raise UnsupportedGateError("U1Q gates are not representable symbolically")
    sys = new_system(n, init_bits)
    for gate in _merge_hadamards(circuit):
        sys = apply_gate(sys, gate)
    return sys


# -- span queries ----------------------------------------------------------


def span_contains(sys: QieSystem, probe: ParityEquation) -> Optional[int]:
    """rhs forced on ``probe.members`` by the stored equations of its basis, or None."""
    return gf2.span_value(sys.rows(probe.basis), probe.members)


def eliminate_variable(sys: QieSystem, var: QubitVar) -> QieSystem:
    """Forget ``var``: keep only the constraints that do not involve it."""
    _check_qubit(sys, var.qubit)
    rows = {b: sys.rows(b) for b in Basis}
    rows[var.basis] = gf2.eliminate(rows[var.basis], var.qubit)
    return _build(sys.n, rows[Basis.C], rows[Basis.H], sys.status, lost=[var])


def with_status(sys: QieSystem, updates: Dict[QubitVar, InfoStatus]) -> QieSystem:
    status = [list(pair) for pair in sys.status]
    for var, st in updates.items():
        status[var.qubit][0 if var.basis is Basis.C else 1] = st
    return replace(sys, status=tuple(tuple(pair) for pair in status))


def parse_qie_text(text: str, n: int) -> QieSystem:
    """Inverse of ``QieSystem.to_text`` (statuses are settled from the spans)."""
    rows: Dict[Basis, List[Row]] = {Basis.C: [], Basis.H: []}
    for part in text.split("|"):
        label, _, body = part.strip().partition(":")
        basis = Basis(label.strip())
        body = body.strip()
        if body == "none":
            continue
        for item in body.split(";"):
            lhs, _, rhs = item.strip().partition("=")
            qubits = [int(tok) - 1 for tok in lhs.split("+")]
            if any(not 0 <= q < n for q in qubits):
                raise ValueError(f"qubit index out of range in {item!r}")
            rows[basis].append((ParityEquation.of(basis, qubits).members, int(rhs)))
    return _build(n, rows[Basis.C], rows[Basis.H], [(UNDETERMINED, UNDETERMINED)] * n)
