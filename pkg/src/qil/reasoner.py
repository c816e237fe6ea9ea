"""Reasoning over equation systems: measurement, correlation verdicts, entanglement.

Everything here is a pure function of a :class:`~qil.qie.QieSystem`.
Indices are 0-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from . import gf2
from .qie import (
    LOST,
    Basis,
    InfoStatus,
    QieSystem,
    QubitVar,
    StatusKind,
    _build,
    eliminate_variable,
    with_status,
)


class ContradictionError(ValueError):
    """A supplied outcome conflicts with the value the equations force."""


class MissingOutcomeError(ValueError):
    """The outcome is free, so the caller must supply it."""


@dataclass(frozen=True)
class MeasurementSpec:
    qubit: int
    basis: Basis
    outcome: Optional[int] = None


class VerdictKind(enum.Enum):
    PERFECT = "perfectly_correlated"
    UNCORRELATED = "uncorrelated"
    CONDITIONAL = "conditionally_correlated"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class CorrelationVerdict:
    kind: VerdictKind
    pair: Tuple[int, int]
    bases: Tuple[Basis, Basis]
    rhs: Optional[int] = None
    conditioning: Tuple[QubitVar, ...] = ()
    reason: str = ""

    @property
    def correlated(self) -> bool:
        """True only for a correlation visible without measuring anyone else."""
        return self.kind is VerdictKind.PERFECT

    def short(self) -> str:
        if self.kind is VerdictKind.PERFECT:
            return f"perfect({self.rhs})"
        if self.kind is VerdictKind.CONDITIONAL:
            return "conditional(" + ",".join(f"{v.qubit + 1}{v.basis}" for v in self.conditioning) + ")"
        if self.kind is VerdictKind.NOT_APPLICABLE:
            return "n/a"
        return "uncorrelated"

    def to_json(self) -> dict:
        return {
            "pair": [self.pair[0] + 1, self.pair[1] + 1],
            "basis": self.bases[0].value if self.bases[0] is self.bases[1] else [b.value for b in self.bases],
            "kind": self.kind.value,
            "conditioning": [[v.qubit + 1, v.basis.value] for v in self.conditioning],
            "rhs": self.rhs,
            **({"reason": self.reason} if self.reason else {}),
        }


@dataclass(frozen=True)
class PairReport:
    pair: Tuple[int, int]
    c: CorrelationVerdict
    h: CorrelationVerdict
    all_basis_uncorrelated: bool
    qil_entangled: bool

    def verdict(self, basis: Basis) -> CorrelationVerdict:
        return self.c if basis is Basis.C else self.h

    def to_json(self) -> dict:
        return {
            "pair": [self.pair[0] + 1, self.pair[1] + 1],
            "c": self.c.to_json(),
            "h": self.h.to_json(),
            "all_basis_uncorrelated": self.all_basis_uncorrelated,
            "qil_entangled": self.qil_entangled,
        }


def _check_pair(sys: QieSystem, i: int, j: int) -> None:
    if i == j:
        raise ValueError("pair queries need two distinct qubits")
    for q in (i, j):
        if not 0 <= q < sys.n:
            raise IndexError(f"qubit {q} out of range for {sys.n} qubits")


def measure(sys: QieSystem, spec: MeasurementSpec) -> Tuple[QieSystem, int, bool]:
    """Measure one qubit in ``spec.basis``; returns (new system, outcome, forced).

    A forced value leaves the spans alone. A free outcome is adjoined as a
    singleton equation and the complementary variable is forgotten. Every
    variable that becomes determined by the measurement turns its complement
    into lost.
    """
    q, basis = spec.qubit, spec.basis
    if not 0 <= q < sys.n:
        raise IndexError(f"qubit {q} out of range for {sys.n} qubits")
    value = gf2.span_value(sys.rows(basis), 1 << q)
    if value is not None:
        if spec.outcome is not None and spec.outcome != value:
            raise ContradictionError(f"q{q + 1}({basis}) is forced to {value}, got {spec.outcome}")
        after = with_status(sys, {QubitVar(q, basis.other): LOST}) if _absent(sys, q, basis.other) else sys
        return after, value, True
    if spec.outcome is None:
        raise MissingOutcomeError(f"q{q + 1}({basis}) is free; an outcome must be supplied")
    if spec.outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {spec.outcome!r}")
    rows = {b: sys.rows(b) for b in Basis}
    rows[basis] = rows[basis] + [(1 << q, spec.outcome)]
    grown = _build(sys.n, rows[Basis.C], rows[Basis.H], sys.status)
    after = eliminate_variable(grown, QubitVar(q, basis.other))
    newly: Dict[QubitVar, InfoStatus] = {}
    for k in range(sys.n):
        was = sys.status_of(k, basis)
        if after.status_of(k, basis).is_determined and not was.is_determined and _absent(after, k, basis.other):
            newly[QubitVar(k, basis.other)] = LOST
    return with_status(after, newly), spec.outcome, False


def _absent(sys: QieSystem, q: int, basis: Basis) -> bool:
    return not gf2.union(sys.rows(basis)) >> q & 1


def pair_correlation(sys: QieSystem, i: int, j: int, basis: Basis) -> CorrelationVerdict:
    """Same-basis correlation of qubits ``i`` and ``j``.

    Perfect when q_i + q_j is fixed by the span. Otherwise the smallest set of
    other qubits (lexicographically first among equals) whose measurement in
    the same basis fixes q_i + q_j without fixing q_i alone; uncorrelated if
    none exists. Lost variables are never used for conditioning.
    """
    _check_pair(sys, i, j)
    pair, bases = (i, j), (basis, basis)
    lost = [q + 1 for q in (i, j) if sys.status_of(q, basis).is_lost]
    if lost:
        return CorrelationVerdict(
            VerdictKind.NOT_APPLICABLE, pair, bases,
            reason="lost: " + ",".join(f"q{q}({basis})" for q in lost),
        )
    rows = sys.rows(basis)
    target = (1 << i) | (1 << j)
    value = gf2.span_value(rows, target)
    if value is not None:
        return CorrelationVerdict(VerdictKind.PERFECT, pair, bases, rhs=value)
    candidates = [
        k for k in range(sys.n)
        if k not in pair and not sys.status_of(k, basis).is_lost and not sys.status_of(k, basis).is_determined
    ]
    for size in range(1, len(candidates) + 1):
        for subset in combinations(candidates, size):
            grown = gf2.rref([(m, 0) for m, _ in rows] + [(1 << k, 0) for k in subset])
            if gf2.in_span(grown, target) and not gf2.in_span(grown, 1 << i):
                cond = tuple(QubitVar(k, basis) for k in subset)
                return CorrelationVerdict(VerdictKind.CONDITIONAL, pair, bases, conditioning=cond)
    return CorrelationVerdict(VerdictKind.UNCORRELATED, pair, bases)


def _components(sys: QieSystem) -> List[int]:
    parent = list(range(sys.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for basis in Basis:
        for eq in sys.eqs(basis):
            qs = eq.qubits
            for q in qs[1:]:
                parent[find(q)] = find(qs[0])
    return [find(q) for q in range(sys.n)]


def qil_entangled(sys: QieSystem, i: int, j: int) -> bool:
    """Both qubits undetermined in both bases and linked through the equations."""
    _check_pair(sys, i, j)
    for q in (i, j):
        for basis in Basis:
            if sys.status_of(q, basis).kind is not StatusKind.UNDETERMINED:
                return False
    comp = _components(sys)
    return comp[i] == comp[j]


def preserved_against(sys: QieSystem, j: int, i: int, basis: Basis) -> bool:
    """Does some constraint on q_j survive forgetting q_i?"""
    _check_pair(sys, i, j)
    return bool(gf2.union(gf2.eliminate(sys.rows(basis), i)) >> j & 1)


def all_basis_uncorrelated(sys: QieSystem, i: int, j: int) -> bool:
    """Sufficient test for independence of ``i`` and ``j`` under any local bases."""
    _check_pair(sys, i, j)
    for basis in Basis:
        rows = sys.rows(basis)
        if gf2.in_span(rows, (1 << i) | (1 << j)):
            return False
        present = gf2.union(rows)
        if present >> j & 1 and not preserved_against(sys, j, i, basis):
            return False
        if present >> i & 1 and not preserved_against(sys, i, j, basis):
            return False
    return True


def dual_system(sys: QieSystem) -> QieSystem:
    return QieSystem(
        sys.n,
        tuple(type(eq)(Basis.C, eq.members, eq.rhs) for eq in sys.eqs_h),
        tuple(type(eq)(Basis.H, eq.members, eq.rhs) for eq in sys.eqs_c),
        tuple((h, c) for c, h in sys.status),
    )


def _swap_bits(mask: int, i: int, j: int) -> int:
    if (mask >> i & 1) != (mask >> j & 1):
        mask ^= (1 << i) | (1 << j)
    return mask


def equivalence_classes(sys: QieSystem) -> List[Tuple[int, ...]]:
    """Qubits linked by transpositions that leave both spans (with rhs) unchanged."""
    parent = list(range(sys.n))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for i, j in combinations(range(sys.n), 2):
        if all(
            gf2.rref([(_swap_bits(m, i, j), r) for m, r in sys.rows(b)]) == sys.rows(b)
            for b in Basis
        ):
            parent[find(j)] = find(i)
    groups: Dict[int, List[int]] = {}
    for q in range(sys.n):
        groups.setdefault(find(q), []).append(q)
    return sorted(tuple(g) for g in groups.values())


def pair_report(sys: QieSystem, i: int, j: int) -> PairReport:
    return PairReport(
        (i, j),
        pair_correlation(sys, i, j, Basis.C),
        pair_correlation(sys, i, j, Basis.H),
        all_basis_uncorrelated(sys, i, j),
        qil_entangled(sys, i, j),
    )


def correlation_table(sys: QieSystem) -> List[PairReport]:
    return [pair_report(sys, i, j) for i, j in combinations(range(sys.n), 2)]
