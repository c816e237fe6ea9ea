"""Line-oriented circuit language.

::

    qubits 3          # must come first
    init 000          # optional, defaults to all zeros
    h 1               # h I [I ...] is one simultaneous layer
    cx 1 2
    x 3
    z 3
    u 1 a1re a1im a2re a2im alpha
    measure 3 h 0     # measure I c|h [0|1]
    pair 1 2

Qubit indices are 1-based in the text and 0-based in the parsed document.
Gates must precede the first ``measure``/``pair`` directive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .qie import CNOT, U1Q, Basis, Gate, H, X, Z


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Measure:
    qubit: int
    basis: Basis
    outcome: Optional[int] = None


@dataclass(frozen=True)
class Pair:
    i: int
    j: int


Directive = Union[Measure, Pair]


@dataclass
class CircuitDocument:
    n: int
    init: Tuple[int, ...]
    gates: List[Gate] = field(default_factory=list)
    directives: List[Directive] = field(default_factory=list)

    @property
    def representable_gates(self) -> bool:
        return not any(isinstance(g, U1Q) for g in self.gates)


_ARITY = {"qubits": 1, "init": 1, "x": 1, "z": 1, "cx": 2, "u": 6, "pair": 2}


def _tokens(line: str) -> List[Tuple[int, str]]:
    line = line.split("#", 1)[0]
    out, col = [], 0
    for tok in line.split():
        col = line.index(tok, col)
        out.append((col + 1, tok))
        col += len(tok)
    return out


def parse_circuit(text: str) -> CircuitDocument:
    n: Optional[int] = None
    init: Optional[Tuple[int, ...]] = None
    gates: List[Gate] = []
    directives: List[Directive] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        (kcol, kw), args = toks[0], toks[1:]

        def fail(col: int, msg: str):
            raise ParseError(lineno, col, msg)

        def end_col() -> int:
            return args[-1][0] + len(args[-1][1]) if args else kcol + len(kw)

        def qubit(tok: Tuple[int, str]) -> int:
            col, s = tok
            if not s.isdigit():
                fail(col, f"expected a qubit index, got {s!r}")
            q = int(s)
            if not 1 <= q <= n:
                fail(col, f"qubit index {q} out of range 1..{n}")
            return q - 1

        if kw == "qubits":
            if n is not None:
                fail(kcol, "duplicate qubits declaration")
        elif kw not in _ARITY and kw not in ("h", "measure"):
            fail(kcol, f"unknown keyword {kw!r}")
        elif n is None:
            fail(kcol, "'qubits N' must be declared first")

        if kw in _ARITY and len(args) != _ARITY[kw]:
            col = args[_ARITY[kw]][0] if len(args) > _ARITY[kw] else end_col()
            fail(col, f"{kw!r} takes {_ARITY[kw]} argument(s), got {len(args)}")
        if kw in ("h", "x", "z", "cx", "u") and directives:
            fail(kcol, "gates must come before measure/pair directives")

        if kw == "qubits":
            col, s = args[0]
            if not s.isdigit() or int(s) < 1:
                fail(col, f"qubit count must be a positive integer, got {s!r}")
            n = int(s)
        elif kw == "init":
            col, s = args[0]
            if init is not None:
                fail(kcol, "duplicate init declaration")
            if len(s) != n or set(s) - {"0", "1"}:
                fail(col, f"init needs a bitstring of length {n}, got {s!r}")
            init = tuple(int(ch) for ch in s)
        elif kw == "h":
            if not args:
                fail(end_col(), "'h' needs at least one qubit")
            qs = []
            for tok in args:
                q = qubit(tok)
                if q in qs:
                    fail(tok[0], f"qubit {q + 1} repeated in h")
                qs.append(q)
            gates.append(H(qs))
        elif kw == "x":
            gates.append(X(qubit(args[0])))
        elif kw == "z":
            gates.append(Z(qubit(args[0])))
        elif kw == "cx":
            ctrl, tgt = qubit(args[0]), qubit(args[1])
            if ctrl == tgt:
                fail(args[1][0], "control equals target")
            gates.append(CNOT(ctrl, tgt))
        elif kw == "u":
            q = qubit(args[0])
            nums = []
            for col, s in args[1:]:
                try:
                    nums.append(float(s))
                except ValueError:
                    fail(col, f"malformed number {s!r}")
            a1, a2 = complex(nums[0], nums[1]), complex(nums[2], nums[3])
            try:
                gates.append(U1Q(q, a1, a2, nums[4]))
            except ValueError as exc:
                fail(args[1][0], str(exc))
        elif kw == "measure":
            if len(args) not in (2, 3):
                fail(end_col(), f"'measure' takes 2 or 3 arguments, got {len(args)}")
            q = qubit(args[0])
            col, b = args[1]
            if b not in ("c", "h"):
                fail(col, f"basis must be 'c' or 'h', got {b!r}")
            outcome = None
            if len(args) == 3:
                col, s = args[2]
                if s not in ("0", "1"):
                    fail(col, f"outcome must be 0 or 1, got {s!r}")
                outcome = int(s)
            directives.append(Measure(q, Basis(b), outcome))
        elif kw == "pair":
            i, j = qubit(args[0]), qubit(args[1])
            if i == j:
                fail(args[1][0], "pair needs two distinct qubits")
            directives.append(Pair(i, j))

    if n is None:
        raise ParseError(1, 1, "missing 'qubits N' declaration")
    return CircuitDocument(n, init if init is not None else (0,) * n, gates, directives)


def _gate_text(gate: Gate) -> str:
    if isinstance(gate, H):
        return "h " + " ".join(str(q + 1) for q in gate.qubits)
    if isinstance(gate, X):
        return f"x {gate.qubit + 1}"
    if isinstance(gate, Z):
        return f"z {gate.qubit + 1}"
    if isinstance(gate, CNOT):
        return f"cx {gate.control + 1} {gate.target + 1}"
    nums = (gate.a1.real, gate.a1.imag, gate.a2.real, gate.a2.imag, gate.alpha)
    return f"u {gate.qubit + 1} " + " ".join(repr(float(v)) for v in nums)


def format_circuit(doc: CircuitDocument) -> str:
    lines = [f"qubits {doc.n}"]
    if any(doc.init):
        lines.append("init " + "".join(map(str, doc.init)))
    lines += [_gate_text(g) for g in doc.gates]
    for d in doc.directives:
        if isinstance(d, Measure):
            tail = "" if d.outcome is None else f" {d.outcome}"
            lines.append(f"measure {d.qubit + 1} {d.basis.value}{tail}")
        else:
            lines.append(f"pair {d.i + 1} {d.j + 1}")
    return "\n".join(lines) + "\n"
