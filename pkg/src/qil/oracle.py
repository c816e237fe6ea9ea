"""Dense statevector ground truth.

Qubit 0 is the most significant bit of a basis-state index, so amplitudes
line up with kets written |q1 q2 ... qn>.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .qie import CNOT, U1Q, Basis, Gate, H, X, Z

MAX_QUBITS = 12
SQRT_HALF = 1 / np.sqrt(2)

H_MATRIX = np.array([[SQRT_HALF, SQRT_HALF], [SQRT_HALF, -SQRT_HALF]], dtype=complex)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)


class ZeroProbabilityBranch(ValueError):
    pass


class SizeOverflowError(ValueError):
    pass


@dataclass(frozen=True)
class SingleQubitUnitary:
    """[[a1, conj(a2) e^{i alpha}], [a2, -conj(a1) e^{i alpha}]]"""

    a1: complex
    a2: complex
    alpha: float = 0.0

    def __post_init__(self):
        norm = abs(self.a1) ** 2 + abs(self.a2) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|a1|^2 + |a2|^2 = {norm!r}")

    @property
    def matrix(self) -> np.ndarray:
        phase = np.exp(1j * self.alpha)
        return np.array(
            [[self.a1, np.conj(self.a2) * phase], [self.a2, -np.conj(self.a1) * phase]],
            dtype=complex,
        )

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SingleQubitUnitary":
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z = z / np.linalg.norm(z)
        return cls(complex(z[0]), complex(z[1]), float(rng.uniform(0, 2 * np.pi)))


HADAMARD = SingleQubitUnitary(SQRT_HALF, SQRT_HALF, 0.0)


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise SizeOverflowError(f"{self.n} qubits outside 1..{MAX_QUBITS}")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (2 ** self.n,):
            raise ValueError(f"expected {2 ** self.n} amplitudes, got {amps.shape[0]}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm^2 is {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, n: int, init_bits: Optional[Sequence[int]] = None) -> "StateVector":
        bits = [0] * n if init_bits is None else list(init_bits)
        if len(bits) != n:
            raise ValueError("init bits do not match qubit count")
        amps = np.zeros(2 ** n, dtype=complex)
        amps[int("".join(map(str, bits)) or "0", 2)] = 1.0
        return cls(n, amps)

    @classmethod
    def from_kets(cls, n: int, terms: dict) -> "StateVector":
        """Build from {"0101": amplitude}, normalising."""
        amps = np.zeros(2 ** n, dtype=complex)
        for ket, amp in terms.items():
            amps[int(ket, 2)] += amp
        return cls(n, amps / np.linalg.norm(amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)

    def bit(self, index: int, qubit: int) -> int:
        return index >> (self.n - 1 - qubit) & 1

    def to_text(self, tol: float = 1e-12) -> str:
        lines = []
        for idx, amp in enumerate(self.amps):
            if abs(amp) > tol:
                lines.append(f"{idx}:{float(amp.real)!r},{float(amp.imag)!r}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, n: int, text: str) -> "StateVector":
        amps = np.zeros(2 ** n, dtype=complex)
        for line in text.split():
            idx, _, val = line.partition(":")
            re, _, im = val.partition(",")
            amps[int(idx)] = complex(float(re), float(im))
        return cls(n, amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    keep: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        d = 2 ** len(self.keep)
        if m.shape != (d, d):
            raise ValueError(f"expected {d}x{d} matrix")
        if not np.allclose(m, m.conj().T, atol=1e-10):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1) > 1e-10:
            raise ValueError("density matrix trace is not 1")
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise ValueError("density matrix is not positive semidefinite")


# -- evolution -------------------------------------------------------------


def _apply_1q(amps: np.ndarray, n: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    psi = amps.reshape([2] * n)
    psi = np.tensordot(mat, psi, axes=([1], [qubit]))
    return np.moveaxis(psi, 0, qubit).reshape(-1)


def _apply_cnot(amps: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    psi = amps.reshape([2] * n).copy()
    idx = [slice(None)] * n
    idx[control] = 1
    axis = target if target < control else target - 1
    psi[tuple(idx)] = np.flip(psi[tuple(idx)], axis=axis)
    return psi.reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    n, amps = state.n, state.amps
    if isinstance(gate, H):
        for q in gate.qubits:
            amps = _apply_1q(amps, n, q, H_MATRIX)
    elif isinstance(gate, X):
        amps = _apply_1q(amps, n, gate.qubit, X_MATRIX)
    elif isinstance(gate, Z):
        amps = _apply_1q(amps, n, gate.qubit, Z_MATRIX)
    elif isinstance(gate, CNOT):
        if not (0 <= gate.control < n and 0 <= gate.target < n):
            raise IndexError(f"{gate!r} out of range for {n} qubits")
        amps = _apply_cnot(amps, n, gate.control, gate.target)
    elif isinstance(gate, U1Q):
        amps = _apply_1q(amps, n, gate.qubit, SingleQubitUnitary(gate.a1, gate.a2, gate.alpha).matrix)
    else:
        raise TypeError(f"unknown gate {gate!r}")
    return StateVector(n, amps)


def apply_unitary(state: StateVector, qubit: int, u: Optional[SingleQubitUnitary]) -> StateVector:
    if u is None:
        return state
    return StateVector(state.n, _apply_1q(state.amps, state.n, qubit, u.matrix))


def hadamard_all(state: StateVector) -> StateVector:
    return apply_gate(state, H(range(state.n)))


def simulate(circuit: Iterable[Gate], n: int, init_bits: Optional[Sequence[int]] = None) -> StateVector:
    if n > MAX_QUBITS:
        raise SizeOverflowError(f"{n} qubits exceeds {MAX_QUBITS}")
    state = StateVector.basis(n, init_bits)
    for gate in circuit:
        state = apply_gate(state, gate)
    return state


# -- measurement -----------------------------------------------------------


def _outcome_probability(state: StateVector, qubit: int, outcome: int) -> float:
    psi = state.amps.reshape([2] * state.n)
    return float(np.sum(np.abs(np.take(psi, outcome, axis=qubit)) ** 2))


def measure_collapse(
    state: StateVector,
    qubit: int,
    pre_rotation: Optional[SingleQubitUnitary],
    outcome: int,
) -> Tuple[StateVector, float]:
    """Rotate ``qubit``, project on ``outcome`` and renormalise; returns (state, probability)."""
    state = apply_unitary(state, qubit, pre_rotation)
    prob = _outcome_probability(state, qubit, outcome)
    if prob <= 1e-12:
        raise ZeroProbabilityBranch(f"outcome {outcome} on qubit {qubit} has probability {prob:.3g}")
    psi = state.amps.reshape([2] * state.n).copy()
    idx = [slice(None)] * state.n
    idx[qubit] = 1 - outcome
    psi[tuple(idx)] = 0
    return StateVector(state.n, psi.reshape(-1) / np.sqrt(prob)), prob


def measure_in_basis(state: StateVector, qubit: int, basis: Basis, outcome: int) -> Tuple[StateVector, float]:
    """Projective measurement of q(c) or q(h); the result stays in the original frame."""
    if basis is Basis.C:
        return measure_collapse(state, qubit, None, outcome)
    after, prob = measure_collapse(state, qubit, HADAMARD, outcome)
    return apply_unitary(after, qubit, HADAMARD), prob


def outcome_probability(state: StateVector, qubit: int, basis: Basis, outcome: int) -> float:
    if basis is Basis.H:
        state = apply_unitary(state, qubit, HADAMARD)
    return _outcome_probability(state, qubit, outcome)


Measurement = Tuple[int, Optional[SingleQubitUnitary], int]


def conditional_probability(state: StateVector, first: Measurement, then: Measurement) -> Tuple[float, float]:
    """(p(then | first), p(then)) with both rotations applied up front."""
    q1, u1, b1 = first
    q2, u2, b2 = then
    if q1 == q2:
        raise ValueError("conditional probability needs distinct qubits")
    rotated = apply_unitary(apply_unitary(state, q1, u1), q2, u2)
    p_then = _outcome_probability(rotated, q2, b2)
    collapsed, _ = measure_collapse(rotated, q1, None, b1)
    return _outcome_probability(collapsed, q2, b2), p_then


def random_basis_independence(state: StateVector, i: int, j: int, trials: int, seed: int, tol: float = 1e-7) -> bool:
    """Do outcomes of ``i`` and ``j`` stay independent under random local bases?"""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        ui, uj = SingleQubitUnitary.random(rng), SingleQubitUnitary.random(rng)
        rotated = apply_unitary(apply_unitary(state, i, ui), j, uj)
        probs = rotated.probabilities().reshape([2] * state.n)
        joint = probs.sum(axis=tuple(q for q in range(state.n) if q not in (i, j)))
        if i > j:
            joint = joint.T
        # both orders: condition on i then read j, and condition on j then read i
        for table in (joint, joint.T):
            first = table.sum(axis=1)
            then = table.sum(axis=0)
            for a in (0, 1):
                if first[a] <= 1e-12:
                    continue
                if np.abs(table[a] / first[a] - then).max() >= tol:
                    return False
    return True


# -- reduced states ----------------------------------------------------------


def partial_trace(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    keep = tuple(sorted(set(keep)))
    if not keep or len(keep) >= state.n + 1 or any(not 0 <= q < state.n for q in keep):
        raise ValueError(f"invalid kept qubits {keep!r}")
    traced = [q for q in range(state.n) if q not in keep]
    psi = np.moveaxis(state.amps.reshape([2] * state.n), keep + tuple(traced), range(state.n))
    psi = psi.reshape(2 ** len(keep), -1)
    return DensityMatrix(keep, psi @ psi.conj().T)


def product_marginal_check(state: StateVector, i: int, j: int, tol: float = 1e-9) -> bool:
    """Is the two-qubit marginal the product of its one-qubit marginals?"""
    rho_ij = partial_trace(state, (i, j)).matrix
    rho_i = partial_trace(state, (i,)).matrix
    rho_j = partial_trace(state, (j,)).matrix
    prod = np.kron(rho_i, rho_j) if i < j else np.kron(rho_j, rho_i)
    return float(np.linalg.norm(rho_ij - prod)) < tol


_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho: DensityMatrix) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if m.shape != (4, 4):
        raise ValueError("concurrence needs a two-qubit density matrix")
    tilde = _YY @ m.conj() @ _YY
    evals = np.sort(np.sqrt(np.abs(np.linalg.eigvals(m @ tilde).real)))[::-1]
    return float(max(0.0, evals[0] - evals[1] - evals[2] - evals[3]))


def pure_concurrence(pair: np.ndarray) -> float:
    """2|a00 a11 - a01 a10| for a normalised two-qubit pure state."""
    return float(2 * abs(pair[0] * pair[3] - pair[1] * pair[2]))


@dataclass(frozen=True, eq=False)
class LocalizationWitness:
    bases: Tuple[Tuple[int, Basis], ...]
    outcomes: Tuple[int, ...]
    probability: float
    pair_state: np.ndarray
    concurrence: float


def localization_branches(state: StateVector, i: int, j: int, bases: Sequence[Basis]):
    """Yield (outcomes, probability, two-qubit pure state) for every branch."""
    others = [q for q in range(state.n) if q not in (i, j)]
    rotated = state
    for q, b in zip(others, bases):
        if b is Basis.H:
            rotated = apply_unitary(rotated, q, HADAMARD)
    psi = rotated.amps.reshape([2] * state.n)
    psi = np.moveaxis(psi, others + [i, j], range(state.n)).reshape(-1, 4)
    for idx, row in enumerate(psi):
        prob = float(np.vdot(row, row).real)
        if prob > 1e-12:
            outcomes = tuple(idx >> (len(others) - 1 - k) & 1 for k in range(len(others)))
            yield outcomes, prob, row / np.sqrt(prob)


def find_localization_witness(state: StateVector, i: int, j: int, threshold: float = 1e-6) -> Optional[LocalizationWitness]:
    """First branch (in basis-choice, then outcome order) leaving i, j entangled."""
    if i == j:
        raise ValueError("need two distinct qubits")
    others = [q for q in range(state.n) if q not in (i, j)]
    if len(others) > 6:
        raise SizeOverflowError("localizable search is limited to 6 measured qubits")
    for bases in itertools.product((Basis.C, Basis.H), repeat=len(others)):
        for outcomes, prob, pair in localization_branches(state, i, j, bases):
            c = pure_concurrence(pair)
            if c > threshold:
                return LocalizationWitness(tuple(zip(others, bases)), outcomes, prob, pair, c)
    return None


def localizable_entanglement_search(state: StateVector, i: int, j: int) -> bool:
    return find_localization_witness(state, i, j) is not None


# -- parity checks against symbolic equations ----------------------------------


def _basis_probabilities(state: StateVector, basis: Basis) -> np.ndarray:
    return (hadamard_all(state) if basis is Basis.H else state).probabilities()


def _index_masks(n: int) -> np.ndarray:
    """Qubit-bitmask (bit q = qubit q) of every basis-state index."""
    idx = np.arange(2 ** n)
    masks = np.zeros(2 ** n, dtype=np.int64)
    for q in range(n):
        masks |= ((idx >> (n - 1 - q)) & 1) << q
    return masks


def parity_distribution(state: StateVector, members: int, basis: Basis) -> Tuple[float, float]:
    """(p(parity = 0), p(parity = 1)) of the qubits in bitmask ``members``."""
    probs = _basis_probabilities(state, basis)
    masks = _index_masks(state.n) & members
    parity = np.array([bin(m).count("1") & 1 for m in masks])
    p1 = float(probs[parity == 1].sum())
    return 1.0 - p1, p1


def support_masks(state: StateVector, basis: Basis, tol: float = 1e-12) -> List[int]:
    """Outcome bitmasks with nonzero probability, sorted."""
    probs = _basis_probabilities(state, basis)
    masks = _index_masks(state.n)
    return sorted(int(m) for m, p in zip(masks, probs) if p > tol)
