import numpy as np
import pytest

from qil import CNOT, H, derive_from_circuit
from qil import oracle

# 0-based gate lists for the five reference states; qubit 3 plays L.
CIRCUITS = {
    "bell": (2, [H(0), CNOT(0, 1)]),
    "ghz": (3, [H(0), CNOT(0, 1), CNOT(1, 2)]),
    "psi3": (3, [H(0), CNOT(0, 1), H(2), CNOT(2, 1)]),
    "psi4": (4, [H(0), CNOT(0, 1), H(2), CNOT(2, 1), H(3), CNOT(3, 2)]),
    "psi3L": (4, [H(0), CNOT(0, 1), H(2), CNOT(2, 1), CNOT(1, 3)]),
}


def system(name):
    n, gates = CIRCUITS[name]
    return derive_from_circuit(gates, n)


def state(name):
    n, gates = CIRCUITS[name]
    return oracle.simulate(gates, n)


def ket(n, *indices, signs=None):
    """Uniform superposition over computational indices (qubit 1 is the leftmost bit)."""
    signs = signs or [1] * len(indices)
    amps = np.zeros(2 ** n, dtype=complex)
    for idx, s in zip(indices, signs):
        amps[idx] = s
    return oracle.StateVector(n, amps / np.linalg.norm(amps))


@pytest.fixture
def sys_of():
    return system


@pytest.fixture
def state_of():
    return state


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def record(label, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f"  ({detail})" if detail else "")
        _CRITERIA.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
