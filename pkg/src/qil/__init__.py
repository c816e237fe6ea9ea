"""Symbolic parity-equation reasoning about Bell-class entangled states, with a statevector oracle."""

from .qie import (
    CNOT,
    H,
    U1Q,
    X,
    Z,
    Basis,
    InfoStatus,
    ParityEquation,
    QieSystem,
    QubitVar,
    RepresentabilityError,
    derive_from_circuit,
    new_system,
)

__version__ = "0.1.0"
