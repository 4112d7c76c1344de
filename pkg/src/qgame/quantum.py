"""Dense two-qubit states, local and joint unitaries, and Born-rule statistics.

Basis order is |00>, |01>, |10>, |11> with Alice owning the left (first)
qubit, so a local pair ``tensor(a, b)`` is ``np.kron(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

UNITARY_TOL = 1e-12
NORM_TOL = 1e-12

BASIS_LABELS = ("00", "01", "10", "11")


def _frozen(arr, shape, what: str) -> np.ndarray:
    m = np.array(arr, dtype=np.complex128)
    if m.shape != shape:
        raise ValueError(f"{what} must have shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{what} has non-finite entries")
    m.setflags(write=False)
    return m


def _unitarity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def _check_unitary(m: np.ndarray, what: str) -> None:
    defect = _unitarity_defect(m)
    if defect >= UNITARY_TOL:
        raise ValueError(f"{what} is not unitary (max |U^dag U - I| = {defect:.3e})")


@dataclass(frozen=True)
class TwoQubitState:
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps, (4,), "state")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) >= NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, label: str) -> "TwoQubitState":
        amps = np.zeros(4, dtype=np.complex128)
        amps[BASIS_LABELS.index(label)] = 1.0
        return cls(amps)

    def with_phase(self, theta: float) -> "TwoQubitState":
        return TwoQubitState(np.exp(1j * theta) * self.amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __eq__(self, other):
        if not isinstance(other, TwoQubitState):
            return NotImplemented
        return bool(np.array_equal(self.amps, other.amps))

    def __hash__(self):
        return hash(self.amps.tobytes())


@dataclass(frozen=True)
class LocalUnitary:
    m: np.ndarray
    name: Optional[str] = None

    def __post_init__(self):
        m = _frozen(self.m, (2, 2), "local operator")
        _check_unitary(m, f"local operator {self.name or ''}".strip())
        object.__setattr__(self, "m", m)

    def __eq__(self, other):
        if not isinstance(other, LocalUnitary):
            return NotImplemented
        return self.name == other.name and bool(np.array_equal(self.m, other.m))

    def __hash__(self):
        return hash((self.name, self.m.tobytes()))

    def __repr__(self):
        return f"LocalUnitary({self.name or self.m.tolist()!r})"


@dataclass(frozen=True)
class JointUnitary:
    m: np.ndarray
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        m = _frozen(self.m, (4, 4), "joint operator")
        _check_unitary(m, "joint operator")
        object.__setattr__(self, "m", m)

    @property
    def dagger(self) -> "JointUnitary":
        return JointUnitary(self.m.conj().T)

    def __matmul__(self, other: "JointUnitary") -> "JointUnitary":
        return JointUnitary(self.m @ other.m)

    def __eq__(self, other):
        if not isinstance(other, JointUnitary):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __hash__(self):
        return hash(self.m.tobytes())


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probabilities of the four computational-basis outcomes 00, 01, 10, 11."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (4,):
            raise ValueError(f"outcome distribution needs 4 entries, got {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < -NORM_TOL) or np.any(p > 1 + NORM_TOL):
            raise ValueError(f"outcome probabilities out of range: {p}")
        if abs(p.sum() - 1.0) >= NORM_TOL:
            raise ValueError(f"outcome probabilities sum to {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __getitem__(self, key) -> float:
        if isinstance(key, str):
            key = BASIS_LABELS.index(key)
        return float(self.p[key])

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        """Return Alice's and Bob's single-qubit outcome distributions."""
        grid = self.p.reshape(2, 2)
        return grid.sum(axis=1), grid.sum(axis=0)

    def expectation(self, weights) -> float:
        return float(np.dot(self.p, np.asarray(weights, dtype=float)))


# Pauli matrices and the players' operations.
_I = np.eye(2)
_X = np.array([[0, 1], [1, 0]])
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.array([[1, 0], [0, -1]])

IDENTITY = LocalUnitary(_I, "I")
PAULI_X = LocalUnitary(_X, "X")
PAULI_Y = LocalUnitary(_Y, "Y")
PAULI_Z = LocalUnitary(_Z, "Z")
I_Y = LocalUnitary(1j * _Y, "iY")
I_Z = LocalUnitary(1j * _Z, "iZ")


def tensor(a: LocalUnitary, b: LocalUnitary) -> JointUnitary:
    """Alice's operator ``a`` on the first qubit, Bob's ``b`` on the second."""
    return JointUnitary(np.kron(a.m, b.m))


def apply(u: JointUnitary, s: TwoQubitState) -> TwoQubitState:
    return TwoQubitState(u.m @ s.amps)


def yy() -> np.ndarray:
    return np.kron(_Y, _Y)


def disentangler() -> JointUnitary:
    """exp(-i pi Y(x)Y / 4) in closed form.

    (Y(x)Y)^2 = I, so the exponential is cos(pi/4) I - i sin(pi/4) Y(x)Y.
    """
    return JointUnitary((np.eye(4) - 1j * yy()) / np.sqrt(2), name="J")


def outcome_distribution(s: TwoQubitState) -> OutcomeDistribution:
    p = np.abs(s.amps) ** 2
    # Born weights of a normalized state can overshoot 1 by an ulp.
    return OutcomeDistribution(np.clip(p, 0.0, 1.0))


def product_state(alice, bob) -> TwoQubitState:
    """Unentangled state from two normalized single-qubit amplitude pairs."""
    return TwoQubitState(np.kron(np.asarray(alice, dtype=complex), np.asarray(bob, dtype=complex)))
