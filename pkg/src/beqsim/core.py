"""Dense statevector simulation for small registers.

Conventions used throughout the package:

* qubit 0 is the most significant bit of the basis index (big-endian),
* measurement in angle phi projects onto (|0> + e^{i phi}|1>)/sqrt(2) for
  outcome 0 and removes the measured wire from the register,
* every operation returns a new value; nothing is mutated in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "StateVector",
    "SingleQubitGate",
    "Angle",
    "gate_matrix",
    "apply_single",
    "apply_matrix1",
    "apply_cnot",
    "apply_cphase",
    "plus_theta",
    "project_phi",
    "measure_phi",
    "outcome_distribution",
    "basis_state",
]

# probability below this is treated as an empty branch, never sampled
BRANCH_CUTOFF = 1e-14


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amp: np.ndarray  # complex128, length 2**num_qubits

    def __post_init__(self):
        if len(self.amp) != 2 ** self.num_qubits:
            raise ValueError("amplitude length does not match qubit count")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amp) ** 2


def basis_state(num_qubits: int, index: int = 0) -> StateVector:
    amp = np.zeros(2 ** num_qubits, dtype=np.complex128)
    amp[index] = 1.0
    return StateVector(num_qubits, amp)


@dataclass(frozen=True)
class SingleQubitGate:
    """Parametrized 1-qubit gate U(alpha, beta, gamma)."""

    alpha: float
    beta: float
    gamma: float


def gate_matrix(gate: SingleQubitGate) -> np.ndarray:
    a, b, g = gate.alpha, gate.beta, gate.gamma
    return np.array(
        [
            [np.exp(1j * b) * np.cos(a), np.exp(1j * g) * np.sin(a)],
            [-np.exp(-1j * g) * np.sin(a), np.exp(-1j * b) * np.cos(a)],
        ],
        dtype=np.complex128,
    )


class Angle:
    """A measurement angle, exact when it is p*pi/q with q a power of two.

    Exact angles survive the correction arithmetic of adaptive patterns
    ((-1)^s phi and phi + s*pi stay on the grid); float-only angles are
    allowed everywhere except in pattern files.
    """

    __slots__ = ("frac", "_float")

    def __init__(self, frac=None, value=None):
        if frac is not None:
            self.frac = Fraction(frac) % 2  # units of pi, reduced mod 2
            self._float = float(self.frac) * np.pi
        else:
            self.frac = None
            self._float = float(value) % (2 * np.pi)

    @classmethod
    def from_pq(cls, p: int, q: int) -> "Angle":
        return cls(frac=Fraction(p, q))

    @property
    def value(self) -> float:
        return self._float

    @property
    def exact(self):
        """(p, q) pair with q a power of two, or None."""
        if self.frac is None:
            return None
        return (self.frac.numerator, self.frac.denominator)

    def __neg__(self):
        if self.frac is not None:
            return Angle(frac=-self.frac)
        return Angle(value=-self._float)

    def __add__(self, other):
        if self.frac is not None and other.frac is not None:
            return Angle(frac=self.frac + other.frac)
        return Angle(value=self.value + other.value)

    def add_half_turns(self, k: int) -> "Angle":
        if self.frac is not None:
            return Angle(frac=self.frac + k)
        return Angle(value=self._float + k * np.pi)

    def __eq__(self, other):
        if self.frac is not None and other.frac is not None:
            return self.frac == other.frac
        return abs(self.value - other.value) < 1e-15

    def __hash__(self):
        return hash(self.frac) if self.frac is not None else hash(self._float)

    def __repr__(self):
        if self.frac is not None:
            return f"Angle({self.frac.numerator}pi/{self.frac.denominator})"
        return f"Angle(value={self._float:.6f})"


ZERO_ANGLE = Angle(frac=0)


try:
    from . import _fastkernels as _fk
    HAVE_FAST_KERNELS = True
except ImportError:
    _fk = None
    HAVE_FAST_KERNELS = False


def _check_qubit(state: StateVector, qubit: int):
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.num_qubits}-qubit state")


def apply_matrix1(state: StateVector, qubit: int, m: np.ndarray) -> StateVector:
    """Apply an arbitrary 2x2 matrix to one wire."""
    _check_qubit(state, qubit)
    n = state.num_qubits
    if _fk is not None:
        mm = np.ascontiguousarray(m, dtype=np.complex128)
        return StateVector(n, _fk.apply_matrix1(state.amp, n, qubit, mm))
    a = state.amp.reshape(2 ** qubit, 2, 2 ** (n - qubit - 1))
    out = np.einsum("ij,ajb->aib", m, a)
    return StateVector(n, np.ascontiguousarray(out.reshape(-1)))


def apply_single(state: StateVector, qubit: int, gate: SingleQubitGate) -> StateVector:
    return apply_matrix1(state, qubit, gate_matrix(gate))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    n = state.num_qubits
    if _fk is not None:
        return StateVector(n, _fk.apply_cnot(state.amp, n, control, target))
    idx = np.arange(2 ** n)
    cbit = (idx >> (n - 1 - control)) & 1
    src = np.where(cbit == 1, idx ^ (1 << (n - 1 - target)), idx)
    return StateVector(n, state.amp[src])


def apply_cphase(state: StateVector, a: int, b: int) -> StateVector:
    _check_qubit(state, a)
    _check_qubit(state, b)
    if a == b:
        raise ValueError("wires must differ")
    n = state.num_qubits
    if _fk is not None:
        return StateVector(n, _fk.apply_cphase(state.amp, n, a, b))
    idx = np.arange(2 ** n)
    both = ((idx >> (n - 1 - a)) & 1) & ((idx >> (n - 1 - b)) & 1)
    amp = state.amp.copy()
    amp[both == 1] *= -1
    return StateVector(n, amp)


def plus_theta(theta) -> StateVector:
    """One-qubit state (|0> + e^{i theta}|1>)/sqrt(2)."""
    t = theta.value if isinstance(theta, Angle) else float(theta)
    amp = np.array([1.0, np.exp(1j * t)], dtype=np.complex128) / np.sqrt(2)
    return StateVector(1, amp)


def _remove_wire(amp: np.ndarray, n: int, qubit: int, keep: np.ndarray) -> np.ndarray:
    if _fk is not None:
        return _fk.remove_wire(np.ascontiguousarray(amp), n, qubit,
                               complex(keep[0]), complex(keep[1]))
    a = amp.reshape(2 ** qubit, 2, 2 ** (n - qubit - 1))
    return np.ascontiguousarray((a[:, 0, :] * keep[0] + a[:, 1, :] * keep[1]).reshape(-1))


def project_phi(state: StateVector, qubit: int, phi, outcome: int):
    """Project one wire onto <+_{phi + outcome*pi}| and drop it.

    Returns (branch probability, renormalized smaller state).  The state is
    None when the branch probability falls below the cutoff.
    """
    _check_qubit(state, qubit)
    t = phi.value if isinstance(phi, Angle) else float(phi)
    if outcome:
        t += np.pi
    # <+_t| = (<0| + e^{-it}<1|)/sqrt(2)
    bra = np.array([1.0, np.exp(-1j * t)], dtype=np.complex128) / np.sqrt(2)
    reduced = _remove_wire(state.amp, state.num_qubits, qubit, bra)
    p = float(np.vdot(reduced, reduced).real)
    if p < BRANCH_CUTOFF:
        return 0.0, None
    return p, StateVector(state.num_qubits - 1, reduced / np.sqrt(p))


def measure_phi(state: StateVector, qubit: int, phi, rng):
    """Sample an angle-basis measurement; the measured wire is removed."""
    p0, s0 = project_phi(state, qubit, phi, 0)
    if rng.random() < p0:
        return 0, s0
    p1, s1 = project_phi(state, qubit, phi, 1)
    if s1 is None:
        # p0 was within cutoff of 1; numerical noise picked the dead branch
        return 0, s0
    return 1, s1


def outcome_distribution(state: StateVector, groups):
    """Probability carried by each group of basis indices.

    ``groups`` must be disjoint subsets of the basis indices; returns the
    list of group probabilities plus the mass that no group claims.
    """
    probs = state.probabilities()
    seen = set()
    out = []
    for g in groups:
        g = list(g)
        if seen & set(g):
            raise ValueError("groups overlap")
        seen.update(g)
        out.append(float(probs[g].sum()))
    rest = float(probs.sum()) - sum(out)
    return out, max(rest, 0.0)
