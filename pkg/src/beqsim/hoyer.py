"""Exact search over a partial database: closed-form angles and operators.

For a database w of size N living in an n-qubit space (2^{n-1} < N <= 2^n),
a single marked item tau in w is found with certainty by m plain rounds of
amplitude amplification followed by one phase-tuned round.  All the angles
come out of closed forms; no optimization happens here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SearchInstance",
    "HoyerAngles",
    "BlockSet",
    "hoyer_angles",
    "oracle_matrix",
    "diffusion_matrix",
    "q_matrix",
    "grover_success_prob",
    "block_set",
    "run_reference",
    "phase_correction_check",
    "SET_D",
]

# canonical 3-bit databases; every w with 2^2 < N <= 2^3 reduces to one of
# these under bit permutation plus complementation (see databases module)
SET_D = (
    (0, 1, 2, 3, 4),
    (0, 1, 2, 4, 7),
    (0, 1, 2, 5, 6),
    (0, 1, 2, 3, 4, 5),
    (0, 1, 2, 3, 4, 7),
    (0, 1, 2, 5, 6, 7),
    (0, 1, 2, 3, 4, 5, 6),
    (0, 1, 2, 3, 4, 5, 6, 7),
)


@dataclass(frozen=True)
class SearchInstance:
    n: int
    w: tuple
    tau: int
    povm: tuple | None = None  # optional partition of w into entry groups

    def __post_init__(self):
        N = len(self.w)
        if not 2 ** (self.n - 1) < N <= 2 ** self.n:
            raise ValueError("database size must satisfy 2^(n-1) < N <= 2^n")
        if self.tau not in self.w:
            raise ValueError("marked item must belong to the database")
        if self.povm is not None:
            flat = sorted(i for g in self.povm for i in g)
            if flat != sorted(self.w):
                raise ValueError("povm groups must partition the database")

    @property
    def N(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class HoyerAngles:
    N: int
    theta0: float
    m: int
    theta_rem: float
    psi: float
    phi: float
    u: float
    v: float


def hoyer_angles(N: int) -> HoyerAngles:
    """Angles making the search over N items exact.

    theta0 is the base rotation per round; after m plain rounds the state
    sits theta_rem short of the target, and (psi, phi, u) tune the final
    round to close that gap exactly.
    """
    if N < 2:
        raise ValueError("need at least two items")
    a = 1.0 / N
    theta0 = np.arcsin(np.sqrt(a))
    m = int((np.pi / 2 - theta0) // (2 * theta0))
    theta_rem = np.pi / 2 - (2 * m + 1) * theta0
    c = 1.0 - np.sin(theta_rem) ** 2 / (2 * a * (1 - a))
    psi = float(np.arccos(np.clip(c, -1.0, 1.0)))
    phi = 2.0 * np.arctan(np.tan(psi / 2) * (1 - 2 * a))
    eipsi = np.exp(1j * psi)
    v = float(np.angle(-a * (1 - eipsi) - eipsi))
    u = float(np.angle((1 - eipsi) * np.sqrt(a * (1 - a)))) - v
    # fix the sign of u by the factorization residual:
    # Q(phi+u, psi) must equal e^{iv} diag(1, e^{iu}) R(theta_rem)
    for cand in (u, -u):
        if _factorization_residual(a, phi, psi, cand, v, theta_rem) < 1e-10:
            u = cand
            break
    else:
        raise ValueError("no sign of u satisfies the exact-round factorization")
    ang = HoyerAngles(N, float(theta0), m, float(theta_rem), psi, float(phi), float(u), v)
    _check_equal_diagonals(ang)
    return ang


def _factorization_residual(a, phi, psi, u, v, theta_rem) -> float:
    q = q_matrix(a, phi + u, psi)
    rot = np.array(
        [
            [np.cos(theta_rem), -np.sin(theta_rem)],
            [np.sin(theta_rem), np.cos(theta_rem)],
        ]
    )
    factored = np.exp(1j * v) * np.diag([1.0, np.exp(1j * u)]) @ rot
    return float(np.abs(q - factored).max())


def _check_equal_diagonals(ang: HoyerAngles):
    q = q_matrix(1.0 / ang.N, ang.phi, ang.psi)
    if abs(q[0, 0] - q[1, 1]) > 1e-10:
        raise ValueError("phi does not balance the diagonal of Q")


def oracle_matrix(instance: SearchInstance, phase: float) -> np.ndarray:
    """O(phase) = -I + (1 - e^{i phase})|tau><tau| on the full space."""
    dim = 2 ** instance.n
    m = -np.eye(dim, dtype=np.complex128)
    m[instance.tau, instance.tau] += 1 - np.exp(1j * phase)
    return m


def diffusion_matrix(instance: SearchInstance, psi: float) -> np.ndarray:
    """D(psi) = -I + (1 - e^{i psi})|Psi_in><Psi_in|, uniform over w."""
    dim = 2 ** instance.n
    vec = np.zeros(dim, dtype=np.complex128)
    vec[list(instance.w)] = 1.0 / np.sqrt(instance.N)
    return -np.eye(dim, dtype=np.complex128) + (1 - np.exp(1j * psi)) * np.outer(vec, vec.conj())


def preparation_matrix(instance: SearchInstance) -> np.ndarray:
    """A unitary A with A|0> = uniform superposition over w."""
    dim = 2 ** instance.n
    vec = np.zeros(dim, dtype=np.complex128)
    vec[list(instance.w)] = 1.0 / np.sqrt(instance.N)
    # complete the first column to a unitary by Householder reflection
    e0 = np.zeros(dim, dtype=np.complex128)
    e0[0] = 1.0
    d = vec - e0
    nrm = np.linalg.norm(d)
    if nrm < 1e-12:
        return np.eye(dim, dtype=np.complex128)
    d /= nrm
    return np.eye(dim, dtype=np.complex128) - 2.0 * np.outer(d, d.conj())


def q_matrix(a: float, phi: float, psi: float) -> np.ndarray:
    """One tuned round D(psi)O(phi), written in the 2-d invariant basis.

    Basis: |0~> = the non-marked part of the start state, |1~> = the marked
    item; valid for any 0 < a < 1 where a is the marked item's weight.
    """
    if not 0 < a < 1:
        raise ValueError("a must lie strictly between 0 and 1")
    eipsi = np.exp(1j * psi)
    eiphi = np.exp(1j * phi)
    s = np.sqrt(a * (1 - a))
    return np.array(
        [
            [-a * (1 - eipsi) - eipsi, (1 - eipsi) * eiphi * s],
            [(1 - eipsi) * s, a * (1 - eipsi) * eiphi - eiphi],
        ],
        dtype=np.complex128,
    )


def grover_success_prob(N: int, iterations: int) -> float:
    """Success of plain amplitude amplification after k rounds."""
    if iterations < 0:
        raise ValueError("iteration count must be nonnegative")
    return float(np.sin((2 * iterations + 1) * np.arcsin(1 / np.sqrt(N))) ** 2)


@dataclass(frozen=True)
class BlockSet:
    """The dense unitaries one exact run is composed of."""

    A: np.ndarray
    O_pi: np.ndarray
    D_pi: np.ndarray
    O_phi_u: np.ndarray
    D_psi: np.ndarray
    angles: HoyerAngles = field(repr=False)


def block_set(instance: SearchInstance) -> BlockSet:
    ang = hoyer_angles(instance.N)
    return BlockSet(
        A=preparation_matrix(instance),
        O_pi=oracle_matrix(instance, np.pi),
        D_pi=diffusion_matrix(instance, np.pi),
        O_phi_u=oracle_matrix(instance, ang.phi + ang.u),
        D_psi=diffusion_matrix(instance, ang.psi),
        angles=ang,
    )


def run_reference(instance: SearchInstance) -> float:
    """Matrix-level execution of the exact search; returns the success
    probability of the POVM group containing tau (the item itself when no
    POVM grouping is set)."""
    blocks = block_set(instance)
    dim = 2 ** instance.n
    state = np.zeros(dim, dtype=np.complex128)
    state[0] = 1.0
    state = blocks.A @ state
    for _ in range(blocks.angles.m):
        state = blocks.D_pi @ (blocks.O_pi @ state)
    state = blocks.D_psi @ (blocks.O_phi_u @ state)
    if instance.povm is None:
        return float(abs(state[instance.tau]) ** 2)
    for group in instance.povm:
        if instance.tau in group:
            return float(sum(abs(state[i]) ** 2 for i in group))
    raise AssertionError("tau not covered by the povm partition")


def phase_correction_check(N: int, m: int) -> bool:
    """m repetitions of one tuned round collapse to a single phase
    conjugation around the m-fold real rotation (the conditional phases
    cancel between consecutive rounds)."""
    if m < 1:
        raise ValueError("m must be positive")
    a = 1.0 / N
    theta0 = np.arcsin(np.sqrt(a))
    theta = 0.9 * 2 * theta0  # any angle within one round's reach
    psi = float(np.arccos(1 - np.sin(theta) ** 2 / (2 * a * (1 - a))))
    phi = 2.0 * np.arctan(np.tan(psi / 2) * (1 - 2 * a))
    eipsi = np.exp(1j * psi)
    v = float(np.angle(-a * (1 - eipsi) - eipsi))
    u = v - float(np.angle((1 - eipsi) * np.sqrt(a * (1 - a))))
    rot = np.array(
        [
            [np.cos(theta), -np.sin(theta)],
            [np.sin(theta), np.cos(theta)],
        ]
    )
    conj = np.diag([1.0, np.exp(-1j * u)])
    conj_inv = np.diag([1.0, np.exp(1j * u)])
    lhs = np.linalg.matrix_power(q_matrix(a, phi, psi), m)
    rhs = np.exp(1j * m * v) * conj @ np.linalg.matrix_power(rot, m) @ conj_inv
    return bool(np.allclose(lhs, rhs, atol=1e-10))
