"""Three-party blind execution of measurement patterns.

Two clients share the computation: Alice owns the algorithm nodes, Oscar
owns the oracle nodes.  Bob, the server, holds the qubits, entangles the
graph, and measures at announced angles; he never learns the nominal
angles.  Every non-input node reaches Bob through remote state
preparation as |+_{theta + s*pi}>, the client keeping the bit s.  The
announced angle for node j is

    delta_j = phi'_j + theta_j + (r_i xor s_j) * pi

where phi'_j is the correction-adapted nominal angle and r_i is the bit
of the shared pseudorandom string indexed by j's position in the total
order.  Bob reports raw outcomes b_j; the clients recover the true
outcomes as s_j = b_j xor r_i.

Input nodes are sent directly by Alice as Rz(theta_j)|psi_in>; for the
|0> inputs of the shipped patterns this rotation is a global phase, so
the delivered state itself carries no secret.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import Angle, ZERO_ANGLE, StateVector, basis_state, plus_theta
from .mbqc import (MeasurementPattern, corrected_angle, _Register,
                   measure_phi)

__all__ = [
    "Secrets",
    "Transcript",
    "prng_expand",
    "rsp_channel",
    "draw_secrets",
    "run_boqc",
    "run_boqc_optimized",
    "blindness_test",
    "export_transcript",
]

GRID = 512  # blinding angles are multiples of pi/GRID


def prng_expand(xi: bytes, length: int) -> tuple:
    """Deterministic bit expansion of a short seed (counter-mode SHA-256).

    Not cryptographically vetted; guessing the seed succeeds with
    probability 2^-|xi|, which is the documented security level here.
    """
    bits = []
    counter = 0
    while len(bits) < length:
        block = hashlib.sha256(xi + counter.to_bytes(8, "big")).digest()
        for byte in block:
            for k in range(8):
                bits.append((byte >> k) & 1)
        counter += 1
    return tuple(bits[:length])


def rsp_channel(theta: Angle, rng):
    """Remote state preparation of |+_theta>.

    Returns (state delivered to the server, compensation bit s kept by
    the client); the delivered state is |+_{theta + s*pi}>, so averaging
    over s leaves the server with the maximally mixed state.
    """
    s = int(rng.integers(2))
    delivered = plus_theta(theta.add_half_turns(s)) if s else plus_theta(theta)
    return delivered, s


def _grid_angle(rng) -> Angle:
    return Angle(frac=Fraction(int(rng.integers(2 * GRID)), GRID))


@dataclass
class Secrets:
    """Client-side randomness: per-node blinding angles, the shared bit
    string r, and the seed it was expanded from."""

    theta: dict               # node -> Angle, split by ownership
    r: tuple                  # shared bits, indexed by total-order position
    xi: bytes

    def theta_of(self, node) -> Angle:
        return self.theta[node]


@dataclass
class Transcript:
    """Bob's view: everything the server sees, nothing the clients keep.

    Events are (step, sender, kind, node, value) tuples; kinds are
    "qubit" (value None), "angle" (value an Angle), "outcome" (value a
    bit).  The type deliberately has no slots for nominal or blinding
    angles.
    """

    events: list = field(default_factory=list)

    def add(self, sender, kind, node, value=None):
        self.events.append((len(self.events), sender, kind, node, value))

    def angles(self):
        return {e[3]: e[4] for e in self.events if e[2] == "angle"}

    def outcomes(self):
        return {e[3]: e[4] for e in self.events if e[2] == "outcome"}


def export_transcript(transcript: Transcript) -> str:
    """Line-delimited event log, one event per line."""
    lines = []
    for step, sender, kind, node, value in transcript.events:
        if value is None:
            val = "-"
        elif isinstance(value, Angle):
            pq = value.exact
            val = f"{pq[0]}/{pq[1]}pi" if pq else f"{value.value:.12f}"
        else:
            val = str(int(value))
        lines.append(f"{step} {sender} {kind} {node} {val}")
    return "\n".join(lines) + "\n"


def draw_secrets(pattern: MeasurementPattern, rng) -> Secrets:
    theta = {j: _grid_angle(rng) for j in pattern.graph.nodes}
    xi = bytes(int(b) for b in rng.integers(256, size=16, dtype=np.int64))
    r = prng_expand(xi, len(pattern.total_order))
    return Secrets(theta=theta, r=r, xi=xi)


def _deliver(pattern, j, secrets, rng, input_states, transcript, mutant):
    owner = pattern.owner.get(j, "alice")
    if j in pattern.graph.inputs:
        base = input_states.get(j, plus_theta(ZERO_ANGLE))
        if mutant:
            state, s = base, 0
        else:
            theta = secrets.theta_of(j)
            rz = np.diag([1.0, np.exp(-1j * theta.value)])
            state = StateVector(1, rz @ base.amp)
            s = 0
    elif mutant:
        state, s = plus_theta(ZERO_ANGLE), 0
    else:
        state, s = rsp_channel(secrets.theta_of(j), rng)
    transcript.add(owner, "qubit", j)
    return state, s


def _execute(pattern: MeasurementPattern, secrets: Secrets, rng,
             input_states=None, lazy=True, mutant=False):
    """Shared engine for both protocol variants.

    ``lazy=False`` delivers every qubit and entangles the whole graph up
    front (the plain protocol); ``lazy=True`` creates nodes and edges
    just in time and reuses freed slots (the optimized protocol).
    Returns (true outcomes, transcript, width trace).
    """
    input_states = input_states or {}
    transcript = Transcript()
    order = pattern.total_order
    pos = {j: i for i, j in enumerate(order)}
    reg = _Register()
    applied = set()
    rsp_bits = {}
    widths = []

    if not lazy:
        for j in order:
            state, s = _deliver(pattern, j, secrets, rng, input_states,
                                transcript, mutant)
            reg.add(j, state)
            rsp_bits[j] = s
        for e in pattern.graph.edges:
            a, b = tuple(e)
            reg.entangle(a, b)
            applied.add(e)

    true_outcomes = {}
    for j in order:
        if j not in reg.order:
            state, s = _deliver(pattern, j, secrets, rng, input_states,
                                transcript, mutant)
            reg.add(j, state)
            rsp_bits[j] = s
        for k in pattern.graph.neighbors(j):
            e = frozenset((j, k))
            if e in applied:
                continue
            if k not in reg.order:
                state, s = _deliver(pattern, k, secrets, rng, input_states,
                                    transcript, mutant)
                reg.add(k, state)
                rsp_bits[k] = s
            reg.entangle(j, k)
            applied.add(e)
        widths.append(reg.width())
        phi = corrected_angle(pattern, j, true_outcomes)
        if mutant:
            delta = phi
        else:
            masked = secrets.r[pos[j]] ^ rsp_bits[j]
            delta = phi + secrets.theta_of(j)
            if masked:
                delta = delta.add_half_turns(1)
        owner = pattern.owner.get(j, "alice")
        transcript.add(owner, "angle", j, delta)
        b, post = measure_phi(reg.state, reg.wire(j), delta, rng)
        transcript.add("bob", "outcome", j, b)
        reg.drop(j, post)
        true_outcomes[j] = b if mutant else b ^ secrets.r[pos[j]]
    return true_outcomes, transcript, widths


def run_boqc(pattern: MeasurementPattern, secrets: Secrets, rng,
             input_states=None):
    """Plain protocol: all qubits delivered, whole graph entangled, then
    measured in order.  Returns (true outcomes, Bob-view transcript)."""
    outcomes, transcript, _ = _execute(pattern, secrets, rng,
                                       input_states, lazy=False)
    return outcomes, transcript


def run_boqc_optimized(pattern: MeasurementPattern, secrets: Secrets, rng,
                       input_states=None):
    """Optimized protocol with just-in-time delivery and qubit reuse.

    Returns (true outcomes, transcript, width trace); the peak of the
    trace is the number of simultaneously live server qubits."""
    return _execute(pattern, secrets, rng, input_states, lazy=True)


def _cell(delta: Angle, b: int) -> int:
    half = 0 if (delta.value % (2 * np.pi)) < np.pi else 1
    return 2 * half + b


def blindness_test(pattern_a: MeasurementPattern,
                   pattern_b: MeasurementPattern,
                   samples: int, rng, input_states=None,
                   mutant=False) -> float:
    """Statistical distinguishability of two computations from Bob's view.

    For each pattern, gathers the empirical distribution of the pair
    (half-circle of the announced angle, raw outcome bit) at every node
    over fresh secrets, and returns the largest per-node total-variation
    distance.  Blind protocol: near 0.  Mutant (no blinding): near 1
    whenever the nominal angles differ.
    """
    if pattern_a.graph is not pattern_b.graph and \
            pattern_a.graph != pattern_b.graph:
        raise ValueError("patterns must share one graph")
    nodes = pattern_a.total_order
    counts = {j: np.zeros((2, 4)) for j in nodes}
    for which, pat in ((0, pattern_a), (1, pattern_b)):
        for _ in range(samples):
            secrets = draw_secrets(pat, rng)
            _, transcript, _ = _execute(pat, secrets, rng, input_states,
                                        lazy=True, mutant=mutant)
            angles = transcript.angles()
            outs = transcript.outcomes()
            for j in nodes:
                counts[j][which, _cell(angles[j], outs[j])] += 1
    worst = 0.0
    for j in nodes:
        pa = counts[j][0] / samples
        pb = counts[j][1] / samples
        worst = max(worst, 0.5 * float(np.abs(pa - pb).sum()))
    return worst
