"""Measurement patterns on open graphs: flow, translation, simulation.

A pattern is an open graph plus one measurement angle per node, a party
tag per node, and a total measurement order.  Measuring node j at angle
phi (outcome 0) implements H * diag(1, e^{-i phi}) on the logical wire;
adaptive corrections make the overall map outcome-independent whenever the
graph admits a causal flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (Angle, ZERO_ANGLE, StateVector, apply_cphase, plus_theta,
                   project_phi, measure_phi)

__all__ = [
    "OpenGraph",
    "Flow",
    "MeasurementPattern",
    "find_flow",
    "circuit_to_pattern",
    "simulate_pattern",
    "pattern_distribution",
    "determinism_check",
    "corrected_angle",
]


@dataclass(frozen=True)
class OpenGraph:
    nodes: tuple
    edges: frozenset  # of frozenset pairs
    inputs: tuple
    outputs: tuple

    @staticmethod
    def build(nodes, edges, inputs, outputs) -> "OpenGraph":
        nodes = tuple(nodes)
        nodeset = set(nodes)
        es = set()
        for a, b in edges:
            if a not in nodeset or b not in nodeset or a == b:
                raise ValueError(f"bad edge ({a},{b})")
            es.add(frozenset((a, b)))
        for x in list(inputs) + list(outputs):
            if x not in nodeset:
                raise ValueError(f"terminal {x} is not a node")
        return OpenGraph(nodes, frozenset(es), tuple(inputs), tuple(outputs))

    def neighbors(self, v):
        return sorted(x for e in self.edges if v in e for x in e if x != v)


@dataclass(frozen=True)
class Flow:
    f: dict            # measured node -> correcting neighbor
    layers: dict       # node -> layer index; larger layers measured first

    def check(self, graph: OpenGraph) -> bool:
        for j, fj in self.f.items():
            if fj not in graph.neighbors(j):
                return False
            if self.layers[j] <= self.layers[fj]:
                return False
            for k in graph.neighbors(fj):
                if k != j and self.layers[j] <= self.layers[k] and k != fj:
                    return False
        return True


def find_flow(graph: OpenGraph):
    """Causal flow by successive peeling from the outputs.

    Returns a verified Flow, or None when the graph has none.
    """
    if not graph.inputs or not graph.outputs:
        raise ValueError("need nonempty inputs and outputs")
    processed = set(graph.outputs)
    candidates = set(graph.outputs) - set(graph.inputs)
    f = {}
    layers = {v: 0 for v in graph.outputs}
    k = 1
    while True:
        # Each pass works against a frozen snapshot so that every node
        # assigned in it lands in a strictly earlier-measured layer than
        # the ones its corrections touch.
        snapshot = frozenset(processed)
        assigned = []
        for v in sorted(candidates):
            open_nb = [u for u in graph.neighbors(v) if u not in snapshot]
            if len(open_nb) == 1:
                assigned.append((open_nb[0], v))
        if not assigned:
            break
        for u, v in assigned:
            if u in processed:
                continue
            f[u] = v
            layers[u] = k
            processed.add(u)
            candidates.discard(v)
            if u not in graph.inputs:
                candidates.add(u)
        k += 1
    if processed != set(graph.nodes):
        return None
    flow = Flow(f, layers)
    return flow if flow.check(graph) else None


@dataclass
class MeasurementPattern:
    graph: OpenGraph
    angles: dict                 # node -> Angle (nominal); outputs optional
    owner: dict = field(default_factory=dict)   # node -> "alice" | "oscar"
    total_order: tuple = ()      # measurement order (may include outputs)
    flow: Flow = None

    def __post_init__(self):
        if self.flow is None:
            self.flow = find_flow(self.graph)
        if self.flow is None:
            raise ValueError("graph has no causal flow")
        if not self.total_order:
            self.total_order = self.default_order()
        self._check_order()

    def default_order(self):
        key = lambda v: (-self.flow.layers[v], v)
        return tuple(sorted(self.graph.nodes, key=key))

    def _check_order(self):
        pos = {v: i for i, v in enumerate(self.total_order)}
        for j, fj in self.flow.f.items():
            if pos[j] >= pos[fj]:
                raise ValueError("order violates flow (corrector measured early)")
            for k in self.graph.neighbors(fj):
                if k != j and pos[j] >= pos[k]:
                    raise ValueError("order violates flow (neighbor measured early)")

    def x_dependency(self, j):
        """Node whose outcome flips the sign of j's angle, if any."""
        inv = {v: u for u, v in self.flow.f.items()}
        return inv.get(j)

    def z_dependencies(self, j):
        """Nodes whose outcomes add pi to j's angle."""
        deps = []
        for i, fi in self.flow.f.items():
            if i != j and j != fi and j in self.graph.neighbors(fi):
                deps.append(i)
        return deps


def corrected_angle(pattern: MeasurementPattern, j, outcomes: dict) -> Angle:
    """Nominal angle of j folded with the corrections accumulated so far."""
    phi = pattern.angles.get(j, ZERO_ANGLE)
    xd = pattern.x_dependency(j)
    if xd is not None and outcomes.get(xd, 0):
        phi = -phi
    halfturns = sum(outcomes.get(i, 0) for i in pattern.z_dependencies(j))
    return phi.add_half_turns(halfturns)


class _Register:
    """Live qubits during lazy pattern execution."""

    def __init__(self):
        self.order = []          # node at each wire position
        self.state = None

    def width(self):
        return len(self.order)

    def add(self, node, single: StateVector):
        if self.state is None:
            self.state = single
        else:
            amp = np.kron(self.state.amp, single.amp)
            self.state = StateVector(self.state.num_qubits + 1, amp)
        self.order.append(node)

    def wire(self, node):
        return self.order.index(node)

    def entangle(self, a, b):
        self.state = apply_cphase(self.state, self.wire(a), self.wire(b))

    def drop(self, node, new_state):
        self.order.remove(node)
        self.state = new_state


def _prepare_node(pattern, node, input_state_map):
    if node in input_state_map:
        return input_state_map[node]
    return plus_theta(ZERO_ANGLE)


def simulate_pattern(pattern: MeasurementPattern, input_states=None, rng=None,
                     measure_outputs=True):
    """Run one adaptive history; returns (outcomes, output StateVector or
    None, peak live width).

    Nodes and edges are instantiated lazily: a node enters the register
    only when it is about to be measured or must be entangled with one.
    ``input_states`` maps input nodes to 1-qubit StateVectors (default
    |+>).  When ``measure_outputs`` is false, output nodes stay quantum and
    the (corrected) output state is returned.
    """
    rng = rng or np.random.default_rng()
    input_states = input_states or {}
    reg = _Register()
    applied = set()
    outcomes = {}
    peak = 0
    out_set = set(pattern.graph.outputs)
    for j in pattern.total_order:
        if not measure_outputs and j in out_set:
            continue
        if j not in reg.order:
            reg.add(j, _prepare_node(pattern, j, input_states))
        for k in pattern.graph.neighbors(j):
            e = frozenset((j, k))
            if e in applied:
                continue
            if k not in reg.order:
                reg.add(k, _prepare_node(pattern, k, input_states))
            reg.entangle(j, k)
            applied.add(e)
        peak = max(peak, reg.width())
        phi = corrected_angle(pattern, j, outcomes)
        s, post = measure_phi(reg.state, reg.wire(j), phi, rng)
        outcomes[j] = s
        reg.drop(j, post)

    if measure_outputs:
        return outcomes, None, peak

    # flush remaining edges among outputs and apply byproduct corrections
    for j in pattern.graph.outputs:
        if j not in reg.order:
            reg.add(j, _prepare_node(pattern, j, input_states))
    for e in pattern.graph.edges:
        if e not in applied:
            a, b = tuple(e)
            reg.entangle(a, b)
            applied.add(e)
    peak = max(peak, reg.width())
    state = reg.state
    for j in pattern.graph.outputs:
        q = reg.wire(j)
        xd = pattern.x_dependency(j)
        if xd is not None and outcomes.get(xd, 0):
            state = _apply_pauli(state, q, "X")
        if sum(outcomes.get(i, 0) for i in pattern.z_dependencies(j)) % 2:
            state = _apply_pauli(state, q, "Z")
    # order wires by output listing
    state = _sort_wires(state, reg.order, pattern.graph.outputs)
    return outcomes, state, peak


def _apply_pauli(state, qubit, which):
    from .core import apply_matrix1
    m = np.array([[0, 1], [1, 0]], dtype=np.complex128) if which == "X" \
        else np.diag([1.0, -1.0]).astype(np.complex128)
    return apply_matrix1(state, qubit, m)


def _sort_wires(state, order, target_order):
    cur = list(order)
    amp = state.amp.reshape([2] * len(cur))
    perm = [cur.index(v) for v in target_order]
    amp = np.transpose(amp, perm).reshape(-1)
    return StateVector(len(cur), np.ascontiguousarray(amp))


def pattern_distribution(pattern: MeasurementPattern, input_states=None,
                         cutoff: float = 1e-14):
    """Exact joint distribution of the output-node outcomes, obtained by
    enumerating every measurement branch.  Only feasible for small
    patterns; returns {output bit tuple: probability}."""
    out_set = set(pattern.graph.outputs)
    dist = {}

    def walk(reg, applied, outcomes, weight, remaining):
        if not remaining:
            bits = tuple(outcomes[o] for o in pattern.graph.outputs)
            dist[bits] = dist.get(bits, 0.0) + weight
            return
        j, rest = remaining[0], remaining[1:]
        if j not in reg.order:
            reg = _copy_reg(reg)
            reg.add(j, _prepare_node(pattern, j, input_states or {}))
        todo = []
        for k in pattern.graph.neighbors(j):
            e = frozenset((j, k))
            if e not in applied:
                todo.append((e, k))
        if todo:
            reg = _copy_reg(reg)
            applied = set(applied)
            for e, k in todo:
                if k not in reg.order:
                    reg.add(k, _prepare_node(pattern, k, input_states or {}))
                reg.entangle(j, k)
                applied.add(e)
        phi = corrected_angle(pattern, j, outcomes)
        for s in (0, 1):
            p, post = project_phi(reg.state, reg.wire(j), phi, s)
            if p * weight < cutoff:
                continue
            sub = _copy_reg(reg)
            sub.order = [v for v in reg.order if v != j]
            sub.state = post
            walk(sub, applied, {**outcomes, j: s}, weight * p, rest)

    reg0 = _Register()
    walk(reg0, set(), {}, 1.0, tuple(pattern.total_order))
    return dist


def _copy_reg(reg):
    r = _Register()
    r.order = list(reg.order)
    r.state = reg.state
    return r


def circuit_to_pattern(ops, n_wires: int, angles_are_exact: bool = True):
    """Translate a CPHASE/Rz/H circuit into a pattern.

    ``ops`` is a sequence of ("j", wire, Angle) — the gate H*Rz(angle) —
    and ("cz", wire_a, wire_b).  Returns the pattern; input nodes are the
    initial wire ends, output nodes the final ones.
    """
    next_id = [0]

    def fresh():
        next_id[0] += 1
        return next_id[0]

    ends = [fresh() for _ in range(n_wires)]
    inputs = tuple(ends)
    nodes = list(ends)
    edges = set()
    angles = {}
    order = []
    for op in ops:
        if op[0] == "j":
            _, w, ang = op
            new = fresh()
            nodes.append(new)
            edges.add((ends[w], new))
            angles[ends[w]] = -ang if isinstance(ang, Angle) else Angle(value=-float(ang))
            order.append(ends[w])
            ends[w] = new
        elif op[0] == "cz":
            _, a, b = op
            e = (min(ends[a], ends[b]), max(ends[a], ends[b]))
            if e in edges:
                edges.remove(e)
            else:
                edges.add(e)
        else:
            raise ValueError(f"unsupported gate {op[0]!r}")
    graph = OpenGraph.build(nodes, edges, inputs, tuple(ends))
    for o in ends:
        angles.setdefault(o, ZERO_ANGLE)
    order += list(ends)
    return MeasurementPattern(graph, angles, total_order=tuple(order))


def circuit_unitary(ops, n_wires: int):
    """Dense unitary of a CPHASE/Rz/H circuit (reference for equivalence
    tests); J(angle) = H * Rz(angle) with Rz(a) = diag(1, e^{ia})."""
    dim = 2 ** n_wires
    u = np.eye(dim, dtype=np.complex128)
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    for op in ops:
        if op[0] == "j":
            _, w, ang = op
            a = ang.value if isinstance(ang, Angle) else float(ang)
            m = h @ np.diag([1.0, np.exp(1j * a)])
            g = np.eye(1, dtype=np.complex128)
            for q in range(n_wires):
                g = np.kron(g, m if q == w else np.eye(2))
            u = g @ u
        else:
            _, a, b = op
            g = np.eye(dim, dtype=np.complex128)
            for i in range(dim):
                if ((i >> (n_wires - 1 - a)) & 1) and ((i >> (n_wires - 1 - b)) & 1):
                    g[i, i] = -1.0
            u = g @ u
    return u


def determinism_check(pattern: MeasurementPattern, input_states=None,
                      shots: int = 20, seed: int = 0) -> bool:
    """Output distribution must not depend on the measurement history."""
    dists = []
    for k in range(shots):
        rng = np.random.default_rng(seed + k)
        _, state, _ = simulate_pattern(pattern, input_states, rng,
                                       measure_outputs=False)
        dists.append(np.abs(state.amp) ** 2)
    base = dists[0]
    return all(np.abs(d - base).max() < 1e-9 for d in dists)
