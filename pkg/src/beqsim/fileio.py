"""Structured files for gate networks and measurement patterns.

Two schemas, both JSON with a deterministic layout so that
write -> read -> write is byte-identical:

* network files: a CNOT/U gate list over numbered wires with shared and
  per-query parameter triples;
* pattern files: an open graph with exact measurement angles stored as
  integer pairs (p, q) meaning p*pi/q, q a power of two up to 512,
  ownership tags, a total order, per-query angle overlays, the POVM
  grouping, and the readout node order.

The shipped search fixtures live in the package data directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .core import (Angle, SingleQubitGate, StateVector, apply_cnot,
                   apply_matrix1, basis_state, gate_matrix, plus_theta)
from .mbqc import MeasurementPattern, OpenGraph, find_flow

__all__ = [
    "PatternFile",
    "NetworkFile",
    "load_pattern_file",
    "load_network_file",
    "save_pattern_file",
    "save_network_file",
    "fixture_path",
    "SchemaError",
]

MAX_DENOMINATOR = 512


class SchemaError(ValueError):
    """A file violates the expected schema."""


def fixture_path(name: str) -> Path:
    """Path of a shipped data file, e.g. ``pattern_n4_grover.json``."""
    return Path(resources.files("beqsim.data") / name)


def _check_pq(node, pq):
    if (not isinstance(pq, (list, tuple)) or len(pq) != 2
            or not all(isinstance(x, int) for x in pq)):
        raise SchemaError(f"angle of node {node}: expected [p, q], got {pq!r}")
    p, q = pq
    if q <= 0 or q > MAX_DENOMINATOR or (q & (q - 1)):
        raise SchemaError(
            f"angle of node {node}: denominator {q} is not a power of two "
            f"<= {MAX_DENOMINATOR}")
    return Angle.from_pq(p, q)


@dataclass
class PatternFile:
    description: str
    graph: OpenGraph
    angles: dict                 # node -> Angle (base assignment)
    tau_angles: dict             # tau -> {node -> Angle}
    owner: dict                  # node -> "alice" | "oscar"
    order: tuple
    povm: tuple                  # tuple of outcome-index groups
    readout: tuple               # node ids, most significant first
    input_state: str = "plus"    # "plus" | "zero"
    _flow: object = field(default=None, repr=False)

    def taus(self):
        return sorted(self.tau_angles)

    def pattern(self, tau=None) -> MeasurementPattern:
        ang = dict(self.angles)
        if tau is not None:
            overlay = self.tau_angles.get(tau)
            if overlay is None:
                raise KeyError(f"no overlay for tau={tau}")
            ang.update(overlay)
        if self._flow is None:
            self._flow = find_flow(self.graph)
        return MeasurementPattern(self.graph, ang, owner=dict(self.owner),
                                  total_order=self.order, flow=self._flow)

    def input_states(self) -> dict:
        one = basis_state(1, 0) if self.input_state == "zero" \
            else plus_theta(Angle(frac=0))
        return {j: one for j in self.graph.inputs}

    def decode(self, outcomes: dict) -> int:
        """Outcome index from the readout nodes, most significant first."""
        idx = 0
        for node in self.readout:
            idx = 2 * idx + int(outcomes[node])
        return idx

    def povm_cell(self, tau) -> frozenset:
        for cell in self.povm:
            if tau in cell:
                return frozenset(cell)
        raise KeyError(f"tau={tau} is in no POVM cell")


def load_pattern_file(path) -> PatternFile:
    raw = json.loads(Path(path).read_text())
    try:
        graph = OpenGraph.build(raw["nodes"],
                                [tuple(e) for e in raw["edges"]],
                                raw["inputs"], raw["outputs"])
        nodes = set(graph.nodes)
        angles = {int(k): _check_pq(k, v) for k, v in raw["angles"].items()}
        tau_angles = {}
        for t, overlay in raw["tau_angles"].items():
            ov = {int(k): _check_pq(k, v) for k, v in overlay.items()}
            if not set(ov) <= nodes:
                raise SchemaError(f"overlay tau={t} names unknown nodes")
            tau_angles[int(t)] = ov
        pf = PatternFile(
            description=raw.get("description", ""),
            graph=graph,
            angles=angles,
            tau_angles=tau_angles,
            owner={int(k): v for k, v in raw.get("owner", {}).items()},
            order=tuple(raw["order"]),
            povm=tuple(tuple(c) for c in raw["povm"]),
            readout=tuple(raw["readout"]),
            input_state=raw.get("input_state", "plus"),
        )
    except KeyError as exc:
        raise SchemaError(f"missing field {exc}") from exc
    for j in pf.order:
        if j not in angles and all(j not in ov for ov in tau_angles.values()):
            raise SchemaError(f"node {j} has no angle in any assignment")
    return pf


def save_pattern_file(pf: PatternFile, path, position=None):
    raw = {
        "description": pf.description,
        "nodes": list(pf.graph.nodes),
        "edges": sorted(sorted(e) for e in pf.graph.edges),
        "inputs": list(pf.graph.inputs),
        "outputs": list(pf.graph.outputs),
        "owner": {str(k): pf.owner[k] for k in sorted(pf.owner)},
        "angles": {str(k): list(pf.angles[k].exact) for k in sorted(pf.angles)},
        "tau_angles": {str(t): {str(k): list(v.exact)
                                for k, v in sorted(pf.tau_angles[t].items())}
                       for t in sorted(pf.tau_angles)},
        "order": list(pf.order),
        "povm": [list(c) for c in pf.povm],
        "readout": list(pf.readout),
        "input_state": pf.input_state,
    }
    if position:
        raw["position"] = {str(k): list(v) for k, v in sorted(position.items())}
    Path(path).write_text(json.dumps(raw, indent=1, sort_keys=True) + "\n")


@dataclass
class NetworkFile:
    description: str
    family: str
    num_qubits: int
    w: tuple
    povm: tuple
    ops: tuple                   # ("u", wire, param_id) | ("cnot", c, t)
    shared_params: dict          # param_id -> (alpha, beta, gamma)
    tau_params: dict             # tau -> {param_id -> triple}
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        used = {op[2] for op in self.ops if op[0] == "u"}
        have = set(self.shared_params)
        for t, pp in self.tau_params.items():
            if have & set(pp):
                raise SchemaError(f"tau={t} redefines shared parameters")
        all_have = have | (set(next(iter(self.tau_params.values()), {})))
        if used - all_have:
            raise SchemaError(f"ops reference missing parameters {used - all_have}")

    def taus(self):
        return sorted(self.tau_params)

    def unitary(self, tau) -> np.ndarray:
        """Matrix of the network for one query, wires applied left to
        right, wire 1 = most significant qubit."""
        params = dict(self.shared_params)
        if tau is not None:
            params.update(self.tau_params[tau])
        dim = 2 ** self.num_qubits
        cols = [basis_state(self.num_qubits, i) for i in range(dim)]
        for op in self.ops:
            if op[0] == "u":
                m = gate_matrix(SingleQubitGate(*params[op[2]]))
                cols = [apply_matrix1(c, op[1] - 1, m) for c in cols]
            else:
                cols = [apply_cnot(c, op[1] - 1, op[2] - 1) for c in cols]
        return np.column_stack([c.amp for c in cols])

    def povm_success(self, tau) -> float:
        """Probability that measuring U|0...0> lands in tau's POVM cell."""
        amps = self.unitary(tau)[:, 0]
        cell = next(c for c in self.povm if tau in c)
        return float(sum(abs(amps[i]) ** 2 for i in cell))


def load_network_file(path) -> NetworkFile:
    raw = json.loads(Path(path).read_text())
    try:
        nf = NetworkFile(
            description=raw.get("description", ""),
            family=raw["family"],
            num_qubits=int(raw["num_qubits"]),
            w=tuple(raw["w"]),
            povm=tuple(tuple(c) for c in raw["povm"]),
            ops=tuple(tuple(op) for op in raw["ops"]),
            shared_params={int(k): tuple(v)
                           for k, v in raw["shared_params"].items()},
            tau_params={int(t): {int(k): tuple(v) for k, v in pp.items()}
                        for t, pp in raw["tau_params"].items()},
            provenance=raw.get("provenance", {}),
        )
    except KeyError as exc:
        raise SchemaError(f"missing field {exc}") from exc
    return nf


def save_network_file(nf: NetworkFile, path):
    raw = {
        "description": nf.description,
        "family": nf.family,
        "num_qubits": nf.num_qubits,
        "w": list(nf.w),
        "povm": [list(c) for c in nf.povm],
        "ops": [list(op) for op in nf.ops],
        "shared_params": {str(k): list(v)
                          for k, v in sorted(nf.shared_params.items())},
        "tau_params": {str(t): {str(k): list(v)
                                for k, v in sorted(pp.items())}
                       for t, pp in sorted(nf.tau_params.items())},
        "provenance": nf.provenance,
    }
    Path(path).write_text(json.dumps(raw, indent=1, sort_keys=True) + "\n")
