import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from beqsim import fileio
from beqsim.core import Angle, basis_state, plus_theta
from beqsim.mbqc import (MeasurementPattern, OpenGraph, circuit_to_pattern,
                         circuit_unitary, determinism_check, find_flow,
                         pattern_distribution, simulate_pattern)


def line_graph(n):
    nodes = list(range(1, n + 1))
    edges = [(i, i + 1) for i in nodes[:-1]]
    return OpenGraph.build(nodes, edges, (1,), (n,))


class TestFlow:
    def test_line(self):
        g = line_graph(5)
        flow = find_flow(g)
        assert flow is not None
        assert flow.f == {1: 2, 2: 3, 3: 4, 4: 5}
        assert flow.check(g)

    def test_single_node(self):
        g = OpenGraph.build([1], [], (1,), (1,))
        assert find_flow(g) is not None

    def test_no_flow(self):
        # triangle with one input and one output has no causal flow
        g = OpenGraph.build([1, 2, 3], [(1, 2), (2, 3), (1, 3)], (1,), (3,))
        assert find_flow(g) is None

    def test_fixture_graphs(self):
        for name in ("pattern_n4_grover.json", "pattern_n6_blind.json"):
            pf = fileio.load_pattern_file(fileio.fixture_path(name))
            flow = find_flow(pf.graph)
            assert flow is not None and flow.check(pf.graph)

    def test_broken_dependency_detected(self):
        g = line_graph(4)
        flow = find_flow(g)
        flow.f[2] = 4  # wrong corrector
        assert not flow.check(g)


class TestDeterminism:
    def test_line_pattern(self):
        g = line_graph(4)
        ang = {1: Angle.from_pq(1, 4), 2: Angle.from_pq(3, 8),
               3: Angle.from_pq(7, 4), 4: Angle.from_pq(0, 1)}
        pat = MeasurementPattern(g, ang)
        assert determinism_check(pat, shots=12)

    def test_missing_correction_breaks_it(self):
        g = line_graph(4)
        ang = {1: Angle.from_pq(1, 4), 2: Angle.from_pq(3, 8),
               3: Angle.from_pq(7, 4), 4: Angle.from_pq(0, 1)}
        pat = MeasurementPattern(g, ang)
        del pat.flow.f[2]  # drop one correction dependency
        assert not determinism_check(pat, shots=12)


def random_circuit(rng, n_wires, depth):
    ops = []
    for _ in range(depth):
        if n_wires > 1 and rng.random() < 0.4:
            a, b = rng.permutation(n_wires)[:2]
            ops.append(("cz", int(min(a, b)), int(max(a, b))))
        else:
            ops.append(("j", int(rng.integers(n_wires)),
                        Angle.from_pq(int(rng.integers(1024)), 512)))
    return ops


def equivalent_up_to_phase(a, b, tol=1e-9):
    k = np.argmax(np.abs(a))
    if abs(b[k]) < 1e-12:
        return False
    phase = a[k] / b[k]
    return np.abs(a - phase * b).max() < tol


class TestCircuitEquivalence:
    def test_fifty_random_circuits(self):
        rng = np.random.default_rng(42)
        for trial in range(50):
            n = int(rng.integers(2, 4))
            ops = random_circuit(rng, n, int(rng.integers(3, 9)))
            pat = circuit_to_pattern(ops, n)
            u = circuit_unitary(ops, n)
            plus = np.full(2 ** n, 1 / np.sqrt(2 ** n), dtype=np.complex128)
            want = u @ plus
            _, state, _ = simulate_pattern(pat, rng=np.random.default_rng(trial),
                                           measure_outputs=False)
            assert equivalent_up_to_phase(state.amp, want), trial

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_property_random_history(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 4))
        ops = random_circuit(rng, n, 6)
        pat = circuit_to_pattern(ops, n)
        u = circuit_unitary(ops, n)
        plus = np.full(2 ** n, 1 / np.sqrt(2 ** n), dtype=np.complex128)
        _, state, _ = simulate_pattern(pat, rng=rng, measure_outputs=False)
        assert equivalent_up_to_phase(state.amp, u @ plus)


class TestGroverPattern:
    def test_exact_outcome_every_tau(self):
        pf = fileio.load_pattern_file(fileio.fixture_path("pattern_n4_grover.json"))
        inputs = pf.input_states()
        for tau in pf.taus():
            dist = pattern_distribution(pf.pattern(tau), input_states=inputs)
            hit = 0.0
            for bits, p in dist.items():
                outcomes = dict(zip(pf.graph.outputs, bits))
                if pf.decode(outcomes) == tau:
                    hit += p
            assert hit == pytest.approx(1.0, abs=1e-12), tau

    def test_width_three(self):
        pf = fileio.load_pattern_file(fileio.fixture_path("pattern_n4_grover.json"))
        _, _, width = simulate_pattern(pf.pattern(0),
                                       input_states=pf.input_states(),
                                       rng=np.random.default_rng(0))
        assert width == 3
