import numpy as np
import pytest

from beqsim import fileio, protocol
from beqsim.core import Angle, plus_theta
from beqsim.mbqc import MeasurementPattern, OpenGraph, pattern_distribution


def grover_fixture():
    return fileio.load_pattern_file(fileio.fixture_path("pattern_n4_grover.json"))


class TestPrng:
    def test_deterministic(self):
        assert protocol.prng_expand(b"seed", 64) == protocol.prng_expand(b"seed", 64)

    def test_seeds_differ(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b = rng.bytes(8), rng.bytes(8)
            if a != b:
                assert protocol.prng_expand(a, 128) != protocol.prng_expand(b, 128)

    def test_length(self):
        assert len(protocol.prng_expand(b"x", 1000)) == 1000


class TestRsp:
    def test_s_zero_is_plus_theta(self):
        class FixedRng:
            def integers(self, *_):
                return 0

        theta = Angle.from_pq(3, 8)
        state, s = protocol.rsp_channel(theta, FixedRng())
        assert s == 0
        assert np.allclose(state.amp, plus_theta(theta).amp)

    def test_average_is_maximally_mixed(self):
        theta = Angle.from_pq(5, 16)
        rho = np.zeros((2, 2), dtype=complex)
        for s in (0, 1):
            amp = plus_theta(theta.add_half_turns(s)).amp
            rho += 0.5 * np.outer(amp, amp.conj())
        assert np.allclose(rho, np.eye(2) / 2, atol=1e-12)

    def test_s_frequency(self):
        rng = np.random.default_rng(1)
        n = 10 ** 4
        ones = sum(protocol.rsp_channel(Angle.from_pq(1, 4), rng)[1]
                   for _ in range(n))
        assert abs(ones / n - 0.5) < 3 * 0.5 / np.sqrt(n)


class TestRunBoqc:
    def test_recovers_tau_blinded(self):
        pf = grover_fixture()
        rng = np.random.default_rng(7)
        for tau in pf.taus():
            pat = pf.pattern(tau)
            for _ in range(25):
                secrets = protocol.draw_secrets(pat, rng)
                outcomes, _, _ = protocol.run_boqc_optimized(
                    pat, secrets, rng, input_states=pf.input_states())
                assert pf.decode(outcomes) == tau

    def test_plain_and_optimized_agree_in_distribution(self):
        pf = grover_fixture()
        pat = pf.pattern(1)
        rng = np.random.default_rng(3)
        secrets = protocol.draw_secrets(pat, rng)
        o1, _ = protocol.run_boqc(pat, secrets, rng,
                                  input_states=pf.input_states())
        o2, _, widths = protocol.run_boqc_optimized(
            pat, secrets, rng, input_states=pf.input_states())
        assert pf.decode(o1) == pf.decode(o2) == 1
        assert max(widths) == 3

    def test_degenerate_blinding_matches_pattern_run(self):
        pf = grover_fixture()
        pat = pf.pattern(2)
        zero = Angle.from_pq(0, 1)
        secrets = protocol.Secrets(
            theta={j: zero for j in pat.graph.nodes},
            r=tuple(0 for _ in pat.total_order), xi=b"")

        class NoFlipRng:
            def __init__(self):
                self.inner = np.random.default_rng(5)

            def integers(self, *a, **k):
                return 0  # force every RSP bit to zero

            def random(self):
                return self.inner.random()

        outcomes, transcript, _ = protocol.run_boqc_optimized(
            pat, secrets, NoFlipRng(), input_states=pf.input_states())
        assert pf.decode(outcomes) == 2
        # announced angles are then exactly the corrected nominal ones
        for _, _, kind, node, value in transcript.events:
            if kind == "angle" and node in (5, 6):
                assert value.exact in ((0, 1), (1, 1))

    def test_transcript_event_counts(self):
        pf = grover_fixture()
        pat = pf.pattern(0)
        rng = np.random.default_rng(11)
        secrets = protocol.draw_secrets(pat, rng)
        _, transcript = protocol.run_boqc(pat, secrets, rng,
                                          input_states=pf.input_states())
        kinds = [e[2] for e in transcript.events]
        n = len(pat.total_order)
        assert kinds.count("qubit") == n
        assert kinds.count("angle") == n
        assert kinds.count("outcome") == n

    def test_transcript_export_round_trip_lines(self):
        pf = grover_fixture()
        pat = pf.pattern(3)
        rng = np.random.default_rng(13)
        secrets = protocol.draw_secrets(pat, rng)
        _, transcript = protocol.run_boqc(pat, secrets, rng,
                                          input_states=pf.input_states())
        text = protocol.export_transcript(transcript)
        lines = text.strip().split("\n")
        assert len(lines) == len(transcript.events)
        for line in lines:
            step, sender, kind, node, value = line.split()
            assert sender in ("alice", "oscar", "bob")
            assert kind in ("qubit", "angle", "outcome")


class TestSecrecy:
    def test_transcript_type_carries_no_secrets(self):
        assert not hasattr(protocol.Transcript(), "theta")
        fields = set(protocol.Transcript.__dataclass_fields__)
        assert fields == {"events"}

    def test_announcements_uniform_on_grid(self):
        # chi-square over the 8-value UBQC subgrid of one node's delta
        pf = grover_fixture()
        pat = pf.pattern(0)
        rng = np.random.default_rng(17)
        counts = np.zeros(8)
        n = 800
        for _ in range(n):
            secrets = protocol.draw_secrets(pat, rng)
            _, transcript, _ = protocol.run_boqc_optimized(
                pat, secrets, rng, input_states=pf.input_states())
            delta = transcript.angles()[5]
            p, q = delta.exact
            counts[(p * 4) // q % 8] += 1
        chi2 = float(((counts - n / 8) ** 2 / (n / 8)).sum())
        # 7 dof, far tail bound
        assert chi2 < 30

    def test_blindness_far_below_mutant(self):
        pf = grover_fixture()
        rng = np.random.default_rng(23)
        tv = protocol.blindness_test(pf.pattern(0), pf.pattern(3), 400, rng,
                                     input_states=pf.input_states())
        tv_mut = protocol.blindness_test(pf.pattern(0), pf.pattern(3), 60, rng,
                                         input_states=pf.input_states(),
                                         mutant=True)
        assert tv < 0.15          # loose bound at this sample size
        assert tv_mut > 0.9
