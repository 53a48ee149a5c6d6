"""Command-line front end.

Subcommands bind the library modules into a small tool:

  classes    equivalence classes of N-entry databases over n bits
  synth      search for a gate network realizing a pipeline block
  verify     success-probability report for a network or pattern file
  run        sample a pattern's readout histogram for one query
  boqc       one blind three-party run with transcript export
  blindness  total-variation report between two queries, Bob's view
  estimate   NV-hardware timing report for a pattern

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fileio, nv, protocol
from .databases import equivalence_classes
from .mbqc import find_flow, simulate_pattern
from .synthesis import (OptimizationConfig, block_target, circuit_search)

VERIFY_THRESHOLD = 0.999


def _load(path):
    """Pattern or network file, decided by content."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise fileio.SchemaError(f"{path}: {exc}") from exc
    if "ops" in raw:
        return fileio.load_network_file(path)
    return fileio.load_pattern_file(path)


def cmd_classes(args):
    classes = equivalence_classes(args.n, args.N)
    print(f"n={args.n} N={args.N}: {len(classes)} classes")
    for rep, members in classes:
        print(f"  representative {rep}: {len(members)} members")
    return 0


def cmd_synth(args):
    w = tuple(int(c) for c in args.w)
    cfg = OptimizationConfig(restarts=args.restarts, seed=args.seed,
                             max_l=args.max_cnots)
    kind = "fp" if args.block == "A" else "fb"
    target = block_target(args.block, w, args.qubits)
    res = circuit_search(target, w, kind, cfg, n=args.qubits)
    if not res.found:
        print(f"no {args.block} network within {args.max_cnots} CNOTs")
        return 1
    nu = res.network.ops()[1] // 3
    params = {i + 1: tuple(float(v) for v in res.params[3 * i:3 * i + 3])
              for i in range(nu)}
    nf = fileio.NetworkFile(
        description=f"{args.block} block, w={args.w}",
        family=res.network.family,
        num_qubits=args.qubits,
        w=w,
        povm=tuple((x,) for x in w),
        ops=_ops_with_param_ids(res.network),
        shared_params=params,
        tau_params={},
        provenance={"seed": args.seed, "restarts": args.restarts,
                    "objective": res.objective_value,
                    "cnots": res.cnot_count},
    )
    fileio.save_network_file(nf, args.out)
    print(f"found at {res.cnot_count} CNOTs, min p_s "
          f"{min(res.success_probs.values()):.6f} -> {args.out}")
    return 0


def _ops_with_param_ids(net):
    from .kernels import OP_SINGLE
    ops = []
    for kind, a, b, off in net.ops()[0]:
        if kind == OP_SINGLE:
            ops.append(("u", int(a) + 1, int(off) // 3 + 1))
        else:
            ops.append(("cnot", int(a) + 1, int(b) + 1))
    return tuple(ops)


def cmd_verify(args):
    obj = _load(args.file)
    failed = False
    if isinstance(obj, fileio.NetworkFile):
        if not obj.tau_params:
            # query-independent network: report database-block mass of U|0>
            amps = obj.unitary(None)[:, 0]
            p = float(sum(abs(amps[i]) ** 2 for i in obj.w))
            ok = p >= VERIFY_THRESHOLD
            failed = not ok
            print(f"database mass: p={p:.6f} {'PASS' if ok else 'FAIL'}")
        else:
            for tau in obj.taus():
                p = obj.povm_success(tau)
                ok = p >= VERIFY_THRESHOLD
                failed |= not ok
                print(f"tau={tau}: p_s={p:.6f} {'PASS' if ok else 'FAIL'}")
    else:
        inputs = obj.input_states()
        for tau in obj.taus():
            pat = obj.pattern(tau)
            rng = np.random.default_rng(0)
            _, state, _ = simulate_pattern(pat, input_states=inputs, rng=rng,
                                           measure_outputs=False)
            p = _pattern_success(obj, pat, state, tau)
            ok = p >= VERIFY_THRESHOLD
            failed |= not ok
            print(f"tau={tau}: p_s={p:.6f} {'PASS' if ok else 'FAIL'}")
    return 1 if failed else 0


def _pattern_success(pf, pat, state, tau):
    """Mass of tau's POVM cell after measuring the output nodes in their
    own angle bases."""
    from .core import apply_matrix1
    for q, j in enumerate(pat.graph.outputs):
        t = pat.angles[j].value
        m = np.array([[1, np.exp(-1j * t)], [1, -np.exp(-1j * t)]]) / np.sqrt(2)
        state = apply_matrix1(state, q, m)
    probs = state.probabilities()
    wire = {j: q for q, j in enumerate(pat.graph.outputs)}
    cell = pf.povm_cell(tau)
    total = 0.0
    for idx in range(len(probs)):
        bits = {j: (idx >> (len(wire) - 1 - q)) & 1 for j, q in wire.items()}
        if pf.decode(bits) in cell:
            total += probs[idx]
    return total


def cmd_run(args):
    pf = _load(args.file)
    if not isinstance(pf, fileio.PatternFile):
        raise fileio.SchemaError("run needs a pattern file")
    pat = pf.pattern(args.tau)
    inputs = pf.input_states()
    rng = np.random.default_rng(args.seed)
    hist = {}
    for _ in range(args.shots):
        outcomes, _, _ = simulate_pattern(pat, input_states=inputs, rng=rng)
        idx = pf.decode(outcomes)
        hist[idx] = hist.get(idx, 0) + 1
    for idx in sorted(hist):
        print(f"{idx}: {hist[idx]}")
    return 0


def cmd_boqc(args):
    pf = _load(args.file)
    if not isinstance(pf, fileio.PatternFile):
        raise fileio.SchemaError("boqc needs a pattern file")
    pat = pf.pattern(args.tau)
    rng = np.random.default_rng(args.seed)
    secrets = protocol.draw_secrets(pat, rng)
    outcomes, transcript, widths = protocol.run_boqc_optimized(
        pat, secrets, rng, input_states=pf.input_states())
    result = pf.decode(outcomes)
    print(f"result={result} peak_width={max(widths)}")
    if args.transcript:
        Path(args.transcript).write_text(
            protocol.export_transcript(transcript))
        print(f"transcript -> {args.transcript}")
    return 0


def cmd_blindness(args):
    pf = _load(args.file)
    if not isinstance(pf, fileio.PatternFile):
        raise fileio.SchemaError("blindness needs a pattern file")
    rng = np.random.default_rng(args.seed)
    tv = protocol.blindness_test(pf.pattern(args.tau_a), pf.pattern(args.tau_b),
                                 args.samples, rng,
                                 input_states=pf.input_states())
    print(f"TV(tau={args.tau_a}, tau={args.tau_b}) = {tv:.4f} "
          f"over {args.samples} samples/side")
    return 0


def cmd_estimate(args):
    pf = _load(args.file)
    if not isinstance(pf, fileio.PatternFile):
        raise fileio.SchemaError("estimate needs a pattern file")
    tau = pf.taus()[0]
    trace = nv.estimate(pf.pattern(tau))
    report = nv.idle_report(trace)
    print(f"total {trace.total:.1f} ms, {trace.rsp_count} RSP rounds")
    print(f"mean idle {report['mean_idle']:.1f} ms")
    print(f"worst idle {report['worst_idle']:.1f} ms at node "
          f"{report['worst_node']} ({report['rsp_in_worst_window']} RSPs)")
    if args.json:
        Path(args.json).write_text(json.dumps({
            "total_ms": trace.total,
            "rsp_count": trace.rsp_count,
            "mean_idle_ms": report["mean_idle"],
            "worst_idle_ms": report["worst_idle"],
            "worst_node": report["worst_node"],
            "rsp_in_worst_window": report["rsp_in_worst_window"],
            "per_node_idle_ms": {str(k): v for k, v in trace.idle.items()},
        }, indent=1) + "\n")
        print(f"report -> {args.json}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="beqsim", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classes", help="database equivalence classes")
    c.add_argument("n", type=int)
    c.add_argument("N", type=int)
    c.set_defaults(func=cmd_classes)

    s = sub.add_parser("synth", help="search for a block network")
    s.add_argument("block", choices=["A", "D_pi", "D_psi"])
    s.add_argument("w", help="database digits, e.g. 012345")
    s.add_argument("--qubits", type=int, default=3)
    s.add_argument("--restarts", type=int, default=64)
    s.add_argument("--max-cnots", type=int, default=8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="network.json")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="success-probability report")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="sample readout histogram")
    r.add_argument("file")
    r.add_argument("--tau", type=int, required=True)
    r.add_argument("--shots", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("boqc", help="one blind protocol run")
    b.add_argument("file")
    b.add_argument("--tau", type=int, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--transcript", help="write event log here")
    b.set_defaults(func=cmd_boqc)

    bl = sub.add_parser("blindness", help="transcript distinguishability")
    bl.add_argument("file")
    bl.add_argument("--tau-a", type=int, required=True)
    bl.add_argument("--tau-b", type=int, required=True)
    bl.add_argument("--samples", type=int, default=2000)
    bl.add_argument("--seed", type=int, default=0)
    bl.set_defaults(func=cmd_blindness)

    e = sub.add_parser("estimate", help="NV timing report")
    e.add_argument("file")
    e.add_argument("--json", help="write machine-readable report here")
    e.set_defaults(func=cmd_estimate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except fileio.SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (OSError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
