"""Gate-network search by quasi-Newton minimization.

Finds {CNOT, U} networks realizing the exact-search blocks (preparation,
diffusion, oracle) at the smallest 2-qubit gate count, and the shared-
topology oracle networks used when the marked item must stay hidden.

The minimizer itself is delegated to scipy's BFGS; everything around it —
objectives, gradients, topology enumeration, verification — is local.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .databases import Database, stabilizer_perms
from .hoyer import SearchInstance, hoyer_angles, preparation_matrix, \
    diffusion_matrix, oracle_matrix
from .topology import Topology, enumerate_topologies, FULL_S3

__all__ = [
    "OptimizationConfig",
    "GateNetwork",
    "SynthesisResult",
    "bfgs_minimize",
    "objective_fp",
    "objective_fb",
    "objective_fobd",
    "obj_povm",
    "circuit_search",
    "beqs_synthesize",
    "wire_perms",
    "verify_block",
    "block_target",
]


@dataclass(frozen=True)
class OptimizationConfig:
    restarts: int = 64
    max_iterations: int = 600
    gradient_step: float = 1e-7
    success_epsilon: float = 1e-10
    delta: float = 1e-4
    seed: int = 0
    max_l: int = 10

    def __post_init__(self):
        if self.delta <= 0 or self.success_epsilon <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class GateNetwork:
    topology: Topology
    family: str = "cnot_u"
    n_wires: int = 3

    def ops(self):
        return kernels.build_ops(self.topology.slots, self.family, self.n_wires)


@dataclass
class SynthesisResult:
    network: GateNetwork
    params: np.ndarray
    objective_value: float
    success_probs: dict
    cnot_count: int
    tau_params: dict = field(default_factory=dict)
    found: bool = True


class _Stop(Exception):
    pass


def bfgs_minimize(objective, x0, config: OptimizationConfig):
    """Minimize a smooth function; returns (x*, value).

    ``objective`` either returns a float (finite-difference gradients with
    the configured step) or a (value, gradient) pair.
    """
    x0 = np.asarray(x0, dtype=float)
    probe = objective(x0)
    has_grad = isinstance(probe, tuple)
    if not np.isfinite(probe[0] if has_grad else probe):
        raise ValueError("objective not finite at the start point")

    best = {"x": x0, "f": np.inf}

    def fun(x):
        out = objective(x)
        f = out[0] if has_grad else out
        if f < best["f"]:
            best["x"], best["f"] = np.array(x), f
        return out

    def cb(xk):
        if best["f"] < config.success_epsilon:
            raise _Stop

    kwargs = dict(
        method="BFGS",
        jac=True if has_grad else None,
        callback=cb,
        options={
            "maxiter": config.max_iterations,
            "gtol": 1e-10,
            "eps": config.gradient_step,
        },
    )
    try:
        res = minimize(fun, x0, **kwargs)
        if res.fun < best["f"]:
            best["x"], best["f"] = res.x, float(res.fun)
    except _Stop:
        pass
    return best["x"], best["f"]


def _mask_fp(target, w, dim):
    mask = np.zeros((dim, dim))
    for i in w:
        if target[i, 0] != 0:
            mask[i, 0] = 1.0
    return mask


def _mask_fb(target, w, dim):
    mask = np.zeros((dim, dim))
    for i in w:
        for j in w:
            if target[i, j] != 0:
                mask[i, j] = 1.0
    return mask


def objective_fp(net: GateNetwork, params, A_target, w):
    """Distance of the network's first column to the target's, on w rows."""
    ops, _ = net.ops()
    mask = _mask_fp(np.asarray(A_target), w, A_target.shape[0])
    f, _ = kernels.objective_value_grad(ops, np.asarray(params, float), A_target,
                                        mask, net.family, net.n_wires)
    return f


def objective_fb(net: GateNetwork, params, M_target, w):
    """Entrywise distance to the target on the w-block (nonzero entries)."""
    ops, _ = net.ops()
    mask = _mask_fb(np.asarray(M_target), w, M_target.shape[0])
    f, _ = kernels.objective_value_grad(ops, np.asarray(params, float), M_target,
                                        mask, net.family, net.n_wires)
    return f


def objective_fobd(S, w, n):
    """Absolute mass outside the database's diagonal block."""
    S = np.asarray(S)
    wset = set(w)
    total = 0.0
    for i in range(2 ** n):
        for j in range(2 ** n):
            if i == j:
                continue
            if j not in wset:          # anything leaking into non-database columns
                total += abs(S[i, j])
            elif i not in wset:        # non-database rows leaking into the block
                total += abs(S[i, j])
    return total


def block_target(kind: str, w, n: int):
    """Dense target unitary for one pipeline block."""
    inst = SearchInstance(n, tuple(w), w[0])
    ang = hoyer_angles(len(w))
    if kind == "A":
        return preparation_matrix(inst)
    if kind == "D_pi":
        return diffusion_matrix(inst, np.pi)
    if kind == "D_psi":
        return diffusion_matrix(inst, ang.psi)
    raise ValueError(f"unknown block {kind!r}")


def wire_perms(w, n: int):
    """Wire-label permutations (1-based) induced by the database's
    stabilizer bit permutations."""
    out = []
    for perm in stabilizer_perms(Database(n, tuple(w))):
        out.append(tuple(n - perm[n - l] for l in range(1, n + 1)))
    return tuple(out)


def verify_block(S, kind: str, w, n: int, povm=None) -> float:
    """Success probability of the full run with one block replaced by S;
    returns the minimum over all marked items."""
    worst = 1.0
    for tau in w:
        inst = SearchInstance(n, tuple(w), tau, povm)
        ang = hoyer_angles(len(w))
        blocks = {
            "A": preparation_matrix(inst),
            "D_pi": diffusion_matrix(inst, np.pi),
            "D_psi": diffusion_matrix(inst, ang.psi),
        }
        blocks[kind] = np.asarray(S)
        state = np.zeros(2 ** n, dtype=np.complex128)
        state[0] = 1.0
        state = blocks["A"] @ state
        o_pi = oracle_matrix(inst, np.pi)
        o_final = oracle_matrix(inst, ang.phi + ang.u)
        for _ in range(ang.m):
            state = blocks["D_pi"] @ (o_pi @ state)
        state = blocks["D_psi"] @ (o_final @ state)
        if povm is None:
            p = abs(state[tau]) ** 2
        else:
            group = next(g for g in povm if tau in g)
            p = sum(abs(state[i]) ** 2 for i in group)
        worst = min(worst, float(p))
    return worst


def _topologies_for(l, n_wires, preserved):
    if n_wires == 2:
        # one wire pair only; label 3 marks "the third wire", which does
        # not exist, so every slot touches the pair
        return [Topology((3,) * l)] if l <= 3 else []
    return enumerate_topologies(l, preserved)


def circuit_search(M_target, w, kind: str, config: OptimizationConfig,
                   n: int = 3) -> SynthesisResult:
    """Iterative-deepening search for a network matching one block.

    ``kind`` selects the objective: "fp" pins the first column only (state
    preparation), "fb" pins the whole w-block.
    """
    M_target = np.asarray(M_target, dtype=np.complex128)
    dim = 2 ** n
    mask = _mask_fp(M_target, w, dim) if kind == "fp" else _mask_fb(M_target, w, dim)
    preserved = wire_perms(w, n) if n == 3 else FULL_S3
    rng = np.random.default_rng(config.seed)
    for l in range(config.max_l + 1):
        for topo in _topologies_for(l, n, preserved):
            net = GateNetwork(topo, "cnot_u", n)
            ops, npar = net.ops()

            def objective(x):
                return kernels.objective_value_grad(ops, x, M_target, mask,
                                                    net.family, net.n_wires)

            for _ in range(config.restarts):
                x0 = rng.uniform(0, 2 * np.pi, npar)
                x, f = bfgs_minimize(objective, x0, config)
                if f <= config.success_epsilon:
                    S = kernels.network_unitary(ops, x, net.family, net.n_wires)
                    which = "A" if kind == "fp" else _block_kind_of(M_target, w, n)
                    p = verify_block(S, which, w, n)
                    if p >= 1 - config.delta:
                        return SynthesisResult(net, x, f, {"min": p}, l)
    return SynthesisResult(GateNetwork(Topology(()), "cnot_u", n),
                           np.zeros(0), np.inf, {}, -1, found=False)


def _block_kind_of(M_target, w, n) -> str:
    for kind in ("A", "D_pi", "D_psi"):
        if np.allclose(M_target, block_target(kind, tuple(w), n), atol=1e-9):
            return kind
    raise ValueError("target is not one of the pipeline blocks")


def obj_povm(oracle_nets, povm, w, n: int, q=None, fobd_weight: float = 1.0):
    """Joint oracle objective: every legitimate marked item must land in
    its own POVM group, and the oracle must not leak outside the database
    block.

    ``oracle_nets`` maps tau -> (ops, params, family).  Returns the summed
    violation over tau in q (default: all of w).
    """
    if q is None:
        q = tuple(w)
    inst = SearchInstance(n, tuple(w), w[0])
    ang = hoyer_angles(len(w))
    A = preparation_matrix(inst)
    D_pi = diffusion_matrix(inst, np.pi)
    D_psi = diffusion_matrix(inst, ang.psi)
    ov = 0.0
    for tau in q:
        ops, params, family = oracle_nets[tau]
        S = kernels.network_unitary(ops, np.asarray(params, float), family, n)
        state = np.zeros(2 ** n, dtype=np.complex128)
        state[0] = 1.0
        state = A @ state
        for _ in range(ang.m):
            state = D_pi @ (S @ state)
        state = D_psi @ (S @ state)
        group = next(g for g in povm if tau in g)
        amp = np.sqrt(sum(abs(state[i]) ** 2 for i in group))
        ov += 1.0 - amp
        ov += fobd_weight * abs(objective_fobd(S, w, n))
    return ov


def beqs_synthesize(n, w, povm, q, config: OptimizationConfig) -> SynthesisResult:
    """Blind search pipeline: fixed public blocks plus one shared-topology
    oracle network whose parameters vary with the marked item."""
    preserved = wire_perms(w, n) if n == 3 else FULL_S3
    rng = np.random.default_rng(config.seed)
    for l in range(config.max_l + 1):
        for topo in _topologies_for(l, n, preserved):
            net = GateNetwork(topo, "cnot_u", n)
            ops, npar = net.ops()

            def objective(x):
                nets = {tau: (ops, x[i * npar:(i + 1) * npar], net.family)
                        for i, tau in enumerate(q)}
                return obj_povm(nets, povm, w, n, q)

            for _ in range(config.restarts):
                x0 = rng.uniform(0, 2 * np.pi, npar * len(q))
                x, f = bfgs_minimize(objective, x0, config)
                if f <= config.success_epsilon:
                    tau_params = {tau: x[i * npar:(i + 1) * npar]
                                  for i, tau in enumerate(q)}
                    probs = _verify_povm(ops, tau_params, net, povm, w, n)
                    if min(probs.values()) >= 1 - config.delta:
                        return SynthesisResult(net, x, f, probs, l,
                                               tau_params=tau_params)
    return SynthesisResult(GateNetwork(Topology(()), "cnot_u", n),
                           np.zeros(0), np.inf, {}, -1, found=False)


def _verify_povm(ops, tau_params, net, povm, w, n):
    inst = SearchInstance(n, tuple(w), w[0])
    ang = hoyer_angles(len(w))
    A = preparation_matrix(inst)
    D_pi = diffusion_matrix(inst, np.pi)
    D_psi = diffusion_matrix(inst, ang.psi)
    probs = {}
    for tau, params in tau_params.items():
        S = kernels.network_unitary(ops, np.asarray(params, float), net.family, n)
        state = np.zeros(2 ** n, dtype=np.complex128)
        state[0] = 1.0
        state = A @ state
        for _ in range(ang.m):
            state = D_pi @ (S @ state)
        state = D_psi @ (S @ state)
        group = next(g for g in povm if tau in g)
        probs[tau] = float(sum(abs(state[i]) ** 2 for i in group))
    return probs
