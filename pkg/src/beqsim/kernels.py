"""Network instantiation and objective gradients (reference implementation).

A gate network is flattened to an op table; ``objective_value_grad``
evaluates the masked least-squares objective together with its analytic
gradient using prefix/suffix products, so one evaluation costs a few dozen
small matrix multiplies instead of a finite-difference sweep.

A compiled twin of the hot entry points lives in ``_netgrad`` (built from
Cython); ``beqsim.synthesis`` picks whichever is importable.
"""

from __future__ import annotations

import numpy as np

__all__ = ["build_ops", "network_unitary", "objective_value_grad", "param_count"]

OP_SINGLE = 0
OP_CNOT = 1
OP_CPHASE = 2

_I2 = np.eye(2, dtype=np.complex128)


def _pair_for_label(label: int, n_wires: int = 3):
    """Wires (0-based) touched by a 2-qubit gate whose slot label names the
    untouched wire (1-based)."""
    wires = [q for q in range(n_wires) if q != label - 1]
    return wires[0], wires[1]


def build_ops(topology_slots, family: str = "cnot_u", n_wires: int = 3):
    """Flatten a topology into an op table.

    Layout: one leading single per wire, then after every 2-qubit gate two
    singles on the wires it touched.  Returns an int array of rows
    (kind, wire_a, wire_b, param_offset); singles use wire_b = -1 and three
    parameters each.
    """
    if family not in ("cnot_u", "cphase_rz"):
        raise ValueError(f"unknown family {family!r}")
    two_kind = OP_CNOT if family == "cnot_u" else OP_CPHASE
    ops = []
    off = 0
    for q in range(n_wires):
        ops.append((OP_SINGLE, q, -1, off))
        off += 3
    for label in topology_slots:
        a, b = _pair_for_label(label, n_wires)
        ops.append((two_kind, a, b, -1))
        ops.append((OP_SINGLE, a, -1, off))
        off += 3
        ops.append((OP_SINGLE, b, -1, off))
        off += 3
    return np.array(ops, dtype=np.int64), off


def param_count(num_two_qubit: int, n_wires: int = 3) -> int:
    return 3 * n_wires + 6 * num_two_qubit


def _single_matrix(family: str, p):
    a, b, g = p
    if family == "cnot_u":
        return np.array(
            [
                [np.exp(1j * b) * np.cos(a), np.exp(1j * g) * np.sin(a)],
                [-np.exp(-1j * g) * np.sin(a), np.exp(-1j * b) * np.cos(a)],
            ]
        )
    # cphase_rz: Euler z-x-z out of Rz/H pieces, Rz(a) first
    return _rz(g) @ _rx(b) @ _rz(a)


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _single_derivatives(family: str, p):
    a, b, g = p
    if family == "cnot_u":
        eb, eg = np.exp(1j * b), np.exp(1j * g)
        ca, sa = np.cos(a), np.sin(a)
        da = np.array([[-eb * sa, eg * ca], [-np.conj(eg) * ca, -np.conj(eb) * sa]])
        db = np.array([[1j * eb * ca, 0], [0, -1j * np.conj(eb) * ca]])
        dg = np.array([[0, 1j * eg * sa], [1j * np.conj(eg) * sa, 0]])
        return da, db, dg
    rza, rxb, rzg = _rz(a), _rx(b), _rz(g)
    drza = np.diag([-0.5j * np.exp(-0.5j * a), 0.5j * np.exp(0.5j * a)])
    c, s = np.cos(b / 2), np.sin(b / 2)
    drxb = 0.5 * np.array([[-s, -1j * c], [-1j * c, -s]])
    drzg = np.diag([-0.5j * np.exp(-0.5j * g), 0.5j * np.exp(0.5j * g)])
    return rzg @ rxb @ drza, rzg @ drxb @ rza, drzg @ rxb @ rza


def _embed_single(m2, wire: int, n_wires: int):
    left = np.eye(2 ** wire, dtype=np.complex128)
    right = np.eye(2 ** (n_wires - wire - 1), dtype=np.complex128)
    return np.kron(np.kron(left, m2), right)


def _two_qubit_matrix(kind: int, a: int, b: int, n_wires: int):
    dim = 2 ** n_wires
    m = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        abit = (i >> (n_wires - 1 - a)) & 1
        bbit = (i >> (n_wires - 1 - b)) & 1
        if kind == OP_CNOT:
            j = i ^ (abit << (n_wires - 1 - b))
            m[j, i] = 1.0
        else:
            m[i, i] = -1.0 if (abit and bbit) else 1.0
    return m


def _gate_matrices(ops, params, family: str, n_wires: int):
    mats = []
    for kind, wa, wb, off in ops:
        if kind == OP_SINGLE:
            mats.append(_embed_single(_single_matrix(family, params[off:off + 3]), wa, n_wires))
        else:
            mats.append(_two_qubit_matrix(kind, wa, wb, n_wires))
    return mats


def network_unitary(ops, params, family: str = "cnot_u", n_wires: int = 3):
    """Dense unitary of the network; ops applied first-to-last."""
    dim = 2 ** n_wires
    s = np.eye(dim, dtype=np.complex128)
    for m in _gate_matrices(ops, params, family, n_wires):
        s = m @ s
    return s


def objective_value_grad(ops, params, target, mask, family: str = "cnot_u",
                         n_wires: int = 3):
    """f = sum over masked entries of |S_ij - target_ij|^2, with gradient.

    The gradient of gate k's parameters is read off through the prefix and
    suffix products around gate k.
    """
    dim = 2 ** n_wires
    mats = _gate_matrices(ops, params, family, n_wires)
    k = len(mats)
    prefix = [np.eye(dim, dtype=np.complex128)]
    for m in mats[:-1]:
        prefix.append(m @ prefix[-1])
    suffix = [np.eye(dim, dtype=np.complex128)]
    for m in reversed(mats[1:]):
        suffix.append(suffix[-1] @ m)
    suffix.reverse()

    s = suffix[0] @ mats[0] @ prefix[0]
    diff = (s - target) * mask
    f = float(np.sum(np.abs(diff) ** 2))

    ebar_t = np.conj(diff).T
    grad = np.zeros(len(params))
    for idx, (kind, wa, wb, off) in enumerate(ops):
        if kind != OP_SINGLE:
            continue
        fmat = prefix[idx] @ ebar_t @ suffix[idx]
        # tr(embed(dU) @ fmat) reduces to a 2x2 partial trace on the wire
        g2 = _partial_trace(fmat, wa, n_wires)
        for j, du in enumerate(_single_derivatives(family, params[off:off + 3])):
            grad[off + j] = 2.0 * np.real(np.sum(du * g2.T))
    return f, grad


def _partial_trace(m, wire: int, n_wires: int):
    """2x2 matrix g with g[x, y] = sum over the other wires of
    m[(x at wire, rest), (y at wire, rest)], so that
    tr(embed(dU) @ m) = sum(dU * g.T)."""
    left = 2 ** wire
    right = 2 ** (n_wires - wire - 1)
    t = m.reshape(left, 2, right, left, 2, right)
    return np.einsum("axbayb->xy", t)
