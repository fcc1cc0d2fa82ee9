"""Prior preparation and message passing between cells.

Arrays carry a leading batch axis: priors are ``(B, n)``, syndromes
``(B, checks)`` and split beliefs ``(B, cells, 3)``, where entry
``[b, c, k]`` is the probability that cell ``c``'s share of its mid-edge
check ``k`` equals 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import cell
from .cell import clamp
from .lattice import CellLayout, LatticeLevel


def leave_one_out_product(t: np.ndarray) -> np.ndarray:
    """Product over the last axis excluding each position in turn."""
    tt = np.ascontiguousarray(np.moveaxis(t, -1, 0))
    out = np.empty_like(tt)
    acc = np.ones_like(tt[0])
    for k in range(tt.shape[0]):
        out[k] = acc
        acc = acc * tt[k]
    acc = np.ones_like(tt[0])
    for k in range(tt.shape[0] - 1, -1, -1):
        out[k] *= acc
        acc = acc * tt[k]
    return np.moveaxis(out, 0, -1)


def odd_parity(p, axis=-1):
    """Probability of an odd number of flips among independent bits."""
    return 0.5 - 0.5 * np.prod(1.0 - 2.0 * np.asarray(p), axis=axis)


# -- belief propagation -------------------------------------------------------


@dataclass(frozen=True)
class TannerGraph:
    """Padded adjacency of a parity-check matrix.

    ``check_vars[c]`` lists the variables of check ``c`` padded with the
    dummy variable ``n`` (prior 0, so it never changes a parity).
    ``var_edges[v]`` lists flat edge ids ``c * dc + slot`` padded with the
    dummy edge ``num_checks * dc`` whose message is 1/2.
    """

    n: int
    check_vars: np.ndarray
    var_edges: np.ndarray
    edge_var_slot: np.ndarray  # flat index into (n, dv) for every real edge

    @classmethod
    def from_matrix(cls, H) -> "TannerGraph":
        H = np.atleast_2d(np.asarray(H) & 1)
        nc, n = H.shape
        rows = [np.flatnonzero(H[c]) for c in range(nc)]
        dc = max((len(r) for r in rows), default=0)
        check_vars = np.full((nc, dc), n, dtype=np.intp)
        for c, r in enumerate(rows):
            check_vars[c, : len(r)] = r
        cols = [[] for _ in range(n)]
        for c in range(nc):
            for slot, v in enumerate(rows[c]):
                cols[v].append(c * dc + slot)
        dv = max((len(e) for e in cols), default=0)
        dummy = nc * dc
        var_edges = np.full((n, dv), dummy, dtype=np.intp)
        edge_var_slot = np.full(nc * dc, n * dv, dtype=np.intp)
        for v, edges in enumerate(cols):
            var_edges[v, : len(edges)] = edges
            for slot, e in enumerate(edges):
                edge_var_slot[e] = v * dv + slot
        return cls(n, check_vars, var_edges, edge_var_slot)


@lru_cache(maxsize=None)
def _level_graph(level: int) -> TannerGraph:
    from .lattice import get_level

    return TannerGraph.from_matrix(get_level(level).check_matrix)


def tanner_graph(H) -> TannerGraph:
    if isinstance(H, TannerGraph):
        return H
    if isinstance(H, LatticeLevel):
        return _level_graph(H.level)
    return TannerGraph.from_matrix(H)


def bp_update(priors, H, syndrome, iterations: int) -> np.ndarray:
    """Sum-product posteriors with parity targets given by ``syndrome``.

    Flooding schedule in the probability domain; one iteration is a check
    update followed by a variable update. ``H`` may be a matrix, a
    :class:`TannerGraph` or a :class:`LatticeLevel`.
    """
    priors = np.asarray(priors, dtype=np.float64)
    if iterations <= 0:
        return priors.copy()
    g = tanner_graph(H)
    squeeze = priors.ndim == 1
    P = clamp(np.atleast_2d(priors))
    s = np.atleast_2d(np.asarray(syndrome))
    B, nc, dc = P.shape[0], *g.check_vars.shape
    dv = g.var_edges.shape[1]

    P_pad = np.concatenate([P, np.zeros((B, 1))], axis=1)
    q = P_pad[:, g.check_vars]
    sign = (1.0 - 2.0 * s)[:, :, None]
    post = P
    for _ in range(iterations):
        r = 0.5 - 0.5 * sign * leave_one_out_product(1.0 - 2.0 * q)
        r = clamp(r)
        r_pad = np.concatenate([r.reshape(B, -1), np.full((B, 1), 0.5)], axis=1)
        R = r_pad[:, g.var_edges]
        one = P[:, :, None] * leave_one_out_product(R)
        zero = (1.0 - P[:, :, None]) * leave_one_out_product(1.0 - R)
        ext = one / (one + zero)
        full1 = P * np.prod(R, axis=-1)
        full0 = (1.0 - P) * np.prod(1.0 - R, axis=-1)
        post = clamp(full1 / (full1 + full0))
        ext_pad = np.concatenate([ext.reshape(B, -1), np.zeros((B, 1))], axis=1)
        q = ext_pad[:, g.edge_var_slot].reshape(B, nc, dc)
    return post[0] if squeeze else post


# -- corner look-ahead --------------------------------------------------------


def corner_lookahead(priors, syndrome, level: LatticeLevel) -> np.ndarray:
    """Condition every corner qubit on its corner check and the 5 outside qubits.

    All updates use the incoming priors and are applied together.
    """
    lay = level.layout
    P = np.atleast_2d(np.asarray(priors, dtype=np.float64))
    s = np.atleast_2d(np.asarray(syndrome))
    qubits = lay.qubits[lay.corner_cells, lay.corner_slots]  # (K, 6)
    p = P[:, qubits]
    sc = s[:, lay.corner_checks][:, :, None]
    p_ext = 0.5 - (1.0 - 2.0 * sc) * 0.5 * leave_one_out_product(1.0 - 2.0 * p)
    num = p_ext * p
    den = num + (1.0 - p_ext) * (1.0 - p)
    out = P.copy()
    # A corner qubit whose prior is exactly 0 or 1 stays put.
    out[:, qubits] = np.where(den > 0, num / np.where(den > 0, den, 1.0), p)
    return out if np.ndim(priors) > 1 else out[0]


# -- split beliefs ------------------------------------------------------------

_SUPPORT_SLOTS = [
    [i for i in range(4) if (mask >> (3 - i)) & 1] for mask in cell.CHECK_SUPPORTS
]


def init_split_beliefs(cell_priors) -> np.ndarray:
    """Odd-parity probability of each mid-edge check's in-cell support.

    ``cell_priors`` has shape ``(..., 4)``; the result ``(..., 3)``.
    """
    cp = np.asarray(cell_priors, dtype=np.float64)
    return np.stack([odd_parity(cp[..., idx]) for idx in _SUPPORT_SLOTS], axis=-1)


def consistency_update(pT, pL, s):
    """Condition two shares of one check on their measured sum ``s``."""
    pT = np.asarray(pT, dtype=np.float64)
    pL = np.asarray(pL, dtype=np.float64)
    s = np.asarray(s)
    qL = np.where(s == 1, 1.0 - pL, pL)
    qT = np.where(s == 1, 1.0 - pT, pT)
    newT = pT * qL / (pT * qL + (1.0 - pT) * (1.0 - qL))
    newL = pL * qT / (pL * qT + (1.0 - pL) * (1.0 - qT))
    return newT, newL


def enforce_consistency(beliefs, mid_syndrome, layout: CellLayout) -> np.ndarray:
    """Apply :func:`consistency_update` to both sides of every mid-edge check."""
    b = np.array(beliefs, dtype=np.float64)
    (c0, k0), (c1, k1) = layout.mid_sides[:, 0].T, layout.mid_sides[:, 1].T
    newT, newL = consistency_update(b[:, c0, k0], b[:, c1, k1], mid_syndrome)
    b[:, c0, k0] = clamp(newT)
    b[:, c1, k1] = clamp(newL)
    return b


def outgoing_beliefs(beliefs, cell_priors) -> np.ndarray:
    """Soft split rule: each edge's belief marginalized over the other two edges."""
    b = clamp(np.asarray(beliefs, dtype=np.float64))
    P = cell.split_likelihoods(cell_priors)
    out = np.empty_like(b)
    for k in range(3):
        others = [j for j in range(3) if j != k]
        acc = 0.0
        for a in (0, 1):
            for c in (0, 1):
                bits = [0, 0, 0]
                bits[others[0]], bits[others[1]] = a, c
                s0 = (bits[0] << 2) | (bits[1] << 1) | bits[2]
                s1 = s0 | (1 << (2 - k))
                cond = P[..., s1] / (P[..., s1] + P[..., s0])
                w0 = b[..., others[0]] if a else 1.0 - b[..., others[0]]
                w1 = b[..., others[1]] if c else 1.0 - b[..., others[1]]
                acc = acc + cond * w0 * w1
        out[..., k] = acc
    return out


def split_round(beliefs, cell_priors, mid_syndrome, layout: CellLayout) -> np.ndarray:
    """One synchronous round: every cell recomputes its edges, then shares are reconciled."""
    return enforce_consistency(outgoing_beliefs(beliefs, cell_priors), mid_syndrome, layout)


def finalize_splits(pT, s, rule: str = "ml", uniforms=None):
    """Hard split ``(s_t, s_l)`` with ``s_t ^ s_l == s`` exactly.

    ``rule="ml"`` takes ``s_t = [pT > 0.5]``; ``rule="sampled"`` draws
    ``s_t`` with probability ``pT`` using the supplied ``uniforms``.
    """
    pT = np.asarray(pT, dtype=np.float64)
    s = np.asarray(s).astype(np.uint8)
    if rule == "ml":
        st = (pT > 0.5).astype(np.uint8)
    elif rule == "sampled":
        if uniforms is None:
            raise ValueError("sampled split rule needs uniforms")
        st = (np.asarray(uniforms) < pT).astype(np.uint8)
    else:
        raise ValueError(f"unknown split rule {rule!r}")
    return st, st ^ s
