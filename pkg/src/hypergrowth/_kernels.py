"""Vectorized log-likelihood grid evaluation.

This is the hot path of the embedding: for one node, evaluate the sum of
pairwise log-probability terms against J old nodes at nk trial angles, i.e.
nk * J logistic terms.  Everything is blocked to stay cache-resident and
expressed through SIMD-dispatched numpy ufuncs (exp, log, sqrt, arithmetic);
chained per-pair scalar math is an order of magnitude slower on this shape.

Inputs are pre-reduced per old node j:

    A[j]  = cosh(zeta*r_new) * cosh(zeta*r_j)
    P     = [[B_j cos(theta_j)], [B_j sin(theta_j)]],  B_j = sinh*sinh
    zR[j] = zeta * R of the pair (scalar when R is shared)

so that the acosh argument at trial angle phi is A[j] - cos(phi)*P[0,j]
- sin(phi)*P[1,j], and d = acosh(arg) equals zeta times the distance.

The term sum splits as  sum_j log(1-p_j)  +  sum_{j linked} (log p_j -
log(1-p_j)) and the second difference is exactly -s_j, so connected pairs
only need a cheap gather.  The split drops the probability floor, which is
sound only when no term can reach it; `_floor_unreachable` checks that from
the exponent bounds, and otherwise a slower exact path applies the per-term
clamp (T = 0 and very small T land there).

Results are independent of `workers`: the grid is cut into fixed-size blocks,
each block is computed in isolation, and blocks are reassembled in order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import LOG_PROB_FLOOR

__all__ = ["grid_loglik", "angle_grid"]

_BLOCK_K = 128   # trial angles per tile
_BLOCK_J = 512   # old nodes per tile; 3 tiles of 128x512 floats stay in L2
_EXP_SAFE = 690.0  # |exponent| below this: exp cannot overflow, floor unreachable


def angle_grid(n: int) -> np.ndarray:
    """n equally spaced trial angles 2*pi*k/n, k = 0..n-1."""
    return 2.0 * np.pi * np.arange(n) / float(n)


def _floor_unreachable(T: float, zR, d_bound: float) -> bool:
    if T <= 0.0:
        return False
    inv2T = 1.0 / (2.0 * T)
    zr_hi = float(np.max(zR))
    zr_lo = float(np.min(zR))
    s_hi = (d_bound - zr_lo) * inv2T   # largest s: far pair
    ms_hi = zr_hi * inv2T              # largest -s: coincident pair (d = 0)
    return s_hi < _EXP_SAFE and ms_hi < _EXP_SAFE


def _fast_block(gc, gs, A, P, zR2, inv2T, edge_cols, b1, b2):
    """Unclamped block: ll = -sum_j softplus(-s) + sum_{edges} (-s)."""
    K = gc.shape[0]
    J = A.shape[0]
    G = np.empty((K, 2))
    G[:, 0] = gc
    G[:, 1] = gs
    c = np.matmul(G, P, out=b1[:K, :J])
    np.subtract(A, c, out=c)
    np.maximum(c, 1.0, out=c)          # acosh argument, clamped for rounding
    sq = np.multiply(c, c, out=b2[:K, :J])
    np.subtract(sq, 1.0, out=sq)
    np.sqrt(sq, out=sq)
    np.add(sq, c, out=sq)
    d = np.log(sq, out=sq)             # = acosh(arg) = zeta * distance
    np.multiply(d, inv2T, out=d)
    ms = np.subtract(zR2, d, out=d)    # -s
    w = np.exp(ms, out=b1[:K, :J])     # e^{-s}; underflow to 0 is exact
    np.add(w, 1.0, out=w)
    np.log(w, out=w)                   # softplus(-s) = -log(1-p)
    ll = -w.sum(axis=1)
    if edge_cols.size:
        ll += ms[:, edge_cols].sum(axis=1)
    return ll


def _exact_block(gc, gs, A, P, zR, conn, T, floor):
    """Per-term clamped block; handles T = 0 and floor-reachable exponents."""
    G = np.stack([gc, gs], axis=1)
    arg = A - G @ P
    np.maximum(arg, 1.0, out=arg)
    d = np.arccosh(arg)
    if T == 0.0:
        inside = d <= zR
        log_p = np.where(inside, 0.0, floor)
        log_1mp = np.where(inside, floor, 0.0)
    else:
        s = (d - zR) / (2.0 * T)
        sp_pos = np.maximum(s, 0.0) + np.log1p(np.exp(-np.abs(s)))
        log_p = np.maximum(-sp_pos, floor)
        log_1mp = np.maximum(s - sp_pos, floor)
    terms = np.where(conn, log_p, log_1mp)
    return terms.sum(axis=1)


def grid_loglik(grid_theta, A, P, zR, edge_cols, T, d_bound, workers=1):
    """Sum of clamped pairwise log-likelihood terms at each trial angle.

    grid_theta : (nk,) trial angles
    A, P, zR   : per-old-node reductions (zR scalar or (J,))
    edge_cols  : indices of old nodes linked to the node being placed
    T          : temperature; d_bound: upper bound on zeta * distance
    """
    grid_theta = np.asarray(grid_theta, dtype=float)
    nk = grid_theta.size
    J = A.shape[0]
    gc = np.cos(grid_theta)
    gs = np.sin(grid_theta)
    zR_arr = np.asarray(zR, dtype=float)
    edge_cols = np.asarray(edge_cols, dtype=np.int64)
    fast = _floor_unreachable(T, zR_arr, d_bound)

    if not fast:
        conn = np.zeros(J, dtype=bool)
        conn[edge_cols] = True
        out = np.empty(nk)
        for k0 in range(0, nk, _BLOCK_K):
            k1 = min(k0 + _BLOCK_K, nk)
            out[k0:k1] = _exact_block(
                gc[k0:k1], gs[k0:k1], A, P, zR_arr, conn, T, LOG_PROB_FLOOR
            )
        return out

    inv2T = 1.0 / (2.0 * T)
    zR2 = zR_arr * inv2T
    zR2_scalar = zR_arr.ndim == 0

    def run_span(k0: int, k1: int, buf1, buf2) -> np.ndarray:
        ll = np.zeros(k1 - k0)
        for j0 in range(0, J, _BLOCK_J):
            j1 = min(j0 + _BLOCK_J, J)
            cols = edge_cols[(edge_cols >= j0) & (edge_cols < j1)] - j0
            ll += _fast_block(
                gc[k0:k1],
                gs[k0:k1],
                A[j0:j1],
                P[:, j0:j1],
                zR2 if zR2_scalar else zR2[j0:j1],
                inv2T,
                cols,
                buf1,
                buf2,
            )
        return ll

    spans = [(k0, min(k0 + _BLOCK_K, nk)) for k0 in range(0, nk, _BLOCK_K)]
    out = np.empty(nk)
    if workers <= 1 or len(spans) == 1:
        b1 = np.empty((_BLOCK_K, _BLOCK_J))
        b2 = np.empty((_BLOCK_K, _BLOCK_J))
        for k0, k1 in spans:
            out[k0:k1] = run_span(k0, k1, b1, b2)
    else:
        # Blocks are independent and reassembled in order, so the result is
        # byte-identical for any worker count.
        def task(span_bufs):
            (k0, k1), b1, b2 = span_bufs
            return k0, k1, run_span(k0, k1, b1, b2)

        bufs = [
            (np.empty((_BLOCK_K, _BLOCK_J)), np.empty((_BLOCK_K, _BLOCK_J)))
            for _ in range(workers)
        ]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            stride = len(bufs)
            futures = []
            for w in range(stride):
                chunk = spans[w::stride]
                if chunk:
                    futures.append(ex.submit(_run_many, chunk, bufs[w], run_span))
            for fut in futures:
                for k0, k1, vals in fut.result():
                    out[k0:k1] = vals
    return out


def _run_many(spans, bufs, run_span):
    b1, b2 = bufs
    return [(k0, k1, run_span(k0, k1, b1, b2)) for k0, k1 in spans]
