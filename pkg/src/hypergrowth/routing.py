"""Greedy geometric routing over an embedded network.

A packet at some node is forwarded to the neighbor hyperbolically closest
to the destination; the current node itself never enters the comparison.
The packet is dropped only if that closest neighbor is the hop the packet
just came from (the two-cycle test), or when a hop budget runs out, which
guards against longer cycles the two-cycle test cannot see.  Evaluation
reports the success ratio, the mean hop count of successful paths, and the
stretch relative to shortest paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embed import Embedding
from .graph import AdjacencySnapshot

__all__ = ["RoutingStats", "greedy_route", "evaluate_routing"]


@dataclass(frozen=True)
class RoutingStats:
    """Routing outcome summary over the evaluated source-destination pairs.

    h_bar and stretch average over successful pairs only; drops split into
    local-minimum drops (two-cycle test) and hop-budget drops, which the
    acceptance suite requires to be zero on networks of this scale.
    """

    p_s: float
    h_bar: float
    stretch: float
    n_pairs: int
    seed: int | None
    n_drops_local: int
    n_drops_guard: int
    policy: str


def _distance_tables(embedding: Embedding):
    zeta = embedding.params.zeta
    return (
        np.cosh(zeta * embedding.radii),
        np.sinh(zeta * embedding.radii),
        embedding.angles,
        zeta,
        embedding.ranks(),
    )


def greedy_route(
    src: int,
    dst: int,
    net: AdjacencySnapshot,
    embedding: Embedding,
    max_hops: int | None = None,
    _tables=None,
):
    """Route one packet; returns (outcome, path).

    outcome is "success", "local_minimum", or "hop_limit"; path lists the
    visited nodes starting at src.  Neighbor distance ties break toward the
    smallest embedding rank, which grid-quantized angles can produce.
    """
    if src == dst:
        raise ValueError("source and destination must differ")
    ch, sh, theta, zeta, ranks = _tables if _tables is not None else _distance_tables(embedding)
    if max_hops is None:
        max_hops = net.t
    path = [src]
    prev = -1
    cur = src
    for _ in range(max_hops):
        nbrs = net.neighbors(cur)
        if nbrs.size == 0:
            return "local_minimum", path
        arg = ch[dst] * ch[nbrs] - sh[dst] * sh[nbrs] * np.cos(theta[nbrs] - theta[dst])
        d = np.arccosh(np.maximum(arg, 1.0)) / zeta
        best = np.flatnonzero(d == d.min())
        nxt = int(nbrs[best[np.argmin(ranks[nbrs[best]])]])
        if nxt == dst:
            path.append(nxt)
            return "success", path
        if nxt == prev:
            return "local_minimum", path
        path.append(nxt)
        prev, cur = cur, nxt
    return "hop_limit", path


def _shortest_path_lengths(net: AdjacencySnapshot, pairs: np.ndarray) -> np.ndarray:
    """Hop lengths for (src, dst) pairs, grouped by source, BFS in C."""
    from scipy.sparse.csgraph import shortest_path

    A = net.to_scipy_sparse()
    out = np.empty(pairs.shape[0])
    srcs = np.unique(pairs[:, 0])
    for c0 in range(0, srcs.size, 512):
        chunk = srcs[c0 : c0 + 512]
        dmat = shortest_path(A, method="D", unweighted=True, indices=chunk)
        pos = {int(s): k for k, s in enumerate(chunk)}
        mask = np.isin(pairs[:, 0], chunk)
        for idx in np.flatnonzero(mask):
            out[idx] = dmat[pos[int(pairs[idx, 0])], int(pairs[idx, 1])]
    return out


def evaluate_routing(
    net: AdjacencySnapshot,
    embedding: Embedding,
    pairs: str = "sample",
    n: int = 10_000,
    seed: int = 0,
    max_hops: int | None = None,
) -> RoutingStats:
    """Route source-destination pairs and summarize the outcomes.

    pairs = "all_pairs" routes every ordered pair of the giant component;
    "sample" draws n ordered pairs with replacement (clipped to all pairs
    when n is at least the number available).  Cross-component pairs are
    excluded from the universe rather than counted as failures.
    """
    if embedding.t != net.t:
        raise ValueError("embedding and snapshot node counts differ")
    comp = net.giant_component()
    if comp.size < 2:
        raise ValueError("giant component has fewer than 2 nodes")
    n_avail = comp.size * (comp.size - 1)
    policy = pairs
    if pairs == "sample" and n >= n_avail:
        policy = "all_pairs"
    if pairs not in ("sample", "all_pairs"):
        raise ValueError(f"unknown pair policy {pairs!r}")

    if policy == "all_pairs":
        src = np.repeat(comp, comp.size - 1)
        dst_rows = []
        for s in comp:
            dst_rows.append(comp[comp != s])
        dst = np.concatenate(dst_rows)
        pair_arr = np.column_stack([src, dst])
        used_seed = None
    else:
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed,))))
        src = comp[gen.integers(0, comp.size, size=2 * n)]
        dst = comp[gen.integers(0, comp.size, size=2 * n)]
        ok = src != dst
        while np.count_nonzero(ok) < n:  # top up the rare equal draws
            more_s = comp[gen.integers(0, comp.size, size=n)]
            more_d = comp[gen.integers(0, comp.size, size=n)]
            src = np.concatenate([src[ok], more_s])
            dst = np.concatenate([dst[ok], more_d])
            ok = src != dst
        pair_arr = np.column_stack([src[ok][:n], dst[ok][:n]])
        used_seed = seed

    tables = _distance_tables(embedding)
    outcomes = np.empty(pair_arr.shape[0], dtype=np.int8)  # 1 ok, 0 local, -1 guard
    hops = np.zeros(pair_arr.shape[0], dtype=np.int64)
    for k, (s, d) in enumerate(pair_arr):
        res, path = greedy_route(int(s), int(d), net, embedding, max_hops, _tables=tables)
        if res == "success":
            outcomes[k] = 1
            hops[k] = len(path) - 1
        else:
            outcomes[k] = 0 if res == "local_minimum" else -1

    success = outcomes == 1
    n_pairs = pair_arr.shape[0]
    p_s = float(np.count_nonzero(success)) / n_pairs
    if success.any():
        h_bar = float(hops[success].mean())
        sp = _shortest_path_lengths(net, pair_arr[success])
        stretch = float(np.mean(hops[success] / sp))
    else:
        h_bar = math.nan
        stretch = math.nan
    return RoutingStats(
        p_s=p_s,
        h_bar=h_bar,
        stretch=stretch,
        n_pairs=n_pairs,
        seed=used_seed,
        n_drops_local=int(np.count_nonzero(outcomes == 0)),
        n_drops_guard=int(np.count_nonzero(outcomes == -1)),
        policy=policy,
    )
