"""Model-fit metrics and structural statistics.

Two fit measures back every validation here: the empirical connection
probability (fraction of linked pairs per hyperbolic-distance bin, against
its theoretical counterpart) and the logarithmic loss of the final-time
pair likelihood, reported as the gap between random-angle and inferred-angle
losses.  The structural bundle reproduces the usual scale-free diagnostics:
degree distribution, degree-dependent clustering and neighbor degree,
shortest-path distribution, betweenness, and the moving average of
links-to-older-nodes under the degree-descending birth order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    LOG_PROB_FLOOR,
    LikelihoodContext,
    global_connection_probability,
)
from .embed import Embedding, infer_birth_order
from .graph import AdjacencySnapshot

__all__ = [
    "ConnectionProbabilityCurve",
    "LogLossReport",
    "TopologyStats",
    "connection_curve",
    "global_log_likelihood",
    "logloss_report",
    "topology_stats",
    "links_to_older_moving_average",
]


@dataclass(frozen=True)
class ConnectionProbabilityCurve:
    """Binned empirical vs theoretical connection probability.

    Bin b covers [bin_edges[b], bin_edges[b+1]).  Bins with no pairs carry
    empirical = 0; mask by pair_counts before comparing curves.
    """

    bin_edges: np.ndarray = field(repr=False)
    empirical: np.ndarray = field(repr=False)
    pair_counts: np.ndarray = field(repr=False)
    theoretical: np.ndarray = field(repr=False)

    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def _coord_tables(embedding: Embedding):
    zeta = embedding.params.zeta
    ch = np.cosh(zeta * embedding.radii)
    sh = np.sinh(zeta * embedding.radii)
    return ch, sh, embedding.angles, zeta


def _row_distances(ch, sh, theta, zeta, i, js):
    arg = ch[i] * ch[js] - sh[i] * sh[js] * np.cos(theta[js] - theta[i])
    return np.arccosh(np.maximum(arg, 1.0)) / zeta


def connection_curve(
    embedding: Embedding,
    net: AdjacencySnapshot,
    ctx: LikelihoodContext,
    bin_width: float = 1.0,
) -> ConnectionProbabilityCurve:
    """Empirical connection probability over all node pairs, with the exact
    theoretical value at each bin center."""
    t = net.t
    if embedding.t != t:
        raise ValueError("embedding and snapshot node counts differ")
    ch, sh, theta, zeta = _coord_tables(embedding)
    n_bins = int(math.ceil((2.0 * float(np.max(embedding.radii)) + 1.0) / bin_width)) + 1
    counts = np.zeros(n_bins, dtype=np.int64)
    linked = np.zeros(n_bins, dtype=np.int64)
    for i in range(t - 1):
        js = np.arange(i + 1, t)
        d = _row_distances(ch, sh, theta, zeta, i, js)
        b = np.minimum((d / bin_width).astype(np.int64), n_bins - 1)
        counts += np.bincount(b, minlength=n_bins)
        nbrs = net.neighbors(i)
        nbrs = nbrs[nbrs > i]
        if nbrs.size:
            db = np.minimum(
                (_row_distances(ch, sh, theta, zeta, i, nbrs) / bin_width).astype(np.int64),
                n_bins - 1,
            )
            linked += np.bincount(db, minlength=n_bins)
    last = int(np.max(np.flatnonzero(counts))) + 1 if counts.any() else 1
    counts, linked = counts[:last], linked[:last]
    edges = bin_width * np.arange(last + 1)
    with np.errstate(invalid="ignore"):
        empirical = np.where(counts > 0, linked / np.maximum(counts, 1), 0.0)
    centers = 0.5 * (edges[:-1] + edges[1:])
    theoretical = np.atleast_1d(global_connection_probability(centers, ctx))
    return ConnectionProbabilityCurve(
        bin_edges=edges, empirical=empirical, pair_counts=counts, theoretical=theoretical
    )


def global_log_likelihood(
    embedding: Embedding,
    net: AdjacencySnapshot,
    ctx: LikelihoodContext,
    approx: bool = True,
) -> float:
    """Log-likelihood of the adjacency under the whole-network connection
    probability at final time.

    With approx=True (default) the one-term form of the connection
    probability is used; approx=False averages over birth times exactly,
    which costs O(t) per pair.  Probabilities are clamped to
    [1e-300, 1 - 1e-300] before logging.
    """
    t = net.t
    if embedding.t != t:
        raise ValueError("embedding and snapshot node counts differ")
    p = ctx.params
    ch, sh, theta, zeta = _coord_tables(embedding)
    floor = LOG_PROB_FLOOR
    total_rows = []
    for i in range(t - 1):
        js = np.arange(i + 1, t)
        d = _row_distances(ch, sh, theta, zeta, i, js)
        nbrs = net.neighbors(i)
        nbrs = nbrs[nbrs > i]
        conn = np.zeros(js.size, dtype=bool)
        conn[nbrs - (i + 1)] = True
        if approx:
            if p.T == 0.0:
                inside = d <= ctx.R_t
                log_p = np.where(inside, 0.0, floor)
                log_1mp = np.where(inside, floor, 0.0)
            else:
                s = (zeta / (2.0 * p.T)) * (d - ctx.R_t)
                sp = np.maximum(s, 0.0) + np.log1p(np.exp(-np.abs(s)))
                log_p = np.maximum(-sp, floor)
                log_1mp = np.maximum(s - sp, floor)
        else:
            pt = np.atleast_1d(global_connection_probability(d, ctx))
            pt = np.clip(pt, 1e-300, 1.0 - 1e-300)
            log_p = np.log(pt)
            log_1mp = np.log1p(-pt)
        total_rows.append(np.where(conn, log_p, log_1mp).sum())
    return float(np.sum(total_rows)) if total_rows else 0.0


@dataclass(frozen=True)
class LogLossReport:
    """Negative log-likelihoods with inferred vs uniform-random angles.

    ll_rand averages n_rand independent redraws of every angle (radii kept);
    r_ll_exponent = ll_rand - ll_inf is the log of the likelihood ratio.
    """

    ll_inf: float
    ll_rand: float
    r_ll_exponent: float
    n_rand: int
    seed: int


def logloss_report(
    embedding: Embedding,
    net: AdjacencySnapshot,
    ctx: LikelihoodContext,
    n_rand: int = 10,
    seed: int = 0,
    approx: bool = True,
) -> LogLossReport:
    """Compare the inferred-angle log loss against random-angle baselines."""
    if n_rand < 1:
        raise ValueError("n_rand must be >= 1")
    import dataclasses

    ll_inf = -global_log_likelihood(embedding, net, ctx, approx=approx)
    draws = []
    for k in range(n_rand):
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, k))))
        scrambled = dataclasses.replace(
            embedding, angles=gen.uniform(0.0, 2.0 * math.pi, embedding.t)
        )
        draws.append(-global_log_likelihood(scrambled, net, ctx, approx=approx))
    ll_rand = float(np.mean(draws))
    return LogLossReport(
        ll_inf=ll_inf,
        ll_rand=ll_rand,
        r_ll_exponent=ll_rand - ll_inf,
        n_rand=n_rand,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# structural statistics


@dataclass(frozen=True)
class TopologyStats:
    """Structural summary of a snapshot.

    Tables are (value-grid, statistic) arrays; distance and betweenness are
    computed on the giant component, betweenness normalized by the maximum
    possible number of pair paths, (n-1)(n-2)/2, endpoints excluded.
    """

    degree_values: np.ndarray
    degree_counts: np.ndarray
    clustering_by_degree: np.ndarray
    neighbor_degree_by_degree: np.ndarray
    betweenness_by_degree: np.ndarray
    distance_values: np.ndarray
    distance_probs: np.ndarray
    mtilde: np.ndarray
    meta: dict


def _triangles(net: AdjacencySnapshot) -> np.ndarray:
    tri2 = np.zeros(net.t, dtype=np.int64)  # twice the triangle count per node
    for u, v in net.edge_array():
        cn = np.intersect1d(net.neighbors(int(u)), net.neighbors(int(v)), assume_unique=True).size
        tri2[u] += cn
        tri2[v] += cn
    return tri2 // 2


def _brandes_and_levels(net: AdjacencySnapshot, comp: np.ndarray):
    """Exact betweenness (unordered pairs, endpoints excluded) and the
    shortest-path length histogram, via per-source level-synchronous passes."""
    A = net.to_scipy_sparse()
    t = net.t
    in_comp = np.zeros(t, dtype=bool)
    in_comp[comp] = True
    betw = np.zeros(t)
    dist_hist = np.zeros(1, dtype=np.int64)
    for s in comp:
        sigma = np.zeros(t)
        sigma[s] = 1.0
        level = np.full(t, -1, dtype=np.int64)
        level[s] = 0
        frontier = np.zeros(t)
        frontier[s] = 1.0
        levels = [np.array([s])]
        d = 0
        while True:
            nxt_counts = A @ frontier
            unseen = (level < 0) & (nxt_counts > 0) & in_comp
            if not unseen.any():
                break
            d += 1
            level[unseen] = d
            # path counts accumulate along BFS edges only
            sigma_new = A @ (sigma * (level == d - 1))
            sigma[unseen] = sigma_new[unseen]
            frontier = unseen.astype(float)
            levels.append(np.flatnonzero(unseen))
        reached = level > 0
        if reached.any():
            counts = np.bincount(level[reached])
            if counts.size > dist_hist.size:
                dist_hist = np.concatenate(
                    [dist_hist, np.zeros(counts.size - dist_hist.size, dtype=np.int64)]
                )
            dist_hist[: counts.size] += counts
        delta = np.zeros(t)
        for d_back in range(len(levels) - 1, 0, -1):
            cur = levels[d_back]
            g = np.zeros(t)
            g[cur] = (1.0 + delta[cur]) / sigma[cur]
            contrib = A @ g
            prev = levels[d_back - 1]
            delta[prev] += sigma[prev] * contrib[prev]
        delta[s] = 0.0
        betw += delta
    betw /= 2.0  # each unordered pair counted from both endpoints
    n = comp.size
    denom = (n - 1) * (n - 2) / 2.0 if n > 2 else 1.0
    return betw / denom, dist_hist


def links_to_older_moving_average(net: AdjacencySnapshot, order=None) -> np.ndarray:
    """Moving average mtilde_i = mean of links-to-older over nodes 2..i.

    `order` defaults to the degree-descending birth order; pass a custom
    permutation (node indices by rank) to use known birth times instead.
    Entry [i-1] holds mtilde_i; entries 0 (and empty prefixes) are 0.
    """
    if order is None:
        order = infer_birth_order(net)
    t = net.t
    rank_of = np.empty(t, dtype=np.int64)
    rank_of[order] = np.arange(1, t + 1)
    m_i = np.zeros(t + 1)
    for u, v in net.edge_array():
        m_i[max(rank_of[int(u)], rank_of[int(v)])] += 1
    out = np.zeros(t)
    if t >= 2:
        csum = np.cumsum(m_i[2 : t + 1])
        out[1:] = csum / np.arange(1, t)
    return out


def topology_stats(net: AdjacencySnapshot) -> TopologyStats:
    """Degree distribution, clustering and neighbor-degree spectra, distance
    distribution, betweenness, and the links-to-older moving average."""
    t = net.t
    deg = net.degrees
    kmax = int(deg.max()) if t else 0
    degree_values = np.arange(kmax + 1)
    degree_counts = np.bincount(deg, minlength=kmax + 1)

    tri = _triangles(net)
    with np.errstate(divide="ignore", invalid="ignore"):
        possible = deg * (deg - 1) / 2.0
        local_c = np.where(possible > 0, tri / np.maximum(possible, 1.0), 0.0)
    mean_nbr_deg = np.zeros(t)
    for u in range(t):
        nbrs = net.neighbors(u)
        if nbrs.size:
            mean_nbr_deg[u] = deg[nbrs].mean()

    comp = net.giant_component()
    betw, dist_hist = (
        _brandes_and_levels(net, comp)
        if comp.size >= 2
        else (np.zeros(t), np.zeros(2, dtype=np.int64))
    )

    def by_degree(values):
        out = np.zeros(kmax + 1)
        for k in range(kmax + 1):
            mask = deg == k
            if mask.any():
                out[k] = values[mask].mean()
        return out

    dist_total = dist_hist[1:].sum()
    distance_values = np.arange(1, dist_hist.size)
    distance_probs = (
        dist_hist[1:] / dist_total if dist_total > 0 else np.zeros(dist_hist.size - 1)
    )

    return TopologyStats(
        degree_values=degree_values,
        degree_counts=degree_counts,
        clustering_by_degree=by_degree(local_c),
        neighbor_degree_by_degree=by_degree(mean_nbr_deg),
        betweenness_by_degree=by_degree(betw),
        distance_values=distance_values,
        distance_probs=distance_probs,
        mtilde=links_to_older_moving_average(net),
        meta={
            "t": t,
            "edges": net.n_edges,
            "mean_degree": float(deg.mean()) if t else 0.0,
            "mean_clustering": float(local_c[deg >= 2].mean()) if (deg >= 2).any() else 0.0,
            "giant_component": int(comp.size),
        },
    )
