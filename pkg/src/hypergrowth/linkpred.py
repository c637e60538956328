"""Missing-link prediction harness.

A fraction of edges is removed into a probe set; scorers see only the
remaining training graph.  A scorer is judged by the probability that a
random probe (missing) pair receives a better score than a random pair that
was never an edge (AUC, ties counted half), optionally restricted to hard
strata: pairs with no common neighbor in the training graph, or pairs whose
training degrees are both small.  The nonexistent-pair universe is never
materialized; exact AUC streams over it row by row.

Scorers: hyperbolic distance between training-graph coordinates (smaller is
better) and the classical baselines CN, DP, ISP, and the truncated Katz
index (larger is better).  Katz counts walks, not simple paths, by repeated
application of the adjacency operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embed import Embedding
from .graph import AdjacencySnapshot

__all__ = [
    "LinkSplit",
    "ScoredPairs",
    "split",
    "score_hyperbolic",
    "score_baseline",
    "auc",
    "roc_curve",
    "BASELINES",
]

BASELINES = ("cn", "dp", "isp", "katz")
KATZ_EPSILON = 0.005
KATZ_MAX_LENGTH = 6


@dataclass(frozen=True)
class LinkSplit:
    """Training graph plus the removed (probe) edges.

    training and probe partition the original edge set; `removed_fraction`
    and `seed` reproduce the draw.  The training snapshot keeps every node
    of the original graph, including any isolated by the removal.
    """

    training: AdjacencySnapshot
    probe: np.ndarray = field(repr=False)  # (n_probe, 2), u < v
    removed_fraction: float
    seed: int

    @property
    def t(self) -> int:
        return self.training.t

    def in_any_edge_set(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return self.training.has_edge(u, v) or key in self._probe_set()

    def _probe_set(self):
        if not hasattr(self, "_probe_cache"):
            object.__setattr__(
                self, "_probe_cache", frozenset((int(u), int(v)) for u, v in self.probe)
            )
        return self._probe_cache


def split(net: AdjacencySnapshot, p: float, seed: int = 0) -> LinkSplit:
    """Remove round(p * |E|) uniformly random edges into the probe set."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"removal fraction must be in (0, 1), got {p}")
    edges = net.edge_array()
    n_edges = edges.shape[0]
    n_probe = int(math.floor(p * n_edges + 0.5))
    if n_probe < 1:
        raise ValueError(f"p={p} removes no edge from a graph of {n_edges} edges")
    if n_probe >= n_edges:
        raise ValueError(f"p={p} would leave no training edges")
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed,))))
    picked = gen.permutation(n_edges)[:n_probe]
    mask = np.zeros(n_edges, dtype=bool)
    mask[picked] = True
    probe = edges[mask]
    training = AdjacencySnapshot.from_edges(
        [(int(u), int(v)) for u, v in edges[~mask]], node_ids=net.node_ids
    )
    return LinkSplit(training=training, probe=probe, removed_fraction=p, seed=seed)


@dataclass(frozen=True)
class ScoredPairs:
    """A scorer over node pairs: name, orientation, and a row evaluator.

    score_rows(i, js) returns the scores of pairs (i, j) for j in js.
    higher_is_better is False exactly for the hyperbolic-distance scorer.
    """

    name: str
    higher_is_better: bool
    score_rows: callable
    meta: dict = field(default_factory=dict)

    def score_pairs(self, pairs: np.ndarray) -> np.ndarray:
        out = np.empty(pairs.shape[0])
        for k, (u, v) in enumerate(pairs):
            out[k] = self.score_rows(int(u), np.array([int(v)]))[0]
        return out


def score_hyperbolic(split_: LinkSplit, embedding: Embedding) -> ScoredPairs:
    """Score non-observed pairs by final-time hyperbolic distance between
    the coordinates inferred from the training graph (smaller = more likely
    missing).

    The embedding must cover exactly the training graph's node set; passing
    an embedding of the full graph defeats the protocol, which removes links
    first and embeds the remaining topology.
    """
    if embedding.node_ids != split_.training.node_ids:
        raise ValueError("embedding node set does not match the training graph")
    from .core import pairwise_distance

    zeta = embedding.params.zeta
    r = embedding.radii
    theta = embedding.angles

    def rows(i: int, js: np.ndarray) -> np.ndarray:
        return np.atleast_1d(pairwise_distance(r[i], theta[i], r[js], theta[js], zeta))

    return ScoredPairs(name="hyperbolic", higher_is_better=False, score_rows=rows)


def _common_neighbor_rows(net: AdjacencySnapshot):
    def rows(i: int, js: np.ndarray) -> np.ndarray:
        counts = np.zeros(net.t, dtype=np.int64)
        for n in net.neighbors(i):
            counts[net.neighbors(int(n))] += 1
        return counts[js].astype(float)

    return rows


def _bfs_levels(net: AdjacencySnapshot, source: int) -> np.ndarray:
    level = np.full(net.t, -1, dtype=np.int64)
    level[source] = 0
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in net.neighbors(u):
                if level[v] < 0:
                    level[v] = d
                    nxt.append(int(v))
        frontier = nxt
    return level


def score_baseline(split_: LinkSplit, method: str, **options) -> ScoredPairs:
    """Classical similarity scorers on the training graph.

    cn   : common-neighbor count
    dp   : product of training degrees
    isp  : inverse shortest-path length, 0 for disconnected pairs
    katz : sum over walk lengths 2..l_max of epsilon^l * (# walks), with
           epsilon = options.get("epsilon", 0.005), l_max = options.get("l_max", 6)
    """
    net = split_.training
    if method == "cn":
        return ScoredPairs("cn", True, _common_neighbor_rows(net))
    if method == "dp":
        deg = net.degrees.astype(float)

        def rows(i, js):
            return deg[i] * deg[js]

        return ScoredPairs("dp", True, rows)
    if method == "isp":

        def rows(i, js):
            level = _bfs_levels(net, i)
            lv = level[js].astype(float)
            with np.errstate(divide="ignore"):
                return np.where(lv > 0, 1.0 / np.maximum(lv, 1.0), 0.0)

        return ScoredPairs("isp", True, rows)
    if method == "katz":
        eps = float(options.get("epsilon", KATZ_EPSILON))
        l_max = int(options.get("l_max", KATZ_MAX_LENGTH))
        A = net.to_scipy_sparse()

        def rows(i, js):
            v = np.zeros(net.t)
            v[i] = 1.0
            score = np.zeros(net.t)
            weight = 1.0
            for step in range(1, l_max + 1):
                v = A @ v
                weight *= eps
                if step >= 2:
                    score += weight * v
            return score[js]

        return ScoredPairs(
            "katz", True, rows, meta={"epsilon": eps, "l_max": l_max}
        )
    raise ValueError(f"unknown baseline {method!r}, expected one of {BASELINES}")


# ---------------------------------------------------------------------------
# evaluation


def _stratum_mask_factory(split_: LinkSplit, stratum, k_max: int):
    """Returns rows(i, js) -> bool mask of pairs belonging to the stratum."""
    net = split_.training
    if stratum == "all":
        return lambda i, js: np.ones(js.size, dtype=bool)
    if stratum == "hard":
        cn_rows = _common_neighbor_rows(net)
        return lambda i, js: cn_rows(i, js) == 0
    if stratum == "low_degree":
        deg = net.degrees
        return lambda i, js: (deg[i] < k_max) & (deg[js] < k_max)
    raise ValueError(f"unknown stratum {stratum!r}")


def _nonexistent_cols(split_: LinkSplit, i: int) -> np.ndarray:
    """Columns j > i of pairs that are neither training nor probe edges."""
    t = split_.t
    mask = np.ones(t, dtype=bool)
    mask[: i + 1] = False
    nbrs = split_.training.neighbors(i)
    mask[nbrs] = False
    for u, v in split_.probe:
        if u == i:
            mask[v] = False
        elif v == i:
            mask[u] = False
    return np.flatnonzero(mask)


def _probe_scores_in_stratum(scored: ScoredPairs, split_: LinkSplit, in_stratum):
    vals = []
    for u, v in split_.probe:
        u, v = int(u), int(v)
        if in_stratum(u, np.array([v]))[0]:
            vals.append(scored.score_rows(u, np.array([v]))[0])
    return np.array(vals)


def auc(
    scored: ScoredPairs,
    split_: LinkSplit,
    stratum: str = "all",
    mode: str = "exact",
    n: int = 1_000_000,
    seed: int = 0,
    k_max: int = 6,
):
    """Probability that a random missing link outranks a random nonexistent
    pair, ties counted half.

    stratum "hard" keeps only pairs with zero training common neighbors;
    "low_degree" keeps pairs whose training degrees are both < k_max.  Both
    the missing and the nonexistent sets are restricted.  Returns None when
    either side of the stratum is empty.  mode "exact" computes the rank
    statistic over the full universe; "sampled" estimates it from n draws.
    """
    in_stratum = _stratum_mask_factory(split_, stratum, k_max)
    probe_scores = _probe_scores_in_stratum(scored, split_, in_stratum)
    if probe_scores.size == 0:
        return None
    sign = 1.0 if scored.higher_is_better else -1.0
    probe_sorted = np.sort(sign * probe_scores)
    n_probe = probe_sorted.size

    if mode == "exact":
        better = 0.0
        ties = 0.0
        n_nonexistent = 0
        for i in range(split_.t - 1):
            js = _nonexistent_cols(split_, i)
            if js.size == 0:
                continue
            js = js[in_stratum(i, js)]
            if js.size == 0:
                continue
            vals = sign * scored.score_rows(i, js)
            n_nonexistent += vals.size
            lo = np.searchsorted(probe_sorted, vals, side="left")
            hi = np.searchsorted(probe_sorted, vals, side="right")
            better += float(np.sum(n_probe - hi))
            ties += float(np.sum(hi - lo))
        if n_nonexistent == 0:
            return None
        return (better + 0.5 * ties) / (n_probe * n_nonexistent)

    if mode == "sampled":
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 11))))
        probe_pool = sign * probe_scores
        t = split_.t
        wins = 0.0
        done = 0
        while done < n:
            u = int(gen.integers(0, t))
            v = int(gen.integers(0, t))
            if u == v:
                continue
            u, v = (u, v) if u < v else (v, u)
            if split_.in_any_edge_set(u, v):
                continue
            if not in_stratum(u, np.array([v]))[0]:
                continue
            s_non = sign * scored.score_rows(u, np.array([v]))[0]
            s_miss = probe_pool[int(gen.integers(0, probe_pool.size))]
            if s_miss > s_non:
                wins += 1.0
            elif s_miss == s_non:
                wins += 0.5
            done += 1
        return wins / n

    raise ValueError(f"unknown mode {mode!r}")


def roc_curve(scored: ScoredPairs, split_: LinkSplit, stratum: str = "all", k_max: int = 6):
    """ROC points (FPR, TPR) from sweeping every distinct score as an
    inclusive threshold, orientation-aware, sorted by FPR.

    The trapezoidal area under the returned points equals the exact AUC.
    Returns None when either side of the stratum is empty.
    """
    in_stratum = _stratum_mask_factory(split_, stratum, k_max)
    probe_scores = _probe_scores_in_stratum(scored, split_, in_stratum)
    if probe_scores.size == 0:
        return None
    sign = 1.0 if scored.higher_is_better else -1.0
    miss = np.sort(sign * probe_scores)
    non_parts = []
    for i in range(split_.t - 1):
        js = _nonexistent_cols(split_, i)
        if js.size == 0:
            continue
        js = js[in_stratum(i, js)]
        if js.size:
            non_parts.append(sign * scored.score_rows(i, js))
    if not non_parts:
        return None
    non = np.sort(np.concatenate(non_parts))
    thresholds = np.unique(np.concatenate([miss, non]))[::-1]  # best first
    n_miss, n_non = miss.size, non.size
    tpr = (n_miss - np.searchsorted(miss, thresholds, side="left")) / n_miss
    fpr = (n_non - np.searchsorted(non, thresholds, side="left")) / n_non
    pts = np.column_stack([np.concatenate([[0.0], fpr]), np.concatenate([[0.0], tpr])])
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order]
