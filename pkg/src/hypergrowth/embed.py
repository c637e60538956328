"""Map a given network into the hyperbolic plane by replaying its growth.

The likelihood of the observed adjacency peaks when each node's expected
degree matches its observed degree, which orders appearance times inversely
by degree.  So: sort nodes by decreasing degree, call the sorted position the
node's (maximum-likelihood) birth time, and replay the growth model.  When
the node of rank i is born it gets the model radius for time i, all older
nodes drift outward, and its angle is chosen to maximize the probability of
its observed links and non-links to every older node, sampled on a grid of
ceil(2*pi*i) angles so the spacing never exceeds 1/i.

Occasional correction sweeps revisit each placed node and re-maximize its
angle against everything placed so far, where each pairwise factor is taken
at the younger node's birth time with the younger node's link cutoff.  The
whole procedure is deterministic once the first node's angle is fixed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._kernels import angle_grid, grid_loglik
from .core import (
    ModelParams,
    connection_radius,
    expected_initial_links,
    expected_initial_links_threshold,
)
from .graph import AdjacencySnapshot

__all__ = [
    "Embedding",
    "TemperatureEstimate",
    "infer_birth_order",
    "local_log_likelihood",
    "maximize_angle",
    "correction_step",
    "embed",
    "truth_embedding",
    "infer_temperature",
    "estimate_gamma",
    "estimate_params",
    "ReplayState",
]

DEFAULT_CORRECTION_DEGREES = (60, 40, 20, 10)


@dataclass(frozen=True)
class Embedding:
    """Hyperbolic coordinates for every node of a snapshot.

    order[k] is the node index of rank k+1 (rank 1 = first born).  radii and
    angles are indexed by node, radii at final time t:
    r(rank, t) = beta*(2/zeta)*ln(rank) + (1-beta)*(2/zeta)*ln(t).
    """

    node_ids: tuple
    order: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    angles: np.ndarray = field(repr=False)
    params: ModelParams
    provenance: dict = field(repr=False, default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.node_ids)

    def ranks(self) -> np.ndarray:
        """rank[node_index] in 1..t."""
        r = np.empty(self.t, dtype=np.int64)
        r[self.order] = np.arange(1, self.t + 1)
        return r


def infer_birth_order(net: AdjacencySnapshot) -> np.ndarray:
    """Maximum-likelihood birth order: degrees descending, ties by label.

    Returns node indices; position k holds the node of rank k+1.
    """
    keys = sorted(range(net.t), key=lambda u: (-int(net.degrees[u]), net.node_ids[u]))
    return np.array(keys, dtype=np.int64)


class ReplayState:
    """Mutable replay of the growth: placed ranks, their angles, and the
    per-rank tables (birth radii, link cutoffs, rank-space adjacency)."""

    def __init__(self, net: AdjacencySnapshot, params: ModelParams, workers: int = 1):
        if net.t < 1:
            raise ValueError("cannot embed an empty snapshot")
        if params.t != net.t:
            params = params.with_t(net.t)
        self.net = net
        self.params = params
        self.workers = workers
        self.order = infer_birth_order(net)
        t = net.t
        rank_of = np.empty(t, dtype=np.int64)
        rank_of[self.order] = np.arange(1, t + 1)
        self.rank_of = rank_of

        zeta, beta = params.zeta, params.beta
        rank = np.arange(0, t + 1, dtype=float)
        rank[0] = 1.0  # rank index 0 unused
        self.rb = (2.0 / zeta) * np.log(rank)  # birth radius by rank
        self.R = np.full(t + 1, np.nan)
        if t >= 2:
            i = np.arange(2, t + 1, dtype=float)
            self.R[2:] = np.atleast_1d(
                connection_radius(i, params, expected_initial_links(i, params))
            )
        # cosh/sinh split of the drift formula r_a(tau) = beta*rb[a] +
        # (1-beta)*rb[tau]; hyperbolics of either part are fixed per rank.
        self._cb = np.cosh(zeta * beta * self.rb)
        self._sb = np.sinh(zeta * beta * self.rb)
        self._cd = np.cosh(zeta * (1.0 - beta) * self.rb)
        self._sd = np.sinh(zeta * (1.0 - beta) * self.rb)
        self.d_bound = 4.0 * math.log(max(t, 2)) + 4.0  # > zeta * max distance

        # adjacency in rank space
        nbr_ranks = [np.sort(rank_of[net.neighbors(u)]) for u in self.order]
        self._nbr_ranks = nbr_ranks  # index: rank - 1
        self.theta = np.full(t + 1, np.nan)
        self._cos = np.full(t + 1, np.nan)
        self._sin = np.full(t + 1, np.nan)
        self.placed = 0

    def set_angle(self, rank: int, theta: float):
        theta = float(theta) % (2.0 * math.pi)
        self.theta[rank] = theta
        self._cos[rank] = math.cos(theta)
        self._sin[rank] = math.sin(theta)

    def place(self, rank: int, theta: float):
        if rank != self.placed + 1:
            raise ValueError(f"ranks must be placed in order; expected {self.placed + 1}")
        self.set_angle(rank, theta)
        self.placed = rank

    def neighbor_ranks(self, rank: int) -> np.ndarray:
        return self._nbr_ranks[rank - 1]

    def _hyperbolics_at(self, ranks, tau):
        """cosh and sinh of zeta * r_rank(tau); tau scalar or per-entry."""
        cb, sb = self._cb[ranks], self._sb[ranks]
        cd, sd = self._cd[tau], self._sd[tau]
        return cb * cd + sb * sd, sb * cd + cb * sd

    def placement_inputs(self, rank: int):
        """Pair reductions for placing `rank` against ranks 1..rank-1."""
        old = np.arange(1, rank)
        ch_new, sh_new = self._hyperbolics_at(rank, rank)
        ch_old, sh_old = self._hyperbolics_at(old, rank)
        A = ch_new * ch_old
        B = sh_new * sh_old
        P = np.vstack([B * self._cos[old], B * self._sin[old]])
        zR = self.params.zeta * self.R[rank]
        edge_cols = self.neighbor_ranks(rank)
        edge_cols = edge_cols[edge_cols < rank] - 1
        return A, P, np.float64(zR), edge_cols

    def correction_inputs(self, rank: int, now: int):
        """Pair reductions for re-optimizing `rank` against every other
        placed rank; each pair is taken at the younger member's birth time
        with the younger member's cutoff."""
        others = np.concatenate([np.arange(1, rank), np.arange(rank + 1, now + 1)])
        tau = np.maximum(others, rank)
        ch_j, sh_j = self._hyperbolics_at(rank, tau)
        ch_l, sh_l = self._hyperbolics_at(others, tau)
        A = ch_j * ch_l
        B = sh_j * sh_l
        P = np.vstack([B * self._cos[others], B * self._sin[others]])
        zR = self.params.zeta * self.R[tau]
        nbrs = set(int(r) for r in self.neighbor_ranks(rank))
        edge_cols = np.flatnonzero([int(l) in nbrs for l in others])
        return A, P, zR, edge_cols


def local_log_likelihood(rank: int, theta, state: ReplayState):
    """Log-probability of rank's observed links and non-links to all older
    ranks if its angle were `theta`, at its birth time.

    Accepts a scalar angle or an array of trial angles.
    """
    if rank < 2:
        raise ValueError("the first node has no older nodes; rank must be >= 2")
    if rank > state.placed + 1:
        raise ValueError(f"ranks 1..{rank - 1} must be placed first")
    A, P, zR, edge_cols = state.placement_inputs(rank)
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    ll = grid_loglik(
        thetas, A, P, zR, edge_cols, state.params.T, state.d_bound, state.workers
    )
    return float(ll[0]) if np.ndim(theta) == 0 else ll


def _argmax_grid(ll: np.ndarray, grid: np.ndarray):
    k = int(np.argmax(ll))  # first maximum = smallest angle
    return float(grid[k]), float(ll[k])


def maximize_angle(rank: int, state: ReplayState):
    """Angle maximizing the local likelihood over ceil(2*pi*rank) trial
    angles 2*pi*k/N; ties resolve to the smallest angle."""
    theta, _, _ = _maximize_angle_full(rank, state)
    return theta


def _maximize_angle_full(rank: int, state: ReplayState):
    grid = angle_grid(math.ceil(2.0 * math.pi * rank))
    ll = local_log_likelihood(rank, grid, state)
    theta, best = _argmax_grid(ll, grid)
    return theta, best, ll


def correction_step(state: ReplayState, passes: int = 1):
    """Sweep every placed rank in order, re-maximizing each angle with all
    other angles held fixed; repeated `passes` times.

    The candidate set is the current grid plus the node's present angle, so
    each update is non-decreasing in the node's own objective even though
    the present angle may lie on an older, coarser grid.
    """
    now = state.placed
    if now < 2:
        return
    grid = angle_grid(math.ceil(2.0 * math.pi * now))
    T, d_bound, workers = state.params.T, state.d_bound, state.workers
    for _ in range(passes):
        for rank in range(1, now + 1):
            A, P, zR, edge_cols = state.correction_inputs(rank, now)
            ll = grid_loglik(grid, A, P, zR, edge_cols, T, d_bound, workers)
            cur = grid_loglik(
                np.array([state.theta[rank]]), A, P, zR, edge_cols, T, d_bound, 1
            )[0]
            theta, best = _argmax_grid(ll, grid)
            if best >= cur:
                state.set_angle(rank, theta)


def _correction_ranks(net: AdjacencySnapshot, order, degree_schedule):
    """Rank after which each correction step runs: the last rank whose
    degree is >= the threshold (duplicates collapse)."""
    degs = net.degrees[order]
    ranks = []
    for thr in degree_schedule:
        n = int(np.count_nonzero(degs >= thr))
        if n >= 2:
            ranks.append(n)
    return sorted(set(ranks))


def embed(
    net: AdjacencySnapshot,
    params: ModelParams,
    correction_degrees=DEFAULT_CORRECTION_DEGREES,
    passes: int = 4,
    theta1: float = 0.0,
    workers: int = 1,
) -> Embedding:
    """Replay the growth of `net` and return inferred coordinates.

    correction_degrees gives the degree thresholds after which correction
    sweeps run (empty or None disables them); `passes` sweeps per step.
    Deterministic given the inputs, for any worker count.
    """
    state = ReplayState(net, params, workers=workers)
    params = state.params
    t = net.t
    if t > 1 and not net.is_connected():
        warnings.warn(
            "snapshot is disconnected; embedding everything (evaluation modules "
            "may restrict to the giant component)",
            stacklevel=2,
        )
    sched = _correction_ranks(net, state.order, correction_degrees or ())
    sched_set = set(sched)

    flat_rank_limit = expected_initial_links_threshold(params)
    landscape = []

    state.place(1, theta1)
    for rank in range(2, t + 1):
        theta, best, ll = _maximize_angle_full(rank, state)
        state.place(rank, theta)
        if rank <= flat_rank_limit:
            width = float(np.mean(ll >= best - 1.0))
            landscape.append({"rank": rank, "within_1_nat": width})
        if rank in sched_set:
            correction_step(state, passes=passes)

    beta, zeta = params.beta, params.zeta
    ranks = np.arange(1, t + 1, dtype=float)
    radii_by_rank = beta * (2.0 / zeta) * np.log(ranks) + (1.0 - beta) * (
        2.0 / zeta
    ) * math.log(t) if t > 1 else np.zeros(1)
    radii = np.empty(t)
    angles = np.empty(t)
    radii[state.order] = radii_by_rank
    angles[state.order] = state.theta[1 : t + 1]
    provenance = {
        "method": "growth replay, per-node grid likelihood maximization",
        "theta1": theta1,
        "correction_degrees": list(correction_degrees or ()),
        "correction_ranks": sched,
        "passes": passes,
        "grid": "ceil(2*pi*i) angles at node i",
        "flat_early_ranks": landscape,
        "params": {
            "m": params.m, "L": params.L, "gamma": params.gamma,
            "T": params.T, "zeta": params.zeta, "t": params.t,
        },
    }
    return Embedding(
        node_ids=net.node_ids,
        order=state.order,
        radii=radii,
        angles=angles,
        params=params,
        provenance=provenance,
    )


def truth_embedding(grown) -> Embedding:
    """Embedding view of a grown network's ground-truth coordinates."""
    t = grown.t
    return Embedding(
        node_ids=tuple(range(1, t + 1)),
        order=np.arange(t, dtype=np.int64),
        radii=grown.final_radii(),
        angles=grown.theta.copy(),
        params=grown.params,
        provenance={"method": "ground truth from growth"},
    )


# ---------------------------------------------------------------------------
# parameter estimation


def estimate_gamma(degrees, min_tail: int = 50):
    """Power-law exponent of the degree tail by maximum likelihood.

    Scans lower cutoffs, fits the continuous-approximation MLE
    alpha = 1 + n / sum ln(k / (kmin - 1/2)) on each tail, and keeps the
    cutoff whose fitted law is closest to the empirical tail in
    Kolmogorov-Smirnov distance.  Returns (gamma, kmin, ks).
    """
    degrees = np.asarray(degrees)
    degrees = degrees[degrees >= 1]
    if degrees.size < 10:
        raise ValueError("need at least 10 nonzero degrees to fit a tail exponent")
    best = None
    for kmin in np.unique(degrees):
        kmin = int(kmin)
        if kmin < 2:
            continue
        tail = degrees[degrees >= kmin]
        n = tail.size
        if n < min_tail:
            break
        shift = kmin - 0.5
        alpha = 1.0 + n / np.sum(np.log(tail / shift))
        ks_vals, counts = np.unique(tail, return_counts=True)
        ecdf = np.cumsum(counts) / n
        model = 1.0 - ((ks_vals + 0.5) / shift) ** (1.0 - alpha)
        ks = float(np.max(np.abs(ecdf - model)))
        if best is None or ks < best[2]:
            best = (float(alpha), kmin, ks)
    if best is None:
        raise ValueError("no cutoff leaves a tail of the required size")
    return best


def estimate_params(
    net: AdjacencySnapshot, T: float, m=None, L=None, gamma=None, zeta: float = 1.0
):
    """Fill unknown model parameters from the snapshot.

    m defaults to the minimum observed degree (floored at 1), L to
    (kbar - 2m)/2 floored at 0, gamma to the degree-tail fit.  Returns the
    parameters and a record of what was estimated.
    """
    notes = {}
    kbar = 2.0 * net.n_edges / max(net.t, 1)
    if m is None:
        m = max(float(np.min(net.degrees)), 1.0)
        notes["m"] = f"minimum observed degree rule -> {m}"
    if L is None:
        L = max((kbar - 2.0 * m) / 2.0, 0.0)
        notes["L"] = f"(kbar - 2m)/2 with kbar={kbar:.4f} -> {L:.4f}"
    if gamma is None:
        gamma, kmin, ks = estimate_gamma(net.degrees)
        gamma = max(gamma, 2.0)
        notes["gamma"] = f"degree-tail MLE (kmin={kmin}, ks={ks:.4f}) -> {gamma:.4f}"
    params = ModelParams(m=m, L=L, gamma=gamma, T=T, zeta=zeta, t=net.t)
    return params, notes


# ---------------------------------------------------------------------------
# temperature inference


@dataclass(frozen=True)
class TemperatureEstimate:
    """Outcome of the temperature sweep.

    status is "ok", "unverified" (single-point grid, convergence untestable)
    or "no_stable_estimate" (curves never converge); estimate is None in the
    last case.  curves maps each input T to its empirical connection-
    probability curve; sse maps candidate T to its tail misfit.
    """

    estimate: float | None
    status: str
    converged: tuple
    curves: dict
    sse: dict


def infer_temperature(
    net: AdjacencySnapshot,
    params: ModelParams,
    T_grid,
    tail_window=None,
    sup_tol: float = 0.02,
    min_pairs: int = 100,
    correction_degrees=DEFAULT_CORRECTION_DEGREES,
    passes: int = 4,
    workers: int = 1,
) -> TemperatureEstimate:
    """Estimate the temperature by embedding at each grid value.

    The empirical connection-probability curve is insensitive to the input
    temperature up to the network's real one, so the grid is swept in
    ascending order until successive curves stop agreeing (sup-norm below
    sup_tol on bins with at least min_pairs pairs in every curve).  The
    returned estimate is the grid value whose theoretical curve best matches
    the converged empirical tail (least squares over tail_window, a distance
    interval defaulting to the upper half of the common support).
    """
    from .metrics import connection_curve

    T_grid = sorted(float(Tg) for Tg in T_grid)
    if not T_grid:
        raise ValueError("T_grid must be non-empty")
    if any(not 0.0 < Tg < 1.0 for Tg in T_grid):
        raise ValueError("temperature grid values must lie in (0, 1)")

    from .core import LikelihoodContext

    curves = {}
    for Tg in T_grid:
        p = params.with_T(Tg).with_t(net.t)
        emb = embed(
            net, p, correction_degrees=correction_degrees, passes=passes, workers=workers
        )
        curves[Tg] = connection_curve(emb, net, LikelihoodContext.from_params(p))

    if len(T_grid) == 1:
        Tg = T_grid[0]
        return TemperatureEstimate(
            estimate=Tg, status="unverified", converged=(Tg,), curves=curves, sse={}
        )

    n_bins = min(len(curves[Tg].empirical) for Tg in T_grid)
    support = np.ones(n_bins, dtype=bool)
    for Tg in T_grid:
        support &= curves[Tg].pair_counts[:n_bins] >= min_pairs

    def sup_dist(Ta, Tb):
        a = curves[Ta].empirical[:n_bins][support]
        b = curves[Tb].empirical[:n_bins][support]
        return float(np.max(np.abs(a - b))) if a.size else np.inf

    converged = [T_grid[0]]
    for prev, cur in zip(T_grid, T_grid[1:]):
        if sup_dist(prev, cur) < sup_tol:
            converged.append(cur)
        else:
            break
    if len(converged) < 2:
        return TemperatureEstimate(
            estimate=None,
            status="no_stable_estimate",
            converged=tuple(converged),
            curves=curves,
            sse={},
        )

    consensus_T = converged[-1]
    consensus = curves[consensus_T]
    centers = consensus.centers()[:n_bins]
    if tail_window is None:
        sup_centers = centers[support]
        lo = 0.5 * (sup_centers[0] + sup_centers[-1])
        hi = sup_centers[-1]
    else:
        lo, hi = tail_window
    tail = support & (centers >= lo) & (centers <= hi)
    if not np.any(tail):
        raise ValueError("tail window selects no populated bins")

    emp_tail = consensus.empirical[:n_bins][tail]
    sse = {}
    for Tc in T_grid:
        ctx = LikelihoodContext.from_params(params.with_T(Tc).with_t(net.t))
        from .core import global_connection_probability

        theo = global_connection_probability(centers[tail], ctx)
        sse[Tc] = float(np.sum((np.atleast_1d(theo) - emp_tail) ** 2))
    estimate = min(T_grid, key=lambda Tc: (sse[Tc], Tc))
    return TemperatureEstimate(
        estimate=estimate,
        status="ok",
        converged=tuple(converged),
        curves=curves,
        sse=sse,
    )
