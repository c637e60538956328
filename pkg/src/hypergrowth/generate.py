"""Synthetic network growth on the hyperbolic plane.

Three model kinds share one loop:

  pso   : each new node links to old nodes with the logistic probability,
          budget m per node, no internal links.
  gpso  : pso plus exactly L internal links per time step, created by
          repeatedly drawing random disconnected old pairs and accepting
          each with the logistic probability at the current cutoff R_i
          (L must be a non-negative integer here).
  epso  : external links only, with the budget inflated to mbar_i(t) so the
          resulting graphs are statistically equivalent to gpso.

Randomness is counter-based (Philox) with one substream per (node, purpose),
so the draws for node i do not depend on how many random numbers earlier
nodes consumed.  Growth is bit-reproducible given (params, model_kind, seed).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .core import (
    BETA_BRANCH_TOL,
    ModelParams,
    connection_probability,
    connection_radius,
    expected_initial_links,
    radial_attraction_integral,
)
from .graph import AdjacencySnapshot

__all__ = ["MODEL_KINDS", "GrownNetwork", "grow", "expected_degree_curve"]

MODEL_KINDS = ("pso", "gpso", "epso")

# Internal-link rejection sampling stops after this many draws in one time
# step; at T = 0 every disconnected pair can sit outside the cutoff and the
# draw-until-L-successes loop would otherwise never terminate.
_MAX_INTERNAL_DRAWS_PER_STEP = 200_000

_ANGLE_STREAM, _EDGE_STREAM, _INTERNAL_STREAM = 0, 1, 2


def _substream(seed: int, node: int, purpose: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, node, purpose))))


@dataclass(frozen=True)
class GrownNetwork:
    """A grown graph together with its ground truth.

    Node identity is the birth index 1..t; internal array positions are
    birth - 1.  ``radius_birth`` holds the initial radii r_i, ``theta`` the
    (never-changing) angles.  ``internal_per_step[i-1]`` counts internal
    links created at time i (always 0 for pso/epso).
    """

    params: ModelParams
    model_kind: str
    seed: int
    theta: np.ndarray = field(repr=False)
    radius_birth: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)
    internal_per_step: np.ndarray = field(repr=False)

    @property
    def t(self) -> int:
        return self.params.t

    def final_radii(self) -> np.ndarray:
        """Radii r_i(t) after the last drift, in birth order."""
        beta = self.params.beta
        return beta * self.radius_birth + (1.0 - beta) * self.radius_birth[-1]

    def to_snapshot(self) -> AdjacencySnapshot:
        return AdjacencySnapshot.from_edges(
            [(int(u), int(v)) for u, v in self.edges],
            node_ids=tuple(range(1, self.t + 1)),
        )

    def links_to_older(self) -> np.ndarray:
        """m_i(t): number of links from node i to nodes born before it."""
        out = np.zeros(self.t, dtype=np.int64)
        for u, v in self.edges:
            out[max(int(u), int(v))] += 1
        return out


def _connection_radii(params: ModelParams, model_kind: str) -> np.ndarray:
    """R_i for i = 2..t; index [i - 2]."""
    i = np.arange(2, params.t + 1, dtype=float)
    if model_kind == "epso":
        mbar = expected_initial_links(i, params)
    else:
        mbar = np.full(i.shape, params.m)
    return np.atleast_1d(connection_radius(i, params, mbar))


def grow(params: ModelParams, model_kind: str = "epso", seed: int = 0) -> GrownNetwork:
    """Grow a network of params.t nodes; deterministic given the seed."""
    if model_kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {model_kind!r}, expected one of {MODEL_KINDS}")
    if model_kind == "gpso" and (params.L != int(params.L)):
        raise ValueError("gpso creates exactly L internal links per step; L must be an integer")
    t, beta, zeta, T = params.t, params.beta, params.zeta, params.T
    rb = (2.0 / zeta) * np.log(np.arange(1, t + 1, dtype=float))
    theta = np.empty(t)
    for i in range(1, t + 1):
        theta[i - 1] = _substream(seed, i, _ANGLE_STREAM).uniform(0.0, 2.0 * math.pi)
    if t < 2:
        return GrownNetwork(
            params, model_kind, seed, theta, rb,
            np.empty((0, 2), dtype=np.int64), np.zeros(t, dtype=np.int64),
        )

    R = _connection_radii(params, model_kind)
    L_int = int(params.L) if model_kind == "gpso" else 0
    edge_set: set[tuple[int, int]] = set()
    neighbor_count = 0  # total edges, kept for the complete-subgraph check
    internal_per_step = np.zeros(t, dtype=np.int64)
    cap_hits = 0

    cosh_rb = np.cosh(zeta * rb)  # birth-radius hyperbolics, drift applied per step

    for i in range(2, t + 1):
        k = i - 1  # array position of the new node
        r_new = rb[k]
        r_old = beta * rb[:k] + (1.0 - beta) * r_new
        d_ang = np.pi - np.abs(np.pi - np.abs(theta[:k] - theta[k]))
        arg = np.cosh(zeta * r_new) * np.cosh(zeta * r_old) - np.sinh(
            zeta * r_new
        ) * np.sinh(zeta * r_old) * np.cos(d_ang)
        x = np.arccosh(np.maximum(arg, 1.0)) / zeta
        R_i = R[i - 2]
        if T == 0.0:
            hit = x <= R_i
        else:
            p = connection_probability(x, R_i, T, zeta)
            hit = _substream(seed, i, _EDGE_STREAM).random(k) < p
        for j in np.flatnonzero(hit):
            edge_set.add((int(j), k))
        neighbor_count = len(edge_set)

        if L_int > 0 and i >= 3:
            n_old_pairs = (i - 1) * (i - 2) // 2
            deg_new = int(np.count_nonzero(hit))
            gen = _substream(seed, i, _INTERNAL_STREAM)
            added = 0
            draws = 0
            while added < L_int:
                if neighbor_count - deg_new >= n_old_pairs:
                    break  # old subgraph is complete
                if draws >= _MAX_INTERNAL_DRAWS_PER_STEP:
                    cap_hits += 1
                    break
                a, b = int(gen.integers(0, k)), int(gen.integers(0, k))
                draws += 1
                if a == b:
                    continue
                pair = (a, b) if a < b else (b, a)
                if pair in edge_set:
                    continue
                d_ab = np.pi - abs(np.pi - abs(theta[a] - theta[b]))
                arg = math.cosh(zeta * r_old[a]) * math.cosh(zeta * r_old[b]) - math.sinh(
                    zeta * r_old[a]
                ) * math.sinh(zeta * r_old[b]) * math.cos(d_ab)
                x_ab = math.acosh(max(arg, 1.0)) / zeta
                if T == 0.0:
                    ok = x_ab <= R_i
                else:
                    ok = gen.random() < connection_probability(x_ab, R_i, T, zeta)
                if ok:
                    edge_set.add(pair)
                    neighbor_count += 1
                    added += 1
            internal_per_step[i - 1] = added

    if cap_hits:
        warnings.warn(
            f"internal-link sampling hit the per-step draw cap in {cap_hits} step(s); "
            "those steps created fewer than L links",
            stacklevel=2,
        )
    edges = (
        np.array(sorted(edge_set), dtype=np.int64)
        if edge_set
        else np.empty((0, 2), dtype=np.int64)
    )
    return GrownNetwork(params, model_kind, seed, theta, rb, edges, internal_per_step)


def _arrival_rate_integral(i: float, params: ModelParams) -> float:
    """Integral over l of the rate at which node i attracts links from
    arrivals l in (i, t], using the large-l approximation of the rate."""
    t, beta, m, L = params.t, params.beta, params.m, params.L
    I_t = radial_attraction_integral(t, beta)
    near_half = abs(beta - 0.5) < BETA_BRANCH_TOL
    near_one = abs(beta - 1.0) < BETA_BRANCH_TOL
    if not (near_half or near_one):
        a = (i / t) ** -beta
        ext = m / (I_t * beta) * (a - 1.0)
        if L > 0:
            b = (i / t) ** (1.0 - 2.0 * beta)
            om = 1.0 - beta
            inner = (2.0 * beta - 1.0) / (beta * om) * a - b / om + 1.0 / beta
            ext += 2.0 * L / (I_t**2 * (2.0 * beta - 1.0)) * inner
        return ext

    # Branch points: integrate the (pre-integration) rate numerically.
    def rate(l: float) -> float:
        base = l ** (beta - 1.0) * i**-beta
        ext = m / I_t * base
        if L > 0:
            if near_half:
                ext += 2.0 * L / I_t**2 * math.log(t / l) * base
            else:
                ext += 2.0 * L / I_t**2 * (t / l - 1.0) * base
        return ext

    val, _ = integrate.quad(rate, i, t, limit=200)
    return val


def expected_degree_curve(params: ModelParams, i_values=None):
    """Expected degree kbar_i(t) of each birth time i, as (i, kbar) arrays.

    kbar_i(t) = mbar_i(t) + integral of the link-attraction rate over later
    arrivals; the curve is proportional to (i/t)^-beta.
    """
    t = params.t
    if i_values is None:
        i_values = np.unique(np.round(np.logspace(0, math.log10(t), 200)).astype(int))
        i_values = i_values[(i_values >= 1) & (i_values <= t)]
    i_values = np.asarray(i_values, dtype=float)
    kbar = np.array(
        [
            float(expected_initial_links(iv, params)) + _arrival_rate_integral(iv, params)
            for iv in i_values
        ]
    )
    return i_values, kbar
