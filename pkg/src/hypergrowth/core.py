"""Closed-form quantities of popularity x similarity network growth on the
hyperbolic plane.

A growing network places node i = 1, 2, ... at radius r_i = (2/zeta) ln i and
a uniform angle; every older node drifts outward as r_j(i) = beta*r_j +
(1-beta)*r_i, and the new node links to each old node with the logistic
probability p(x) = 1 / (1 + exp[(zeta/2T)(x - R_i)]) of their hyperbolic
distance x.  The cutoff R_i is calibrated so the expected number of links a
new node creates equals its budget.  In the external-link-only variant the
budget is inflated from m to mbar_i(t) = m + Lbar_i(t), where Lbar_i(t) is the
expected number of internal links node i would have accumulated by final time
t in the internal-link variant; this emulation makes the two models produce
statistically equivalent graphs.

Everything here is a pure function of its inputs: no RNG, no caches, no
global state.  All formulas accept real-valued birth indices i >= 1 because
the model's derivations treat i as continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

__all__ = [
    "BETA_BRANCH_TOL",
    "PROB_FLOOR",
    "LOG_PROB_FLOOR",
    "ModelParams",
    "PolarPoint",
    "LikelihoodContext",
    "radial_coordinate",
    "rim_radius",
    "drifted_radius",
    "angular_separation",
    "hyperbolic_distance",
    "hyperbolic_distance_approx",
    "pairwise_distance",
    "radial_attraction_integral",
    "connection_radius",
    "connection_probability",
    "connection_log_probability",
    "expected_internal_links",
    "expected_initial_links",
    "expected_initial_links_threshold",
    "radial_density",
    "global_connection_probability",
    "mle_degree_target",
]

# Within this distance of a branch point (beta = 1/2, beta = 1) the closed
# forms lose precision to cancellation, so the analytic limits take over.
BETA_BRANCH_TOL = 1e-9

# Probabilities are clamped to [PROB_FLOOR, 1 - PROB_FLOOR] before taking
# logs; likelihood products over >~300 factors underflow without this.
PROB_FLOOR = 1e-300
LOG_PROB_FLOOR = math.log(PROB_FLOOR)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelParams:
    """The five growth parameters plus the final network size.

    m     : expected external links per new node, > 0
    L     : internal-link rate per time step, >= 0
    gamma : degree-distribution power-law exponent, >= 2
    T     : temperature controlling clustering, >= 0 (embedding formulas
            additionally require T < 1)
    zeta  : curvature scale sqrt(-K) of the plane, > 0
    t     : final number of nodes, >= 1

    beta = 1/(gamma - 1) is derived and lies in (0, 1].
    """

    m: float
    L: float
    gamma: float
    T: float
    zeta: float = 1.0
    t: int = 1

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"m must be > 0, got {self.m}")
        if self.L < 0:
            raise ValueError(f"L must be >= 0, got {self.L}")
        if self.gamma < 2:
            raise ValueError(f"gamma must be >= 2, got {self.gamma}")
        if self.T < 0:
            raise ValueError(f"T must be >= 0, got {self.T}")
        if not self.zeta > 0:
            raise ValueError(f"zeta must be > 0, got {self.zeta}")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")

    @property
    def beta(self) -> float:
        return 1.0 / (self.gamma - 1.0)

    @property
    def mean_degree(self) -> float:
        """Large-t expected average degree, 2(m + L)."""
        return 2.0 * (self.m + self.L)

    def with_t(self, t: int) -> "ModelParams":
        return ModelParams(self.m, self.L, self.gamma, self.T, self.zeta, t)

    def with_T(self, T: float) -> "ModelParams":
        return ModelParams(self.m, self.L, self.gamma, T, self.zeta, self.t)


@dataclass(frozen=True)
class PolarPoint:
    """A point of the hyperbolic plane in native polar coordinates.

    The angle is normalized into [0, 2*pi); the radius must be >= 0.
    """

    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"radius must be >= 0, got {self.r}")
        object.__setattr__(self, "theta", float(self.theta) % _TWO_PI)


def radial_coordinate(i, params: ModelParams):
    """Birth radius r_i = (2/zeta) ln i of the node born at time i >= 1."""
    i = np.asarray(i, dtype=float)
    if np.any(i < 1):
        raise ValueError("birth index must be >= 1")
    out = (2.0 / params.zeta) * np.log(i)
    return float(out) if out.ndim == 0 else out


def rim_radius(params: ModelParams) -> float:
    """Radius of the outer rim at final time, r_t = (2/zeta) ln t."""
    return (2.0 / params.zeta) * math.log(params.t)


def drifted_radius(r_initial, r_current_rim, beta):
    """Radius of an old node after popularity fading.

    When the rim has moved out to r_current_rim, a node born at r_initial
    sits at beta*r_initial + (1 - beta)*r_current_rim.
    """
    if not 0 < beta <= 1:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    return beta * r_initial + (1.0 - beta) * r_current_rim


def angular_separation(theta_a, theta_b):
    """Angular distance pi - |pi - |theta_a - theta_b|| in [0, pi]."""
    return np.pi - np.abs(np.pi - np.abs(np.asarray(theta_a) - np.asarray(theta_b)))


def pairwise_distance(r_a, theta_a, r_b, theta_b, zeta=1.0):
    """Vectorized exact hyperbolic distance between coordinate arrays.

    Evaluated as acosh[cosh(zeta(r_a - r_b)) + sinh(zeta r_a) sinh(zeta r_b)
    * 2 sin^2(dtheta/2)], the cancellation-free rearrangement of the
    cosh-product form: coincident points give exactly zero.  The argument is
    still clamped to 1 against stray rounding.
    """
    if not zeta > 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    r_a = np.asarray(r_a, dtype=float)
    r_b = np.asarray(r_b, dtype=float)
    dtheta = angular_separation(theta_a, theta_b)
    arg = np.cosh(zeta * (r_a - r_b)) + np.sinh(zeta * r_a) * np.sinh(
        zeta * r_b
    ) * 2.0 * np.square(np.sin(dtheta / 2.0))
    arg = np.maximum(arg, 1.0)
    out = np.arccosh(arg) / zeta
    return float(out) if out.ndim == 0 else out


def hyperbolic_distance(a: PolarPoint, b: PolarPoint, zeta=1.0) -> float:
    """Exact hyperbolic distance between two points (arccosh form)."""
    return pairwise_distance(a.r, a.theta, b.r, b.theta, zeta)


def hyperbolic_distance_approx(a: PolarPoint, b: PolarPoint, zeta=1.0) -> float:
    """Additive large-distance approximation r_a + r_b + (2/zeta)ln(dtheta/2).

    Exposed for testing only; the exact form is the default everywhere.
    Diverges to -inf for coincident angles.
    """
    if not zeta > 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    dtheta = float(angular_separation(a.theta, b.theta))
    with np.errstate(divide="ignore"):
        return a.r + b.r + (2.0 / zeta) * np.log(dtheta / 2.0)


def radial_attraction_integral(i, beta):
    """Normalization integral I_i = (1 - i^-(1-beta)) / (1 - beta).

    At beta = 1 (within BETA_BRANCH_TOL) the limit ln i applies.
    """
    i = np.asarray(i, dtype=float)
    if np.any(i < 1):
        raise ValueError("birth index must be >= 1")
    if abs(1.0 - beta) < BETA_BRANCH_TOL:
        out = np.log(i)
    else:
        om = 1.0 - beta
        out = (1.0 - i**-om) / om
    return float(out) if out.ndim == 0 else out


def _temperature_prefactor(T: float) -> float:
    """2T / sin(pi*T), with the T -> 0 limit 2/pi.

    T >= 1 makes sin(pi*T) <= 0 and the calibration breaks down; the
    clustered regime of the model is T in [0, 1).
    """
    if T >= 1.0:
        raise ValueError(f"connection radius requires T < 1, got T={T}")
    if T == 0.0:
        return 2.0 / math.pi
    return 2.0 * T / math.sin(math.pi * T)


def connection_radius(i, params: ModelParams, mbar_i):
    """Logistic cutoff R_i = r_i - (2/zeta) ln[(2T/sin(pi T)) I_i / mbar_i].

    mbar_i is the expected number of links the node born at i creates:
    m for the plain models, m + Lbar_i(t) for external-link emulation.
    """
    i = np.asarray(i, dtype=float)
    if np.any(i < 2):
        raise ValueError("connection radius is defined for birth index >= 2")
    mbar_i = np.asarray(mbar_i, dtype=float)
    if np.any(mbar_i <= 0):
        raise ValueError("mbar_i must be > 0")
    pref = _temperature_prefactor(params.T)
    I_i = radial_attraction_integral(i, params.beta)
    out = (2.0 / params.zeta) * (np.log(i) - np.log(pref * I_i / mbar_i))
    return float(out) if out.ndim == 0 else out


def connection_probability(x, R, T, zeta=1.0):
    """Logistic link probability 1 / (1 + exp[(zeta/2T)(x - R)]).

    At T = 0 this is the step function: 1 for x <= R, 0 otherwise.
    """
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if not zeta > 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    x = np.asarray(x, dtype=float)
    if T == 0.0:
        out = np.where(x <= R, 1.0, 0.0)
    else:
        out = expit(-(zeta / (2.0 * T)) * (x - R))
    return float(out) if out.ndim == 0 else out


def connection_log_probability(x, R, T, zeta=1.0, floor=None):
    """Stable (log p, log(1-p)) for the logistic link probability.

    Computed from the exponent s = (zeta/2T)(x - R) as
    log p = -softplus(s) and log(1-p) = -softplus(-s).  If ``floor`` is
    given, both logs are clamped from below (the likelihood modules pass
    LOG_PROB_FLOOR, i.e. probabilities clamped to [1e-300, 1 - 1e-300]).
    At T = 0 the step probabilities give logs of 0 and -inf (or the floor).
    """
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if not zeta > 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    x = np.asarray(x, dtype=float)
    lo = -np.inf if floor is None else floor
    if T == 0.0:
        inside = x <= R
        log_p = np.where(inside, 0.0, lo)
        log_1mp = np.where(inside, lo, 0.0)
    else:
        s = (zeta / (2.0 * T)) * (x - R)
        sp_pos = np.where(s > 0, s, 0.0) + np.log1p(np.exp(-np.abs(s)))  # softplus(s)
        sp_neg = sp_pos - s  # softplus(-s) = softplus(s) - s
        log_p = np.maximum(-sp_pos, lo)
        log_1mp = np.maximum(-sp_neg, lo)
    if log_p.ndim == 0:
        return float(log_p), float(log_1mp)
    return log_p, log_1mp


def expected_internal_links(i, params: ModelParams):
    """Expected internal links Lbar_i(t) accumulated by node i up to time t.

    General closed form for beta away from the branch points:

        Lbar_i(t) = 2L(1-beta) / [(1 - t^-(1-beta))^2 (2beta-1)]
                    * [(t/i)^(2beta-1) - 1] * [1 - i^-(1-beta)]

    with the analytic limits at beta = 1/2 and beta = 1 substituted within
    BETA_BRANCH_TOL of the branch points.
    """
    i = np.asarray(i, dtype=float)
    t = float(params.t)
    if np.any(i < 1) or np.any(i > t):
        raise ValueError("birth index must satisfy 1 <= i <= t")
    L, beta = params.L, params.beta
    if L == 0.0:
        out = np.zeros_like(i)
    elif abs(beta - 1.0) < BETA_BRANCH_TOL:
        out = 2.0 * L * (t - i) * np.log(i) / (i * math.log(t) ** 2)
    elif abs(beta - 0.5) < BETA_BRANCH_TOL:
        out = L * (1.0 - i**-0.5) / (1.0 - t**-0.5) ** 2 * np.log(t / i)
    else:
        om = 1.0 - beta
        pref = 2.0 * L * om / ((1.0 - t**-om) ** 2 * (2.0 * beta - 1.0))
        out = pref * ((t / i) ** (2.0 * beta - 1.0) - 1.0) * (1.0 - i**-om)
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def expected_initial_links(i, params: ModelParams):
    """Inflated link budget mbar_i(t) = m + Lbar_i(t) of the node born at i."""
    return params.m + expected_internal_links(i, params)


def expected_initial_links_threshold(params: ModelParams) -> int:
    """Largest i with mbar_i(t) >= i - 1.

    Nodes born up to this time are expected to link to essentially every
    older node, which is why their angular coordinates are hard to infer.
    """
    hi = 1
    for i in range(2, params.t + 1):
        if expected_initial_links(i, params) >= i - 1:
            hi = i
        else:
            break
    return hi


def radial_density(r, params: ModelParams):
    """Density f_t(r) = (zeta/2beta) exp[(zeta/2beta)(r - r_t)] of final radii."""
    r = np.asarray(r, dtype=float)
    a = params.zeta / (2.0 * params.beta)
    out = a * np.exp(a * (r - rim_radius(params)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LikelihoodContext:
    """Precomputed ingredients of the whole-network connection probability.

    delta[k] holds Delta_i(t) for i = k + 2 (i runs over 2..t), the shift
    that maps the link cutoff of the node born at time i onto the final-time
    cutoff R_t.  A is the constant of the first-term expansion; the expansion
    is trustworthy when |1 - A| <= 1.
    """

    params: ModelParams
    R_t: float
    delta: np.ndarray = field(repr=False)
    A: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "LikelihoodContext":
        if params.t < 2:
            raise ValueError("likelihood context needs a network of t >= 2 nodes")
        t, beta, zeta, m = params.t, params.beta, params.zeta, params.m
        i = np.arange(2, t + 1, dtype=float)
        mbar = expected_initial_links(i, params)
        R_t = connection_radius(t, params, expected_initial_links(t, params))
        I_i = radial_attraction_integral(i, beta)
        I_t = radial_attraction_integral(t, beta)
        delta = (2.0 / zeta) * (
            (2.0 * beta - 1.0) * np.log(t / i) + np.log(m * I_i / (mbar * I_t))
        )
        kbar = params.mean_degree
        om = 1.0 - beta
        if abs(beta - 0.5) < BETA_BRANCH_TOL:
            # (2*beta - 1) -> 0 with a nonzero numerator: no finite constant
            A = math.inf if params.L > 0 else 0.0
        elif abs(beta - 1.0) < BETA_BRANCH_TOL:
            # (1 - t^-(1-beta)) ~ (1-beta) ln t cancels the (1-beta) upstairs
            A = (kbar - 2.0 * m) / (m * math.log(t))
        else:
            A = (kbar - 2.0 * m) * om / (m * (2.0 * beta - 1.0) * (1.0 - t**-om))
        return cls(params=params, R_t=R_t, delta=delta, A=A)

    @property
    def first_term_ok(self) -> bool:
        """Validity condition |1 - A| <= 1 of the one-term approximation."""
        return abs(1.0 - self.A) <= 1.0

    def minimum_birth_index(self, x: float) -> int:
        """Earliest birth time i_min whose link cutoff can reach distance x.

        i_min = max(2, ceil(t * exp[-zeta x / (4(1-beta))])).  At beta = 1 the
        exponent degenerates: any x > 0 gives i_min = 2, while x = 0 pins the
        sum to the single final-time term.
        """
        t, beta = self.params.t, self.params.beta
        if abs(1.0 - beta) < BETA_BRANCH_TOL:
            return 2 if x > 0 else t
        raw = t * math.exp(-self.params.zeta * x / (4.0 * (1.0 - beta)))
        return max(2, min(t, math.ceil(raw)))


def global_connection_probability(x, ctx: LikelihoodContext, approx: bool = False):
    """Probability that two random nodes at final-time distance x are linked.

    Exact form: the average over birth times i = i_min..t of the logistic
    probability at exponent (zeta/2T)(x - R_t + Delta_i(t)).  With
    ``approx=True`` only the first term of the Taylor expansion is used,
    i.e. the single logistic at (zeta/2T)(x - R_t).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0):
        raise ValueError("hyperbolic distance must be >= 0")
    p = ctx.params
    if approx:
        out = connection_probability(xs, ctx.R_t, p.T, p.zeta)
        out = np.atleast_1d(out)
    else:
        out = np.empty_like(xs)
        for idx, xv in enumerate(xs.ravel()):
            i_min = ctx.minimum_birth_index(float(xv))
            d = ctx.delta[i_min - 2 :]
            # exponent is (zeta/2T)(x - R_t + Delta_i), i.e. the birth-time
            # shift adds to the distance
            terms = connection_probability(xv + d, ctx.R_t, p.T, p.zeta)
            out.ravel()[idx] = np.mean(np.atleast_1d(terms))
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def mle_degree_target(k, params: ModelParams):
    """Diagnostic offset k - T/beta where the coordinate likelihood peaks.

    Setting a node's expected final degree to this value maximizes the
    radial part of the global likelihood.  It is not used by the embedding
    itself, which only needs the resulting degree-ordering rule.
    """
    return np.asarray(k, dtype=float) - params.T / params.beta
