"""Closed-form probability bounds, exact binomial oracles and estimates.

The bound functions (Chernoff via KL divergence, the two-sided window
bound, the Poisson-type upper tail) are straight formula evaluations
and are always valid upper/lower bounds for their tails. ``exact_tail``
is the brute-force oracle they are validated against; it is backed by
scipy's binomial distribution rather than the bound formulas, so the
two routes stay independent.

Constants the underlying growth/collapse statements leave unspecified
live in :class:`ConstantsConfig` as documented, tunable defaults; tests
pin the values they use and nothing here asserts them as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp
from scipy.stats import binom

from .errors import ParameterError

__all__ = [
    "ConstantsConfig",
    "DEFAULT_CONSTANTS",
    "TailQuery",
    "CollisionResult",
    "AlmostRedEstimate",
    "TheoryThresholds",
    "kl_divergence",
    "chernoff_tail",
    "window_bound",
    "poisson_tail_bound",
    "exact_tail",
    "EXACT_TAIL_MAX_N",
    "gaussian_cdf",
    "collision_probability",
    "almost_red_probability_estimate",
    "theory_thresholds",
]

EXACT_TAIL_MAX_N = 1_000_000


@dataclass(frozen=True)
class ConstantsConfig:
    """Tunable stand-ins for constants the asymptotic statements leave free.

    c_landslide: shrink factor numerator in the Blue collapse bound
        blue(t+1) <= (c_landslide / pn) * blue(t).
    c_threshold: multiplier in the winning-advantage threshold
        delta_min = c_threshold * p^(-3/2) * n^(-1/2) * log n.
    c_almost_red: multiplier in the almost-Red excess lower bound
        c_almost_red * D * sqrt(n/p).
    c_day2: multiplier in the day-2 advantage lower bound
        sum of day-2 labels >= 2 * c_day2 * delta * p * n.
    c_var: multiplier in the almost-Red count variance scale
        c_var * n * log^2(n) / p.
    exact_collision_cutoff: largest trial count for which the collision
        probability is computed by exact summation.
    gaussian_cdf_tolerance: documented absolute accuracy of gaussian_cdf.
    """

    c_landslide: float = 100.0
    c_threshold: float = 1.0
    c_almost_red: float = 0.01
    c_day2: float = 0.1
    c_var: float = 1.0
    exact_collision_cutoff: int = 1_000_000
    gaussian_cdf_tolerance: float = 1e-7

    def __post_init__(self):
        for name in ("c_landslide", "c_threshold", "c_almost_red", "c_day2", "c_var"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be nonnegative")
        if self.exact_collision_cutoff < 1:
            raise ParameterError("exact_collision_cutoff must be >= 1")
        if self.gaussian_cdf_tolerance <= 0:
            raise ParameterError("gaussian_cdf_tolerance must be positive")


DEFAULT_CONSTANTS = ConstantsConfig()


@dataclass(frozen=True)
class TailQuery:
    """A binomial tail question: Bin(n, p) against a threshold.

    For :func:`chernoff_tail` the threshold is the deviation eps from
    the mean rate, i.e. the queried tail is X >= (p + eps) n (upper) or
    X <= (p - eps) n (lower).
    """

    n: int
    p: float
    threshold: float
    side: str

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"n must be nonnegative, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")
        if self.side not in ("upper", "lower"):
            raise ParameterError(f"side must be 'upper' or 'lower', got {self.side!r}")


def kl_divergence(x: float, y: float) -> float:
    """KL divergence of Bernoulli(x) from Bernoulli(y), natural log.

    Endpoint x values use the continuity convention 0 log 0 = 0; a
    degenerate y with x != y has infinite divergence, reported as
    math.inf.
    """
    if not 0.0 <= x <= 1.0 or not 0.0 <= y <= 1.0:
        raise ParameterError(f"kl_divergence needs x, y in [0, 1], got {x}, {y}")
    if x == y:
        return 0.0
    if y <= 0.0 or y >= 1.0:
        return math.inf
    total = 0.0
    if x > 0.0:
        total += x * math.log(x / y)
    if x < 1.0:
        total += (1.0 - x) * math.log((1.0 - x) / (1.0 - y))
    return total


def chernoff_tail(query: TailQuery) -> float:
    """Chernoff bound exp(-n KL(p +- eps, p)) on the queried binomial tail.

    Degenerate deviations (eps <= 0, or past the support edge) return
    1.0, which is trivially a valid bound.
    """
    n, p, eps = query.n, query.p, query.threshold
    if n == 0 or eps <= 0.0:
        return 1.0
    if query.side == "upper":
        if eps >= 1.0 - p:
            return 1.0
        return math.exp(-n * kl_divergence(p + eps, p))
    if eps >= p:
        return 1.0
    return math.exp(-n * kl_divergence(p - eps, p))


def window_bound(n: int, p: float, t: float) -> float:
    """Guaranteed lower bound on P(|X - pn| <= t sqrt(pn)) for X ~ Bin(n, p):

        1 - 2 exp(-t^2 / (2 (1 + t / (3 sqrt(pn))))).
    """
    pn = p * n
    if pn <= 0:
        raise ParameterError(f"window_bound needs pn > 0, got p={p}, n={n}")
    if t <= 0:
        raise ParameterError(f"window_bound needs t > 0, got {t}")
    return 1.0 - 2.0 * math.exp(-t * t / (2.0 * (1.0 + t / (3.0 * math.sqrt(pn)))))


def poisson_tail_bound(n: int, p: float, t: float) -> float:
    """Upper bound 2 (e pn / t)^t on P(X > t) for X ~ Bin(n, p), valid for t >= e pn."""
    pn = p * n
    if t < math.e * pn:
        raise ParameterError(
            f"poisson_tail_bound needs t >= e*p*n = {math.e * pn:.6g}, got {t}"
        )
    if pn == 0:
        return 2.0 if t == 0 else 0.0
    return 2.0 * math.exp(t * (1.0 + math.log(pn) - math.log(t)))


def exact_tail(n: int, p: float, t: float, side: str = "upper") -> float:
    """Exact binomial tail by probability mass summation (the oracle).

    upper: P(X >= t); lower: P(X <= t). Refuses n beyond
    EXACT_TAIL_MAX_N, where the O(n) summation stops being cheap.
    """
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    if n > EXACT_TAIL_MAX_N:
        raise ParameterError(f"exact_tail refuses n > {EXACT_TAIL_MAX_N}, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    if side == "upper":
        k = math.ceil(t)
        if k <= 0:
            return 1.0
        if k > n:
            return 0.0
        return float(binom.sf(k - 1, n, p))
    if side == "lower":
        k = math.floor(t)
        if k < 0:
            return 0.0
        if k >= n:
            return 1.0
        return float(binom.cdf(k, n, p))
    raise ParameterError(f"side must be 'upper' or 'lower', got {side!r}")


def gaussian_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class CollisionResult:
    """P(Z+ = Z-) for two i.i.d. Bin(m, p) copies, with the branch taken."""

    value: float
    method: str  # "exact" or "local_clt"
    m: int
    p: float


def collision_probability(m: int, p: float, constants: ConstantsConfig = DEFAULT_CONSTANTS) -> CollisionResult:
    """Collision probability of two i.i.d. Bin(m, p) variables.

    Exact log-space summation of squared masses up to the configured
    cutoff; beyond it the local-CLT surrogate 1 / (2 sqrt(pi p (1-p) m))
    is used and flagged in the result.
    """
    if m < 0:
        raise ParameterError(f"m must be nonnegative, got {m}")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    if m == 0 or p == 0.0 or p == 1.0:
        return CollisionResult(1.0, "exact", m, p)
    if m <= constants.exact_collision_cutoff:
        log_pmf = binom.logpmf(np.arange(m + 1), m, p)
        value = float(math.exp(logsumexp(2.0 * log_pmf)))
        return CollisionResult(value, "exact", m, p)
    value = 1.0 / (2.0 * math.sqrt(math.pi * p * (1.0 - p) * m))
    return CollisionResult(value, "local_clt", m, p)


def _ceil_tolerant(x: float) -> int:
    # absorbs float noise like 0.02 * 20000 = 400.00000000000006
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


@dataclass(frozen=True)
class AlmostRedEstimate:
    """Closed-form day-1 almost-Red probability estimate.

    ``value`` is Phi(D / (2 sqrt(pn)) + 2 sign P(Z+ = Z-) sqrt(pn))
    with Z ~ Bin(n/2 - ceil(pn), p). The Gaussian approximation carries
    an error on the scale of ``error_scale`` = 1/sqrt(pn), reported
    separately rather than folded into the value.
    """

    value: float
    error_scale: float
    argument: float
    collision: CollisionResult


def almost_red_probability_estimate(
    n: int,
    p: float,
    threshold: int,
    sign: int,
    constants: ConstantsConfig = DEFAULT_CONSTANTS,
) -> AlmostRedEstimate:
    """Estimate the probability that a vertex of the given starting color
    is threshold-almost-Red under a balanced coloring on G(n, p).

    ``sign`` is the vertex's own starting label (+1 Red, -1 Blue).
    """
    pn = p * n
    if pn <= 0:
        raise ParameterError(f"needs pn > 0, got p={p}, n={n}")
    if threshold < 0:
        raise ParameterError(f"threshold must be >= 0, got {threshold}")
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {sign}")
    m = n // 2 - _ceil_tolerant(pn)
    if m < 0:
        raise ParameterError(f"n/2 - ceil(pn) = {m} is negative; pn too large for n={n}")
    collision = collision_probability(m, p, constants)
    sqrt_pn = math.sqrt(pn)
    argument = threshold / (2.0 * sqrt_pn) + 2.0 * sign * collision.value * sqrt_pn
    return AlmostRedEstimate(
        value=gaussian_cdf(argument),
        error_scale=1.0 / sqrt_pn,
        argument=argument,
        collision=collision,
    )


@dataclass(frozen=True)
class TheoryThresholds:
    """Formula evaluations of the scaling laws with configured constants."""

    n: int
    p: float
    delta_min: float
    var_A_upper: float
    c_almost_red: float

    def expected_A_excess_lower(self, threshold: float) -> float:
        """Lower-bound scale for E|A| - n/2 at the given almost-Red slack."""
        return self.c_almost_red * threshold * math.sqrt(self.n / self.p)


def theory_thresholds(n: int, p: float, constants: ConstantsConfig = DEFAULT_CONSTANTS) -> TheoryThresholds:
    """Evaluate the threshold formulas at (n, p) with the configured constants.

    delta_min = c_threshold * p^(-3/2) * n^(-1/2) * log n
    var_A_upper = c_var * n * log^2(n) / p
    expected_A_excess_lower(D) = c_almost_red * D * sqrt(n/p)
    """
    if n < 3:
        raise ParameterError(f"needs n >= 3, got {n}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"needs 0 < p < 1, got {p}")
    log_n = math.log(n)
    return TheoryThresholds(
        n=n,
        p=p,
        delta_min=constants.c_threshold * p ** -1.5 * n ** -0.5 * log_n,
        var_A_upper=constants.c_var * n * log_n * log_n / p,
        c_almost_red=constants.c_almost_red,
    )
