# Copyright 2025 Beacon, shrwnsan
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Concentration bounds and tail-error sums.

All logarithms are natural. Probability bounds are clipped to [0, 1]. The
``*_exponent`` helpers return the log of a bound, for depths where the bound
itself underflows.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from beliefsearch.exceptions import DomainError, ValidationError


@dataclass(frozen=True)
class TailCurve:
    """Points ``(x, bound)`` of a tail bound, sorted by ``x``."""

    k0: int
    points: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        xs = [x for x, _ in self.points]
        if xs != sorted(xs):
            msg = "Tail curve points must be sorted by abscissa"
            raise ValidationError(msg, field="points")
        if any(not 0.0 <= p <= 1.0 for _, p in self.points):
            msg = "Tail curve values must be probabilities"
            raise ValidationError(msg, field="points")

    def at(self, x: int) -> float:
        for point, value in self.points:
            if point == x:
                return value
        msg = f"No point at {x}"
        raise ValidationError(msg, field="x", value=x)


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 1.0:
        msg = f"gamma must lie in (0, 1), got {gamma}"
        raise DomainError(msg, field="gamma", value=gamma)


def _check_positive(name: str, value: float) -> None:
    if not value > 0:
        msg = f"{name} must be positive, got {value}"
        raise DomainError(msg, field=name, value=value)


def hoeffding(n: int, h: float, eps: float) -> float:
    """``exp(-2 n eps^2 / h^2)`` for the mean of ``n`` variables of range ``h``."""
    if n < 1:
        msg = f"n must be at least 1, got {n}"
        raise DomainError(msg, field="n", value=n)
    _check_positive("h", h)
    if eps < 0:
        msg = f"eps must be non-negative, got {eps}"
        raise DomainError(msg, field="eps", value=eps)
    return math.exp(-2.0 * n * eps**2 / h**2)


def effective_sample_size(weights: Sequence[float] | np.ndarray) -> float:
    """``1 / sum_i w_i^2`` of normalized weights."""
    w = _normalized(weights)
    return 1.0 / float(np.sum(w**2))


def _normalized(weights: Sequence[float] | np.ndarray) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w <= 0):
        msg = "Weights must be a non-empty vector of positive numbers"
        raise ValidationError(msg, field="weights")
    if abs(float(w.sum()) - 1.0) > 1e-9:
        msg = f"Weights must sum to 1, got {w.sum():.12f}"
        raise ValidationError(msg, field="weights", value=float(w.sum()))
    return w


def weighted_hoeffding(weights: Sequence[float] | np.ndarray, h: float, eps: float) -> float:
    """``exp(-2 eps^2 / (h^2 sum_i w_i^2))`` for a weighted average.

    Equals :func:`hoeffding` at ``n = 1 / sum_i w_i^2``; uniform weights give
    the unweighted bound.
    """
    w = _normalized(weights)
    _check_positive("h", h)
    if eps < 0:
        msg = f"eps must be non-negative, got {eps}"
        raise DomainError(msg, field="eps", value=eps)
    return math.exp(-2.0 * eps**2 / (h**2 * float(np.sum(w**2))))


def expected_leaf_samples(beta: float, delta: float) -> float:
    """Bound ``1 + beta^2 / delta^2`` on the expected samples spent at a leaf
    whose value is ``delta`` away from the decision threshold."""
    _check_positive("beta", beta)
    _check_positive("delta", delta)
    return 1.0 + beta**2 / delta**2


def leaf_sample_tail(beta: float, delta: float, n: int) -> float:
    """``Pr[N > n] <= exp(-2 n^2 delta^2 / beta^2)``."""
    _check_positive("beta", beta)
    _check_positive("delta", delta)
    if n < 0:
        msg = f"n must be non-negative, got {n}"
        raise DomainError(msg, field="n", value=n)
    return math.exp(-2.0 * n**2 * delta**2 / beta**2)


def leaf_sample_hoeffding_tail(beta: float, delta: float, n: int) -> float:
    """``Pr[N > n] <= exp(-2 n delta^2 / beta^2)``.

    Hoeffding's inequality for the mean of the first ``n`` draws, valid for
    every distribution on ``[0, beta]``. The quadratic exponent of
    :func:`leaf_sample_tail` is exceeded by the running mean of uniform or
    two-point draws once ``n`` reaches about ``2 beta / delta``.
    """
    _check_positive("beta", beta)
    _check_positive("delta", delta)
    if n < 0:
        msg = f"n must be non-negative, got {n}"
        raise DomainError(msg, field="n", value=n)
    return math.exp(-2.0 * n * delta**2 / beta**2)


def depth_threshold(beta: float, delta: float, gamma: float) -> int:
    """``k0 = ceil(log_gamma(delta / beta))``: a branch ``delta`` below the
    best cannot be rejected before this depth."""
    _check_gamma(gamma)
    _check_positive("beta", beta)
    if not 0 < delta < beta:
        msg = f"delta must lie in (0, beta), got {delta}"
        raise DomainError(msg, field="delta", value=delta)
    return max(0, math.ceil(math.log(delta / beta) / math.log(gamma) - 1e-9))


def sbb1_depth_tail(beta: float, delta: float, gamma: float, k: int) -> float:
    """Tail ``Pr(K > k)`` of the depth reached in a suboptimal branch by SBB1.

    1 up to ``k0``, then ``exp(-2 (k - k0) delta^2 / beta^2)``; only the
    dominant term is kept.
    """
    k0 = depth_threshold(beta, delta, gamma)
    if k <= k0:
        return 1.0
    return math.exp(-2.0 * (k - k0) * delta**2 / beta**2)


def sbb1_tail_refined_exponent(beta: float, delta: float, gamma: float, k: int) -> float:
    """Log of the product bound ``prod_{j=k0..k} exp(-2 (delta - beta gamma^j)^2 / beta^2)``.

    Keeps the ``beta * gamma^j`` corrections that :func:`sbb1_depth_tail`
    drops. Returns 0 for ``k < k0``.
    """
    k0 = depth_threshold(beta, delta, gamma)
    if k < k0:
        return 0.0
    j = np.arange(k0, k + 1)
    margins = np.clip(delta - beta * gamma**j, 0.0, None)
    return float(-2.0 * np.sum(margins**2) / beta**2)


def sbb2_tail_exponent(gamma: float, k: int, k0: int) -> float:
    """Log of :func:`sbb2_depth_tail`; 0 in the transient regime."""
    _check_gamma(gamma)
    if k0 < 0:
        msg = f"k0 must be non-negative, got {k0}"
        raise DomainError(msg, field="k0", value=k0)
    gap = k - k0
    if gap <= 0:
        return 0.0
    factor = 1.0 - (1.0 - gamma ** (k + 1)) / (gap * (1.0 - gamma))
    if factor <= 0:
        return 0.0
    return -2.0 * gap**2 * (1.0 - gamma**2) * factor**2 / (1.0 - gamma ** (2 * (k + 1)))


def sbb2_depth_tail(gamma: float, k: int, k0: int) -> float:
    """Tail ``Pr(K > k)`` for SBB2, which averages samples over half the depth.

    ``exp(-2 (k - k0)^2 (1 - gamma^2) f^2 / (1 - gamma^(2(k+1))))`` with
    ``f = 1 - (1 - gamma^(k+1)) / ((k - k0)(1 - gamma))``; 1 while ``f <= 0``.
    Tends to ``exp(-2 (k - k0)^2 (1 - gamma^2))``.
    """
    return math.exp(sbb2_tail_exponent(gamma, k, k0))


def sbb1_depth_curve(beta: float, delta: float, gamma: float, ks: Iterable[int]) -> TailCurve:
    k0 = depth_threshold(beta, delta, gamma)
    return TailCurve(k0, tuple((k, sbb1_depth_tail(beta, delta, gamma, k)) for k in sorted(ks)))


def sbb2_depth_curve(gamma: float, ks: Iterable[int], k0: int) -> TailCurve:
    return TailCurve(k0, tuple((k, sbb2_depth_tail(gamma, k, k0)) for k in sorted(ks)))


def tail_error(gamma: float, k: int) -> tuple[float, float]:
    """Truncation error of a depth-``k`` search.

    Returns:
        ``(naive, smooth)``: ``gamma^k / (1 - gamma)`` and the sum
        ``sum_{n>=k} gamma^n (n - k) / n``, which accounts for beliefs that
        barely move after ``k`` observations
    """
    _check_gamma(gamma)
    if k < 1:
        msg = f"k must be at least 1, got {k}"
        raise DomainError(msg, field="k", value=k)
    naive = gamma**k / (1.0 - gamma)
    # Stop once the remainder gamma^n / (1 - gamma) drops below 1e-12
    stop = math.ceil(math.log(1e-12 * (1.0 - gamma)) / math.log(gamma))
    n = np.arange(k, max(stop, k) + 1, dtype=float)
    smooth = float(np.sum(gamma**n * (n - k) / n))
    return naive, smooth


def undiscounted_tail_error(horizon: int, k: int) -> tuple[float, float]:
    """``(T - k, T - k (1 + ln(T / k)))`` for a finite horizon ``T``."""
    if not 1 <= k <= horizon:
        msg = f"Need 1 <= k <= T, got k={k}, T={horizon}"
        raise DomainError(msg, field="k", value=k)
    naive = float(horizon - k)
    smooth = horizon - k * (1.0 + math.log(horizon / k))
    return naive, float(smooth)


def _upper_quantile_level(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        msg = f"Confidence must lie in (0, 1), got {confidence}"
        raise DomainError(msg, field="confidence", value=confidence)
    return 1.0 - (1.0 - confidence) / 2.0


def _z_score(confidence: float) -> float:
    return float(stats.norm.ppf(_upper_quantile_level(confidence)))


def proportion_interval(
    successes: int, trials: int, confidence: float = 0.99
) -> tuple[float, float]:
    """Two-sided Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        msg = f"Need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}"
        raise ValidationError(msg, field="trials", value=trials)
    z = _z_score(confidence)
    p = successes / trials
    denominator = 1.0 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denominator
    half = z * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2)) / denominator
    return max(0.0, center - half), min(1.0, center + half)


def mean_interval(
    samples: Sequence[float] | np.ndarray, confidence: float = 0.99
) -> tuple[float, float]:
    """Student-t interval for a sample mean."""
    values = np.asarray(samples, dtype=float)
    if values.size < 2:
        msg = "Need at least two samples for a mean interval"
        raise ValidationError(msg, field="samples", value=values.size)
    t = float(stats.t.ppf(_upper_quantile_level(confidence), values.size - 1))
    mean = float(values.mean())
    half = t * float(values.std(ddof=1)) / math.sqrt(values.size)
    return mean - half, mean + half
