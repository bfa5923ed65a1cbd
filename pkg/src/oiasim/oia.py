"""User selection protocols and their analytic performance functionals.

Conventional opportunistic selection feeds back the real-valued metric and
the transmitter picks the argmin. The 1-bit protocol compares each user's
metric against a threshold x, collects one bit per user, serves a uniformly
random eligible user, and falls back to a uniformly random user when nobody
is eligible (a scheduling outage).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ShapeMismatch
from .grassmann import ManifoldParams, metric_cdf


@dataclass(frozen=True)
class SelectionOutcome:
    """Result of one 1-bit selection round in one cell."""

    selected: int
    outage: bool
    eligible_count: int
    feedback_bits: np.ndarray

    def __post_init__(self):
        if self.eligible_count != int(np.count_nonzero(self.feedback_bits)):
            raise ShapeMismatch("eligible_count inconsistent with feedback bits")
        if (self.eligible_count == 0) != self.outage:
            raise ShapeMismatch("outage flag inconsistent with eligible count")
        if not self.outage and not self.feedback_bits[self.selected]:
            raise ShapeMismatch("selected user did not report '1'")


def select_conventional(metrics: np.ndarray) -> int:
    """Index of the minimal metric; ties go to the lowest index."""
    metrics = np.asarray(metrics)
    if metrics.size < 1:
        raise ShapeMismatch("need at least one user")
    return int(np.argmin(metrics))


def select_one_bit(metrics: np.ndarray, x: float, rng: np.random.Generator) -> SelectionOutcome:
    """Threshold-based 1-bit selection.

    Users whose metric is below x report '1'; the serving transmitter picks
    uniformly among the '1' reporters, or uniformly among all K users on a
    scheduling outage.
    """
    metrics = np.asarray(metrics)
    if metrics.size < 1:
        raise ShapeMismatch("need at least one user")
    bits = metrics < x
    eligible = np.flatnonzero(bits)
    if eligible.size:
        selected = int(eligible[rng.integers(eligible.size)])
        outage = False
    else:
        selected = int(rng.integers(metrics.size))
        outage = True
    return SelectionOutcome(selected=selected, outage=outage,
                            eligible_count=int(eligible.size), feedback_bits=bits)


def outage_probability(x: float, K: int, p: ManifoldParams) -> float:
    """Probability that all K users exceed the threshold, (1 - F(x))^K."""
    return (1.0 - metric_cdf(x, p)) ** K


def expected_metric_one_bit(x: float, K: int, p: ManifoldParams) -> float:
    """Expected selected-user metric of the 1-bit protocol at threshold x.

    (1 - P_out) E[D | D < x] + P_out E[D | D >= x] under the model density
    f(t) = c D t^(D-1) on [0, x_max]. Closed form for d = 1 where the
    metric is uniform; adaptive quadrature on the truncated densities for
    d > 1.
    """
    x_max = p.x_max
    if not 0.0 < x <= x_max + 1e-12:
        raise ShapeMismatch(f"threshold must lie in (0, {x_max:.6g}]")
    x = min(x, x_max)
    F = metric_cdf(x, p)
    p_out = (1.0 - F) ** K
    if p.d == 1:
        D = p.exponent
        mean_low = D * x / (D + 1)
        if p_out > 0.0:
            mean_high = (p.c * D / (D + 1)) * (x_max ** (D + 1) - x ** (D + 1)) / (1.0 - F)
        else:
            mean_high = x
    else:
        def weighted(t):
            return t * p.c * p.exponent * t ** (p.exponent - 1)

        low, _ = quad(weighted, 0.0, x, epsrel=1e-8)
        mean_low = low / F if F > 0.0 else 0.0
        if p_out > 0.0 and x < x_max:
            high, _ = quad(weighted, x, x_max, epsrel=1e-8)
            mean_high = high / (1.0 - F)
        else:
            mean_high = x
    return (1.0 - p_out) * mean_low + p_out * mean_high


def expected_metric_upper_bound(x: float, K: int, p: ManifoldParams) -> float:
    """Upper bound x + (d - x)(1 - F(x))^K on the expected selected metric,
    obtained by pushing both conditional means to their upper limits."""
    if x <= 0.0:
        return float(p.d)
    return x + (p.d - x) * (1.0 - metric_cdf(x, p)) ** K


def expected_eligible(x: float, K: int, p: ManifoldParams) -> float:
    """Average number of users reporting '1', K * F(x)."""
    if K < 1:
        raise ShapeMismatch("K must be at least 1")
    return K * metric_cdf(x, p)
