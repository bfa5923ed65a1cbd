"""Design of the 1-bit feedback threshold.

For d = 1 the expected selected-user metric has a closed-form minimizer.
For general d the expected-metric upper bound x + (d - x)(1 - c x^{d^2})^K
is minimized either exactly on a grid (numeric oracle), through the
Lambert W function after an exponential approximation of the outage factor,
or by the asymptotic form (A log K / (c K))^{1/d^2} that drops the
constant term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import golden

from .errors import LambertDomain, ShapeMismatch, TooFewUsers
from .grassmann import ManifoldParams
from .oia import expected_metric_one_bit, expected_metric_upper_bound

_BRANCH_POINT = -1.0 / math.e


@dataclass(frozen=True)
class ThresholdSpec:
    """A designed threshold with its provenance.

    x is the threshold value, method one of closed_form_d1 / lambert /
    asymptotic / numeric, aux carries method internals (alpha, y, A, B)
    for the general-d methods.
    """

    x: float
    method: str
    K: int
    params: ManifoldParams
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        x_max = self.params.x_max
        if not 0.0 < self.x <= x_max + 1e-12:
            raise ShapeMismatch(f"threshold {self.x} outside (0, {x_max:.6g}]")
        if self.method in ("lambert", "asymptotic"):
            y = self.params.c * self.x**self.params.exponent
            if not 0.0 < y < 1.0:
                raise TooFewUsers(f"method {self.method} gave y={y:.6g} outside (0, 1)")


def optimal_threshold_d1(K: int) -> ThresholdSpec:
    """Exact optimal threshold for d = 1: x = 1 - (1/K)^(1/(K-1)).

    K = 1 returns the continuity limit 1 - 1/e; selection is forced anyway.
    """
    if K < 1:
        raise TooFewUsers("K must be at least 1")
    if K == 1:
        x = 1.0 - math.exp(-1.0)
    else:
        x = 1.0 - (1.0 / K) ** (1.0 / (K - 1))
    return ThresholdSpec(x=x, method="closed_form_d1", K=K,
                         params=ManifoldParams(2, 1))


def min_expected_metric_d1(K: int) -> float:
    """Minimum expected selected metric for d = 1 at the optimal threshold:
    (1/2)(1/K)^(K/(K-1)) - (1/2)(1/K)^(1/(K-1)) + 1/2."""
    if K < 2:
        raise TooFewUsers("closed form requires K >= 2")
    m = 1.0 / K
    return 0.5 * m ** (K / (K - 1)) - 0.5 * m ** (1.0 / (K - 1)) + 0.5


def lambert_w(branch: int, z: float) -> float:
    """Real Lambert W: the w solving w e^w = z on the requested branch.

    Branch 0 is defined for z >= -1/e and returns w >= -1; branch -1 for
    -1/e <= z < 0 and returns w <= -1. Halley iteration from an asymptotic
    or branch-point initial guess, with a bisection fallback; residual
    |w e^w - z| <= 1e-12 max(1, |z|).
    """
    if branch not in (0, -1):
        raise LambertDomain("branch must be 0 or -1")
    if z < _BRANCH_POINT - 1e-14:
        raise LambertDomain(f"z={z} below the branch point -1/e")
    if branch == -1 and z >= 0.0:
        raise LambertDomain("branch -1 requires z < 0")
    z = max(z, _BRANCH_POINT)
    if z == _BRANCH_POINT:
        return -1.0
    if z == 0.0:
        return 0.0

    w = _lambert_initial(branch, z)
    tol = 1e-12 * max(1.0, abs(z))
    for _ in range(100):
        if w == -1.0:
            w = -1.0 + 1e-12 if branch == 0 else -1.0 - 1e-12
        ew = math.exp(w)
        f = w * ew - z
        if abs(f) <= 0.25 * tol:
            return w
        # Halley step on f(w) = w e^w - z
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denom == 0.0:
            break
        step = f / denom
        w_new = w - step
        if branch == 0 and w_new < -1.0:
            w_new = -1.0 + 0.5 * (w + 1.0)
        if branch == -1 and w_new > -1.0:
            w_new = -1.0 - 0.5 * abs(w + 1.0)
        if w_new == w:
            break
        w = w_new
    if abs(w * math.exp(w) - z) <= tol:
        return w
    return _lambert_bisect(branch, z, tol)


def _lambert_initial(branch: int, z: float) -> float:
    if branch == 0:
        if z > math.e:
            l1 = math.log(z)
            l2 = math.log(l1)
            return l1 - l2 + l2 / l1
        if z > -0.25:
            return z / (1.0 + z) if z > -0.5 else z
        p = math.sqrt(2.0 * (math.e * z + 1.0))
        return -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
    if z < -0.25:
        p = math.sqrt(2.0 * (math.e * z + 1.0))
        return -1.0 - p - p * p / 3.0 - 11.0 * p**3 / 72.0
    # z in [-0.25, 0): w ~ log(-z) - log(-log(-z))
    l = math.log(-z)
    return l - math.log(-l)


def _lambert_bisect(branch: int, z: float, tol: float) -> float:
    f = lambda w: w * math.exp(w) - z
    if branch == 0:
        lo, hi = -1.0, 1.0
        while f(hi) < 0.0:
            hi *= 2.0
    else:
        hi = -1.0
        lo = -2.0
        while f(lo) < 0.0:
            lo *= 2.0
        lo, hi = lo, hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= tol:
            return mid
        rising = f(hi) > f(lo)
        if (fm > 0.0) == rising:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _require_full_dof_setup(p: ManifoldParams):
    if p.n != 2 * p.d:
        raise ShapeMismatch("threshold formulas assume nr = 2d (exponent d^2)")


def threshold_lambert(K: int, p: ManifoldParams) -> ThresholdSpec:
    """Threshold from the Lambert W_{-1} stationary point of the
    exponential-approximation objective (y/c)^(1/d^2) + d e^{-K y}.

    For d = 1 the stationary point is y = log(K)/K directly. Raises
    TooFewUsers when K is below the validity range of the method.
    """
    _require_full_dof_setup(p)
    if K < 1:
        raise TooFewUsers("K must be at least 1")
    d = p.d
    dsq = d * d
    alpha = 1.0 / dsq - 1.0
    if d == 1:
        y = math.log(K) / K if K > 1 else 0.0
        aux = {"alpha": alpha, "y": y}
    else:
        arg = K * p.c * (d**3 * K) ** (1.0 / alpha) / alpha
        if not _BRANCH_POINT <= arg < 0.0:
            raise TooFewUsers(f"Lambert argument {arg:.6g} outside [-1/e, 0)")
        w = lambert_w(-1, arg)
        y = alpha / K * w
        aux = {"alpha": alpha, "y": y, "w_arg": arg, "w": w}
    if not 0.0 < y < 1.0:
        raise TooFewUsers(f"stationary point y={y:.6g} outside (0, 1)")
    x = (y / p.c) ** (1.0 / dsq)
    return ThresholdSpec(x=x, method="lambert", K=K, params=p, aux=aux)


def threshold_asymptotic(K: int, p: ManifoldParams, B: float = 0.0) -> ThresholdSpec:
    """Asymptotic threshold x = ((A log K + B)/(c K))^(1/d^2) with
    A = 1/d^2 and the constant B defaulting to 0 (it does not affect the
    achieved degrees of freedom)."""
    _require_full_dof_setup(p)
    if K < 2:
        raise TooFewUsers("asymptotic form requires K >= 2")
    dsq = p.d * p.d
    A = 1.0 / dsq
    y = (A * math.log(K) + B) / K
    if not 0.0 < y < 1.0:
        raise TooFewUsers(f"asymptotic y={y:.6g} outside (0, 1)")
    x = (y / p.c) ** (1.0 / dsq)
    return ThresholdSpec(x=x, method="asymptotic", K=K, params=p,
                         aux={"A": A, "B": B, "y": y})


def threshold_numeric(K: int, p: ManifoldParams, objective: str = "auto") -> ThresholdSpec:
    """Grid-plus-golden-section minimizer of the expected selected metric.

    objective "exact" minimizes expected_metric_one_bit, "bound" the
    closed-form upper bound; "auto" picks exact for d = 1 (where the
    conditional means are closed-form) and bound otherwise.
    """
    if K < 1:
        raise TooFewUsers("K must be at least 1")
    if objective == "auto":
        objective = "exact" if p.d == 1 else "bound"
    if objective == "exact":
        fun = lambda x: expected_metric_one_bit(x, K, p)
    elif objective == "bound":
        fun = lambda x: expected_metric_upper_bound(x, K, p)
    else:
        raise ShapeMismatch(f"unknown objective {objective!r}")
    x_max = p.x_max
    grid = np.logspace(np.log10(x_max) - 9.0, np.log10(x_max), 10000)
    vals = np.array([fun(x) for x in grid])
    i = int(np.argmin(vals))
    x_star = float(grid[i])
    if 0 < i < len(grid) - 1:
        try:
            x_star = float(golden(fun, brack=(grid[i - 1], grid[i], grid[i + 1]),
                                  tol=1e-8))
        except ValueError:
            # flat bracket; the grid point is already within tolerance
            pass
    return ThresholdSpec(x=x_star, method="numeric", K=K, params=p,
                         aux={"objective": objective})
