"""Phase diagram of the model with a dichotomous field ``h = +-hf``.

The critical line ``beta = f(hf)`` has two segments that meet at the
tricritical point ``hf* = (2/3) arcosh(sqrt(3/2))``, ``beta* = 3/2``:

* for ``hf <= hf*`` it is where ``y = 0`` loses stability,
  ``G''(0) = -1 + beta sech^2(beta hf) = 0`` (second order);
* for ``hf* < hf < 1/2`` it is where a symmetric pair of maxima first ties
  with the maximum at 0 (first order).

For ``hf >= 1/2`` the maximum at 0 is unique at every temperature.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from .landscape import _critical_maxima, big_g, big_g_deriv, find_global_maxima, scan_grid, tail_radius
from .model import dichotomous

__all__ = [
    "Regime",
    "RegimeLabel",
    "CriticalPoint",
    "PhaseDomainError",
    "H_STAR",
    "BETA_STAR",
    "second_order_beta",
    "first_order_beta",
    "tie_gap",
    "critical_beta",
    "critical_point",
    "tricritical_point",
    "classify_regime",
    "critical_line",
]

H_STAR = (2.0 / 3.0) * math.acosh(math.sqrt(1.5))
BETA_STAR = 1.5
TIE_WINDOW = 1e-4
ONLINE_TOL = 1e-9


class PhaseDomainError(ValueError):
    """Requested field strength lies outside the segment being traced."""


class Regime(str, enum.Enum):
    PARA_UNIQUE = "ParaUnique"
    SECOND_ORDER_CRITICAL = "SecondOrderCritical"
    FIRST_ORDER_TRIPLE = "FirstOrderTriple"
    FERRO_PAIR = "FerroPair"
    HIGH_FIELD_UNIQUE = "HighFieldUnique"


@dataclass(frozen=True)
class RegimeLabel:
    case: Regime
    degeneracy_n: int
    n_maxima: int


@dataclass(frozen=True)
class CriticalPoint:
    h_field: float
    beta_crit: float
    order: str


def _bisect(fun, lo: float, hi: float, tol: float, maxiter: int = 200) -> float:
    """Bisection for a sign change of ``fun`` on ``[lo, hi]`` (``fun(lo) < 0 < fun(hi)``)."""
    for _ in range(maxiter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if fun(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def second_order_beta(h_field: float) -> float:
    """Smallest ``beta`` in ``[1, 10]`` with ``beta sech^2(beta hf) = 1``."""
    if not 0 <= h_field <= H_STAR + 1e-12:
        raise PhaseDomainError(f"second-order segment needs 0 <= hf <= {H_STAR:.7f}, got {h_field!r}")
    if h_field == 0:
        return 1.0

    # stability margin of y = 0: beta sech^2(beta hf) - 1, positive means unstable
    def margin(b):
        return b / math.cosh(b * h_field) ** 2 - 1.0

    # the margin rises from < 0 at beta = 1, peaks, then falls; bracket the first crossing
    grid = np.linspace(1.0, 10.0, 9001)
    vals = np.array([margin(b) for b in grid])
    up = np.flatnonzero(vals >= 0)
    if vals[0] >= 0 or up.size == 0:
        raise PhaseDomainError(f"no root of beta sech^2(beta hf) = 1 in [1, 10] for hf={h_field!r}")
    i = up[0]
    return _bisect(margin, grid[i - 1], grid[i], 1e-13)


def tie_gap(beta: float, h_field: float, window: float = TIE_WINDOW) -> float:
    """``max_{y >= window} G(y) - G(0)`` for the dichotomous law.

    The maximum over ``[window, R]`` is attained either at ``window`` or at a
    Newton-refined critical point, so the gap is exact to rounding.
    """
    spec = dichotomous(h_field)
    grid = scan_grid(tail_radius(spec, beta))
    grid = np.concatenate([[window], grid[grid > window]])

    def d1(y):
        return big_g_deriv(spec, beta, y, 1)

    def d2(y):
        return big_g_deriv(spec, beta, y, 2)

    candidates = [window] + _critical_maxima(d1, d2, grid)
    return float(max(big_g(spec, beta, y) for y in candidates) - big_g(spec, beta, 0.0))


def first_order_beta(h_field: float, beta_max: float = 200.0, tol: float = 1e-10) -> float:
    """``beta`` at which the symmetric pair first ties with the maximum at 0."""
    if not H_STAR < h_field < 0.5:
        raise PhaseDomainError(f"first-order segment needs {H_STAR:.7f} < hf < 1/2, got {h_field!r}")
    lo, hi = BETA_STAR, float(beta_max)
    if not (tie_gap(lo, h_field) < 0 < tie_gap(hi, h_field)):
        raise PhaseDomainError(f"tie condition not bracketed in [{lo}, {hi}] for hf={h_field!r}")
    return _bisect(lambda b: tie_gap(b, h_field), lo, hi, tol)


def critical_beta(h_field: float, beta_max: float = 200.0) -> float:
    """``f(hf)`` on either segment (undefined for ``hf >= 1/2``)."""
    if h_field <= H_STAR:
        return second_order_beta(h_field)
    return first_order_beta(h_field, beta_max)


def critical_point(h_field: float, beta_max: float = 200.0) -> CriticalPoint:
    order = "second" if h_field <= H_STAR else "first"
    return CriticalPoint(float(h_field), critical_beta(h_field, beta_max), order)


def tricritical_point() -> tuple[float, float]:
    return H_STAR, second_order_beta(H_STAR)


def classify_regime(beta: float, h_field: float) -> RegimeLabel:
    """Phase of ``(beta, hf)``.

    Points within ``1e-9`` of the critical line are classified on the line,
    with the landscape evaluated exactly at ``beta = f(hf)``.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0")
    if h_field < 0:
        raise ValueError("h_field must be >= 0")
    if h_field >= 0.5:
        report = find_global_maxima(dichotomous(h_field), beta)
        return RegimeLabel(Regime.HIGH_FIELD_UNIQUE, report.maxima[0].degeneracy_n, report.n_maxima)
    f = critical_beta(h_field, beta_max=max(200.0, 2.0 * beta))
    if abs(beta - f) <= ONLINE_TOL:
        if h_field <= H_STAR:
            report = find_global_maxima(dichotomous(h_field), f)
            return RegimeLabel(Regime.SECOND_ORDER_CRITICAL, report.maxima[0].degeneracy_n, report.n_maxima)
        return RegimeLabel(Regime.FIRST_ORDER_TRIPLE, 1, 3)
    report = find_global_maxima(dichotomous(h_field), beta)
    if beta < f:
        return RegimeLabel(Regime.PARA_UNIQUE, report.maxima[0].degeneracy_n, report.n_maxima)
    return RegimeLabel(Regime.FERRO_PAIR, max(m.degeneracy_n for m in report.maxima), report.n_maxima)


def critical_line(h_max: float = 0.49, steps: int = 50) -> list[CriticalPoint]:
    """``f`` on a uniform grid of ``steps`` points in ``[0, h_max]``."""
    if not 0 <= h_max < 0.5:
        raise PhaseDomainError("h_max must be in [0, 1/2)")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    hs = np.linspace(0.0, h_max, steps) if steps > 1 else np.array([h_max])
    return [critical_point(float(hf)) for hf in hs]
