"""The free-energy surrogate ``G(y)`` and its empirical counterpart.

    G(y)   = -y^2/2 + E_h log cosh(sqrt(beta) y + beta h)
    G_N(y) = -y^2/2 + (1/N) sum_i log cosh(sqrt(beta) y + beta h_i)

Both are finite sums over a discrete law (the field law, or the empirical
measure of a sample), so all derivatives are available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .model import FieldSample, FieldSpec

__all__ = [
    "MaximumRecord",
    "LandscapeReport",
    "NumericalError",
    "ClassificationError",
    "log_cosh",
    "log_cosh_deriv",
    "big_g",
    "big_g_deriv",
    "empirical_g",
    "empirical_g_deriv",
    "delta_n",
    "tail_radius",
    "empirical_tail_radius",
    "find_global_maxima",
    "classify_maximum",
]

MAX_DERIV_ORDER = 8
MAX_DEGENERACY = 4
GLOBAL_TIE_TOL = 1e-10
DEDUP_TOL = 1e-8
NEWTON_GTOL = 1e-12
NEWTON_MAXITER = 100


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class ClassificationError(NumericalError):
    """No degeneracy order up to the cap matches the derivative pattern."""


def log_cosh(x):
    """Overflow-safe ``log cosh x``."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


@lru_cache(maxsize=None)
def _tanh_poly(order: int) -> np.ndarray:
    # d^m/dx^m log cosh x = p_m(tanh x); p_1(t) = t and p_{m+1} = p_m'(t) (1 - t^2)
    coeffs = np.array([0.0, 1.0])
    for _ in range(order - 1):
        coeffs = P.polymul(P.polyder(coeffs), [1.0, 0.0, -1.0])
    return coeffs


def log_cosh_deriv(x, order: int):
    """``order``-th derivative of ``log cosh`` at ``x`` (``order >= 1``)."""
    if order == 0:
        return log_cosh(x)
    return P.polyval(np.tanh(x), _tanh_poly(order))


def _check_order(order: int, lo: int = 0, hi: int = MAX_DERIV_ORDER):
    if int(order) != order or not lo <= order <= hi:
        raise ValueError(f"derivative order must be an integer in [{lo}, {hi}], got {order!r}")


def _g_deriv(values, weights, beta: float, y, order: int):
    """Derivative of ``-y^2/2 + sum_v w_v log cosh(sqrt(beta) y + beta v)``."""
    y = np.asarray(y, dtype=float)
    sb = math.sqrt(beta)
    args = sb * y[..., None] + beta * np.asarray(values, dtype=float)
    total = log_cosh_deriv(args, order) @ np.asarray(weights, dtype=float)
    total = total * sb**order
    if order == 0:
        total = total - 0.5 * y * y
    elif order == 1:
        total = total - y
    elif order == 2:
        total = total - 1.0
    return total if total.ndim else float(total)


def big_g(spec: FieldSpec, beta: float, y):
    """``G(y)``; accepts scalar or array ``y``."""
    return _g_deriv(spec.values, spec.probs, beta, y, 0)


def big_g_deriv(spec: FieldSpec, beta: float, y, order: int):
    """Closed-form ``order``-th derivative of ``G`` (orders 1..8)."""
    _check_order(order, 1)
    return _g_deriv(spec.values, spec.probs, beta, y, order)


def empirical_g(h: FieldSample, beta: float, y):
    vals, freqs = h.empirical_measure()
    return _g_deriv(vals, freqs, beta, y, 0)


def empirical_g_deriv(h: FieldSample, beta: float, y, order: int):
    _check_order(order)
    vals, freqs = h.empirical_measure()
    return _g_deriv(vals, freqs, beta, y, order)


def delta_n(h: FieldSample, spec: FieldSpec, beta: float, y, order: int = 0):
    """``order``-th derivative of ``Delta_N = G_N - G`` (orders 0..2).

    The quadratic parts cancel, so this is computed as a single signed sum
    over the union of the empirical and the theoretical support.
    """
    _check_order(order, 0, 2)
    vals, freqs = h.empirical_measure()
    values = np.concatenate([vals, spec.values_array])
    weights = np.concatenate([freqs, -spec.probs_array])
    y = np.asarray(y, dtype=float)
    sb = math.sqrt(beta)
    args = sb * y[..., None] + beta * values
    out = (log_cosh_deriv(args, order) @ weights) * sb**order
    return out if out.ndim else float(out)


def _radius(beta: float, mean_abs: float) -> float:
    sb = math.sqrt(beta)
    return 1.0 + 2.0 * sb + 2.0 * math.sqrt(beta + math.log(2.0) + beta * mean_abs)


def tail_radius(spec: FieldSpec, beta: float) -> float:
    """Radius ``R`` beyond which ``G(y) <= -y^2/4``.

    For ``|y| >= R`` one has ``-y^2/2 + log 2 + sqrt(beta)|y| + beta E|h| <= -y^2/4``,
    and the left side bounds ``G`` from above.
    """
    return _radius(beta, spec.mean_abs())


def empirical_tail_radius(h: FieldSample, beta: float) -> float:
    """Same bound for ``G_N``, using the sample mean of ``|h_i|``."""
    return _radius(beta, float(np.mean(np.abs(h.values))))


@dataclass(frozen=True)
class MaximumRecord:
    location: float
    value: float
    degeneracy_n: int
    leading_derivative: float
    curvature_eta: float


@dataclass(frozen=True)
class LandscapeReport:
    maxima: tuple
    tail_radius: float
    scan_tolerance: float

    @property
    def locations(self) -> np.ndarray:
        return np.array([m.location for m in self.maxima])

    @property
    def n_maxima(self) -> int:
        return len(self.maxima)

    def __len__(self) -> int:
        return len(self.maxima)


def classify_maximum(spec: FieldSpec, beta: float, y0: float, tol_deg: float = 1e-7) -> tuple[int, float]:
    """Degeneracy order ``n`` of a critical point and ``G^(2n)(y0)``.

    ``n`` is the smallest integer with ``|G^(l)(y0)| <= tol_deg`` for
    ``l = 2..2n-1`` and ``G^(2n)(y0) < -tol_deg``.
    """
    g1 = big_g_deriv(spec, beta, y0, 1)
    if abs(g1) > 1e-10:
        raise ValueError(f"|G'(y0)| = {abs(g1):.3e} > 1e-10; y0 is not a critical point")
    for n in range(1, MAX_DEGENERACY + 1):
        lead = big_g_deriv(spec, beta, y0, 2 * n)
        if lead < -tol_deg:
            return n, float(lead)
        if abs(lead) > tol_deg:
            break
        if n < MAX_DEGENERACY and abs(big_g_deriv(spec, beta, y0, 2 * n + 1)) > tol_deg:
            break
    raise ClassificationError(
        f"no degeneracy order n <= {MAX_DEGENERACY} fits y0={y0!r} (beta={beta!r}, spec={spec.name})"
    )


def _refine_root(fun, dfun, a: float, b: float, fa: float, fb: float) -> float:
    """Safeguarded Newton for a root of ``fun`` bracketed by ``[a, b]``."""
    x = 0.5 * (a + b)
    for _ in range(NEWTON_MAXITER):
        fx = fun(x)
        # one decade below the acceptance threshold buys a Newton step of margin
        if abs(fx) <= 0.1 * NEWTON_GTOL:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        d = dfun(x)
        step_ok = d != 0
        if step_ok:
            xn = x - fx / d
            step_ok = a < xn < b
        x = xn if step_ok else 0.5 * (a + b)
        if b - a <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            if abs(fun(x)) <= NEWTON_GTOL:
                return x
            break
    raise NumericalError(f"Newton refinement of G' did not converge in bracket [{a!r}, {b!r}]")


def _critical_maxima(fun, dfun, grid: np.ndarray) -> list[float]:
    """Local maxima of a function from sign changes of its derivative ``fun`` on ``grid``."""
    d = fun(grid)
    found = []
    for i, x in enumerate(grid):
        if d[i] == 0.0:
            left = d[i - 1] if i > 0 else 1.0
            right = d[i + 1] if i + 1 < grid.size else -1.0
            if left >= 0 and right <= 0:
                found.append(float(x))
    for i in np.flatnonzero((d[:-1] > 0) & (d[1:] < 0)):
        found.append(_refine_root(fun, dfun, grid[i], grid[i + 1], d[i], d[i + 1]))
    return found


def scan_grid(radius: float) -> np.ndarray:
    """Uniform grid on ``[-radius, radius]``, symmetric and containing 0."""
    step = min(1e-3 * radius, 1e-2)
    half = int(math.ceil(radius / step))
    return np.arange(-half, half + 1) * step


def find_global_maxima(spec: FieldSpec, beta: float, tol: float = 1e-7) -> LandscapeReport:
    """Locate and classify every global maximum of ``G``.

    Scans ``[-R, R]`` (``R = tail_radius``) for down-crossings of ``G'``,
    Newton-refines them, and keeps the maximizers whose value ties the best
    one within ``1e-10``.  ``tol`` is the degeneracy tolerance passed to
    :func:`classify_maximum`.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    radius = tail_radius(spec, beta)
    grid = scan_grid(radius)

    def d1(y):
        return big_g_deriv(spec, beta, y, 1)

    def d2(y):
        return big_g_deriv(spec, beta, y, 2)

    candidates = sorted(_critical_maxima(d1, d2, grid))
    if not candidates:
        raise NumericalError("no maximum of G found on the scan grid")
    locs: list[float] = []
    for y in candidates:
        if not locs or y - locs[-1] > DEDUP_TOL:
            locs.append(y)
    values = np.array([big_g(spec, beta, y) for y in locs])
    best = values.max()
    maxima = []
    for y, v in zip(locs, values):
        if v < best - GLOBAL_TIE_TOL:
            continue
        n, lead = classify_maximum(spec, beta, y, tol)
        eta = -big_g_deriv(spec, beta, y, 2)
        maxima.append(MaximumRecord(float(y), float(v), n, lead, float(eta)))
    return LandscapeReport(tuple(maxima), radius, float(grid[1] - grid[0]))
