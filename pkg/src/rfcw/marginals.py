"""Exact finite-N Gibbs marginals through the Hubbard-Stratonovich integral.

For a field sample ``h_1..h_N``,

    Z_N = 2^N sqrt(N / 2 pi) int exp(N G_N(y)) dy

and the marginal of the first ``k`` spins is the ratio

    mu_{N,k}(s) = int exp(N G_N(y)) g_s(y) dy / int exp(N G_N(y)) dy,
    g_s(y) = prod_{i<=k} exp(s_i a_i(y)) / (2 cosh a_i(y)),  a_i(y) = sqrt(beta) y + beta h_i.

Both integrals share one adaptive Gauss-Legendre grid, so every common
factor cancels exactly.  Since ``sum_s g_s(y) = 1`` pointwise, the shared grid
also makes the table sum to one up to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .landscape import LandscapeReport, delta_n, empirical_tail_radius, NumericalError
from .model import (
    MAX_WORD_LENGTH,
    FieldSample,
    FieldSpec,
    MarginalTable,
    ModelParams,
    product_marginal,
    spin_words,
)
from .quadrature import GaussPanels, QuadratureError, adaptive_panels, panel_nodes

__all__ = [
    "QuadratureSpec",
    "LogIntegralResult",
    "default_quadrature",
    "hs_panels",
    "log_integral",
    "log_partition",
    "marginal_quadrature",
    "y_sampler",
    "exact_sample",
    "select_j_index",
    "predicted_product",
]

SAMPLER_TV_TOL = 1e-6
RENORM_TOL = 1e-8
J_TIE_TOL = 1e-14


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration domain ``[-radius, radius]`` and refinement controls."""

    radius: float
    rel_tol: float = 1e-12
    max_refinements: int = 30

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be > 0")
        if not 0 < self.rel_tol <= 1e-6:
            raise ValueError(f"rel_tol must be in (0, 1e-6], got {self.rel_tol!r}")
        if not 0 <= self.max_refinements <= 30:
            raise ValueError(f"max_refinements must be in [0, 30], got {self.max_refinements!r}")


@dataclass(frozen=True)
class LogIntegralResult:
    log_value: float
    est_error: float


def default_quadrature(beta: float, h: FieldSample, rel_tol: float = 1e-12) -> QuadratureSpec:
    """A radius that makes the truncated tail negligible at ``rel_tol``.

    Beyond ``R_N = empirical_tail_radius`` one has ``G_N(y) <= -y^2/4``, so the
    two tails carry at most ``4 exp(-N R^2 / 4) / (N R)``.  Since
    ``log cosh >= 0``, the full integral is at least ``int exp(-N y^2/2) dy``,
    roughly ``sqrt(2 pi / N)``.  The radius is grown until the tail bound is
    ``1e-3 rel_tol`` of that.
    """
    n = len(h)
    radius = empirical_tail_radius(h, beta)
    floor = math.log(1e-3 * rel_tol) + 0.5 * math.log(2 * math.pi / n)
    while math.log(4.0 / (n * radius)) - n * radius * radius / 4 > floor:
        radius *= 1.1
    return QuadratureSpec(radius=radius, rel_tol=rel_tol)


def _check_inputs(params: ModelParams, h: FieldSample, quad: QuadratureSpec):
    if params.n_sites != len(h):
        raise ValueError(f"params.n_sites={params.n_sites} but field has {len(h)} sites")
    r_min = empirical_tail_radius(h, params.beta)
    if quad.radius < r_min:
        raise ValueError(f"quadrature radius {quad.radius:g} is below the tail radius {r_min:g}")


def _n_gn(params: ModelParams, h: FieldSample):
    """Vectorized ``y -> N G_N(y)`` using the empirical measure of ``h``."""
    vals, counts = np.unique(h.values, return_counts=True)
    counts = counts.astype(float)
    sb = math.sqrt(params.beta)
    beta, n = params.beta, params.n_sites

    def fun(y):
        a = np.abs(sb * y[:, None] + beta * vals)
        lc = a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)
        return lc @ counts - 0.5 * n * y * y

    return fun


def _site_log_probs(beta: float, y: np.ndarray, h_prefix: np.ndarray):
    """``log P(s_i = +1 | y)`` and ``log P(s_i = -1 | y)``, shape (k, len(y))."""
    a = math.sqrt(beta) * y[None, :] + beta * h_prefix[:, None]
    return -np.logaddexp(0.0, -2.0 * a), -np.logaddexp(0.0, 2.0 * a)


def hs_panels(params: ModelParams, h: FieldSample, quad: QuadratureSpec, k: int = 0) -> GaussPanels:
    """Adaptive grid for ``exp(N G_N(y))`` on ``[-radius, radius]``.

    With ``k > 0`` the all-plus and all-minus words on the first ``k`` sites
    (the most ``y``-sensitive numerators) must be resolved as well.
    """
    _check_inputs(params, h, quad)
    base = _n_gn(params, h)
    hp = h.values[:k]

    def logf(y):
        f = base(y)
        if k == 0:
            return f
        lp, lm = _site_log_probs(params.beta, y, hp)
        return np.vstack([f, f + lp.sum(axis=0), f + lm.sum(axis=0)])

    return adaptive_panels(
        logf,
        -quad.radius,
        quad.radius,
        quad.rel_tol,
        quad.max_refinements,
        initial_width=4.0 / math.sqrt(params.n_sites),
    )


def log_integral(params: ModelParams, h: FieldSample, quad: QuadratureSpec) -> LogIntegralResult:
    """``log int_{-R}^{R} exp(N G_N(y)) dy`` with its relative error estimate."""
    panels = hs_panels(params, h, quad)
    return LogIntegralResult(panels.log_integral, panels.est_error)


def log_partition(params: ModelParams, h: FieldSample, quad: QuadratureSpec | None = None) -> float:
    """``log Z_N = N log 2 + (1/2) log(N / 2 pi) + log int exp(N G_N)``."""
    if quad is None:
        quad = default_quadrature(params.beta, h)
    n = params.n_sites
    res = log_integral(params, h, quad)
    return n * math.log(2.0) + 0.5 * math.log(n / (2 * math.pi)) + res.log_value


def _log_word_integrals(panels: GaussPanels, beta: float, h_prefix: np.ndarray) -> np.ndarray:
    k = h_prefix.size
    lp, lm = _site_log_probs(beta, panels.nodes, h_prefix)
    base = panels.log_f + panels.log_weights
    # drop nodes that cannot contribute to any word (g <= 1)
    live = base - base.max() > -745.0
    lp, lm, base = lp[:, live], lm[:, live], base[live]
    out = np.empty(2**k)
    words = spin_words(k) == 1
    block = max(1, int(2e7 // max(base.size, 1)))
    for start in range(0, 2**k, block):
        plus = words[start:start + block].astype(float)
        log_g = plus @ lp + (1.0 - plus) @ lm
        out[start:start + block] = logsumexp(base + log_g, axis=1)
    return out


def marginal_quadrature(
    params: ModelParams, h: FieldSample, k: int, quad: QuadratureSpec | None = None
) -> MarginalTable:
    """Marginal ``mu_{N,k}`` of the first ``k`` spins, for any ``N``."""
    if not 1 <= k <= min(len(h), MAX_WORD_LENGTH):
        raise ValueError(f"need 1 <= k <= min(N, {MAX_WORD_LENGTH}), got k={k}, N={len(h)}")
    if quad is None:
        quad = default_quadrature(params.beta, h)
    panels = hs_panels(params, h, quad, k)
    log_num = _log_word_integrals(panels, params.beta, h.values[:k])
    probs = np.exp(log_num - panels.log_integral)
    total = probs.sum()
    if abs(total - 1.0) > RENORM_TOL:
        raise NumericalError(f"marginal table needed a renormalization of {abs(total - 1.0):.3e}")
    return MarginalTable(k, probs / total)


@dataclass(frozen=True)
class YSampler:
    """Piecewise-uniform (linear CDF) approximation of the ``y`` law on cells."""

    left: np.ndarray
    right: np.ndarray
    cdf: np.ndarray
    tv_error: float

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        cell = np.searchsorted(self.cdf, u, side="right") - 1
        cell = np.clip(cell, 0, self.left.size - 1)
        lo, hi = self.cdf[cell], self.cdf[cell + 1]
        frac = np.where(hi > lo, (u - lo) / np.where(hi > lo, hi - lo, 1.0), 0.5)
        return self.left[cell] + frac * (self.right[cell] - self.left[cell])


def y_sampler(params: ModelParams, h: FieldSample, quad: QuadratureSpec | None = None,
              tv_tol: float = SAMPLER_TV_TOL, max_rounds: int = 40) -> YSampler:
    """Tabulate the density ``proportional to exp(N G_N(y))`` for inverse-CDF sampling.

    Cells start as the quadrature panels and are bisected until the total
    variation between the true density and its cellwise-uniform version,
    estimated with the 15-point rule on each cell, is at most ``tv_tol``.
    """
    if quad is None:
        quad = default_quadrature(params.beta, h)
    panels = hs_panels(params, h, quad)
    fun = _n_gn(params, h)
    log_z = panels.log_integral
    left, right = panels.left, panels.right
    for _ in range(max_rounds):
        y, lw = panel_nodes(left, right)
        dens = np.exp(fun(y.ravel()).reshape(y.shape) - log_z)
        w = np.exp(lw)
        mass = (w * dens).sum(axis=1)
        width = right - left
        cell_err = 0.5 * (w * np.abs(dens - (mass / width)[:, None])).sum(axis=1)
        tv = cell_err.sum()
        if tv <= tv_tol:
            break
        split = cell_err > 0.25 * tv_tol / left.size
        mid = 0.5 * (left + right)
        left = np.concatenate([left[~split], left[split], mid[split]])
        right = np.concatenate([right[~split], mid[split], right[split]])
        order = np.argsort(left)
        left, right = left[order], right[order]
    else:
        raise QuadratureError(f"sampler table stuck at TV error {tv:.3g} > {tv_tol:g}")
    cdf = np.concatenate([[0.0], np.cumsum(mass)])
    cdf /= cdf[-1]
    return YSampler(left, right, cdf, float(tv))


def exact_sample(
    params: ModelParams,
    h: FieldSample,
    quad: QuadratureSpec | None = None,
    n_samples: int = 1,
    seed: int = 0,
    return_y: bool = False,
):
    """Draw full configurations from the Gibbs measure in two stages.

    First ``y`` from the density proportional to ``exp(N G_N(y))``, then the
    spins independently given ``y`` with
    ``P(s_i = +1 | y) = e^{a_i} / (2 cosh a_i)``.  Returns an int8 array of
    shape ``(n_samples, N)`` (and the ``y`` draws if ``return_y``).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    sampler = y_sampler(params, h, quad)
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    ys = sampler.draw(rng, n_samples)
    sb = math.sqrt(params.beta)
    spins = np.empty((n_samples, len(h)), dtype=np.int8)
    block = max(1, int(4e6 // len(h)))
    for start in range(0, n_samples, block):
        yb = ys[start:start + block]
        p_plus = 0.5 * (1.0 + np.tanh(sb * yb[:, None] + params.beta * h.values))
        u = rng.random(p_plus.shape)
        spins[start:start + block] = np.where(u < p_plus, 1, -1)
    return (spins, ys) if return_y else spins


def select_j_index(h: FieldSample, spec: FieldSpec, beta: float, report: LandscapeReport) -> int:
    """Index of the maximizer with the largest ``Delta_N(y_j)``; ties go to the smallest index."""
    if not report.maxima:
        raise ValueError("landscape report has no maxima")
    deltas = np.asarray(delta_n(h, spec, beta, report.locations, 0), dtype=float)
    best = deltas.max()
    return int(np.flatnonzero(deltas >= best - J_TIE_TOL)[0])


def predicted_product(beta: float, report: LandscapeReport, j: int, h_prefix) -> MarginalTable:
    """Product measure centred at the ``j``-th maximizer of ``G``."""
    if not 0 <= j < len(report.maxima):
        raise IndexError(f"maximum index {j} out of range for {len(report.maxima)} maxima")
    return product_marginal(beta, report.maxima[j].location, h_prefix)
