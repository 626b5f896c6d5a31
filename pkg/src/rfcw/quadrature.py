"""Adaptive composite Gauss-Legendre quadrature for ``int exp(f(y)) dy``.

The integrands of interest are ``exp(N G_N(y))`` for large ``N``: smooth,
sharply peaked, and far outside floating-point range.  Everything is done in
log space with a common shift, and panels are bisected until the 15-point
rule on a panel agrees with the sum of the rules on its halves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import logsumexp

from .landscape import NumericalError

__all__ = ["GaussPanels", "adaptive_panels", "panel_nodes", "QuadratureError", "N_GAUSS"]

N_GAUSS = 15
_X, _W = leggauss(N_GAUSS)
_LOG_W = np.log(_W)
# panels carrying less than this fraction of every integrand are dropped
PRUNE_LOG_RATIO = math.log(1e-40)


class QuadratureError(NumericalError):
    """Refinement budget exhausted before reaching the requested tolerance."""


def panel_nodes(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and log-weights of the 15-point rule on each panel, shape (panels, 15)."""
    left = np.asarray(left, dtype=float)[:, None]
    right = np.asarray(right, dtype=float)[:, None]
    half = 0.5 * (right - left)
    return 0.5 * (left + right) + half * _X, _LOG_W + np.log(half)


def _rule(logf, left, right) -> np.ndarray:
    """log of the rule on each panel for every integrand, shape (m, panels)."""
    y, lw = panel_nodes(left, right)
    vals = np.atleast_2d(logf(y.ravel())).reshape(-1, *y.shape)
    return logsumexp(vals + lw, axis=-1)


@dataclass(frozen=True)
class GaussPanels:
    """A converged composite rule.

    ``log_f`` is the reference log-integrand at ``nodes``; integrals of
    ``exp(log_f) * g`` for other ``g`` reuse the same nodes and weights.
    """

    left: np.ndarray
    right: np.ndarray
    nodes: np.ndarray
    log_weights: np.ndarray
    log_f: np.ndarray
    log_integral: float
    est_error: float

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    def log_integrate(self, log_g=None):
        """``log int exp(log_f) g``; ``log_g`` has shape (..., n_nodes)."""
        base = self.log_f + self.log_weights
        if log_g is None:
            return float(logsumexp(base))
        return logsumexp(base + log_g, axis=-1)


def adaptive_panels(
    logf,
    a: float,
    b: float,
    rel_tol: float,
    max_refinements: int = 30,
    initial_width: float | None = None,
) -> GaussPanels:
    """Composite Gauss-Legendre rule for ``int_a^b exp(logf(y)) dy``.

    ``logf`` maps a 1-d array of points to a 1-d array (one integrand) or to
    an ``(m, n)`` array (several integrands that must all be resolved; row 0
    is the reference).  A panel is bisected while, for some integrand,
    ``|I(panel) - I(left half) - I(right half)|`` exceeds ``rel_tol`` times
    the current total times the panel's share of ``[a, b]``.  Accepted panels
    keep the two-half estimate.
    """
    if not b > a:
        raise ValueError("need b > a")
    if not rel_tol > 0:
        raise ValueError("rel_tol must be > 0")
    span = b - a
    width0 = span / 16 if initial_width is None else min(initial_width, span / 16)
    edges = np.linspace(a, b, int(math.ceil(span / width0)) + 1)
    left, right = edges[:-1], edges[1:]

    acc_left, acc_right, acc_logs, acc_err = [], [], [], []
    for _ in range(max_refinements + 1):
        mid = 0.5 * (left + right)
        whole = _rule(logf, left, right)
        fine = np.logaddexp(_rule(logf, left, mid), _rule(logf, mid, right))
        log_total = logsumexp(np.concatenate([fine] + acc_logs, axis=1), axis=1)[:, None]
        err = np.abs(np.exp(whole - log_total) - np.exp(fine - log_total))
        # log-integrand values of size L carry ~L ulps of relative noise; below
        # that scale (times the panel's own mass) disagreement is rounding
        noise = 100 * np.finfo(float).eps * (1.0 + np.abs(fine))
        floor = noise * np.exp(fine - log_total)
        bad = np.any(err > np.maximum(rel_tol * (right - left) / span, floor), axis=0)
        ok = ~bad
        for store, part in ((acc_left, left[ok]), (acc_right, right[ok]), (acc_logs, fine[:, ok])):
            store.append(part)
        acc_err.append(err[0, ok])
        if not bad.any():
            break
        left = np.concatenate([left[bad], mid[bad]])
        right = np.concatenate([mid[bad], right[bad]])
    else:
        achieved = float(np.sum(np.concatenate(acc_err))) + float(np.sum(err[0]))
        raise QuadratureError(
            f"adaptive quadrature stopped at relative error ~{achieved:.3g} "
            f"(rel_tol={rel_tol:g}) after {max_refinements} refinements"
        )

    left = np.concatenate(acc_left)
    right = np.concatenate(acc_right)
    logs = np.concatenate(acc_logs, axis=1)
    errs = np.concatenate(acc_err)
    log_total = logsumexp(logs, axis=1)
    keep = np.any(logs - log_total[:, None] > PRUNE_LOG_RATIO, axis=0)
    order = np.argsort(left[keep])
    left, right = left[keep][order], right[keep][order]
    # halves as the final panels, matching the accepted estimate
    mid = 0.5 * (left + right)
    fl = np.column_stack([left, mid]).ravel()
    fr = np.column_stack([mid, right]).ravel()
    y, lw = panel_nodes(fl, fr)
    log_f = np.atleast_2d(logf(y.ravel()))[0]
    log_weights = lw.ravel()
    log_integral = float(logsumexp(log_f + log_weights))
    return GaussPanels(
        left=fl,
        right=fr,
        nodes=y.ravel(),
        log_weights=log_weights,
        log_f=log_f,
        log_integral=log_integral,
        est_error=float(errs.sum()),
    )
