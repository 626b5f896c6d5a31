"""Seeded experiment drivers and report emission.

Every field realization is drawn with a seed derived from
``(base_seed + replica, N)`` by a fixed 64-bit mix, and that seed is
recorded in each output row, so any single row can be reproduced alone.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .landscape import LandscapeReport, delta_n, find_global_maxima, log_cosh
from .marginals import (
    QuadratureSpec,
    marginal_quadrature,
    predicted_product,
    select_j_index,
)
from .model import FieldSpec, ModelParams, kl_divergence, sample_field, tv_distance

__all__ = [
    "PreconditionError",
    "ExperimentConfig",
    "ConvergenceRow",
    "JIndexStats",
    "CLTResult",
    "derive_seed",
    "chaos_convergence_scan",
    "j_index_statistics",
    "clt_diagnostic",
    "rows_to_csv",
    "report_json",
    "CONVERGENCE_COLUMNS",
]

CONVERGENCE_SCHEMA = "# rfcw convergence-rows v1"
CONVERGENCE_COLUMNS = ("n", "k", "seed", "j_index", "kl", "tv")
_MASK64 = 0xFFFFFFFFFFFFFFFF


class PreconditionError(ValueError):
    """The landscape does not match what the experiment requires."""


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, replica: int, n: int) -> int:
    """Seed for replica ``replica`` at system size ``n``."""
    return _splitmix64(((base_seed + replica) & _MASK64) ^ _splitmix64(n))


def _threads() -> int:
    env = os.environ.get("RFCW_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _ordered_map(fun, items):
    items = list(items)
    workers = min(_threads(), len(items))
    if workers <= 1:
        return [fun(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fun, items))


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of a convergence experiment.

    ``k`` is a fixed marginal size unless ``k_alpha`` is set, in which case
    ``k(N) = ceil(N ** k_alpha)`` with ``0 < k_alpha < 1/2``.  ``quad=None``
    picks a safe quadrature per realization.
    """

    spec: FieldSpec
    beta: float
    n_grid: tuple
    k: int = 2
    k_alpha: float | None = None
    replicas: int = 1
    base_seed: int = 0
    quad: QuadratureSpec | None = None
    output_path: str | None = None

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid or any(n < 1 for n in grid):
            raise ValueError("n_grid must be a nonempty list of positive sizes")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")
        if not self.beta > 0:
            raise ValueError("beta must be > 0")
        if self.k_alpha is None:
            if self.k < 1:
                raise ValueError("k must be >= 1")
        elif not 0 < self.k_alpha < 0.5:
            raise ValueError("k_alpha must lie in (0, 1/2)")

    def k_for(self, n: int) -> int:
        if self.k_alpha is None:
            return min(self.k, n)
        return min(int(math.ceil(n**self.k_alpha - 1e-12)), n)

    def to_dict(self) -> dict:
        return {
            "field": {"name": self.spec.name, "support": [list(s) for s in self.spec.support]},
            "beta": self.beta,
            "n_grid": list(self.n_grid),
            "k": self.k if self.k_alpha is None else f"ceil(N^{self.k_alpha})",
            "replicas": self.replicas,
            "base_seed": self.base_seed,
            "quad": None if self.quad is None else asdict(self.quad),
        }


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    k: int
    kl: float
    tv: float
    j_index: int
    seed: int

    def as_record(self) -> dict:
        return {c: getattr(self, c) for c in CONVERGENCE_COLUMNS}


def _work_items(config: ExperimentConfig):
    return [(n, r) for n in config.n_grid for r in range(config.replicas)]


def chaos_convergence_scan(config: ExperimentConfig) -> list[ConvergenceRow]:
    """KL and TV between ``mu_{N,k}`` and the product measure at the unique maximizer."""
    report = find_global_maxima(config.spec, config.beta)
    if report.n_maxima != 1:
        raise PreconditionError(
            f"G has {report.n_maxima} global maxima; use j_index_statistics for this regime"
        )

    def run(item):
        n, r = item
        seed = derive_seed(config.base_seed, r, n)
        h = sample_field(config.spec, n, seed)
        k = config.k_for(n)
        mu = marginal_quadrature(ModelParams(config.beta, n), h, k, config.quad)
        rho = predicted_product(config.beta, report, 0, h.values[:k])
        return ConvergenceRow(n, k, kl_divergence(mu, rho), tv_distance(mu, rho), 0, seed)

    return _ordered_map(run, _work_items(config))


@dataclass(frozen=True)
class JIndexStats:
    """Per-replica rows against the selected product state, plus J frequencies.

    ``tv_alternative[i]`` is the smallest TV between replica ``i``'s marginal
    and the product states of the *other* maximizers.
    """

    report: LandscapeReport
    rows: tuple
    tv_alternative: tuple
    counts: tuple

    @property
    def frequencies(self) -> np.ndarray:
        c = np.asarray(self.counts, dtype=float)
        return c / c.sum()

    def median_tv(self) -> float:
        return float(np.median([r.tv for r in self.rows]))

    def tv_quantile(self, q: float) -> float:
        return float(np.quantile([r.tv for r in self.rows], q))


def j_index_statistics(config: ExperimentConfig) -> JIndexStats:
    """Random selection of a pure product state when ``G`` has several maxima."""
    report = find_global_maxima(config.spec, config.beta)
    if report.n_maxima < 2:
        raise PreconditionError("G has a single global maximum; use chaos_convergence_scan")
    if any(m.degeneracy_n != 1 for m in report.maxima):
        raise PreconditionError("J-index selection needs non-degenerate maxima")
    if config.spec.second_moment() == 0:
        raise PreconditionError("J-index selection needs a field with E h^2 != 0")

    def run(item):
        n, r = item
        seed = derive_seed(config.base_seed, r, n)
        h = sample_field(config.spec, n, seed)
        k = config.k_for(n)
        mu = marginal_quadrature(ModelParams(config.beta, n), h, k, config.quad)
        j = select_j_index(h, config.spec, config.beta, report)
        rhos = [predicted_product(config.beta, report, i, h.values[:k]) for i in range(report.n_maxima)]
        row = ConvergenceRow(n, k, kl_divergence(mu, rhos[j]), tv_distance(mu, rhos[j]), j, seed)
        alt = min(tv_distance(mu, rho) for i, rho in enumerate(rhos) if i != j)
        return row, alt

    results = _ordered_map(run, _work_items(config))
    rows = tuple(r for r, _ in results)
    counts = np.bincount([r.j_index for r in rows], minlength=report.n_maxima)
    return JIndexStats(report, rows, tuple(a for _, a in results), tuple(int(c) for c in counts))


@dataclass(frozen=True)
class CLTResult:
    mean: float
    variance: float
    target_variance: float
    replicas: int


def clt_diagnostic(spec: FieldSpec, beta: float, y0: float, n: int, replicas: int, seed: int) -> CLTResult:
    """Replica mean and variance of ``sqrt(N) Delta_N(y0)`` against the exact limit variance.

    The limit variance is ``Var[log cosh(sqrt(beta) y0 + beta h)]`` under ``spec``.
    """
    if replicas < 100:
        raise ValueError("replicas must be >= 100")
    vals = np.array(
        [math.sqrt(n) * delta_n(sample_field(spec, n, derive_seed(seed, r, n)), spec, beta, y0)
         for r in range(replicas)]
    )
    lc = log_cosh(math.sqrt(beta) * y0 + beta * spec.values_array)
    p = spec.probs_array
    target = float(p @ (lc - p @ lc) ** 2)
    return CLTResult(float(vals.mean()), float(vals.var(ddof=1)), target, replicas)


def rows_to_csv(rows: Sequence, columns: Sequence[str] = CONVERGENCE_COLUMNS,
                schema: str = CONVERGENCE_SCHEMA) -> str:
    """CSV text with a schema comment line, a header, and one line per record."""
    buf = io.StringIO()
    buf.write(schema + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        rec = row if isinstance(row, dict) else row.as_record()
        writer.writerow([_fmt(rec[c]) for c in columns])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def report_json(kind: str, config: dict, records: list, extra: dict | None = None) -> str:
    doc = {"kind": kind, "version": f"v{__version__}", "config": config, "records": records}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
