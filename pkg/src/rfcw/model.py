"""Basic objects of the random field Curie-Weiss model.

The Hamiltonian on ``{-1, +1}^N`` is

    H_N(sigma) = -(1 / 2N) (sum_i sigma_i)^2 - sum_i h_i sigma_i

and the Gibbs measure is ``exp(-beta H_N) / Z_N``.  The fields ``h_i`` are
i.i.d. draws from a law with finite support (:class:`FieldSpec`).

Spin words of length ``k`` are enumerated lexicographically with ``+1 -> 0``
and ``-1 -> 1``, i.e. word index ``w`` has ``sigma_i = +1`` iff bit
``k - 1 - i`` of ``w`` is zero.  Every :class:`MarginalTable` stores its
probabilities as a flat array in that order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

__all__ = [
    "FieldSpec",
    "FieldSample",
    "MarginalTable",
    "ModelParams",
    "CapacityError",
    "MAX_ENUMERATION_N",
    "MAX_WORD_LENGTH",
    "dichotomous",
    "point_mass",
    "spin_words",
    "hamiltonian",
    "sample_field",
    "brute_force_marginal",
    "product_marginal",
    "kl_divergence",
    "tv_distance",
]

MAX_ENUMERATION_N = 22
MAX_WORD_LENGTH = 24


class CapacityError(ValueError):
    """Raised when an exact enumeration would exceed the size cutoff."""


@dataclass(frozen=True)
class FieldSpec:
    """Finite-support law of the external field.

    Parameters
    ----------
    values : sequence of float
        Support points.
    probs : sequence of float
        Strictly positive probabilities summing to one.
    name : str
        Label used in reports and sample provenance.
    """

    values: tuple
    probs: tuple
    name: str = "discrete"

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(p) for p in self.probs)
        if len(values) == 0 or len(values) != len(probs):
            raise ValueError("support values and probabilities must be nonempty and of equal length")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("support values must be finite")
        if any(not p > 0 for p in probs):
            raise ValueError("probabilities must be strictly positive")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @property
    def support(self) -> list[tuple[float, float]]:
        return list(zip(self.values, self.probs))

    @property
    def values_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def probs_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def mean_abs(self) -> float:
        return math.fsum(p * abs(v) for v, p in self.support)

    def second_moment(self) -> float:
        return math.fsum(p * v * v for v, p in self.support)

    def is_symmetric(self) -> bool:
        """True if the law is invariant under ``h -> -h``."""
        table = dict(self.support)
        return all(abs(table.get(-v, -1.0) - p) <= 1e-15 for v, p in self.support)


def dichotomous(h_field: float) -> FieldSpec:
    """Law with ``P(h = +h_field) = P(h = -h_field) = 1/2``."""
    h_field = float(h_field)
    if h_field < 0:
        raise ValueError("dichotomous field strength must be >= 0")
    if h_field == 0:
        return FieldSpec((0.0,), (1.0,), name="dichotomous:0")
    return FieldSpec((h_field, -h_field), (0.5, 0.5), name=f"dichotomous:{h_field:g}")


def point_mass(value: float = 0.0) -> FieldSpec:
    return FieldSpec((float(value),), (1.0,), name=f"point:{float(value):g}")


@dataclass(frozen=True)
class FieldSample:
    """One quenched realization ``h_1, ..., h_N``."""

    values: np.ndarray
    seed: int = 0
    spec_name: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < 1:
            raise ValueError("a field sample needs at least one site")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    def empirical_measure(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct field values and their relative frequencies."""
        vals, counts = np.unique(self.values, return_counts=True)
        return vals, counts / self.values.size

    def negated(self) -> "FieldSample":
        return FieldSample(-self.values, self.seed, self.spec_name)


@dataclass(frozen=True)
class ModelParams:
    beta: float
    n_sites: int

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites!r}")
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "n_sites", int(self.n_sites))


def spin_words(k: int) -> np.ndarray:
    """All ``2**k`` spin words of length ``k`` as an int8 array, in table order."""
    if not 1 <= k <= MAX_WORD_LENGTH:
        raise ValueError(f"word length must be in [1, {MAX_WORD_LENGTH}], got {k}")
    idx = np.arange(2**k, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(k - 1, -1, -1, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def word_index(spins: Sequence[int]) -> int:
    """Table position of a spin word."""
    idx = 0
    for s in spins:
        if s not in (1, -1):
            raise ValueError(f"spins must be +1 or -1, got {s!r}")
        idx = 2 * idx + (s == -1)
    return idx


@dataclass(frozen=True)
class MarginalTable:
    """Probability table over ``{-1, +1}^k`` in lexicographic word order."""

    k: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).ravel()
        if not 1 <= self.k <= MAX_WORD_LENGTH:
            raise ValueError(f"k must be in [1, {MAX_WORD_LENGTH}], got {self.k}")
        if probs.size != 2**self.k:
            raise ValueError(f"expected {2**self.k} entries, got {probs.size}")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(probs.sum() - 1.0) > 1e-10:
            raise ValueError(f"table sums to {probs.sum()!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, spins: Sequence[int]) -> float:
        if len(spins) != self.k:
            raise ValueError(f"expected a word of length {self.k}")
        return float(self.probs[word_index(spins)])

    def as_dict(self) -> dict[tuple[int, ...], float]:
        words = spin_words(self.k)
        return {tuple(int(s) for s in w): float(p) for w, p in zip(words, self.probs)}

    def marginalize_last(self) -> "MarginalTable":
        """Sum out the last coordinate."""
        if self.k == 1:
            raise ValueError("cannot marginalize a one-site table")
        return MarginalTable(self.k - 1, self.probs.reshape(-1, 2).sum(axis=1))

    def site_plus_probs(self) -> np.ndarray:
        """``P(sigma_i = +1)`` for each of the ``k`` coordinates."""
        return ((spin_words(self.k) == 1) * self.probs[:, None]).sum(axis=0)

    def spin_flip(self) -> "MarginalTable":
        # negating every spin reverses the lexicographic order
        return MarginalTable(self.k, self.probs[::-1])

    def permute(self, perm: Sequence[int]) -> "MarginalTable":
        """Table of ``(sigma_perm[0], ..., sigma_perm[k-1])``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.k)):
            raise ValueError("perm must be a permutation of range(k)")
        cube = self.probs.reshape((2,) * self.k)
        return MarginalTable(self.k, np.transpose(cube, perm).ravel())


def hamiltonian(sigma, h) -> float:
    """Energy ``H_N(sigma)`` for one configuration."""
    sigma = np.asarray(sigma, dtype=float).ravel()
    hv = np.asarray(h.values if isinstance(h, FieldSample) else h, dtype=float).ravel()
    if sigma.size != hv.size:
        raise ValueError(f"configuration has {sigma.size} sites but field has {hv.size}")
    m = sigma.sum()
    return float(-m * m / (2 * sigma.size) - hv @ sigma)


def sample_field(spec: FieldSpec, n: int, seed: int) -> FieldSample:
    """Draw ``n`` i.i.d. field values from ``spec`` with a seeded PCG64 stream."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    values = spec.values_array
    if values.size == 1:
        draws = np.full(n, values[0])
    else:
        draws = values[rng.choice(values.size, size=n, p=spec.probs_array)]
    return FieldSample(draws, seed=int(seed), spec_name=spec.name)


def _all_energies(hv: np.ndarray) -> np.ndarray:
    """Beta-free energies of all ``2**N`` configurations in table order."""
    n = hv.size
    idx = np.arange(2**n, dtype=np.int64)
    m = np.zeros(idx.size)
    field = np.zeros(idx.size)
    for i in range(n):
        s = 1.0 - 2.0 * ((idx >> (n - 1 - i)) & 1)
        m += s
        field += hv[i] * s
    return -m * m / (2 * n) - field


def brute_force_marginal(params: ModelParams, h: FieldSample, k: int) -> MarginalTable:
    """Exact marginal of the first ``k`` spins by enumerating all ``2**N`` states."""
    n = len(h)
    if params.n_sites != n:
        raise ValueError(f"params.n_sites={params.n_sites} but field has {n} sites")
    if n > MAX_ENUMERATION_N:
        raise CapacityError(f"enumeration limited to N <= {MAX_ENUMERATION_N}, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= N, got k={k}, N={n}")
    log_w = -params.beta * _all_energies(h.values)
    w = np.exp(log_w - log_w.max())
    # first k spins are the leading bits of the configuration index
    probs = w.reshape(2**k, -1).sum(axis=1)
    return MarginalTable(k, probs / probs.sum())


def _plus_probs(fields: np.ndarray) -> np.ndarray:
    # e^x / (2 cosh x), written to avoid overflow
    return 0.5 * (1.0 + np.tanh(fields))


def product_table(plus_probs: np.ndarray) -> np.ndarray:
    """Flat product-measure table from per-site ``P(sigma_i = +1)``."""
    table = np.ones(1)
    for p in np.asarray(plus_probs, dtype=float):
        table = np.outer(table, [p, 1.0 - p]).ravel()
    return table


def product_marginal(beta: float, y: float, h_prefix) -> MarginalTable:
    """Product measure with ``P(sigma_i = +1) = e^a / (2 cosh a)``, ``a = sqrt(beta) y + beta h_i``."""
    hp = np.asarray(h_prefix, dtype=float).ravel()
    if hp.size < 1:
        raise ValueError("need at least one site")
    a = math.sqrt(beta) * y + beta * hp
    probs = product_table(_plus_probs(a))
    return MarginalTable(hp.size, probs / probs.sum())


def _check_same_k(p: MarginalTable, q: MarginalTable):
    if p.k != q.k:
        raise ValueError(f"tables have different word lengths {p.k} and {q.k}")


def kl_divergence(p: MarginalTable, q: MarginalTable) -> float:
    """Relative entropy ``H(p | q)``; ``inf`` when ``p`` is not absolutely continuous w.r.t. ``q``."""
    _check_same_k(p, q)
    pp, qq = p.probs, q.probs
    charged = pp > 0
    if np.any(qq[charged] == 0):
        return math.inf
    # p log(p/q) - p + q is termwise nonnegative, which avoids cancellation
    return float(math.fsum(special.kl_div(pp, qq)))


def tv_distance(p: MarginalTable, q: MarginalTable) -> float:
    _check_same_k(p, q)
    return min(0.5 * float(math.fsum(np.abs(p.probs - q.probs))), 1.0)
