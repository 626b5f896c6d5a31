import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rfcw.model import (
    CapacityError,
    FieldSample,
    FieldSpec,
    MarginalTable,
    ModelParams,
    brute_force_marginal,
    dichotomous,
    hamiltonian,
    kl_divergence,
    point_mass,
    product_marginal,
    sample_field,
    spin_words,
    tv_distance,
    word_index,
)


def test_hamiltonian_examples():
    assert hamiltonian([1, 1], FieldSample([0.0, 0.0])) == pytest.approx(-1.0)
    assert hamiltonian([1, -1], FieldSample([1.0, 0.0])) == pytest.approx(-1.0)
    for a in (-0.7, 0.0, 1.3):
        assert hamiltonian([1], FieldSample([a])) == pytest.approx(-0.5 - a)


def test_hamiltonian_matches_double_sum():
    rng = np.random.default_rng(4)
    sigma = rng.choice([-1, 1], size=7)
    h = rng.normal(size=7)
    double = -sum(sigma[i] * sigma[j] for i in range(7) for j in range(7)) / 14 - h @ sigma
    assert hamiltonian(sigma, h) == pytest.approx(double, abs=1e-13)


def test_hamiltonian_length_mismatch():
    with pytest.raises(ValueError):
        hamiltonian([1, 1, 1], FieldSample([0.0, 0.0]))


def test_field_spec_validation():
    with pytest.raises(ValueError):
        FieldSpec((0.0, 1.0), (0.5, 0.4))
    with pytest.raises(ValueError):
        FieldSpec((0.0, 1.0), (1.0, 0.0))
    with pytest.raises(ValueError):
        FieldSpec((math.inf,), (1.0,))
    assert dichotomous(0.3).is_symmetric()
    assert not FieldSpec((0.5, -0.5), (0.25, 0.75)).is_symmetric()
    assert dichotomous(0.4).second_moment() == pytest.approx(0.16)


def test_sample_field_dichotomous_reproducible():
    a = sample_field(dichotomous(0.3), 4, seed=7)
    b = sample_field(dichotomous(0.3), 4, seed=7)
    assert len(a) == 4
    assert set(a.values) <= {0.3, -0.3}
    np.testing.assert_array_equal(a.values, b.values)
    assert a.seed == 7


def test_sample_field_point_mass():
    np.testing.assert_array_equal(sample_field(point_mass(0.0), 10, seed=1).values, np.zeros(10))


def test_sample_field_mean_binomial_band():
    h = sample_field(dichotomous(1.0), 10**5, seed=2)
    assert abs(h.values.mean()) <= 4 * 10**-2.5


def test_sample_field_rejects_zero_length():
    with pytest.raises(ValueError):
        sample_field(dichotomous(1.0), 0, seed=0)


def test_spin_word_order():
    words = spin_words(2)
    np.testing.assert_array_equal(words, [[1, 1], [1, -1], [-1, 1], [-1, -1]])
    for i, w in enumerate(spin_words(4)):
        assert word_index(w) == i


def test_marginal_table_validation():
    with pytest.raises(ValueError):
        MarginalTable(1, [0.6, 0.6])
    with pytest.raises(ValueError):
        MarginalTable(2, [0.5, 0.5])
    with pytest.raises(ValueError):
        MarginalTable(1, [1.5, -0.5])


def test_brute_force_single_spin():
    for beta, a in [(0.3, 0.7), (2.0, -0.4), (1.0, 0.0)]:
        t = brute_force_marginal(ModelParams(beta, 1), FieldSample([a]), 1)
        assert t[(1,)] == pytest.approx(math.exp(beta * a) / (2 * math.cosh(beta * a)), abs=1e-15)


def test_brute_force_infinite_temperature_limit():
    h = sample_field(dichotomous(0.8), 6, seed=3)
    t = brute_force_marginal(ModelParams(1e-14, 6), h, 2)
    np.testing.assert_allclose(t.probs, 0.25, atol=1e-12)


def test_brute_force_zero_field_symmetry():
    t = brute_force_marginal(ModelParams(1.7, 2), FieldSample([0.0, 0.0]), 1)
    assert t[(1,)] == pytest.approx(0.5, abs=1e-15)


def test_brute_force_against_direct_enumeration():
    # independent evaluation through the hamiltonian itself
    h = FieldSample([0.3, -0.2, 0.5, 0.1, -0.4])
    beta = 1.3
    weights = {}
    for sigma in itertools.product([1, -1], repeat=5):
        weights[sigma] = math.exp(-beta * hamiltonian(sigma, h))
    z = sum(weights.values())
    expected = np.zeros(4)
    for sigma, w in weights.items():
        expected[word_index(sigma[:2])] += w / z
    t = brute_force_marginal(ModelParams(beta, 5), h, 2)
    np.testing.assert_allclose(t.probs, expected, atol=1e-14)


def test_brute_force_errors():
    with pytest.raises(CapacityError):
        brute_force_marginal(ModelParams(1.0, 23), FieldSample(np.zeros(23)), 1)
    with pytest.raises(ValueError):
        brute_force_marginal(ModelParams(1.0, 3), FieldSample(np.zeros(3)), 4)


def test_product_marginal_examples():
    np.testing.assert_allclose(product_marginal(1.0, 0.0, [0.0]).probs, [0.5, 0.5])
    t = product_marginal(0.7, 0.4, [0.3, -0.9])
    p1 = product_marginal(0.7, 0.4, [0.3]).probs
    p2 = product_marginal(0.7, 0.4, [-0.9]).probs
    np.testing.assert_allclose(t.probs, np.outer(p1, p2).ravel(), rtol=1e-15)
    hf = 0.37
    assert product_marginal(1.0, 0.0, [hf])[(1,)] == pytest.approx(math.exp(hf) / (2 * math.cosh(hf)))


def test_product_marginal_extreme_fields_stay_finite():
    t = product_marginal(50.0, 30.0, [20.0, -20.0])
    assert np.all(np.isfinite(t.probs))
    assert t[(1, -1)] == pytest.approx(1.0)
    assert t[(1, 1)] == 0.0


def test_kl_examples():
    p = MarginalTable(1, [0.3, 0.7])
    assert kl_divergence(p, p) == 0.0
    assert kl_divergence(MarginalTable(1, [1, 0]), MarginalTable(1, [0.5, 0.5])) == pytest.approx(math.log(2))
    assert kl_divergence(MarginalTable(1, [0.5, 0.5]), MarginalTable(1, [1, 0])) == math.inf


def test_tv_examples():
    p = MarginalTable(1, [0.3, 0.7])
    assert tv_distance(p, p) == 0.0
    assert tv_distance(MarginalTable(1, [1, 0]), MarginalTable(1, [0, 1])) == 1.0
    assert tv_distance(MarginalTable(1, [0.7, 0.3]), MarginalTable(1, [0.5, 0.5])) == pytest.approx(0.2)


def test_divergence_dimension_mismatch():
    with pytest.raises(ValueError):
        kl_divergence(MarginalTable(1, [0.5, 0.5]), MarginalTable(2, [0.25] * 4))
    with pytest.raises(ValueError):
        tv_distance(MarginalTable(1, [0.5, 0.5]), MarginalTable(2, [0.25] * 4))


small_fields = st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=9)


@settings(max_examples=40, deadline=None)
@given(h=small_fields, beta=st.floats(0.05, 3.0))
def test_brute_force_consistency_and_symmetries(h, beta):
    n = len(h)
    sample = FieldSample(h)
    params = ModelParams(beta, n)
    k = min(3, n)
    t = brute_force_marginal(params, sample, k)
    assert abs(t.probs.sum() - 1) <= 1e-10 and np.all(t.probs >= 0)
    # marginal consistency
    np.testing.assert_allclose(t.marginalize_last().probs, brute_force_marginal(params, sample, k - 1).probs,
                               atol=1e-12)
    # spin flip
    flipped = brute_force_marginal(params, sample.negated(), k)
    np.testing.assert_allclose(flipped.probs, t.spin_flip().probs, atol=1e-12)
    # swapping h_1 and h_2 swaps the first two coordinates
    hs = list(h)
    hs[0], hs[1] = hs[1], hs[0]
    swapped = brute_force_marginal(params, FieldSample(hs), k)
    perm = [1, 0] + list(range(2, k))
    np.testing.assert_allclose(swapped.probs, t.permute(perm).probs, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(p=st.lists(st.floats(0, 1), min_size=4, max_size=4), q=st.lists(st.floats(1e-3, 1), min_size=4, max_size=4))
def test_pinsker(p, q):
    p = np.asarray(p)
    if p.sum() == 0:
        p = p + 1
    a = MarginalTable(2, p / p.sum())
    b = MarginalTable(2, np.asarray(q) / np.sum(q))
    assert tv_distance(a, b) <= math.sqrt(kl_divergence(a, b) / 2) + 1e-12
