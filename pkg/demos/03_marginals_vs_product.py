"""Finite-N marginals approach a product measure (one maximum of G).

Run with ``python3 demos/03_marginals_vs_product.py``.
"""
# %%
import numpy as np

from rfcw import (
    ModelParams,
    brute_force_marginal,
    dichotomous,
    find_global_maxima,
    kl_divergence,
    marginal_quadrature,
    predicted_product,
    sample_field,
    tv_distance,
)

# %% [markdown]
# First a sanity check.  At small N, the integral formula and full enumeration
# of all 2^N configurations give the same table to rounding.

# %%
spec, beta = dichotomous(0.25), 0.8
h = sample_field(spec, 14, seed=0)
params = ModelParams(beta, 14)
quad = marginal_quadrature(params, h, 3)
brute = brute_force_marginal(params, h, 3)
print("N=14  TV(quadrature, enumeration) =", tv_distance(quad, brute))

# %% [markdown]
# Now grow N.  The marginal of the first three spins, given the field, gets
# close to independent spins tilted by sqrt(beta) y0 + beta h_i, where y0 is
# the maximizer of G.  Ten field realizations per N.

# %%
report = find_global_maxima(spec, beta)
print(f"maximizer y0 = {report.maxima[0].location:.3e}")
for n in (50, 250, 1000, 4000, 16000):
    kls = []
    for r in range(10):
        h = sample_field(spec, n, seed=1000 * n + r)
        mu = marginal_quadrature(ModelParams(beta, n), h, 3)
        kls.append(kl_divergence(mu, predicted_product(beta, report, 0, h.values[:3])))
    print(f"N={n:<6} mean KL = {np.mean(kls):.3e}   median = {np.median(kls):.3e}")

# %% [markdown]
# At the critical point (h = 0, beta = 1) the maximum is degenerate.  The
# distance still shrinks, but more slowly.

# %%
zero = dichotomous(0.0)
report = find_global_maxima(zero, 1.0)
for n in (250, 1000, 4000, 16000):
    h = sample_field(zero, n, seed=0)
    mu = marginal_quadrature(ModelParams(1.0, n), h, 2)
    print(f"N={n:<6} KL = {kl_divergence(mu, predicted_product(1.0, report, 0, h.values[:2])):.3e}")
