"""Exact Gibbs samples through the auxiliary variable y.

Run with ``python3 demos/05_exact_sampler.py``.
"""
# %%
import numpy as np

from rfcw import FieldSample, ModelParams, dichotomous, exact_sample, marginal_quadrature, sample_field

# %% [markdown]
# First draw y from a density proportional to exp(N G_N(y)).  Then, given y,
# the spins are independent.  No Markov chain is involved, so the samples are
# independent and the error is plain Monte Carlo error.

# %%
n, beta = 200, 0.8
h = sample_field(dichotomous(0.25), n, seed=0)
params = ModelParams(beta, n)
spins, ys = exact_sample(params, h, n_samples=100_000, seed=0, return_y=True)
exact = marginal_quadrature(params, h, 5).site_plus_probs()
emp = (spins[:, :5] == 1).mean(axis=0)
se = np.sqrt(exact * (1 - exact) / len(spins))
for i in range(5):
    print(f"site {i + 1}: h={h.values[i]:+.2f}  P(+) exact {exact[i]:.4f}  sampled {emp[i]:.4f}  "
          f"({(emp[i] - exact[i]) / se[i]:+.2f} std errs)")

# %% [markdown]
# In the ferromagnetic phase the y law has two peaks, one per maximizer of G.
# Any imbalance between +hf and -hf sites tilts the weights by a factor
# exponential in N, so a typical random field puts almost all mass on one side.
# With an exactly balanced field both peaks keep equal weight, and the
# magnetization has two modes.

# %%
params = ModelParams(2.5, 400)
for label, h in [("random field", sample_field(dichotomous(0.25), 400, seed=1)),
                 ("balanced field", FieldSample([0.25, -0.25] * 200))]:
    spins, ys = exact_sample(params, h, n_samples=20_000, seed=1, return_y=True)
    counts, edges = np.histogram(spins.mean(axis=1), bins=16, range=(-1, 1))
    print(f"{label}: fraction with y > 0 = {(ys > 0).mean():.3f}")
    for c, lo in zip(counts, edges):
        print(f"  {lo:+.3f} {'#' * int(50 * c / counts.max())}")
