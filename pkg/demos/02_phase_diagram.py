"""The critical line for a field h = +-hf and its tricritical point.

Run with ``python3 demos/02_phase_diagram.py``.
"""
# %%
from rfcw import classify_regime, tricritical_point
from rfcw.phase import critical_line

# %% [markdown]
# Below the tricritical field strength, the line is where y = 0 stops being a
# maximum (G''(0) = 0).  Above it, the line is where a pair of maxima away from
# 0 first reaches the height of G(0).  The line blows up as hf approaches 1/2.

# %%
h_star, b_star = tricritical_point()
print(f"tricritical point: hf* = {h_star:.10f}, beta* = {b_star:.10f}\n")
print(f"{'hf':>6} {'beta_c':>10}  order")
for p in critical_line(0.495, 34):
    print(f"{p.h_field:6.3f} {p.beta_crit:10.5f}  {p.order}")

# %% [markdown]
# What each region looks like to the landscape classifier.

# %%
for beta, hf in [(0.5, 0.25), (1.0, 0.0), (b_star, h_star), (3.0, 0.25), (3.0, 0.47), (5.0, 0.6)]:
    lab = classify_regime(beta, hf)
    print(f"beta={beta:<6.3f} hf={hf:<6.4f} -> {lab.case.value:<20} n={lab.degeneracy_n} maxima={lab.n_maxima}")
