"""Where the function G peaks, regime by regime.

Run with ``python3 demos/01_landscape.py``.
"""
# %%
import numpy as np

from rfcw import big_g, dichotomous, find_global_maxima, point_mass

# %% [markdown]
# Without a field, y = 0 is the only maximum up to beta = 1.  Past that, two
# symmetric maxima split off and move outward as beta grows.

# %%
for beta in (0.5, 1.0, 1.5, 2.0, 4.0):
    rep = find_global_maxima(point_mass(0.0), beta)
    locs = ", ".join(f"{m.location:+.6f} (n={m.degeneracy_n})" for m in rep.maxima)
    print(f"h=0      beta={beta:<4}  maxima: {locs}")

# %% [markdown]
# A symmetric field of strength 0.25 pushes the split to a higher beta.  At
# 0.6 the field wins outright and y = 0 stays the unique maximum.

# %%
for hf in (0.25, 0.6):
    for beta in (1.0, 2.5, 8.0):
        rep = find_global_maxima(dichotomous(hf), beta)
        print(f"h=+-{hf:<4} beta={beta:<4}  maxima at {np.round(rep.locations, 6).tolist()}")

# %% [markdown]
# A coarse text profile of G at a ferromagnetic point.  The two bumps have
# exactly the same height.

# %%
spec, beta = dichotomous(0.25), 2.5
ys = np.linspace(-2.5, 2.5, 21)
g = big_g(spec, beta, ys)
for y, v in zip(ys, g):
    bar = "#" * int(round(40 * (v - g.min()) / (g.max() - g.min())))
    print(f"{y:+5.2f} {v:+.4f} {bar}")
