"""
How the eigenvalue depends on the diameter
==========================================

Small D: lambda behaves like the flat value (p-1)(pi_p/(2D))^p.
Large D: ln lambda decays like -(n-1) sqrt(-K) D up to a bounded offset.
The same data is what ``pfreq sweep --format csv`` writes.
"""

import math

import numpy as np

from pfreq import model1d
from pfreq.model1d import ModelParams

p, n = 2.0, 3
print("     D        lambda          lambda / flat    ln(lambda) + (n-1)D")
for D in np.geomspace(1e-3, 40, 14):
    params = ModelParams(p, n, -1.0, D)
    lam = model1d.eigenvalue_from_D(params, profile=False).lambda_bar
    ratio = lam / model1d.asymptotic_small_D(params)
    print(f"{D:9.4g}  {lam:14.8e}  {ratio:14.10f}  {model1d.large_D_log_offset(params, lam):12.6f}")

# %%
# A least-squares slope over D in [20, 40] recovers -(n-1).
Ds = np.linspace(20, 40, 11)
for p in (1.5, 2.0, 3.0):
    logs = [math.log(model1d.eigenvalue_from_D(ModelParams(p, n, -1.0, D), profile=False).lambda_bar)
            for D in Ds]
    print(f"p = {p}: fitted slope {np.polyfit(Ds, logs, 1)[0]:.6f}, expected {-(n - 1)}")

# %%
# The McKean constant ((n-1)/p)^p is a different quantity (it needs an upper
# sectional curvature bound); lambda drops below it once D is large.
params = ModelParams(2.0, n, -1.0, 5.0)
print("\nMcKean constant:", model1d.mckean_bound(params),
      " lambda at D=5:", model1d.eigenvalue_from_D(params, profile=False).lambda_bar)
