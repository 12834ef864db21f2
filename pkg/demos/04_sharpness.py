"""
Approaching the lower bound with a warped product
=================================================

A rotationally symmetric metric dr^2 + f(r)^2 g_sphere has Ricci >= -(n-1)
when f is sinh near the pole, a cusp delta e^(-r) further out, and a smooth
transition in between.  The ball of radius R_eps has diameter at most 2, and
the test function w(R_eps - r) bounds its first eigenvalue from above.
As eps -> 0 that bound closes on the one-dimensional value.
"""

import numpy as np

from pfreq import sharpness

prof = sharpness.build_warp(1e-2, n=3)
print(f"eps = {prof.epsilon}, delta = {prof.delta:.8f}, R_eps = {prof.domain().R_eps:.8f}")

# %%
# The curvature condition, checked pointwise on the transition zone.
x = np.linspace(prof.a, prof.epsilon, 10_000)
print("max Ricci residual (<= 0 required):", np.max(sharpness.ricci_residual(prof, x)))
print("max radial residual              :", np.max(sharpness.radial_ricci_residual(prof, x)))

# %%
# The convergence study: lower value from the model, upper from the domain.
print("\n   eps        R_eps          lower           upper           gap")
for row in sharpness.convergence_study((1e-1, 3e-2, 1e-2, 3e-3, 1e-3)):
    print(f"{row.epsilon:7.0e}  {row.R_eps:.8f}  {row.lower:.10f}  {row.upper:.10f}  {row.gap:.3e}")

# %%
# The same works for other exponents and dimensions.
for p, n in ((1.5, 2), (3.0, 3)):
    rows = sharpness.convergence_study((1e-1, 1e-2, 1e-3), p=p, n=n)
    print(f"p={p}, n={n}: gaps", ", ".join(f"{r.gap:.2e}" for r in rows))
