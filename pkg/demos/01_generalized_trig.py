"""
Generalized sine and cosine
===========================

sin_p is the inverse of ``x -> int_0^x (1 - t^p)^(-1/p) dt``, extended to an
odd function with half period pi_p.  For p = 2 everything collapses to the
classical functions.
"""

import numpy as np

from pfreq import gentrig

# The half period shrinks towards 2 as p grows and blows up as p -> 1.
for p in (1.2, 1.5, 2.0, 3.0, 5.0, 20.0):
    print(f"p = {p:5.1f}   pi_p = {gentrig.pi_p(p):.12f}")

# %%
# The Pythagorean identity holds in the p-norm.
p = 3.0
t = np.linspace(-4, 4, 9)
s, c = gentrig.sincos_p(p, t)
print("\n  t      sin_p      cos_p     |s|^p + |c|^p")
for ti, si, ci in zip(t, s, c):
    print(f"{ti:5.1f} {si:10.6f} {ci:10.6f}   {abs(si) ** p + abs(ci) ** p:.15f}")

# %%
# cos_p really is the derivative of sin_p.
h = 1e-6
fd = (gentrig.sin_p(p, t + h) - gentrig.sin_p(p, t - h)) / (2 * h)
print("\nmax |finite difference - cos_p| =", np.max(np.abs(fd - c)))

# %%
# Near pi_p/2 the function is very flat, so recovering t from sin_p(t) loses
# digits.  When the distance to the peak is known, pass it directly.
tail = 1e-14
print("\ncos_p at pi_p/2 - 1e-14 via t   :", gentrig.cos_p(p, gentrig.pi_p(p) / 2 - tail))
print("cos_p at pi_p/2 - 1e-14 via tail:", gentrig.sincos_from_tail(p, tail)[1])
