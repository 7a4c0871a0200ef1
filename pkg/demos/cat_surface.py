"""Dephased two-mode cat states and the weak entropic test.

rho = N (|a><a| + |b><b| + (1 - p)(|a><b| + |b><a|)), a = |alpha, alpha>,
b = |-alpha, -alpha>.  p = 1 is a classical mixture and never detected;
for p < 1 the coherence shows up in the joint distribution of x1 - x2 and
p1 + p2.  Negative entries below mark detection.
"""

import numpy as np

from entropic_cv.experiments import cat_surface

alphas = np.round(np.arange(0.0, 2.01, 0.25), 3)
ps = np.round(np.arange(0.0, 1.01, 0.25), 3)
rows = cat_surface(alphas, ps, points=512)
grid = {(r["alpha"], r["p"]): r["lhs_minus_rhs"] for r in rows}

print("alpha \\ p " + "".join(f"{p:>9.2f}" for p in ps))
for a in alphas:
    print(f"{a:9.2f} " + "".join(f"{grid[(float(a), float(p))]:9.4f}" for p in ps))
