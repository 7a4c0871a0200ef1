"""Which tests see the entanglement of the eta state?

The eta state is odd in r1 + r2 and Gaussian in r1 - r2.  Its widths
sigma+ and sigma- set how strongly the two modes are correlated, and the
ratio sigma-/sigma+ alone decides which criterion can detect it.  The
entropic sums have a closed form, H[R-] + H[S+] = ln(4 pi e^gamma s) with
s = sigma-/sigma+, so the weak entropic test fires for s < e^(1-gamma)/2
and, through the other pairing, for s > 2/e^(1-gamma).  The second-moment
tests (MGVT and Simon) only fire outside [1/sqrt(3), sqrt(3)].
"""

import math

import numpy as np

from entropic_cv.experiments import eta_row

GAMMA = 0.5772156649015329

print("ratio   H[R+]+H[S-]  H[R-]+H[S+]  ln(2 pi e)   weak  MGVT  Simon")
for ratio in np.round(np.arange(0.4, 2.01, 0.1), 3):
    row = eta_row(ratio, points=512)
    print(f"{ratio:5.2f}   {row['entropy_sum_plus']:11.5f}  {row['entropy_sum_minus']:11.5f}"
          f"  {math.log(2 * math.pi * math.e):10.5f}   {row['weak']!s:5} {row['mgvt']!s:5} {row['simon']!s:5}")

# where the bands end
print()
print(f"entropic band edges: {math.exp(1 - GAMMA) / 2:.4f} and {2 / math.exp(1 - GAMMA):.4f}")
print(f"second-moment band edges: {1 / math.sqrt(3):.4f} and {math.sqrt(3):.4f}")

# the same numbers through the closed form, as a cross-check
row = eta_row(0.5, points=1024)
print(f"\nratio 0.5: computed {row['entropy_sum_minus']:.6f}, "
      f"closed form {math.log(4 * math.pi * math.exp(GAMMA) * 0.5):.6f}")
