"""How often do the criteria catch a random pure state?

Haar-random states on n, m = 0 .. D-1 are almost always entangled.  The
table counts how many each test certifies when the local angles are
scanned in steps of pi/4.  This demo uses 200 states per row; the
``entropic-cv random-table`` command runs the full-size version.
"""

from entropic_cv.experiments import default_jobs, random_table

rows = random_table([(2, 200), (3, 200), (5, 100)], seed=2009, points=256, jobs=default_jobs())
print("  D  states  strong %  weak %  MGVT %")
for r in rows:
    print(f"{r['D']:3d}  {r['states']:6d}  {r['n_strong']:8.1f}  {r['n_weak']:6.1f}  {r['n_mgvt']:6.1f}")

# the entropic tests gain the most over MGVT for small D; for larger D the
# reduced states are closer to Gaussian mixtures and the bounds loosen
