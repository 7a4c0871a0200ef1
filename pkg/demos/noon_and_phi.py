"""Fock-state superpositions that second moments cannot see.

N00N states (|N,0> + |0,N>)/sqrt(2) have diagonal covariance matrices, and
so does |phi> = |00>/sqrt(2) + (|20> + |02>)/2.  The Simon PPT test works
on covariances only, so it misses all of them.  The strong entropic test
uses the full quadrature distributions; scanning local angles in steps of
pi/4 finds a violation for N up to 5 and for |phi>.
"""

import math

from entropic_cv import (MeasurementSettings, noon_state, phi_state, scan_settings,
                         strong_entropic_test)

for n in range(1, 8):
    res = scan_settings(noon_state(n), ("strong", "weak", "simon"), points=512)
    best = res.best["strong"]
    s = best.settings
    print(f"N={n}: strong best margin {best.margin:+.4f} at theta=({s.theta1:.3f}, {s.theta2:.3f}) "
          f"-> {'detected' if res.violated('strong') else 'not detected'};"
          f" weak {res.violated('weak')}, Simon {res.violated('simon')}")

# N = 2 needs different angles on the two modes
rep = strong_entropic_test(noon_state(2), MeasurementSettings(0.0, math.pi / 2), points=512)
print(f"\nN=2 at (0, pi/2): lhs {rep.lhs:.4f} vs rhs {rep.rhs:.4f}, violated={rep.violated}")

phi = phi_state()
rep = strong_entropic_test(phi, MeasurementSettings(3 * math.pi / 4, math.pi / 4), points=512)
res = scan_settings(phi, ("mgvt", "simon"), points=512)
print(f"|phi> at (-pi/4, pi/4): margin {rep.margin:+.4f}, violated={rep.violated}")
print(f"|phi> second-moment tests: MGVT {res.violated('mgvt')}, Simon {res.violated('simon')}")
