"""
Geometric phase under pure dephasing
====================================

A qubit starts at polar angle theta0 and precesses once while a bath
of oscillators scrambles its phase.  We compare the noisy GP with the
closed-loop value -pi(1 - cos theta0) at a few temperatures and squeezing
strengths.
"""

import numpy as np

from qgphase import BathSpec, gp_qnd_closed, unitary_phase
from qgphase.phase import wrap_phase

thetas = np.linspace(0, np.pi, 9)

# the dephasing exponent gamma(t) only depends on the bath, so the GP for
# every theta0 shares one quadrature
print("theta0   unitary    T=50      T=300     T=300,r=0.6")
rows = []
for T, r in [(50.0, 0.0), (300.0, 0.0), (300.0, 0.6)]:
    bath = BathSpec(gamma0=0.0025, T=T, r=r)
    rows.append([gp_qnd_closed(th, bath, samples=512).phase for th in thetas])

for i, th in enumerate(thetas):
    ref = float(wrap_phase(unitary_phase(th)))
    print(f"{th:6.3f}  {ref:8.4f}  " + "  ".join(f"{col[i]:8.4f}" for col in rows))

# Points at theta0 and pi - theta0 deviate from the unitary curve with
# opposite signs. The equator sits on the branch point, printed as +pi or -pi.
