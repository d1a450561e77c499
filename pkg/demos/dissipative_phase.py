"""
Geometric phase with energy exchange
====================================

Now the bath can flip the qubit.  The state spirals towards the
stationary point, and squeezing makes the decay depend on the phase
of the qubit relative to the squeeze angle.
"""

import numpy as np

from qgphase import BathSpec, gp_dissipative_closed, gp_from_trajectory
from qgphase.phase import dissipative_trajectory, rk4_trajectory

bath = BathSpec(gamma0=0.05, T=2.0, r=0.4, Phi=np.pi / 4)

# three routes to the same number: closed form, sampled closed-form path,
# and a fresh RK4 integration of the master equation
for theta0 in (0.4, np.pi / 2, 2.5):
    closed = gp_dissipative_closed(theta0, 0.0, bath)
    sampled = gp_from_trajectory(dissipative_trajectory(theta0, 0.0, bath))
    rk4 = gp_from_trajectory(rk4_trajectory(theta0, 0.0, bath, samples=1024))
    print(f"theta0={theta0:.3f}  closed={closed.phase:+.6f}  path={sampled.phase:+.6f}  rk4={rk4.phase:+.6f}")

# Temperature dependence on the equator, with and without squeezing.
temps = np.linspace(0, 60, 7)
for r in (0.0, 0.4):
    gp = [gp_dissipative_closed(np.pi / 2, 0.0, BathSpec(gamma0=0.005, T=T, r=r)).phase for T in temps]
    print(f"r={r}:", " ".join(f"{g:+.4f}" for g in gp))
