"""
Kraus channels against the master equation
==========================================

Each bath model has a Kraus form.  Applying it to a state must give the
same matrix as the closed-form evolution, and the operators must sum to
the identity.
"""

import numpy as np

from qgphase import BathSpec, apply_kraus, from_angles, phase_damping_kraus, qnd_state, sgad_channel
from qgphase.dissipative import evolve_interaction

rho0 = from_angles(1.1, 0.7)

bath = BathSpec(gamma0=0.6, T=5.0, r=0.4, Phi=1.5)
for t in (0.15, 1.0, 2 * np.pi):
    params, kraus = sgad_channel(t, bath)
    gap = np.max(np.abs(kraus.apply_matrix(rho0.rho) - evolve_interaction(rho0.rho, t, bath)))
    print(f"SGAD t={t:.3f}  p1={params.p1:.6f}  p2={params.p2:.6f}  "
          f"completeness={kraus.completeness_residual():.1e}  gap={gap:.1e}")

# the dephasing channel has two Kraus operators and leaves populations alone
qbath = BathSpec(gamma0=0.6, T=5.0, r=0.4)
for t in (0.5, 3.0):
    via = apply_kraus(rho0, phase_damping_kraus(t, qbath))
    direct = qnd_state(t, 1.1, 0.7, qbath)
    print(f"QND  t={t:.1f}  gap={np.max(np.abs(via.rho - direct.rho)):.1e}")
