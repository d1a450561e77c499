"""
What the channels do to the Bloch sphere
========================================

Push a dense set of pure states through each channel and fit the image.
Amplitude damping squashes the sphere along z, dephasing squashes it in
the xy plane.
"""

import numpy as np

from qgphase import BathSpec, phase_damping_kraus, sgad_channel
from qgphase.geometry import channel_image, fibonacci_sphere, matched_dephasing_bath, principal_axes

t = 0.15
sphere = fibonacci_sphere(2000)

for r, Phi in [(0.0, 0.0), (0.4, 1.5)]:
    bath = BathSpec(gamma0=0.6, T=5.0, r=r, Phi=Phi)
    _, kraus = sgad_channel(t, bath)
    shape = principal_axes(channel_image(kraus, sphere))
    print(f"SGAD r={r}: centre={np.round(shape.center, 4)}  semi-axes={np.round(shape.semi_axes, 4)}  -> {shape.kind}")

# dephasing at this coupling barely touches the sphere, so pick the
# coupling that shrinks the xy plane as much as the SGAD image on average
scale = float(np.prod(shape.semi_axes) ** (1 / 3))
qbath = matched_dephasing_bath(BathSpec(T=5.0, r=0.4), t, scale)
qshape = principal_axes(channel_image(phase_damping_kraus(t, qbath), sphere))
print(f"QND gamma0={qbath.gamma0:.3f}: semi-axes={np.round(qshape.semi_axes, 4)}  -> {qshape.kind}")
