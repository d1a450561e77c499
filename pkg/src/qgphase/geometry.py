"""Images of the Bloch sphere under a channel, and their principal semi-axes."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dephasing import BathSpec, gamma_qnd
from .state import KrausSet, bloch_to_matrix, matrix_to_bloch


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` nearly uniform unit vectors (golden-angle spiral), shape (n, 3)."""
    if n < 4:
        raise ValueError("need at least 4 points")
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    rho = np.sqrt(1 - z * z)
    phi = math.pi * (3 - math.sqrt(5)) * i
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def channel_image(kraus: KrausSet, points: np.ndarray) -> np.ndarray:
    return np.array([matrix_to_bloch(kraus.apply_matrix(bloch_to_matrix(p))) for p in points])


@dataclass(frozen=True)
class Spheroid:
    center: np.ndarray
    axes: np.ndarray  # rows are unit principal directions
    semi_axes: np.ndarray

    @property
    def polar(self) -> float:
        """Semi-axis along the direction closest to z."""
        return float(self.semi_axes[self._polar_index()])

    @property
    def equatorial(self) -> float:
        """Mean of the two remaining semi-axes."""
        i = self._polar_index()
        return float(np.mean(np.delete(self.semi_axes, i)))

    def _polar_index(self) -> int:
        return int(np.argmax(np.abs(self.axes[:, 2])))

    @property
    def kind(self) -> str:
        if math.isclose(self.polar, self.equatorial, rel_tol=1e-9):
            return "sphere"
        return "prolate" if self.polar > self.equatorial else "oblate"


def principal_axes(cloud: np.ndarray) -> Spheroid:
    """Semi-axes of a point cloud sampled from an ellipsoid surface.

    Directions come from the covariance eigenvectors; each semi-axis is
    half the extent of the cloud projected on its direction.
    """
    cloud = np.asarray(cloud, dtype=float)
    center = cloud.mean(axis=0)
    _, vecs = np.linalg.eigh(np.cov((cloud - center).T))
    proj = (cloud - center) @ vecs
    semi = 0.5 * (proj.max(axis=0) - proj.min(axis=0))
    return Spheroid(center=center, axes=vecs.T, semi_axes=semi)


def matched_dephasing_bath(bath: BathSpec, t: float, transverse_scale: float) -> BathSpec:
    """Copy of ``bath`` with gamma0 chosen so phase damping at time t scales x, y by ``transverse_scale``.

    gamma(t) is linear in gamma0, so one reference quadrature fixes it.
    """
    if not 0.0 < transverse_scale < 1.0:
        raise ValueError("transverse_scale must lie in (0, 1)")
    ref = replace(bath, gamma0=1.0)
    g_ref = gamma_qnd(t, ref)
    gamma0 = -math.log(transverse_scale) / (bath.omega**2 * g_ref)
    return replace(bath, gamma0=gamma0)
