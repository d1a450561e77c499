"""Purely dephasing (QND) qubit coupled to a squeezed thermal Ohmic bath.

Units: hbar = k_B = 1.  The qubit Hamiltonian is ``omega/2 * sigma_z``
and the bath spectral density is ``I(w) = gamma0/pi * w * exp(-w/omega_c)``
with a frequency-independent squeeze magnitude ``r`` and a linear squeeze
phase ``Phi(w) = a*w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import DEFAULT_QUAD, QuadratureSpec, integrate_semi_infinite, integrate_semi_infinite_vec
from .state import KrausSet, QubitState, from_angles


@dataclass(frozen=True)
class BathSpec:
    """Squeezed thermal bath together with the qubit frequency.

    ``a`` is the slope of the squeeze phase used by the dephasing model;
    ``Phi`` is the constant squeeze phase of the dissipative model.
    """

    omega: float = 1.0
    omega_c: float = 40.0
    gamma0: float = 0.0025
    T: float = 0.0
    r: float = 0.0
    a: float = 0.0
    Phi: float = 0.0

    def __post_init__(self):
        for name in ("omega", "omega_c", "gamma0", "T", "r", "a", "Phi"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.omega <= 0 or self.omega_c <= 0:
            raise ValueError("omega and omega_c must be positive")
        if self.gamma0 < 0:
            raise ValueError("gamma0 must be non-negative")
        if self.T < 0:
            raise ValueError("temperature must be non-negative")
        if self.r < 0:
            raise ValueError("squeeze magnitude r must be non-negative")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


def _coth_half(w, T):
    if T == 0:
        return np.ones_like(w)
    x = np.asarray(w) / (2.0 * T)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 20.0, 1.0, 1.0 / np.tanh(np.maximum(x, 1e-300)))


def _gamma_integrand(t, bath: BathSpec):
    """Integrand of gamma(t) in frequency, vectorized over ``t``.

    Uses |(e^{iwt}-1)cosh r + (e^{-iwt}-1) sinh r e^{2iaw}|^2
      = 4 sin^2(wt/2) [cosh 2r - sinh 2r cos(w(t - 2a))].
    """
    t = np.asarray(t, dtype=float)
    ch, sh = math.cosh(2 * bath.r), math.sinh(2 * bath.r)
    pref = bath.gamma0 / math.pi

    def f(w):
        if w == 0.0:
            # small-w limit of the integrand is finite only at T = 0 where it vanishes;
            # for T > 0 the limit is T t^2 (cosh 2r - sinh 2r) * pref, handled by continuity
            if bath.T == 0:
                return np.zeros_like(t)
            return pref * bath.T * t**2 * (ch - sh)
        s = np.sin(0.5 * w * t)
        squeeze = ch - sh * np.cos(w * (t - 2 * bath.a))
        return pref * math.exp(-w / bath.omega_c) * _coth_half(w, bath.T) * 2.0 * s * s / w * squeeze

    return f


@lru_cache(maxsize=4096)
def _gamma_cached(t: float, bath: BathSpec, quad: QuadratureSpec) -> float:
    if t == 0.0 or bath.gamma0 == 0.0:
        return 0.0
    f = _gamma_integrand(t, bath)
    return integrate_semi_infinite(lambda w: float(f(w)), quad, scale=bath.omega_c)


def gamma_qnd(t: float, bath: BathSpec, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Decoherence function gamma(t) by quadrature over the Ohmic continuum.

    Results are memoized per (t, bath, quad); the cache is read-only after
    insertion and safe for concurrent readers.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    return _gamma_cached(float(t), bath, quad)


def gamma_qnd_grid(times, bath: BathSpec, quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """gamma(t) on a whole time grid with one shared adaptive quadrature."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if bath.gamma0 == 0.0 or times.size == 0:
        return np.zeros_like(times)
    f = _gamma_integrand(times, bath)
    out = integrate_semi_infinite_vec(f, quad, scale=bath.omega_c)
    out[times == 0.0] = 0.0
    return out


def eta_qnd(t: float, bath: BathSpec) -> float:
    """Continuum form of eta(t); drops out of qubit dynamics, kept for checks."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    return -bath.gamma0 / math.pi * math.atan(bath.omega_c * t)


@dataclass(frozen=True)
class DephasingSolution:
    t: float
    gamma: float
    eta: float
    lam: float
    beta: float
    coherence_factor: float  # exp(-omega^2 gamma) = sqrt(1 - lambda), kept exact near lambda = 1


def dephasing_solution(
    t: float, bath: BathSpec, quad: QuadratureSpec = DEFAULT_QUAD, gamma: float | None = None
) -> DephasingSolution:
    if gamma is None:
        gamma = gamma_qnd(t, bath, quad)
    lam = -math.expm1(-2.0 * bath.omega**2 * gamma)
    return DephasingSolution(
        t=t, gamma=gamma, eta=eta_qnd(t, bath), lam=lam, beta=bath.omega * t,
        coherence_factor=math.exp(-bath.omega**2 * gamma),
    )


def qnd_state(
    t: float,
    theta0: float,
    phi0: float,
    bath: BathSpec,
    quad: QuadratureSpec = DEFAULT_QUAD,
    gamma: float | None = None,
) -> QubitState:
    """Reduced state at time t (Schrödinger picture) from the closed form.

    Populations keep their initial values; the coherence rotates at
    ``omega`` and decays by ``exp(-omega^2 gamma(t))``.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    if gamma is None:
        gamma = gamma_qnd(t, bath, quad)
    rho = np.array(from_angles(theta0, phi0).rho)
    damp = math.exp(-bath.omega**2 * gamma)
    rho[0, 1] = 0.5 * math.sin(theta0) * np.exp(-1j * (bath.omega * t + phi0)) * damp
    rho[1, 0] = np.conj(rho[0, 1])
    return QubitState(rho)


def qnd_bloch_grid(times, theta0: float, phi0: float, bath: BathSpec, gammas) -> np.ndarray:
    """Bloch vectors (n, 3) of the QND evolution for precomputed gamma samples."""
    times = np.asarray(times, dtype=float)
    radius = math.sin(theta0) * np.exp(-bath.omega**2 * np.asarray(gammas))
    phase = bath.omega * times + phi0
    z = np.full_like(times, math.cos(theta0))
    return np.stack([radius * np.cos(phase), radius * np.sin(phase), z], axis=1)


def phase_damping_kraus(
    t: float, bath: BathSpec, quad: QuadratureSpec = DEFAULT_QUAD, gamma: float | None = None
) -> KrausSet:
    """Phase damping channel equivalent to the QND evolution up to time t.

    The free precession is folded into ``E0`` via ``beta(t) = omega t``.
    """
    sol = dephasing_solution(t, bath, quad, gamma)
    return phase_damping_ops(sol.lam, sol.beta, keep=sol.coherence_factor)


def phase_damping_ops(lam: float, beta: float = 0.0, keep: float | None = None) -> KrausSet:
    """Phase damping Kraus pair; ``keep`` may supply sqrt(1 - lam) computed without cancellation."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda={lam!r} outside [0, 1]")
    if keep is None:
        keep = math.sqrt(1 - lam)
    e0 = np.array([[1, 0], [0, np.exp(1j * beta) * keep]], dtype=complex)
    e1 = np.array([[0, 0], [0, math.sqrt(lam)]], dtype=complex)
    return KrausSet([e0, e1])
