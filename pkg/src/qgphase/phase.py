"""Mixed-state geometric phase over one quasi-cycle ``t in [0, 2 pi / omega]``.

Three evaluation paths are provided:

* :func:`gp_from_trajectory` works on any sampled density-matrix path.
  The parallel-transport integral is replaced by the discrete
  Pancharatnam sum ``sum_k arg <psi_k|psi_k+1>``, which is exactly gauge
  invariant at finite sampling.
* :func:`gp_qnd_closed` and :func:`gp_dissipative_closed` evaluate the
  closed-form eigen-system of the two models.

All phases are principal values in (-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import dissipative as diss
from .dephasing import BathSpec, gamma_qnd_grid, qnd_bloch_grid
from .errors import DegenerateStateError, NumericalError
from .numerics import DEFAULT_QUAD, OdeSpec, QuadratureSpec
from .state import DEGENERACY_TOL, QubitState, from_angles, matrix_to_bloch, plus_eigenvectors

DEFAULT_SAMPLES = 2048
PURE_START_TOL = 1e-6
LINK_TOL = 1e-6


def wrap_phase(x):
    """Map angles onto (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def angle_distance(a, b):
    """Absolute difference of two angles modulo 2 pi, in [0, pi]."""
    return np.abs(wrap_phase(np.asarray(a) - np.asarray(b)))


def unitary_phase(theta0: float) -> float:
    """-pi (1 - cos theta0): the pure-state result without environment."""
    return -math.pi * (1 - math.cos(theta0))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a trajectory needs at least two sample times")
        if len(self.states) != times.size:
            raise ValueError("times and states differ in length")
        if times[0] != 0.0:
            raise ValueError("trajectories start at t = 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if not all(isinstance(s, QubitState) for s in self.states):
            raise TypeError("states must be QubitState instances")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def samples(self) -> int:
        return self.times.size - 1

    def bloch(self) -> np.ndarray:
        return np.array([s.bloch for s in self.states])


@dataclass(frozen=True)
class GpResult:
    phase: float
    connection_integral: float
    overlap_arg: float
    times: np.ndarray
    theta_t: np.ndarray
    chi_t: np.ndarray
    eigenvalues: np.ndarray
    branch_note: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def bloch_length_final(self) -> float:
        return float(2 * self.eigenvalues[-1] - 1)

    @property
    def theta_final(self) -> float:
        return float(self.theta_t[-1])


def _branch_note(raw: float) -> str:
    wrapped = float(wrap_phase(raw))
    turns = round((raw - wrapped) / (2 * math.pi))
    return "" if turns == 0 else f"raw phase {raw:.12g} reduced by {turns} x 2pi"


def _theta_from_vectors(vecs: np.ndarray) -> np.ndarray:
    # |psi> = sin(theta_t/2)|1> + e^{i..} cos(theta_t/2)|0>
    return 2 * np.arctan2(np.abs(vecs[:, 0]), np.abs(vecs[:, 1]))


def gp_from_trajectory(traj: Trajectory) -> GpResult:
    """Geometric phase of a sampled path that starts in a pure state.

    Only the branch of the larger eigenvalue contributes because the
    initial state is pure; mixed starts and degenerate points raise.
    """
    bloch = traj.bloch()
    lengths = np.linalg.norm(bloch, axis=1)
    lam_plus = 0.5 * (1 + lengths)
    if 1 - lam_plus[0] > PURE_START_TOL:
        raise ValueError(
            f"initial state is mixed (lambda_- = {1 - lam_plus[0]:.3e}); only pure starts are supported"
        )
    bad = np.nonzero(lengths < DEGENERACY_TOL)[0]
    if bad.size:
        i = int(bad[0])
        raise DegenerateStateError(float(lengths[i]), time=float(traj.times[i]))
    vecs = plus_eigenvectors(bloch)
    links = np.einsum("ij,ij->i", vecs[:-1].conj(), vecs[1:])
    # an (almost) orthogonal neighbour means the eigenvector jumped across a
    # degeneracy that fell between two samples
    small = np.nonzero(np.abs(links) < LINK_TOL)[0]
    if small.size:
        i = int(small[0])
        raise DegenerateStateError(float(abs(links[i])), time=float(traj.times[i]))
    connection = float(np.sum(np.angle(links)))
    overlap = np.vdot(vecs[0], vecs[-1])
    if abs(overlap) < LINK_TOL:
        raise NumericalError("initial and final eigenvectors are orthogonal; the phase is undefined")
    total = math.sqrt(lam_plus[0] * lam_plus[-1]) * overlap * np.exp(-1j * connection)
    overlap_arg = float(np.angle(overlap))
    raw = overlap_arg - connection
    theta = _theta_from_vectors(vecs)
    # relative phase of the |0> amplitude; includes the free precession omega t
    chi = np.unwrap(np.angle(vecs[:, 1] * vecs[:, 0].conj()))
    return GpResult(
        phase=float(np.angle(total)),
        connection_integral=connection,
        overlap_arg=overlap_arg,
        times=traj.times,
        theta_t=theta,
        chi_t=chi,
        eigenvalues=lam_plus,
        branch_note=_branch_note(raw),
    )


def _time_grid(bath: BathSpec, samples: int) -> np.ndarray:
    if samples < 2:
        raise ValueError("samples must be >= 2")
    return np.linspace(0.0, bath.period, samples + 1)


def qnd_trajectory(
    theta0: float,
    phi0: float,
    bath: BathSpec,
    samples: int = DEFAULT_SAMPLES,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> Trajectory:
    times = _time_grid(bath, samples)
    gammas = gamma_qnd_grid(times, bath, quad)
    bloch = qnd_bloch_grid(times, theta0, phi0, bath, gammas)
    return Trajectory(times, tuple(QubitState.from_bloch(b) for b in bloch))


def dissipative_trajectory(
    theta0: float, phi0: float, bath: BathSpec, samples: int = DEFAULT_SAMPLES
) -> Trajectory:
    """Schrödinger-picture closed-form path over one period."""
    times = _time_grid(bath, samples)
    sol = diss.bloch_trajectory(times, theta0, phi0, bath)
    coh = sol.B * np.exp(-1j * bath.omega * times)
    states = []
    for A, b in zip(sol.A, coh):
        rho = np.array([[0.5 * (1 + A), b], [np.conj(b), 0.5 * (1 - A)]], dtype=complex)
        states.append(QubitState(rho))
    return Trajectory(times, tuple(states))


def rk4_trajectory(
    theta0: float, phi0: float, bath: BathSpec, samples: int = DEFAULT_SAMPLES, substeps: int = 2
) -> Trajectory:
    """Path obtained by integrating the master equation (independent of the closed form)."""
    tau = bath.period
    sol = diss.lindblad_trajectory(
        from_angles(theta0, phi0), tau, bath, OdeSpec.for_period(tau, samples * substeps)
    )
    times = sol.times[::substeps]
    states = []
    for t, rho in zip(times, sol.values[::substeps]):
        rho = diss.to_schrodinger(rho, t, bath.omega)
        v = matrix_to_bloch(rho / np.trace(rho).real)
        # integration error may push a pure state a hair outside the sphere
        v /= max(1.0, float(np.linalg.norm(v)))
        states.append(QubitState.from_bloch(v))
    return Trajectory(times, tuple(states))


# ------------------------------------------------------------------ closed forms


def _half_angles(z, ecc):
    """sin(theta_t/2), cos(theta_t/2) for Bloch height z and eigen-gap ecc = |bloch|.

    sin^2 = (ecc + z)/(2 ecc), cos^2 = (ecc - z)/(2 ecc); the branch that
    cancels is rewritten through ecc^2 - z^2 = transverse^2.
    """
    z = np.asarray(z, dtype=float)
    ecc = np.asarray(ecc, dtype=float)
    trans2 = np.maximum(ecc * ecc - z * z, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        sin2 = np.where(z >= 0, (ecc + z) / (2 * ecc), trans2 / (2 * ecc * (ecc - z)))
        cos2 = np.where(z >= 0, trans2 / (2 * ecc * (ecc + z)), (ecc - z) / (2 * ecc))
    # poles with z = 0 exactly: split evenly (measure-zero in any integral)
    sin2 = np.where(ecc == 0, 0.5, sin2)
    cos2 = np.where(ecc == 0, 0.5, cos2)
    return np.sqrt(sin2), np.sqrt(cos2)


def _assemble(lam_tau, theta0, s_tau, c_tau, delta, connection, extras, times, theta_t, chi_t, lam_t, note=""):
    s0, c0 = math.sin(theta0 / 2), math.cos(theta0 / 2)
    overlap = c0 * s_tau + np.exp(1j * delta) * s0 * c_tau
    if abs(overlap) == 0.0:
        # both amplitudes vanish only at a pole whose path crossed the origin;
        # with chi frozen the limiting overlap is real and positive
        overlap_arg = float(np.angle(np.exp(1j * delta)))
        note = (note + "; " if note else "") + "zero overlap at pole, limiting argument used"
    else:
        overlap_arg = float(np.angle(overlap))
    raw = overlap_arg - connection
    # the sqrt(lambda) prefactor is positive and leaves the argument unchanged
    phase = float(wrap_phase(raw))
    br = _branch_note(raw)
    note = "; ".join(n for n in (note, br) if n)
    return GpResult(
        phase=phase,
        connection_integral=float(connection),
        overlap_arg=overlap_arg,
        times=times,
        theta_t=theta_t,
        chi_t=chi_t,
        eigenvalues=lam_t,
        branch_note=note,
        extras=extras,
    )


def gp_qnd_closed(
    theta0: float,
    bath: BathSpec,
    quad: QuadratureSpec = DEFAULT_QUAD,
    samples: int = DEFAULT_SAMPLES,
    gammas: np.ndarray | None = None,
) -> GpResult:
    """Closed-form geometric phase of the dephasing model.

    ``int_0^tau cos^2(theta_t/2) dt`` is computed with Simpson's rule on
    ``samples + 1`` equally spaced gamma(t) values.  The phase does not
    depend on phi0.
    """
    if not 0.0 <= theta0 <= math.pi:
        raise ValueError(f"theta0={theta0!r} outside [0, pi]")
    times = _time_grid(bath, samples)
    if gammas is None:
        gammas = gamma_qnd_grid(times, bath, quad)
    z = math.cos(theta0)
    transverse = math.sin(theta0) * np.exp(-bath.omega**2 * np.asarray(gammas))
    ecc = np.hypot(z, transverse)
    s_t, c_t = _half_angles(np.full_like(ecc, z), ecc)
    lam = 0.5 * (1 + ecc)
    connection = bath.omega * integrate.simpson(c_t**2, x=times)
    delta = bath.omega * bath.period
    theta_t = 2 * np.arctan2(s_t, c_t)
    chi_t = np.zeros_like(times)
    return _assemble(
        lam[-1], theta0, s_t[-1], c_t[-1], delta, connection,
        {"gamma_tau": float(gammas[-1])}, times, theta_t, chi_t, lam,
    )


def _dissipative_connection(theta0, phi0, bath, sol_fn, t_cross):
    """int_0^tau (chi' + omega) cos^2(theta_t/2) dt by adaptive quadrature."""
    tau = bath.period

    def integrand(t):
        s = sol_fn(t)
        ecc = math.hypot(float(s.A), 2 * float(s.R))
        _, c = _half_angles(float(s.A), ecc)
        return (float(s.chi_dot) + bath.omega) * float(c) ** 2

    points = [t_cross] if 0 < t_cross < tau else None
    val, _ = integrate.quad(integrand, 0.0, tau, points=points, limit=400, epsabs=1e-13, epsrel=1e-11)
    return val


def gp_dissipative_closed(
    theta0: float, phi0: float, bath: BathSpec, samples: int = DEFAULT_SAMPLES
) -> GpResult:
    """Closed-form geometric phase of the dissipative (squeezed bath) model.

    At the poles theta0 in {0, pi} the coherence vanishes identically and
    chi is frozen at phi0; cos^2(theta_t/2) is then a step that switches
    on where <sigma_z> turns negative, and the integral is taken exactly.
    """
    if not 0.0 <= theta0 <= math.pi:
        raise ValueError(f"theta0={theta0!r} outside [0, pi]")
    tau = bath.period
    times = _time_grid(bath, samples)
    sol = diss.bloch_trajectory(times, theta0, phi0, bath)
    t_cross = diss.sign_change_time(theta0, bath)
    ecc = np.hypot(sol.A, 2 * sol.R)
    note = ""
    if sol.pole:
        # cos^2 is 1 where A < 0 and 0 where A > 0
        if math.cos(theta0) < 0:
            negative_time = tau
        else:
            negative_time = max(0.0, tau - t_cross) if math.isfinite(t_cross) else 0.0
        connection = bath.omega * negative_time
        c_t = (sol.A < 0).astype(float)
        s_t = 1.0 - c_t
        note = "pole: chi held at phi0"
    else:
        connection = _dissipative_connection(
            theta0, phi0, bath, lambda t: diss.bloch_trajectory(t, theta0, phi0, bath), t_cross
        )
        s_t, c_t = _half_angles(sol.A, ecc)
    lam = 0.5 * (1 + ecc)
    delta = float(sol.chi[-1] - sol.chi[0]) + bath.omega * tau
    theta_t = 2 * np.arctan2(s_t, c_t)
    return _assemble(
        lam[-1], theta0, float(s_t[-1]), float(c_t[-1]), delta, connection,
        {"t_cross": t_cross, "A_tau": float(sol.A[-1]), "R_tau": float(sol.R[-1])},
        times, theta_t, np.asarray(sol.chi), lam, note,
    )


def gp_dissipative_expanded(result: GpResult, theta0: float) -> float:
    """Alternate evaluation of a dissipative closed-form result.

    Recomputes the phase as ``atan2(numerator, denominator) - connection``
    from the endpoint quantities stored in ``result`` (two-argument arctan,
    so the quadrant of the overlap is retained).
    """
    s0, c0 = math.sin(theta0 / 2), math.cos(theta0 / 2)
    th = result.theta_final
    s_tau, c_tau = math.sin(th / 2), math.cos(th / 2)
    tau = result.times[-1]
    omega = 2 * math.pi / tau
    delta = float(result.chi_t[-1] - result.chi_t[0]) + omega * tau
    num = math.sin(delta) * s0 * c_tau
    den = math.cos(delta) * s0 * c_tau + c0 * s_tau
    first = math.atan2(num, den) if (num or den) else 0.0
    return float(wrap_phase(first - result.connection_integral))


def gp_unitary_mixed(L: float, Omega: float) -> float:
    """Phase of a mixed state of Bloch length L whose direction sweeps solid angle Omega.

    Equals ``-arctan(L tan(Omega/2))`` with the branch chosen so that L = 1
    gives ``-Omega/2`` modulo 2 pi.  A maximally mixed state (L = 0) is
    assigned phase 0.
    """
    if not 0.0 <= L <= 1.0:
        raise ValueError(f"L={L!r} outside [0, 1]")
    if not 0.0 <= Omega < 4 * math.pi:
        raise ValueError(f"Omega={Omega!r} outside [0, 4pi)")
    if L == 0.0:
        return 0.0
    return -math.atan2(L * math.sin(Omega / 2), math.cos(Omega / 2))
