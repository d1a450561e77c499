"""Qubit decaying into a squeezed thermal bath (Born-Markov, rotating wave).

The master equation is solved in the interaction picture.  States handed
to the geometric-phase code are converted to the Schrödinger picture by
attaching ``exp(-i omega t)`` to the coherence ``rho[0, 1]``.

Two independent solution routes are provided next to the closed form:
direct RK4 integration of the master equation and the squeezed
generalized amplitude damping (SGAD) Kraus channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dephasing import BathSpec
from .errors import ChannelDomainError
from .numerics import OdeSolution, OdeSpec, integrate_ode
from .state import SIGMA_MINUS, SIGMA_PLUS, KrausSet, QubitState, bloch_to_matrix

POLE_TOL = 1e-12
SMALL_RATE_TIME = 1e-6
SGAD_PARAM_TOL = 1e-9
SGAD_REPRODUCTION_TOL = 1e-7


@dataclass(frozen=True)
class SqueezedBathCoeffs:
    N_th: float
    N: float
    M: complex
    a_rate: float


def squeezed_coeffs(bath: BathSpec) -> SqueezedBathCoeffs:
    x = math.inf if bath.T == 0 else bath.omega / bath.T
    # exp(-x) underflows long before expm1(x) would overflow
    n_th = 0.0 if x > 700 else 1.0 / math.expm1(x)
    ch2, sh2 = math.cosh(2 * bath.r), math.sinh(2 * bath.r)
    n = n_th * ch2 + math.sinh(bath.r) ** 2
    m = -0.5 * sh2 * complex(math.cos(bath.Phi), math.sin(bath.Phi)) * (2 * n_th + 1)
    return SqueezedBathCoeffs(N_th=n_th, N=n, M=m, a_rate=sh2 * (2 * n_th + 1))


def _dissipator(L, rho):
    Ld = L.conj().T
    LdL = Ld @ L
    return L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)


def lindblad_rhs(rho, coeffs: SqueezedBathCoeffs, gamma0: float) -> np.ndarray:
    """Time derivative of the interaction-picture density matrix."""
    rho = rho.rho if isinstance(rho, QubitState) else np.asarray(rho, dtype=complex)
    sp, sm = SIGMA_PLUS, SIGMA_MINUS
    return (
        gamma0 * (coeffs.N + 1) * _dissipator(sm, rho)
        + gamma0 * coeffs.N * _dissipator(sp, rho)
        - gamma0 * coeffs.M * (sp @ rho @ sp)
        - gamma0 * np.conj(coeffs.M) * (sm @ rho @ sm)
    )


def lindblad_operators(bath: BathSpec) -> list[np.ndarray]:
    """Jump operators R_1, R_2 (R_2 omitted at T = 0)."""
    c = squeezed_coeffs(bath)
    R = SIGMA_MINUS * math.cosh(bath.r) + np.exp(1j * bath.Phi) * SIGMA_PLUS * math.sinh(bath.r)
    ops = [math.sqrt(bath.gamma0 * (c.N_th + 1) / 2) * R]
    if c.N_th > 0:
        ops.append(math.sqrt(bath.gamma0 * c.N_th / 2) * R.conj().T)
    return ops


def lindblad_form_rhs(rho, bath: BathSpec) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((2, 2), dtype=complex)
    for R in lindblad_operators(bath):
        RdR = R.conj().T @ R
        out += 2 * R @ rho @ R.conj().T - RdR @ rho - rho @ RdR
    return out


def random_density_matrix(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
    return bloch_to_matrix(v)


def lindblad_form_check(bath: BathSpec, samples: int = 32, seed: int = 0) -> float:
    """Max deviation between the jump-operator form and :func:`lindblad_rhs`."""
    rng = np.random.default_rng(seed)
    coeffs = squeezed_coeffs(bath)
    worst = 0.0
    for _ in range(samples):
        rho = random_density_matrix(rng)
        diff = lindblad_form_rhs(rho, bath) - lindblad_rhs(rho, coeffs, bath.gamma0)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


# ---------------------------------------------------------------- closed form


def _rates(bath: BathSpec):
    c = squeezed_coeffs(bath)
    k = bath.gamma0 * (2 * c.N + 1)
    return c, k, bath.gamma0 * c.a_rate / 2


def _coherence_factors(t, k, xrate):
    """exp(-kt/2) cosh(x) and exp(-kt/2) sinh(x) with x = xrate * t, overflow safe."""
    t = np.asarray(t, dtype=float)
    x = xrate * t
    up = np.exp(x - 0.5 * k * t)
    down = np.exp(-x - 0.5 * k * t)
    return 0.5 * (up + down), 0.5 * (up - down)


def evolve_interaction(rho0, t, bath: BathSpec) -> np.ndarray:
    """Closed-form solution of the master equation for any initial matrix."""
    rho0 = rho0.rho if isinstance(rho0, QubitState) else np.asarray(rho0, dtype=complex)
    c, k, xrate = _rates(bath)
    decay = math.exp(-k * t)
    z0 = (rho0[0, 0] - rho0[1, 1]).real
    z = decay * z0 + math.expm1(-k * t) / (2 * c.N + 1)
    fc, fs = _coherence_factors(t, k, xrate)
    b = fc * rho0[0, 1] + fs * np.exp(1j * bath.Phi) * rho0[1, 0]
    trace = (rho0[0, 0] + rho0[1, 1]).real
    out = np.array([[0.5 * (trace + z), b], [np.conj(b), 0.5 * (trace - z)]], dtype=complex)
    return out


def to_schrodinger(rho, t, omega) -> np.ndarray:
    out = np.array(rho, dtype=complex, copy=True)
    out[0, 1] *= np.exp(-1j * omega * t)
    out[1, 0] = np.conj(out[0, 1])
    return out


@dataclass(frozen=True)
class BlochSolution:
    """Closed-form trajectory data; fields are scalars or arrays matching ``t``.

    ``A`` is <sigma_z>, ``B`` the interaction-picture coherence <sigma_minus>,
    ``R = |B|`` and ``B = R exp(-i chi)`` with ``chi(0) = phi0``.
    """

    t: np.ndarray
    A: np.ndarray
    B: np.ndarray
    R: np.ndarray
    chi: np.ndarray
    chi_dot: np.ndarray
    pole: bool = False


def is_pole(theta0: float) -> bool:
    return abs(math.sin(theta0)) < POLE_TOL


def bloch_trajectory(t, theta0: float, phi0: float, bath: BathSpec) -> BlochSolution:
    """Closed-form A, B, R, chi at time(s) t for the pure initial state.

    The ratio B(t)/B(0) is ``exp(-kt/2) [cosh x + sinh x exp(i psi)]`` with
    ``psi = Phi + 2 phi0``; its real part is positive, so chi needs no
    unwrapping.  At the poles (B identically zero) chi is held at phi0.
    """
    t = np.asarray(t, dtype=float)
    c, k, xrate = _rates(bath)
    decay = np.exp(-k * t)
    A = decay * math.cos(theta0) + np.expm1(-k * t) / (2 * c.N + 1)
    fc, fs = _coherence_factors(t, k, xrate)
    if is_pole(theta0):
        zero = np.zeros_like(t)
        return BlochSolution(t, A, zero.astype(complex), zero, zero + phi0, zero, pole=True)
    b_minus = 0.5 * math.sin(theta0) * np.exp(-1j * phi0)
    b_plus = np.conj(b_minus)
    B = fc * b_minus + fs * np.exp(1j * bath.Phi) * b_plus
    psi = bath.Phi + 2 * phi0
    u = np.tanh(xrate * t)
    chi = phi0 - np.arctan2(u * math.sin(psi), 1 + u * math.cos(psi))
    sech2 = 1 - u * u
    chi_dot = -xrate * sech2 * math.sin(psi) / (1 + 2 * u * math.cos(psi) + u * u)
    return BlochSolution(t, A, B, np.abs(B), chi, chi_dot)


def bloch_solution(t: float, theta0: float, phi0: float, bath: BathSpec):
    """Closed form at a single time: (BlochSolution, Schrödinger-picture state)."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    sol = bloch_trajectory(float(t), theta0, phi0, bath)
    A = float(sol.A)
    B = complex(sol.B) * np.exp(-1j * bath.omega * t)
    rho = np.array([[0.5 * (1 + A), B], [np.conj(B), 0.5 * (1 - A)]], dtype=complex)
    return sol, QubitState(rho)


def sign_change_time(theta0: float, bath: BathSpec) -> float:
    """Time at which <sigma_z> crosses zero, or inf if it never does."""
    c, k, _ = _rates(bath)
    A0 = math.cos(theta0)
    if A0 <= 0 or k == 0:
        return math.inf
    return math.log1p((2 * c.N + 1) * A0) / k


def lindblad_trajectory(rho0, t_end: float, bath: BathSpec, spec: OdeSpec = OdeSpec()) -> OdeSolution:
    """RK4 integration of the interaction-picture master equation."""
    rho0 = rho0.rho if isinstance(rho0, QubitState) else np.asarray(rho0, dtype=complex)
    coeffs = squeezed_coeffs(bath)
    return integrate_ode(lambda _t, r: lindblad_rhs(r, coeffs, bath.gamma0), rho0, (0.0, t_end), spec)


def asymptotic_state(bath: BathSpec) -> QubitState:
    if bath.gamma0 <= 0:
        raise ValueError("the fixed point needs gamma0 > 0")
    c = squeezed_coeffs(bath)
    q = (c.N + 1) / (2 * c.N + 1)
    return QubitState(np.diag([1 - q, q]).astype(complex))


def gad_bloch_map(t: float, bath: BathSpec):
    """Affine Bloch map ``v -> L v + offset`` of the unsqueezed channel.

    Returns ``(L, offset, lam, p)`` with ``lam = 1 - exp(-gamma0 (2N_th+1) t)``
    and ``p = (N_th+1)/(2N_th+1)``.
    """
    if bath.r != 0:
        raise ValueError("the generalized amplitude damping map requires r = 0")
    c = squeezed_coeffs(bath)
    lam = -math.expm1(-bath.gamma0 * (2 * c.N_th + 1) * t)
    p = (c.N_th + 1) / (2 * c.N_th + 1)
    s = math.sqrt(1 - lam)
    L = np.diag([s, s, 1 - lam])
    offset = np.array([0.0, 0.0, lam * (1 - 2 * p)])
    return L, offset, lam, p


# ---------------------------------------------------------------- SGAD channel


@dataclass(frozen=True)
class SgadChannel:
    p1: float
    p2: float
    alpha: float
    mu: float
    nu: float
    Phi: float
    sgadA: float
    sgadB: float
    sgadC: float
    sgadD: float
    branch: str = "+"
    roots: tuple = ()
    residual: float = 0.0
    notes: tuple = field(default=())

    def kraus(self) -> KrausSet:
        return sgad_kraus(self.p1, self.p2, self.alpha, self.mu, self.nu, self.Phi)


def sgad_kraus(p1, p2, alpha, mu, nu, Phi) -> KrausSet:
    s1, s2 = math.sqrt(p1), math.sqrt(p2)
    e0 = s1 * np.array([[math.sqrt(1 - alpha), 0], [0, 1]], dtype=complex)
    e1 = s1 * np.array([[0, 0], [math.sqrt(alpha), 0]], dtype=complex)
    e2 = s2 * np.array([[math.sqrt(1 - mu), 0], [0, math.sqrt(1 - nu)]], dtype=complex)
    e3 = s2 * np.array([[0, math.sqrt(nu)], [math.sqrt(mu) * np.exp(-1j * Phi), 0]], dtype=complex)
    return KrausSet([e0, e1, e2, e3])


def sgad_auxiliaries(t: float, bath: BathSpec):
    """The four auxiliary reals entering the p2 equation, evaluated overflow-free.

    Returns ``(A, B, C, D, 1 - E, E sinh^2 x)`` where ``E = exp(-k t)``; the
    last two are needed to evaluate the discriminant without cancellation.
    """
    c, k, xrate = _rates(bath)
    x, y = xrate * t, 0.5 * k * t
    one_minus_E = -math.expm1(-2 * y)
    E = math.exp(-2 * y)
    if c.N == 0 or x == 0:
        A = 0.0
    else:
        # sinh^2 x exp(-y) / sinh y, rewritten in decaying exponentials
        A = (2 * c.N + 1) / (2 * c.N) * math.exp(2 * (x - y)) * math.expm1(-2 * x) ** 2 / (2 * one_minus_E)
    B = c.N / (2 * c.N + 1) * one_minus_E
    C = A + B + E
    D = math.exp(2 * (x - y)) * (1 + math.exp(-2 * x)) ** 2 / 4
    E_sinh2 = (math.exp(x - y) - math.exp(-x - y)) ** 2 / 4
    return A, B, C, D, one_minus_E, E_sinh2


def _p2_roots(A, B, C, D, one_minus_E, E_sinh2):
    den = (A + B - C - 1) ** 2 - 4 * D
    base = (
        A * A * B + C * C + A * (B * B - C - B * (1 + C) - D)
        - (1 + B) * D - C * (B + D - 1)
    )
    # the two factors (B - AB + (A-1)C + D) and (A - AB + (B-1)C + D) with
    # C = A + B + E and D - E = E sinh^2 x substituted; the first vanishes
    # identically without squeezing, giving the double root
    f1 = A * (A - one_minus_E) + E_sinh2
    f2 = B * (B - one_minus_E) + E_sinh2
    rad = D * f1 * f2
    return den, base, rad


def _p2_small_time_roots(N, a):
    """Limit of both p2 roots as t -> 0+ (numerator and denominator are O(t^2))."""
    den = (2 * N + 1) ** 2 - a * a
    base = (16 * N**3 + 8 * N**2 - 4 * N * a * a + 2 * a * a) / (8 * N)
    split = a * abs(4 * N * (N + 1) - a * a) / (4 * N)
    return (base + split) / den, (base - split) / den


def _interaction_basis():
    psi = [
        np.array([1, 0]),
        np.array([0, 1]),
        np.array([1, 1]) / math.sqrt(2),
        np.array([1, 1j]) / math.sqrt(2),
    ]
    return [np.outer(v, v.conj()).astype(complex) for v in psi]


def reproduction_residual(kraus: KrausSet, t: float, bath: BathSpec) -> float:
    """Max elementwise gap between the channel and the closed form on a state basis."""
    worst = 0.0
    for rho in _interaction_basis():
        gap = kraus.apply_matrix(rho) - evolve_interaction(rho, t, bath)
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst


def _clip_unit(name, v, tol, details):
    if v < -tol or v > 1 + tol:
        raise ChannelDomainError(f"SGAD parameter {name}={v!r} outside [0, 1]", parameter=name, value=v, **details)
    return min(max(v, 0.0), 1.0)


def sgad_channel(t: float, bath: BathSpec):
    """SGAD parameters and Kraus operators reproducing the closed form at time t.

    Both roots of the quadratic for p2 are tried; a root is kept if it lies
    in [0, 1], yields alpha, mu, nu in [0, 1] and the resulting Kraus set
    reproduces :func:`evolve_interaction` to ``SGAD_REPRODUCTION_TOL``.
    Among admissible roots the smaller residual wins, ties going to "+".

    Returns ``(SgadChannel, KrausSet)``.
    """
    if t <= 0:
        raise ValueError(f"the SGAD identification needs t > 0, got {t!r}")
    c, k, _ = _rates(bath)
    A, B, C, D, one_minus_E, E_sinh2 = sgad_auxiliaries(t, bath)
    notes = []
    if c.N == 0:
        candidates = [("+", 0.0)]
        roots = (0.0, 0.0)
        notes.append("N=0: p2 fixed to 0 (amplitude damping)")
    elif bath.gamma0 * t < SMALL_RATE_TIME:
        plus, minus = _p2_small_time_roots(c.N, c.a_rate)
        candidates = [("+", plus), ("-", minus)]
        roots = (plus, minus)
        notes.append("small gamma0*t: p2 from the t->0 limit")
    else:
        den, base, rad = _p2_roots(A, B, C, D, one_minus_E, E_sinh2)
        if rad < 0:
            if rad < -1e-12 * max(1.0, abs(base) ** 2):
                raise ChannelDomainError(
                    "no real root for p2", roots=(complex(base, 2 * math.sqrt(-rad)) / den,) * 2
                )
            rad = 0.0
        split = 2 * math.sqrt(rad)
        roots = ((base + split) / den, (base - split) / den)
        candidates = [("+", roots[0]), ("-", roots[1])]

    admissible = []
    rejected = {}
    for branch, p2 in candidates:
        details = {"roots": roots, "branch": branch}
        try:
            p2c = _clip_unit("p2", p2, SGAD_PARAM_TOL, details)
            p1c = 1.0 - p2c
            if p2c == 0.0:
                mu = nu = 0.0
            else:
                mu = _clip_unit("mu", A / p2c, SGAD_PARAM_TOL, details)
                nu = _clip_unit("nu", B / p2c, SGAD_PARAM_TOL, details)
            # 1 - C written without cancellation
            one_minus_C = one_minus_E - A - B
            alpha = 0.0 if p1c == 0.0 else _clip_unit("alpha", one_minus_C / p1c, SGAD_PARAM_TOL, details)
            kraus = sgad_kraus(p1c, p2c, alpha, mu, nu, bath.Phi)
        except ChannelDomainError as exc:
            rejected[branch] = str(exc)
            continue
        res = reproduction_residual(kraus, t, bath)
        if res > SGAD_REPRODUCTION_TOL:
            rejected[branch] = f"reproduction residual {res:.2e}"
            continue
        admissible.append((res, branch, p1c, p2c, alpha, mu, nu, kraus))

    if not admissible:
        raise ChannelDomainError(
            f"no admissible p2 root at t={t!r}: roots={roots!r}, rejected={rejected!r}",
            roots=roots,
            rejected=rejected,
        )
    best = min(r[0] for r in admissible)
    res, branch, p1, p2, alpha, mu, nu, kraus = next(r for r in admissible if r[0] <= best + 1e-12)
    if len(admissible) == 2:
        notes.append(f"both roots admissible; kept '{branch}' (residuals {admissible[0][0]:.1e}, {admissible[1][0]:.1e})")
    for b, why in rejected.items():
        notes.append(f"root '{b}' rejected: {why}")
    chan = SgadChannel(
        p1=p1, p2=p2, alpha=alpha, mu=mu, nu=nu, Phi=bath.Phi,
        sgadA=A, sgadB=B, sgadC=C, sgadD=D,
        branch=branch, roots=roots, residual=res, notes=tuple(notes),
    )
    return chan, kraus


def sgad_validity(t: float, bath: BathSpec) -> bool:
    try:
        sgad_channel(t, bath)
    except ChannelDomainError:
        return False
    return True
