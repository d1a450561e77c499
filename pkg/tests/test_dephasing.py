import math

import numpy as np
import pytest

from qgphase.dephasing import (
    BathSpec,
    dephasing_solution,
    eta_qnd,
    gamma_qnd,
    gamma_qnd_grid,
    phase_damping_kraus,
    phase_damping_ops,
    qnd_bloch_grid,
    qnd_state,
)
from qgphase.numerics import integrate_semi_infinite
from qgphase.state import apply_kraus, from_angles

TAU = 2 * math.pi


def trapezoid_gamma(t, bath, w_max=None, n=2_000_001):
    """Dense trapezoid rule on the unsimplified |...|^2 integrand."""
    w_max = w_max or 60 * bath.omega_c
    w = np.linspace(1e-9, w_max, n)
    amp = (np.exp(1j * w * t) - 1) * math.cosh(bath.r) + (np.exp(-1j * w * t) - 1) * math.sinh(bath.r) * np.exp(
        2j * bath.a * w
    )
    coth = 1.0 if bath.T == 0 else 1 / np.tanh(w / (2 * bath.T))
    f = 0.5 * bath.gamma0 / math.pi / w * np.exp(-w / bath.omega_c) * coth * np.abs(amp) ** 2
    return np.trapezoid(f, w) if hasattr(np, "trapezoid") else np.trapz(f, w)


def test_bath_validation():
    for bad in ({"omega": 0}, {"omega_c": -1}, {"gamma0": -0.1}, {"T": -1}, {"r": -0.2}, {"a": math.inf}):
        with pytest.raises(ValueError):
            BathSpec(**bad)
    assert BathSpec(omega=2.0).period == pytest.approx(math.pi)


def test_gamma_zero_time_and_negative():
    assert gamma_qnd(0.0, BathSpec(T=100, r=0.5)) == 0.0
    with pytest.raises(ValueError):
        gamma_qnd(-1.0, BathSpec())


@pytest.mark.parametrize("t", [0.05, 1.0, math.pi, TAU])
def test_gamma_vacuum_closed_form(t):
    bath = BathSpec(gamma0=0.0025)
    expected = bath.gamma0 / (2 * math.pi) * math.log1p((bath.omega_c * t) ** 2)
    assert gamma_qnd(t, bath) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize(
    "bath, t",
    [
        (BathSpec(gamma0=0.0025), 1.0),
        (BathSpec(gamma0=0.0025, T=50.0), 2.0),
        (BathSpec(gamma0=0.005, T=10.0, r=0.7, a=0.1), 3.0),
        (BathSpec(gamma0=0.0025, r=0.4, a=0.3), TAU),
    ],
)
def test_gamma_against_trapezoid(bath, t):
    assert gamma_qnd(t, bath) == pytest.approx(trapezoid_gamma(t, bath), rel=2e-6)


def test_grid_matches_scalar():
    bath = BathSpec(T=100.0, r=0.4, a=0.05)
    times = np.linspace(0, TAU, 9)
    grid = gamma_qnd_grid(times, bath)
    assert grid[0] == 0.0
    for t, g in zip(times, grid):
        assert g == pytest.approx(gamma_qnd(t, bath), rel=1e-8, abs=1e-14)
    assert np.all(gamma_qnd_grid(times, BathSpec(gamma0=0)) == 0)
    with pytest.raises(ValueError):
        gamma_qnd_grid([-1.0], bath)


def test_gamma_monotone_in_parameters():
    # for t below a few 1/omega_c squeezing can lower gamma slightly
    # (the e^{-2r} factor dominates there), so the grid starts at 0.5
    times = np.linspace(0.5, TAU, 6)
    for T in (0.0, 50.0, 300.0):
        by_r = [gamma_qnd_grid(times, BathSpec(T=T, r=r)) for r in (0.0, 0.2, 0.4, 0.8)]
        assert np.all(np.diff(by_r, axis=0) >= 0)
    by_T = [gamma_qnd_grid(times, BathSpec(T=T, r=0.3)) for T in (0.0, 10.0, 50.0, 300.0)]
    assert np.all(np.diff(by_T, axis=0) >= 0)
    by_g = [gamma_qnd_grid(times, BathSpec(gamma0=g, T=50.0)) for g in (0.001, 0.0025, 0.01)]
    assert np.all(np.diff(by_g, axis=0) >= 0)
    assert gamma_qnd(math.pi, BathSpec(T=300)) > gamma_qnd(math.pi, BathSpec(T=50))


def test_eta():
    bath = BathSpec(gamma0=0.0025)
    assert eta_qnd(0.0, bath) == 0.0
    assert eta_qnd(1e9, bath) == pytest.approx(-bath.gamma0 / 2, rel=1e-9)
    # direct quadrature of -(gamma0/pi) int e^{-w/wc} sin(wt)/w dw
    oracle = -bath.gamma0 / math.pi * integrate_semi_infinite(
        lambda w: math.exp(-w / 40) * (math.sin(w) / w if w else 1.0), scale=40
    )
    assert eta_qnd(1.0, bath) == pytest.approx(oracle, rel=1e-9)
    with pytest.raises(ValueError):
        eta_qnd(-1, bath)


def test_qnd_state_examples():
    bath = BathSpec(T=100.0, r=0.4)
    assert qnd_state(0.0, 1.0, 0.5, bath).allclose(from_angles(1.0, 0.5), atol=1e-15)
    assert np.allclose(qnd_state(2.0, 0.0, 0.0, bath).rho, np.diag([1, 0]))
    s = qnd_state(3.0, 2.0, 1.0, bath)
    assert s.rho[0, 0].real == pytest.approx(math.cos(1.0) ** 2, abs=1e-15)
    with pytest.raises(ValueError):
        qnd_state(-1.0, 1.0, 0.0, bath)


def test_lambda_range():
    sol = dephasing_solution(2.0, BathSpec(T=300.0))
    assert 0 <= sol.lam < 1
    assert sol.coherence_factor == pytest.approx(math.sqrt(1 - sol.lam))
    assert sol.beta == pytest.approx(2.0)


def test_kraus_at_zero_is_identity():
    ks = phase_damping_kraus(0.0, BathSpec())
    assert np.allclose(ks.ops[0], np.eye(2))
    assert np.allclose(ks.ops[1], 0)


def test_kraus_reproduces_state_strong_damping():
    bath = BathSpec(gamma0=0.6, T=5.0)
    for t in (0.5, 3.0, TAU):
        g = gamma_qnd(t, bath)
        kraus = phase_damping_kraus(t, bath, gamma=g)
        assert kraus.completeness_residual() < 1e-12
        via = apply_kraus(from_angles(1.0, 0.3), kraus)
        assert np.max(np.abs(via.rho - qnd_state(t, 1.0, 0.3, bath, gamma=g).rho)) < 1e-12


def test_full_damping_limit():
    ks = phase_damping_ops(1.0)
    out = apply_kraus(from_angles(1.2, 0.4), ks)
    assert abs(out.rho[0, 1]) < 1e-15
    assert out.rho[0, 0].real == pytest.approx(math.cos(0.6) ** 2)
    with pytest.raises(ValueError):
        phase_damping_ops(1.5)


def test_inspiral():
    bath = BathSpec(T=50.0, r=0.3)
    times = np.linspace(0, TAU, 33)
    bloch = qnd_bloch_grid(times, 1.0, 0.2, bath, gamma_qnd_grid(times, bath))
    assert np.all(bloch[:, 2] == math.cos(1.0))
    radius = np.hypot(bloch[:, 0], bloch[:, 1])
    assert np.all(np.diff(radius) < 0)
