import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgphase.errors import CompletenessError, DegenerateStateError
from qgphase.state import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    KrausSet,
    QubitState,
    apply_kraus,
    eigensystem,
    fix_gauge,
    from_angles,
    plus_eigenvectors,
    trace_distance,
)

angles = st.tuples(st.floats(0, math.pi), st.floats(0, 2 * math.pi, exclude_max=True))
ball = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: 1e-6 < np.linalg.norm(v) <= 1
)


def test_rejects_invalid_matrices():
    with pytest.raises(ValueError, match="Hermitian"):
        QubitState(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        QubitState(np.diag([0.6, 0.6]))
    with pytest.raises(ValueError, match="positive"):
        QubitState(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError, match="2x2"):
        QubitState(np.eye(3) / 3)
    with pytest.raises(ValueError):
        QubitState(np.array([[np.nan, 0], [0, 1]]))


def test_state_is_immutable():
    s = from_angles(1.0, 0.5)
    with pytest.raises(ValueError):
        s.rho[0, 0] = 0.0


def test_from_angles_poles_and_range():
    assert np.allclose(from_angles(0.0, 0.0).rho, np.diag([1, 0]))
    assert np.allclose(from_angles(math.pi, 0.0).rho, np.diag([0, 1]))
    with pytest.raises(ValueError):
        from_angles(-0.1, 0.0)
    with pytest.raises(ValueError):
        from_angles(1.0, 2 * math.pi)


@given(angles)
def test_from_angles_bloch_vector(a):
    th, ph = a
    s = from_angles(th, ph)
    expected = [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
    assert np.allclose(s.bloch, expected, atol=1e-12)
    # Bloch components are expectation values of the Pauli matrices
    for sig, comp in zip((SIGMA_X, SIGMA_Y, SIGMA_Z), s.bloch):
        assert np.trace(s.rho @ sig).real == pytest.approx(comp, abs=1e-12)


@given(ball)
def test_bloch_roundtrip(v):
    assert np.allclose(QubitState.from_bloch(v).bloch, v, atol=1e-14)


@given(ball)
@settings(max_examples=60)
def test_eigensystem_matches_numpy(v):
    s = QubitState.from_bloch(v)
    plus, minus = eigensystem(s)
    w = np.linalg.eigvalsh(s.rho)
    assert plus.value == pytest.approx(w[1], abs=1e-12)
    assert minus.value == pytest.approx(w[0], abs=1e-12)
    for pair in (plus, minus):
        assert np.allclose(s.rho @ pair.vector, pair.value * pair.vector, atol=1e-12)
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0)


def test_degenerate_state_raises():
    with pytest.raises(DegenerateStateError):
        eigensystem(QubitState(np.eye(2) / 2))


@given(st.lists(ball, min_size=1, max_size=8))
def test_plus_eigenvectors_gauge(vs):
    vecs = plus_eigenvectors(np.array(vs))
    for v, b in zip(vecs, vs):
        ref = v[1] if abs(v[1]) > 1e-9 else v[0]
        assert abs(ref.imag) < 1e-12 and ref.real >= 0
        rho = QubitState.from_bloch(b).rho
        lam = 0.5 * (1 + np.linalg.norm(b))
        assert np.allclose(rho @ v, lam * v, atol=1e-12)


def test_fix_gauge_fallback_to_upper_component():
    v = fix_gauge(np.array([1j, 0.0]))
    assert np.allclose(v, [1.0, 0.0])


def test_kraus_completeness_checked():
    with pytest.raises(CompletenessError):
        KrausSet([np.eye(2) * 1.1])
    ks = KrausSet([np.eye(2) * 1.1], check=False)
    assert ks.completeness_residual() == pytest.approx(0.21)
    with pytest.raises(ValueError):
        KrausSet([])
    with pytest.raises(ValueError):
        KrausSet([np.eye(3)])


@given(angles, st.floats(0, 1))
def test_apply_kraus_depolarizing(a, p):
    ops = [math.sqrt(1 - 3 * p / 4) * np.eye(2)] + [math.sqrt(p / 4) * s for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    s = from_angles(*a)
    out = apply_kraus(s, KrausSet(ops))
    assert np.allclose(out.bloch, (1 - p) * s.bloch, atol=1e-12)


def test_trace_distance():
    assert trace_distance(from_angles(0, 0), from_angles(math.pi, 0)) == pytest.approx(1.0)
    s = from_angles(1.0, 2.0)
    assert trace_distance(s, s) == 0.0


def test_equality_and_hash():
    a, b = from_angles(0.3, 0.1), from_angles(0.3, 0.1)
    assert a == b and hash(a) == hash(b)
    assert a.allclose(from_angles(0.3 + 1e-12, 0.1))
