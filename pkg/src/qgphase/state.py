"""Two-level density matrices, Bloch vectors and Kraus maps.

Basis ordering follows the upper-level-first convention: index 0 is the
excited state |1>, index 1 the ground state |0>.  With this ordering
``sigma_z = diag(1, -1)``, ``sigma_plus = |1><0|`` and the coherence
``rho[0, 1]`` equals ``<sigma_minus>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CompletenessError, DegenerateStateError

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)

STATE_TOL = 1e-12
COMPLETENESS_TOL = 1e-10
DEGENERACY_TOL = 1e-9
GAUGE_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QubitState:
    """Validated 2x2 density matrix.

    Construction checks Hermiticity, unit trace and positivity to
    ``STATE_TOL``; use :meth:`from_bloch` to build from a Bloch vector.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix has non-finite entries")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > STATE_TOL:
            raise ValueError(f"density matrix is not Hermitian (deviation {herm:.2e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > STATE_TOL:
            raise ValueError(f"density matrix trace is {tr.real:.15g}, expected 1")
        length = _bloch_length(rho)
        if length > 1.0 + STATE_TOL:
            raise ValueError(f"density matrix is not positive (Bloch length {length:.15g})")
        object.__setattr__(self, "rho", _readonly(rho))

    @classmethod
    def from_bloch(cls, vec: Sequence[float]) -> "QubitState":
        x, y, z = (float(v) for v in vec)
        return cls(bloch_to_matrix((x, y, z)))

    @property
    def bloch(self) -> np.ndarray:
        return matrix_to_bloch(self.rho)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.bloch))

    def __eq__(self, other):
        if not isinstance(other, QubitState):
            return NotImplemented
        return bool(np.array_equal(self.rho, other.rho))

    def __hash__(self):
        return hash(self.rho.tobytes())

    def allclose(self, other: "QubitState", atol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.rho - other.rho)) <= atol)


def bloch_to_matrix(vec) -> np.ndarray:
    x, y, z = vec
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


def matrix_to_bloch(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array(
        [2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]
    )


def _bloch_length(rho) -> float:
    return float(np.linalg.norm(matrix_to_bloch(rho)))


def from_angles(theta0: float, phi0: float) -> QubitState:
    """Pure state ``cos(theta0/2)|1> + exp(i phi0) sin(theta0/2)|0>``."""
    if not 0.0 <= theta0 <= np.pi:
        raise ValueError(f"theta0={theta0!r} outside [0, pi]")
    if not 0.0 <= phi0 < 2 * np.pi:
        raise ValueError(f"phi0={phi0!r} outside [0, 2pi)")
    psi = np.array([np.cos(theta0 / 2), np.exp(1j * phi0) * np.sin(theta0 / 2)])
    rho = np.outer(psi, psi.conj())
    # exact Hermiticity and unit trace regardless of rounding in outer()
    rho = 0.5 * (rho + rho.conj().T)
    rho[1, 1] = 1.0 - rho[0, 0].real
    return QubitState(rho)


class KrausSet:
    """Ordered collection of Kraus operators ``E_j`` for a qubit channel."""

    def __init__(self, ops: Iterable, tol: float = COMPLETENESS_TOL, check: bool = True):
        self.ops = tuple(_readonly(op) for op in ops)
        if not self.ops:
            raise ValueError("a Kraus set needs at least one operator")
        for op in self.ops:
            if op.shape != (2, 2):
                raise ValueError(f"Kraus operators must be 2x2, got {op.shape}")
        self.tol = tol
        if check:
            self.validate()

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __repr__(self):
        return f"KrausSet({len(self.ops)} ops, residual={self.completeness_residual():.2e})"

    def completeness_residual(self) -> float:
        total = sum(op.conj().T @ op for op in self.ops)
        return float(np.max(np.abs(total - IDENTITY)))

    def validate(self):
        res = self.completeness_residual()
        if res > self.tol:
            raise CompletenessError(res, self.tol)

    def apply_matrix(self, rho) -> np.ndarray:
        """Channel action on a raw 2x2 array (no state validation)."""
        rho = np.asarray(rho, dtype=complex)
        return sum(op @ rho @ op.conj().T for op in self.ops)


def apply_kraus(state: QubitState, kraus: KrausSet) -> QubitState:
    kraus.validate()
    out = kraus.apply_matrix(state.rho)
    # symmetrize away rounding so the result passes the strict state checks
    out = 0.5 * (out + out.conj().T)
    return QubitState(out)


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray


def fix_gauge(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the |0> component is real and >= 0.

    Falls back to the |1> component when the |0> amplitude is below
    ``GAUGE_TOL``.  Works on a single 2-vector or a stack of shape (n, 2).
    """
    vec = np.asarray(vec, dtype=complex)
    single = vec.ndim == 1
    v = np.atleast_2d(vec)
    ref = np.where(np.abs(v[:, 1]) > GAUGE_TOL, v[:, 1], v[:, 0])
    phase = np.exp(-1j * np.angle(ref))
    out = v * phase[:, None]
    return out[0] if single else out


def plus_eigenvectors(bloch: np.ndarray) -> np.ndarray:
    """Unit eigenvectors for the larger eigenvalue of ``(I + r.sigma)/2``.

    ``bloch`` has shape (n, 3); rows must have nonzero length.  Returned
    vectors are gauge fixed with :func:`fix_gauge`.
    """
    b = np.atleast_2d(np.asarray(bloch, dtype=float))
    length = np.linalg.norm(b, axis=1)
    n = b / length[:, None]
    nx, ny, nz = n[:, 0], n[:, 1], n[:, 2]
    # two algebraically equivalent unnormalized forms; pick the better conditioned one
    north = np.stack([1 + nz, nx + 1j * ny], axis=1)
    south = np.stack([nx - 1j * ny, 1 - nz], axis=1)
    v = np.where((nz >= 0)[:, None], north, south)
    v = v / np.linalg.norm(v, axis=1)[:, None]
    return fix_gauge(v)


def eigensystem(state: QubitState) -> tuple[EigenPair, EigenPair]:
    """Closed-form eigen-decomposition, ordered by descending eigenvalue.

    Raises DegenerateStateError when the eigenvalue gap (equal to the
    Bloch length) is below ``DEGENERACY_TOL``.
    """
    b = state.bloch
    length = float(np.linalg.norm(b))
    if length < DEGENERACY_TOL:
        raise DegenerateStateError(length)
    plus = plus_eigenvectors(b[None, :])[0]
    minus = fix_gauge(np.array([-np.conj(plus[1]), np.conj(plus[0])]))
    return (
        EigenPair(0.5 * (1 + length), plus),
        EigenPair(0.5 * (1 - length), minus),
    )


def trace_distance(a: QubitState, b: QubitState) -> float:
    return 0.5 * float(np.linalg.norm(a.bloch - b.bloch))
