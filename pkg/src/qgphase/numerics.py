"""Semi-infinite quadrature and a fixed-step RK4 integrator."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import OdeError, QuadratureError


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureSpec()


def _mapped(f, scale):
    # omega = scale * u / (1 - u), d omega = scale / (1 - u)^2 du
    def g(u):
        if u >= 1.0:
            return 0.0 * f(scale)
        w = scale * u / (1.0 - u)
        return f(w) * scale / (1.0 - u) ** 2

    return g


def integrate_semi_infinite(
    f: Callable[[float], float],
    spec: QuadratureSpec = DEFAULT_QUAD,
    scale: float = 1.0,
) -> float:
    """Integrate ``f`` over ``[0, inf)``.

    The half line is mapped onto ``[0, 1)`` with ``w = scale*u/(1-u)`` and
    the result is computed adaptively there.  ``scale`` should be of the
    order of the decay length of ``f`` (e.g. a spectral cutoff).

    Raises QuadratureError if the requested tolerance is not met within
    ``spec.max_subdivisions`` intervals.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *rest = integrate.quad(
            _mapped(f, scale),
            0.0,
            1.0,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            full_output=1,
        )
    ier = rest[0] if rest and isinstance(rest[0], str) else None
    if ier is not None and err > max(spec.abs_tol, spec.rel_tol * abs(val)):
        raise QuadratureError(f"semi-infinite quadrature did not converge: {ier.strip()}", val, err)
    return float(val)


def integrate_semi_infinite_vec(
    f: Callable[[float], np.ndarray],
    spec: QuadratureSpec = DEFAULT_QUAD,
    scale: float = 1.0,
) -> np.ndarray:
    """Vector-valued version of :func:`integrate_semi_infinite`.

    ``f(w)`` returns an array; all components share one adaptive mesh and
    the error control uses the max norm.  Because one mesh must resolve
    every component, the interval budget is ten times ``max_subdivisions``.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    g = _mapped(f, scale)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad_vec(
            g,
            0.0,
            1.0,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=10 * spec.max_subdivisions,
            norm="max",
            full_output=True,
        )
    if not info.success:
        raise QuadratureError(
            f"vector quadrature did not converge ({info.message})", val, err
        )
    return np.asarray(val)


@dataclass(frozen=True)
class OdeSpec:
    """Fixed-step RK4 settings; the default step is one 4096th of a 2*pi period."""

    step: float = 2 * math.pi / 4096
    method: str = "rk4"

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("ODE step must be positive")
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}; only 'rk4' is available")

    @classmethod
    def for_period(cls, tau: float, steps: int = 4096) -> "OdeSpec":
        return cls(step=tau / steps)


@dataclass(frozen=True)
class OdeSolution:
    times: np.ndarray
    values: np.ndarray


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_span: tuple[float, float],
    spec: OdeSpec = OdeSpec(),
) -> OdeSolution:
    """Classical fourth-order Runge-Kutta on a uniform grid.

    The step is shrunk so that an integer number of steps covers
    ``t_span`` exactly; every step is recorded.  ``y0`` may be real or
    complex and of any shape.
    """
    t0, t1 = map(float, t_span)
    if t1 < t0:
        raise ValueError("t_span must be increasing")
    y = np.array(y0, dtype=np.result_type(np.asarray(y0).dtype, float), copy=True)
    n = max(1, int(math.ceil((t1 - t0) / spec.step - 1e-9))) if t1 > t0 else 0
    h = (t1 - t0) / n if n else 0.0
    times = t0 + h * np.arange(n + 1)
    out = np.empty((n + 1,) + y.shape, dtype=y.dtype)
    out[0] = y

    def f(t, v):
        d = np.asarray(rhs(t, v))
        if not np.all(np.isfinite(d)):
            raise OdeError(t)
        return d

    for i in range(n):
        t = times[i]
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = y
    return OdeSolution(times, out)
