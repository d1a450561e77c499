"""Exception types raised by the numerical routines."""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure (not of user input)."""


class QuadratureError(NumericalError):
    def __init__(self, message, estimate, residual):
        super().__init__(f"{message} (best estimate {estimate!r}, error estimate {residual!r})")
        self.estimate = estimate
        self.residual = residual


class OdeError(NumericalError):
    def __init__(self, time):
        super().__init__(f"non-finite derivative encountered at t={time!r}")
        self.time = time


class CompletenessError(ValueError):
    def __init__(self, residual, tol):
        super().__init__(
            f"Kraus operators are not trace preserving: ||sum E^dag E - I||_max = {residual:.3e} > {tol:.1e}"
        )
        self.residual = residual


class DegenerateStateError(NumericalError):
    """Raised when the two eigenvalues of a density matrix coincide."""

    def __init__(self, gap, time=None):
        where = "" if time is None else f" at t={time!r}"
        super().__init__(f"degenerate density matrix{where}: eigenvalue gap {gap:.3e}")
        self.gap = gap
        self.time = time


class ChannelDomainError(NumericalError):
    """The squeezed generalized amplitude damping identification has no valid solution."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details
