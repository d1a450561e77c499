"""Geometric phase of a qubit coupled to a squeezed thermal bath.

Two interaction models are covered: pure dephasing (QND) and dissipation
in the Born-Markov rotating-wave limit.  Each quantity can be computed
from a closed form, from a Kraus channel and from a numerical path.
"""

from .dephasing import BathSpec, gamma_qnd, phase_damping_kraus, qnd_state
from .dissipative import bloch_solution, sgad_channel, squeezed_coeffs
from .errors import ChannelDomainError, DegenerateStateError, NumericalError, QuadratureError
from .numerics import DEFAULT_QUAD, OdeSpec, QuadratureSpec
from .phase import (
    GpResult,
    Trajectory,
    gp_dissipative_closed,
    gp_from_trajectory,
    gp_qnd_closed,
    gp_unitary_mixed,
    unitary_phase,
)
from .state import KrausSet, QubitState, apply_kraus, from_angles

__version__ = "0.1.0"
