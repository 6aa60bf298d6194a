"""Two coupled oscillators in separate thermal baths: Gaussian-state dynamics,
steady-state entanglement and critical temperatures."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    InvalidParameter,
    NumericalError,
    RegimeWarning,
    TwoBathError,
    UnstableSystem,
)
from .gaussian import (  # noqa: E402
    log_negativity,
    partial_transpose,
    symplectic_spectrum,
    von_neumann_entropy,
)
from .model import InitialState, Regime, SystemParams, effective_temps, initial_covariance  # noqa: E402
from .propagator import AnalyticPropagator, covariance_at  # noqa: E402
from .steady import (  # noqa: E402
    critical_temperature_curve,
    critical_temperature_equilibrium,
    steady_log_negativity,
    steady_state_covariance,
)

__all__ = [
    "__version__",
    "AnalyticPropagator",
    "InitialState",
    "InvalidParameter",
    "NumericalError",
    "Regime",
    "RegimeWarning",
    "SystemParams",
    "TwoBathError",
    "UnstableSystem",
    "covariance_at",
    "critical_temperature_curve",
    "critical_temperature_equilibrium",
    "effective_temps",
    "initial_covariance",
    "log_negativity",
    "partial_transpose",
    "steady_log_negativity",
    "steady_state_covariance",
    "symplectic_spectrum",
    "von_neumann_entropy",
]
