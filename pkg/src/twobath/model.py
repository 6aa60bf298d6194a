"""Physical parameters, regime selection and the initial Gaussian state.

Units are hbar = k_B = 1 throughout. Temperatures are therefore energies, and
the thermal weight entering every noise term is ``kT`` in the high-temperature
(quantum Brownian motion) regime and ``(omega0/2) coth(omega0 / 2T)`` in the
weak-coupling regime. The frequency appearing in the coth is taken to be the
bare oscillator frequency ``omega0``.

Covariance matrices use the ordering ``[x1, p1, x2, p2]`` and the convention
``G_jk = <R_j R_k + R_k R_j>``, so the vacuum of a unit-frequency, unit-mass
oscillator has ``G = I``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameter, RegimeWarning, UnstableSystem

__all__ = [
    "Regime",
    "SystemParams",
    "EffectiveTemps",
    "InitialState",
    "coth_weight",
    "effective_temps",
    "initial_covariance",
]


class Regime(enum.Enum):
    HIGH_TEMPERATURE = "high-t"
    WEAK_COUPLING = "weak"

    @classmethod
    def parse(cls, value: "Regime | str") -> "Regime":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {
            "high-t": cls.HIGH_TEMPERATURE,
            "hight": cls.HIGH_TEMPERATURE,
            "high-temperature": cls.HIGH_TEMPERATURE,
            "hightemperature": cls.HIGH_TEMPERATURE,
            "qbm": cls.HIGH_TEMPERATURE,
            "weak": cls.WEAK_COUPLING,
            "weak-coupling": cls.WEAK_COUPLING,
            "weakcoupling": cls.WEAK_COUPLING,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidParameter(
                f"unknown regime {value!r}; expected 'high-t' or 'weak'"
            ) from None


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidParameter(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class SystemParams:
    """Constants of the two-oscillator, two-bath model.

    ``kappa`` is the signed bilinear coupling ``kappa x1 x2``; stability of the
    potential requires ``|kappa| < m omega0**2``.
    """

    m: float = 1.0
    omega0: float = 1.0
    kappa: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    T1: float = 0.0
    T2: float = 0.0
    regime: Regime = Regime.HIGH_TEMPERATURE

    def __post_init__(self):
        for name in ("m", "omega0", "kappa", "gamma1", "gamma2", "T1", "T2"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        object.__setattr__(self, "regime", Regime.parse(self.regime))

        if self.m <= 0:
            raise InvalidParameter(f"m must be positive, got {self.m}")
        if self.omega0 <= 0:
            raise InvalidParameter(f"omega0 must be positive, got {self.omega0}")
        if abs(self.kappa) >= self.m * self.omega0**2:
            raise UnstableSystem(
                f"|kappa| = {abs(self.kappa)} must be below m*omega0^2 = "
                f"{self.m * self.omega0**2}"
            )
        for name in ("gamma1", "gamma2", "T1", "T2"):
            if getattr(self, name) < 0:
                raise InvalidParameter(f"{name} must be >= 0, got {getattr(self, name)}")

        if self.regime is Regime.HIGH_TEMPERATURE:
            low = [n for n in ("T1", "T2") if getattr(self, n) < self.omega0]
            if low:
                warnings.warn(
                    f"high-temperature master equation used with "
                    f"{', '.join(low)} < omega0; results may be unphysical",
                    RegimeWarning,
                    stacklevel=3,
                )

    @property
    def alpha(self) -> float:
        """Dimensionless coupling ``kappa / (m omega0^2)``."""
        return self.kappa / (self.m * self.omega0**2)

    def swapped(self) -> "SystemParams":
        """The same physical system with the oscillator labels exchanged."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            return replace(
                self, gamma1=self.gamma2, gamma2=self.gamma1, T1=self.T2, T2=self.T1
            )

    def with_values(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "omega0": self.omega0,
            "kappa": self.kappa,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "T1": self.T1,
            "T2": self.T2,
            "regime": self.regime.value,
        }


@dataclass(frozen=True)
class EffectiveTemps:
    kT1_eff: float
    kT2_eff: float


def coth_weight(omega: float, T: float) -> float:
    """Return ``coth(omega / 2T)``, with the ``T = 0`` limit equal to 1."""
    if T < 0:
        raise InvalidParameter(f"temperature must be >= 0, got {T}")
    if T == 0:
        return 1.0
    x = omega / (2.0 * T)
    if x > 20.0:
        # coth(x) - 1 = 2 e^{-2x} / (1 - e^{-2x}), exact to double precision
        e = math.exp(-2.0 * x)
        return 1.0 + 2.0 * e / (1.0 - e)
    return 1.0 / math.tanh(x)


def effective_temps(params: SystemParams) -> EffectiveTemps:
    """Thermal weights ``kT_i`` entering the noise terms for the chosen regime."""
    if params.regime is Regime.HIGH_TEMPERATURE:
        return EffectiveTemps(params.T1, params.T2)
    w = params.omega0
    return EffectiveTemps(
        0.5 * w * coth_weight(w, params.T1), 0.5 * w * coth_weight(w, params.T2)
    )


@dataclass(frozen=True)
class InitialState:
    """Centered two-particle Gaussian wavefunction.

    ``s`` is the width in the relative coordinate ``x1 - x2`` and ``d`` the width
    of the centre of mass; the density is
    ``exp(-(x1-x2)^2 / 2s^2 - (x1+x2)^2 / 8d^2) / (2 pi s d)``.
    """

    s: float = 1.0
    d: float = 1.0

    def __post_init__(self):
        for name in ("s", "d"):
            value = _finite(name, getattr(self, name))
            if value <= 0:
                raise InvalidParameter(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def eps_plus(self) -> float:
        return 1.0 / (2.0 * self.s**2) + 1.0 / (8.0 * self.d**2)

    @property
    def eps_minus(self) -> float:
        return 1.0 / (2.0 * self.s**2) - 1.0 / (8.0 * self.d**2)

    @property
    def _eps_det(self) -> float:
        # eps_+^2 - eps_-^2 = 1 / (4 s^2 d^2), written without cancellation
        return 1.0 / (4.0 * self.s**2 * self.d**2)

    @property
    def eps_tilde_plus(self) -> float:
        return self.eps_plus / (4.0 * self._eps_det)

    @property
    def eps_tilde_minus(self) -> float:
        return self.eps_minus / (4.0 * self._eps_det)


def initial_covariance(init: InitialState, params: SystemParams | None = None) -> np.ndarray:
    """Covariance matrix of the initial wavefunction from its Gaussian moments.

    Position moments follow from the variances ``s^2`` of ``r = x1 - x2`` and
    ``4 d^2`` of ``R = x1 + x2``. Momentum moments use the minimum-uncertainty
    conjugates ``p_r = (p1 - p2)/2`` and ``p_R = (p1 + p2)/2``. The state is
    real, so every position-momentum moment vanishes. ``params`` is accepted
    for symmetry with the time-dependent API; the state does not depend on it.
    """
    var_r = init.s**2
    var_R = 4.0 * init.d**2
    xx = (var_R + var_r) / 4.0
    x1x2 = (var_R - var_r) / 4.0
    pr2 = 1.0 / (4.0 * var_r)
    pR2 = 1.0 / (4.0 * var_R)
    pp = pR2 + pr2
    p1p2 = pR2 - pr2

    gamma = np.zeros((4, 4))
    gamma[0, 0] = gamma[2, 2] = 2.0 * xx
    gamma[1, 1] = gamma[3, 3] = 2.0 * pp
    gamma[0, 2] = gamma[2, 0] = 2.0 * x1x2
    gamma[1, 3] = gamma[3, 1] = 2.0 * p1p2
    return gamma
