"""Non-equilibrium steady state, closed-form entanglement and critical temperatures.

Two sources for the steady covariance are kept side by side:

* the closed-form second moments as printed (``printed_steady_moments``), and
* the Lyapunov solution of the moment equations (``oracle_steady_moments``).

``steady_state_covariance`` reconciles them according to ``validate``. The
printed ``<x_i^2>``, ``<x1 x2>`` and ``<x1 p2>`` do not agree with the moment
equations in general; ``adjudicate`` reports which ones and by how much.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ClosedFormMismatch, InvalidParameter, UnstableSystem
from .model import Regime, SystemParams, coth_weight, effective_temps
from .oracle import lyapunov_steady, moment_ode

__all__ = [
    "SteadyMoments",
    "MomentCheck",
    "ClosedFormReport",
    "ClosedFormWarning",
    "printed_steady_moments",
    "oracle_steady_moments",
    "adjudicate",
    "steady_state_covariance",
    "symplectic_weak",
    "log_negativity_weak",
    "steady_symplectic_weak",
    "steady_log_negativity",
    "closed_form_symplectic",
    "closed_form_log_negativity",
    "critical_temperature_equilibrium",
    "critical_temperature_curve",
]

MOMENT_NAMES = ("xx1", "xx2", "pp1", "pp2", "x1x2", "x1p2")
MISMATCH_RTOL = 1e-6
BISECT_ATOL = 1e-12
BISECT_MAXITER = 200


class ClosedFormWarning(UserWarning):
    """Printed steady-state moments were replaced by the Lyapunov values."""


@dataclass(frozen=True)
class SteadyMoments:
    """Non-zero steady second moments; ``<x2 p1> = -<x1 p2>``.

    ``<{x1,p1}>``, ``<{x2,p2}>`` and ``<p1 p2>`` vanish in the steady state.
    """

    xx1: float
    xx2: float
    pp1: float
    pp2: float
    x1x2: float
    x1p2: float

    def covariance(self) -> np.ndarray:
        g = np.zeros((4, 4))
        g[0, 0] = 2 * self.xx1
        g[1, 1] = 2 * self.pp1
        g[2, 2] = 2 * self.xx2
        g[3, 3] = 2 * self.pp2
        g[0, 2] = g[2, 0] = 2 * self.x1x2
        g[0, 3] = g[3, 0] = 2 * self.x1p2
        g[1, 2] = g[2, 1] = -2 * self.x1p2
        return g

    @classmethod
    def from_covariance(cls, gamma) -> "SteadyMoments":
        g = np.asarray(gamma)
        return cls(
            xx1=g[0, 0] / 2,
            xx2=g[2, 2] / 2,
            pp1=g[1, 1] / 2,
            pp2=g[3, 3] / 2,
            x1x2=g[0, 2] / 2,
            x1p2=(g[0, 3] - g[2, 1]) / 4,
        )

    def as_dict(self) -> dict:
        return {n: float(getattr(self, n)) for n in MOMENT_NAMES}


def _require_steady(params: SystemParams):
    if not params.gamma1 + params.gamma2 > 0:
        raise InvalidParameter("a steady state needs gamma1 + gamma2 > 0")
    if abs(params.kappa) >= params.m * params.omega0**2:
        raise UnstableSystem("|kappa| must be below m*omega0^2")


def printed_steady_moments(params: SystemParams) -> SteadyMoments:
    """The closed-form steady moments exactly as printed, with ``kT_i`` per regime."""
    _require_steady(params)
    m, w, k = params.m, params.omega0, params.kappa
    g1, g2 = params.gamma1, params.gamma2
    kt = effective_temps(params)
    kT1, kT2 = kt.kT1_eff, kt.kT2_eff
    w2, w4 = w**2, w**4
    gsum = g1 + g2
    mix = g1 * g2 * w2 + k**2
    stab = m**2 * w4 - k**2

    xx1 = (
        g1 * kT1 * (g2**2 * m**2 * w4 - g2**2 * k**2 + g1 * g2 * m**2 * w4 + k**2 * m**2 * w2)
        + g2 * kT2 * k**2 * (m**2 * w2 + g1 * g2)
    ) / (stab * gsum * mix)
    xx2 = (
        g1 * kT1 * k**2 * (m**2 * w2 + g1 * g2)
        + g2 * kT2 * (g1**2 * m**2 * w4 - g1**2 * k**2 + g1 * g2 * m**2 * w4 + k**2 * m**2 * w2)
    ) / (stab * gsum * mix)
    pp1 = m * (g1 * kT1 * (g2**2 * w2 + g1 * g2 * w2 + k**2) + g2 * kT2 * k**2) / (gsum * mix)
    pp2 = m * (g1 * kT1 * k**2 + g2 * kT2 * (g1**2 * w2 + g1 * g2 * w2 + k**2)) / (gsum * mix)
    x1x2 = (g1 * kT1 * k + g2 * kT2 * k) / (gsum * stab)
    # printed numerator; identically zero as written
    x1p2 = (g1 * kT2 * g2 * k - g2 * kT2 * g1 * k) / (gsum * mix)
    return SteadyMoments(xx1, xx2, pp1, pp2, x1x2, x1p2)


def oracle_steady_moments(params: SystemParams) -> SteadyMoments:
    _require_steady(params)
    return SteadyMoments.from_covariance(lyapunov_steady(moment_ode(params)))


@dataclass(frozen=True)
class MomentCheck:
    name: str
    printed: float
    oracle: float
    deviation: float
    matches: bool


@dataclass(frozen=True)
class ClosedFormReport:
    params: SystemParams
    checks: tuple[MomentCheck, ...]

    @property
    def mismatched(self) -> list[str]:
        return [c.name for c in self.checks if not c.matches]

    def __getitem__(self, name: str) -> MomentCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            c.name: {
                "printed": c.printed,
                "oracle": c.oracle,
                "deviation": c.deviation,
                "matches": c.matches,
            }
            for c in self.checks
        }


def adjudicate(params: SystemParams, rtol: float = MISMATCH_RTOL) -> ClosedFormReport:
    """Compare every printed steady moment with the Lyapunov value.

    Deviations are measured relative to the largest oracle moment, so moments
    that vanish by symmetry are judged on the same scale as the rest.
    """
    printed = printed_steady_moments(params).as_dict()
    oracle = oracle_steady_moments(params).as_dict()
    scale = max(abs(v) for v in oracle.values()) or 1.0
    checks = []
    for name in MOMENT_NAMES:
        dev = abs(printed[name] - oracle[name]) / scale
        checks.append(MomentCheck(name, printed[name], oracle[name], dev, dev <= rtol))
    return ClosedFormReport(params, tuple(checks))


def steady_state_covariance(params: SystemParams, validate: str = "repair") -> np.ndarray:
    """Steady covariance from the printed closed form, checked against Lyapunov.

    ``validate`` selects what happens when a printed moment deviates from the
    Lyapunov value by more than 1e-6 (relative to the largest moment):

    ``"repair"`` (default)
        use the Lyapunov value for that moment and emit :class:`ClosedFormWarning`
    ``"strict"``
        raise :class:`ClosedFormMismatch`
    ``"off"``
        return the printed moments unchecked
    """
    if validate == "off":
        return printed_steady_moments(params).covariance()
    if validate not in ("repair", "strict"):
        raise InvalidParameter(f"unknown validate mode {validate!r}")

    report = adjudicate(params)
    bad = report.mismatched
    if not bad:
        return printed_steady_moments(params).covariance()

    detail = ", ".join(
        f"{c.name}: printed {c.printed:.6g} vs oracle {c.oracle:.6g}"
        for c in report.checks
        if not c.matches
    )
    if validate == "strict":
        raise ClosedFormMismatch(f"closed-form steady moments disagree: {detail}", report.as_dict())
    warnings.warn(f"using Lyapunov values for {detail}", ClosedFormWarning, stacklevel=2)
    merged = {
        c.name: (c.printed if c.matches else c.oracle) for c in report.checks
    }
    return SteadyMoments(**merged).covariance()


def _check_alpha(alpha: float):
    if abs(alpha) > 1:
        raise UnstableSystem(f"|alpha| = {abs(alpha)} > 1: no stable steady state")


def symplectic_weak(omega: float, alpha: float, T1: float, T2: float) -> tuple[float, float]:
    """Leading-order (gamma -> 0) partially transposed symplectic eigenvalues.

    Returns ``(lam_plus, lam_minus)`` with
    ``lam_pm = (coth(omega/2T1) + coth(omega/2T2)) / (2 sqrt(1 +- alpha))``.
    At ``|alpha| = 1`` one of them is infinite.
    """
    _check_alpha(alpha)
    total = coth_weight(omega, T1) + coth_weight(omega, T2)

    def lam(x):
        return math.inf if x <= 0 else total / (2.0 * math.sqrt(x))

    return lam(1.0 + alpha), lam(1.0 - alpha)


def log_negativity_weak(omega: float, alpha: float, T1: float, T2: float) -> float:
    _check_alpha(alpha)
    total = coth_weight(omega, T1) + coth_weight(omega, T2)
    lam = total / (2.0 * math.sqrt(1.0 + abs(alpha)))
    if lam >= 1.0:
        return 0.0
    return -2.0 * math.log2(lam)


def _require_weak(params: SystemParams):
    if params.regime is not Regime.WEAK_COUPLING:
        raise InvalidParameter("closed-form steady entanglement needs the weak-coupling regime")


def steady_symplectic_weak(params: SystemParams) -> tuple[float, float]:
    _require_weak(params)
    return symplectic_weak(params.omega0, params.alpha, params.T1, params.T2)


def steady_log_negativity(params: SystemParams) -> float:
    _require_weak(params)
    return log_negativity_weak(params.omega0, params.alpha, params.T1, params.T2)


def _thermal_sum(params: SystemParams) -> float:
    # 2 kT_eff / omega per bath: coth(omega/2T) when weak, 2T/omega when high-T
    kt = effective_temps(params)
    return 2.0 * (kt.kT1_eff + kt.kT2_eff) / params.omega0


def closed_form_symplectic(params: SystemParams) -> tuple[float, float]:
    """Leading-order steady symplectic eigenvalues of the partial transpose for
    either regime; the weak form with ``kT_i`` replaced by the regime weight."""
    _check_alpha(params.alpha)
    total = _thermal_sum(params)
    return tuple(
        math.inf if x <= 0 else total / (2.0 * math.sqrt(x))
        for x in (1.0 + params.alpha, 1.0 - params.alpha)
    )


def closed_form_log_negativity(params: SystemParams) -> float:
    _check_alpha(params.alpha)
    lam = _thermal_sum(params) / (2.0 * math.sqrt(1.0 + abs(params.alpha)))
    return 0.0 if lam >= 1.0 else -2.0 * math.log2(lam)


def critical_temperature_equilibrium(omega: float, alpha: float) -> float:
    """Bath temperature below which the equilibrium steady state is entangled.

    ``T_c = omega / (2 arccoth(sqrt(1 + |alpha|)))``. For ``alpha = 0`` there is
    no entangled region; ``0.0`` is returned with a :class:`UserWarning`.
    """
    if omega <= 0:
        raise InvalidParameter(f"omega must be positive, got {omega}")
    _check_alpha(alpha)
    if alpha == 0:
        warnings.warn("alpha = 0: critical temperature tends to 0", UserWarning, stacklevel=2)
        return 0.0
    return omega / (2.0 * math.atanh(1.0 / math.sqrt(1.0 + abs(alpha))))


def critical_temperature_curve(omega: float, alpha: float, T1: float) -> float | None:
    """Critical ``T2`` for a given ``T1``, from
    ``coth(omega/2T1) + coth(omega/2T2) = 2 sqrt(1 + |alpha|)``.

    Solved by bisection on ``T2`` (``coth(omega/2T2)`` is increasing in ``T2``).
    Returns ``None`` when no ``T2 > 0`` satisfies it.
    """
    if omega <= 0:
        raise InvalidParameter(f"omega must be positive, got {omega}")
    if T1 < 0:
        raise InvalidParameter(f"T1 must be >= 0, got {T1}")
    _check_alpha(alpha)
    target = 2.0 * math.sqrt(1.0 + abs(alpha)) - coth_weight(omega, T1)
    if abs(target - 1.0) <= 1e-12:
        # end point of the curve, where T2 -> 0
        return 0.0
    if target < 1.0:
        return None

    def g(T2):
        return coth_weight(omega, T2) - target

    lo, hi = 0.0, omega
    while g(hi) < 0:
        lo, hi = hi, 2.0 * hi
    mid = hi
    for _ in range(BISECT_MAXITER):
        mid = 0.5 * (lo + hi)
        val = g(mid)
        if abs(val) < BISECT_ATOL or hi - lo <= 4 * math.ulp(mid):
            break
        if val < 0:
            lo = mid
        else:
            hi = mid
    return mid
