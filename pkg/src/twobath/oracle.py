"""Independent reference solutions built from the second-moment equations.

Taking expectation values of the master equation (hbar = 1) gives, for each
oscillator i coupled to the other oscillator j,

    d<x_i>/dt = <p_i>/m
    d<p_i>/dt = -m omega0^2 <x_i> - kappa <x_j> - (gamma_i/m) <p_i>

because ``-(i gamma/2m)[x, {p, rho}]`` contributes ``-(gamma/m)<{[O, x], p}>/2``
and ``[p, x] = -i``. The double commutator ``-gamma kT [x, [x, rho]]`` only
acts on ``p^2``: ``[[p^2, x], x] = -2``, so ``d<p_i^2>/dt`` gains ``2 gamma_i kT_i``.
With ``G_jk = <{R_j, R_k}>`` this is

    dG/dt = A G + G A^T + 2 Ddiff,    Ddiff = diag(0, 2 g1 kT1, 0, 2 g2 kT2).

Limits checked in the tests: gamma -> 0 conserves energy; kappa -> 0 gives the
equipartition steady state ``<p^2> = m kT``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NotHurwitz, StepSizeUnderflow
from .model import SystemParams, effective_temps

__all__ = [
    "MomentOde",
    "Integration",
    "moment_ode",
    "integrate_moments",
    "lyapunov_steady",
    "default_dt",
]

MIN_DT = 1e-12


@dataclass(frozen=True)
class MomentOde:
    A: np.ndarray
    Ddiff: np.ndarray

    def rhs(self, gamma: np.ndarray) -> np.ndarray:
        return self.A @ gamma + gamma @ self.A.T + 2.0 * self.Ddiff


def moment_ode(params: SystemParams) -> MomentOde:
    m, w, k = params.m, params.omega0, params.kappa
    A = np.array(
        [
            [0.0, 1.0 / m, 0.0, 0.0],
            [-m * w * w, -params.gamma1 / m, -k, 0.0],
            [0.0, 0.0, 0.0, 1.0 / m],
            [-k, 0.0, -m * w * w, -params.gamma2 / m],
        ]
    )
    kt = effective_temps(params)
    D = np.diag([0.0, 2.0 * params.gamma1 * kt.kT1_eff, 0.0, 2.0 * params.gamma2 * kt.kT2_eff])
    return MomentOde(A=A, Ddiff=D)


def default_dt(params: SystemParams) -> float:
    return min(0.01, 0.01 * params.m / max(params.gamma1, params.gamma2, 1.0))


@dataclass(frozen=True)
class Integration:
    """RK4 result at ``t_end`` with a step-doubling error estimate (max-norm)."""

    gamma: np.ndarray
    error: float
    dt: float
    steps: int


def _rk4(ode: MomentOde, gamma0: np.ndarray, t_end: float, n_steps: int) -> np.ndarray:
    n = 4
    y = np.array(gamma0, dtype=float).reshape(-1)
    if n_steps == 0:
        return y.reshape(n, n)
    # d vec(G)/dt = L vec(G) + c with L = A (x) I + I (x) A. For a linear
    # autonomous system the four RK4 stages combine into one affine map
    # y <- R y + r, R = sum_{j<=4} (hL)^j / j!, r = h sum_{j<=3} (hL)^j / (j+1)! c.
    L = np.kron(ode.A, np.eye(n)) + np.kron(np.eye(n), ode.A)
    c = 2.0 * ode.Ddiff.reshape(-1)
    h = t_end / n_steps
    hL = h * L
    eye = np.eye(n * n)
    R = eye + hL @ (eye + hL @ (eye + hL @ (eye + hL / 4.0) / 3.0) / 2.0)
    r = h * (eye + hL @ (eye + hL @ (eye + hL / 4.0) / 3.0) / 2.0) @ c
    for _ in range(n_steps):
        y = R @ y + r
    out = y.reshape(n, n)
    return 0.5 * (out + out.T)


def integrate_moments(
    init: np.ndarray,
    ode: MomentOde,
    t_end: float,
    dt: float,
    rtol: float | None = None,
) -> Integration:
    """Fixed-step RK4 from ``init`` to ``t_end``.

    The run is repeated with half the step; the returned covariance is the
    fine run and ``error`` is ``max|fine - coarse| / 15``. If ``rtol`` is given
    and the relative error exceeds it, the step is halved until it does not,
    raising :class:`StepSizeUnderflow` below ``1e-12``.
    """
    if t_end < 0:
        raise InvalidParameter(f"t_end must be >= 0, got {t_end}")
    if not dt > 0:
        raise InvalidParameter(f"dt must be positive, got {dt}")
    while True:
        if dt < MIN_DT:
            raise StepSizeUnderflow(f"required step {dt:.3g} is below {MIN_DT}")
        n = int(np.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
        coarse = _rk4(ode, init, t_end, n)
        fine = _rk4(ode, init, t_end, 2 * n)
        err = float(np.max(np.abs(fine - coarse))) / 15.0
        h = t_end / (2 * n) if n else dt / 2.0
        if rtol is None or err <= rtol * np.max(np.abs(fine)):
            return Integration(gamma=fine, error=err, dt=h, steps=2 * n)
        dt /= 2.0


def lyapunov_steady(ode: MomentOde) -> np.ndarray:
    """Solve ``A X + X A^T + 2 Ddiff = 0`` as a 16x16 linear system."""
    eig = np.linalg.eigvals(ode.A)
    if np.max(eig.real) >= -1e-12:
        raise NotHurwitz(
            f"drift matrix has eigenvalue with real part {np.max(eig.real):.3g}; "
            "no unique steady state"
        )
    n = 4
    L = np.kron(ode.A, np.eye(n)) + np.kron(np.eye(n), ode.A)
    X = np.linalg.solve(L, -2.0 * ode.Ddiff.reshape(-1)).reshape(n, n)
    X = 0.5 * (X + X.T)
    residual = np.max(np.abs(ode.rhs(X)))
    scale = max(np.max(np.abs(ode.A)) * np.max(np.abs(X)), np.max(np.abs(ode.Ddiff)), 1e-300)
    if residual > 1e-10 * scale:
        raise NotHurwitz(f"Lyapunov residual {residual:.3g} too large; ill-conditioned drift")
    return X
