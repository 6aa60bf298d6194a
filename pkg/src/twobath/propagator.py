"""Closed-form time evolution of the two-oscillator Gaussian state.

The master equation is mapped, in the mixed representation ``(q, z)`` (Fourier
variable of the centre coordinate ``u = (x + y)/2`` and half-difference
``z = (x - y)/2``), onto a first-order PDE whose characteristics obey
``dv/dt = M v / 2m`` with ``v = (z1, z2, q1, q2)``. Along a characteristic the
transformed density matrix picks up a Gaussian factor from the bath noise.
Everything is assembled from the eigen-decomposition of ``M``:

* the flow ``Q exp(D t / 2m) Q^-1`` (coefficients zeta, xi, tau, vartheta),
* noise integrals chi, theta, Lambda accumulated along the characteristic,
* the Gaussian exponent coefficients A, B, C, D, E of the state at time ``t``.

Evaluation at any ``t`` is direct (no time stepping).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import DegenerateSpectrum, ImaginaryResidue, InvalidParameter, SingularNormalization
from .model import InitialState, Regime, SystemParams, effective_temps

__all__ = [
    "DriftMatrix",
    "PropagatorBasis",
    "FlowCoefficients",
    "NoiseIntegrals",
    "SolutionCoefficients",
    "AnalyticPropagator",
    "build_drift_matrix",
    "characteristic_polynomial",
    "eigendecompose",
    "flow_coefficients",
    "noise_integrals",
    "solution_coefficients",
    "covariance_at",
    "basis_for",
]

DEGENERACY_RTOL = 1e-8
SINGULAR_RTOL = 1e-12
# below this relative size the printed c_i ratio is 0/0 (e.g. gamma1 == gamma2)
RATIO_RTOL = 1e-6
RESIDUAL_RTOL = 1e-10
IMAG_RTOL = 1e-8
SERIES_CUTOFF = 1e-6


@dataclass(frozen=True)
class DriftMatrix:
    M: np.ndarray
    m: float
    omega0: float
    kappa: float
    gamma1: float
    gamma2: float


def build_drift_matrix(params: SystemParams) -> DriftMatrix:
    m, w, k = params.m, params.omega0, params.kappa
    M = np.array(
        [
            [2.0 * params.gamma1, 0.0, 1.0, 0.0],
            [0.0, 2.0 * params.gamma2, 0.0, 1.0],
            [-4.0 * m * m * w * w, -4.0 * m * k, 0.0, 0.0],
            [-4.0 * m * k, -4.0 * m * m * w * w, 0.0, 0.0],
        ]
    )
    M.setflags(write=False)
    return DriftMatrix(M, m, w, k, params.gamma1, params.gamma2)


def characteristic_polynomial(drift: DriftMatrix) -> np.ndarray:
    """Coefficients (highest power first) of ``det(lambda I - M)``.

    With ``P_i(l) = l (l - 2 gamma_i) + 4 m^2 omega0^2`` the determinant is
    ``P_1 P_2 - 16 m^2 kappa^2``.
    """
    m, w = drift.m, drift.omega0
    p1 = np.array([1.0, -2.0 * drift.gamma1, 4.0 * m * m * w * w])
    p2 = np.array([1.0, -2.0 * drift.gamma2, 4.0 * m * m * w * w])
    poly = np.polymul(p1, p2)
    poly[-1] -= 16.0 * m * m * drift.kappa**2
    return poly


def _polish_roots(poly, roots, iterations=3):
    dpoly = np.polyder(poly)
    out = []
    for r in roots:
        best, best_res = r, abs(np.polyval(poly, r))
        for _ in range(iterations):
            dp = np.polyval(dpoly, best)
            if dp == 0:
                break
            cand = best - np.polyval(poly, best) / dp
            res = abs(np.polyval(poly, cand))
            if not res < best_res:
                break
            best, best_res = cand, res
        out.append(best)
    return np.array(out, dtype=complex)


def _sorted_eigenvalues(lam):
    scale = max(np.max(np.abs(lam)), 1e-300)
    order = sorted(
        range(len(lam)),
        key=lambda i: (-round(lam[i].real / scale, 9), -lam[i].imag),
    )
    return lam[order]


@dataclass(frozen=True)
class PropagatorBasis:
    """Eigenvalues ``lam`` of M and the eigenvector matrix ``Q`` (columns).

    Rows of ``Q`` are ``(a, b, c, f)`` with ``f = 1``; rows of ``Qinv`` are
    ``(a~, b~, c~, f~)``.
    """

    lam: np.ndarray
    Q: np.ndarray
    Qinv: np.ndarray
    m: float

    @property
    def a(self):
        return self.Q[0]

    @property
    def b(self):
        return self.Q[1]

    @property
    def c(self):
        return self.Q[2]

    @property
    def f(self):
        return self.Q[3]


def _eigenvector(drift: DriftMatrix, lam: complex, lam_scale: float) -> np.ndarray:
    m, w, k = drift.m, drift.omega0, drift.kappa
    g1, g2 = drift.gamma1, drift.gamma2
    d1 = lam - 2.0 * g1
    d2 = lam - 2.0 * g2
    if abs(d1) < SINGULAR_RTOL * lam_scale or abs(d2) < SINGULAR_RTOL * lam_scale:
        raise SingularNormalization(
            f"eigenvalue {lam} coincides with 2*gamma_i; f_i = 1 normalisation fails"
        )

    base = 4.0 * m * m * w * w
    coupling = 4.0 * m * k
    n1 = lam * d1 + base + coupling
    n2 = lam * d2 + base + coupling
    term_scale = abs(lam) ** 2 + base + abs(coupling)
    if abs(n1) > RATIO_RTOL * term_scale:
        ratio = n2 / n1
    else:
        # The printed ratio is 0/0 here. On an eigenvalue P1 P2 = (4 m kappa)^2
        # with P_i = lam (lam - 2 gamma_i) + 4 m^2 omega0^2, so the same value
        # equals P2 / (4 m kappa) = 4 m kappa / P1; take the better conditioned.
        p1 = lam * d1 + base
        p2 = lam * d2 + base
        if max(abs(coupling), abs(p1)) < SINGULAR_RTOL * term_scale:
            raise SingularNormalization(
                f"closed-form eigenvector undefined at lambda = {lam} (decoupled mode)"
            )
        ratio = p2 / coupling if abs(coupling) >= abs(p1) else coupling / p1

    c = -(d1 / d2) * ratio
    a = c / d1
    b = 1.0 / d2
    return np.array([a, b, c, 1.0], dtype=complex)


def eigendecompose(drift: DriftMatrix) -> PropagatorBasis:
    """Eigenvalues from the quartic characteristic polynomial, eigenvectors in closed form."""
    poly = characteristic_polynomial(drift)
    # companion-matrix roots split an exact double root by ~sqrt(eps); M itself
    # is diagonalisable there, so its eigenvalues are the better seed
    lam = _sorted_eigenvalues(_polish_roots(poly, np.linalg.eigvals(drift.M)))
    lam_scale = float(np.max(np.abs(lam)))

    gaps = [abs(lam[i] - lam[j]) for i in range(4) for j in range(i + 1, 4)]
    if min(gaps) < DEGENERACY_RTOL * lam_scale:
        raise DegenerateSpectrum(
            f"characteristic matrix has (nearly) repeated eigenvalues: {lam}"
        )

    Q = np.column_stack([_eigenvector(drift, li, lam_scale) for li in lam])
    M = drift.M
    residual = np.max(np.abs(M @ Q - Q * lam))
    if residual > RESIDUAL_RTOL * np.max(np.abs(M)) * np.max(np.abs(Q)):
        raise SingularNormalization(f"eigenvector residual {residual:.3g} too large")

    Qinv = np.linalg.inv(Q)
    if np.max(np.abs(Q @ Qinv - np.eye(4))) > RESIDUAL_RTOL:
        raise SingularNormalization("eigenvector matrix is numerically singular")
    for arr in (lam, Q, Qinv):
        arr.setflags(write=False)
    return PropagatorBasis(lam=lam, Q=Q, Qinv=Qinv, m=drift.m)


@dataclass(frozen=True)
class FlowCoefficients:
    """Rows of ``Q exp(D t/2m) Q^-1``: z1 <- zeta, z2 <- xi, q1 <- tau, q2 <- vartheta.

    Index 0/1 of every ``*_z`` field multiplies ``z1_0``/``z2_0``, of every
    ``*_q`` field ``q1_0``/``q2_0``.
    """

    zeta_z: np.ndarray
    zeta_q: np.ndarray
    xi_z: np.ndarray
    xi_q: np.ndarray
    tau_z: np.ndarray
    tau_q: np.ndarray
    vartheta_z: np.ndarray
    vartheta_q: np.ndarray

    def matrix(self) -> np.ndarray:
        rows = [
            (self.zeta_z, self.zeta_q),
            (self.xi_z, self.xi_q),
            (self.tau_z, self.tau_q),
            (self.vartheta_z, self.vartheta_q),
        ]
        return np.array([np.concatenate(r) for r in rows])


def flow_coefficients(basis: PropagatorBasis, m: float, t: float) -> FlowCoefficients:
    growth = np.exp(basis.lam * t / (2.0 * m))
    # row r, column k: sum_i Q[r, i] Qinv[i, k] exp(lam_i t / 2m)
    F = np.einsum("ri,i,ik->rk", basis.Q, growth, basis.Qinv)
    return FlowCoefficients(
        zeta_z=F[0, :2], zeta_q=F[0, 2:],
        xi_z=F[1, :2], xi_q=F[1, 2:],
        tau_z=F[2, :2], tau_q=F[2, 2:],
        vartheta_z=F[3, :2], vartheta_q=F[3, 2:],
    )


def _exp_integral(sigma, t):
    """``(exp(sigma t) - 1) / sigma``, i.e. the integral of ``exp(sigma s)`` on [0, t]."""
    x = sigma * t
    if abs(x) < SERIES_CUTOFF:
        return t * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
    return np.expm1(x) / sigma


def _exp_integral_array(sigma: np.ndarray, t: float) -> np.ndarray:
    x = sigma * t
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, sigma)
    series = t * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
    return np.where(small, series, np.expm1(x) / safe)


@dataclass(frozen=True)
class NoiseIntegrals:
    """Quadratic form in ``(z1_0, z2_0, q1_0, q2_0)`` accumulated from the baths.

    The state acquires the factor ``exp(-4 (chi_z[0] z1_0^2 + ... + theta_z z1_0 z2_0
    + ... + Lambda[0][0] z1_0 q1_0 + ...))`` with ``k = 1``.
    """

    chi_z: np.ndarray
    chi_q: np.ndarray
    theta_z: complex
    theta_q: complex
    Lambda: np.ndarray

    def quadratic_form(self) -> np.ndarray:
        """Symmetric ``N`` such that the exponent above is ``-4 v0^T N v0``."""
        N = np.zeros((4, 4), dtype=complex)
        N[0, 0], N[1, 1] = self.chi_z
        N[2, 2], N[3, 3] = self.chi_q
        N[0, 1] = N[1, 0] = self.theta_z / 2.0
        N[2, 3] = N[3, 2] = self.theta_q / 2.0
        for i in range(2):
            for j in range(2):
                N[i, 2 + j] = N[2 + j, i] = self.Lambda[i, j] / 2.0
        return N


def noise_integrals(basis: PropagatorBasis, params: SystemParams, t: float) -> NoiseIntegrals:
    if t < 0:
        raise InvalidParameter(f"noise integrals need t >= 0, got {t}")
    kt = effective_temps(params)
    g1T1 = params.gamma1 * kt.kT1_eff
    g2T2 = params.gamma2 * kt.kT2_eff
    lam, a, b = basis.lam, basis.a, basis.b

    # Pair (i, j) carries 2m/(lam_i+lam_j) (e^{(lam_i+lam_j) t/2m} - 1)
    # (g1T1 a_i a_j + g2T2 b_i b_j); the i = j terms are the m/lam_i (e^{lam_i t/m} - 1)
    # ones. Contracting with the rows of Q^-1 gives the quadratic form directly.
    weight = g1T1 * np.outer(a, a) + g2T2 * np.outer(b, b)
    phi = _exp_integral_array((lam[:, None] + lam[None, :]) / (2.0 * basis.m), t)
    N = basis.Qinv.T @ (weight * phi) @ basis.Qinv
    chi = np.diag(N).copy()
    cross = 2.0 * N  # cross[k, l]: coefficient of v_k v_l, k < l

    return NoiseIntegrals(
        chi_z=chi[:2].copy(),
        chi_q=chi[2:].copy(),
        theta_z=cross[0, 1],
        theta_q=cross[2, 3],
        Lambda=np.array([[cross[0, 2], cross[0, 3]], [cross[1, 2], cross[1, 3]]]),
    )


@dataclass(frozen=True)
class SolutionCoefficients:
    """Real coefficients of the Gaussian exponent
    ``-(A1 q1^2 + A2 q2^2 + B1 z1^2 + B2 z2^2 + E q1 q2 + D z1 z2
    + C11 z1 q1 + C22 z2 q2 + C12 z1 q2 + C21 z2 q1)``.
    """

    A1: float
    A2: float
    B1: float
    B2: float
    C11: float
    C12: float
    C21: float
    C22: float
    D: float
    E: float
    imag_residue: float = 0.0

    @property
    def Ccal(self) -> np.ndarray:
        return np.array([[self.C11, self.C12], [self.C21, self.C22]])

    def covariance(self) -> np.ndarray:
        """Covariance matrix in the ``[x1, p1, x2, p2]`` ordering."""
        return np.array(
            [
                [4 * self.A1, -self.C11, 2 * self.E, -self.C21],
                [-self.C11, self.B1, -self.C12, self.D / 2],
                [2 * self.E, -self.C12, 4 * self.A2, -self.C22],
                [-self.C21, self.D / 2, -self.C22, self.B2],
            ]
        )


def solution_coefficients(
    init: InitialState, basis: PropagatorBasis, params: SystemParams, t: float
) -> SolutionCoefficients:
    if t < 0:
        raise InvalidParameter(f"time must be >= 0, got {t}")
    k = 1.0
    back = flow_coefficients(basis, basis.m, -t)
    noise = noise_integrals(basis, params, t)

    ep, em = init.eps_plus, init.eps_minus
    etp, etm = init.eps_tilde_plus, init.eps_tilde_minus
    K1z = ep + 4 * k * noise.chi_z[0]
    K2z = ep + 4 * k * noise.chi_z[1]
    K1q = etp + 4 * k * noise.chi_q[0]
    K2q = etp + 4 * k * noise.chi_q[1]
    Th_z = 2 * em - 4 * k * noise.theta_z
    Th_q = 2 * etm + 4 * k * noise.theta_q
    L11, L12 = noise.Lambda[0]
    L21, L22 = noise.Lambda[1]

    # column index of each final variable in the backward flow: z1, z2, q1, q2
    zeta = np.concatenate([back.zeta_z, back.zeta_q])
    xi = np.concatenate([back.xi_z, back.xi_q])
    tau = np.concatenate([back.tau_z, back.tau_q])
    vth = np.concatenate([back.vartheta_z, back.vartheta_q])

    def form(u, w):
        # symmetric bilinear form; coefficient of v_u v_w is 2*form(u, w) for u != w
        return (
            K1z * zeta[u] * zeta[w]
            + K2z * xi[u] * xi[w]
            + K1q * tau[u] * tau[w]
            + K2q * vth[u] * vth[w]
            - Th_z / 2 * (zeta[u] * xi[w] + zeta[w] * xi[u])
            + Th_q / 2 * (tau[u] * vth[w] + tau[w] * vth[u])
            + 2 * k * (
                L11 * (zeta[u] * tau[w] + zeta[w] * tau[u])
                + L12 * (zeta[u] * vth[w] + zeta[w] * vth[u])
                + L21 * (xi[u] * tau[w] + xi[w] * tau[u])
                + L22 * (xi[u] * vth[w] + xi[w] * vth[u])
            )
        )

    Z1, Z2, Q1, Q2 = range(4)
    raw = {
        "A1": form(Q1, Q1),
        "A2": form(Q2, Q2),
        "B1": form(Z1, Z1),
        "B2": form(Z2, Z2),
        "C11": 2 * form(Z1, Q1),
        "C12": 2 * form(Z1, Q2),
        "C21": 2 * form(Z2, Q1),
        "C22": 2 * form(Z2, Q2),
        "D": 2 * form(Z1, Z2),
        "E": 2 * form(Q1, Q2),
    }
    scale = max(abs(v) for v in raw.values())
    residue = max(abs(complex(v).imag) for v in raw.values()) / scale
    if residue > IMAG_RTOL:
        worst = max(raw, key=lambda n: abs(complex(raw[n]).imag))
        raise ImaginaryResidue(
            f"coefficient {worst} has relative imaginary part {residue:.3g} at t={t}"
        )
    return SolutionCoefficients(
        **{n: float(complex(v).real) for n, v in raw.items()}, imag_residue=residue
    )


@lru_cache(maxsize=256)
def _cached_basis(m, omega0, kappa, gamma1, gamma2) -> PropagatorBasis:
    # the drift ignores temperatures; the weak regime avoids a spurious regime warning
    params = SystemParams(
        m=m, omega0=omega0, kappa=kappa, gamma1=gamma1, gamma2=gamma2, regime=Regime.WEAK_COUPLING
    )
    return eigendecompose(build_drift_matrix(params))


def basis_for(params: SystemParams) -> PropagatorBasis:
    """Eigen-decomposition for ``params``, shared between calls with the same drift."""
    return _cached_basis(params.m, params.omega0, params.kappa, params.gamma1, params.gamma2)


def covariance_at(
    init: InitialState,
    params: SystemParams,
    t: float,
    basis: PropagatorBasis | None = None,
) -> np.ndarray:
    if basis is None:
        basis = basis_for(params)
    return solution_coefficients(init, basis, params, t).covariance()


class AnalyticPropagator:
    """Closed-form evolution for one parameter set; the basis is computed once."""

    def __init__(self, params: SystemParams, init: InitialState):
        self.params = params
        self.init = init

    @cached_property
    def drift(self) -> DriftMatrix:
        return build_drift_matrix(self.params)

    @cached_property
    def basis(self) -> PropagatorBasis:
        return basis_for(self.params)

    def coefficients(self, t: float) -> SolutionCoefficients:
        return solution_coefficients(self.init, self.basis, self.params, t)

    def covariance(self, t: float) -> np.ndarray:
        return self.coefficients(t).covariance()

    def __call__(self, t: float) -> np.ndarray:
        return self.covariance(t)
