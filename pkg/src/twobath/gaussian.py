"""Symplectic algebra on two-mode covariance matrices.

Covariances are plain ``(4, 4)`` float arrays in the ``[x1, p1, x2, p2]``
ordering. Logarithmic negativity is reported in bits (log base 2); the von
Neumann entropy in nats (natural log).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NonPhysical, NonPositive, UnpairedSpectrum

__all__ = [
    "SIGMA",
    "SymplecticSpectrum",
    "check_covariance",
    "partial_transpose",
    "symplectic_spectrum",
    "log_negativity",
    "von_neumann_entropy",
    "mode_swap",
]

SIGMA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))

# permutation exchanging (x1, p1) <-> (x2, p2)
_SWAP = np.array(
    [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=float
)

PAIR_RTOL = 1e-7
IMAG_RTOL = 1e-8
UNIT_ATOL = 1e-12


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Symplectic eigenvalues, one per mode, sorted descending."""

    nu: tuple[float, float]
    paired: bool = True

    @property
    def min(self) -> float:
        return self.nu[-1]


def check_covariance(gamma, rtol: float = 1e-9) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4, 4):
        raise InvalidParameter(f"covariance must be 4x4, got shape {gamma.shape}")
    if not np.all(np.isfinite(gamma)):
        raise InvalidParameter("covariance has non-finite entries")
    scale = np.max(np.abs(gamma))
    if np.max(np.abs(gamma - gamma.T)) > rtol * scale:
        raise InvalidParameter("covariance is not symmetric")
    if np.any(np.diag(gamma) <= 0):
        raise InvalidParameter("covariance diagonal must be strictly positive")
    return gamma


def mode_swap(gamma) -> np.ndarray:
    """Relabel the oscillators: ``P G P^T`` with ``P`` exchanging the modes."""
    return _SWAP @ np.asarray(gamma) @ _SWAP.T


def partial_transpose(gamma) -> np.ndarray:
    """Partial transpose on the first mode, i.e. ``p1 -> -p1``."""
    gamma = np.array(gamma, dtype=float)
    gamma[1, :] *= -1.0
    gamma[:, 1] *= -1.0
    return gamma


def symplectic_spectrum(gamma) -> SymplecticSpectrum:
    """Symplectic eigenvalues from the spectrum of ``-sigma G sigma G``.

    The four eigenvalues must be positive reals that coincide in pairs; the
    returned values are the square roots of the pair means.
    """
    gamma = check_covariance(gamma)
    ev = np.linalg.eigvals(-SIGMA @ gamma @ SIGMA @ gamma)
    scale = np.max(np.abs(ev))
    if np.max(np.abs(ev.imag)) > IMAG_RTOL * scale:
        raise NonPositive(f"complex eigenvalues of -sGsG: {ev}")
    ev = np.sort(ev.real)
    if ev[0] <= 0:
        raise NonPositive(f"non-positive eigenvalues of -sGsG: {ev}")
    lo, hi = ev[:2], ev[2:]
    for pair in (lo, hi):
        if abs(pair[1] - pair[0]) > PAIR_RTOL * pair[1]:
            raise UnpairedSpectrum(f"eigenvalues of -sGsG do not pair up: {ev}")
    nu = (float(np.sqrt(hi.mean())), float(np.sqrt(lo.mean())))
    return SymplecticSpectrum(nu=nu, paired=True)


def _log2_clamped(nu: float) -> float:
    if abs(nu - 1.0) < UNIT_ATOL or nu >= 1.0:
        return 0.0
    return float(np.log2(nu))


def log_negativity(gamma) -> float:
    spectrum = symplectic_spectrum(partial_transpose(gamma))
    value = -2.0 * sum(_log2_clamped(nu) for nu in spectrum.nu)
    return value + 0.0  # normalise -0.0


def von_neumann_entropy(gamma, tol: float = 1e-6) -> float:
    """Entropy ``sum_k (N_k+1) ln(N_k+1) - N_k ln N_k`` with ``nu_k = 2 N_k + 1``.

    Raises :class:`NonPhysical` if a symplectic eigenvalue is below ``1 - tol``.
    Occupations in ``[-1e-7, 0)`` are treated as rounding and clamped to zero.
    """
    spectrum = symplectic_spectrum(gamma)
    if spectrum.min < 1.0 - tol:
        raise NonPhysical(
            f"symplectic eigenvalue {spectrum.min:.10g} < 1: not a physical state"
        )
    total = 0.0
    for nu in spectrum.nu:
        n = (nu - 1.0) / 2.0
        if n <= 0.0:
            continue
        total += (n + 1.0) * np.log1p(n) - n * np.log(n)
    return float(total)
