"""Fourier stability of the constant-speed two-moment map.

For wavenumber angle ``theta`` and foot offset ``lam`` the amplification
matrix is ``G = A(lam) + exp(-i theta) B(lam)`` acting on ``(u, dx v)``.
Everything here is closed form: eigenvalues from the quadratic, norms from
2x2 singular values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cip import constant_stencil
from .errors import InputError

__all__ = [
    "AmplificationReport",
    "SchurMargin",
    "ScanResult",
    "amplification",
    "amplification_matrix",
    "characteristic_coefficients",
    "discriminant_factored",
    "discriminant_q",
    "schur_f",
    "schur_g",
    "schur_margin",
    "condition_scan",
    "spectral_norm",
    "condition_number",
]

_EDGE = 1e-14


def amplification_matrix(theta, lam):
    A, B = constant_stencil(lam)
    return A + np.exp(-1j * theta) * B


def characteristic_coefficients(theta, lam):
    """``(beta, gamma)`` of ``det(zI - G) = z^2 + beta z + gamma``."""
    e = np.exp(-1j * np.asarray(theta, dtype=float))
    lam = np.asarray(lam, dtype=float)
    beta = 2.0 * (e * lam * (1.0 - 3.0 * lam + lam**2) - (1.0 - 2.0 * lam + lam**3))
    gamma = (1.0 - lam) ** 4 + e**2 * lam**4 - 2.0 * e * lam * (1.0 - 2.0 * lam**2 + lam**3)
    return beta, gamma


def discriminant_factored(theta, lam):
    """``beta^2 - 4 gamma`` in its factored form."""
    theta = np.asarray(theta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    bracket = (
        2.0 * (5.0 + lam - lam**2)
        + (-1.0 - 2.0 * lam + 2.0 * lam**2) * np.cos(theta)
        + 3j * (-1.0 + 2.0 * lam) * np.sin(theta)
    )
    return 4.0 * (lam - 1.0) ** 2 * lam**2 * np.exp(-1j * theta) * bracket


def discriminant_q(lam, theta):
    """Squared modulus of the bracket in :func:`discriminant_factored`.

    Positive exactly when the eigenvalues are distinct (for ``0 < lam < 1``).
    """
    lam = np.asarray(lam, dtype=float)
    theta = np.asarray(theta, dtype=float)
    re = 2.0 * (5.0 + lam - lam**2) + (-1.0 - 2.0 * lam + 2.0 * lam**2) * np.cos(theta)
    im = 3.0 * (-1.0 + 2.0 * lam) * np.sin(theta)
    return re**2 + im**2


def schur_f(kappa, theta):
    """``(1 - |gamma|^2) / (4 kappa)`` as a polynomial in ``kappa``, ``cos theta``."""
    k = np.asarray(kappa, dtype=float)
    c = np.cos(theta)
    return 2 - 6 * k + 2 * k**2 - k**3 + (1 - 3 * k - 2 * k**2 + 2 * k**3) * c - k**3 * c**2


def schur_g(kappa, theta):
    """Reduced Schur margin.

    ``(1 - |gamma|^2)^2 - |beta - gamma conj(beta)|^2
    = 4 (2 kappa sin(theta/2))^4 g(kappa, theta)``.
    """
    k = np.asarray(kappa, dtype=float)
    c = np.cos(theta)
    return 3 - 12 * k + 11 * k**2 - 2 * k**3 + k**4 - 2 * k**2 * (1 - k + k**2) * c + k**4 * c**2


def _roots(beta, gamma):
    sq = np.sqrt(beta * beta - 4.0 * gamma + 0j)
    r_minus = 0.5 * (-beta - sq)
    r_plus = 0.5 * (-beta + sq)
    big = np.where(np.abs(r_minus) >= np.abs(r_plus), r_minus, r_plus)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, gamma / big, 0.5 * (-beta) - (big - 0.5 * (-beta)))
    swap = np.abs(small) > np.abs(big)
    return np.where(swap, big, small), np.where(swap, small, big)


def _eigvec(G, rho):
    a, b, c, d = G[..., 0, 0], G[..., 0, 1], G[..., 1, 0], G[..., 1, 1]
    w1 = np.stack([b, rho - a], axis=-1)
    w2 = np.stack([rho - d, c], axis=-1)
    n1 = np.linalg.norm(w1, axis=-1)
    n2 = np.linalg.norm(w2, axis=-1)
    w = np.where((n1 >= n2)[..., None], w1, w2)
    n = np.maximum(n1, n2)
    return w / np.where(n > 0, n, 1.0)[..., None]


def spectral_norm(M):
    """Largest singular value of (stacked) 2x2 matrices, closed form."""
    fro2 = np.sum(np.abs(M) ** 2, axis=(-2, -1))
    det2 = np.abs(M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]) ** 2
    disc = np.sqrt(np.maximum(fro2**2 - 4.0 * det2, 0.0))
    return np.sqrt(0.5 * (fro2 + disc))


def condition_number(M):
    """``||M|| ||M^{-1}||`` in the spectral norm for 2x2 matrices."""
    fro2 = np.sum(np.abs(M) ** 2, axis=(-2, -1))
    det = np.abs(M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0])
    smax2 = 0.5 * (fro2 + np.sqrt(np.maximum(fro2**2 - 4.0 * det**2, 0.0)))
    with np.errstate(divide="ignore"):
        return np.where(det > 0, smax2 / np.where(det > 0, det, 1.0), np.inf)


def _decompose(theta, lam):
    """Eigenvalues, unit-column eigenvector matrix and ``G`` on arrays."""
    theta = np.asarray(theta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    theta, lam = np.broadcast_arrays(theta, lam)
    A, B = constant_stencil(lam)
    A = np.moveaxis(A, (0, 1), (-2, -1)) if A.ndim > 2 else A
    B = np.moveaxis(B, (0, 1), (-2, -1)) if B.ndim > 2 else B
    G = A + np.exp(-1j * theta)[..., None, None] * B
    beta, gamma = characteristic_coefficients(theta, lam)
    rho1, rho2 = _roots(beta, gamma)
    V = np.stack([_eigvec(G, rho1), _eigvec(G, rho2)], axis=-1)

    # explicit forms where the generic eigenvectors degenerate
    trivial = (lam <= _EDGE) | (lam >= 1.0 - _EDGE)
    row0 = ((theta <= _EDGE) | (theta >= 2 * np.pi - _EDGE)) & ~trivial
    phase = np.where(lam >= 0.5, np.exp(-1j * theta), 1.0 + 0j)
    rho1 = np.where(trivial, phase, rho1)
    rho2 = np.where(trivial, phase, rho2)
    kappa = lam * (1.0 - lam)
    rho1 = np.where(row0, 1.0 - 6.0 * kappa + 0j, rho1)
    rho2 = np.where(row0, 1.0 + 0j, rho2)
    s = (1.0 - 2.0 * lam) / 6.0
    ns = np.sqrt(1.0 + s * s)
    V0 = np.zeros(theta.shape + (2, 2), dtype=complex)
    V0[..., 0, 0] = s / ns
    V0[..., 1, 0] = 1.0 / ns
    V0[..., 0, 1] = 1.0
    eye = np.broadcast_to(np.eye(2, dtype=complex), V0.shape)
    V = np.where(trivial[..., None, None], eye, np.where(row0[..., None, None], V0, V))
    return G, beta, gamma, rho1, rho2, V


@dataclass
class AmplificationReport:
    theta: float
    lam: float
    A: np.ndarray
    B: np.ndarray
    G: np.ndarray
    beta: complex
    gamma: complex
    rho1: complex
    rho2: complex
    V: np.ndarray
    M: float


def amplification(theta: float, lam: float) -> AmplificationReport:
    """Amplification matrix, its spectrum and eigenvector conditioning.

    Columns of ``V`` are unit eigenvectors ordered ``|rho1| <= |rho2|``;
    ``M = ||V|| ||V^{-1}||``.
    """
    A, B = constant_stencil(lam)
    G, beta, gamma, rho1, rho2, V = _decompose(theta, lam)
    return AmplificationReport(
        theta=float(theta),
        lam=float(lam),
        A=A,
        B=B,
        G=G,
        beta=complex(beta),
        gamma=complex(gamma),
        rho1=complex(rho1),
        rho2=complex(rho2),
        V=V,
        M=float(condition_number(V)),
    )


@dataclass
class SchurMargin:
    kappa: float
    q_value: float
    f_value: float
    g_value: float
    gamma_abs: float
    eta_abs: float
    stable: bool


def schur_margin(theta: float, lam: float) -> SchurMargin:
    """Schur test for both roots of ``z^2 + beta z + gamma`` inside the unit disk.

    Stable iff ``|gamma| < 1`` and the root ``eta`` of the reduced linear
    polynomial ``(1 - |gamma|^2) z + (beta - gamma conj(beta))`` has
    ``|eta| < 1``.
    """
    beta, gamma = characteristic_coefficients(theta, lam)
    beta, gamma = complex(beta), complex(gamma)
    kappa = lam * (1.0 - lam)
    lead = 1.0 - abs(gamma) ** 2
    num = abs(beta - gamma * beta.conjugate())
    if lead > 0:
        eta_abs = num / lead
    else:
        eta_abs = np.inf if num > 0 else np.nan
    gamma_abs = abs(gamma)
    return SchurMargin(
        kappa=kappa,
        q_value=float(discriminant_q(lam, theta)),
        f_value=float(schur_f(kappa, theta)),
        g_value=float(schur_g(kappa, theta)),
        gamma_abs=gamma_abs,
        eta_abs=float(eta_abs),
        stable=bool(gamma_abs < 1.0 and eta_abs < 1.0),
    )


@dataclass
class ScanResult:
    theta: np.ndarray
    lam: np.ndarray
    rho2_abs: np.ndarray
    M: np.ndarray

    @property
    def max_rho2_abs(self) -> float:
        return float(self.rho2_abs.max())

    @property
    def max_M(self) -> float:
        return float(self.M.max())

    @property
    def argmax_M(self) -> tuple[float, float]:
        i = int(np.argmax(self.M))
        return float(self.theta.flat[i]), float(self.lam.flat[i])

    def rows(self):
        return zip(self.theta.ravel(), self.lam.ravel(), self.rho2_abs.ravel(), self.M.ravel())


def condition_scan(theta_samples: int = 256, lam_samples: int = 256) -> ScanResult:
    """Sample ``[0, 2 pi] x [0, 1]`` (endpoints included) on a uniform grid."""
    if theta_samples < 8 or lam_samples < 8:
        raise InputError("condition_scan needs at least 8 samples per axis")
    th = np.linspace(0.0, 2.0 * np.pi, theta_samples)
    la = np.linspace(0.0, 1.0, lam_samples)
    TH, LA = np.meshgrid(th, la, indexing="ij")
    _, _, _, _, rho2, V = _decompose(TH, LA)
    return ScanResult(TH, LA, np.abs(rho2), condition_number(V))
