"""Isotropic elastic medium, Helmholtz kernels and the Lamé Fourier symbol.

All routines are pure functions of their arguments.  Distances and
frequencies are in consistent (dimensionless) units; angles in radians.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError, SingularityError

__all__ = [
    "ElasticMedium",
    "WaveParameters",
    "SymbolMatrix",
    "make_medium",
    "wave_parameters",
    "hankel1",
    "hankel1_derivative",
    "fundamental_solution",
    "radial_derivatives",
    "symbol_matrix",
    "symbol_matrix_function",
]


@dataclass(frozen=True)
class ElasticMedium:
    """Homogeneous isotropic solid described by its Lamé constants and density."""

    lam: float
    mu: float
    rho: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and np.isfinite(self.mu) and np.isfinite(self.rho)):
            raise ParameterError("medium parameters must be finite")
        if self.mu <= 0:
            raise ParameterError(f"shear modulus must satisfy mu > 0 (got mu={self.mu})")
        if 3 * self.lam + 2 * self.mu <= 0:
            raise ParameterError(
                f"Lamé constants must satisfy 3*lambda + 2*mu > 0 (got {3 * self.lam + 2 * self.mu})"
            )
        if self.rho <= 0:
            raise ParameterError(f"density must satisfy rho > 0 (got rho={self.rho})")

    @property
    def c_p(self) -> float:
        return float(np.sqrt((self.lam + 2 * self.mu) / self.rho))

    @property
    def c_s(self) -> float:
        return float(np.sqrt(self.mu / self.rho))

    @property
    def gamma_p(self) -> float:
        return float(self.lam + 2 * self.mu)

    @property
    def gamma_s(self) -> float:
        return float(self.mu)

    def speed(self, alpha: str) -> float:
        return {"p": self.c_p, "s": self.c_s}[_check_alpha(alpha)]

    def gamma(self, alpha: str) -> float:
        return {"p": self.gamma_p, "s": self.gamma_s}[_check_alpha(alpha)]

    def wavenumber(self, omega: float, alpha: str) -> float:
        if omega <= 0:
            raise DomainError(f"wavenumbers need omega > 0 (got {omega})")
        return omega / self.speed(alpha)


def _check_alpha(alpha):
    if alpha not in ("p", "s"):
        raise DomainError(f"wave type must be 'p' or 's', got {alpha!r}")
    return alpha


def make_medium(lam: float, mu: float, rho: float) -> ElasticMedium:
    """Validated constructor; raises :class:`ParameterError` on inadmissible constants."""
    return ElasticMedium(float(lam), float(mu), float(rho))


@dataclass(frozen=True)
class WaveParameters:
    c_p: float
    c_s: float
    gamma_p: float
    gamma_s: float
    k_p: float | None = None
    k_s: float | None = None


def wave_parameters(medium: ElasticMedium, omega: float | None = None) -> WaveParameters:
    """Wave speeds, moduli and (if ``omega`` is given) wavenumbers ``k = omega / c``."""
    kp = ks = None
    if omega is not None:
        kp = medium.wavenumber(omega, "p")
        ks = medium.wavenumber(omega, "s")
    return WaveParameters(medium.c_p, medium.c_s, medium.gamma_p, medium.gamma_s, kp, ks)


# ---------------------------------------------------------------------------
# Hankel functions


def _hankel_args(n, x):
    n = np.asarray(n)
    if not np.issubdtype(n.dtype, np.integer):
        if np.any(n != np.round(n)):
            raise DomainError("hankel1 is defined here for integer orders only")
        n = n.astype(int)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("hankel1 requires x > 0")
    return n, x


def hankel1(n, x):
    """Hankel function of the first kind ``H_n^(1)(x) = J_n(x) + i Y_n(x)``.

    Integer orders of either sign are accepted; negative orders use
    ``H_{-n} = (-1)^n H_n``.  Broadcasts over ``n`` and ``x``.  Real and
    imaginary parts come from separate ``J_n`` and ``Y_n`` evaluations so the
    small Bessel part stays accurate where ``|Y_n|`` dominates.
    """
    n, x = _hankel_args(n, x)
    m = np.abs(n)
    sign = np.where((n < 0) & (m % 2 == 1), -1.0, 1.0)
    out = sign * (special.jv(m, x) + 1j * special.yv(m, x))
    return out[()] if np.ndim(out) == 0 else out


def hankel1_derivative(n, x):
    """``d/dx H_n^(1)(x)`` via ``(H_{n-1} - H_{n+1}) / 2``."""
    n, x = _hankel_args(n, x)
    return 0.5 * (hankel1(n - 1, x) - hankel1(n + 1, x))


# ---------------------------------------------------------------------------
# Helmholtz fundamental solutions


def _norm(x):
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SingularityError("fundamental solution is singular at the origin")
    return r


def radial_derivatives(dim: int, k: float, r):
    """Radial profile ``phi(r)`` of ``Phi_k`` and its first two derivatives.

    3D: ``phi = exp(ikr) / (4 pi r)``; 2D: ``phi = (i/4) H_0^(1)(kr)``.
    """
    r = np.asarray(r, dtype=float)
    if dim == 3:
        e = np.exp(1j * k * r) / (4 * np.pi)
        phi = e / r
        d1 = e * (1j * k * r - 1) / r**2
        d2 = e * (2 - 2j * k * r - (k * r) ** 2) / r**3
    elif dim == 2:
        kr = k * r
        h0 = special.hankel1(0, kr)
        h1 = special.hankel1(1, kr)
        phi = 0.25j * h0
        d1 = -0.25j * k * h1
        # H_1'(z) = H_0(z) - H_1(z)/z
        d2 = -0.25j * k * k * (h0 - h1 / kr)
    else:
        raise DomainError(f"dim must be 2 or 3, got {dim}")
    return phi, d1, d2


def fundamental_solution(dim: int, k: float, x):
    """Outgoing fundamental solution of ``(Delta + k^2) u = -delta`` at offset(s) ``x``.

    ``x`` has shape ``(..., dim)``.
    """
    if k <= 0:
        raise DomainError(f"wavenumber must be positive (got {k})")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise DomainError(f"points must have trailing dimension {dim}")
    r = _norm(x)
    phi, _, _ = radial_derivatives(dim, k, r)
    return phi


# ---------------------------------------------------------------------------
# Fourier symbol of the Lamé operator


@dataclass(frozen=True)
class SymbolMatrix:
    entries: np.ndarray
    xi: np.ndarray
    tau_p: float
    tau_s: float

    @property
    def eigenvalues(self):
        return np.array([self.tau_p, self.tau_s, self.tau_s])


def symbol_matrix(medium: ElasticMedium, xi) -> SymbolMatrix:
    """``A(xi) = (mu/rho)|xi|^2 I + ((lambda+mu)/rho) xi xi^T``."""
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[-1]
    q = float(xi @ xi)
    a = (medium.mu / medium.rho) * q * np.eye(n) + ((medium.lam + medium.mu) / medium.rho) * np.outer(xi, xi)
    tau_p = (medium.lam + 2 * medium.mu) * q / medium.rho
    tau_s = medium.mu * q / medium.rho
    return SymbolMatrix(a, xi.copy(), tau_p, tau_s)


def symbol_projectors(xi):
    """Longitudinal and transverse projectors ``xi_hat xi_hat^T`` and ``I - xi_hat xi_hat^T``."""
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(xi)
    if r == 0:
        raise SingularityError("projectors undefined at xi = 0")
    e = xi / r
    pl = np.outer(e, e)
    return pl, np.eye(xi.size) - pl


def symbol_matrix_function(medium: ElasticMedium, xi, t: float):
    """Closed-form ``A^{1/2}``, ``A^{-1/2}`` and ``sin(A^{1/2} t)`` for ``xi != 0``."""
    sym = symbol_matrix(medium, xi)
    pl, pt = symbol_projectors(xi)
    rp, rs = np.sqrt(sym.tau_p), np.sqrt(sym.tau_s)
    a_half = rp * pl + rs * pt
    a_invhalf = pl / rp + pt / rs
    sin_t = np.sin(rp * t) * pl + np.sin(rs * t) * pt
    return a_half, a_invhalf, sin_t
