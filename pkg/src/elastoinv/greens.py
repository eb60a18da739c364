"""Green's tensors of the Lamé system.

The frequency-domain tensor is assembled from the radial profiles of the
Helmholtz fundamental solutions, so the Hessian is exact rather than a
finite-difference approximation.  In the time domain only the convolution of
the tensor with a smooth pulse is exposed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, SingularityError
from .medium import ElasticMedium, radial_derivatives

__all__ = [
    "ExperimentGeometry",
    "greens_frequency",
    "kelvin_tensor",
    "navier_residual",
    "point_source_response_3d",
    "vanish_time",
]


def _offsets(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise DomainError(f"offsets must have trailing dimension {dim}, got shape {x.shape}")
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SingularityError("Green's tensor is singular at zero offset")
    return x, r


def greens_frequency(medium: ElasticMedium, omega: float, dim: int, x):
    """Time-harmonic Green's tensor ``G_hat(x, omega)``.

    Parameters
    ----------
    medium : ElasticMedium
    omega : float
        Angular frequency, must be positive.
    dim : {2, 3}
    x : array_like, shape (..., dim)
        Offsets ``x - y``; none may vanish.

    Returns
    -------
    ndarray, shape (..., dim, dim), complex
    """
    if not omega > 0:
        raise DomainError(f"omega must be positive (got {omega})")
    if dim not in (2, 3):
        raise DomainError(f"dim must be 2 or 3, got {dim}")
    x, r = _offsets(x, dim)
    kp = omega / medium.c_p
    ks = omega / medium.c_s
    phi_s, d1s, d2s = radial_derivatives(dim, ks, r)
    _, d1p, d2p = radial_derivatives(dim, kp, r)

    xh = x / r[..., None]
    outer = xh[..., :, None] * xh[..., None, :]
    eye = np.eye(dim)
    c = 1.0 / (medium.rho * omega**2)
    iso = phi_s / medium.mu
    radial = (iso + c * (d2s - d2p))[..., None, None]
    trans = (iso + c * (d1s - d1p) / r)[..., None, None]
    return radial * outer + trans * (eye - outer)


def kelvin_tensor(medium: ElasticMedium, x):
    """Static (``omega -> 0``) limit of the 3D tensor, the Kelvin solution."""
    x, r = _offsets(x, 3)
    lam, mu = medium.lam, medium.mu
    xh = x / r[..., None]
    outer = xh[..., :, None] * xh[..., None, :]
    scale = 1.0 / (8 * np.pi * mu * (lam + 2 * mu) * r)
    return scale[..., None, None] * ((lam + 3 * mu) * np.eye(3) + (lam + mu) * outer)


# Central stencils for the second derivative and the first derivative.
_D2 = {2: ((-1, 1.0), (0, -2.0), (1, 1.0)), 4: ((-2, -1 / 12), (-1, 4 / 3), (0, -5 / 2), (1, 4 / 3), (2, -1 / 12))}
_D1 = {2: ((-1, -0.5), (1, 0.5)), 4: ((-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12))}


def navier_residual(medium: ElasticMedium, omega: float, dim: int, x, h=1e-3, order=4):
    """Relative central-difference residual of the Navier operator on each column of ``G_hat``.

    Returns ``||mu Lap v + (lambda+mu) grad div v + omega^2 rho v|| / (omega^2 rho ||v||)``
    for every column ``v`` at the point ``x``.  ``order`` selects the 2nd- or
    4th-order stencils; the step is ``h`` in both cases.
    """
    if order not in _D2:
        raise DomainError("order must be 2 or 4")
    x = np.asarray(x, dtype=float)
    E = np.eye(dim) * h

    def G(offsets):
        return greens_frequency(medium, omega, dim, x + offsets)

    G0 = G(np.zeros(dim))
    hess = np.zeros((dim, dim, dim, dim), dtype=complex)  # hess[i, j] = d_i d_j G
    for i in range(dim):
        hess[i, i] = sum(c * G(s * E[i]) for s, c in _D2[order]) / h**2
        for j in range(i + 1, dim):
            d = sum(ci * cj * G(si * E[i] + sj * E[j]) for si, ci in _D1[order] for sj, cj in _D1[order]) / h**2
            hess[i, j] = hess[j, i] = d
    lap = sum(hess[i, i] for i in range(dim))
    graddiv = np.einsum("ijjc->ic", hess)
    r = medium.mu * lap + (medium.lam + medium.mu) * graddiv + omega**2 * medium.rho * G0
    return np.linalg.norm(r, axis=0) / (omega**2 * medium.rho * np.linalg.norm(G0, axis=0))


@dataclass(frozen=True)
class ExperimentGeometry:
    """Source radius ``R0``, measurement radius ``R`` and pulse duration ``T0``."""

    R0: float
    R: float
    T0: float

    def __post_init__(self):
        if not self.R0 > 0:
            raise DomainError(f"R0 must be positive (got {self.R0})")
        if not self.R > self.R0:
            raise DomainError(f"measurement radius must exceed source radius (R={self.R}, R0={self.R0})")
        if self.T0 < 0:
            raise DomainError("T0 must be non-negative")


def vanish_time(medium: ElasticMedium, geometry: ExperimentGeometry):
    """Times ``(T_p, T_s)`` after which the P and S fields vanish inside ``B_R``."""
    d = geometry.R + geometry.R0
    return geometry.T0 + d / medium.c_p, geometry.T0 + d / medium.c_s


def point_source_response_3d(medium: ElasticMedium, g, x, t, *, epsrel=1e-10, epsabs=1e-14):
    """Displacement radiated by a point force at the origin with vector time history ``g``.

    Parameters
    ----------
    g : callable
        Vector pulse, ``g(t)`` of shape ``(..., 3)``, zero outside ``g.support``.
    x : array_like, shape (3,) or (P, 3)
        Receiver position(s), none at the origin.  Receivers sharing a
        distance share the scalar time integrals.
    t : array_like
        Times.

    Returns
    -------
    ndarray, shape (nt, 3) or (P, nt, 3)
        Exactly zero outside ``[|x|/c_p, T0 + |x|/c_s]``.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts, radii = _offsets(np.atleast_2d(x), 3)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((pts.shape[0], t.size, 3))
    eye = np.eye(3)
    cache = {}
    for i, (p, r) in enumerate(zip(pts, radii)):
        # distances equal up to round-off share one set of time integrals
        key = round(float(r), 12)
        if key not in cache:
            cache[key] = _radial_histories(medium, g, float(r), t, epsrel, epsabs)
        active, gp, gs, tail = cache[key]
        if active is None:
            continue
        xh = p / r
        P = np.outer(xh, xh)
        far = gp @ P / medium.c_p**2 + gs @ (eye - P) / medium.c_s**2
        near = tail @ (3 * P - eye) / r**2
        out[i, active] = (far + near) / (4 * np.pi * medium.rho * r)
    return out[0] if single else out


def _radial_histories(medium, g, r, t, epsrel, epsabs):
    """Delayed pulses and near-field integral for one source-receiver distance."""
    cp, cs = medium.c_p, medium.c_s
    t_lo, t_hi = g.support
    active = (t >= r / cp + t_lo) & (t <= t_hi + r / cs)
    if not np.any(active):
        return None, None, None, None
    ta = t[active]
    # Near-field term: integral of tau g(t - tau) over r/cp <= tau <= r/cs,
    # rewritten as (t - s) g(s) over the overlap with the pulse support.
    a = np.clip(ta - r / cs, t_lo, t_hi)
    b = np.clip(ta - r / cp, t_lo, t_hi)
    span = b - a

    def integrand(u):
        s = a + u * span
        return ((ta - s) * span)[:, None] * g(s)

    tail, _ = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, norm="max")
    return active, g(ta - r / cp), g(ta - r / cs), tail
