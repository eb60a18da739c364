"""Time/frequency transforms, Helmholtz decomposition and P/S modal decoupling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FrequencySweepData, GridField, ReceiverArray, TimeSeriesData
from .errors import ConfigurationError, DomainError, IllConditionedModeError
from .medium import ElasticMedium, hankel1, hankel1_derivative

__all__ = [
    "ModalCoefficients",
    "time_to_frequency",
    "frequency_to_time",
    "helmholtz_decompose_2d",
    "decouple_circle",
    "modal_to_potentials",
    "modal_to_displacement",
    "modal_matrix",
    "decompose_field_2d",
]


def _trapezoid_weights(n, h):
    w = np.full(n, float(h))
    if n > 1:
        w[0] = w[-1] = 0.5 * h
    return w


def time_to_frequency(series: TimeSeriesData, omegas) -> FrequencySweepData:
    """Composite-trapezoid approximation of ``integral U(x_m, t) exp(i omega t) dt`` over the record."""
    nt = series.samples.shape[2]
    if nt == 0 or series.receivers.count == 0:
        raise DomainError("cannot transform an empty series")
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    t = series.times
    kernel = _trapezoid_weights(nt, series.dt)[:, None] * np.exp(1j * np.outer(t, omegas))
    values = series.samples @ kernel
    return FrequencySweepData(series.receivers, omegas, values, dict(series.meta))


def frequency_to_time(omegas, values, times):
    """Inverse transform of a real signal from samples on a uniform frequency grid.

    Evaluates ``(1/pi) Re sum_k w_k g_hat(omega_k) exp(-i omega_k t)`` with
    trapezoid weights, i.e. the inverse transform using ``g_hat(-omega) =
    conj(g_hat(omega))``.  ``values`` has the frequency axis first; the result
    has the time axis first.
    """
    omegas = np.asarray(omegas, dtype=float)
    values = np.asarray(values, dtype=complex)
    if omegas.ndim != 1 or omegas.size < 2:
        raise ConfigurationError("need at least two frequencies")
    d = np.diff(omegas)
    if np.any(d <= 0) or not np.allclose(d, d[0], rtol=1e-9, atol=0):
        raise ConfigurationError("frequency grid must be uniform and increasing")
    if values.shape[0] != omegas.size:
        raise ConfigurationError("values must have one row per frequency")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    w = _trapezoid_weights(omegas.size, d[0])
    kernel = np.exp(-1j * np.outer(times, omegas)) * w
    flat = values.reshape(omegas.size, -1)
    out = (kernel @ flat).real / np.pi
    return out.reshape((times.size,) + values.shape[1:])


# ---------------------------------------------------------------------------
# Helmholtz decomposition on a periodic padded box


def _margin_mask(shape, fraction=0.25):
    mask = np.zeros(shape, dtype=bool)
    for a, n in enumerate(shape):
        m = int(np.floor(fraction * n))
        sl = [slice(None)] * len(shape)
        sl[a] = slice(0, m)
        mask[tuple(sl)] = True
        sl[a] = slice(n - m, n)
        mask[tuple(sl)] = True
    return mask


def _wavenumbers(field: GridField):
    ks = [2 * np.pi * np.fft.fftfreq(n, d=h) for n, h in zip(field.shape, field.spacing)]
    return np.meshgrid(*ks, indexing="ij")


def helmholtz_decompose_2d(f: GridField, margin=0.25, tol=1e-8):
    """Split a compactly supported planar vector field into ``grad f_p + curl f_s``.

    Solves ``Laplace f_p = div f`` and ``Laplace f_s = -curl f`` spectrally on
    the (periodic) grid box.  The free constant of each potential is fixed so
    that it averages to zero over the zero margin, which stands in for decay
    at infinity.

    Returns
    -------
    (GridField, GridField)
        Scalar potentials ``f_p`` and ``f_s`` on the input grid.
    """
    if f.dim != 2 or f.components != 2:
        raise DomainError("expected a 2D field with two components")
    vals = f.values
    frame = _margin_mask(f.shape, margin)
    peak = np.max(np.abs(vals))
    if peak > 0 and np.max(np.abs(vals[:, frame])) > tol * peak:
        raise DomainError(f"field support reaches the {int(margin * 100)}% boundary margin")

    k1, k2 = _wavenumbers(f)
    q = k1**2 + k2**2
    q[0, 0] = 1.0
    F1 = np.fft.fftn(vals[0])
    F2 = np.fft.fftn(vals[1])
    div_hat = 1j * (k1 * F1 + k2 * F2)
    curl_hat = 1j * (k1 * F2 - k2 * F1)
    fp_hat = -div_hat / q
    fs_hat = curl_hat / q
    fp_hat[0, 0] = fs_hat[0, 0] = 0.0
    fp = np.fft.ifftn(fp_hat)
    fs = np.fft.ifftn(fs_hat)
    if not np.iscomplexobj(vals):
        fp, fs = fp.real, fs.real
    fp = fp - fp[frame].mean()
    fs = fs - fs[frame].mean()
    return f.with_values(fp[None]), f.with_values(fs[None])


# ---------------------------------------------------------------------------
# Modal decoupling on a circle


@dataclass
class ModalCoefficients:
    """Hankel-series coefficients of the P and S potentials outside radius ``R``."""

    omega: float
    radius: float
    orders: np.ndarray
    u_p: np.ndarray
    u_s: np.ndarray
    k_p: float
    k_s: float

    @property
    def N(self) -> int:
        return int(np.max(np.abs(self.orders))) if self.orders.size else 0

    def coefficient(self, alpha, n):
        idx = np.flatnonzero(self.orders == n)
        if idx.size == 0:
            return 0.0j
        return (self.u_p if alpha == "p" else self.u_s)[idx[0]]


def modal_matrix(n, t_p, t_s):
    """2x2 matrix mapping ``(u_p,n, u_s,n)`` to ``R`` times the ``n``-th (radial, tangential) moments."""
    hp, hs = hankel1(n, t_p), hankel1(n, t_s)
    dp, ds = hankel1_derivative(n, t_p), hankel1_derivative(n, t_s)
    return np.array([[t_p * dp, 1j * n * hs], [1j * n * hp, -t_s * ds]])


def _circle_angles(receivers: ReceiverArray, radius):
    if receivers.dim != 2:
        raise DomainError("modal decoupling needs 2D receivers")
    if radius is not None and not np.isclose(receivers.radius, radius, rtol=1e-12):
        raise DomainError(f"receivers lie on radius {receivers.radius}, not {radius}")
    theta = receivers.angles()
    M = theta.size
    steps = np.mod(np.diff(theta), 2 * np.pi)
    if M < 2 or not np.allclose(steps, 2 * np.pi / M, rtol=0, atol=1e-9):
        raise ConfigurationError("receivers must be uniformly spaced and ordered around the circle")
    return theta


def decouple_circle(U_hat, medium: ElasticMedium, omega: float, radius=None, N=None, receivers=None):
    """Recover P/S Hankel coefficients from displacement data on a circle.

    Parameters
    ----------
    U_hat : FrequencySweepData or ndarray
        Cartesian displacement at ``M`` equispaced circle points, either a
        sweep (the column at ``omega`` is used) or an ``(M, 2)`` array
        together with ``receivers``.
    N : int, optional
        Highest order.  When omitted, the series is computed up to
        ``M/2 - 1`` and truncated at the first order whose coefficients fall
        below ``1e-12`` of the largest.
    """
    if isinstance(U_hat, FrequencySweepData):
        receivers = U_hat.receivers
        vals = U_hat.at(omega)
    else:
        if receivers is None:
            raise ConfigurationError("receivers are required with raw arrays")
        vals = np.asarray(U_hat, dtype=complex)
    if vals.shape != (receivers.count, 2):
        raise DomainError("expected two Cartesian components per receiver")
    R = receivers.radius if radius is None else float(radius)
    theta = _circle_angles(receivers, radius)
    M = theta.size
    n_cap = M // 2 - 1
    adaptive = N is None
    n_max = n_cap if adaptive else int(N)
    if n_max > n_cap:
        raise ConfigurationError(f"order {n_max} needs at least {2 * n_max + 2} receivers (have {M})")

    c, s = np.cos(theta), np.sin(theta)
    radial = c * vals[:, 0] + s * vals[:, 1]
    tangential = -s * vals[:, 0] + c * vals[:, 1]
    orders = np.arange(-n_max, n_max + 1)
    phase = np.exp(-1j * np.outer(orders, theta)) / M
    moments = np.stack([phase @ radial, phase @ tangential], axis=1)

    kp, ks = omega / medium.c_p, omega / medium.c_s
    tp, ts = kp * R, ks * R
    coeffs = np.empty((orders.size, 2), dtype=complex)
    for i, n in enumerate(orders):
        A = modal_matrix(int(n), tp, ts)
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        scale = abs(A[0, 0] * A[1, 1]) + abs(A[0, 1] * A[1, 0])
        if not np.isfinite(scale) or abs(det) < 1e-13 * scale:
            raise IllConditionedModeError(int(n), det)
        coeffs[i] = np.linalg.solve(A, R * moments[i])

    if adaptive:
        mag = np.max(np.abs(coeffs), axis=1)
        peak = mag.max()
        keep = n_max
        if peak > 0:
            for n in range(n_max + 1):
                tail = np.abs(orders) >= n
                if np.all(mag[tail] < 1e-12 * peak):
                    keep = n
                    break
        else:
            keep = 0
        sel = np.abs(orders) <= keep
        orders, coeffs = orders[sel], coeffs[sel]
    return ModalCoefficients(float(omega), R, orders, coeffs[:, 0].copy(), coeffs[:, 1].copy(), kp, ks)


def modal_to_potentials(coeffs: ModalCoefficients, radius, angles):
    """Evaluate the Hankel series of ``u_p`` and ``u_s`` at ``radius`` (>= R) and ``angles``."""
    radius = float(radius)
    if radius < coeffs.radius * (1 - 1e-12):
        raise DomainError(f"series valid only for radius >= {coeffs.radius}")
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    E = np.exp(1j * np.outer(angles, coeffs.orders))
    up = E @ (coeffs.u_p * hankel1(coeffs.orders, coeffs.k_p * radius))
    us = E @ (coeffs.u_s * hankel1(coeffs.orders, coeffs.k_s * radius))
    return up, us


def modal_to_displacement(coeffs: ModalCoefficients, radius, angles):
    """Cartesian displacement ``grad u_p + curl u_s`` of the Hankel series on a circle."""
    radius = float(radius)
    if radius < coeffs.radius * (1 - 1e-12):
        raise DomainError(f"series valid only for radius >= {coeffs.radius}")
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    n = coeffs.orders
    E = np.exp(1j * np.outer(angles, n))
    kp, ks = coeffs.k_p, coeffs.k_s
    a = coeffs.u_p
    b = coeffs.u_s
    # u_r = d_r u_p + (1/r) d_theta u_s ; u_theta = (1/r) d_theta u_p - d_r u_s
    ur = E @ (a * kp * hankel1_derivative(n, kp * radius) + 1j * n * b * hankel1(n, ks * radius) / radius)
    ut = E @ (1j * n * a * hankel1(n, kp * radius) / radius - b * ks * hankel1_derivative(n, ks * radius))
    c, s = np.cos(angles), np.sin(angles)
    return np.column_stack([c * ur - s * ut, s * ur + c * ut])


# ---------------------------------------------------------------------------
# P/S splitting of a sampled time-harmonic field

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def _diff4(a, axis, h):
    """Fourth-order central first derivative; drops two nodes at each end of ``axis``."""
    n = a.shape[axis]
    out = 0
    for j, c in enumerate(_D1):
        if c:
            out = out + c * np.take(a, np.arange(j, n - 4 + j), axis=axis)
    return out / h


def _crop(a, axis, k=2):
    n = a.shape[axis]
    return np.take(a, np.arange(k, n - k), axis=axis)


def decompose_field_2d(U_hat: GridField, medium: ElasticMedium, omega: float):
    """Compressional and shear parts ``-grad div U / k_p^2`` and ``curl curl U / k_s^2``.

    Derivatives use fourth-order central differences, so the returned fields
    live on the input grid with four nodes removed from every edge.
    """
    if U_hat.dim != 2 or U_hat.components != 2:
        raise DomainError("expected a 2D field with two components")
    if omega <= 0:
        raise DomainError("omega must be positive")
    kp, ks = omega / medium.c_p, omega / medium.c_s
    h1, h2 = U_hat.spacing
    ppw = 2 * np.pi / ks / max(h1, h2)
    if ppw < 4:
        raise ConfigurationError(f"grid resolves only {ppw:.2f} points per shear wavelength (need >= 4)")
    if min(U_hat.shape) < 9:
        raise ConfigurationError("grid too small for the difference stencil")
    u1, u2 = U_hat.values[0], U_hat.values[1]
    div = _crop(_diff4(u1, 0, h1), 1) + _crop(_diff4(u2, 1, h2), 0)
    curl = _crop(_diff4(u2, 0, h1), 1) - _crop(_diff4(u1, 1, h2), 0)
    up = -np.stack([_crop(_diff4(div, 0, h1), 1), _crop(_diff4(div, 1, h2), 0)]) / kp**2
    # curl_vec h = (d2 h, -d1 h)
    us = np.stack([_crop(_diff4(curl, 1, h2), 0), -_crop(_diff4(curl, 0, h1), 1)]) / ks**2
    origin = U_hat.origin + 4 * U_hat.spacing
    return GridField(origin, U_hat.spacing, up), GridField(origin, U_hat.spacing, us)
