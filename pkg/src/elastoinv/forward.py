"""Synthesis of radiated elastic wave data.

Three routes are provided: a Fourier-space solver for volumetric 3D sources,
frequency-domain volume integrals for planar sources, and plane-wave moments.
"""
from __future__ import annotations

import numpy as np
from scipy import integrate

from .data import FrequencySweepData, GridField, ReceiverArray, TimeSeriesData
from .errors import ConfigurationError, DomainError
from .greens import greens_frequency
from .medium import ElasticMedium, fundamental_solution

__all__ = [
    "spectral_forward_3d",
    "synthesize_frequency_data_2d",
    "synthesize_scalar_frequency_data_2d",
    "plane_wave_moment",
    "spatial_fourier_transform",
    "spectrum_values",
]


def spectrum_values(g_hat, omegas):
    """Values of a temporal spectrum at ``omegas``.

    ``g_hat`` may be a pulse (anything with a ``spectrum`` method), a
    :class:`~elastoinv.signals.Spectrum`, a callable or an array aligned with
    ``omegas``.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if hasattr(g_hat, "spectrum"):
        return np.asarray(g_hat.spectrum(omegas))
    if hasattr(g_hat, "at") and hasattr(g_hat, "omegas"):
        return np.array([g_hat.at(w) for w in omegas])
    if callable(g_hat):
        return np.asarray(g_hat(omegas))
    vals = np.asarray(g_hat, dtype=complex)
    if vals.ndim == 0:
        vals = np.full(omegas.size, complex(vals))
    if vals.shape[0] != omegas.size:
        raise ConfigurationError("spectrum array does not match the frequency list")
    return vals


# ---------------------------------------------------------------------------
# Fourier-space solver


def _support_extent(f: GridField):
    mask = np.any(f.values != 0, axis=0)
    if not np.any(mask):
        return 0.0
    pts = f.points()[mask]
    return float(np.max(np.abs(pts)))


def _shell_sum(index, weights, nshell):
    return np.bincount(index, weights.real, nshell) + 1j * np.bincount(index, weights.imag, nshell)


def _memory_kernels(a, s, gs, rho):
    """Trapezoid values of ``(1/rho) int_0^t sin(a (t-s)) / a g(s) ds`` on the grid ``s``.

    ``a`` has shape ``(nshell,)``, ``gs`` shape ``(nt, ncomp)``; the result
    has shape ``(nshell, nt, ncomp)``.
    """
    cos_as = np.cos(np.outer(a, s))
    sin_as = np.sin(np.outer(a, s))
    C = integrate.cumulative_trapezoid(cos_as[:, :, None] * gs[None], s, axis=1, initial=0)
    S = integrate.cumulative_trapezoid(sin_as[:, :, None] * gs[None], s, axis=1, initial=0)
    h = (sin_as[:, :, None] * C - cos_as[:, :, None] * S) / (rho * a[:, None, None])
    return h


def spectral_forward_3d(
    medium: ElasticMedium, f: GridField, g, times, probes, *, shell_chunk=256
):
    """Displacement history at ``probes`` for the source ``f(x) g(t)`` in free space.

    Each discrete spatial Fourier mode evolves by the Duhamel formula
    ``U(xi, t) = int_0^t A^{-1/2} sin(A^{1/2} (t - s)) f_hat(xi) g(s) / rho ds``
    with ``A(xi)`` split into its longitudinal and transverse eigenspaces.
    The time integral is a composite trapezoid on ``times``; the field is
    returned at the probes by trigonometric interpolation of the periodic
    box.  Modes are grouped by ``|xi|``, which leaves one scalar convolution
    per shell and wave type.

    Parameters
    ----------
    f : GridField
        3D grid on the periodic box; 3 components with scalar ``g``, or 1
        component with a 3-component ``g``.
    g : callable
        Pulse, scalar or vector valued.
    times : array_like
        Uniform grid starting at 0.
    probes : array_like, shape (P, 3)
    shell_chunk : int
        Number of shells whose memory kernels are held in memory at once.

    Notes
    -----
    A point force is best approximated by a single node at the coordinate
    origin with value ``1 / cell_weight``: its discrete transform is flat.
    Spreading it over the eight cell centres around the origin multiplies the
    spectrum by ``prod cos(xi_a h / 2)``, which vanishes at the Nyquist edge.
    """
    if f.dim != 3:
        raise DomainError("spectral solver is three-dimensional")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2 or times[0] != 0:
        raise ConfigurationError("times must be a grid starting at t = 0")
    dts = np.diff(times)
    if np.any(dts <= 0) or not np.allclose(dts, dts[0], rtol=1e-9):
        raise ConfigurationError("times must be uniform")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))

    lo = f.origin - 0.5 * f.spacing
    hi = lo + f.spacing * np.array(f.shape)
    half = 0.5 * (hi - lo)
    extent = _support_extent(f)
    if extent > 0.5 * float(np.min(half)) + 1e-12:
        raise ConfigurationError("source must occupy at most half of the box (padding factor >= 2)")
    if np.any(probes < lo) or np.any(probes > hi):
        raise DomainError("probe outside the computational box")

    gs = np.asarray(g(times), dtype=float)
    if gs.ndim == 1:
        gs = gs[:, None]
    vector_g = gs.shape[1] == 3
    if vector_g and f.components != 1:
        raise ConfigurationError("a vector pulse needs a scalar spatial factor")
    if not vector_g and f.components != 3:
        raise ConfigurationError("a scalar pulse needs a 3-component spatial factor")

    axes_k = [2 * np.pi * np.fft.fftfreq(n, d=h) for n, h in zip(f.shape, f.spacing)]
    K = np.meshgrid(*axes_k, indexing="ij")
    q = K[0] ** 2 + K[1] ** 2 + K[2] ** 2
    qr = np.round(q / q[q > 0].min(), 9) if np.any(q > 0) else q
    shells, index = np.unique(qr.ravel(), return_inverse=True)
    nshell = shells.size
    qs = np.bincount(index, q.ravel(), nshell) / np.bincount(index, minlength=nshell)
    zero = int(np.flatnonzero(shells == 0)[0])
    norm_q = np.where(q > 0, np.sqrt(q), 1.0)
    xh = [(Ka / norm_q).ravel() for Ka in K]

    # ifftn gives (1/V) * f_hat(xi) * exp(-i origin.xi) up to the cell volume factor
    F = np.stack([np.fft.ifftn(f.values[c]).ravel() for c in range(f.components)])
    rho = medium.rho
    a_p = np.sqrt((medium.lam + 2 * medium.mu) * qs / rho)
    a_s = np.sqrt(medium.mu * qs / rho)

    # Zero mode: (1/rho) int_0^t (t - s) g(s) ds
    G1 = integrate.cumulative_trapezoid(gs, times, axis=0, initial=0)
    G2 = integrate.cumulative_trapezoid(times[:, None] * gs, times, axis=0, initial=0)
    h0 = (times[:, None] * G1 - G2) / rho

    nonzero = np.flatnonzero(np.arange(nshell) != zero)
    out = np.zeros((probes.shape[0], 3, times.size))
    for ip, x in enumerate(probes):
        rel = x - f.origin
        ph = np.exp(-1j * (K[0] * rel[0] + K[1] * rel[1] + K[2] * rel[2])).ravel()
        c = F * ph  # (ncomp_f, Nmodes)
        if vector_g:
            # M_L[a,b] = sum c xh_a xh_b ; M_T = sum c delta_ab - M_L
            ML = np.empty((nshell, 3, 3), dtype=complex)
            for i in range(3):
                for j in range(i, 3):
                    ML[:, i, j] = ML[:, j, i] = _shell_sum(index, c[0] * xh[i] * xh[j], nshell)
            tot = _shell_sum(index, c[0], nshell)
            MT = tot[:, None, None] * np.eye(3) - ML
            u = tot[zero] * h0.T  # (3, nt)
        else:
            proj = c[0] * xh[0] + c[1] * xh[1] + c[2] * xh[2]
            ML = np.stack([_shell_sum(index, proj * xh[i], nshell) for i in range(3)], axis=1)
            tot = np.stack([_shell_sum(index, c[i], nshell) for i in range(3)], axis=1)
            MT = tot - ML
            u = tot[zero][:, None] * h0[:, 0][None, :]
        u = u.astype(complex)
        for start in range(0, nonzero.size, shell_chunk):
            sel = nonzero[start : start + shell_chunk]
            hp = _memory_kernels(a_p[sel], times, gs, rho)  # (ns, nt, ncg)
            hs = _memory_kernels(a_s[sel], times, gs, rho)
            if vector_g:
                u += np.einsum("kij,ktj->it", ML[sel], hp) + np.einsum("kij,ktj->it", MT[sel], hs)
            else:
                u += np.einsum("ki,kt->it", ML[sel], hp[:, :, 0]) + np.einsum("ki,kt->it", MT[sel], hs[:, :, 0])
        out[ip] = u.real

    receivers = _probe_array(probes)
    return TimeSeriesData(receivers, 0.0, float(dts[0]), out, {"solver": "spectral"})


def _probe_array(points):
    points = np.atleast_2d(points)
    r = np.linalg.norm(points, axis=1)
    if np.allclose(r, r[0], rtol=1e-12, atol=0):
        return ReceiverArray(points, float(r[0]))
    # heterogeneous radii: keep the points, record no common radius
    arr = ReceiverArray.__new__(ReceiverArray)
    arr.points = points
    arr.radius = float("nan")
    return arr


# ---------------------------------------------------------------------------
# Frequency-domain volume integrals in 2D


def _quadrature_cells(f: GridField, receivers: ReceiverArray):
    if f.dim != 2 or receivers.dim != 2:
        raise DomainError("planar synthesis needs a 2D grid and 2D receivers")
    mask = f.support_mask()
    pts = f.points()[mask]
    rmin = np.min(np.linalg.norm(receivers.points, axis=1))
    if f.support_radius is not None:
        if rmin <= f.support_radius:
            raise DomainError("receivers must lie strictly outside the source support")
    else:
        nz = np.any(f.values[:, mask] != 0, axis=0)
        if np.any(nz) and rmin <= np.max(np.linalg.norm(pts[nz], axis=1)):
            raise DomainError("receivers must lie strictly outside the source support")
    return pts, f.values[:, mask], f.cell_weight


def synthesize_frequency_data_2d(medium: ElasticMedium, f: GridField, g_hat, omegas, receivers: ReceiverArray):
    """``U_hat(x_m, omega) = g_hat(omega) sum_c w G_hat(x_m - y_c, omega) f(y_c)`` (midpoint rule)."""
    if f.components != 2:
        raise DomainError("vector synthesis needs a 2-component field")
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    gh = spectrum_values(g_hat, omegas)
    pts, vals, w = _quadrature_cells(f, receivers)
    diff = receivers.points[:, None, :] - pts[None, :, :]
    out = np.zeros((receivers.count, 2, omegas.size), dtype=complex)
    for k, om in enumerate(omegas):
        G = greens_frequency(medium, om, 2, diff)  # (M, Nc, 2, 2)
        out[:, :, k] = gh[k] * w * np.einsum("mcij,jc->mi", G, vals)
    return FrequencySweepData(receivers, omegas, out, {"family": "full"})


def synthesize_scalar_frequency_data_2d(
    medium: ElasticMedium, f_alpha: GridField, alpha: str, g_hat, omegas, receivers: ReceiverArray
):
    """``u_alpha(x_m, omega) = (g_hat / gamma_alpha) sum_c w Phi_{k_alpha}(x_m - y_c) f_alpha(y_c)``."""
    if f_alpha.components != 1:
        raise DomainError("scalar synthesis needs a 1-component field")
    gamma = medium.gamma(alpha)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    gh = spectrum_values(g_hat, omegas)
    pts, vals, w = _quadrature_cells(f_alpha, receivers)
    diff = receivers.points[:, None, :] - pts[None, :, :]
    out = np.zeros((receivers.count, 1, omegas.size), dtype=complex)
    for k, om in enumerate(omegas):
        Phi = fundamental_solution(2, medium.wavenumber(om, alpha), diff)
        out[:, 0, k] = gh[k] * w / gamma * (Phi @ vals[0])
    return FrequencySweepData(receivers, omegas, out, {"family": alpha})


# ---------------------------------------------------------------------------
# Plane-wave moments


def _perp(d, d_perp):
    if d.size == 2:
        return np.array([-d[1], d[0]])
    if d_perp is None:
        trial = np.eye(3)[int(np.argmin(np.abs(d)))]
        v = trial - (trial @ d) * d
        return v / np.linalg.norm(v)
    d_perp = np.asarray(d_perp, dtype=float)
    if not np.isclose(np.linalg.norm(d_perp), 1.0, atol=1e-12) or abs(d_perp @ d) > 1e-12:
        raise DomainError("d_perp must be a unit vector orthogonal to d")
    return d_perp


def plane_wave_moment(f: GridField, medium: ElasticMedium, omega: float, d, kind: str, d_perp=None):
    """Midpoint quadrature of ``int f(x) . v(x) dx`` against a plane-wave probe.

    ``v_p = d exp(-i k_p d.x)`` and ``v_s = d_perp exp(-i k_s d.x)``; in 2D
    ``d_perp = (-d_2, d_1)``.
    """
    d = np.asarray(d, dtype=float)
    if d.size != f.dim or not np.isclose(np.linalg.norm(d), 1.0, rtol=0, atol=1e-12):
        raise DomainError("direction must be a unit vector of the field's dimension")
    if f.components != f.dim:
        raise DomainError("moment needs a vector field")
    k = medium.wavenumber(omega, kind)
    pol = d if kind == "p" else _perp(d, d_perp)
    mask = f.support_mask()
    pts = f.points()[mask]
    vals = f.values[:, mask]
    wave = np.exp(-1j * k * (pts @ d))
    return complex(f.cell_weight * np.sum((pol @ vals) * wave))


def spatial_fourier_transform(f: GridField, xi):
    """Midpoint quadrature of ``int h(x) exp(i x.xi) dx`` for a scalar field."""
    if f.components != 1:
        raise DomainError("expected a scalar field")
    xi = np.asarray(xi, dtype=float)
    mask = f.support_mask()
    pts = f.points()[mask]
    return complex(f.cell_weight * np.sum(f.values[0, mask] * np.exp(1j * (pts @ xi))))
