"""Recovery of the vector temporal factor from point measurements.

With the spatial factor known, the Fourier-domain data at a point obey
``U_hat(x, omega) = W(x, omega) g_hat(omega)`` where ``W`` is the radiating
matrix.  Inverting ``W`` at one point gives the indicator ``I1``; averaging
the inversions over a family of points gives ``I2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import FrequencySweepData, GridField, ReceiverArray, TimeSeriesData
from .errors import ConfigurationError, DomainError
from .greens import greens_frequency, kelvin_tensor, point_source_response_3d
from .medium import ElasticMedium
from .transforms import frequency_to_time, time_to_frequency

__all__ = [
    "RadiatingMatrix",
    "IndicatorResult",
    "radiating_matrix",
    "paper_sweep",
    "ring_points",
    "point_source_series",
    "synthesize_point_data",
    "indicator_I1",
    "indicator_I2",
    "add_noise",
    "recover_temporal",
]

_DET_TOL = 1e-13


@dataclass
class RadiatingMatrix:
    omega: float
    x: np.ndarray
    W: np.ndarray
    det: complex
    invertible: bool


def radiating_matrix(medium: ElasticMedium, omega: float, x, source: GridField | None = None) -> RadiatingMatrix:
    """``W(x, omega) = int G_hat(x - y, omega) f(y) dy`` for a known scalar spatial factor.

    Without ``source`` the factor is the point source at the origin and
    ``W = G_hat(x, omega)``.  At ``omega = 0`` the static (Kelvin) tensor is
    used.  ``invertible`` is set when ``|det W| > 1e-13 ||W||_F^3``.
    """
    x = np.asarray(x, dtype=float).reshape(3)
    if omega < 0:
        raise DomainError("omega must be non-negative")

    def kernel(offsets):
        if omega == 0:
            return kelvin_tensor(medium, offsets)
        return greens_frequency(medium, omega, 3, offsets)

    if source is None:
        W = np.asarray(kernel(x), dtype=complex)
    else:
        if source.dim != 3 or source.components != 1:
            raise DomainError("the spatial factor must be a scalar 3D grid field")
        mask = source.values[0] != 0
        pts = source.points()[mask]
        W = source.cell_weight * np.einsum("cij,c->ij", kernel(x - pts), source.values[0][mask]).astype(complex)
    det = complex(np.linalg.det(W))
    scale = np.linalg.norm(W)
    return RadiatingMatrix(float(omega), x, W, det, bool(abs(det) > _DET_TOL * scale**3))


def paper_sweep(K: int = 50, lo: float = 1.0, hi: float = 20.0):
    """``omega_j = lo + (j - 1) h`` with ``h = (hi - lo)/(K - 1)``."""
    return lo + np.arange(K) * (hi - lo) / (K - 1)


def ring_points(M: int):
    """``x_j = (cos(2 pi (j-1)/M), 1, sin(2 pi (j-1)/M))``; all at distance sqrt(2)."""
    th = 2 * np.pi * np.arange(M) / M
    return np.column_stack([np.cos(th), np.ones(M), np.sin(th)])


def point_source_series(medium: ElasticMedium, g, points, times) -> TimeSeriesData:
    """Closed-form records of the point-source field at ``points`` (common distance)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    times = np.asarray(times, dtype=float)
    d = np.diff(times)
    if times.size < 2 or np.any(d <= 0) or not np.allclose(d, d[0], rtol=1e-9):
        raise ConfigurationError("times must be a uniform increasing grid")
    u = point_source_response_3d(medium, g, points, times)  # (P, nt, 3)
    rec = ReceiverArray(points)
    return TimeSeriesData(rec, float(times[0]), float(d[0]), np.transpose(u, (0, 2, 1)), {"source": "point"})


def synthesize_point_data(medium: ElasticMedium, g_hat, omegas, points) -> FrequencySweepData:
    """``U_hat(x_m, omega_k) = W(x_m, omega_k) g_hat(omega_k)`` for a point source.

    ``g_hat`` is an array of shape ``(K, 3)`` or an object with ``spectrum``.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    gh = np.asarray(g_hat.spectrum(omegas) if hasattr(g_hat, "spectrum") else g_hat, dtype=complex)
    if gh.shape != (omegas.size, 3):
        raise ConfigurationError("g_hat must have shape (frequencies, 3)")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    vals = np.empty((points.shape[0], 3, omegas.size), dtype=complex)
    for k, om in enumerate(omegas):
        for m, x in enumerate(points):
            vals[m, :, k] = radiating_matrix(medium, om, x).W @ gh[k]
    return FrequencySweepData(ReceiverArray(points), omegas, vals, {"source": "point"})


@dataclass
class IndicatorResult:
    """Per-frequency estimates of ``g_hat``; ``missing[k]`` marks frequencies without one."""

    omegas: np.ndarray
    estimates: np.ndarray
    method: str
    points_used: list
    missing: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.estimates.shape[0] != self.omegas.size:
            raise ConfigurationError("one estimate per frequency is required")
        if self.missing is None:
            self.missing = np.zeros(self.omegas.size, dtype=bool)

    def rms_error(self, reference):
        """Root mean square of ``|estimate - reference|`` over the frequencies with estimates (NaN if none)."""
        reference = np.asarray(reference, dtype=complex)
        ok = ~self.missing
        if not ok.any():
            return float("nan")
        diff = self.estimates[ok] - reference[ok]
        return float(np.sqrt(np.mean(np.sum(np.abs(diff) ** 2, axis=1))))


def _indicator(data: FrequencySweepData, medium, indices, method, source):
    if data.components != 3:
        raise DomainError("indicators need three-component data")
    K = data.omegas.size
    est = np.zeros((K, 3), dtype=complex)
    missing = np.zeros(K, dtype=bool)
    used = []
    for k, om in enumerate(data.omegas):
        acc = []
        for m in indices:
            W = radiating_matrix(medium, om, data.receivers.points[m], source)
            if W.invertible:
                acc.append((m, np.linalg.solve(W.W, data.values[m, :, k])))
        if acc:
            est[k] = np.mean([a[1] for a in acc], axis=0)
            used.append([a[0] for a in acc])
        else:
            missing[k] = True
            used.append([])
    return IndicatorResult(data.omegas.copy(), est, method, used, missing)


def indicator_I1(data: FrequencySweepData, medium: ElasticMedium, x0=(1.0, 1.0, 0.0), source=None) -> IndicatorResult:
    """``I1(omega) = W(x0, omega)^{-1} U_hat(x0, omega)``; ``x0`` must be a receiver of ``data``."""
    idx = data.receivers.index_of(x0)
    return _indicator(data, medium, [idx], "I1", source)


def indicator_I2(data: FrequencySweepData, medium: ElasticMedium, source=None) -> IndicatorResult:
    """Average of ``W(x_j)^{-1} U_hat(x_j)`` over the receivers with invertible ``W``."""
    return _indicator(data, medium, range(data.receivers.count), "I2", source)


def add_noise(series: TimeSeriesData, delta: float, seed=None) -> TimeSeriesData:
    """Multiply every sample by ``1 + delta * e`` with ``e`` uniform on ``[-1, 1]``."""
    if delta < 0:
        raise ConfigurationError("noise level must be non-negative")
    rng = np.random.default_rng(seed)
    eps = rng.uniform(-1.0, 1.0, size=series.samples.shape)
    meta = dict(series.meta, noise_delta=delta, noise_seed=seed)
    return TimeSeriesData(series.receivers, series.t0, series.dt, series.samples * (1 + delta * eps), meta)


def recover_temporal(
    series: TimeSeriesData, medium: ElasticMedium, omegas, times, method: str = "I1", x0=(1.0, 1.0, 0.0), source=None
):
    """Transform the records, apply an indicator and invert back to time.

    ``omegas`` must be a uniform grid starting at 0 and covering the pulse
    band for the inverse transform to be meaningful.  Frequencies without an
    estimate contribute zero.

    Returns
    -------
    IndicatorResult, ndarray of shape (len(times), 3)
    """
    sweep = time_to_frequency(series, omegas)
    if method == "I1":
        res = indicator_I1(sweep, medium, x0, source)
    elif method == "I2":
        res = indicator_I2(sweep, medium, source)
    else:
        raise ConfigurationError(f"unknown indicator {method!r}")
    g_time = frequency_to_time(res.omegas, np.where(res.missing[:, None], 0, res.estimates), times)
    return res, g_time
