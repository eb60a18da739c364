"""Temporal source functions and their Fourier transforms.

Time-to-frequency convention throughout the package::

    g_hat(omega) = integral g(t) exp(i omega t) dt
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["CosGaussPulse", "SampledPulse", "VectorPulse", "Spectrum", "paper_pulse", "paper_vector_pulse"]

# Gauss-Legendre panel rule used for analytic pulse spectra.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _panel_quadrature(a, b, n_panels):
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class CosGaussPulse:
    """``amplitude * cos(carrier (t - center) + phase) * exp(-decay (t - center)^2)`` on ``[0, cutoff]``.

    The signal is hard-truncated: exactly zero for ``t < 0`` and ``t > cutoff``.
    A sine carrier is ``phase = -pi/2``.
    """

    carrier: float
    center: float
    cutoff: float
    amplitude: float = 1.0
    phase: float = 0.0
    decay: float = np.pi

    def __post_init__(self):
        if self.cutoff <= 0:
            raise DomainError("pulse cutoff must be positive")

    @property
    def support(self):
        return (0.0, float(self.cutoff))

    ncomp = 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = t - self.center
        val = self.amplitude * np.cos(self.carrier * u + self.phase) * np.exp(-self.decay * u * u)
        return np.where((t >= 0) & (t <= self.cutoff), val, 0.0)

    def spectrum(self, omegas):
        """Fourier transform on ``omegas`` by panel Gauss-Legendre quadrature over the support."""
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        wmax = float(np.max(np.abs(omegas))) if omegas.size else 0.0
        n_panels = int(np.ceil(self.cutoff * (wmax + abs(self.carrier) + 40.0) / np.pi)) + 8
        t, w = _panel_quadrature(0.0, self.cutoff, n_panels)
        gw = self(t) * w
        return np.exp(1j * np.outer(omegas, t)) @ gw


@dataclass(frozen=True)
class SampledPulse:
    """Piecewise-linear signal through ``samples`` at ``t0 + n dt``; zero outside the samples."""

    t0: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    ncomp = 1

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def support(self):
        return (max(0.0, float(self.t0)), float(self.t0 + self.dt * (self.samples.size - 1)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tt = self.times
        val = np.interp(t, tt, self.samples, left=0.0, right=0.0)
        return np.where(t >= 0, val, 0.0)

    def spectrum(self, omegas):
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        t = self.times
        w = np.full(t.size, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return np.exp(1j * np.outer(omegas, t)) @ (w * self.samples)


@dataclass(frozen=True)
class VectorPulse:
    """Component-wise vector signal; evaluates to shape ``(..., ncomp)``."""

    components: tuple

    @property
    def ncomp(self):
        return len(self.components)

    @property
    def support(self):
        lo = min(c.support[0] for c in self.components)
        hi = max(c.support[1] for c in self.components)
        return (lo, hi)

    def __call__(self, t):
        return np.stack([c(t) for c in self.components], axis=-1)

    def spectrum(self, omegas):
        return np.stack([c.spectrum(omegas) for c in self.components], axis=-1)


@dataclass
class Spectrum:
    """Samples of a Fourier transform of a real signal at non-negative frequencies."""

    omegas: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape[0] != self.omegas.size:
            raise DomainError("spectrum values must have one row per frequency")

    def at(self, omega):
        """Value at a stored frequency or its negative (by conjugation)."""
        idx = np.flatnonzero(np.isclose(self.omegas, abs(omega), rtol=0, atol=1e-12))
        if idx.size == 0:
            raise DomainError(f"frequency {omega} not in spectrum")
        v = self.values[idx[0]]
        return np.conj(v) if omega < 0 else v


def paper_pulse():
    """Scalar test pulse: cos(1.5 pi (t-2)) exp(-pi (t-2)^2), truncated to [0, 5]."""
    return CosGaussPulse(carrier=1.5 * np.pi, center=2.0, cutoff=5.0)


def paper_vector_pulse():
    """Three-component pulse used for temporal recovery experiments."""
    return VectorPulse(
        (
            CosGaussPulse(carrier=1.5 * np.pi, center=2.0, cutoff=5.0),
            CosGaussPulse(carrier=2.0 * np.pi, center=3.0, cutoff=4.0, phase=-np.pi / 2),
            CosGaussPulse(carrier=np.pi, center=2.0, cutoff=3.0, phase=-np.pi / 2),
        )
    )
