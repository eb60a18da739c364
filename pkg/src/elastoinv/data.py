"""Containers for sampled fields and receiver records."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = ["GridField", "ReceiverArray", "TimeSeriesData", "FrequencySweepData"]

_SUPPORT_TOL = 1e-12


@dataclass
class GridField:
    """Scalar or vector function sampled at the nodes of a uniform rectangular grid.

    ``values`` has shape ``(components, *shape)``.  Node ``i`` along axis ``a``
    sits at ``origin[a] + i * spacing[a]``; every node carries the cell weight
    ``prod(spacing)`` in quadratures.  If ``support_radius`` is given, the
    field is declared to vanish outside the closed ball of that radius about
    the coordinate origin, and the declaration is checked.
    """

    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray
    support_radius: float | None = None

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float)
        self.spacing = np.asarray(self.spacing, dtype=float)
        self.values = np.asarray(self.values)
        if not np.iscomplexobj(self.values):
            self.values = self.values.astype(float)
        dim = self.origin.size
        if dim not in (2, 3) or self.spacing.size != dim:
            raise ConfigurationError("origin and spacing must both have 2 or 3 entries")
        if np.any(self.spacing <= 0):
            raise ConfigurationError("grid spacing must be positive on every axis")
        if self.values.ndim == dim:
            self.values = self.values[None]
        if self.values.ndim != dim + 1:
            raise ConfigurationError(f"values must have shape (components, *shape) with {dim} spatial axes")
        if self.support_radius is not None:
            outside = ~self.support_mask()
            peak = np.max(np.abs(self.values)) if self.values.size else 0.0
            if np.any(np.abs(self.values[:, outside]) > _SUPPORT_TOL * max(peak, 1.0)):
                raise DomainError(f"field has nonzero values outside the declared support radius {self.support_radius}")

    # -- layout ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.origin.size

    @property
    def components(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple:
        return self.values.shape[1:]

    @property
    def cell_weight(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self):
        return [self.origin[a] + self.spacing[a] * np.arange(n) for a, n in enumerate(self.shape)]

    def points(self):
        """Node coordinates, shape ``(*shape, dim)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def support_mask(self, radius=None):
        radius = self.support_radius if radius is None else radius
        if radius is None:
            return np.ones(self.shape, dtype=bool)
        return np.linalg.norm(self.points(), axis=-1) <= radius

    def same_layout(self, other: "GridField") -> bool:
        return (
            self.shape == other.shape
            and np.allclose(self.origin, other.origin, rtol=0, atol=1e-12)
            and np.allclose(self.spacing, other.spacing, rtol=1e-12, atol=0)
        )

    def with_values(self, values, support_radius=None):
        return GridField(self.origin, self.spacing, values, support_radius)

    # -- constructors -----------------------------------------------------
    @classmethod
    def centered(cls, n, half_width, dim=2, components=1, support_radius=None):
        """Zero field on ``n`` nodes per axis covering ``[-half_width, half_width)`` cells.

        Nodes are cell centres, so the grid is symmetric about the origin.
        """
        n = np.broadcast_to(np.asarray(n, dtype=int), (dim,))
        hw = np.broadcast_to(np.asarray(half_width, dtype=float), (dim,))
        h = 2 * hw / n
        origin = -hw + h / 2
        return cls(origin, h, np.zeros((components, *n)), None if support_radius is None else support_radius)

    @classmethod
    def from_function(cls, func, n, half_width, dim=2, support_radius=None):
        """Sample ``func(points) -> (..., components)`` or ``(...)`` on a centred grid.

        Values outside ``support_radius`` are set to zero.
        """
        g = cls.centered(n, half_width, dim)
        pts = g.points()
        vals = np.asarray(func(pts))
        if vals.ndim == dim:
            vals = vals[..., None]
        vals = np.moveaxis(vals, -1, 0).astype(float)
        if support_radius is not None:
            vals = np.where(np.linalg.norm(pts, axis=-1) <= support_radius, vals, 0.0)
        return cls(g.origin, g.spacing, vals, support_radius)


@dataclass
class ReceiverArray:
    """Measurement locations, all on the sphere (circle) of radius ``radius``."""

    points: np.ndarray
    radius: float | None = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[1] not in (2, 3):
            raise ConfigurationError("receiver points must be 2D or 3D")
        r = np.linalg.norm(self.points, axis=1)
        if self.radius is None:
            self.radius = float(r[0])
        if not np.allclose(r, self.radius, rtol=1e-12, atol=0):
            raise DomainError("receivers must all lie at the declared radius")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.count

    @classmethod
    def circle(cls, count, radius, phase=0.0):
        theta = phase + 2 * np.pi * np.arange(count) / count
        return cls(radius * np.column_stack([np.cos(theta), np.sin(theta)]), float(radius))

    def angles(self):
        return np.arctan2(self.points[:, 1], self.points[:, 0])

    def index_of(self, x, atol=1e-12):
        d = np.linalg.norm(self.points - np.asarray(x, dtype=float), axis=1)
        i = int(np.argmin(d))
        if d[i] > atol:
            raise DomainError(f"point {x} is not one of the receivers")
        return i


@dataclass
class TimeSeriesData:
    """Receiver records on a uniform time grid; ``samples[m, c, n] = U_c(x_m, t0 + n dt)``."""

    receivers: ReceiverArray
    t0: float
    dt: float
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if self.samples.ndim != 3 or self.samples.shape[0] != self.receivers.count:
            raise ConfigurationError("samples must have shape (receivers, components, times)")

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.samples.shape[2])

    @property
    def components(self):
        return self.samples.shape[1]


@dataclass
class FrequencySweepData:
    """Fourier-domain receiver records; ``values[m, c, k] = U_hat_c(x_m, omega_k)``.

    Frequencies must be strictly increasing.  Zero and negative values are
    allowed so that transforms can be checked for conjugate symmetry and
    inverse transforms can start at ``omega = 0``; the consumers that need
    positive frequencies check that themselves.
    """

    receivers: ReceiverArray
    omegas: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omegas = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        self.values = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(self.omegas)) or np.any(np.diff(self.omegas) <= 0):
            raise ConfigurationError("omegas must be finite and strictly increasing")
        if self.values.shape != (self.receivers.count, self.values.shape[1], self.omegas.size):
            raise ConfigurationError("values must have shape (receivers, components, frequencies)")

    @property
    def components(self):
        return self.values.shape[1]

    def at(self, omega, atol=1e-9):
        """Receiver-by-component slice at one stored frequency."""
        idx = np.flatnonzero(np.abs(self.omegas - omega) <= atol)
        if idx.size == 0:
            raise DomainError(f"frequency {omega} not present in sweep")
        return self.values[:, :, idx[0]]
