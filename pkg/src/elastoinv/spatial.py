"""Landweber frequency marching for the spatial factor of the source.

Each frequency contributes a real first-kind system ``V_k S = v_k``: the
real or imaginary part of the full Green's tensor acting on the vector
source, or of ``Phi_{k_alpha} / gamma_alpha`` acting on one of its Helmholtz
potentials.  The unknowns are the grid values inside the support disk.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import FrequencySweepData, GridField, ReceiverArray
from .errors import ConfigurationError, DomainError
from .forward import spectrum_values
from .greens import greens_frequency
from .medium import ElasticMedium, fundamental_solution

__all__ = [
    "KINDS",
    "LinearOperator",
    "LandweberConfig",
    "LandweberResult",
    "TraceRecord",
    "build_operator",
    "apply",
    "adjoint_apply",
    "operator_data",
    "estimate_norm",
    "landweber_march",
    "relative_l2_error",
]

KINDS = (
    "full-real",
    "full-imag",
    "full-both",
    "p-real",
    "p-imag",
    "p-both",
    "s-real",
    "s-imag",
    "s-both",
)


def _split_kind(kind):
    if kind not in KINDS:
        raise ConfigurationError(f"unknown kernel kind {kind!r}; expected one of {', '.join(KINDS)}")
    family, part = kind.split("-")
    return family, part


def _take_part(z, part):
    if part == "real":
        return z.real
    if part == "imag":
        return z.imag
    return np.concatenate([z.real, z.imag], axis=0)


@dataclass
class LinearOperator:
    """Dense real discretization of one kernel at one frequency.

    ``matrix[row, col]`` holds ``cell_weight * Re|Im kernel(x_m - y_j)``.
    Rows run over receivers (and components for the full kernel, receiver
    major); the stacked kinds append the imaginary rows after the real ones.
    Columns run over the unknown cells, component major.
    """

    kind: str
    omega: float
    matrix: np.ndarray
    grid: GridField
    mask: np.ndarray
    receivers: ReceiverArray
    row_weights: np.ndarray = None

    def __post_init__(self):
        if self.row_weights is None:
            self.row_weights = np.ones(self.matrix.shape[0])
        if not np.all(np.isfinite(self.matrix)):
            raise DomainError("operator has non-finite entries")

    @property
    def family(self) -> str:
        return self.kind.split("-")[0]

    @property
    def components(self) -> int:
        return self.grid.dim if self.family == "full" else 1

    @property
    def cell_weight(self) -> float:
        return self.grid.cell_weight

    @property
    def cells(self):
        """Centres of the unknown cells, shape ``(Nc, dim)``."""
        return self.grid.points()[self.mask]

    @property
    def shape(self):
        return self.matrix.shape

    def unknowns(self, S: GridField):
        if not S.same_layout(self.grid) or S.components != self.components:
            raise ConfigurationError("field layout does not match the operator grid")
        return np.asarray(S.values[:, self.mask], dtype=float).ravel()

    def to_field(self, x):
        vals = np.zeros((self.components, *self.grid.shape))
        vals[:, self.mask] = np.asarray(x, dtype=float).reshape(self.components, -1)
        return GridField(self.grid.origin, self.grid.spacing, vals, self.grid.support_radius)

    def zero_field(self):
        return self.to_field(np.zeros(self.matrix.shape[1]))


def build_operator(kind: str, medium: ElasticMedium, omega: float, grid: GridField, receivers: ReceiverArray):
    """Discretize one kernel on the cells of ``grid`` inside its support disk.

    ``grid`` supplies only the layout (origin, spacing, shape, support
    radius).  Receivers must lie outside the unknown cells.
    """
    family, part = _split_kind(kind)
    if grid.dim != 2 or receivers.dim != 2:
        raise DomainError("spatial inversion is planar: grid and receivers must be 2D")
    mask = grid.support_mask()
    template = GridField(grid.origin, grid.spacing, np.zeros((1, *grid.shape)), grid.support_radius)
    cells = template.points()[mask]
    diff = receivers.points[:, None, :] - cells[None, :, :]
    w = grid.cell_weight
    if family == "full":
        G = greens_frequency(medium, omega, 2, diff)  # (M, Nc, 2, 2)
        K = w * G.transpose(0, 2, 3, 1).reshape(2 * receivers.count, 2 * cells.shape[0])
    else:
        k = medium.wavenumber(omega, family)
        K = w * fundamental_solution(2, k, diff) / medium.gamma(family)
    return LinearOperator(kind, float(omega), _take_part(K, part), template, mask, receivers)


def apply(op: LinearOperator, S: GridField):
    """Data vector ``V S``."""
    return op.matrix @ op.unknowns(S)


def adjoint_apply(op: LinearOperator, residual):
    """``V* r`` with respect to the cell-weighted grid inner product.

    The adjoint of ``x -> A x`` from ``(R^n, w <.,.>)`` to Euclidean data
    space is ``r -> A^T r / w``.
    """
    residual = np.asarray(residual, dtype=float)
    if residual.shape != (op.matrix.shape[0],):
        raise ConfigurationError(f"residual must have length {op.matrix.shape[0]}")
    return op.to_field(op.matrix.T @ residual / op.cell_weight)


def operator_data(op: LinearOperator, data, g_hat=None):
    """Right-hand side ``v`` for ``op`` from receiver values at ``op.omega``.

    ``data`` is a :class:`FrequencySweepData` or a complex ``(M, C)`` array.
    With ``g_hat`` given, the values are divided by the pulse spectrum first.
    """
    vals = data.at(op.omega) if isinstance(data, FrequencySweepData) else np.asarray(data, dtype=complex)
    expect = (op.receivers.count, op.components)
    if vals.shape != expect:
        raise ConfigurationError(f"data at omega={op.omega} has shape {vals.shape}, expected {expect}")
    if g_hat is not None:
        gh = complex(spectrum_values(g_hat, [op.omega])[0])
        if gh == 0:
            raise DomainError(f"pulse spectrum vanishes at omega={op.omega}")
        vals = vals / gh
    return _take_part(vals.ravel(), op.kind.split("-")[1])


def estimate_norm(op: LinearOperator, iterations: int = 30) -> float:
    """Largest singular value of ``V`` (grid inner product) by power iteration on ``V* V``.

    The start vector comes from a fixed seed, so the estimate is
    deterministic; a random start avoids missing singular vectors that are
    odd under the grid symmetries.
    """
    x = np.random.default_rng(0).standard_normal(op.matrix.shape[1])
    w = op.cell_weight
    sigma2 = 0.0
    for _ in range(iterations):
        nx = np.sqrt(w) * np.linalg.norm(x)
        if nx == 0:
            return 0.0
        x = x / nx
        y = op.matrix.T @ (op.matrix @ x) / w
        sigma2 = float(w * (x @ y))
        x = y
    return float(np.sqrt(max(sigma2, 0.0)))


@dataclass
class LandweberConfig:
    """Step length ``epsilon`` (``None`` for automatic), inner count ``L`` and initial field."""

    L: int = 10
    epsilon: float | None = None
    initial: GridField | None = None
    power_iterations: int = 30

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 0:
            raise ConfigurationError("L must be a non-negative integer")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")


@dataclass
class TraceRecord:
    k: int
    omega: float
    l: int
    residual: float
    error: float | None = None


@dataclass
class LandweberResult:
    field: GridField
    trace: list
    epsilon: float
    sigma: np.ndarray
    warnings: list = field(default_factory=list)

    def residuals(self, k):
        return np.array([r.residual for r in self.trace if r.k == k])

    def monotone(self, rtol=1e-12) -> bool:
        """True when every inner loop has a non-increasing residual."""
        for k in sorted({r.k for r in self.trace}):
            res = self.residuals(k)
            if np.any(np.diff(res) > rtol * max(res[0], 1e-300)):
                return False
        return True


def landweber_march(ops, data, config: LandweberConfig | None = None, truth: GridField | None = None):
    """Frequency-marching Landweber iteration.

    For ``k = 1..K`` in the given (ascending) order, ``L`` updates
    ``S <- S + epsilon V_k* (v_k - V_k S)`` are applied, warm-starting from
    the previous frequency.  The trace holds the residual norm (and the
    relative error against ``truth`` when supplied) before the first and
    after every update.

    Parameters
    ----------
    ops : sequence of LinearOperator
    data : sequence of ndarray
        Right-hand sides, one per operator.
    config : LandweberConfig
        With ``epsilon=None`` the step is ``1 / sigma^2``, ``sigma`` being the
        largest estimated singular value over all operators.
    """
    config = config or LandweberConfig()
    ops = list(ops)
    data = [np.asarray(v, dtype=float) for v in data]
    if not ops or len(ops) != len(data):
        raise ConfigurationError("need one data vector per operator")
    first = ops[0]
    for op, v in zip(ops, data):
        if not op.grid.same_layout(first.grid) or op.components != first.components or not np.array_equal(op.mask, first.mask):
            raise ConfigurationError("all operators must share one grid layout and unknown set")
        if v.shape != (op.matrix.shape[0],):
            raise ConfigurationError(f"data at omega={op.omega} does not match the operator rows")
    omegas = np.array([op.omega for op in ops])
    if np.any(np.diff(omegas) <= 0):
        raise ConfigurationError("frequencies must be strictly increasing")

    sigma = np.array([estimate_norm(op, config.power_iterations) for op in ops])
    eps = config.epsilon
    if eps is None:
        top = float(sigma.max())
        if top == 0:
            raise DomainError("all operators vanish")
        eps = 1.0 / top**2
    warnings = []
    for op, s in zip(ops, sigma):
        if eps * s**2 >= 2:
            warnings.append(f"epsilon*sigma^2 = {eps * s**2:.3g} >= 2 at omega={op.omega}: iteration may diverge")

    x = np.zeros(first.matrix.shape[1]) if config.initial is None else first.unknowns(config.initial)
    w = first.cell_weight
    truth_x = truth_norm = None
    if truth is not None:
        truth_x = first.unknowns(truth)
        truth_norm = np.linalg.norm(truth_x)

    def err(x):
        if truth_x is None:
            return None
        d = np.linalg.norm(x - truth_x)
        return float(d / truth_norm) if truth_norm > 0 else float(np.sqrt(w) * d)

    trace = []
    for k, (op, v) in enumerate(zip(ops, data), start=1):
        A = op.matrix
        r = v - A @ x
        trace.append(TraceRecord(k, op.omega, 0, float(np.linalg.norm(r)), err(x)))
        for l in range(1, config.L + 1):
            x = x + eps * (A.T @ r) / w
            r = v - A @ x
            trace.append(TraceRecord(k, op.omega, l, float(np.linalg.norm(r)), err(x)))
    return LandweberResult(first.to_field(x), trace, float(eps), sigma, warnings)


def relative_l2_error(reconstruction: GridField, truth: GridField, *, with_flag=False):
    """Cell-weighted ``||a - b|| / ||b||``.

    When ``truth`` vanishes identically the absolute norm ``||a - b||`` is
    returned instead; ``with_flag=True`` returns ``(value, is_relative)``.
    """
    if not reconstruction.same_layout(truth) or reconstruction.components != truth.components:
        raise ConfigurationError("fields must share grid layout and component count")
    w = truth.cell_weight
    diff = np.sqrt(w * np.sum(np.abs(reconstruction.values - truth.values) ** 2))
    ref = np.sqrt(w * np.sum(np.abs(truth.values) ** 2))
    if ref == 0:
        return (float(diff), False) if with_flag else float(diff)
    value = float(diff / ref)
    return (value, True) if with_flag else value
