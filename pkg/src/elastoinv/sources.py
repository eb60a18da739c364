"""Reference planar source used by the reconstruction experiments.

``f = grad f_p + curl f_s`` with ``curl h = (d2 h, -d1 h)``, where ``f_p`` is a
peaks-type combination of Gaussians and ``f_s = 135 x1^2 x2 exp(-9|x|^2)``.
All functions take points of shape ``(..., 2)``.
"""
from __future__ import annotations

import numpy as np

from .data import GridField

__all__ = ["reference_fp", "reference_fs", "reference_fp_grad", "reference_fs_grad", "reference_f", "reference_fields"]


def _xy(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0], x[..., 1]


def reference_fp(x):
    x1, x2 = _xy(x)
    e1 = np.exp(-9 * x1**2 - (3 * x2 + 1) ** 2)
    e2 = np.exp(-9 * x1**2 - 9 * x2**2)
    e3 = np.exp(-((3 * x1 + 1) ** 2) - 9 * x2**2)
    return 0.3 * (1 - 3 * x1) ** 2 * e1 - (0.6 * x1 - 27 * x1**3 - 243 * x2**5) * e2 - 0.03 * e3


def reference_fs(x):
    x1, x2 = _xy(x)
    return 135 * x1**2 * x2 * np.exp(-9 * x1**2 - 9 * x2**2)


def reference_fp_grad(x):
    x1, x2 = _xy(x)
    e1 = np.exp(-9 * x1**2 - (3 * x2 + 1) ** 2)
    e2 = np.exp(-9 * x1**2 - 9 * x2**2)
    e3 = np.exp(-((3 * x1 + 1) ** 2) - 9 * x2**2)
    a = 1 - 3 * x1
    poly = 0.6 * x1 - 27 * x1**3 - 243 * x2**5
    d1 = (
        0.3 * (-6 * a - 18 * x1 * a**2) * e1
        - ((0.6 - 81 * x1**2) - 18 * x1 * poly) * e2
        + 0.18 * (3 * x1 + 1) * e3
    )
    d2 = (
        -1.8 * a**2 * (3 * x2 + 1) * e1
        - (-1215 * x2**4 - 18 * x2 * poly) * e2
        + 0.54 * x2 * e3
    )
    return np.stack([d1, d2], axis=-1)


def reference_fs_grad(x):
    x1, x2 = _xy(x)
    e2 = np.exp(-9 * x1**2 - 9 * x2**2)
    d1 = 135 * (2 * x1 * x2 - 18 * x1**3 * x2) * e2
    d2 = 135 * (x1**2 - 18 * x1**2 * x2**2) * e2
    return np.stack([d1, d2], axis=-1)


def reference_f(x):
    """Vector source ``grad f_p + curl f_s``."""
    gp = reference_fp_grad(x)
    gs = reference_fs_grad(x)
    return np.stack([gp[..., 0] + gs[..., 1], gp[..., 1] - gs[..., 0]], axis=-1)


def reference_fields(n, half_width, support_radius=None):
    """``(f, f_p, f_s)`` sampled on a centred ``n x n`` grid, zeroed outside ``support_radius``."""
    f = GridField.from_function(reference_f, n, half_width, 2, support_radius)
    fp = GridField.from_function(reference_fp, n, half_width, 2, support_radius)
    fs = GridField.from_function(reference_fs, n, half_width, 2, support_radius)
    return f, fp, fs
