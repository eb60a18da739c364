"""Self-describing CSV files and run manifests.

Every data file starts with ``# key: value`` header lines followed by a
``# columns:`` line and plain comma-separated rows.  Floats are written with
``repr`` so the text is locale independent and round-trips exactly.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .data import FrequencySweepData, GridField, ReceiverArray, TimeSeriesData
from .errors import ConfigurationError

__all__ = [
    "write_table",
    "read_table",
    "write_grid",
    "read_grid",
    "write_sweep",
    "read_sweep",
    "write_series",
    "read_series",
    "write_manifest",
    "file_digest",
]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _header_value(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_fmt(x) for x in np.ravel(v))
    return _fmt(v)


def write_table(path, columns, rows, header=None):
    """Write ``rows`` (2D array or list of sequences) under ``columns`` with a header block.

    The structured writers below put their layout keys after any user
    metadata, so metadata can never shadow ``kind``, ``dim`` and friends.
    """
    path = Path(path)
    lines = [f"# {k}: {_header_value(v)}" for k, v in (header or {}).items()]
    lines.append("# columns: " + ",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_table(path):
    """Return ``(header dict, column names, array)``.

    The array is float unless some cell is not a number, in which case it
    has object dtype with the text cells kept as strings.
    """
    path = Path(path)
    header, columns, rows = {}, None, []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                key, value = key.strip(), value.strip()
                if key == "columns":
                    columns = value.split(",")
                else:
                    header[key] = value
                continue
            rows.append([_cell(x) for x in line.split(",")])
    if columns is None:
        raise ConfigurationError(f"{path}: missing '# columns:' line")
    numeric = all(isinstance(v, float) for row in rows for v in row)
    data = np.array(rows, dtype=float if numeric else object).reshape(-1, len(columns))
    return header, columns, data


def _cell(text):
    try:
        return float(text)
    except ValueError:
        return text


def _floats(text):
    return np.array([float(x) for x in text.split()], dtype=float)


def write_grid(path, field: GridField, meta=None):
    """One row per node: index columns, coordinates, then component values."""
    dim = field.dim
    idx = np.indices(field.shape).reshape(dim, -1).T
    pts = field.points().reshape(-1, dim)
    vals = field.values.reshape(field.components, -1).T
    if np.iscomplexobj(vals):
        raise ConfigurationError("grid files hold real fields")
    header = {"kind": "grid", "dim": dim, "components": field.components, "origin": field.origin,
              "spacing": field.spacing, "shape": list(field.shape)}
    if field.support_radius is not None:
        header["support_radius"] = field.support_radius
    header = {**(meta or {}), **header}
    cols = [f"i{a}" for a in range(dim)] + [f"x{a + 1}" for a in range(dim)] + [f"v{c}" for c in range(field.components)]
    return write_table(path, cols, np.hstack([idx, pts, vals]).tolist(), header)


def read_grid(path) -> GridField:
    header, cols, data = read_table(path)
    if header.get("kind") != "grid":
        raise ConfigurationError(f"{path}: not a grid file")
    dim = int(header["dim"])
    ncomp = int(header["components"])
    shape = tuple(int(s) for s in header["shape"].split())
    vals = data[:, 2 * dim :].T.reshape(ncomp, *shape)
    support = float(header["support_radius"]) if "support_radius" in header else None
    return GridField(_floats(header["origin"]), _floats(header["spacing"]), vals, support)


def write_sweep(path, sweep: FrequencySweepData, meta=None):
    """Rows ``(receiver, x..., omega, re_c, im_c, ...)``, receiver major."""
    rec = sweep.receivers
    M, C, K = sweep.values.shape
    rows = []
    for m in range(M):
        for k in range(K):
            v = sweep.values[m, :, k]
            rows.append([m, *rec.points[m], sweep.omegas[k], *np.column_stack([v.real, v.imag]).ravel()])
    cols = ["receiver"] + [f"x{a + 1}" for a in range(rec.dim)] + ["omega"]
    cols += [f"{p}{c}" for c in range(C) for p in ("re", "im")]
    header = {"kind": "sweep", "dim": rec.dim, "components": C, "receivers": M, "frequencies": K, "radius": rec.radius}
    header = {**sweep.meta, **(meta or {}), **header}
    return write_table(path, cols, rows, header)


def read_sweep(path) -> FrequencySweepData:
    header, cols, data = read_table(path)
    if header.get("kind") != "sweep":
        raise ConfigurationError(f"{path}: not a frequency sweep file")
    dim, C = int(header["dim"]), int(header["components"])
    M, K = int(header["receivers"]), int(header["frequencies"])
    data = data.reshape(M, K, -1)
    pts = data[:, 0, 1 : 1 + dim]
    omegas = data[0, :, 1 + dim]
    z = data[:, :, 2 + dim :].reshape(M, K, C, 2)
    values = np.transpose(z[..., 0] + 1j * z[..., 1], (0, 2, 1))
    meta = {k: v for k, v in header.items() if k not in ("kind", "dim", "components", "receivers", "frequencies", "radius")}
    return FrequencySweepData(ReceiverArray(pts), omegas, values, meta)


def write_series(path, series: TimeSeriesData, meta=None):
    """Rows ``(receiver, x..., t, u_c...)``, receiver major."""
    rec = series.receivers
    M, C, nt = series.samples.shape
    t = series.times
    rows = []
    for m in range(M):
        for n in range(nt):
            rows.append([m, *rec.points[m], t[n], *series.samples[m, :, n]])
    cols = ["receiver"] + [f"x{a + 1}" for a in range(rec.dim)] + ["t"] + [f"u{c}" for c in range(C)]
    header = {"kind": "series", "dim": rec.dim, "components": C, "receivers": M, "times": nt, "t0": series.t0, "dt": series.dt}
    header = {**series.meta, **(meta or {}), **header}
    return write_table(path, cols, rows, header)


def read_series(path) -> TimeSeriesData:
    header, cols, data = read_table(path)
    if header.get("kind") != "series":
        raise ConfigurationError(f"{path}: not a time series file")
    dim = int(header["dim"])
    M, nt = int(header["receivers"]), int(header["times"])
    data = data.reshape(M, nt, -1)
    pts = data[:, 0, 1 : 1 + dim]
    samples = np.transpose(data[:, :, 2 + dim :], (0, 2, 1))
    meta = {k: v for k, v in header.items() if k not in ("kind", "dim", "components", "receivers", "times", "t0", "dt")}
    return TimeSeriesData(ReceiverArray(pts), float(header["t0"]), float(header["dt"]), samples, meta)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(directory, config_echo: dict, files, name="manifest.json"):
    """Write the configuration echo and SHA-256 digests of ``files`` (names relative to ``directory``)."""
    directory = Path(directory)
    entries = {Path(f).name: file_digest(directory / Path(f).name) for f in sorted(files, key=lambda p: Path(p).name)}
    payload = {"config": config_echo, "files": entries}
    path = directory / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
