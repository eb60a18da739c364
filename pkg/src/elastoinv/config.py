"""Experiment configuration read from an INI-style file.

Sections and keys (all optional, defaults reproduce the planar and 3D
reference experiments)::

    [medium]       lambda, mu, rho
    [geometry]     R0, R, T0, T
    [grid]         n, data_n
    [receivers]    count, modal_order
    [frequencies]  list | start, count, spacing
    [landweber]    epsilon (auto | value), L, kinds
    [pulse]        preset (paper | paper-vector | custom), carrier, center, cutoff, amplitude, phase
    [noise]        delta, seed
    [experiment]   kind (spatial | temporal), time_domain, dt, omega_max, omega_step
    [temporal]     points, x0, methods
    [output]       directory
"""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ParameterError
from .greens import ExperimentGeometry, vanish_time
from .medium import make_medium
from .signals import CosGaussPulse, paper_pulse, paper_vector_pulse
from .spatial import KINDS

__all__ = ["ExperimentConfig", "load_config", "parse_config"]


@dataclass
class ExperimentConfig:
    lam: float = 2.0
    mu: float = 1.0
    rho: float = 1.0
    R0: float = 1.5
    R: float = 2.0
    T0: float | None = None
    T: float = 20.0
    n: int = 64
    data_n: int = 128
    receivers: int = 64
    modal_order: int | None = None
    frequencies: list = field(default_factory=lambda: [float(w) for w in range(1, 21)])
    epsilon: float | None = None
    L: int = 10
    kinds: list = field(
        default_factory=lambda: ["full-real", "full-imag", "p-real", "p-imag", "s-real", "s-imag"]
    )
    pulse: str = "paper"
    carrier: float = 1.5 * np.pi
    center: float = 2.0
    cutoff: float = 5.0
    amplitude: float = 1.0
    phase: float = 0.0
    delta: float = 0.0
    seed: int = 0
    kind: str = "spatial"
    time_domain: bool = False
    dt: float = 0.01
    omega_max: float = 30.0
    omega_step: float = 0.1
    points: int = 64
    x0: list = field(default_factory=lambda: [1.0, 1.0, 0.0])
    methods: list = field(default_factory=lambda: ["I1", "I2"])
    output: str | None = None

    # -- derived objects ------------------------------------------------------
    def medium(self):
        return make_medium(self.lam, self.mu, self.rho)

    def make_pulse(self):
        if self.pulse == "paper":
            return paper_pulse()
        if self.pulse == "paper-vector":
            return paper_vector_pulse()
        return CosGaussPulse(self.carrier, self.center, self.cutoff, self.amplitude, self.phase)

    def pulse_duration(self) -> float:
        return self.T0 if self.T0 is not None else float(self.make_pulse().support[1])

    def geometry(self):
        return ExperimentGeometry(self.R0, self.R, self.pulse_duration())

    def echo(self) -> dict:
        """Plain-data view used in manifests (output location excluded)."""
        d = asdict(self)
        d.pop("output")
        return d

    def validate(self):
        try:
            med = self.medium()
        except ParameterError as exc:
            raise ConfigurationError(f"medium: {exc}") from exc
        _require(self.R > self.R0 > 0, "geometry.R", f"need R > R0 > 0 (R={self.R}, R0={self.R0})")
        geo = self.geometry()
        _, Ts = vanish_time(med, geo)
        _require(self.T >= Ts, "geometry.T", f"T = {self.T:g} is below the derived T_s = {Ts:g}")
        _require(self.n >= 4 and self.data_n >= 4, "grid.n", "grids need at least 4 nodes per axis")
        _require(self.receivers >= 2, "receivers.count", "need at least two receivers")
        if self.modal_order is not None:
            _require(self.receivers >= 2 * self.modal_order + 2, "receivers.modal_order",
                     f"order {self.modal_order} needs at least {2 * self.modal_order + 2} receivers")
        w = np.asarray(self.frequencies, dtype=float)
        _require(w.size > 0 and np.all(w > 0) and np.all(np.diff(w) > 0), "frequencies",
                 "frequencies must be positive and strictly increasing")
        _require(self.epsilon is None or self.epsilon > 0, "landweber.epsilon", "epsilon must be positive or 'auto'")
        _require(self.L >= 0, "landweber.L", "L must be non-negative")
        for k in self.kinds:
            _require(k in KINDS, "landweber.kinds", f"unknown kernel kind {k!r}")
        _require(self.pulse in ("paper", "paper-vector", "custom"), "pulse.preset", f"unknown preset {self.pulse!r}")
        _require(self.delta >= 0, "noise.delta", "noise level must be non-negative")
        _require(self.kind in ("spatial", "temporal"), "experiment.kind", f"unknown experiment {self.kind!r}")
        _require(self.dt > 0 and self.omega_step > 0 and self.omega_max > self.omega_step, "experiment.dt",
                 "dt, omega_step must be positive and omega_max > omega_step")
        _require(self.points >= 1, "temporal.points", "need at least one observation point")
        _require(len(self.x0) == 3, "temporal.x0", "x0 needs three coordinates")
        for m in self.methods:
            _require(m in ("I1", "I2"), "temporal.methods", f"unknown indicator {m!r}")
        return self


def _require(cond, path, message):
    if not cond:
        raise ConfigurationError(f"{path}: {message}")


def _list(text, cast=str):
    return [cast(x.strip()) for x in text.replace(";", ",").split(",") if x.strip()]


def parse_config(text: str, base=None) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"config syntax: {exc}") from exc
    cfg = base or ExperimentConfig()

    def get(section, key, cast, attr=None):
        if not parser.has_option(section, key):
            return
        raw = parser.get(section, key).strip()
        try:
            value = cast(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"{section}.{key}: cannot parse {raw!r}") from exc
        setattr(cfg, attr or key, value)

    def flag(raw):
        low = raw.lower()
        if low in ("1", "yes", "true", "on"):
            return True
        if low in ("0", "no", "false", "off"):
            return False
        raise ValueError(raw)

    get("medium", "lambda", float, "lam")
    get("medium", "mu", float)
    get("medium", "rho", float)
    get("geometry", "R0", float)
    get("geometry", "R", float)
    get("geometry", "T0", float)
    get("geometry", "T", float)
    get("grid", "n", int)
    get("grid", "data_n", int)
    get("receivers", "count", int, "receivers")
    get("receivers", "modal_order", int)
    if parser.has_option("frequencies", "list"):
        get("frequencies", "list", lambda s: _list(s, float), "frequencies")
    elif parser.has_section("frequencies"):
        try:
            start = parser.getfloat("frequencies", "start", fallback=1.0)
            count = parser.getint("frequencies", "count", fallback=20)
            spacing = parser.getfloat("frequencies", "spacing", fallback=1.0)
        except ValueError as exc:
            raise ConfigurationError(f"frequencies: {exc}") from exc
        cfg.frequencies = [start + i * spacing for i in range(count)]
    get("landweber", "epsilon", lambda s: None if s.lower() == "auto" else float(s))
    get("landweber", "L", int)
    get("landweber", "kinds", _list)
    get("pulse", "preset", str, "pulse")
    for key in ("carrier", "center", "cutoff", "amplitude", "phase"):
        get("pulse", key, float)
    get("noise", "delta", float)
    get("noise", "seed", int)
    get("experiment", "kind", str)
    get("experiment", "time_domain", flag)
    get("experiment", "dt", float)
    get("experiment", "omega_max", float)
    get("experiment", "omega_step", float)
    get("temporal", "points", int)
    get("temporal", "x0", lambda s: _list(s, float))
    get("temporal", "methods", _list)
    get("output", "directory", str, "output")
    if cfg.kind == "temporal" and not parser.has_option("pulse", "preset"):
        cfg.pulse = "paper-vector"
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"))
