"""Flat ``key = value`` experiment configuration.

Values are Python literals (numbers, strings, lists), bare words, or
``geom(start, stop, n)`` for a geometric grid.  A unit suffix on the key
converts to SI / angular units::

    model = lz
    J_khz = 31.75                 # 2*pi*31.75e3 rad/s
    delta_max_khz = [25, 41, 57]
    tau_ratio = geom(0.015625, 16, 41)
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .hamiltonian import TWO_PI

# suffix -> multiplier onto rad/s or s
UNIT_SUFFIXES = {
    "_khz": TWO_PI * 1e3,
    "_mhz": TWO_PI * 1e6,
    "_krad_s": 1e3,
    "_rad_s": 1.0,
    "_us": 1e-6,
    "_ms": 1e-3,
    "_s": 1.0,
}
ANGULAR_KEYS = ("coupling", "delta_max")
TIME_KEYS = ("T",)
ALIASES = {"J": "coupling", "w": "coupling"}
MODELS = ("lz", "ricemele")
ENGINES = ("numeric", "analytic", "tomographic")
_GEOM = re.compile(r"^geom\((.*)\)$")


def geom(start: float, stop: float, n: int) -> list[float]:
    if not (start > 0 and stop > 0 and int(n) == n and n >= 1):
        raise ValueError("geom needs positive endpoints and an integer count")
    if n == 1:
        return [float(start)]
    return [float(v) for v in np.geomspace(start, stop, int(n))]


def default_tau_grid() -> list[float]:
    """2^-6 ... 2^4 at quarter-octave steps."""
    return [2.0 ** (k / 4) for k in range(-24, 17)]


def default_rm_grid() -> list[float]:
    """T*delta_max from 2^-5 to 2^9 at half-octave steps."""
    return [2.0 ** (k / 2) for k in range(-10, 19)]


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "lz"
    coupling: float = TWO_PI * 31.75e3  # J for lz; unused scale for ricemele
    delta_max: tuple[float, ...] = (TWO_PI * 41e3,)
    tau_ratio: tuple[float, ...] | None = None  # lz: tau_Q / tau_0
    T: tuple[float, ...] | None = None  # explicit durations (s)
    T_delta_max: tuple[float, ...] | None = None  # ricemele: dimensionless T*delta_max
    engine: str = "numeric"
    shots: int = 10_000
    seed: int = 0
    n_points: int = 129
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    eps_plateau: float = 0.05
    window_factor: float = 2.0
    workers: int | None = None
    out: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError("model", f"must be one of {MODELS}, got {self.model!r}")
        if self.engine not in ENGINES:
            raise ConfigError("engine", f"must be one of {ENGINES}, got {self.engine!r}")
        if not self.coupling > 0:
            raise ConfigError("coupling", "must be positive")
        _check_list("delta_max", self.delta_max)
        for name in ("tau_ratio", "T", "T_delta_max"):
            if getattr(self, name) is not None:
                _check_list(name, getattr(self, name))
        if sum(getattr(self, n) is not None for n in ("tau_ratio", "T", "T_delta_max")) > 1:
            raise ConfigError("T", "give only one of T, tau_ratio, T_delta_max")
        for name in ("shots", "n_points", "seed"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(name, "must be a non-negative integer")
        if self.n_points < 16:
            raise ConfigError("n_points", "must be at least 16")
        if self.seed >= 2**64:
            raise ConfigError("seed", "must fit in 64 bits")
        for name in ("rel_tol", "abs_tol", "eps_plateau"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(name, "must lie in (0, 1)")
        if not self.window_factor >= 1:
            raise ConfigError("window_factor", "must be >= 1")
        if self.workers is not None and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError("workers", "must be a positive integer")

    def durations(self, delta_max: float) -> list[float]:
        """Quench durations T for one quench range."""
        if self.T is not None:
            return list(self.T)
        if self.model == "lz":
            taus = self.tau_ratio if self.tau_ratio is not None else default_tau_grid()
            return [t * delta_max / self.coupling**2 for t in taus]
        grid = self.T_delta_max if self.T_delta_max is not None else default_rm_grid()
        return [x / delta_max for x in grid]

    def with_overrides(self, **kw) -> ExperimentConfig:
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def to_json(self) -> dict:
        """Config echo.  Worker count and output path are run details kept
        out of the echo so data files do not depend on them."""
        d = asdict(self)
        del d["workers"], d["out"]
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


def _check_list(name, values):
    if len(values) == 0:
        raise ConfigError(name, "must not be empty")
    for i, v in enumerate(values):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(f"{name}[{i}]", f"must be a positive number, got {v!r}")


def parse_value(text: str, path: str):
    text = text.strip()
    m = _GEOM.match(text)
    if m:
        try:
            args = ast.literal_eval("(" + m.group(1) + ",)")
            return geom(*args)
        except (ValueError, SyntaxError, TypeError) as exc:
            raise ConfigError(path, f"bad geom(...) expression: {exc}") from None
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        if re.fullmatch(r"[A-Za-z_][\w\-]*", text):
            return text
        raise ConfigError(path, f"cannot parse value {text!r}") from None


def _split_unit(key: str):
    for suffix, scale in UNIT_SUFFIXES.items():
        if key.endswith(suffix) and len(key) > len(suffix):
            return key[: -len(suffix)], suffix, scale
    return key, None, 1.0


def _scale(value, scale, path):
    if isinstance(value, list):
        return [_scale(v, scale, f"{path}[{i}]") for i, v in enumerate(value)]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return value * scale


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", "expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        base, suffix, scale = _split_unit(key)
        base = ALIASES.get(base, base)
        if base not in known:
            raise ConfigError(key, "unknown key")
        if suffix is not None:
            if base in ANGULAR_KEYS and suffix in ("_us", "_ms", "_s"):
                raise ConfigError(key, "time unit on a frequency field")
            if base in TIME_KEYS and suffix not in ("_us", "_ms", "_s"):
                raise ConfigError(key, "frequency unit on a time field")
            if base not in ANGULAR_KEYS + TIME_KEYS:
                raise ConfigError(key, "units only apply to coupling, delta_max and T")
        if base in raw:
            raise ConfigError(key, "given twice")
        val = parse_value(value, key)
        if suffix is not None:
            val = _scale(val, scale, key)
        raw[base] = val
    for name in ("delta_max", "tau_ratio", "T", "T_delta_max"):
        if name in raw:
            v = raw[name]
            raw[name] = tuple(v) if isinstance(v, (list, tuple)) else (v,)
    for name in ("coupling", "rel_tol", "abs_tol", "eps_plateau", "window_factor"):
        if name in raw and isinstance(raw[name], int) and not isinstance(raw[name], bool):
            raw[name] = float(raw[name])
    return ExperimentConfig(**raw)


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(str(p), f"cannot read: {exc.strerror}") from None
    return parse_config(text, str(p))
