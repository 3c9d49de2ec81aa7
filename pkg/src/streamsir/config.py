"""Flat key=value configuration files shared by the command-line tools.

One setting per line, `key = value`, with `#` comments and blank lines
ignored.  Values are parsed as JSON where possible (numbers, arrays,
booleans) and fall back to bare strings, so paths need no quoting.
Unknown keys are rejected rather than ignored: a typo that silently
reverts a setting to its default is worse than an error.  Flags given on
the command line override file values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError

_KERNELS = ("epanechnikov", "tabulated")
_MODELS = ("reference",)


@dataclass(frozen=True)
class EngineConfig:
    """Resolved settings of one command-line invocation.

    Attributes mirror the accepted configuration keys; None means "not
    set" for overridable settings whose defaults depend on the data.
    """

    alpha: float = 0.35
    warmup: int | None = None
    boundary: float | None = None
    kernel: str = "epanechnikov"
    kernel_table: str | None = None
    grid_min: float = -3.0
    grid_max: float = 3.0
    grid_count: int = 121
    seed: int = 0
    model: str = "reference"
    n: int = 1000
    p: int = 10
    noise_std: float = 1.0
    input: str | None = None
    out_dir: str | None = None

    def grid_points(self) -> np.ndarray:
        """Evenly spaced estimate abscissas, endpoints included."""
        if self.grid_count == 1:
            return np.array([self.grid_min], dtype=np.float64)
        return np.linspace(self.grid_min, self.grid_max, self.grid_count)


_INT_KEYS = {"warmup", "grid_count", "seed", "n", "p"}
_FLOAT_KEYS = {"alpha", "boundary", "grid_min", "grid_max", "noise_std"}
_STR_KEYS = {"kernel", "kernel_table", "model", "input", "out_dir"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def _coerce(key: str, raw: Any) -> Any:
    if key in _INT_KEYS:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"key {key!r} needs an integer, got {raw!r}", key=key)
        if isinstance(raw, float) and raw != int(raw):
            raise ConfigError(f"key {key!r} needs an integer, got {raw!r}", key=key)
        return int(raw)
    if key in _FLOAT_KEYS:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"key {key!r} needs a number, got {raw!r}", key=key)
        return float(raw)
    if not isinstance(raw, str) or not raw:
        raise ConfigError(f"key {key!r} needs a non-empty string, got {raw!r}", key=key)
    return raw


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse and validate a config file's text into a key-value dict."""
    out: dict[str, Any] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {line_no}: expected key = value, got {line!r}")
        key, _, value_text = body.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}", key=key)
        if not value_text:
            raise ConfigError(f"line {line_no}: key {key!r} has no value", key=key)
        try:
            raw: Any = json.loads(value_text)
        except json.JSONDecodeError:
            raw = value_text
        out[key] = _coerce(key, raw)
    return out


def validate_config(cfg: EngineConfig) -> EngineConfig:
    """Cross-field validation; returns the config unchanged when valid."""
    if not (0.0 < cfg.alpha < 1.0):
        raise ConfigError(
            f"alpha must lie in the open interval (0, 1), got {cfg.alpha!r}", key="alpha"
        )
    if cfg.warmup is not None and cfg.warmup < 3:
        raise ConfigError("warmup must be at least 3", key="warmup")
    # For synthetic data p is known here; for CSV input the engine enforces
    # the same bound against the ingested dimension instead.
    if cfg.warmup is not None and cfg.input is None and cfg.warmup < cfg.p + 2:
        raise ConfigError(
            f"warmup must be at least p + 2 = {cfg.p + 2}", key="warmup"
        )
    if cfg.kernel not in _KERNELS:
        raise ConfigError(
            f"kernel must be one of {', '.join(_KERNELS)}, got {cfg.kernel!r}", key="kernel"
        )
    if cfg.kernel == "tabulated" and not cfg.kernel_table:
        raise ConfigError("kernel = tabulated requires kernel_table", key="kernel_table")
    if cfg.grid_count < 1:
        raise ConfigError("grid_count must be at least 1", key="grid_count")
    if cfg.grid_count > 1 and not (cfg.grid_min < cfg.grid_max):
        raise ConfigError("grid_min must be below grid_max", key="grid_min")
    if cfg.model not in _MODELS:
        raise ConfigError(
            f"model must be one of {', '.join(_MODELS)}, got {cfg.model!r}", key="model"
        )
    if cfg.n < 1:
        raise ConfigError("n must be positive", key="n")
    if cfg.p < 4:
        raise ConfigError("p must be at least 4 for the reference model", key="p")
    if cfg.noise_std < 0.0:
        raise ConfigError("noise_std must be non-negative", key="noise_std")
    return cfg


def load_config(path: str | Path | None, overrides: dict[str, Any]) -> EngineConfig:
    """Defaults, then file values, then non-None overrides, then validation."""
    values: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!s}: {exc}") from exc
        values.update(parse_config_text(text))
    known = {f.name for f in fields(EngineConfig)}
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", key=key)
        values[key] = _coerce(key, value)
    return validate_config(replace(EngineConfig(), **values))
