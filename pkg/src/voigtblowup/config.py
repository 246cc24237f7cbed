"""Run configuration: ``key = value`` text files.

Example::

    # inviscid BBM sweep
    model = bbm
    n = 8192
    alpha = 128/8192, 138/8192, 160/8192
    nu = 0
    t_end = 1.25
    sample_interval = 1/100
    horizons = 0.65:0.01:1.25

Numbers are parsed as exact rationals (``12/1024``, ``0.01``, ``1e-5``)
before conversion to float. Lists are comma-separated. ``a:step:b`` is an
inclusive arithmetic range and ``logspace(a, b, k)`` gives ``k`` log-spaced
values.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .blowup import BBM_HORIZONS, EV3D_HORIZONS
from .models import Model, VoigtParams
from .spectral import GridSpec
from .timestep import StepperConfig


class ConfigError(ValueError):
    pass


DEFAULT_BBM_ALPHAS = tuple(a / 8192 for a in (128, 138, 160, 192, 224, 256))
DEFAULT_EV3D_ALPHAS = tuple(a / 1024 for a in (12, 16, 20, 24, 28, 32, 36))


@dataclass(frozen=True)
class RunConfig:
    model: Model
    n: int
    alphas: tuple[float, ...]
    nus: tuple[float, ...] = (0.0,)
    cfl: float = 0.5
    t_end: float | None = None
    sample_interval: float | None = None
    horizons: tuple[float, ...] | None = None
    output: Path = Path("out")
    checkpoint_every: int = 0
    spectrum_every: int = 0
    fit_count: int = 2

    def __post_init__(self):
        model = Model(self.model)
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "output", Path(self.output))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "nus", tuple(float(v) for v in self.nus))
        if self.t_end is None:
            object.__setattr__(self, "t_end", 5.0 if model is Model.EV3D else 1.25)
        if self.sample_interval is None:
            object.__setattr__(self, "sample_interval", 0.1 if model is Model.EV3D else 0.01)
        if self.horizons is None:
            default = EV3D_HORIZONS if model is Model.EV3D else BBM_HORIZONS
            object.__setattr__(self, "horizons", tuple(float(v) for v in default if v <= self.t_end + 1e-12))
        else:
            object.__setattr__(self, "horizons", tuple(float(v) for v in self.horizons))
        if not self.alphas:
            raise ConfigError("alpha list is empty")
        if len(set(self.alphas)) != len(self.alphas):
            raise ConfigError("alpha list has duplicates")
        if not self.nus:
            raise ConfigError("nu list is empty")
        if self.checkpoint_every < 0 or self.spectrum_every < 0:
            raise ConfigError("cadences must be non-negative")
        try:
            self.grid
            for a in self.alphas:
                for nu in self.nus:
                    VoigtParams(alpha=a, nu=nu, model=model)
            self.stepper
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for a in self.alphas:
            if a <= 0:
                raise ConfigError("alpha values must be positive")
        if any(h < 0 or h > self.t_end + 1e-12 for h in self.horizons):
            raise ConfigError("horizons must lie in [0, t_end]")
        ratio = [h / self.sample_interval for h in self.horizons]
        if any(abs(r - round(r)) > 1e-9 for r in ratio):
            raise ConfigError("horizons must be multiples of sample_interval")

    @property
    def grid(self) -> GridSpec:
        if self.model is Model.EV3D:
            return GridSpec.cube(self.n, 1.0)
        return GridSpec.line(self.n, 2 * math.pi)

    @property
    def stepper(self) -> StepperConfig:
        return StepperConfig(t_end=self.t_end, sample_interval=self.sample_interval, cfl=self.cfl)

    def params(self, alpha: float, nu: float) -> VoigtParams:
        return VoigtParams(alpha=alpha, nu=nu, model=self.model)


# config key -> RunConfig field
_KEYS = {
    "model": "model",
    "n": "n",
    "alpha": "alphas",
    "nu": "nus",
    "cfl": "cfl",
    "t_end": "t_end",
    "sample_interval": "sample_interval",
    "horizons": "horizons",
    "output": "output",
    "checkpoint_every": "checkpoint_every",
    "spectrum_every": "spectrum_every",
    "fit_count": "fit_count",
}
REQUIRED = ("model", "n", "alpha")

_LOGSPACE = re.compile(r"^logspace\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)$")


def parse_number(text: str, key: str = "value") -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: malformed number {text.strip()!r}") from exc


def parse_list(text: str, key: str = "value") -> tuple[float, ...]:
    text = text.strip()
    m = _LOGSPACE.match(text)
    if m:
        lo, hi = float(parse_number(m[1], key)), float(parse_number(m[2], key))
        if lo <= 0 or hi <= 0:
            raise ConfigError(f"{key}: logspace bounds must be positive")
        return tuple(float(v) for v in np.geomspace(lo, hi, int(m[3])))
    out: list[float] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise ConfigError(f"{key}: empty list entry")
        if ":" in item:
            parts = item.split(":")
            if len(parts) != 3:
                raise ConfigError(f"{key}: ranges are written start:step:stop")
            start, step, stop = (parse_number(p, key) for p in parts)
            if step <= 0:
                raise ConfigError(f"{key}: range step must be positive")
            count = int((stop - start) / step)
            out.extend(float(start + i * step) for i in range(count + 1))
        else:
            out.append(float(parse_number(item, key)))
    return tuple(out)


def _convert(key: str, value: str):
    if key == "model":
        try:
            return Model(value.strip().lower())
        except ValueError as exc:
            raise ConfigError(f"model: unknown model {value.strip()!r} (expected ev3d or bbm)") from exc
    if key == "output":
        return Path(value.strip())
    if key in ("n", "checkpoint_every", "spectrum_every", "fit_count"):
        num = parse_number(value, key)
        if num.denominator != 1:
            raise ConfigError(f"{key}: expected an integer, got {value.strip()!r}")
        return int(num)
    if key in ("alpha", "nu", "horizons"):
        return parse_list(value, key)
    return float(parse_number(value, key))


def parse_values(text: str) -> dict:
    """Parse ``key = value`` lines into RunConfig field values without validation."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if _KEYS[key] in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[_KEYS[key]] = _convert(key, value)
    return values


def build_config(values: dict) -> RunConfig:
    if not values:
        raise ConfigError("configuration is empty")
    for key in REQUIRED:
        if _KEYS[key] not in values:
            raise ConfigError(f"missing required key {key!r}")
    return RunConfig(**values)


def parse_config(text: str) -> RunConfig:
    return build_config(parse_values(text))


def load_config(path: Path, overrides: dict | None = None) -> RunConfig:
    values = parse_values(Path(path).read_text(encoding="utf-8"))
    values.update(overrides or {})
    return build_config(values)
