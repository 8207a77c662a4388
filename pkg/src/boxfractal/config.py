"""Experiment configuration: YAML files mapped onto dataclasses.

A config names one experiment and may override its physical constants,
numerical knobs and sweep axes.  Anything not given falls back to the
experiment's preset.  Unknown keys are errors.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """A config that cannot be run; the message names the violated condition."""


@dataclass(frozen=True)
class Physical:
    mass: float = 1.0
    hbar: float = 1.0
    box_length: float = 1.0
    c: float = 100.0


@dataclass(frozen=True)
class Numerical:
    modes: int | None = None
    grid: int | None = None
    time: float | None = None
    scale_count: int | None = None
    window: tuple[float, float] | None = None
    scale_span: tuple[float, float] | None = None
    quantity: str | None = None
    samples: int | None = None
    position: float | None = None
    initial: str | None = None
    walkers: int | None = None
    duration_rates: float | None = None
    records: int | None = None


@dataclass(frozen=True)
class Sweep:
    dt: tuple[float, ...] | None = None
    N: tuple[int, ...] | None = None
    c: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    schema_version: int = SCHEMA_VERSION
    physical: Physical = field(default_factory=Physical)
    numerical: Numerical = field(default_factory=Numerical)
    sweep: Sweep = field(default_factory=Sweep)
    seed: int = 0
    output: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """Stable hash of everything that influences results (not the output path)."""
        d = self.to_dict()
        d.pop("output", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"), default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _build(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    kw = {}
    for k, v in data.items():
        if isinstance(v, list):
            v = tuple(v)
        kw[k] = v
    return cls(**kw)


def from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    top = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - top)
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {', '.join(unknown)}")
    if "experiment" not in data:
        raise ConfigError("missing required key 'experiment'")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version {version} not supported (expected {SCHEMA_VERSION})")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    return ExperimentConfig(
        experiment=str(data["experiment"]),
        schema_version=version,
        physical=_build(Physical, data.get("physical"), "physical"),
        numerical=_build(Numerical, data.get("numerical"), "numerical"),
        sweep=_build(Sweep, data.get("sweep"), "sweep"),
        seed=seed,
        output=data.get("output"),
    )


def load(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    return from_dict(data or {})


def dump(cfg: ExperimentConfig) -> str:
    d = cfg.to_dict()

    def clean(x):
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items() if v is not None}
        if isinstance(x, tuple):
            return [clean(v) for v in x]
        return x

    return yaml.safe_dump(clean(d), sort_keys=False)


def with_seed(cfg: ExperimentConfig, seed: int | None) -> ExperimentConfig:
    return cfg if seed is None else replace(cfg, seed=seed)


def merge_defaults(cfg: ExperimentConfig, numerical: dict, sweep: dict) -> ExperimentConfig:
    """Fill unset numerical knobs and sweep axes from a preset."""
    num = {f.name: getattr(cfg.numerical, f.name) for f in fields(Numerical)}
    for k, v in numerical.items():
        if num[k] is None:
            num[k] = v
    swp = {f.name: getattr(cfg.sweep, f.name) for f in fields(Sweep)}
    for k, v in sweep.items():
        if swp[k] is None:
            swp[k] = tuple(v)
    return replace(cfg, numerical=Numerical(**num), sweep=Sweep(**swp))


def require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def is_pos(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) and x > 0


def is_int(x, lo=None) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and (lo is None or x >= lo)
