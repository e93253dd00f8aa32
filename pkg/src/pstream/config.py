"""Experiment configuration and its JSON form.

The JSON document mirrors the dataclass fields in snake_case::

    {
      "source":    {"mean_photon_override": 0.012, ...},
      "optics":    {"intrinsic_visibility": 0.882, ..., "pzt": {...}},
      "detectors": [{...}, {...}],        # or one object applied to both
      "ccm":       {...},
      "scan":      {"n_points": 316, "seconds_per_point": 1.0,
                    "seed": 123456789, "asymmetric_walkoff": false}
    }

Unknown keys are rejected with the offending dotted path.  The PSTREAM_SEED
environment variable overrides the config seed; an explicit CLI flag wins
over both.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, is_dataclass, replace
from pathlib import Path
from typing import Any

from .coincidence import CcmConfig
from .detection import DetectorConfig
from .errors import ConfigError
from .interferometer import PztConfig
from .source import SourceConfig

SEED_ENV_VAR = "PSTREAM_SEED"


@dataclass(frozen=True)
class OpticsConfig:
    """Static optics parameters; the per-point phase and position are derived."""

    intrinsic_visibility: float = 0.882
    effective_coherence_length: float = 2e-6
    laser_coherence_length: float = 0.30
    pzt: PztConfig = field(default_factory=PztConfig)

    def __post_init__(self):
        if not 0.0 <= self.intrinsic_visibility <= 1.0:
            raise ConfigError("intrinsic_visibility must lie in [0, 1]")
        if self.effective_coherence_length <= 0 or self.laser_coherence_length <= 0:
            raise ConfigError("coherence lengths must be > 0")


@dataclass(frozen=True)
class ScanConfig:
    """Scan schedule: dwell per point, seeding, and the walk-off toggle.

    ``jitter_volts``, when nonzero, adds a slow seeded sinusoidal wobble to
    the voltage ramp as a loose stand-in for manual-scan nonuniformity.
    """

    n_points: int = 316
    seconds_per_point: float = 1.0
    seed: int = 123456789
    asymmetric_walkoff: bool = False
    jitter_volts: float = 0.0

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigError("n_points must be >= 2")
        if self.seconds_per_point <= 0:
            raise ConfigError("seconds_per_point must be > 0")
        if self.jitter_volts < 0:
            raise ConfigError("jitter_volts must be >= 0")


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceConfig = field(default_factory=lambda: SourceConfig(mean_photon_override=0.012))
    optics: OpticsConfig = field(default_factory=OpticsConfig)
    detectors: tuple[DetectorConfig, DetectorConfig] = field(
        default_factory=lambda: (DetectorConfig(), DetectorConfig())
    )
    ccm: CcmConfig = field(default_factory=CcmConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)

    def __post_init__(self):
        if len(self.detectors) != 2:
            raise ConfigError("exactly two detector configurations are required")
        if self.ccm.step > self.scan.seconds_per_point:
            raise ConfigError("ccm step must not exceed seconds_per_point")

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, scan=replace(self.scan, seed=seed))


def _build(cls, data: Any, path: str):
    """Construct dataclass ``cls`` from a JSON mapping, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError(f"expected an object at {path or '<root>'}, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        child = f"{path}.{key}" if path else key
        if key not in known:
            raise ConfigError(f"unknown key at {child}")
        if isinstance(value, dict) and _field_dataclass(cls, key) is not None:
            kwargs[key] = _build(_field_dataclass(cls, key), value, child)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except TypeError as exc:
        raise ConfigError(f"bad value under {path or '<root>'}: {exc}") from exc


_NESTED = {
    (OpticsConfig, "pzt"): PztConfig,
    (ExperimentConfig, "source"): SourceConfig,
    (ExperimentConfig, "optics"): OpticsConfig,
    (ExperimentConfig, "ccm"): CcmConfig,
    (ExperimentConfig, "scan"): ScanConfig,
}


def _field_dataclass(cls, name: str):
    return _NESTED.get((cls, name))


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a parsed JSON document."""
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be an object")
    payload = dict(data)
    detectors_raw = payload.pop("detectors", None)
    cfg = _build(ExperimentConfig, payload, "")
    if detectors_raw is not None:
        if isinstance(detectors_raw, dict):
            det = _build(DetectorConfig, detectors_raw, "detectors")
            detectors = (det, det)
        elif isinstance(detectors_raw, list) and len(detectors_raw) == 2:
            detectors = tuple(
                _build(DetectorConfig, d, f"detectors[{i}]") for i, d in enumerate(detectors_raw)
            )
        else:
            raise ConfigError("detectors must be one object or a list of exactly two")
        cfg = replace(cfg, detectors=detectors)
    return cfg


def load_config(path: str | Path, seed_override: int | None = None) -> ExperimentConfig:
    """Load a JSON config file, applying seed precedence: flag > env > file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    cfg = config_from_dict(data)
    env_seed = os.environ.get(SEED_ENV_VAR)
    if seed_override is not None:
        cfg = cfg.with_seed(seed_override)
    elif env_seed is not None:
        try:
            cfg = cfg.with_seed(int(env_seed))
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}") from exc
    return cfg


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Plain-dict echo of a config, suitable for JSON serialization."""

    def as_dict(obj):
        if is_dataclass(obj):
            out = {}
            for f in fields(obj):
                if f.name == "bs_phase":
                    continue
                out[f.name] = as_dict(getattr(obj, f.name))
            return out
        if isinstance(obj, tuple):
            return [as_dict(v) for v in obj]
        return obj

    return as_dict(cfg)
