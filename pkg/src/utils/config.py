"""
Configuration management for the pick-freeze estimator.
"""

import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from .exceptions import ConfigError


DEFAULT_SETTINGS = Path(__file__).resolve().parents[2] / "config" / "settings.yaml"


class Config:
    """Configuration manager backed by ``config/settings.yaml``."""

    def __init__(self, config_path: Optional[str] = None):
        if config_path is None:
            config_path = os.environ.get("RPF_SOBOL_SETTINGS", str(DEFAULT_SETTINGS))

        self.config_path = Path(config_path)
        self._config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        try:
            with open(self.config_path, 'r', encoding='utf-8') as file:
                return yaml.safe_load(file) or {}
        except FileNotFoundError:
            raise ConfigError(f"settings file not found: {self.config_path}", module="config")
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {self.config_path}: {e}", module="config")

    def get(self, key: str, default: Any = None) -> Any:
        keys = key.split('.')
        value = self._config

        try:
            for k in keys:
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key: str, value: Any) -> None:
        keys = key.split('.')
        node = self._config
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = value

    def get_design_config(self) -> Dict[str, Any]:
        return self._config.get('design', {})

    def get_pickfreeze_config(self) -> Dict[str, Any]:
        return self._config.get('pickfreeze', {})

    def get_lasso_config(self) -> Dict[str, Any]:
        return self._config.get('lasso', {})

    def get_recovery_config(self) -> Dict[str, Any]:
        return self._config.get('recovery', {})

    def get_paths_config(self) -> Dict[str, Any]:
        return self._config.get('paths', {})

    def get_experiment_config(self, experiment_id: str) -> Dict[str, Any]:
        experiments = self._config.get('experiments', {})
        if experiment_id not in experiments:
            raise ConfigError(f"unknown experiment '{experiment_id}'", module="cli")
        return dict(experiments[experiment_id])


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_grid(value: str) -> Optional[Tuple[float, ...]]:
    if value.strip().lower() in ("", "auto"):
        return None
    return tuple(float(v) for v in value.split(',') if v.strip())


@dataclass
class RunConfig:
    """Flat ``key=value`` run description consumed by the CLI pipeline."""

    model: str = ""
    p: int = 0
    scheme: str = "rademacher"
    mu: float = 0.5
    d: int = 0
    n: int = 30
    N: int = 2000
    seed: int = 1
    r: Optional[float] = None
    r_grid: Optional[Tuple[float, ...]] = None
    grid_points: int = 60
    grid_ratio: float = 1.0e-3
    threshold: float = 0.05
    s_min: Optional[float] = None
    refit: str = "same"
    calculator: str = ""
    s: int = 0
    A: Optional[float] = None
    delta: Optional[float] = None
    delta_prime: Optional[float] = None
    sigma: Optional[float] = None
    c: Optional[float] = None
    C1: Optional[float] = None
    C2: Optional[float] = None
    C3: Optional[float] = None
    e: Optional[float] = None
    alpha_max: Optional[float] = None
    rho: Optional[float] = None
    kappa: Optional[float] = None
    theta1: Optional[float] = None
    theta2: Optional[float] = None
    r0: Optional[float] = None
    target_width: Optional[float] = None
    confidence: Optional[float] = None
    snr_mode: bool = False
    output: str = "data/runs/latest"
    dump_sample: bool = False
    full_path: bool = False
    workers: int = 1
    source: Optional[str] = field(default=None, repr=False)

    _INT_KEYS = ("p", "d", "n", "N", "seed", "grid_points", "s", "workers")
    _FLOAT_KEYS = ("mu", "grid_ratio", "threshold")
    _OPTIONAL_FLOAT_KEYS = ("r", "s_min", "A", "delta", "delta_prime", "sigma",
                            "c", "C1", "C2", "C3", "e", "alpha_max", "rho", "kappa",
                            "theta1", "theta2", "r0", "target_width", "confidence")
    _BOOL_KEYS = ("snr_mode", "dump_sample", "full_path")

    @classmethod
    def keys(cls) -> List[str]:
        return [f.name for f in fields(cls) if f.name != "source"]

    @classmethod
    def from_pairs(cls, pairs: Dict[str, str], source: Optional[str] = None) -> 'RunConfig':
        """Build a config from raw string pairs, converting each known key."""
        config = cls(source=source)
        for key, raw in pairs.items():
            config.update(key, raw)
        return config

    @classmethod
    def load(cls, path: str, overrides: Optional[Dict[str, str]] = None) -> 'RunConfig':
        """Load a flat ``key=value`` file and apply ``--key value`` overrides."""
        config_path = Path(path)
        if not config_path.exists():
            raise ConfigError(f"run config not found: {path}", module="cli")

        pairs: Dict[str, str] = {}
        with open(config_path, 'r', encoding='utf-8') as file:
            for lineno, line in enumerate(file, 1):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                if '=' not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value", module="cli")
                key, value = line.split('=', 1)
                pairs[key.strip()] = value.strip()

        pairs.update(overrides or {})
        return cls.from_pairs(pairs, source=str(config_path))

    def update(self, key: str, raw: str) -> None:
        key = key.replace('-', '_')
        if key not in self.keys():
            raise ConfigError(f"unknown config key '{key}'", module="cli")
        try:
            if key in self._INT_KEYS:
                value: Any = int(raw)
            elif key in self._FLOAT_KEYS:
                value = float(raw)
            elif key in self._OPTIONAL_FLOAT_KEYS:
                value = None if raw.strip().lower() in ("", "none") else float(raw)
            elif key in self._BOOL_KEYS:
                value = _parse_bool(raw)
            elif key == "r_grid":
                value = _parse_grid(raw)
            else:
                value = raw.strip()
        except ValueError as e:
            raise ConfigError(f"invalid value for '{key}': {e}", module="cli")
        setattr(self, key, value)

    def to_pairs(self) -> Dict[str, str]:
        """Canonical string form, used for the manifest hash."""
        pairs = {}
        for key in self.keys():
            value = getattr(self, key)
            if isinstance(value, tuple):
                value = ",".join(repr(v) for v in value)
            pairs[key] = "" if value is None else str(value)
        return pairs
