"""
Configuration settings for discrimlab
Tolerances, optimizer budgets, sampling defaults and the CLI run record
"""
from pathlib import Path
from dataclasses import dataclass, field, fields, asdict
from typing import Any, Dict, Optional

from .errors import ConfigError


COMMANDS = ("discrim", "ontic-bound", "ontic-search", "bell-verify", "bell-sweep", "sample")
FORMATS = ("csv", "json")
SWEEPS = ("theta", "threshold", "random")


@dataclass
class ToleranceConfig:
    """Numerical tolerances shared by every module"""
    state: float = 1e-12  # Bloch norm, PSD, prior normalization
    inconsistency: float = 1e-10  # R~^2 below -this means broken statistics
    pure: float = 1e-9  # ||s|| = 1 test for pure conditional states
    certification: float = 1e-9  # slack on exact bound checks
    optimizer: float = 1e-6  # slack on optimizer-based bound checks


@dataclass
class SearchConfig:
    """Grid / golden-section / multistart settings"""
    resolution: int = 201
    min_resolution: int = 10
    refine_tol: float = 1e-10
    workers: int = 4
    starts: int = 32
    line_tol: float = 1e-8
    scan_points: int = 16
    max_sweeps: int = 200
    budget: int = 20000


@dataclass
class SamplingConfig:
    """Monte Carlo defaults"""
    samples: int = 100_000
    ci_sigmas: float = 3.0
    runs: int = 100
    inside_fraction: float = 0.99


@dataclass
class RunConfig:
    """
    One CLI run. Values come from defaults, then a key = value config file,
    then command-line flags (flags win).
    """
    command: str = "discrim"
    seed: int = 0
    samples: int = 100_000
    output_path: Optional[str] = None
    format: str = "csv"
    eta1: float = 0.5
    gamma2: Optional[float] = None
    q: float = 0.5
    c: Optional[float] = None
    theta: Optional[float] = None
    resolution: int = 201
    sharp: bool = True
    points: int = 11
    runs: int = 100
    sweep: str = "theta"
    n_states: int = 2
    budget: int = 20000
    workers: int = 4
    timings: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration key(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        """Read a flat key = value file"""
        return cls.from_dict(read_config_file(path))

    def merged(self, overrides: Dict[str, Any]) -> "RunConfig":
        """Return a copy with every non-None override applied"""
        data = self.to_dict()
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in data:
                raise ConfigError(f"Unknown configuration key: {key}")
            data[key] = value
        return RunConfig(**data)

    def validate(self) -> "RunConfig":
        """Check ranges; raises ConfigError naming the offending key"""
        if self.command not in COMMANDS:
            raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format: expected csv or json, got {self.format!r}")
        if self.sweep not in SWEEPS:
            raise ConfigError(f"sweep: expected one of {', '.join(SWEEPS)}, got {self.sweep!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed: must be a 64-bit unsigned integer")
        if self.samples < 1:
            raise ConfigError("samples: must be at least 1")
        if self.runs < 1:
            raise ConfigError("runs: must be at least 1")
        if self.points < 1:
            raise ConfigError("points: must be at least 1")
        if self.resolution < search_config.min_resolution:
            raise ConfigError(f"resolution: must be at least {search_config.min_resolution}")
        if self.workers < 1:
            raise ConfigError("workers: must be at least 1")
        if self.budget < 1:
            raise ConfigError("budget: must be at least 1")
        if self.n_states < 2:
            raise ConfigError("n_states: must be at least 2")
        if not 0.0 <= self.eta1 <= 1.0:
            raise ConfigError("eta1: must lie in [0, 1]")
        if self.gamma2 is not None and not 0.0 <= self.gamma2 <= 1.0:
            raise ConfigError("gamma2: must lie in [0, 1]")
        if not 0.0 <= self.q < 1.0:
            raise ConfigError("q: must lie in [0, 1)")
        if self.c is not None and not 0.0 <= self.c <= 1.0:
            raise ConfigError("c: must lie in [0, 1]")
        return self


_BOOLEANS = {"true": True, "yes": True, "1": True, "on": True,
             "false": False, "no": False, "0": False, "off": False}


def _convert(name: str, raw: str) -> Any:
    """Convert a config-file string using the RunConfig field default as type hint"""
    default = RunConfig.__dataclass_fields__[name].default
    if raw.lower() in ("none", "null", ""):
        return None
    try:
        if isinstance(default, bool):
            return _BOOLEANS[raw.lower()]
        if isinstance(default, int):
            return int(raw, 0)
        if isinstance(default, float) or name in ("gamma2", "c", "theta"):
            return float(raw)
    except (KeyError, ValueError):
        raise ConfigError(f"{name}: cannot parse value {raw!r}")
    return raw


def read_config_file(path: str) -> Dict[str, Any]:
    """Parse `key = value` lines; `#` starts a comment"""
    config_file = Path(path)
    try:
        text = config_file.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {config_file}: {e}")

    data: Dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{config_file}:{lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in RunConfig.__dataclass_fields__:
            raise ConfigError(f"{config_file}:{lineno}: unknown key {key!r}")
        data[key] = _convert(key, raw)
    return data


# Global config instances
tolerance_config = ToleranceConfig()
search_config = SearchConfig()
sampling_config = SamplingConfig()
