"""
Run configuration: command-line flags over a key=value config file over
built-in defaults.
"""
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Optional, Tuple

from cuspres.errors import ConfigError
from cuspres.problems import Kind, ModeProblem, get_problem
from cuspres.resonance import K_MIN, SolverConfig

THREADS_ENV = "CUSPRES_THREADS"
FORMATS = ("csv", "json")

# config-file key -> RunConfig field
FILE_KEYS = {
    "a": "a",
    "b": "b",
    "m": "m",
    "k": "k",
    "rel_tol": "rel_tol",
    "format": "format",
    "plot": "plot_path",
    "threads": "threads",
    "output": "output",
}

DEFAULTS = {
    Kind.CUSP_CONE: {"a": -1.0, "b": 1.0},
    Kind.FUNNEL_CONE: {"a": 1.0, "b": -1.0},
}


@dataclass
class RunConfig:
    kind: Kind = Kind.CUSP_CONE
    a: float = -1.0
    b: float = 1.0
    m: float = 1.0
    k_min: int = 10
    k_max: int = 1000
    k_step: int = 10
    rel_tol: float = 1e-10
    format: str = "csv"
    plot_path: Optional[str] = None
    threads: int = 0
    output: Optional[str] = None

    def problem(self) -> ModeProblem:
        return get_problem(self.kind, self.a, self.b, self.m)

    def solver(self) -> SolverConfig:
        return SolverConfig(rel_tol=self.rel_tol)

    def validate(self):
        self.problem()
        self.solver()
        if self.k_min < K_MIN:
            raise ConfigError(f"k_min must be at least {K_MIN}, got {self.k_min}")
        if self.k_max < self.k_min:
            raise ConfigError(f"empty index range {self.k_min}:{self.k_max}")
        if self.k_step < 1:
            raise ConfigError(f"step must be at least 1, got {self.k_step}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format '{self.format}', expected one of {', '.join(FORMATS)}")
        if self.threads < 0:
            raise ConfigError(f"threads must be >= 0, got {self.threads}")

    def echo(self) -> Dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = value.value if isinstance(value, Kind) else value
        return out


def parse_range(text: str) -> Tuple[int, int, int]:
    """'k_min:k_max[:step]' -> (k_min, k_max, step)."""
    parts = text.strip().split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"bad range '{text}', expected k_min:k_max[:step]")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad range '{text}', bounds must be integers") from None
    if len(values) == 2:
        values.append(1)
    return values[0], values[1], values[2]


def read_config_file(path: str) -> Dict[str, str]:
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"config file '{path}' not found")
    values = {}
    for number, line in enumerate(file.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in FILE_KEYS:
            raise ConfigError(f"{path}:{number}: unknown key '{key}'")
        values[FILE_KEYS[key]] = value
    return values


def _threads_default() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}='{raw}' is not an integer") from None


def resolve_threads(flag: Optional[int]) -> int:
    """--threads when given, else $CUSPRES_THREADS, else 0 (one per CPU)."""
    return _threads_default() if flag is None else flag


def _convert(name: str, value):
    try:
        if name in ("a", "b", "m", "rel_tol"):
            return float(value)
        if name == "threads":
            return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value '{value}' for {name}") from None
    return value


def build_run_config(kind: Kind, flags: Dict, config_path: Optional[str] = None) -> RunConfig:
    """
    Merge the three layers. flags holds the parsed command-line values, with
    None for anything not given.
    """
    layers = dict(DEFAULTS[kind])
    layers["threads"] = _threads_default()
    if config_path:
        layers.update(read_config_file(config_path))
    layers.update({key: value for key, value in flags.items() if value is not None})

    cfg = RunConfig(kind=kind)
    k_range = layers.pop("k", None)
    if k_range is not None:
        cfg.k_min, cfg.k_max, cfg.k_step = parse_range(k_range)
    for name, value in layers.items():
        setattr(cfg, name, _convert(name, value))
    cfg.validate()
    return cfg
