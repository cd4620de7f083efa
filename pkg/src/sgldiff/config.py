"""Experiment configuration: dataclasses, TOML loading, flag overrides.

A run is configured by built-in per-experiment defaults, optionally
overlaid by a TOML file (top-level keys plus a ``[family]`` table), and
finally by command-line flags.
"""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .potentials import PotentialFamily, make_quadratic_family, make_trig_family

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXPERIMENTS = (
    "figure1",
    "figure2",
    "sweep_eta",
    "strong_error",
    "ergodicity",
    "coupling",
    "verify",
    "constants",
)

_PI = 3.141592653589793


@dataclass
class FamilySpec:
    """Constructor arguments for a built-in gradient family."""

    name: str = "quadratic"
    a: tuple[float, ...] = (5.0, 15.0)
    b: tuple[float, ...] = (5.0, -5.0 / 3.0)
    shifts: tuple[float, ...] = (0.0, _PI)
    dim: int = 1
    radius: float = 0.1
    declared_L: float | None = None  # override, e.g. to exercise checker failures

    def build(self) -> PotentialFamily:
        if self.name == "quadratic":
            fam = make_quadratic_family(self.a, self.b, self.dim, self.radius)
        elif self.name == "trig":
            fam = make_trig_family(self.shifts, self.dim)
        else:
            raise ConfigError(f"unknown family name: {self.name!r}")
        if self.declared_L is not None:
            fam = dataclasses.replace(fam, declared_L=float(self.declared_L))
        return fam

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["a"] = list(self.a)
        d["b"] = list(self.b)
        d["shifts"] = list(self.shifts)
        return d


@dataclass
class ExperimentConfig:
    """One experiment run.  Fields unused by a given experiment are ignored."""

    experiment: str = "figure1"
    seed: int = 1234
    out_dir: Path = Path("out")
    threads: int = 1
    family: FamilySpec = field(default_factory=FamilySpec)
    etas: tuple[float, ...] = (10.0, 1.0, 0.1, 0.01, 0.001)
    horizon: float = 1000.0
    dt: float = 1e-3
    burn_in: float = 10.0
    n_replicas: int = 8
    # trajectory/histogram outputs
    path_window: float = 10.0
    hist_bins: int = 80
    # strong error
    t_obs: float = 0.5
    # ergodicity / coupling
    eta: float = 0.01
    t_grid: tuple[float, ...] = (0.0, 0.25, 0.5, 1.0, 2.0)
    ref_horizon: float = 5000.0
    ref_max_points: int = 100_000
    x0: float = 4.0
    y0: float = -3.0
    eps_meet: float = 1e-6
    bridge_detection: bool = True
    n_boot: int = 200
    # verify battery
    n_pairs: int = 10_000
    verify_replicas: int = 300
    checks: tuple[str, ...] | None = None  # None = full battery
    # constants tables
    bound_ts: tuple[float, ...] = (0.01, 0.1, 0.5, 1.0, 2.0)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not self.etas or any(e <= 0 for e in self.etas):
            raise ConfigError("etas must be a non-empty list of positive values")
        if self.eta <= 0:
            raise ConfigError("eta must be positive")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")
        if self.burn_in < 0 or self.burn_in >= self.horizon:
            raise ConfigError("burn_in must satisfy 0 <= burn_in < horizon")
        if self.n_replicas < 1:
            raise ConfigError("n_replicas must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.eps_meet <= 0:
            raise ConfigError("eps_meet must be positive")
        out = Path(self.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise ConfigError(f"output directory not writable: {out}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["out_dir"] = str(self.out_dir)
        d["family"] = self.family.to_dict()
        for key in ("etas", "t_grid", "bound_ts"):
            d[key] = list(d[key])
        d["checks"] = None if self.checks is None else list(self.checks)
        return d


def default_config(experiment: str, seed: int = 1234) -> ExperimentConfig:
    """Built-in defaults per experiment (families, rates, replica counts)."""
    ou = FamilySpec(name="quadratic", a=(10.0,), b=(0.0,), radius=0.1)
    fig2 = FamilySpec(name="quadratic", a=(5.0, 15.0), b=(5.0, -5.0 / 3.0), radius=0.1)
    trig = FamilySpec(name="trig", shifts=(0.0, _PI))
    cfg = ExperimentConfig(experiment=experiment, seed=seed)
    if experiment == "figure1":
        cfg.family = ou
    elif experiment in ("figure2", "sweep_eta"):
        cfg.family = fig2
    elif experiment == "strong_error":
        cfg.family = fig2
        cfg.etas = (0.1, 0.01, 0.001, 0.0001)
        cfg.n_replicas = 2000
        cfg.x0 = 0.0
    elif experiment == "ergodicity":
        cfg.family = fig2
        cfg.eta = 0.01
        cfg.n_replicas = 4000
        cfg.x0 = 4.0
    elif experiment == "coupling":
        cfg.family = trig
        cfg.eta = 0.1
        cfg.x0 = 3.0
        cfg.y0 = -3.0
        cfg.n_replicas = 1000
        cfg.t_grid = (0.0, 0.5, 1.0, 1.5, 2.0)
    elif experiment == "verify":
        cfg.family = fig2
    elif experiment == "constants":
        cfg.family = fig2
    return cfg


def _coerce(value, template):
    if isinstance(template, bool):
        return bool(value)
    if isinstance(template, int) and not isinstance(template, bool):
        return int(value)
    if isinstance(template, float):
        return float(value)
    if isinstance(template, Path):
        return Path(value)
    if isinstance(template, tuple):
        return tuple(value)
    return value


def apply_mapping(cfg: ExperimentConfig, data: dict) -> ExperimentConfig:
    """Overlay a parsed TOML mapping onto a config."""
    for key, value in data.items():
        if key == "family":
            if not isinstance(value, dict):
                raise ConfigError("[family] must be a table")
            fam = cfg.family
            for fkey, fval in value.items():
                if not hasattr(fam, fkey):
                    raise ConfigError(f"unknown family option {fkey!r}")
                setattr(fam, fkey, _coerce(fval, getattr(fam, fkey)))
            for tkey in ("a", "b", "shifts"):
                setattr(fam, tkey, tuple(float(v) for v in getattr(fam, tkey)))
        elif hasattr(cfg, key):
            template = getattr(cfg, key)
            if key == "checks":
                setattr(cfg, key, tuple(str(v) for v in value))
            else:
                setattr(cfg, key, _coerce(value, template))
        else:
            raise ConfigError(f"unknown config option {key!r}")
    return cfg


def load_config(
    experiment: str,
    config_path: str | Path | None = None,
    seed: int | None = None,
    out_dir: str | Path | None = None,
    threads: int | None = None,
    etas: tuple[float, ...] | None = None,
    checks: tuple[str, ...] | None = None,
) -> ExperimentConfig:
    """Defaults -> TOML file -> flag overrides, then validation."""
    cfg = default_config(experiment)
    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config parse error in {path}: {exc}") from exc
        data.pop("experiment", None)  # the subcommand decides
        cfg = apply_mapping(cfg, data)
    if seed is not None:
        cfg.seed = int(seed)
    if out_dir is not None:
        cfg.out_dir = Path(out_dir)
    if threads is None:
        env = os.environ.get("SGLDIFF_THREADS")
        if env is not None:
            try:
                cfg.threads = int(env)
            except ValueError as exc:
                raise ConfigError(f"SGLDIFF_THREADS is not an integer: {env!r}") from exc
    else:
        cfg.threads = int(threads)
    if etas is not None:
        cfg.etas = tuple(float(e) for e in etas)
    if checks is not None:
        cfg.checks = tuple(checks)
    cfg.validate()
    return cfg
