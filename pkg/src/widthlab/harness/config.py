"""JSON experiment configuration with strict key checking."""

import dataclasses
import json
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..node_classes import NodeFamily
from ..sobolev import SobolevBallSpec


@dataclass
class FamilyConfig:
    kind: str
    d: int = 1
    k: int = 0
    mother_id: str = "logistic"
    lipschitz_constant: float = 1.0
    max_frequency: int = 0
    parameter_box: list | None = None

    def build(self):
        return NodeFamily(self.kind, d=self.d, k=self.k,
                          lipschitz_constant=self.lipschitz_constant,
                          mother_id=self.mother_id,
                          max_frequency=self.max_frequency,
                          parameter_box=tuple(
                              tuple(r) for r in (self.parameter_box or ())))


@dataclass
class DictionaryConfig:
    mode: str = "grid"
    resolution: int | None = None
    count: int | None = None
    scale: float = 1.0


@dataclass
class NormConfig:
    p: float = 2.0
    domain_size: int = 2000


@dataclass
class SweepConfig:
    n: list | None = None
    epsilon: list | None = None


@dataclass
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 1000
    trials: int = 32
    members_per_target: int = 32


@dataclass
class BoundConfig:
    K_const: float = 1.0


@dataclass
class SobolevConfig:
    r: int = 1
    C: float = 7.0
    Lambda: float | None = None
    grid: int = 4096
    targets: int = 12
    cutoff: int = 64
    extremal_cutoff: int = 10_000

    def build(self):
        return SobolevBallSpec(self.r, self.C)


@dataclass
class VerifyConfig:
    instances: int = 1000
    max_dim: int = 8
    max_n: int = 8


@dataclass
class OutputConfig:
    dir: str = "out"
    format: str = "csv"
    svg: bool = False
    wall_time: bool = False


@dataclass
class ExperimentConfig:
    seed: int
    sweep: SweepConfig
    name: str = "experiment"
    family: FamilyConfig | None = None
    sobolev: SobolevConfig | None = None
    dictionary: DictionaryConfig = field(default_factory=DictionaryConfig)
    norm: NormConfig = field(default_factory=NormConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    bound: BoundConfig = field(default_factory=BoundConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self):
        return dataclasses.asdict(self)


_NESTED = {
    "sweep": SweepConfig, "family": FamilyConfig, "sobolev": SobolevConfig,
    "dictionary": DictionaryConfig, "norm": NormConfig,
    "solver": SolverConfig, "bound": BoundConfig, "verify": VerifyConfig,
    "output": OutputConfig,
}


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    kwargs = {}
    for key, value in data.items():
        if cls is ExperimentConfig and key in _NESTED and value is not None:
            value = _build(_NESTED[key], value, f"{where}.{key}")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _check_increasing(values, where):
    if not values:
        raise ConfigError(f"{where} must be nonempty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{where} must be strictly increasing")


def validate(cfg):
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool) or cfg.seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    if cfg.sweep.n is None and cfg.sweep.epsilon is None:
        raise ConfigError("sweep needs an n list or an epsilon list")
    if cfg.sweep.n is not None:
        _check_increasing(cfg.sweep.n, "sweep.n")
        if any(not isinstance(n, int) or n < 1 for n in cfg.sweep.n):
            raise ConfigError("sweep.n entries must be positive integers")
    if cfg.sweep.epsilon is not None:
        _check_increasing(cfg.sweep.epsilon, "sweep.epsilon")
        if any(e <= 0 for e in cfg.sweep.epsilon):
            raise ConfigError("sweep.epsilon entries must be positive")
    if cfg.output.format not in ("csv", "json"):
        raise ConfigError("output.format must be csv or json")
    if cfg.dictionary.mode not in ("grid", "random"):
        raise ConfigError("dictionary.mode must be grid or random")
    if cfg.solver.tol <= 0 or cfg.solver.trials < 1 or cfg.solver.max_iter < 1:
        raise ConfigError("solver tol, trials and max_iter must be positive")
    if cfg.norm.p < 1:
        raise ConfigError("norm.p must be >= 1")
    try:
        if cfg.family is not None:
            cfg.family.build()
        if cfg.sobolev is not None:
            cfg.sobolev.build()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key in ("seed", "sweep"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")
    return validate(_build(ExperimentConfig, data, "config"))


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(data)
