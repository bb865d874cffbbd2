#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import (
    dataclass, field, fields, is_dataclass
)
from pathlib import Path
from typing import (
    Any, Dict, Optional, Tuple, Type, TypeVar, Union
)

import json
import logging

from .data import (
    DataSchema, PreprocessConfig
)
from .exceptions import (
    ConfigError, DomainError
)
from .likelihood import (
    ModelSpec, OptimizerConfig, SampleDesign
)
from .model import (
    KernelParams, PhysicalParams
)
from .simulation import (
    SimConfig, load_score_sample
)
from .utils import sha256

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class ModelConfig:
    variant: str = "SHNG"
    data_config: str = "VIX+Opt"
    physical: Dict[str, float] = field(default_factory=dict)
    kernel: Dict[str, float] = field(default_factory=dict)
    fix_omega_zero: bool = True
    vix_maturity: int = 21
    burn_in: int = 63
    eta_floor: float = 0.05
    nodes: int = 32

    def to_spec(self) -> ModelSpec:
        try:
            pp = PhysicalParams(**self.physical)
            kp = KernelParams(**self.kernel)
        except TypeError as error:
            raise ConfigError(f"Invalid model parameters (expected: known names, got: {error})") from None
        return ModelSpec(
            variant=self.variant, data_config=self.data_config, pp=pp, kp=kp, fix_omega_zero=self.fix_omega_zero,
            vix_maturity=self.vix_maturity, burn_in=self.burn_in, eta_floor=self.eta_floor, nodes=self.nodes
        )


@dataclass(frozen=True)
class DataConfig:
    returns: Optional[str] = None
    vix: Optional[str] = None
    options: Optional[str] = None
    schema: DataSchema = DataSchema()


@dataclass(frozen=True)
class SampleConfig:
    """
    Synthetic data source used instead of input files.
    """

    n_days: int = 500
    seed: Optional[int] = None
    design: SampleDesign = SampleDesign()


@dataclass(frozen=True)
class EvaluationConfig:
    split_date: Optional[str] = None
    acf_lags: int = 20
    density: bool = False
    density_maturity: int = 63
    density_points: int = 201
    eta_levels: Tuple[float, ...] = (0.73, 1.09, 1.30, 1.69)
    decomposition_maturities: Tuple[int, ...] = (21, 42, 63, 84, 105, 126)
    validation_draws: int = 200
    vix_maturities: Tuple[int, ...] = (1, 2, 21, 63, 126)


@dataclass(frozen=True)
class PricingConfig:
    eta: Optional[float] = None
    h_next: Optional[float] = None
    spot: float = 1000.0
    rate: float = 0.0
    strikes: Tuple[float, ...] = (900.0, 950.0, 1000.0, 1050.0, 1100.0)
    maturities: Tuple[int, ...] = (21, 63, 126)
    method: str = "certainty-equivalent"

    def __post_init__(self) -> None:
        if self.method not in ("certainty-equivalent", "mixture"):
            raise ConfigError(
                f"Invalid pricing method (expected: 'certainty-equivalent' or 'mixture', got: {self.method!r})"
            )


@dataclass(frozen=True)
class RunConfig:
    """
    Complete run configuration; ``raw`` keeps the parsed JSON for hashing.
    """

    model: ModelConfig = ModelConfig()
    data: DataConfig = DataConfig()
    preprocess: PreprocessConfig = PreprocessConfig()
    optimizer: OptimizerConfig = OptimizerConfig()
    sample: Optional[SampleConfig] = None
    simulation: SimConfig = SimConfig()
    evaluation: EvaluationConfig = EvaluationConfig()
    pricing: PricingConfig = PricingConfig()
    seed: int = 0
    base_path: Path = Path(".")
    raw: Dict[str, Any] = field(default_factory=dict)

    def resolve(self, path: Optional[str]) -> Optional[Path]:
        if path is None:
            return None
        path = Path(path)
        return path if path.is_absolute() else self.base_path / path


def _build(cls: Type[T], values: Any, section: str) -> T:
    if isinstance(values, cls):
        return values
    if not isinstance(values, dict):
        raise ConfigError(f"Invalid {section} section (expected: object, got: {type(values).__name__})")
    known = {item.name: item for item in fields(cls)}
    unknown = set(values) - set(known)
    if unknown:
        raise ConfigError(f"Invalid {section} keys (expected: {sorted(known)}, got unknown: {sorted(unknown)})")
    arguments = {}
    for name, value in values.items():
        default = getattr(cls(), name)
        if is_dataclass(default) and isinstance(value, dict):
            value = _build(type(default), value, f"{section}.{name}")
        elif isinstance(value, list):
            value = tuple(value)
        arguments[name] = value
    try:
        return cls(**arguments)
    except (TypeError, DomainError) as error:
        raise ConfigError(f"Invalid {section} section: {error}") from None


def parse_config(raw: Dict[str, Any], base_path: Union[str, Path] = ".") -> RunConfig:
    """
    Build a :class:`RunConfig` from parsed JSON; unknown keys are rejected and missing
    keys take their defaults.
    """

    sections = {
        "model": ModelConfig, "data": DataConfig, "preprocess": PreprocessConfig, "optimizer": OptimizerConfig,
        "sample": SampleConfig, "simulation": SimConfig, "evaluation": EvaluationConfig, "pricing": PricingConfig
    }
    unknown = set(raw) - set(sections) - {"seed"}
    if unknown:
        raise ConfigError(f"Invalid configuration keys (expected: {sorted(sections) + ['seed']}, got: {sorted(unknown)})")
    arguments: Dict[str, Any] = {name: _build(cls, raw[name], name) for name, cls in sections.items() if name in raw}
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"Invalid seed (expected: non-negative integer, got: {seed!r})")
    simulation = arguments.get("simulation")
    if simulation is not None and isinstance(simulation.score_sample, str):
        # a string names a score file relative to the configuration
        sample_path = Path(simulation.score_sample)
        sample_path = sample_path if sample_path.is_absolute() else Path(base_path) / sample_path
        arguments["simulation"] = simulation.replace(score_sample=load_score_sample(sample_path))
    return RunConfig(**arguments, seed=seed, base_path=Path(base_path), raw=raw)


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as error:
        raise ConfigError(f"Invalid configuration file {path}: {error}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"Invalid configuration (expected: JSON object, got: {type(raw).__name__})")
    return parse_config(raw, path.parent)


def config_hash(config: Union[RunConfig, Dict[str, Any]]) -> str:
    """
    SHA-256 of the canonical (sorted-key, compact) JSON text of a configuration.
    """

    raw = config.raw if isinstance(config, RunConfig) else config
    return sha256(json.dumps(raw, sort_keys=True, separators=(",", ":")))
