"""
Configuration Loading
=====================

Loads YAML (or JSON, which YAML accepts) configuration files into validated
pydantic models.

Key Components:
- load_yaml: read a mapping from disk, with ConfigurationError on failure
- load_defaults: the packaged ``config/default.yaml``
- SolverSettings: numerical knobs of the evolution solvers
- ExperimentConfig: one Monte-Carlo waterfall campaign
- load_ensemble / load_experiment: file -> model, unknown keys rejected
- output_root: base directory for run outputs (``SFC_OUTPUT_ROOT`` overrides)
"""

import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ConfigurationError
from ..ensemble.params import EnsembleParams

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "default.yaml"
OUTPUT_ROOT_ENV = "SFC_OUTPUT_ROOT"

PathLike = Union[str, Path]


def load_yaml(path: PathLike) -> Dict[str, Any]:
    """
    Read a YAML/JSON mapping from ``path``.

    Raises:
        ConfigurationError: If the file is missing, unparsable or not a mapping
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError("file does not exist", config_file=str(path))
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"cannot parse: {e}", config_file=str(path), original_error=e) from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError("top level must be a mapping", config_file=str(path))
    return data


@lru_cache(maxsize=1)
def load_defaults() -> Dict[str, Any]:
    """The packaged default configuration (empty if it is not installed)."""
    if not DEFAULT_CONFIG_PATH.exists():
        logger.warning(f"Default configuration not found at {DEFAULT_CONFIG_PATH}")
        return {}
    return load_yaml(DEFAULT_CONFIG_PATH)


def output_root() -> Path:
    """Base directory for harness outputs."""
    env = os.environ.get(OUTPUT_ROOT_ENV)
    if env:
        return Path(env)
    return Path(load_defaults().get("harness", {}).get("output_root", "results"))


def _model_error(e: PydanticValidationError, config_file: Optional[str]) -> ConfigurationError:
    first = e.errors()[0]
    key = ".".join(str(p) for p in first.get("loc", ())) or None
    return ConfigurationError(first.get("msg", str(e)), config_key=key,
                              config_file=config_file, original_error=e)


class SolverSettings(BaseModel):
    """
    Numerical settings of the EGE/CE solvers and threshold search.

    Attributes:
        step_scale: RK4 step is step_scale * alpha^L unless given explicitly
        euler_substeps: Forward-Euler CE steps per RK4 step
        stop_mass: Integration stops once sum(v) <= stop_mass * sum(v(0))
        clamp_tolerance: Negative state entries above -clamp_tolerance are clamped to 0
        curvature_tolerance: Minimum curvature for a strict local minimum of r1
        adaptive: Halve the step until tau* and r1(tau*) settle
        adaptive_rel_change: Relative change accepted by the adaptive loop
        max_halvings: Cap on adaptive step halvings
        bracket_low, bracket_high: Initial bisection bracket for the BP threshold
        threshold_tolerance: Width of the final bisection interval
        gamma_offset: Gap below the threshold at which gamma is measured
        psd_tolerance: Allowed negative CE diagonal before projection
        cross_term: Variable/edge covariance initialization variant
        stall_ratio: Decoding stalls once sum(r1) <= stall_ratio * sum(v)
        max_steps: Cap on accepted RK4 steps per trajectory
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    step_scale: float = Field(1e-3, gt=0)
    euler_substeps: int = Field(10, ge=1)
    stop_mass: float = Field(1e-6, gt=0, lt=1)
    clamp_tolerance: float = Field(1e-12, ge=0)
    curvature_tolerance: float = Field(1e-6, ge=0)
    adaptive: bool = True
    adaptive_rel_change: float = Field(1e-3, gt=0)
    max_halvings: int = Field(3, ge=0)
    bracket_low: float = Field(0.3, gt=0, lt=1)
    bracket_high: float = Field(0.5, gt=0, lt=1)
    threshold_tolerance: float = Field(1e-5, gt=0)
    gamma_offset: float = Field(0.01, gt=0)
    psd_tolerance: float = Field(1e-9, ge=0)
    cross_term: Literal["printed", "derived"] = "printed"
    stall_ratio: float = Field(1e-8, ge=0)
    max_steps: int = Field(200_000, ge=1)

    @model_validator(mode="after")
    def _check_bracket(self) -> "SolverSettings":
        if self.bracket_low >= self.bracket_high:
            raise ValueError("bracket_low must be below bracket_high")
        return self

    @classmethod
    def from_defaults(cls, **overrides: Any) -> "SolverSettings":
        """Settings from ``config/default.yaml`` with keyword overrides applied."""
        data = dict(load_defaults().get("solver", {}))
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls.model_validate(data)
        except PydanticValidationError as e:
            raise _model_error(e, str(DEFAULT_CONFIG_PATH)) from e


class ExperimentConfig(BaseModel):
    """
    Sampling plan of one waterfall campaign.

    Attributes:
        name: Run name; the run directory is ``<output_dir>/<name>``
        ensemble: Ensemble to sample codes from
        epsilons: Channel erasure probabilities, each in (0, 1)
        codes: Graphs sampled per epsilon
        codewords: Erasure patterns decoded per graph
        seed: Root seed; the whole campaign is a function of (config, seed)
        girth_condition: Remove cycles of length <= max_removed_cycle
        max_removed_cycle: Longest cycle length removed by conditioning
        output_dir: Output root (defaults to ``output_root()``)
        workers: Worker processes for the trial pool
        predict: Also compute the waterfall estimate for each epsilon
        reference: Name of a reference ensemble whose published values apply
    """

    model_config = ConfigDict(extra="forbid")

    name: str = "waterfall"
    ensemble: EnsembleParams
    epsilons: List[float]
    codes: int = Field(100, ge=1)
    codewords: int = Field(100, ge=1)
    seed: int = Field(0, ge=0)
    girth_condition: bool = False
    max_removed_cycle: int = Field(6, ge=2)
    output_dir: Optional[Path] = None
    workers: int = Field(1, ge=1)
    predict: bool = False
    reference: Optional[str] = None

    @field_validator("epsilons")
    @classmethod
    def _check_epsilons(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one epsilon is required")
        for eps in value:
            if not 0.0 < eps < 1.0:
                raise ValueError(f"epsilon {eps} outside (0, 1)")
        return sorted(value)

    @field_validator("max_removed_cycle")
    @classmethod
    def _even_cycle(cls, value: int) -> int:
        if value % 2:
            raise ValueError("cycle lengths in a bipartite graph are even")
        return value

    @property
    def run_dir(self) -> Path:
        return (self.output_dir or output_root()) / self.name

    def to_config(self) -> Dict[str, Any]:
        data = self.model_dump(exclude={"ensemble", "output_dir"})
        data["ensemble"] = self.ensemble.to_config()
        if self.output_dir is not None:
            data["output_dir"] = str(self.output_dir)
        return data


def load_ensemble(path: PathLike) -> EnsembleParams:
    """
    Load ensemble parameters from a file holding either the keys
    ``dv, dc, L, alpha, M[, sizing]`` or an ``ensemble:`` section with them.

    Raises:
        ConfigurationError: On missing, unknown or invalid keys
    """
    data = load_yaml(path)
    if "ensemble" in data:
        data = data["ensemble"]
    if not isinstance(data, dict):
        raise ConfigurationError("'ensemble' must be a mapping", config_key="ensemble",
                                 config_file=str(path))
    # YAML reads 1.1 as a float; parse_alpha recovers 11/10 from its repr.
    try:
        params = EnsembleParams.model_validate(data)
    except PydanticValidationError as e:
        raise _model_error(e, str(path)) from e
    logger.info(f"Loaded ensemble {params} from {path}")
    return params


def load_experiment(path: PathLike, **overrides: Any) -> ExperimentConfig:
    """Load an ``ExperimentConfig`` from a YAML/JSON file, applying overrides."""
    data = load_yaml(path)
    defaults = load_defaults().get("harness", {})
    for key in ("codes", "codewords", "workers"):
        if key in defaults and key not in data:
            data[key] = defaults[key]
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = ExperimentConfig.model_validate(data)
    except PydanticValidationError as e:
        raise _model_error(e, str(path)) from e
    logger.info(f"Loaded experiment '{config.name}' ({len(config.epsilons)} epsilons) from {path}")
    return config
