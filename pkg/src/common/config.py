import json
import logging
import math
from dataclasses import fields
from os import PathLike
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .errors import ConfigError, SeparationToolkitError
from .typings import (
    Algorithm,
    AlgorithmConfig,
    ExperimentConfig,
    SolverMode,
    WhiteningMode,
)

logger = logging.getLogger(__name__)

_ALGORITHM_KEYS = {f.name for f in fields(AlgorithmConfig)}
_EXPERIMENT_KEYS = {f.name for f in fields(ExperimentConfig)}
_REQUIRED_KEYS = ("n_tx", "n_rx", "n_samples", "snr_db", "constellation_order",
                  "algorithms", "n_trials", "base_seed")


def load_experiment_config(
    path: Union[str, PathLike[str]],
    overrides: Optional[Mapping[str, Any]] = None
) -> ExperimentConfig:
    """
    Read an experiment configuration from a JSON document.

    Args:
        path: JSON file whose keys mirror the ExperimentConfig fields
        overrides: values replacing the file's (None entries are ignored)

    Returns:
        ExperimentConfig: validated configuration

    Raises:
        ConfigError: if the file is missing, is not valid JSON or fails validation
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e

    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    if overrides:
        raw.update({key: value for key, value in overrides.items() if value is not None})
    cfg = parse_experiment_config(raw)
    logger.info("loaded %s: %d operating point(s), %d algorithm(s), %d trial(s)",
                path, cfg.n_points, len(cfg.algorithms), cfg.n_trials)
    return cfg


def parse_experiment_config(raw: Mapping[str, Any]) -> ExperimentConfig:
    missing = [key for key in _REQUIRED_KEYS if key not in raw]
    if missing:
        raise ConfigError(f"missing config key(s): {', '.join(missing)}")
    unknown = sorted(set(raw) - _EXPERIMENT_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    values = dict(raw)
    try:
        values["n_samples"] = [int(n) for n in _as_list(raw["n_samples"])]
        values["snr_db"] = [parse_real(x) for x in _as_list(raw["snr_db"])]
        values["algorithms"] = [parse_algorithm_config(a) for a in _as_list(raw["algorithms"])]
        for key in ("n_tx", "n_rx", "constellation_order", "n_trials", "base_seed", "n_threads"):
            if key in values:
                values[key] = int(values[key])
        if "condition_bound" in values:
            values["condition_bound"] = parse_real(values["condition_bound"])
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except (SeparationToolkitError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid experiment config: {e}") from e


def parse_algorithm_config(raw: Union[str, Mapping[str, Any]]) -> AlgorithmConfig:
    """An algorithm entry is either a bare name or an object of AlgorithmConfig fields."""
    if isinstance(raw, str):
        return AlgorithmConfig.default(_parse_enum(Algorithm, raw, "algorithm"))
    if not isinstance(raw, Mapping) or "algorithm" not in raw:
        raise ConfigError(f"algorithm entry needs an 'algorithm' key, got {raw!r}")
    unknown = sorted(set(raw) - _ALGORITHM_KEYS)
    if unknown:
        raise ConfigError(f"unknown algorithm key(s): {', '.join(unknown)}")

    values: Dict[str, Any] = dict(raw)
    algorithm = _parse_enum(Algorithm, values.pop("algorithm"), "algorithm")
    if "solver_mode" in values:
        values["solver_mode"] = _parse_enum(SolverMode, values["solver_mode"], "solver_mode")
    if "whitening_mode" in values:
        values["whitening_mode"] = _parse_enum(
            WhiteningMode, values["whitening_mode"], "whitening_mode")
    for key in ("n_sweeps", "n_warmstart"):
        if key in values:
            values[key] = int(values[key])
    try:
        return AlgorithmConfig.default(algorithm, **values)
    except SeparationToolkitError as e:
        raise ConfigError(f"invalid {algorithm.value} entry: {e}") from e


def parse_real(value: Union[str, int, float]) -> float:
    """Numbers pass through; "inf" (any case) is +infinity."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ConfigError(f"expected a number or 'inf', got {value!r}")
    return float(value)


def _as_list(value: Any) -> List[Any]:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _parse_enum(enum_type, value: Any, key: str):
    try:
        return enum_type(str(value).lower())
    except ValueError as e:
        choices = ", ".join(member.value for member in enum_type)
        raise ConfigError(f"{key} must be one of {choices}, got {value!r}") from e
