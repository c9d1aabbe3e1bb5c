"""
YAML sweep configuration.

A config file fixes the model parameters (defaults: the reference set), an
optional sweep axis, the thermal occupations to run, the moment order and
the oracle settings. All physical values are in units of gamma and the file
must say so with ``units: gamma``.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from lib.classes.params import ModelParams, nbar_from_temperature
from lib.config import (
    CHECK_CONFIG,
    REFERENCE_PARAMETERS,
    MODEL_FIELDS,
    MOMENT_CONFIG,
    ORACLE_CONFIG,
    OracleMode,
    SteadyMethod,
)
from lib.exceptions import ConfigError
from lib.oracle.fock_space import FockConfig

logger = logging.getLogger(__name__)

_TOP_LEVEL_KEYS = {"units", "model", "sweep", "nbar", "thermal", "moments", "oracle", "output", "jobs", "check"}


@dataclass(frozen=True)
class SweepAxis:
    """One swept ModelParams field."""

    parameter: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class OracleSettings:
    """Which oracle to run and with which cutoffs."""

    mode: str = OracleMode.OFF.value
    fock: FockConfig = field(default_factory=FockConfig)
    method: str = SteadyMethod.DIRECT.value
    steady_tolerance: float = ORACLE_CONFIG["steady_tolerance"]

    @property
    def enabled(self) -> bool:
        return self.mode != OracleMode.OFF.value


@dataclass(frozen=True)
class SweepConfig:
    """Resolved sweep configuration."""

    base: ModelParams
    axis: Optional[SweepAxis] = None
    nbar_values: Tuple[float, ...] = ()
    max_order: int = MOMENT_CONFIG["max_order"]
    oracle: OracleSettings = field(default_factory=OracleSettings)
    output: Optional[str] = None
    jobs: int = 1
    check_draws: int = CHECK_CONFIG["draws"]
    check_seed: int = CHECK_CONFIG["seed"]

    def points(self) -> List[ModelParams]:
        """Parameter sets of every (nbar, sweep value) point, nbar-major."""
        nbars = self.nbar_values or (self.base.nbar,)
        if self.axis is not None and self.axis.parameter == "nbar":
            nbars = (self.base.nbar,)
        points = []
        for nbar in nbars:
            point = replace(self.base, nbar=float(nbar))
            if self.axis is None:
                points.append(point)
                continue
            for value in self.axis.values():
                points.append(replace(point, **{self.axis.parameter: float(value)}))
        return points

    def to_mapping(self) -> Dict[str, Any]:
        """Plain, fully resolved representation (used in output headers)."""
        mapping: Dict[str, Any] = {
            "units": "gamma",
            "model": self.base.to_mapping(),
            "nbar": [float(value) for value in self.nbar_values] or [self.base.nbar],
            "moments": {"max_order": self.max_order},
            "oracle": {
                "mode": self.oracle.mode,
                "cutoff": [self.oracle.fock.n_a, self.oracle.fock.n_b],
                "max_cutoff": self.oracle.fock.max_cutoff,
                "tolerance": self.oracle.fock.tolerance,
                "method": self.oracle.method,
                "steady_tolerance": self.oracle.steady_tolerance,
            },
        }
        if self.axis is not None:
            mapping["sweep"] = {
                "parameter": self.axis.parameter,
                "start": self.axis.start,
                "stop": self.axis.stop,
                "steps": self.axis.steps,
            }
        return mapping


def _number(section: Dict[str, Any], key: str, path: str, default=None) -> float:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _integer(section: Dict[str, Any], key: str, path: str, default=None) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}" if path else key, f"expected an integer, got {value!r}")
    return value


def _section(raw: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = raw.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(key, f"expected a mapping, got {type(value).__name__}")
    return value


def _parse_model(raw: Dict[str, Any]) -> ModelParams:
    section = _section(raw, "model")
    values: Dict[str, Any] = dict(REFERENCE_PARAMETERS)
    if "delta_over_2omega" in section:
        values.pop("delta")
    for key, value in section.items():
        if key not in MODEL_FIELDS and key != "delta_over_2omega":
            raise ConfigError(f"model.{key}", "unknown parameter")
        values[key] = _number(section, key, "model")
    try:
        return ModelParams.from_mapping(values)
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from exc


def _parse_axis(raw: Dict[str, Any]) -> Optional[SweepAxis]:
    if raw.get("sweep") is None:
        return None
    section = _section(raw, "sweep")
    parameter = section.get("parameter", "delta1")
    if parameter not in MODEL_FIELDS:
        raise ConfigError("sweep.parameter", f"{parameter!r} is not a model parameter")
    steps = _integer(section, "steps", "sweep")
    if steps < 2:
        raise ConfigError("sweep.steps", f"need at least 2 steps, got {steps}")
    return SweepAxis(
        parameter=parameter,
        start=_number(section, "start", "sweep"),
        stop=_number(section, "stop", "sweep"),
        steps=steps,
    )


def _parse_nbar(raw: Dict[str, Any]) -> Tuple[float, ...]:
    if raw.get("thermal") is not None:
        if raw.get("nbar") is not None:
            raise ConfigError("thermal", "give either nbar or thermal, not both")
        section = _section(raw, "thermal")
        temperatures = section.get("temperature")
        if not isinstance(temperatures, list):
            temperatures = [temperatures]
        frequency = _number(section, "phonon_frequency", "thermal")
        try:
            return tuple(
                nbar_from_temperature(frequency, _number({"t": t}, "t", "thermal.temperature"))
                for t in temperatures
            )
        except ValueError as exc:
            raise ConfigError("thermal", str(exc)) from exc

    value = raw.get("nbar")
    if value is None:
        return ()
    values = value if isinstance(value, list) else [value]
    parsed = tuple(_number({"value": item}, "value", "nbar") for item in values)
    if any(item < 0 for item in parsed):
        raise ConfigError("nbar", "thermal occupations must be non-negative")
    return parsed


def _parse_oracle(raw: Dict[str, Any]) -> OracleSettings:
    section = _section(raw, "oracle")
    mode = section.get("mode", OracleMode.OFF.value)
    # YAML 1.1 reads a bare off as false
    mode = OracleMode.OFF.value if mode is False else str(mode).lower()
    if mode not in {item.value for item in OracleMode}:
        raise ConfigError("oracle.mode", f"expected off, reduced or full, got {mode!r}")
    method = str(section.get("method", SteadyMethod.DIRECT.value)).lower()
    if method not in {item.value for item in SteadyMethod}:
        raise ConfigError("oracle.method", f"expected direct or integrate, got {method!r}")

    cutoff = section.get("cutoff", [ORACLE_CONFIG["n_a"], ORACLE_CONFIG["n_b"]])
    if not isinstance(cutoff, list) or len(cutoff) != 2:
        raise ConfigError("oracle.cutoff", f"expected [n_a, n_b], got {cutoff!r}")
    try:
        fock = FockConfig(
            n_a=_integer({"n_a": cutoff[0]}, "n_a", "oracle.cutoff"),
            n_b=_integer({"n_b": cutoff[1]}, "n_b", "oracle.cutoff"),
            tolerance=_number(section, "tolerance", "oracle", ORACLE_CONFIG["cutoff_tolerance"]),
            max_cutoff=_integer(section, "max_cutoff", "oracle", ORACLE_CONFIG["max_cutoff"]),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("oracle.cutoff", str(exc)) from exc

    return OracleSettings(
        mode=mode,
        fock=fock,
        method=method,
        steady_tolerance=_number(section, "steady_tolerance", "oracle", ORACLE_CONFIG["steady_tolerance"]),
    )


def parse_sweep_config(raw: Any) -> SweepConfig:
    """
    Validate a parsed YAML document and resolve it into a SweepConfig.

    Args:
        raw: Result of yaml.safe_load

    Returns:
        SweepConfig

    Raises:
        ConfigError: On any missing or invalid field
    """
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a mapping")
    unknown = sorted(set(raw) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown top-level key")
    if raw.get("units") != "gamma":
        raise ConfigError("units", f"must be 'gamma', got {raw.get('units')!r}")

    moments = _section(raw, "moments")
    max_order = _integer(moments, "max_order", "moments", MOMENT_CONFIG["max_order"])
    if not MOMENT_CONFIG["observable_order"] <= max_order <= 8:
        raise ConfigError("moments.max_order", f"must be between 4 and 8, got {max_order}")

    jobs = _integer(raw, "jobs", "", 1)
    if jobs == 0:
        raise ConfigError("jobs", "must be non-zero")

    check = _section(raw, "check")
    output = raw.get("output")
    return SweepConfig(
        base=_parse_model(raw),
        axis=_parse_axis(raw),
        nbar_values=_parse_nbar(raw),
        max_order=max_order,
        oracle=_parse_oracle(raw),
        output=str(output) if output is not None else None,
        jobs=jobs,
        check_draws=_integer(check, "draws", "check", CHECK_CONFIG["draws"]),
        check_seed=_integer(check, "seed", "check", CHECK_CONFIG["seed"]),
    )


def load_sweep_config(path: str) -> SweepConfig:
    """
    Read and validate a YAML sweep config.

    Args:
        path: Config file path

    Returns:
        SweepConfig

    Raises:
        ConfigError: If the file is missing, unparsable or invalid
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    try:
        raw = yaml.safe_load(config_path.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError("config", f"YAML parse error: {getattr(exc, 'problem', exc)}", line) from exc

    config = parse_sweep_config(raw)
    logger.info(f"Loaded config {path}: {len(config.points())} point(s), oracle {config.oracle.mode}")
    return config


def apply_overrides(
    config: SweepConfig,
    order: Optional[int] = None,
    oracle: Optional[str] = None,
    cutoff: Optional[Tuple[int, int]] = None,
    jobs: Optional[int] = None,
    output: Optional[str] = None,
) -> SweepConfig:
    """Return config with command-line overrides applied."""
    if order is not None:
        if not MOMENT_CONFIG["observable_order"] <= order <= 8:
            raise ConfigError("--order", f"must be between 4 and 8, got {order}")
        config = replace(config, max_order=order)
    if oracle is not None:
        if oracle not in {item.value for item in OracleMode}:
            raise ConfigError("--oracle", f"expected off, reduced or full, got {oracle!r}")
        config = replace(config, oracle=replace(config.oracle, mode=oracle))
    if cutoff is not None:
        try:
            fock = replace(
                config.oracle.fock,
                n_a=cutoff[0],
                n_b=cutoff[1],
                max_cutoff=max(config.oracle.fock.max_cutoff, *cutoff),
            )
        except ValueError as exc:
            raise ConfigError("--cutoff", str(exc)) from exc
        config = replace(config, oracle=replace(config.oracle, fock=fock))
    if jobs is not None:
        if jobs == 0:
            raise ConfigError("--jobs", "must be non-zero")
        config = replace(config, jobs=jobs)
    if output is not None:
        config = replace(config, output=output)
    return config
