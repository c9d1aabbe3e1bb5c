"""
Configuration module for the photon-phonon correlation engine.

This module contains numerical tolerances, validity-regime thresholds,
oracle defaults and the reference parameter set. All rates and frequencies
are expressed in units of the qubit decay rate gamma.
"""

from typing import Dict, List
from enum import Enum


class OracleMode(Enum):
    """Which density-matrix reference model to run next to the moments."""
    OFF = "off"
    REDUCED = "reduced"
    FULL = "full"


class SteadyMethod(Enum):
    """Strategy for reaching the density-matrix steady state."""
    DIRECT = "direct"
    INTEGRATE = "integrate"


# Parameter field order (also the column order of parameter dumps)
MODEL_FIELDS: List[str] = [
    "gamma",
    "gamma_c",
    "g",
    "lam",
    "omega_rabi",
    "delta",
    "delta1",
    "omega_m",
    "kappa_a",
    "kappa_b",
    "nbar",
]


# Reference parameter set (photon/phonon resonance scan)
REFERENCE_PARAMETERS: Dict[str, float] = {
    "gamma": 1.0,
    "gamma_c": 0.3,
    "g": 3.0,
    "lam": 5.0,
    "omega_rabi": 50.0,
    "delta": -26.3,  # delta / (2 * omega_rabi) = -0.263
    "delta1": 50.0,
    "omega_m": 50.0,
    "kappa_a": 0.09,
    "kappa_b": 0.009,
    "nbar": 2.0,
}

REFERENCE_NBAR_VALUES: List[float] = [0.5, 2.0]


# Numerical tolerances
TOLERANCES = {
    # Moment hierarchy
    "eps_stab": 1e-10,  # max Re(eig) of an order block must be below -eps_stab
    "max_condition": 1e14,  # order blocks above this condition number are singular
    "evolve_rtol": 1e-9,
    "evolve_atol": 1e-12,

    # Observables
    "eps_im": 1e-8,  # relative imaginary residue allowed on real moments
    "eps_den": 1e-12,  # denominators below this make a ratio undefined

    # Cross-checks
    "oracle_match": 1e-3,  # relative agreement oracle vs moments
    "invariant_atol": 1e-12,
}


# Validity regime of the dressed-state reduction
REGIME_THRESHOLDS = {
    "strong_ratio": 10.0,  # "much larger than" means at least this factor
    "secular_ratio": 0.25,  # |delta1 - omega_m| <= ratio * |delta1 + omega_m|
}


# Oracle defaults
ORACLE_CONFIG = {
    "n_a": 12,
    "n_b": 12,
    "max_cutoff": 48,
    "cutoff_tolerance": 1e-3,
    "steady_tolerance": 1e-10,
    "contamination_threshold": 1e-6,
    "max_vector_size": 250_000,  # largest Liouville vector the doubling may build
    "integrate_first_chunk": 10.0,
    "integrate_max_time": 1e7,
    "plateau_factor": 0.9,
}


# Moment hierarchy defaults
MOMENT_CONFIG = {
    "max_order": 4,
    "observable_order": 4,  # CSI needs fourth-order moments
}


# Invariant suite
CHECK_CONFIG = {
    "draws": 100,
    "seed": 20240517,
}


# File Configuration
FILE_CONFIG = {
    "output_dir": "output",
    "config_dir": "configs",
    "default_config": "configs/resonance_scan.yaml",
    "header_prefix": "# ",
}


# Logging Configuration
LOG_CONFIG = {
    "root_logger": "PPC",
    "log_format": "%(asctime)s [%(levelname)8s] %(name)s:%(lineno)s %(message)s",
    "default_level": "INFO",
    "env_level": "PPC_LOG_LEVEL",
    "env_file": "PPC_LOG_FILE",
    "env_jobs": "PPC_JOBS",
}


# Sweep row statuses
ROW_STATUSES: List[str] = [
    "ok",
    "undefined",
    "unstable",
    "singular",
    "nonphysical",
    "step_failure",
    "no_convergence",
    "error",
]

FATAL_STATUSES: List[str] = ["singular", "nonphysical", "step_failure", "no_convergence", "error"]


def is_fatal_status(status: str) -> bool:
    """
    Check if a sweep row status counts as a numerical failure.

    Args:
        status: Row status string

    Returns:
        True if the status should make the run exit with the numerical-failure code
    """
    return status in FATAL_STATUSES


def reference_parameters(**overrides: float) -> Dict[str, float]:
    """
    Get a copy of the reference parameter set with optional overrides.

    Args:
        **overrides: Field values replacing the reference ones

    Returns:
        Parameter mapping suitable for ModelParams.from_mapping
    """
    unknown = set(overrides) - set(MODEL_FIELDS)
    if unknown:
        raise ValueError(f"Unknown parameter(s): {', '.join(sorted(unknown))}")
    params = dict(REFERENCE_PARAMETERS)
    params.update(overrides)
    return params
