"""
Model parameters and dressed-state quantities.

Holds the physical parameters of the driven qubit coupled to a cavity mode
and a phonon mode, and derives the dressed-state angle, Rabi splitting,
dressed decay rates and populations used by the effective coefficients.
All rates and frequencies are in units of the qubit decay rate gamma.
"""

import logging
import math
import numbers
from dataclasses import dataclass, asdict, fields
from typing import Dict, Mapping

import numpy as np
from scipy import constants

from lib.config import MODEL_FIELDS, REGIME_THRESHOLDS

logger = logging.getLogger(__name__)

_NON_NEGATIVE = ("gamma", "gamma_c", "g", "lam", "omega_rabi", "kappa_a", "kappa_b", "nbar")


@dataclass(frozen=True)
class ModelParams:
    """
    Physical parameters of the qubit-photon-phonon system.

    Sign conventions: delta = w0 - wL (laser-qubit detuning) and
    delta1 = wL - wc (laser-cavity detuning). Bare frequencies only enter
    through these two detunings.

    Features:
    - Construction-time validation (finite values, non-negative rates)
    - Mapping round trip for YAML configs (accepts delta_over_2omega)
    - Immutable, so sweep workers can share instances
    """

    gamma: float
    gamma_c: float
    g: float
    lam: float
    omega_rabi: float
    delta: float
    delta1: float
    omega_m: float
    kappa_a: float
    kappa_b: float
    nbar: float

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if not isinstance(value, numbers.Real) or isinstance(value, bool):
                raise ValueError(f"{item.name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{item.name} must be finite, got {value}")
            object.__setattr__(self, item.name, float(value))

        negative = [name for name in _NON_NEGATIVE if getattr(self, name) < 0]
        if negative:
            raise ValueError(f"Parameters must be non-negative: {', '.join(negative)}")
        if self.omega_m <= 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "ModelParams":
        """
        Build parameters from a plain mapping.

        Args:
            mapping: Field values; ``delta_over_2omega`` may replace ``delta``

        Returns:
            Validated ModelParams
        """
        values = dict(mapping)
        if "delta_over_2omega" in values:
            if "delta" in values:
                raise ValueError("Give either delta or delta_over_2omega, not both")
            ratio = values.pop("delta_over_2omega")
            values["delta"] = 2.0 * float(ratio) * float(values.get("omega_rabi", 0.0))

        unknown = sorted(set(values) - set(MODEL_FIELDS))
        if unknown:
            raise ValueError(f"Unknown parameter(s): {', '.join(unknown)}")
        missing = [name for name in MODEL_FIELDS if name not in values]
        if missing:
            raise ValueError(f"Missing parameter(s): {', '.join(missing)}")
        return cls(**values)

    def to_mapping(self) -> Dict[str, float]:
        """Return the parameters as an ordered plain dict."""
        data = asdict(self)
        return {name: data[name] for name in MODEL_FIELDS}


@dataclass(frozen=True)
class DressedParams:
    """Dressed-state quantities derived from ModelParams."""

    theta: float
    omega_r: float
    sin_2theta: float
    cos_2theta: float
    gamma0: float
    gamma_plus: float
    gamma_minus: float
    Gamma_perp: float
    Gamma_par: float
    p_plus: float
    p_minus: float


@dataclass(frozen=True)
class RegimeReport:
    """Boolean diagnostics for the validity of the dressed-state reduction."""

    strong_driving: bool
    fast_qubit: bool
    weak_coupling: bool
    near_resonance: bool

    @property
    def valid(self) -> bool:
        return self.strong_driving and self.fast_qubit and self.weak_coupling and self.near_resonance

    def violations(self):
        """Names of the failed conditions."""
        return [name for name, ok in asdict(self).items() if not ok]


def derive_dressed(p: ModelParams) -> DressedParams:
    """
    Derive the dressed-state angle, splitting, rates and populations.

    The branch 2*theta in (0, pi) is used, so sin(2*theta) > 0. The sine and
    cosine of 2*theta are taken in their algebraic forms Omega/Omega_R and
    Delta/(2*Omega_R), which are exact at Delta = 0.

    Args:
        p: Model parameters

    Returns:
        DressedParams

    Raises:
        ValueError: If omega_rabi <= 0 (dressing undefined)
    """
    if p.omega_rabi <= 0:
        raise ValueError(f"Dressing requires omega_rabi > 0, got {p.omega_rabi}")

    omega_r = math.sqrt((p.delta / 2.0) ** 2 + p.omega_rabi ** 2)
    theta = 0.5 * math.atan2(2.0 * p.omega_rabi, p.delta)
    s2 = p.omega_rabi / omega_r
    c2 = p.delta / (2.0 * omega_r)
    cos_sq = (1.0 + c2) / 2.0
    sin_sq = (1.0 - c2) / 2.0

    gamma0 = (p.gamma * s2 ** 2 + p.gamma_c * c2 ** 2) / 4.0
    gamma_plus = p.gamma * cos_sq ** 2 + (p.gamma_c / 4.0) * s2 ** 2
    gamma_minus = p.gamma * sin_sq ** 2 + (p.gamma_c / 4.0) * s2 ** 2
    total = gamma_plus + gamma_minus
    if total <= 0:
        raise ValueError("Dressed populations undefined: gamma and gamma_c are both zero")

    p_plus = gamma_minus / total
    return DressedParams(
        theta=theta,
        omega_r=omega_r,
        sin_2theta=s2,
        cos_2theta=c2,
        gamma0=gamma0,
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        Gamma_perp=4.0 * gamma0 + gamma_plus + gamma_minus,
        Gamma_par=p.gamma * (1.0 + c2 ** 2) + p.gamma_c * s2 ** 2,
        p_plus=p_plus,
        p_minus=1.0 - p_plus,
    )


def nbar_from_temperature(omega_m: float, temperature: float) -> float:
    """
    Bose-Einstein occupation of a mode.

    Args:
        omega_m: Angular frequency in rad/s
        temperature: Temperature in kelvin

    Returns:
        Mean thermal occupation, 0 at T = 0
    """
    if omega_m <= 0:
        raise ValueError(f"omega_m must be positive, got {omega_m}")
    if temperature < 0:
        raise ValueError(f"temperature must be non-negative, got {temperature}")
    if temperature == 0:
        return 0.0
    x = constants.hbar * omega_m / (constants.k * temperature)
    return float(1.0 / np.expm1(x))


def regime_diagnostics(p: ModelParams) -> RegimeReport:
    """
    Check the conditions under which the qubit can be eliminated.

    Args:
        p: Model parameters

    Returns:
        RegimeReport; never raises for valid parameters
    """
    ratio = REGIME_THRESHOLDS["strong_ratio"]
    report = RegimeReport(
        strong_driving=p.omega_rabi >= ratio * p.gamma,
        fast_qubit=p.gamma >= ratio * max(p.kappa_a, p.kappa_b),
        weak_coupling=p.omega_rabi >= ratio * max(p.g, p.lam),
        near_resonance=abs(p.delta1 - p.omega_m)
        <= REGIME_THRESHOLDS["secular_ratio"] * abs(p.delta1 + p.omega_m),
    )
    if not report.valid:
        logger.debug(f"Outside the reduction regime: {', '.join(report.violations())}")
    return report
