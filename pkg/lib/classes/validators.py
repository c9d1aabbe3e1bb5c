"""
Validation module for model parameter sets.

This module checks a parameter point before it is solved: whether the
dressed-state reduction applies, whether the effective modes are damped and
whether the moment hierarchy has a steady state at all. Findings are
collected in a ValidationResult rather than raised, so a sweep can report
them per point.
"""

import logging
from typing import Dict, List, Optional

from lib.classes.coefficients import EffectiveCoefficients, effective_coefficients
from lib.classes.params import ModelParams, derive_dressed, regime_diagnostics
from lib.config import REGIME_THRESHOLDS, TOLERANCES
from lib.moments.moment_equations import assemble_generator, enumerate_basis
from lib.moments.solvers import stability_report

logger = logging.getLogger(__name__)


class ValidationResult:
    """Container for validation results."""

    def __init__(self):
        self.errors: List[str] = []
        self.warnings: List[str] = []
        self.info: List[str] = []
        self.checks_run: int = 0
        self.is_valid: bool = True

    def add_error(self, message: str):
        """Add an error message."""
        self.errors.append(message)
        self.is_valid = False

    def add_warning(self, message: str):
        """Add a warning message."""
        self.warnings.append(message)

    def add_info(self, message: str):
        """Add an info message."""
        self.info.append(message)

    def record(self, passed: bool, message: str):
        """Count one check and store its message as an error if it failed."""
        self.checks_run += 1
        if not passed:
            self.add_error(message)

    def merge(self, other: "ValidationResult"):
        """Fold another result into this one."""
        self.errors.extend(other.errors)
        self.warnings.extend(other.warnings)
        self.info.extend(other.info)
        self.checks_run += other.checks_run
        self.is_valid = self.is_valid and other.is_valid

    def get_summary(self) -> Dict[str, int]:
        """Get summary of validation results."""
        return {
            "checks": self.checks_run,
            "errors": len(self.errors),
            "warnings": len(self.warnings),
            "info": len(self.info),
            "is_valid": self.is_valid,
        }

    def __str__(self) -> str:
        """String representation of validation results."""
        lines = []
        if self.errors:
            lines.append(f"Errors ({len(self.errors)}):")
            lines.extend(f"  - {err}" for err in self.errors)
        if self.warnings:
            lines.append(f"Warnings ({len(self.warnings)}):")
            lines.extend(f"  - {warn}" for warn in self.warnings)
        if self.info:
            lines.append(f"Info ({len(self.info)}):")
            lines.extend(f"  - {info}" for info in self.info)
        return "\n".join(lines) if lines else "All validations passed"


class ModelParamsValidator:
    """
    Validator for a single parameter point.

    Performs:
    - Dressing checks (drive present, dressed populations defined)
    - Validity-regime checks of the qubit elimination
    - Net damping of the effective photon and phonon modes
    - Spectral stability of the moment hierarchy
    """

    def __init__(self, strict_mode: bool = False, max_order: int = 4):
        """
        Initialize validator.

        Args:
            strict_mode: If True, regime warnings are treated as errors
            max_order: Moment order used for the stability check
        """
        self.strict_mode = strict_mode
        self.max_order = max_order

    def validate(self, p: ModelParams) -> ValidationResult:
        """
        Validate one parameter point.

        Args:
            p: Model parameters

        Returns:
            ValidationResult with all findings
        """
        result = ValidationResult()
        coefficients = self._validate_dressing(p, result)
        self._validate_regime(p, result)
        if coefficients is not None:
            self._validate_damping(coefficients, result)
            self._validate_stability(p, coefficients, result)

        logger.debug(f"Parameter validation: {result.get_summary()}")
        return result

    def _flag(self, result: ValidationResult, message: str):
        if self.strict_mode:
            result.add_error(message)
        else:
            result.add_warning(message)

    def _validate_dressing(self, p: ModelParams, result: ValidationResult) -> Optional[EffectiveCoefficients]:
        """Derive the dressed quantities and coefficients, recording failures."""
        result.checks_run += 1
        try:
            dressed = derive_dressed(p)
            coefficients = effective_coefficients(p, dressed)
        except ValueError as exc:
            result.add_error(f"Effective model undefined: {exc}")
            return None
        result.add_info(
            f"theta={dressed.theta:.4f}, Omega_R={dressed.omega_r:.4f}, "
            f"P+={dressed.p_plus:.4f}, Gamma_perp={dressed.Gamma_perp:.4f}"
        )
        return coefficients

    def _validate_regime(self, p: ModelParams, result: ValidationResult):
        """Check the conditions of the qubit elimination."""
        result.checks_run += 1
        report = regime_diagnostics(p)
        ratio = REGIME_THRESHOLDS["strong_ratio"]
        messages = {
            "strong_driving": f"omega_rabi={p.omega_rabi:g} is not {ratio:g}x gamma",
            "fast_qubit": f"gamma is not {ratio:g}x max(kappa_a, kappa_b)",
            "weak_coupling": f"omega_rabi is not {ratio:g}x max(g, lam)",
            "near_resonance": f"delta1={p.delta1:g} is far from omega_m={p.omega_m:g}",
        }
        for name in report.violations():
            self._flag(result, f"Outside reduction regime: {messages[name]}")

    def _validate_damping(self, c: EffectiveCoefficients, result: ValidationResult):
        """Both effective modes should lose energy on their own."""
        result.checks_run += 1
        photon, phonon = c.net_damping()
        if photon <= 0:
            result.add_warning(f"Effective photon mode has gain: Re(b1 - a1) = {photon:.3e}")
        if phonon <= 0:
            result.add_warning(f"Effective phonon mode has gain: Re(b2 - a2) = {phonon:.3e}")

    def _validate_stability(self, p: ModelParams, c: EffectiveCoefficients, result: ValidationResult):
        """Every order block must be strictly damped for a steady state."""
        result.checks_run += 1
        generator = assemble_generator(c, p.delta1, p.omega_m, enumerate_basis(self.max_order))
        report = stability_report(generator, TOLERANCES["eps_stab"])
        if report.flagged:
            result.add_error(
                f"No moment steady state: order block(s) {report.flagged} undamped "
                f"(max abscissa {report.max_abscissa:.3e})"
            )
        else:
            result.add_info(f"Slowest moment decay rate {report.slowest_rate:.4e}")


def validate_model_params(p: ModelParams, strict: bool = False, max_order: int = 4) -> ValidationResult:
    """
    Convenience function to validate a parameter point.

    Args:
        p: Parameters to validate
        strict: If True, regime warnings are treated as errors
        max_order: Moment order used for the stability check

    Returns:
        ValidationResult object
    """
    validator = ModelParamsValidator(strict_mode=strict, max_order=max_order)
    return validator.validate(p)
