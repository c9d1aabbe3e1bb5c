import math
import os
import sys
from dataclasses import replace

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from lib.classes.params import (
    ModelParams,
    derive_dressed,
    nbar_from_temperature,
    regime_diagnostics,
)
from lib.classes.validators import ValidationResult, validate_model_params
from lib.config import REFERENCE_PARAMETERS, MODEL_FIELDS, reference_parameters


class TestModelParams:
    def setup_method(self):
        """Reference parameter set for each test."""
        self.params = ModelParams.from_mapping(REFERENCE_PARAMETERS)

    def test_mapping_round_trip(self):
        """to_mapping returns every field in canonical order."""
        mapping = self.params.to_mapping()
        assert list(mapping) == MODEL_FIELDS
        assert ModelParams.from_mapping(mapping) == self.params

    def test_values_are_floats(self):
        """Integer inputs are stored as floats."""
        params = ModelParams.from_mapping(reference_parameters(g=3))
        assert isinstance(params.g, float)

    def test_delta_over_2omega(self):
        """The Rabi-relative detuning is converted to delta."""
        mapping = dict(REFERENCE_PARAMETERS)
        mapping.pop("delta")
        mapping["delta_over_2omega"] = -0.263
        params = ModelParams.from_mapping(mapping)
        assert params.delta == pytest.approx(-26.3, rel=1e-12)

    def test_delta_given_twice(self):
        """delta and delta_over_2omega are mutually exclusive."""
        mapping = dict(REFERENCE_PARAMETERS, delta_over_2omega=-0.263)
        with pytest.raises(ValueError, match="either delta"):
            ModelParams.from_mapping(mapping)

    def test_unknown_and_missing_keys(self):
        """Unknown or missing fields are rejected."""
        with pytest.raises(ValueError, match="Unknown"):
            ModelParams.from_mapping(dict(REFERENCE_PARAMETERS, omega=1.0))
        partial = dict(REFERENCE_PARAMETERS)
        partial.pop("kappa_b")
        with pytest.raises(ValueError, match="Missing"):
            ModelParams.from_mapping(partial)

    @pytest.mark.parametrize("name", ["gamma", "gamma_c", "g", "lam", "omega_rabi", "kappa_a", "kappa_b", "nbar"])
    def test_negative_rates_rejected(self, name):
        """Rates, couplings and occupations must be non-negative."""
        with pytest.raises(ValueError, match=name):
            replace(self.params, **{name: -0.1})

    def test_non_finite_rejected(self):
        """NaN and infinity are rejected."""
        with pytest.raises(ValueError, match="finite"):
            replace(self.params, delta=float("nan"))
        with pytest.raises(ValueError, match="finite"):
            replace(self.params, delta1=float("inf"))

    def test_bool_rejected(self):
        """Booleans are not accepted as numbers."""
        with pytest.raises(ValueError, match="real number"):
            replace(self.params, g=True)

    def test_phonon_frequency_positive(self):
        """omega_m must be strictly positive."""
        with pytest.raises(ValueError, match="omega_m"):
            replace(self.params, omega_m=0.0)

    def test_zero_drive_allowed(self):
        """Parameters without drive are valid; only the dressing needs one."""
        params = replace(self.params, omega_rabi=0.0)
        assert params.omega_rabi == 0.0
        with pytest.raises(ValueError, match="omega_rabi"):
            derive_dressed(params)

    def test_reference_parameters_unknown_override(self):
        """Overrides must name model fields."""
        with pytest.raises(ValueError, match="Unknown"):
            reference_parameters(temperature=4.0)


class TestDressedParams:
    def setup_method(self):
        self.params = ModelParams.from_mapping(REFERENCE_PARAMETERS)
        self.dressed = derive_dressed(self.params)

    def test_reference_values(self):
        """Dressed quantities of the reference set."""
        d = self.dressed
        assert d.theta == pytest.approx(0.9140, abs=1e-4)
        assert d.omega_r == pytest.approx(51.700, abs=1e-3)
        assert d.Gamma_perp == pytest.approx(1.6274, abs=1e-4)
        assert d.Gamma_par == pytest.approx(1.3453, abs=1e-4)
        assert d.p_plus == pytest.approx(0.6891, abs=1e-4)

    def test_angle_branch(self):
        """2 theta lies in (0, pi) so sin(2 theta) is positive."""
        d = self.dressed
        assert 0.0 < d.theta < math.pi / 2
        assert d.sin_2theta > 0
        assert d.sin_2theta == pytest.approx(math.sin(2 * d.theta), rel=1e-14)
        assert d.cos_2theta == pytest.approx(math.cos(2 * d.theta), rel=1e-12)

    def test_populations_sum_to_one(self):
        assert self.dressed.p_plus + self.dressed.p_minus == pytest.approx(1.0, abs=1e-15)

    def test_rate_identities(self):
        """Gamma_perp and the populations follow from the dressed rates."""
        d = self.dressed
        assert d.Gamma_perp == pytest.approx(4 * d.gamma0 + d.gamma_plus + d.gamma_minus, rel=1e-14)
        assert d.p_plus == pytest.approx(d.gamma_minus / (d.gamma_plus + d.gamma_minus), rel=1e-14)

    def test_resonant_drive_is_symmetric(self):
        """At delta = 0 the dressed populations are exactly equal."""
        d = derive_dressed(replace(self.params, delta=0.0))
        assert d.p_plus == 0.5
        assert d.p_minus == 0.5
        assert d.cos_2theta == 0.0
        assert d.theta == pytest.approx(math.pi / 4, rel=1e-15)

    def test_positive_detuning_branch(self):
        """Large positive delta sends theta towards 0."""
        d = derive_dressed(replace(self.params, delta=1e4))
        assert 0.0 < d.theta < 0.01

    def test_no_decay_rejected(self):
        """Without any qubit damping the populations are undefined."""
        with pytest.raises(ValueError, match="populations"):
            derive_dressed(replace(self.params, gamma=0.0, gamma_c=0.0))


class TestThermalOccupation:
    def test_zero_temperature(self):
        assert nbar_from_temperature(1e9, 0.0) == 0.0

    def test_high_temperature_limit(self):
        """kT >> hbar omega gives nbar ~ kT / (hbar omega) - 1/2."""
        from scipy import constants

        omega, temperature = 1e9, 300.0
        ratio = constants.k * temperature / (constants.hbar * omega)
        assert nbar_from_temperature(omega, temperature) == pytest.approx(ratio - 0.5, rel=1e-6)

    def test_known_value(self):
        """hbar omega = kT ln 2 gives nbar = 1."""
        from scipy import constants

        temperature = 1.0
        omega = constants.k * temperature * math.log(2.0) / constants.hbar
        assert nbar_from_temperature(omega, temperature) == pytest.approx(1.0, rel=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            nbar_from_temperature(0.0, 1.0)
        with pytest.raises(ValueError):
            nbar_from_temperature(1e9, -1.0)


class TestRegimeDiagnostics:
    def setup_method(self):
        self.params = ModelParams.from_mapping(REFERENCE_PARAMETERS)

    def test_reference_set_is_valid(self):
        report = regime_diagnostics(self.params)
        assert report.valid
        assert report.violations() == []

    def test_weak_drive(self):
        report = regime_diagnostics(replace(self.params, omega_rabi=5.0))
        assert not report.strong_driving
        assert "strong_driving" in report.violations()

    def test_far_detuned(self):
        """|delta1 - omega_m| = 40 exceeds a quarter of delta1 + omega_m = 60."""
        report = regime_diagnostics(replace(self.params, delta1=10.0))
        assert report.violations() == ["near_resonance"]

    def test_slow_qubit(self):
        report = regime_diagnostics(replace(self.params, kappa_a=0.5))
        assert not report.fast_qubit


class TestModelParamsValidator:
    def setup_method(self):
        self.params = ModelParams.from_mapping(REFERENCE_PARAMETERS)

    def test_reference_set_passes(self):
        result = validate_model_params(self.params)
        assert isinstance(result, ValidationResult)
        assert result.is_valid
        assert result.warnings == []
        assert result.get_summary()["checks"] == 4

    def test_regime_violation_is_warning(self):
        result = validate_model_params(replace(self.params, delta1=10.0))
        assert result.is_valid
        assert any("regime" in warning for warning in result.warnings)

    def test_strict_mode_turns_warnings_into_errors(self):
        result = validate_model_params(replace(self.params, delta1=10.0), strict=True)
        assert not result.is_valid
        assert any("regime" in error for error in result.errors)

    def test_undriven_point_is_error(self):
        result = validate_model_params(replace(self.params, omega_rabi=0.0))
        assert not result.is_valid
        assert "undefined" in str(result)

    def test_merge(self):
        """Merging keeps messages, counts and validity."""
        first, second = ValidationResult(), ValidationResult()
        first.record(True, "never stored")
        second.record(False, "broken")
        first.merge(second)
        assert first.checks_run == 2
        assert first.errors == ["broken"]
        assert not first.is_valid
