"""Parameter, coefficient and observable types."""
from lib.classes.params import (
    DressedParams,
    ModelParams,
    RegimeReport,
    derive_dressed,
    nbar_from_temperature,
    regime_diagnostics,
)
from lib.classes.coefficients import (
    COEFFICIENT_NAMES,
    EffectiveCoefficients,
    effective_coefficients,
    printed_terms,
)
from lib.classes.observables import CorrelationSet, cauchy_schwarz_ratio, correlations
from lib.classes.validators import ValidationResult, validate_model_params
