"""Certified two-sided bounds for minimum-error discrimination of quantum states."""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    Interval,
    approximate_cost,
    barnum_knill_bound,
    bound_report,
    capital_gamma,
    contraction_interval_check,
    curlander_interval,
    gamma_holevo_pure,
    lemma4_check,
    pgm_pure_upper_bound,
    s_power_lower_bound,
)
from .ensemble import (
    Ensemble,
    EnsembleStats,
    coarse_grain_measurement,
    near_orthonormal_family,
    random_mixed_ensemble,
    random_pure_ensemble,
    syndrome_expand,
    validate,
)
from .exceptions import (
    BoundViolationError,
    DegenerateIterationError,
    DiscrimError,
    DomainError,
    NotPSDError,
    NumericError,
    ValidationError,
)
from .measurement import (
    JrfTrace,
    MeasurementReport,
    Povm,
    belavkin_weighted,
    evaluate,
    hjrf_quadratic,
    holevo_pure_basis,
    jrf_converge,
    jrf_iterate,
    pgm,
)
from .oracle import CertifiedInterval, certify, dual_upper_on_success, helstrom_two_state, ykl_residual


__all__ = [
    "BoundReport",
    "BoundViolationError",
    "CertifiedInterval",
    "DegenerateIterationError",
    "DiscrimError",
    "DomainError",
    "Ensemble",
    "EnsembleStats",
    "Interval",
    "JrfTrace",
    "MeasurementReport",
    "NotPSDError",
    "NumericError",
    "Povm",
    "ValidationError",
    "approximate_cost",
    "barnum_knill_bound",
    "belavkin_weighted",
    "bound_report",
    "capital_gamma",
    "contraction_interval_check",
    "certify",
    "coarse_grain_measurement",
    "curlander_interval",
    "dual_upper_on_success",
    "evaluate",
    "gamma_holevo_pure",
    "helstrom_two_state",
    "hjrf_quadratic",
    "holevo_pure_basis",
    "jrf_converge",
    "jrf_iterate",
    "lemma4_check",
    "near_orthonormal_family",
    "pgm",
    "pgm_pure_upper_bound",
    "random_mixed_ensemble",
    "random_pure_ensemble",
    "s_power_lower_bound",
    "syndrome_expand",
    "validate",
    "ykl_residual",
    "JRFMeasurement",
    "SquareRootMeasurement",
]

_LAZY = {"SquareRootMeasurement", "JRFMeasurement"}


def __getattr__(name):
    # the estimators pull in scikit-learn; load them only when asked for
    if name in _LAZY:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
