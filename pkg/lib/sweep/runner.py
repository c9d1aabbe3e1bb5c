"""
Parameter-point evaluation and parallel sweeps.

Every point goes through the same chain: dressed quantities, effective
coefficients, moment generator, stability check, steady moments and
correlations, optionally followed by a density-matrix oracle. Numerical
failures never abort a sweep; they become the row's status and message.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import polars as pl
from joblib import Parallel, delayed

from lib.classes.coefficients import EffectiveCoefficients, effective_coefficients
from lib.classes.observables import CorrelationSet, correlations
from lib.classes.params import DressedParams, ModelParams, RegimeReport, derive_dressed, regime_diagnostics
from lib.config import OracleMode, is_fatal_status
from lib.exceptions import CorrelationError
from lib.moments.moment_equations import GeneratorBlocks, MomentBasis, MomentVector, assemble_generator, enumerate_basis
from lib.moments.solvers import StabilityReport, stability_report, steady_state
from lib.oracle.steady import FullOracle, OracleResult, ReducedOracle, solve_with_cutoff_doubling
from lib.sweep.sweep_config import OracleSettings, SweepConfig

logger = logging.getLogger(__name__)

OBSERVABLE_COLUMNS = ["mean_a", "mean_b", "g2_photon", "g2_phonon", "g2_cross", "csi"]

_MOMENT_SCHEMA = {
    **{name: pl.Float64 for name in OBSERVABLE_COLUMNS},
    "max_abscissa": pl.Float64,
    "regime_valid": pl.Boolean,
    "regime_violations": pl.Utf8,
    "status": pl.Utf8,
    "message": pl.Utf8,
}

_ORACLE_SCHEMA = {
    **{f"oracle_{name}": pl.Float64 for name in OBSERVABLE_COLUMNS},
    **{f"dev_{name}": pl.Float64 for name in OBSERVABLE_COLUMNS},
    "oracle_n_a": pl.Int64,
    "oracle_n_b": pl.Int64,
    "oracle_converged": pl.Boolean,
    "oracle_contaminated": pl.Boolean,
    "oracle_min_eigenvalue": pl.Float64,
    "oracle_trace_error": pl.Float64,
    "oracle_status": pl.Utf8,
    "oracle_message": pl.Utf8,
}


@dataclass
class PointSolution:
    """Everything computed for one parameter point by the moment method."""

    params: ModelParams
    dressed: DressedParams
    coefficients: EffectiveCoefficients
    regime: RegimeReport
    generator: GeneratorBlocks
    stability: StabilityReport
    moments: MomentVector
    correlations: CorrelationSet


def key_columns(parameter: Optional[str]) -> List[str]:
    """Leading columns of a result table: the swept parameter, delta1 and nbar."""
    columns = []
    if parameter is not None and parameter not in ("delta1", "nbar"):
        columns.append(parameter)
    return columns + ["delta1", "nbar"]


def result_schema(parameter: Optional[str], with_oracle: bool) -> Dict[str, Any]:
    """Column names and dtypes of a sweep table."""
    schema: Dict[str, Any] = {name: pl.Float64 for name in key_columns(parameter)}
    schema.update(_MOMENT_SCHEMA)
    if with_oracle:
        schema.update(_ORACLE_SCHEMA)
    return schema


def _solve_moments(p: ModelParams, basis: MomentBasis, partial: Dict[str, Any]) -> PointSolution:
    """
    Moment chain shared by solve_point and evaluate_point.

    Each stage stores its result in partial before the next one runs, so a
    caller that catches a failure still sees the coefficients and the
    stability report computed up to that point.
    """
    regime = partial.get("regime") or regime_diagnostics(p)
    partial["dressed"] = dressed = derive_dressed(p)
    partial["coefficients"] = coefficients = effective_coefficients(p, dressed)
    generator = assemble_generator(coefficients, p.delta1, p.omega_m, basis)
    partial["stability"] = report = stability_report(generator)
    moments = steady_state(generator, report)
    return PointSolution(
        params=p,
        dressed=dressed,
        coefficients=coefficients,
        regime=regime,
        generator=generator,
        stability=report,
        moments=moments,
        correlations=correlations(moments),
    )


def solve_point(p: ModelParams, max_order: int = 4) -> PointSolution:
    """
    Run the moment method at one parameter point.

    Args:
        p: Model parameters
        max_order: Highest moment order

    Returns:
        PointSolution

    Raises:
        ValueError: If the effective model is undefined (no drive)
        CorrelationError: On instability, singular blocks or non-physical moments
    """
    return _solve_moments(p, enumerate_basis(max_order), {})


def run_oracle(
    p: ModelParams,
    settings: OracleSettings,
    basis: MomentBasis,
    coefficients: Optional[EffectiveCoefficients] = None,
) -> OracleResult:
    """
    Solve the configured density-matrix oracle at one point.

    Args:
        p: Model parameters
        settings: Oracle mode, cutoffs and steady-state method
        basis: Moment basis to evaluate on the steady state
        coefficients: Effective coefficients, required by the reduced oracle

    Returns:
        OracleResult
    """
    if settings.mode == OracleMode.REDUCED.value:
        if coefficients is None:
            coefficients = effective_coefficients(p, derive_dressed(p))
        model = ReducedOracle(coefficients, p.delta1, p.omega_m)
    elif settings.mode == OracleMode.FULL.value:
        model = FullOracle(p)
    else:
        raise ValueError(f"Oracle mode {settings.mode!r} does not solve anything")
    return solve_with_cutoff_doubling(
        model, settings.fock, p.nbar, basis, settings.method, settings.steady_tolerance
    )


def relative_deviation(reference: Optional[float], value: Optional[float]) -> Optional[float]:
    """|value - reference| / |reference|, None when either side is undefined or the reference is 0."""
    if reference is None or value is None or reference == 0:
        return None
    return abs(value - reference) / abs(reference)


def _oracle_columns(
    p: ModelParams, settings: OracleSettings, basis: MomentBasis,
    coefficients: Optional[EffectiveCoefficients], moment_row: Dict[str, Any],
) -> Dict[str, Any]:
    row: Dict[str, Any] = {"oracle_status": "ok", "oracle_message": ""}
    try:
        result = run_oracle(p, settings, basis, coefficients)
        row.update(
            oracle_n_a=result.cfg.n_a,
            oracle_n_b=result.cfg.n_b,
            oracle_converged=result.converged,
            oracle_contaminated=result.fock.contaminated,
            oracle_min_eigenvalue=result.steady.min_eigenvalue,
            oracle_trace_error=result.steady.trace_error,
        )
        observed = correlations(result.moments)
        row["oracle_status"] = observed.status
        for name, value in observed.as_row().items():
            row[f"oracle_{name}"] = value
            row[f"dev_{name}"] = relative_deviation(moment_row.get(name), value)
    except CorrelationError as exc:
        row.update(oracle_status=exc.status, oracle_message=str(exc))
    except ValueError as exc:
        row.update(oracle_status="error", oracle_message=str(exc))
    return row


def evaluate_point(
    p: ModelParams,
    max_order: int = 4,
    oracle: Optional[OracleSettings] = None,
    parameter: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Evaluate one sweep row.

    Args:
        p: Model parameters
        max_order: Highest moment order
        oracle: Oracle settings, None or mode off to skip
        parameter: Name of the swept field (adds its column)

    Returns:
        Row dict keyed like result_schema(parameter, oracle enabled)
    """
    row: Dict[str, Any] = {name: getattr(p, name) for name in key_columns(parameter)}
    regime = regime_diagnostics(p)
    row.update(
        regime_valid=regime.valid,
        regime_violations=",".join(regime.violations()),
        status="ok",
        message="",
    )

    basis = enumerate_basis(max_order)
    partial: Dict[str, Any] = {"regime": regime}
    try:
        observed = _solve_moments(p, basis, partial).correlations
        row.update(observed.as_row())
        row["status"] = observed.status
    except CorrelationError as exc:
        row.update(status=exc.status, message=str(exc))
    except ValueError as exc:
        row.update(status="error", message=str(exc))

    if "stability" in partial:
        row["max_abscissa"] = partial["stability"].max_abscissa

    if oracle is not None and oracle.enabled:
        row.update(_oracle_columns(p, oracle, basis, partial.get("coefficients"), row))
    return row


def run_sweep(config: SweepConfig) -> pl.DataFrame:
    """
    Evaluate every point of a sweep config.

    Points are distributed over config.jobs joblib workers; the table is
    sorted by nbar and then by the swept value, so its content does not
    depend on the worker count.

    Args:
        config: Resolved sweep configuration

    Returns:
        Polars DataFrame, one row per point
    """
    parameter = config.axis.parameter if config.axis is not None else None
    points = config.points()
    logger.info(f"Evaluating {len(points)} point(s) on {config.jobs} worker(s)")

    rows = Parallel(n_jobs=config.jobs)(
        delayed(evaluate_point)(point, config.max_order, config.oracle, parameter) for point in points
    )
    table = pl.from_dicts(rows, schema=result_schema(parameter, config.oracle.enabled))

    sort_columns = ["nbar"] if parameter in (None, "nbar") else ["nbar", parameter]
    table = table.sort(sort_columns)

    failed = count_fatal_rows(table)
    if failed:
        logger.warning(f"{failed} of {table.height} row(s) failed numerically")
    return table


def count_fatal_rows(table: pl.DataFrame) -> int:
    """Rows whose moment or oracle status is a numerical failure."""
    columns = [name for name in ("status", "oracle_status") if name in table.columns]
    fatal = 0
    for row in table.select(columns).iter_rows():
        if any(status is not None and is_fatal_status(status) for status in row):
            fatal += 1
    return fatal


def summarize_sweep(table: pl.DataFrame, parameter: str = "delta1") -> List[Dict[str, Any]]:
    """
    Per-nbar summary: peak photon and phonon occupations and minimum CSI with their locations.

    Args:
        table: Result of run_sweep
        parameter: Column holding the swept value

    Returns:
        One dict per nbar value, in table order
    """
    summary = []
    for nbar in table["nbar"].unique(maintain_order=True).to_list():
        subset = table.filter(pl.col("nbar") == nbar)
        entry: Dict[str, Any] = {
            "nbar": nbar,
            "points": subset.height,
            "failed": count_fatal_rows(subset),
        }
        for column, label in (("mean_a", "a"), ("mean_b", "b")):
            occupied = subset.filter(pl.col(column).is_not_null())
            if occupied.height:
                peak = occupied.sort(column, descending=True).row(0, named=True)
                entry.update({f"peak_{label}_at": peak[parameter], f"peak_{column}": peak[column]})
        defined = subset.filter(pl.col("csi").is_not_null())
        if defined.height:
            lowest = defined.sort("csi").row(0, named=True)
            entry.update(min_csi_at=lowest[parameter], min_csi=lowest["csi"])
        summary.append(entry)
    return summary
