"""
Command-line surface of the photon-phonon correlation engine.

Subcommands:
1. steady: Solve one parameter point per nbar and print coefficients and correlations.
2. sweep: Evaluate a configured sweep and write it as CSV.
3. oracle-compare: Sweep with a density-matrix oracle next to the moments.
4. check: Run the structural invariant suite on the configured base point.

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 invariant failure.

Usage:
    python run_correlations.py sweep --config configs/resonance_scan.yaml --out output/resonance_scan.csv
"""

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Tuple

from dotenv import load_dotenv

import lib
from lib.classes.validators import validate_model_params
from lib.config import FILE_CONFIG, LOG_CONFIG, OracleMode, is_fatal_status
from lib.exceptions import ConfigError, CorrelationError
from lib.logging_helpers import configure_root_logger, get_logger
from lib.sweep import (
    apply_overrides,
    count_fatal_rows,
    evaluate_point,
    load_sweep_config,
    run_invariant_suite,
    run_sweep,
    solve_point,
    summarize_sweep,
    write_result_csv,
)
from lib.sweep.sweep_config import SweepConfig

load_dotenv()

logger = get_logger("CLI")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_INVARIANT = 3


def parse_cutoff(text: str) -> Tuple[int, int]:
    """Parse an ``n_a,n_b`` cutoff pair."""
    try:
        n_a, n_b = (int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n_a,n_b, got {text!r}")
    return n_a, n_b


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_correlations",
        description="Steady-state photon-phonon correlations of a driven qubit in a cavity",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("steady", "solve the base point for every nbar and print the results"),
        ("sweep", "evaluate the configured sweep and write a CSV"),
        ("oracle-compare", "sweep with density-matrix oracle columns"),
        ("check", "run the structural invariant suite"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", default=FILE_CONFIG["default_config"], help="YAML config path")
        sub.add_argument("--out", default=None, help="output CSV path")
        sub.add_argument("--order", type=int, default=None, help="maximum moment order")
        sub.add_argument("--oracle", choices=[mode.value for mode in OracleMode], default=None)
        sub.add_argument("--cutoff", type=parse_cutoff, default=None, help="starting Fock cutoffs n_a,n_b")
        sub.add_argument("--jobs", type=int, default=None, help="parallel workers (-1 for all cores)")
        sub.add_argument(
            "--log-level",
            default=os.getenv(LOG_CONFIG["env_level"], LOG_CONFIG["default_level"]),
            help="logging level",
        )
        sub.add_argument("--log-file", default=os.getenv(LOG_CONFIG["env_file"]) or None, help="optional log file")
    return parser


def load_config(args: argparse.Namespace) -> SweepConfig:
    """Load the YAML config and apply command-line overrides."""
    logger.info("=== PHASE 1: CONFIG ===")
    config = load_sweep_config(args.config)
    jobs = args.jobs
    if jobs is None and os.getenv(LOG_CONFIG["env_jobs"]):
        try:
            jobs = int(os.environ[LOG_CONFIG["env_jobs"]])
        except ValueError:
            raise ConfigError(LOG_CONFIG["env_jobs"], f"expected an integer, got {os.environ[LOG_CONFIG['env_jobs']]!r}")
    return apply_overrides(
        config,
        order=args.order,
        oracle=args.oracle,
        cutoff=args.cutoff,
        jobs=jobs,
        output=args.out,
    )


def _format(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{value:.6g}"


def run_steady(config: SweepConfig) -> int:
    """Solve and print the base point for every nbar."""
    logger.info("=== PHASE 2: STEADY STATE ===")
    failed = False
    nbars = config.nbar_values or (config.base.nbar,)
    for nbar in nbars:
        point = replace(config.base, nbar=nbar)
        print(f"--- nbar = {nbar:g}, delta1 = {point.delta1:g} ---")
        for warning in validate_model_params(point, max_order=config.max_order).warnings:
            logger.warning(warning)
        try:
            solution = solve_point(point, config.max_order)
        except (CorrelationError, ValueError) as e:
            status = getattr(e, "status", "error")
            print(f"status: {status} ({e})")
            failed = failed or is_fatal_status(status)
            continue

        d = solution.dressed
        print(f"theta = {d.theta:.6f}  Omega_R = {d.omega_r:.6f}  P+ = {d.p_plus:.6f}  P- = {d.p_minus:.6f}")
        print(f"Gamma_perp = {d.Gamma_perp:.6f}  Gamma_par = {d.Gamma_par:.6f}")
        for name, value in solution.coefficients.as_mapping().items():
            print(f"{name} = {value.real:+.6e} {value.imag:+.6e}j")
        print(f"regime valid: {solution.regime.valid} {solution.regime.violations() or ''}".rstrip())
        print(f"stability abscissa per order: "
              + ", ".join(f"{order}: {value:.4e}" for order, value in solution.stability.abscissa.items()))
        for name, value in solution.correlations.as_row().items():
            print(f"{name} = {_format(value)}")
        print(f"status: {solution.correlations.status}")

        if config.oracle.enabled:
            row = evaluate_point(point, config.max_order, config.oracle)
            print(f"oracle ({config.oracle.mode}, cutoff {row.get('oracle_n_a')},{row.get('oracle_n_b')}, "
                  f"converged {row.get('oracle_converged')}): status {row['oracle_status']}")
            for name in ("mean_a", "mean_b", "g2_photon", "g2_phonon", "g2_cross", "csi"):
                print(f"oracle_{name} = {_format(row.get(f'oracle_{name}'))}  "
                      f"relative deviation {_format(row.get(f'dev_{name}'))}")
            failed = failed or is_fatal_status(row["oracle_status"])
    return EXIT_NUMERICAL if failed else EXIT_OK


def run_table(config: SweepConfig, default_name: str) -> int:
    """Evaluate the sweep, write the CSV and log the per-nbar summary."""
    logger.info("=== PHASE 2: SWEEP ===")
    table = run_sweep(config)

    logger.info("=== PHASE 3: WRITE ===")
    output = config.output or str(Path(FILE_CONFIG["output_dir"]) / default_name)
    write_result_csv(table, config.to_mapping(), output, lib.__version__)

    parameter = config.axis.parameter if config.axis is not None else "delta1"
    for entry in summarize_sweep(table, parameter):
        logger.info(
            f"nbar={entry['nbar']:g}: peak <a^dag a>={_format(entry.get('peak_mean_a'))} "
            f"at {parameter}={_format(entry.get('peak_a_at'))}, peak <b^dag b>={_format(entry.get('peak_mean_b'))} "
            f"at {parameter}={_format(entry.get('peak_b_at'))}, min CSI={_format(entry.get('min_csi'))} "
            f"at {parameter}={_format(entry.get('min_csi_at'))}, failed rows {entry['failed']}"
        )
    if config.oracle.enabled and "dev_mean_a" in table.columns:
        worst = table.select([c for c in table.columns if c.startswith("dev_")]).max().row(0, named=True)
        logger.info("Largest oracle deviations: " + ", ".join(f"{k}={_format(v)}" for k, v in worst.items()))

    return EXIT_NUMERICAL if count_fatal_rows(table) else EXIT_OK


def run_check(config: SweepConfig) -> int:
    """Run the invariant suite on the base point."""
    logger.info("=== PHASE 2: INVARIANTS ===")
    result = run_invariant_suite(config.base, config.check_draws, config.check_seed, config.max_order)
    print(result)
    print(f"summary: {result.get_summary()}")
    return EXIT_OK if result.is_valid else EXIT_INVARIANT


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    configure_root_logger(logfile=args.log_file, loglevel=args.log_level)

    logger.info("=" * 60)
    logger.info(f"PHOTON-PHONON CORRELATIONS {lib.__version__}: {args.command}")
    logger.info("=" * 60)

    try:
        config = load_config(args)
    except ConfigError as e:
        logger.error(f"Config error: {e}")
        return EXIT_CONFIG

    try:
        if args.command == "steady":
            code = run_steady(config)
        elif args.command == "sweep":
            code = run_table(config, "sweep.csv")
        elif args.command == "oracle-compare":
            if not config.oracle.enabled:
                config = apply_overrides(config, oracle=OracleMode.REDUCED.value)
            code = run_table(config, "oracle_compare.csv")
        else:
            code = run_check(config)
    except ConfigError as e:
        logger.error(f"Config error: {e}")
        return EXIT_CONFIG
    except CorrelationError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.error(f"Parameters unusable for {args.command}: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.critical(f"Run failed with unhandled exception: {e}")
        raise

    logger.info(f"Finished {args.command} with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
