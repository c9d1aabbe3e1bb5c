"""Sweep configuration, evaluation, output and the invariant suite."""
from lib.sweep.sweep_config import (
    OracleSettings,
    SweepAxis,
    SweepConfig,
    apply_overrides,
    load_sweep_config,
    parse_sweep_config,
)
from lib.sweep.runner import (
    PointSolution,
    count_fatal_rows,
    evaluate_point,
    run_oracle,
    run_sweep,
    solve_point,
    summarize_sweep,
)
from lib.sweep.writer import read_result_csv, render_csv, write_result_csv
from lib.sweep.invariants import run_invariant_suite
