"""Truncated Fock-space master-equation oracles."""
from lib.oracle.fock_space import (
    DensityMatrix,
    FockConfig,
    FockMoments,
    fock_moments,
    initial_state,
    reduce_to_modes,
    thermal_populations,
)
from lib.oracle.superoperators import (
    Superoperator,
    adjoint_bracket_terms,
    full_generator,
    reduced_generator,
)
from lib.oracle.steady import (
    FullOracle,
    OracleResult,
    ReducedOracle,
    SteadyStateResult,
    evolve_to_steady,
    propagate,
    solve_with_cutoff_doubling,
)
