"""Moment hierarchy: basis, generator assembly and solvers."""
from lib.moments.moment_equations import (
    FIRST_MOMENT_INDICES,
    GeneratorBlocks,
    MomentBasis,
    MomentIndex,
    MomentVector,
    assemble_generator,
    enumerate_basis,
    first_moment_system,
)
from lib.moments.solvers import (
    MomentTrajectory,
    StabilityReport,
    evolve,
    stability_report,
    steady_state,
)
