"""
Density-matrix steady states, transients and the cutoff-doubling rule.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply, spsolve

from lib.classes.coefficients import EffectiveCoefficients
from lib.classes.params import ModelParams
from lib.config import ORACLE_CONFIG, SteadyMethod
from lib.exceptions import NoConvergenceError
from lib.moments.moment_equations import MomentBasis, MomentVector
from lib.oracle.fock_space import (
    DensityMatrix,
    FockConfig,
    FockMoments,
    difference_charges,
    fock_moments,
    initial_state,
)
from lib.oracle.superoperators import Superoperator, full_generator, reduced_generator

logger = logging.getLogger(__name__)


@dataclass
class SteadyStateResult:
    """Stationary state plus the diagnostics of how it was reached."""

    rho: DensityMatrix
    residual: float
    threshold: float
    method: str
    elapsed_time: Optional[float] = None

    @property
    def trace_error(self) -> float:
        return abs(self.rho.trace() - 1.0)

    @property
    def min_eigenvalue(self) -> float:
        return self.rho.min_eigenvalue()


def _residual_scale(L: Superoperator, vector: np.ndarray) -> float:
    rate = float(np.max(np.abs(L.matrix.diagonal()))) if L.size else 0.0
    return max(float(np.linalg.norm(L.matrix @ vector)), rate * float(np.linalg.norm(vector)))


def _solve_direct(L: Superoperator) -> np.ndarray:
    weights = L.trace_weights()
    pivot = int(np.flatnonzero(weights)[0])
    keep = np.ones(L.size)
    keep[pivot] = 0.0
    columns = np.flatnonzero(weights)
    trace_row = sparse.csr_matrix(
        (weights[columns], (np.full(len(columns), pivot), columns)), shape=L.matrix.shape
    )
    system = sparse.diags(keep) @ L.matrix + trace_row
    rhs = np.zeros(L.size, dtype=complex)
    rhs[pivot] = 1.0
    return spsolve(system.tocsc(), rhs)


def _solve_integrate(L: Superoperator, vector: np.ndarray, threshold: float) -> Tuple[np.ndarray, float]:
    jacobian = L.matrix.tocsc()
    chunk = ORACLE_CONFIG["integrate_first_chunk"]
    elapsed = 0.0
    residual = float(np.linalg.norm(L.matrix @ vector))
    stalls = 0

    while residual > threshold:
        if elapsed > ORACLE_CONFIG["integrate_max_time"]:
            raise NoConvergenceError(residual, f"after t={elapsed:.3g}")
        solution = solve_ivp(
            lambda t, y: L.matrix @ y,
            (elapsed, elapsed + chunk),
            vector,
            method="BDF",
            jac=jacobian,
            rtol=1e-8,
            atol=1e-12,
        )
        if solution.status < 0:
            raise NoConvergenceError(residual, solution.message)
        vector = solution.y[:, -1]
        elapsed += chunk
        chunk *= 2.0

        previous, residual = residual, float(np.linalg.norm(L.matrix @ vector))
        stalls = stalls + 1 if residual > ORACLE_CONFIG["plateau_factor"] * previous else 0
        logger.debug(f"Integrated to t={elapsed:.4g}, residual {residual:.3e}")
        if stalls >= 3:
            raise NoConvergenceError(residual, f"residual plateau at t={elapsed:.3g}")
    return vector, elapsed


def evolve_to_steady(
    L: Superoperator,
    rho0: DensityMatrix,
    tol: float = ORACLE_CONFIG["steady_tolerance"],
    method: str = SteadyMethod.DIRECT.value,
) -> SteadyStateResult:
    """
    Find the stationary state of d/dt rho = L rho.

    Convergence means ||L rho|| <= tol * scale with
    scale = max(||L rho0||, max|diag L| * ||rho0||). A stationary rho0 is
    returned unchanged.

    Args:
        L: Trace-annihilating generator
        rho0: Initial state (also fixes the trace for "integrate")
        tol: Relative residual tolerance
        method: "direct" (sparse LU with a trace row) or "integrate" (BDF)

    Returns:
        SteadyStateResult

    Raises:
        NoConvergenceError: If the residual criterion is not met
    """
    start = L.to_vector(rho0).astype(complex)
    threshold = tol * _residual_scale(L, start)
    initial_residual = float(np.linalg.norm(L.matrix @ start))
    if initial_residual <= threshold:
        return SteadyStateResult(rho0, initial_residual, threshold, "initial")

    elapsed = None
    if method == SteadyMethod.DIRECT.value:
        vector = _solve_direct(L)
    elif method == SteadyMethod.INTEGRATE.value:
        vector, elapsed = _solve_integrate(L, start, threshold)
    else:
        raise ValueError(f"Unknown steady-state method {method!r}")

    residual = float(np.linalg.norm(L.matrix @ vector))
    if not np.isfinite(residual) or residual > threshold:
        raise NoConvergenceError(residual, f"threshold {threshold:.3e}, method {method}")

    result = SteadyStateResult(L.from_vector(vector), residual, threshold, method, elapsed)
    logger.debug(
        f"Steady state ({method}): residual {residual:.2e}, trace error {result.trace_error:.2e}"
    )
    return result


def propagate(L: Superoperator, rho0: DensityMatrix, times: Sequence[float]) -> List[DensityMatrix]:
    """
    States exp(L t) rho0 at increasing times.

    Args:
        L: Generator
        rho0: Initial state
        times: Non-decreasing sample times starting at or after 0

    Returns:
        One DensityMatrix per time
    """
    vector = L.to_vector(rho0).astype(complex)
    states = []
    previous = 0.0
    for time in times:
        if time < previous:
            raise ValueError("times must be non-decreasing and non-negative")
        if time > previous:
            vector = expm_multiply(L.matrix * (time - previous), vector)
        states.append(L.from_vector(vector))
        previous = time
    return states


class OracleModel:
    """A Fock-space model that can be rebuilt at any cutoff."""

    with_qubit = False

    def build(self, cfg: FockConfig) -> Superoperator:
        raise NotImplementedError

    def vector_size(self, cfg: FockConfig) -> int:
        raise NotImplementedError


class ReducedOracle(OracleModel):
    """Reduced two-mode master equation on the difference-charge blocks."""

    def __init__(self, coefficients: EffectiveCoefficients, delta1: float, omega_m: float):
        self.coefficients = coefficients
        self.delta1 = delta1
        self.omega_m = omega_m

    def build(self, cfg: FockConfig) -> Superoperator:
        return reduced_generator(self.coefficients, self.delta1, self.omega_m, cfg)

    def vector_size(self, cfg: FockConfig) -> int:
        _, counts = np.unique(difference_charges(cfg.n_a, cfg.n_b), return_counts=True)
        return int(np.sum(counts ** 2))


class FullOracle(OracleModel):
    """Bare qubit + cavity + phonon Lindblad model."""

    with_qubit = True

    def __init__(self, params: ModelParams):
        self.params = params

    def build(self, cfg: FockConfig) -> Superoperator:
        return full_generator(self.params, cfg)

    def vector_size(self, cfg: FockConfig) -> int:
        return cfg.full_dim ** 2


@dataclass
class OracleResult:
    """Cutoff-converged (or best available) oracle moments."""

    moments: MomentVector
    cfg: FockConfig
    converged: bool
    steady: SteadyStateResult
    fock: FockMoments
    history: List[Tuple[int, int, float]] = field(default_factory=list)

    @property
    def last_change(self) -> Optional[float]:
        return self.history[-1][2] if self.history else None


def solve_with_cutoff_doubling(
    model: OracleModel,
    cfg: FockConfig,
    nbar: float,
    basis: MomentBasis,
    method: str = SteadyMethod.DIRECT.value,
    steady_tol: float = ORACLE_CONFIG["steady_tolerance"],
    max_vector_size: int = ORACLE_CONFIG["max_vector_size"],
) -> OracleResult:
    """
    Solve at increasing cutoffs until the moments stop moving.

    Both cutoffs are doubled after every solve; the run is accepted once the
    relative change of the moment vector drops below cfg.tolerance and the
    top Fock levels are empty. A capped cutoff stops changing, so the
    contamination check is what catches it being too small. When
    max_cutoff or the vector-size budget stops the doubling first, the last
    result is returned flagged as unconverged.

    Args:
        model: Oracle model to rebuild
        cfg: Starting cutoffs and tolerance
        nbar: Thermal phonon occupation of the initial state
        basis: Moment basis for the comparison
        method: Steady-state method
        steady_tol: Residual tolerance of each steady solve
        max_vector_size: Largest Liouville vector to build

    Returns:
        OracleResult
    """
    current = cfg
    previous: Optional[FockMoments] = None
    history: List[Tuple[int, int, float]] = []

    while True:
        generator = model.build(current)
        steady = evolve_to_steady(generator, initial_state(current, nbar, model.with_qubit), steady_tol, method)
        moments = fock_moments(steady.rho, basis)

        if previous is not None:
            new, old = moments.moments.values, previous.moments.values
            change = float(np.linalg.norm(new - old) / max(np.linalg.norm(new), 1e-300))
            history.append((current.n_a, current.n_b, change))
            logger.debug(f"Cutoff ({current.n_a}, {current.n_b}): relative change {change:.3e}")
            if change < cfg.tolerance and not moments.contaminated:
                return OracleResult(moments.moments, current, True, steady, moments, history)

        following = current.doubled()
        if following == current or model.vector_size(following) > max_vector_size:
            logger.warning(
                f"Oracle cutoff doubling stopped at ({current.n_a}, {current.n_b}) "
                f"without meeting tolerance {cfg.tolerance:g}"
            )
            return OracleResult(moments.moments, current, False, steady, moments, history)
        previous, current = moments, following
