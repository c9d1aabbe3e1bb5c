"""
Steady-state, time evolution and stability analysis of the moment generator.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp

from lib.config import TOLERANCES
from lib.exceptions import SingularBlockError, StepFailureError, UnstableGeneratorError
from lib.moments.moment_equations import GeneratorBlocks, MomentVector

logger = logging.getLogger(__name__)


@dataclass
class StabilityReport:
    """Spectral abscissa (largest real part of the eigenvalues) per order block."""

    abscissa: Dict[int, float]
    eps_stab: float
    leading_eigenvalue: Dict[int, complex] = field(default_factory=dict)

    @property
    def flagged(self) -> List[int]:
        """Orders whose block is not strictly damped."""
        return [order for order, value in self.abscissa.items() if value >= -self.eps_stab]

    @property
    def stable(self) -> bool:
        return not self.flagged

    @property
    def max_abscissa(self) -> float:
        return max(self.abscissa.values()) if self.abscissa else float("-inf")

    @property
    def slowest_rate(self) -> float:
        """Smallest decay rate over all blocks, -max_abscissa."""
        return -self.max_abscissa


@dataclass
class MomentTrajectory:
    """Moment vectors sampled at increasing times."""

    times: np.ndarray
    values: np.ndarray  # shape (len(times), len(basis))
    basis: object

    def at(self, position: int) -> MomentVector:
        return MomentVector(self.basis, self.values[position])

    @property
    def final(self) -> MomentVector:
        return self.at(-1)


def stability_report(gen: GeneratorBlocks, eps_stab: Optional[float] = None) -> StabilityReport:
    """
    Compute the spectral abscissa of every order block n >= 1.

    The order-0 block is the conserved normalization and is left out.

    Args:
        gen: Generator blocks
        eps_stab: Threshold below zero that counts as damped

    Returns:
        StabilityReport; never raises
    """
    eps = TOLERANCES["eps_stab"] if eps_stab is None else eps_stab
    abscissa: Dict[int, float] = {}
    leading: Dict[int, complex] = {}
    for order in range(1, gen.basis.max_order + 1):
        eigenvalues = linalg.eigvals(gen.blocks[order])
        top = eigenvalues[np.argmax(eigenvalues.real)]
        abscissa[order] = float(top.real)
        leading[order] = complex(top)

    report = StabilityReport(abscissa=abscissa, eps_stab=eps, leading_eigenvalue=leading)
    if report.flagged:
        logger.debug(f"Undamped order blocks: {report.flagged}")
    return report


def steady_state(gen: GeneratorBlocks, report: Optional[StabilityReport] = None) -> MomentVector:
    """
    Solve for the stationary moments order by order.

    x_0 = 1 and x_n = -L_n^{-1} S_n x_{n-2}; odd orders have no source and
    come out as zero.

    Args:
        gen: Generator blocks
        report: Precomputed stability report, computed here if omitted

    Returns:
        Stationary MomentVector

    Raises:
        UnstableGeneratorError: If a block is not strictly damped
        SingularBlockError: If a block is numerically rank-deficient
    """
    basis = gen.basis
    report = report if report is not None else stability_report(gen)
    values = np.zeros(len(basis), dtype=complex)
    values[0] = 1.0

    for order in range(1, basis.max_order + 1):
        if order in report.flagged:
            raise UnstableGeneratorError(order, report.leading_eigenvalue[order])

        block = gen.blocks[order]
        condition = np.linalg.cond(block)
        if not np.isfinite(condition) or condition > TOLERANCES["max_condition"]:
            raise SingularBlockError(order, float(condition))

        if order >= 2:
            rhs = -gen.feeds[order] @ values[basis.group_slice(order - 2)]
        else:
            rhs = np.zeros(basis.group_size(order), dtype=complex)
        values[basis.group_slice(order)] = linalg.solve(block, rhs)

    return MomentVector(basis, values)


def evolve(
    gen: GeneratorBlocks,
    init: MomentVector,
    t_final: float,
    tol: Optional[float] = None,
    t_eval: Optional[Sequence[float]] = None,
    method: str = "RK45",
) -> MomentTrajectory:
    """
    Integrate d/dt x = G x from t = 0 to t_final.

    Works for unstable generators as well. The first sample is init exactly.

    Args:
        gen: Generator blocks
        init: Initial moments
        t_final: End time (>= 0)
        tol: Relative tolerance of the step controller
        t_eval: Sample times; defaults to (0, t_final)
        method: Embedded Runge-Kutta pair accepted by solve_ivp

    Returns:
        MomentTrajectory

    Raises:
        StepFailureError: If the step controller gives up
    """
    if t_final < 0:
        raise ValueError(f"t_final must be non-negative, got {t_final}")
    rtol = TOLERANCES["evolve_rtol"] if tol is None else tol
    if t_final == 0:
        return MomentTrajectory(np.array([0.0]), init.values[np.newaxis, :].copy(), init.basis)

    times = np.array([0.0, t_final]) if t_eval is None else np.asarray(t_eval, dtype=float)
    matrix = gen.dense()
    solution = solve_ivp(
        lambda t, y: matrix @ y,
        (0.0, t_final),
        init.values.astype(complex),
        method=method,
        t_eval=times,
        rtol=rtol,
        atol=TOLERANCES["evolve_atol"],
    )
    if solution.status < 0:
        raise StepFailureError(f"moment integration failed: {solution.message}")

    values = solution.y.T.copy()
    if solution.t[0] == 0.0:
        values[0] = init.values
    logger.debug(f"Integrated moments to t={t_final} in {solution.nfev} evaluations")
    return MomentTrajectory(solution.t, values, init.basis)
