"""
Truncated Fock spaces, density matrices and their normally-ordered moments.

Basis ordering: photon (slow index) then phonon for the reduced model, and
qubit then photon then phonon for the full model, with qubit states ordered
(|g>, |e>). Mode cutoffs n keep the Fock states 0..n-1.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Tuple

import numpy as np
from scipy import sparse

from lib.config import ORACLE_CONFIG
from lib.moments.moment_equations import MomentBasis, MomentVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FockConfig:
    """Mode cutoffs and the cutoff-doubling convergence rule."""

    n_a: int = ORACLE_CONFIG["n_a"]
    n_b: int = ORACLE_CONFIG["n_b"]
    tolerance: float = ORACLE_CONFIG["cutoff_tolerance"]
    max_cutoff: int = ORACLE_CONFIG["max_cutoff"]

    def __post_init__(self):
        if self.n_a < 2 or self.n_b < 2:
            raise ValueError(f"Fock cutoffs must be at least 2, got ({self.n_a}, {self.n_b})")
        if self.max_cutoff < max(self.n_a, self.n_b):
            raise ValueError(
                f"max_cutoff {self.max_cutoff} is below the starting cutoffs ({self.n_a}, {self.n_b})"
            )
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")

    @property
    def reduced_dim(self) -> int:
        return self.n_a * self.n_b

    @property
    def full_dim(self) -> int:
        return 2 * self.n_a * self.n_b

    def doubled(self) -> "FockConfig":
        """Both cutoffs doubled, capped at max_cutoff."""
        return replace(
            self,
            n_a=min(2 * self.n_a, self.max_cutoff),
            n_b=min(2 * self.n_b, self.max_cutoff),
        )


@dataclass
class DensityMatrix:
    """Dense density matrix with its tensor-factor dimensions."""

    data: np.ndarray
    dims: Tuple[int, ...]

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        size = int(np.prod(self.dims))
        if self.data.shape != (size, size):
            raise ValueError(f"Density matrix shape {self.data.shape} does not match dims {self.dims}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part."""
        hermitian = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(hermitian)[0])

    def populations(self) -> np.ndarray:
        return self.data.diagonal().real.copy()


@dataclass
class FockMoments:
    """Moments of a truncated state plus the cutoff-contamination diagnostic."""

    moments: MomentVector
    top_occupation: Dict[str, float] = field(default_factory=dict)
    threshold: float = ORACLE_CONFIG["contamination_threshold"]

    @property
    def contaminated(self) -> bool:
        return any(value > self.threshold for value in self.top_occupation.values())


def destroy(n: int) -> sparse.csr_matrix:
    """Truncated annihilation operator on Fock states 0..n-1."""
    return sparse.diags(np.sqrt(np.arange(1, n, dtype=float)), offsets=1, shape=(n, n), format="csr", dtype=complex)


def mode_operators(n_a: int, n_b: int) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Annihilation operators a and b on the photon x phonon space."""
    a = sparse.kron(destroy(n_a), sparse.identity(n_b, format="csr"), format="csr")
    b = sparse.kron(sparse.identity(n_a, format="csr"), destroy(n_b), format="csr")
    return a, b


def difference_charges(n_a: int, n_b: int) -> np.ndarray:
    """n_a - n_b of every two-mode basis state."""
    i_a, i_b = np.divmod(np.arange(n_a * n_b), n_b)
    return i_a - i_b


def thermal_populations(nbar: float, n: int) -> np.ndarray:
    """Geometric Fock populations with mean nbar, renormalized on 0..n-1."""
    if nbar < 0:
        raise ValueError(f"nbar must be non-negative, got {nbar}")
    if nbar == 0:
        populations = np.zeros(n)
        populations[0] = 1.0
        return populations
    ratio = nbar / (1.0 + nbar)
    populations = ratio ** np.arange(n, dtype=float)
    return populations / populations.sum()


def initial_state(cfg: FockConfig, nbar: float, with_qubit: bool = False) -> DensityMatrix:
    """
    Photon vacuum times thermal phonons (times qubit ground state).

    Args:
        cfg: Cutoffs
        nbar: Thermal phonon occupation
        with_qubit: Prepend the qubit factor for the full model

    Returns:
        Diagonal DensityMatrix
    """
    photon = np.zeros(cfg.n_a)
    photon[0] = 1.0
    diagonal = np.kron(photon, thermal_populations(nbar, cfg.n_b))
    dims: Tuple[int, ...] = (cfg.n_a, cfg.n_b)
    if with_qubit:
        diagonal = np.kron(np.array([1.0, 0.0]), diagonal)
        dims = (2,) + dims
    return DensityMatrix(np.diag(diagonal).astype(complex), dims)


def reduce_to_modes(rho: DensityMatrix) -> DensityMatrix:
    """Partial trace over the qubit of a full-model state."""
    if len(rho.dims) == 2:
        return rho
    qubit, n_a, n_b = rho.dims
    modes = n_a * n_b
    tensor = rho.data.reshape(qubit, modes, qubit, modes)
    return DensityMatrix(np.einsum("imin->mn", tensor), (n_a, n_b))


def _normal_ordered(n: int, creation: int, annihilation: int) -> np.ndarray:
    lower = destroy(n).toarray()
    raise_ = lower.conj().T
    return np.linalg.matrix_power(raise_, creation) @ np.linalg.matrix_power(lower, annihilation)


def fock_moments(rho: DensityMatrix, basis: MomentBasis) -> FockMoments:
    """
    Normally-ordered moments Tr(rho a^dag^j a^k b^dag^l b^m) over the truncated space.

    Full-model states are reduced to the two modes first. The occupation of
    the two highest Fock levels of each mode is reported; above the
    threshold the cutoff is too small for the state.

    Args:
        rho: Trace-normalized density matrix
        basis: Moment basis

    Returns:
        FockMoments
    """
    modes = reduce_to_modes(rho)
    n_a, n_b = modes.dims
    tensor = modes.data.reshape(n_a, n_b, n_a, n_b)
    order = basis.max_order
    photon_ops = {(j, k): _normal_ordered(n_a, j, k) for j in range(order + 1) for k in range(order + 1 - j)}
    phonon_ops = {(l, m): _normal_ordered(n_b, l, m) for l in range(order + 1) for m in range(order + 1 - l)}

    values = np.empty(len(basis), dtype=complex)
    for position, (j, k, l, m) in enumerate(basis.indices):
        values[position] = np.einsum(
            "ipjq,ji,qp->", tensor, photon_ops[(j, k)], phonon_ops[(l, m)], optimize=True
        )

    photon_pop = np.einsum("ipip->i", tensor).real
    phonon_pop = np.einsum("ipip->p", tensor).real
    top = {
        "photon": float(photon_pop[-2:].sum()),
        "phonon": float(phonon_pop[-2:].sum()),
    }
    result = FockMoments(MomentVector(basis, values), top)
    if result.contaminated:
        logger.warning(
            f"Cutoff contamination at ({n_a}, {n_b}): top-level occupation "
            f"photon={top['photon']:.2e}, phonon={top['phonon']:.2e}"
        )
    return result
