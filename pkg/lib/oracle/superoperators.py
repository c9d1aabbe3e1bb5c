"""
Liouville-space generators of the reduced two-mode model and the full
qubit + cavity + phonon model.

Density matrices are vectorized row-major, so A rho B maps to
kron(A, B.T) vec(rho). A generator may live on a block layout: a list of
basis-index groups, where only the diagonal blocks rho[I, I] are kept. The
reduced generator conserves the difference charge n_a - n_b on both sides of
rho, so starting from a state that is block diagonal in that charge it can be
built on the charge blocks alone.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from lib.classes.coefficients import EffectiveCoefficients
from lib.classes.params import ModelParams
from lib.oracle.fock_space import (
    DensityMatrix,
    FockConfig,
    difference_charges,
    mode_operators,
)

logger = logging.getLogger(__name__)

# (name, weight, left operator, right operator) meaning weight * A rho B
Term = Tuple[str, complex, sparse.spmatrix, sparse.spmatrix]


@dataclass
class Superoperator:
    """
    Sparse Liouville-space generator on a block layout.

    Features:
    - Packs and unpacks density matrices to the layout vector
    - Trace weights for normalization constraints
    - Names of the generator terms it was built from
    """

    matrix: sparse.csr_matrix
    layout: List[np.ndarray]
    dims: Tuple[int, ...]
    term_names: List[str] = field(default_factory=list)

    @property
    def hilbert_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def restricted(self) -> bool:
        return len(self.layout) > 1

    def to_vector(self, rho: DensityMatrix) -> np.ndarray:
        """Vector of the kept blocks of rho."""
        if rho.dims != self.dims:
            raise ValueError(f"State dims {rho.dims} do not match generator dims {self.dims}")
        return np.concatenate([rho.data[np.ix_(group, group)].reshape(-1) for group in self.layout])

    def from_vector(self, vector: np.ndarray) -> DensityMatrix:
        """Density matrix with the kept blocks filled from vector."""
        data = np.zeros((self.hilbert_dim, self.hilbert_dim), dtype=complex)
        offset = 0
        for group in self.layout:
            width = len(group)
            data[np.ix_(group, group)] = vector[offset:offset + width * width].reshape(width, width)
            offset += width * width
        return DensityMatrix(data, self.dims)

    def trace_weights(self) -> np.ndarray:
        """Row vector w with w . vec(rho) = Tr(rho)."""
        weights = np.zeros(self.size)
        offset = 0
        for group in self.layout:
            width = len(group)
            weights[offset + np.arange(width) * (width + 1)] = 1.0
            offset += width * width
        return weights

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return self.from_vector(self.matrix @ self.to_vector(rho))

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _charge_shift(op: sparse.spmatrix, charges: np.ndarray) -> Optional[int]:
    """Charge change of an operator, None if it is zero."""
    coo = sparse.coo_matrix(op)
    mask = coo.data != 0
    if not mask.any():
        return None
    shifts = np.unique(charges[coo.row[mask]] - charges[coo.col[mask]])
    if len(shifts) != 1:
        raise ValueError("Operator mixes difference-charge sectors")
    return int(shifts[0])


def build_superoperator(
    terms: Sequence[Term], dims: Tuple[int, ...], charges: Optional[np.ndarray] = None
) -> Superoperator:
    """
    Assemble sum_t w_t A_t rho B_t on a block layout.

    Args:
        terms: Generator terms
        dims: Tensor-factor dimensions of the Hilbert space
        charges: Conserved charge of every basis state; None keeps the full space

    Returns:
        Superoperator
    """
    dim = int(np.prod(dims))
    names = [name for name, *_ in terms]

    if charges is None:
        matrix = sparse.csr_matrix((dim * dim, dim * dim), dtype=complex)
        for _, weight, left, right in terms:
            if weight == 0:
                continue
            matrix = matrix + weight * sparse.kron(left, right.T.tocsr(), format="csr")
        return Superoperator(matrix.tocsr(), [np.arange(dim)], dims, names)

    values = np.unique(charges)
    layout = [np.flatnonzero(charges == value) for value in values]
    position = {int(value): pos for pos, value in enumerate(values)}
    blocks: Dict[Tuple[int, int], sparse.spmatrix] = defaultdict(lambda: None)

    for _, weight, left, right in terms:
        shift = _charge_shift(left, charges)
        if weight == 0 or shift is None:
            continue
        left, right = sparse.csr_matrix(left), sparse.csr_matrix(right)
        for out_pos, out_value in enumerate(values):
            in_pos = position.get(int(out_value) - shift)
            if in_pos is None:
                continue
            rows, cols = layout[out_pos], layout[in_pos]
            a_block = left[rows][:, cols]
            b_block = right[cols][:, rows]
            if a_block.nnz == 0 or b_block.nnz == 0:
                continue
            contribution = weight * sparse.kron(a_block, b_block.T.tocsr(), format="csr")
            key = (out_pos, in_pos)
            blocks[key] = contribution if blocks[key] is None else blocks[key] + contribution

    grid = [[blocks.get((r, s)) for s in range(len(layout))] for r in range(len(layout))]
    for r, group in enumerate(layout):
        if grid[r][r] is None:
            width = len(group) ** 2
            grid[r][r] = sparse.csr_matrix((width, width), dtype=complex)
    matrix = sparse.bmat(grid, format="csr", dtype=complex)
    return Superoperator(matrix, layout, dims, names)


def adjoint_bracket_terms(name: str, x: sparse.spmatrix, y: sparse.spmatrix, side: str) -> List[Term]:
    """
    Schrodinger-picture terms of one Heisenberg bracket.

    <[Q, X] Y> becomes X Y rho - Y rho X (side "left") and <Y [Q, X]>
    becomes X rho Y - rho Y X (side "right").

    Args:
        name: Label for the terms
        x: Operator inside the commutator
        y: Operator multiplying the commutator
        side: "left" for [Q, X] Y, "right" for Y [Q, X]

    Returns:
        Two terms
    """
    identity = sparse.identity(x.shape[0], format="csr", dtype=complex)
    if side == "left":
        return [(f"{name}:XY.", 1.0, x @ y, identity), (f"{name}:Y.X", -1.0, y, x)]
    if side == "right":
        return [(f"{name}:X.Y", 1.0, x, y), (f"{name}:.YX", -1.0, identity, y @ x)]
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _dissipator(name: str, rate: float, op: sparse.spmatrix) -> List[Term]:
    """rate * (O rho O^dag - 1/2 O^dag O rho - 1/2 rho O^dag O)."""
    identity = sparse.identity(op.shape[0], format="csr", dtype=complex)
    dagger = op.conj().T.tocsr()
    number = dagger @ op
    return [
        (f"D[{name}]:jump", rate, op, dagger),
        (f"D[{name}]:left", -0.5 * rate, number, identity),
        (f"D[{name}]:right", -0.5 * rate, identity, number),
    ]


def reduced_terms(c: EffectiveCoefficients, delta1: float, omega_m: float, n_a: int, n_b: int) -> List[Term]:
    """Term list of the reduced two-mode generator."""
    a, b = mode_operators(n_a, n_b)
    ad, bd = a.conj().T.tocsr(), b.conj().T.tocsr()
    conj = np.conj

    brackets = [
        ("a", a, -conj(c.a1) * ad + conj(c.d2) * b, conj(c.b1) * ad - conj(c.c2) * b),
        ("a+", ad, -c.b1 * a + c.c2 * bd, c.a1 * a - c.d2 * bd),
        ("b", b, conj(c.d1) * a - conj(c.a2) * bd, conj(c.b2) * bd - conj(c.c1) * a),
        ("b+", bd, c.c1 * ad - c.b2 * b, c.a2 * b - c.d1 * ad),
    ]
    terms: List[Term] = []
    for name, x, y_left, y_right in brackets:
        terms.extend(adjoint_bracket_terms(f"[Q,{name}]Y", x, y_left.tocsr(), "left"))
        terms.extend(adjoint_bracket_terms(f"Y[Q,{name}]", x, y_right.tocsr(), "right"))

    identity = sparse.identity(n_a * n_b, format="csr", dtype=complex)
    number = (ad @ a + bd @ b).tocsr()
    detuning = delta1 - omega_m
    terms.append(("detuning:.N", -0.5j * detuning, identity, number))
    terms.append(("detuning:N.", 0.5j * detuning, number, identity))
    return terms


def reduced_generator(
    c: EffectiveCoefficients, delta1: float, omega_m: float, cfg: FockConfig, restrict: bool = True
) -> Superoperator:
    """
    Generator of the reduced photon-phonon master equation.

    Args:
        c: Effective coefficients
        delta1: Laser-cavity detuning
        omega_m: Phonon frequency
        cfg: Cutoffs
        restrict: Build only the difference-charge blocks

    Returns:
        Superoperator over dims (n_a, n_b)
    """
    terms = reduced_terms(c, delta1, omega_m, cfg.n_a, cfg.n_b)
    charges = difference_charges(cfg.n_a, cfg.n_b) if restrict else None
    generator = build_superoperator(terms, (cfg.n_a, cfg.n_b), charges)
    logger.debug(
        f"Reduced generator ({cfg.n_a}, {cfg.n_b}): size {generator.size}, "
        f"{len(generator.layout)} blocks, {generator.matrix.nnz} nonzeros"
    )
    return generator


def qubit_operators() -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Lowering operator S- and S_z = sigma_z / 2 in the (|g>, |e>) basis."""
    lowering = sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    s_z = sparse.csr_matrix(np.diag([-0.5, 0.5]).astype(complex))
    return lowering, s_z


def full_terms(p: ModelParams, n_a: int, n_b: int) -> List[Term]:
    """
    Term list of the bare qubit + cavity + phonon Lindblad generator.

    Laser-frame Hamiltonian
        H = delta S_z - delta1 a^dag a + omega_m b^dag b + g (a^dag S- + a S+)
            + omega_rabi (S+ + S-) + lam S_z (b^dag + b)
    with dissipators 2 gamma D[S-], 2 gamma_c D[S_z], 2 kappa_a D[a],
    2 kappa_b (1 + nbar) D[b] and 2 kappa_b nbar D[b^dag].
    """
    lowering, s_z = qubit_operators()
    i_q = sparse.identity(2, format="csr", dtype=complex)
    i_modes = sparse.identity(n_a * n_b, format="csr", dtype=complex)
    a_modes, b_modes = mode_operators(n_a, n_b)

    sm = sparse.kron(lowering, i_modes, format="csr")
    sz = sparse.kron(s_z, i_modes, format="csr")
    a = sparse.kron(i_q, a_modes, format="csr")
    b = sparse.kron(i_q, b_modes, format="csr")
    sp, ad, bd = sm.conj().T.tocsr(), a.conj().T.tocsr(), b.conj().T.tocsr()

    hamiltonian = (
        p.delta * sz
        - p.delta1 * (ad @ a)
        + p.omega_m * (bd @ b)
        + p.g * (ad @ sm + a @ sp)
        + p.omega_rabi * (sp + sm)
        + p.lam * (sz @ (bd + b))
    ).tocsr()
    identity = sparse.identity(hamiltonian.shape[0], format="csr", dtype=complex)

    terms: List[Term] = [
        ("H:left", -1j, hamiltonian, identity),
        ("H:right", 1j, identity, hamiltonian),
    ]
    terms.extend(_dissipator("S-", 2.0 * p.gamma, sm))
    terms.extend(_dissipator("Sz", 2.0 * p.gamma_c, sz))
    terms.extend(_dissipator("a", 2.0 * p.kappa_a, a))
    terms.extend(_dissipator("b", 2.0 * p.kappa_b * (1.0 + p.nbar), b))
    terms.extend(_dissipator("b+", 2.0 * p.kappa_b * p.nbar, bd))
    return terms


def full_generator(p: ModelParams, cfg: FockConfig) -> Superoperator:
    """
    Lindblad generator of the full model in the laser frame.

    Args:
        p: Model parameters
        cfg: Cutoffs

    Returns:
        Superoperator over dims (2, n_a, n_b)
    """
    generator = build_superoperator(full_terms(p, cfg.n_a, cfg.n_b), (2, cfg.n_a, cfg.n_b))
    logger.debug(f"Full generator ({cfg.n_a}, {cfg.n_b}): size {generator.size}, {generator.matrix.nnz} nonzeros")
    return generator
