"""
Normally-ordered moment basis and the linear generator acting on it.

A moment is <a^dag^j a^k b^dag^l b^m>, labelled by (j, k, l, m). Its time
derivative couples it to moments of the same order (cross-mode exchange
terms) and of order n - 2 (pair creation and thermal feeding terms), so the
generator is block lower-triangular with one square block L_n per order and
one rectangular feed block S_n from order n - 2.

Every term conserves the difference charge (j - k) - (l - m).
"""

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Mapping, NamedTuple, Tuple

import numpy as np

from lib.classes.coefficients import EffectiveCoefficients

logger = logging.getLogger(__name__)

MAX_SUPPORTED_ORDER = 8


class MomentIndex(NamedTuple):
    """Exponents (j, k, l, m) of <a^dag^j a^k b^dag^l b^m>."""

    j: int
    k: int
    l: int
    m: int

    @property
    def order(self) -> int:
        return self.j + self.k + self.l + self.m

    @property
    def conjugate(self) -> "MomentIndex":
        return MomentIndex(self.k, self.j, self.m, self.l)

    @property
    def rotation_charge(self) -> int:
        return (self.j - self.k) + (self.l - self.m)

    @property
    def difference_charge(self) -> int:
        return (self.j - self.k) - (self.l - self.m)


@dataclass(frozen=True)
class MomentBasis:
    """
    Ordered moment indices up to max_order.

    Indices are grouped by total order and sorted lexicographically inside
    each group. Group n holds C(n + 3, 3) indices.
    """

    max_order: int
    indices: Tuple[MomentIndex, ...]
    offsets: Tuple[int, ...]
    lookup: Dict[MomentIndex, int] = field(compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.indices)

    def position(self, index) -> int:
        """Position of an index (any 4-tuple) in the basis."""
        return self.lookup[MomentIndex(*index)]

    def __contains__(self, index) -> bool:
        return MomentIndex(*index) in self.lookup

    def group(self, order: int) -> Tuple[MomentIndex, ...]:
        """Indices of one order."""
        return self.indices[self.offsets[order]:self.offsets[order + 1]]

    def group_slice(self, order: int) -> slice:
        return slice(self.offsets[order], self.offsets[order + 1])

    def group_size(self, order: int) -> int:
        return self.offsets[order + 1] - self.offsets[order]

    def conjugate_permutation(self) -> np.ndarray:
        """perm[i] is the position of the conjugate of index i."""
        return np.array([self.lookup[idx.conjugate] for idx in self.indices])


def enumerate_basis(max_order: int) -> MomentBasis:
    """
    Enumerate all moment indices with j + k + l + m <= max_order.

    Args:
        max_order: Highest total order, 0..8

    Returns:
        MomentBasis with deterministic ordering
    """
    if max_order < 0:
        raise ValueError(f"max_order must be non-negative, got {max_order}")
    if max_order > MAX_SUPPORTED_ORDER:
        raise ValueError(f"max_order above {MAX_SUPPORTED_ORDER} is not supported, got {max_order}")

    indices: List[MomentIndex] = []
    offsets = [0]
    for order in range(max_order + 1):
        group = sorted(
            MomentIndex(j, k, l, order - j - k - l)
            for j in range(order + 1)
            for k in range(order + 1 - j)
            for l in range(order + 1 - j - k)
        )
        assert len(group) == comb(order + 3, 3)
        indices.extend(group)
        offsets.append(len(indices))

    lookup = {idx: pos for pos, idx in enumerate(indices)}
    return MomentBasis(max_order=max_order, indices=tuple(indices), offsets=tuple(offsets), lookup=lookup)


@dataclass
class MomentVector:
    """Complex moment values aligned with a basis; the (0,0,0,0) entry is 1."""

    basis: MomentBasis
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (len(self.basis),):
            raise ValueError(
                f"Expected {len(self.basis)} moment values, got shape {self.values.shape}"
            )

    @classmethod
    def from_mapping(cls, basis: MomentBasis, mapping: Mapping[Tuple[int, int, int, int], complex]) -> "MomentVector":
        """Vector with the given entries, 1 at the identity and 0 elsewhere."""
        values = np.zeros(len(basis), dtype=complex)
        values[0] = 1.0
        for index, value in mapping.items():
            values[basis.position(index)] = value
        return cls(basis, values)

    def value(self, j: int, k: int, l: int, m: int) -> complex:
        return complex(self.values[self.basis.position((j, k, l, m))])

    def __getitem__(self, index) -> complex:
        return complex(self.values[self.basis.position(index)])

    def conjugation_error(self) -> float:
        """Largest |x(conj index) - conj(x(index))| over the basis."""
        perm = self.basis.conjugate_permutation()
        return float(np.max(np.abs(self.values[perm] - np.conj(self.values))))

    def order_values(self, order: int) -> np.ndarray:
        return self.values[self.basis.group_slice(order)]


@dataclass
class GeneratorBlocks:
    """
    Block lower-triangular moment generator.

    blocks[n] is the square same-order block L_n and feeds[n] the rectangular
    block S_n mapping order n - 2 into order n (zero columns for n < 2).
    """

    basis: MomentBasis
    blocks: Dict[int, np.ndarray]
    feeds: Dict[int, np.ndarray]

    def dense(self) -> np.ndarray:
        """Assemble the full generator matrix."""
        size = len(self.basis)
        matrix = np.zeros((size, size), dtype=complex)
        for order in range(self.basis.max_order + 1):
            rows = self.basis.group_slice(order)
            matrix[rows, rows] = self.blocks[order]
            if order >= 2:
                matrix[rows, self.basis.group_slice(order - 2)] = self.feeds[order]
        return matrix

    def apply(self, vector: MomentVector) -> np.ndarray:
        """Time derivative of the moments, generator @ values."""
        return self.dense() @ vector.values


def _diagonal(c: EffectiveCoefficients, detuning: float, idx: MomentIndex) -> complex:
    j, k, l, m = idx
    return (
        (c.a1 - c.b1).conjugate() * j
        + (c.a1 - c.b1) * k
        + (c.a2 - c.b2).conjugate() * l
        + (c.a2 - c.b2) * m
        - 0.5j * detuning * (j - k + l - m)
    )


def _row_terms(c: EffectiveCoefficients, idx: MomentIndex):
    """(target, weight) pairs of one row, excluding the diagonal."""
    j, k, l, m = idx
    same_order = (
        ((j + 1, k, l, m - 1), (c.c1 - c.d1) * m),
        ((j - 1, k, l, m + 1), (c.c2.conjugate() - c.d2.conjugate()) * j),
        ((j, k + 1, l - 1, m), (c.c1.conjugate() - c.d1.conjugate()) * l),
        ((j, k - 1, l + 1, m), (c.c2 - c.d2) * k),
    )
    lower = (
        ((j - 1, k, l - 1, m), (c.c1.conjugate() + c.c2.conjugate()) * j * l),
        ((j - 1, k - 1, l, m), (c.a1 + c.a1.conjugate()) * j * k),
        ((j, k - 1, l, m - 1), (c.c1 + c.c2) * k * m),
        ((j, k, l - 1, m - 1), (c.a2 + c.a2.conjugate()) * l * m),
    )
    return same_order, lower


def assemble_generator(
    c: EffectiveCoefficients, delta1: float, omega_m: float, basis: MomentBasis
) -> GeneratorBlocks:
    """
    Assemble the per-order blocks of the moment generator.

    Each row carries the diagonal rate, four same-order exchange terms and
    four order-lowering terms. Terms whose target has a negative exponent
    carry a zero integer prefactor and are skipped.

    Args:
        c: Effective coefficients
        delta1: Laser-cavity detuning
        omega_m: Phonon frequency
        basis: Moment basis

    Returns:
        GeneratorBlocks
    """
    detuning = delta1 - omega_m
    blocks: Dict[int, np.ndarray] = {}
    feeds: Dict[int, np.ndarray] = {}

    for order in range(basis.max_order + 1):
        size = basis.group_size(order)
        lower_size = basis.group_size(order - 2) if order >= 2 else 0
        lower_offset = basis.offsets[order - 2] if order >= 2 else 0
        block = np.zeros((size, size), dtype=complex)
        feed = np.zeros((size, lower_size), dtype=complex)
        offset = basis.offsets[order]

        for row, idx in enumerate(basis.group(order)):
            block[row, row] = _diagonal(c, detuning, idx)
            same_order, lower = _row_terms(c, idx)
            for target, weight in same_order:
                if min(target) < 0:
                    continue
                block[row, basis.lookup[target] - offset] += weight
            for target, weight in lower:
                if min(target) < 0:
                    continue
                feed[row, basis.lookup[target] - lower_offset] += weight

        blocks[order] = block
        feeds[order] = feed

    logger.debug(f"Assembled moment generator up to order {basis.max_order} ({len(basis)} moments)")
    return GeneratorBlocks(basis=basis, blocks=blocks, feeds=feeds)


# Index order of the hand-written first-moment system
FIRST_MOMENT_INDICES = (
    MomentIndex(1, 1, 0, 0),
    MomentIndex(0, 0, 1, 1),
    MomentIndex(0, 1, 0, 1),
    MomentIndex(1, 0, 1, 0),
)


def first_moment_system(c: EffectiveCoefficients, delta1: float, omega_m: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Hand-written equations for <a^dag a>, <b^dag b>, <ab> and <a^dag b^dag>.

    d/dt x = M x + s with x ordered as FIRST_MOMENT_INDICES.

    Args:
        c: Effective coefficients
        delta1: Laser-cavity detuning
        omega_m: Phonon frequency

    Returns:
        Tuple (M, s)
    """
    detuning = delta1 - omega_m
    photon = c.a1 - c.b1
    phonon = c.a2 - c.b2
    c1_d1 = c.c1 - c.d1
    c2_d2 = c.c2 - c.d2
    c1_d1_conj = c.c1.conjugate() - c.d1.conjugate()
    c2_d2_conj = c.c2.conjugate() - c.d2.conjugate()

    matrix = np.array(
        [
            [photon.conjugate() + photon, 0, c2_d2_conj, c2_d2],
            [0, phonon.conjugate() + phonon, c1_d1_conj, c1_d1],
            [c1_d1, c2_d2, photon + phonon + 1j * detuning, 0],
            [c1_d1_conj, c2_d2_conj, 0, photon.conjugate() + phonon.conjugate() - 1j * detuning],
        ],
        dtype=complex,
    )
    source = np.array(
        [
            c.a1 + c.a1.conjugate(),
            c.a2 + c.a2.conjugate(),
            c.c1 + c.c2,
            c.c1.conjugate() + c.c2.conjugate(),
        ],
        dtype=complex,
    )
    return matrix, source
