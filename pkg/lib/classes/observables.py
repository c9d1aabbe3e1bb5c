"""
Physical observables computed from moment vectors.

Maps steady or transient moments to mean occupations, zero-delay second-order
auto- and cross-correlations and the Cauchy-Schwarz ratio
CSI = g2_photon * g2_phonon / g2_cross**2. CSI < 1 certifies nonclassical
photon-phonon correlations.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional

from lib.config import TOLERANCES
from lib.exceptions import NonPhysicalMomentsError
from lib.moments.moment_equations import MomentVector

logger = logging.getLogger(__name__)

# Moments that must come out real and non-negative
PHYSICAL_MOMENTS = {
    "n_a": (1, 1, 0, 0),
    "n_b": (0, 0, 1, 1),
    "aa": (2, 2, 0, 0),
    "bb": (0, 0, 2, 2),
    "ab": (1, 1, 1, 1),
}


@dataclass(frozen=True)
class CorrelationSet:
    """
    Occupations and correlation functions at one parameter point.

    A correlation is None (undefined) when one of its denominator means is
    below eps_den, as happens for a mode left in vacuum.
    """

    mean_a: float
    mean_b: float
    g2_photon: Optional[float]
    g2_phonon: Optional[float]
    g2_cross: Optional[float]
    csi: Optional[float]

    @property
    def status(self) -> str:
        if None in (self.g2_photon, self.g2_phonon, self.g2_cross, self.csi):
            return "undefined"
        return "ok"

    @property
    def nonclassical(self) -> Optional[bool]:
        return None if self.csi is None else self.csi < 1.0

    def as_row(self) -> Dict[str, Optional[float]]:
        return asdict(self)


def cauchy_schwarz_ratio(
    g2_photon: Optional[float], g2_phonon: Optional[float], g2_cross: Optional[float]
) -> Optional[float]:
    """CSI from its three factors; None if any factor is undefined or g2_cross vanishes."""
    if g2_photon is None or g2_phonon is None or g2_cross is None:
        return None
    if abs(g2_cross) < TOLERANCES["eps_den"]:
        return None
    return g2_photon * g2_phonon / g2_cross ** 2


def _real_moment(x: MomentVector, index, eps_im: float) -> float:
    value = x[index]
    scale = max(abs(value), 1.0)
    if abs(value.imag) > eps_im * scale or value.real < -eps_im * scale:
        raise NonPhysicalMomentsError(index, value)
    return value.real


def correlations(x: MomentVector, eps_im: Optional[float] = None, eps_den: Optional[float] = None) -> CorrelationSet:
    """
    Evaluate occupations, g2 functions and CSI.

    Args:
        x: Moment vector containing every index up to order 4
        eps_im: Relative tolerance on imaginary parts and negative values
        eps_den: Threshold below which a denominator mean counts as zero

    Returns:
        CorrelationSet

    Raises:
        NonPhysicalMomentsError: If a required moment is complex or negative
    """
    eps_im = TOLERANCES["eps_im"] if eps_im is None else eps_im
    eps_den = TOLERANCES["eps_den"] if eps_den is None else eps_den
    if x.basis.max_order < 4:
        raise ValueError(f"Correlations need moments up to order 4, basis has {x.basis.max_order}")

    values = {name: _real_moment(x, index, eps_im) for name, index in PHYSICAL_MOMENTS.items()}
    n_a, n_b = values["n_a"], values["n_b"]

    photon_defined = n_a >= eps_den
    phonon_defined = n_b >= eps_den
    g2_photon = values["aa"] / n_a ** 2 if photon_defined else None
    g2_phonon = values["bb"] / n_b ** 2 if phonon_defined else None
    g2_cross = values["ab"] / (n_a * n_b) if photon_defined and phonon_defined else None
    return CorrelationSet(
        mean_a=n_a,
        mean_b=n_b,
        g2_photon=g2_photon,
        g2_phonon=g2_phonon,
        g2_cross=g2_cross,
        csi=cauchy_schwarz_ratio(g2_photon, g2_phonon, g2_cross),
    )
