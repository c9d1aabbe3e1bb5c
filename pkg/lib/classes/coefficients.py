"""
Effective coefficients of the reduced photon-phonon dynamics.

After the qubit is eliminated, the cavity mode a and the phonon mode b
evolve under a generator parameterized by eight complex rates
(a1, b1, c1, d1, a2, b2, c2, d2). The A and C families are evaluated as
closed-form expressions of the dressed quantities. B and D follow from A and
C by exchanging the dressed populations P+ and P-, plus the cavity and
phonon damping terms.
"""

import cmath
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

from lib.classes.params import DressedParams, ModelParams

logger = logging.getLogger(__name__)

COEFFICIENT_NAMES = ("a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2")


@dataclass(frozen=True)
class EffectiveCoefficients:
    """
    The eight complex rates of the reduced two-mode generator.

    a1/b1 govern the photon mode, a2/b2 the phonon mode and c1/c2/d1/d2 the
    cross-mode couplings. All values are in units of gamma.
    """

    a1: complex
    b1: complex
    c1: complex
    d1: complex
    a2: complex
    b2: complex
    c2: complex
    d2: complex

    def as_mapping(self) -> Dict[str, complex]:
        """Return the coefficients keyed by name, in canonical order."""
        return {name: getattr(self, name) for name in COEFFICIENT_NAMES}

    def net_damping(self) -> Tuple[float, float]:
        """Re(b1 - a1) and Re(b2 - a2); both positive means both modes are damped."""
        return (self.b1 - self.a1).real, (self.b2 - self.a2).real


def printed_terms(
    p: ModelParams, d: DressedParams, p_plus: float, p_minus: float
) -> Tuple[complex, complex, complex, complex]:
    """
    Evaluate the population-dependent parts of a1, a2, c1 and c2.

    Passing the populations exchanged yields the parts of b1, b2, d1 and d2.
    The thermal term kappa_b * nbar is not part of the returned a2.

    Args:
        p: Model parameters
        d: Dressed quantities derived from p
        p_plus: Population weight used where P+ appears
        p_minus: Population weight used where P- appears

    Returns:
        Tuple (a1, a2 without kappa_b * nbar, c1, c2)
    """
    s2 = d.sin_2theta
    c2 = d.cos_2theta
    cos_sq = (1.0 + c2) / 2.0
    sin_sq = (1.0 - c2) / 2.0
    two_wr = 2.0 * d.omega_r
    g_par = d.Gamma_par
    g_perp = d.Gamma_perp
    g, lam = p.g, p.lam
    d1, w = p.delta1, p.omega_m

    a1 = (
        0.25 * g ** 2 * s2 ** 2 / complex(g_par, d1)
        + g ** 2 * p_minus * sin_sq ** 2 / complex(g_perp, -(two_wr - d1))
        + g ** 2 * p_plus * cos_sq ** 2 / complex(g_perp, two_wr + d1)
    )
    a2 = 0.25 * (
        lam ** 2 * c2 ** 2 / complex(g_par, -w)
        + lam ** 2 * p_minus * s2 ** 2 / complex(g_perp, -(two_wr + w))
        + lam ** 2 * p_plus * s2 ** 2 / complex(g_perp, two_wr - w)
    )
    glam = g * lam * s2
    c1 = (
        0.5 * p_plus * glam * cos_sq / complex(g_perp, -(two_wr + d1))
        - 0.5 * p_minus * glam * sin_sq / complex(g_perp, two_wr - d1)
        - 0.25 * glam * c2 / complex(g_par, -d1)
    )
    c2_ = (
        0.5 * p_minus * glam * cos_sq / complex(g_perp, two_wr + w)
        - 0.5 * p_plus * glam * sin_sq / complex(g_perp, -(two_wr - w))
        - 0.25 * glam * c2 / complex(g_par, w)
    )
    return a1, a2, c1, c2_


def effective_coefficients(p: ModelParams, d: DressedParams) -> EffectiveCoefficients:
    """
    Evaluate the eight effective coefficients.

    b2 is built as the exchanged lambda part of a2, plus kappa_b * nbar,
    plus kappa_b, so that g = lam = 0 gives exact thermal damping.

    Args:
        p: Model parameters
        d: Dressed quantities from derive_dressed(p)

    Returns:
        EffectiveCoefficients

    Raises:
        ValueError: If any coefficient is not finite
    """
    a1, a2_lam, c1, c2 = printed_terms(p, d, d.p_plus, d.p_minus)
    b1_pop, b2_lam, d1, d2 = printed_terms(p, d, d.p_minus, d.p_plus)
    thermal = p.kappa_b * p.nbar

    coefficients = EffectiveCoefficients(
        a1=a1,
        b1=b1_pop + p.kappa_a,
        c1=c1,
        d1=d1,
        a2=a2_lam + thermal,
        b2=b2_lam + thermal + p.kappa_b,
        c2=c2,
        d2=d2,
    )

    bad = [
        name
        for name, value in coefficients.as_mapping().items()
        if not (cmath.isfinite(value))
    ]
    if bad:
        raise ValueError(f"Non-finite effective coefficient(s): {', '.join(bad)}")

    logger.debug(f"Coefficients at delta1={p.delta1}: {coefficients}")
    return coefficients
