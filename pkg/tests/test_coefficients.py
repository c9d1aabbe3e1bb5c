import os
import sys
from dataclasses import replace

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from lib.classes.coefficients import (
    COEFFICIENT_NAMES,
    EffectiveCoefficients,
    effective_coefficients,
    printed_terms,
)
from lib.classes.params import ModelParams, derive_dressed
from lib.config import REFERENCE_PARAMETERS

# Rates at the reference set with delta1 = omega_m = 50 and nbar = 2, evaluated
# from the closed-form expressions in 45-digit decimal arithmetic.
REFERENCE_COEFFICIENTS = {
    "a1": 1.8188009897622326813e-03 - 2.7083254767778279542e-02j,
    "b1": 9.2549320751364038043e-02 + 1.0449732306567436589e-03j,
    "c1": -1.8158157375010060367e-04 + 5.7044673961311261933e-02j,
    "d1": -1.2330480442438521236e-03 + 8.2562369746215206484e-02j,
    "a2": 2.063969254640406788e-02 - 5.5432601690588286523e-02j,
    "b2": 2.8532256592198575153e-02 + 3.3085166696543097928e-04j,
    "c2": -1.2330480442438521236e-03 - 8.2562369746215206484e-02j,
    "d2": -1.8158157375010060367e-04 - 5.7044673961311261933e-02j,
}


def transcribed_coefficients(p: ModelParams):
    """
    Second transcription of the closed-form rates, written with numpy
    trigonometry of theta instead of the algebraic sin/cos of 2 theta.
    """
    d = derive_dressed(p)
    theta = d.theta
    s2, c2 = np.sin(2 * theta), np.cos(2 * theta)
    cs, sn = np.cos(theta) ** 2, np.sin(theta) ** 2
    wr2 = 2 * d.omega_r
    gpar, gperp = d.Gamma_par, d.Gamma_perp
    g, lam, d1, w = p.g, p.lam, p.delta1, p.omega_m

    def rates(pp, pm):
        a1 = (g ** 2 * s2 ** 2 / 4) / (gpar + 1j * d1) \
            + g ** 2 * pm * sn ** 2 / (gperp - 1j * (wr2 - d1)) \
            + g ** 2 * pp * cs ** 2 / (gperp + 1j * (wr2 + d1))
        a2 = (lam ** 2 / 4) * (
            c2 ** 2 / (gpar - 1j * w)
            + pm * s2 ** 2 / (gperp - 1j * (wr2 + w))
            + pp * s2 ** 2 / (gperp + 1j * (wr2 - w))
        )
        c1 = g * lam * s2 * (
            pp * cs / (2 * (gperp - 1j * (wr2 + d1)))
            - pm * sn / (2 * (gperp + 1j * (wr2 - d1)))
            - c2 / (4 * (gpar - 1j * d1))
        )
        c2_ = g * lam * s2 * (
            pm * cs / (2 * (gperp + 1j * (wr2 + w)))
            - pp * sn / (2 * (gperp - 1j * (wr2 - w)))
            - c2 / (4 * (gpar + 1j * w))
        )
        return a1, a2, c1, c2_

    a1, a2, c1, c2_ = rates(d.p_plus, d.p_minus)
    b1, b2, d1_, d2 = rates(d.p_minus, d.p_plus)
    thermal = p.kappa_b * p.nbar
    return {
    "a1": a1,
    "b1": b1 + p.kappa_a,
    "c1": c1,
    "d1": d1_,
    "a2": a2 + thermal,
    "b2": b2 + thermal + p.kappa_b,
    "c2": c2_,
    "d2": d2,
    }


class TestEffectiveCoefficients:
    def setup_method(self):
        """Reference parameter set with the phonon frequency on resonance."""
        self.params = ModelParams.from_mapping(REFERENCE_PARAMETERS)
        self.coefficients = effective_coefficients(self.params, derive_dressed(self.params))

    def test_matches_second_transcription(self):
        """Both transcriptions agree to rounding at several detunings."""
        for delta1 in (30.0, 47.5, 50.0, 52.5, 70.0):
            for nbar in (0.5, 2.0):
                params = replace(self.params, delta1=delta1, nbar=nbar)
                computed = effective_coefficients(params, derive_dressed(params)).as_mapping()
                expected = transcribed_coefficients(params)
                for name in COEFFICIENT_NAMES:
                    assert computed[name] == pytest.approx(expected[name], rel=1e-12, abs=1e-15), name

    def test_reference_values(self):
        """Reference point delta1 = omega_m = 50, nbar = 2, against the golden rates."""
        computed = self.coefficients.as_mapping()
        assert tuple(REFERENCE_COEFFICIENTS) == COEFFICIENT_NAMES
        for name, expected in REFERENCE_COEFFICIENTS.items():
            assert computed[name] == pytest.approx(expected, rel=1e-13), name

    def test_exchange_is_an_involution(self):
        """Exchanging P+ and P- twice gives back a1, a2, c1 and c2."""
        d = derive_dressed(self.params)

        def exchange(populations):
            p_plus, p_minus = populations
            return p_minus, p_plus

        once = exchange((d.p_plus, d.p_minus))
        twice = exchange(once)
        assert printed_terms(self.params, d, *twice) == printed_terms(self.params, d, d.p_plus, d.p_minus)

        c = self.coefficients
        b1_pop, b2_lam, d1, d2 = printed_terms(self.params, d, *once)
        thermal = self.params.kappa_b * self.params.nbar
        assert c.b1 == b1_pop + self.params.kappa_a
        assert c.b2 == b2_lam + thermal + self.params.kappa_b
        assert c.d1 == d1
        assert c.d2 == d2

    @pytest.mark.parametrize("delta1", [30.0, 49.0, 50.0, 51.0, 70.0])
    def test_smooth_in_cavity_detuning(self, delta1):
        """Central differences in delta1 agree with the step-halved estimate."""

        def at(value):
            params = replace(self.params, delta1=value)
            return effective_coefficients(params, derive_dressed(params)).as_mapping()

        def derivative(step):
            upper, lower = at(delta1 + step), at(delta1 - step)
            return {name: (upper[name] - lower[name]) / (2 * step) for name in COEFFICIENT_NAMES}

        coarse = derivative(1e-2)
        fine = derivative(5e-3)
        for name in COEFFICIENT_NAMES:
            assert coarse[name] == pytest.approx(fine[name], rel=1e-5, abs=1e-10), name

    def test_as_mapping_order(self):
        assert tuple(self.coefficients.as_mapping()) == COEFFICIENT_NAMES

    def test_reference_set_is_damped(self):
        """Both effective modes lose energy at the reference point."""
        photon, phonon = self.coefficients.net_damping()
        assert photon > 0
        assert phonon > 0

    def test_resonant_drive_cross_terms_cancel(self):
        """At delta = 0 the exchanged populations are equal, so c = d exactly."""
        params = replace(self.params, delta=0.0)
        c = effective_coefficients(params, derive_dressed(params))
        assert c.c1 == c.d1
        assert c.c2 == c.d2
        assert c.b1 == c.a1 + params.kappa_a

    def test_uncoupled_limit(self):
        """g = lam = 0 leaves only cavity loss and thermal phonon damping."""
        params = replace(self.params, g=0.0, lam=0.0)
        c = effective_coefficients(params, derive_dressed(params))
        assert c.a1 == 0
        assert c.c1 == c.c2 == c.d1 == c.d2 == 0
        assert c.b1 == params.kappa_a
        assert c.a2 == pytest.approx(params.kappa_b * params.nbar, rel=1e-15)
        assert c.b2 == pytest.approx(params.kappa_b * (params.nbar + 1.0), rel=1e-15)

    def test_thermal_term_only_in_phonon_rates(self):
        """nbar enters a2 and b2 through kappa_b * nbar and nothing else."""
        hot = replace(self.params, nbar=5.0)
        cold = replace(self.params, nbar=0.0)
        c_hot = effective_coefficients(hot, derive_dressed(hot))
        c_cold = effective_coefficients(cold, derive_dressed(cold))
        assert c_hot.a1 == c_cold.a1
        assert c_hot.c1 == c_cold.c1
        assert c_hot.a2 - c_cold.a2 == pytest.approx(5.0 * self.params.kappa_b, rel=1e-12)
        assert c_hot.b2 - c_cold.b2 == pytest.approx(5.0 * self.params.kappa_b, rel=1e-12)

    def test_printed_terms_exclude_thermal_part(self):
        d = derive_dressed(self.params)
        _, a2_lam, _, _ = printed_terms(self.params, d, d.p_plus, d.p_minus)
        assert self.coefficients.a2 - a2_lam == pytest.approx(self.params.kappa_b * self.params.nbar, rel=1e-12)

    def test_dataclass_is_frozen(self):
        with pytest.raises(Exception):
            self.coefficients.a1 = 0j
        assert isinstance(self.coefficients, EffectiveCoefficients)
