"""
End-to-end checks on the reference parameter set: the photon and phonon
resonance near delta1 = omega_m, its dependence on the thermal occupation,
and the Cauchy-Schwarz violation around it. Density-matrix comparisons are
marked slow.
"""

import os
import sys
from dataclasses import replace

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from lib.classes.observables import correlations
from lib.classes.params import ModelParams
from lib.config import REFERENCE_NBAR_VALUES, REFERENCE_PARAMETERS
from lib.moments import enumerate_basis
from lib.oracle import FockConfig, FullOracle, solve_with_cutoff_doubling
from lib.sweep import run_oracle, solve_point
from lib.sweep.sweep_config import OracleSettings

OBSERVABLES = ["mean_a", "mean_b", "g2_photon", "g2_phonon", "g2_cross", "csi"]


def scan(base: ModelParams, delta1_values, nbar: float):
    """Correlation sets along a delta1 scan."""
    return [solve_point(replace(base, delta1=float(d), nbar=nbar)).correlations for d in delta1_values]


class TestResonanceScan:
    @classmethod
    def setup_class(cls):
        cls.base = ModelParams.from_mapping(REFERENCE_PARAMETERS)
        cls.fine = np.round(np.arange(49.0, 51.0 + 1e-9, 0.01), 2)
        cls.coarse = np.linspace(30.0, 70.0, 41)
        cls.fine_scans = {nbar: scan(cls.base, cls.fine, nbar) for nbar in REFERENCE_NBAR_VALUES}
        cls.coarse_scans = {nbar: scan(cls.base, cls.coarse, nbar) for nbar in REFERENCE_NBAR_VALUES}

    def test_every_point_solves(self):
        for results in list(self.fine_scans.values()) + list(self.coarse_scans.values()):
            assert all(result.status == "ok" for result in results)

    @pytest.mark.parametrize("name", ["mean_a", "mean_b"])
    def test_peak_is_shifted_from_resonance(self, name):
        """Both occupations peak close to, but not exactly at, delta1 = omega_m."""
        for nbar in REFERENCE_NBAR_VALUES:
            values = [getattr(result, name) for result in self.fine_scans[nbar]]
            peak = self.fine[int(np.argmax(values))]
            assert 0.01 < abs(peak - self.base.omega_m) < 5.0

    @pytest.mark.parametrize("name", ["mean_a", "mean_b"])
    def test_peak_stands_out(self, name):
        for nbar in REFERENCE_NBAR_VALUES:
            values = [getattr(result, name) for result in self.coarse_scans[nbar]]
            peak = max(values)
            assert peak > 1.5 * values[0]
            assert peak > 1.5 * values[-1]

    def test_photon_occupation_depends_on_nbar(self):
        low, high = (max(r.mean_a for r in self.fine_scans[nbar]) for nbar in REFERENCE_NBAR_VALUES)
        assert abs(high - low) > 0.01 * max(high, low)
        assert high > low

    def test_reference_occupations(self):
        at_resonance = int(np.flatnonzero(self.fine == 50.0)[0])
        cold = self.fine_scans[0.5][at_resonance]
        hot = self.fine_scans[2.0][at_resonance]
        assert cold.mean_a == pytest.approx(0.181, rel=3e-2)
        assert cold.mean_b == pytest.approx(2.62, rel=3e-2)
        assert hot.mean_a == pytest.approx(0.324, rel=3e-2)
        assert hot.mean_b == pytest.approx(5.86, rel=3e-2)

    def test_cauchy_schwarz_violated_near_resonance(self):
        for nbar in REFERENCE_NBAR_VALUES:
            assert min(result.csi for result in self.fine_scans[nbar]) < 1.0

    def test_cauchy_schwarz_holds_far_from_resonance(self):
        for nbar in REFERENCE_NBAR_VALUES:
            for delta1 in (10.0, 90.0):
                result = solve_point(replace(self.base, delta1=delta1, nbar=nbar)).correlations
                assert result.csi >= 1.0


@pytest.mark.slow
class TestReducedOracleAgreement:
    """
    Reduced master equation against the moment hierarchy on delta1 = 45..55.

    Hot phonons near the peak need more levels than the doubling may build;
    those points must come back flagged instead of converged.
    """

    fock = FockConfig(n_a=8, n_b=24, tolerance=1e-4, max_cutoff=48)

    def setup_method(self):
        self.base = ModelParams.from_mapping(REFERENCE_PARAMETERS)
        self.basis = enumerate_basis(4)

    @pytest.mark.parametrize("nbar", REFERENCE_NBAR_VALUES)
    @pytest.mark.parametrize("delta1", np.linspace(45.0, 55.0, 11))
    def test_scan_point(self, delta1, nbar):
        p = replace(self.base, delta1=float(delta1), nbar=nbar)
        result = run_oracle(p, OracleSettings(mode="reduced", fock=self.fock), self.basis)

        if nbar == 2.0 and delta1 == 50.0:
            assert not result.converged
        if nbar == 0.5 or abs(delta1 - p.omega_m) >= 3.0:
            assert result.converged

        if result.converged:
            assert not result.fock.contaminated
            assert result.last_change < self.fock.tolerance
            moments = solve_point(p).correlations.as_row()
            oracle = correlations(result.moments).as_row()
            for name in OBSERVABLES:
                assert oracle[name] == pytest.approx(moments[name], rel=1e-3), name
        else:
            assert result.cfg.n_b == self.fock.max_cutoff
            assert result.fock.contaminated or result.last_change >= self.fock.tolerance


@pytest.mark.slow
class TestFullModelResonance:
    """
    The bare qubit-cavity-phonon model shows the photon resonance near omega_m.

    Every point goes through cutoff doubling. Cold points away from the peak
    pass it; the others are used at their largest cutoffs and must carry the
    unconverged flag.
    """

    grid = [30.0, 40.0, 46.0, 48.0, 50.0, 52.0, 54.0, 60.0, 70.0]
    fock = FockConfig(n_a=3, n_b=20, tolerance=1e-3, max_cutoff=20)

    @classmethod
    def setup_class(cls):
        base = ModelParams.from_mapping(REFERENCE_PARAMETERS)
        basis = enumerate_basis(4)
        budget = replace(cls.fock, n_a=2 * cls.fock.n_a).full_dim ** 2
        cls.omega_m = base.omega_m
        cls.results = {
            nbar: [
                solve_with_cutoff_doubling(
                    FullOracle(replace(base, delta1=delta1, nbar=nbar)), cls.fock, nbar, basis, max_vector_size=budget
                )
                for delta1 in cls.grid
            ]
            for nbar in REFERENCE_NBAR_VALUES
        }

    def occupations(self, nbar):
        return [result.moments.value(1, 1, 0, 0).real for result in self.results[nbar]]

    def test_states_are_physical(self):
        for results in self.results.values():
            for result in results:
                assert result.steady.trace_error < 1e-8
                assert result.steady.min_eigenvalue > -1e-6

    def test_cold_off_resonant_points_pass_doubling(self):
        for delta1, result in zip(self.grid, self.results[0.5]):
            if abs(delta1 - self.omega_m) == 10.0:
                assert result.converged, delta1
                assert not result.fock.contaminated
                assert result.cfg.n_a == 2 * self.fock.n_a

    def test_unconverged_points_are_flagged(self):
        for results in self.results.values():
            for result in results:
                if not result.converged:
                    assert result.history
                    assert result.fock.contaminated or result.last_change >= self.fock.tolerance

    def test_photon_peak_near_phonon_frequency(self):
        for nbar in REFERENCE_NBAR_VALUES:
            occupations = self.occupations(nbar)
            peak = self.grid[int(np.argmax(occupations))]
            assert abs(peak - self.omega_m) < 10.0
            assert max(occupations) > occupations[0]
            assert max(occupations) > occupations[-1]

    def test_photon_peak_grows_with_nbar(self):
        """Same direction of the thermal dependence as the reduced model."""
        assert max(self.occupations(2.0)) > max(self.occupations(0.5))
