"""
Structural invariant suite.

Runs identities that must hold for every parameter set, at the configured
base point and at seeded random draws around it:

- dressed-population and rate identities
- the hand-written first-moment system equals the assembled order-2 rows
- the normalization row of the generator is zero
- conjugation covariance, block triangularity and charge conservation
- real, conjugation-symmetric steady moments
- thermal phonons and an empty cavity when g = lam = 0
- photon statistics independent of nbar at delta = 0
"""

import logging
from dataclasses import replace
from typing import Optional

import numpy as np

from lib.classes.coefficients import effective_coefficients
from lib.classes.params import ModelParams, derive_dressed
from lib.classes.validators import ValidationResult
from lib.config import TOLERANCES
from lib.exceptions import CorrelationError
from lib.moments.moment_equations import (
    FIRST_MOMENT_INDICES,
    GeneratorBlocks,
    MomentBasis,
    assemble_generator,
    enumerate_basis,
    first_moment_system,
)
from lib.moments.solvers import stability_report, steady_state

logger = logging.getLogger(__name__)


def _generator(p: ModelParams, basis: MomentBasis) -> GeneratorBlocks:
    coefficients = effective_coefficients(p, derive_dressed(p))
    return assemble_generator(coefficients, p.delta1, p.omega_m, basis)


def check_dressed_identities(p: ModelParams, result: ValidationResult, label: str = "base"):
    d = derive_dressed(p)
    result.record(abs(d.p_plus + d.p_minus - 1.0) <= 1e-15, f"[{label}] P+ + P- = {d.p_plus + d.p_minus!r}")
    result.record(
        abs(d.sin_2theta ** 2 + d.cos_2theta ** 2 - 1.0) <= 1e-14,
        f"[{label}] sin^2(2 theta) + cos^2(2 theta) != 1",
    )
    result.record(
        np.isclose(d.Gamma_perp, 4.0 * d.gamma0 + d.gamma_plus + d.gamma_minus, rtol=1e-14, atol=0.0),
        f"[{label}] Gamma_perp inconsistent with its rates",
    )
    if p.delta == 0:
        result.record(d.p_plus == d.p_minus == 0.5, f"[{label}] P+ != P- at delta = 0")


def check_first_moment_system(p: ModelParams, gen: GeneratorBlocks, result: ValidationResult, label: str = "base"):
    """The order-2 rows of the four first-moment indices must equal the hand-written system exactly."""
    coefficients = effective_coefficients(p, derive_dressed(p))
    matrix, source = first_moment_system(coefficients, p.delta1, p.omega_m)
    basis = gen.basis
    rows = [basis.position(idx) - basis.offsets[2] for idx in FIRST_MOMENT_INDICES]
    block = gen.blocks[2]

    others = np.delete(block[rows], rows, axis=1)
    result.record(np.array_equal(block[np.ix_(rows, rows)], matrix), f"[{label}] first-moment matrix differs")
    result.record(np.array_equal(gen.feeds[2][rows, 0], source), f"[{label}] first-moment source differs")
    result.record(not np.any(others), f"[{label}] first-moment rows couple outside the subsystem")


def check_generator_structure(gen: GeneratorBlocks, result: ValidationResult, label: str = "base"):
    basis = gen.basis
    dense = gen.dense()
    result.record(not np.any(dense[0]), f"[{label}] normalization row is not zero")

    perm = basis.conjugate_permutation()
    scale = max(float(np.max(np.abs(dense))), 1.0)
    covariance = float(np.max(np.abs(dense[np.ix_(perm, perm)] - dense.conj())))
    result.record(
        covariance <= TOLERANCES["invariant_atol"] * scale,
        f"[{label}] conjugation covariance violated by {covariance:.3e}",
    )

    orders = np.array([idx.order for idx in basis.indices])
    charges = np.array([idx.difference_charge for idx in basis.indices])
    gap = orders[:, None] - orders[None, :]
    allowed = (gap == 0) | (gap == 2)
    result.record(not np.any(dense[~allowed]), f"[{label}] generator is not block lower-triangular")
    result.record(
        not np.any(dense[charges[:, None] != charges[None, :]]),
        f"[{label}] generator mixes difference charges",
    )


def check_steady_symmetry(gen: GeneratorBlocks, result: ValidationResult, label: str = "base") -> bool:
    """Conjugation symmetry of the steady moments; False when there is no steady state."""
    report = stability_report(gen)
    if not report.stable:
        return False
    try:
        moments = steady_state(gen, report)
    except CorrelationError:
        return False
    scale = max(float(np.max(np.abs(moments.values))), 1.0)
    error = moments.conjugation_error()
    result.record(error <= TOLERANCES["eps_im"] * scale, f"[{label}] steady moments break conjugation symmetry ({error:.3e})")
    return True


def check_thermal_limit(p: ModelParams, basis: MomentBasis, result: ValidationResult, label: str = "base"):
    """With g = lam = 0 the cavity stays empty and the phonons are thermal."""
    free = replace(p, g=0.0, lam=0.0)
    try:
        moments = steady_state(_generator(free, basis))
    except CorrelationError as exc:
        result.add_warning(f"[{label}] thermal limit skipped: {exc}")
        return
    n_b = moments.value(0, 0, 1, 1)
    result.record(abs(moments.value(1, 1, 0, 0)) <= 1e-12, f"[{label}] cavity not empty at g = lam = 0")
    result.record(
        np.isclose(n_b, free.nbar, rtol=1e-10, atol=1e-14),
        f"[{label}] <b^dag b> = {n_b} instead of nbar = {free.nbar}",
    )
    result.record(
        np.isclose(moments.value(0, 0, 2, 2), 2.0 * free.nbar ** 2, rtol=1e-10, atol=1e-14),
        f"[{label}] phonon g2 not thermal at g = lam = 0",
    )


def check_resonant_decoupling(p: ModelParams, basis: MomentBasis, result: ValidationResult, label: str = "base"):
    """At delta = 0 the photon occupation must not depend on nbar."""
    resonant = replace(p, delta=0.0)
    values = []
    for nbar in (0.5, 2.0):
        gen = _generator(replace(resonant, nbar=nbar), basis)
        report = stability_report(gen)
        if not report.stable:
            result.add_info(f"[{label}] delta = 0 variant has no steady state; decoupling skipped")
            return
        try:
            values.append(steady_state(gen, report).value(1, 1, 0, 0).real)
        except CorrelationError:
            result.add_info(f"[{label}] delta = 0 variant is singular; decoupling skipped")
            return
    result.record(
        np.isclose(values[0], values[1], rtol=1e-10, atol=1e-15),
        f"[{label}] <a^dag a> depends on nbar at delta = 0 ({values[0]!r} vs {values[1]!r})",
    )


def random_draw(base: ModelParams, rng: np.random.Generator) -> ModelParams:
    """Random parameter set around base, inside the physical domain."""
    return replace(
        base,
        gamma_c=float(rng.uniform(0.0, 1.0)),
        g=float(rng.uniform(0.0, 5.0)),
        lam=float(rng.uniform(0.0, 8.0)),
        omega_rabi=float(rng.uniform(20.0, 80.0)),
        delta=float(rng.uniform(-60.0, 60.0)),
        delta1=float(base.omega_m + rng.uniform(-20.0, 20.0)),
        nbar=float(rng.uniform(0.0, 3.0)),
    )


def run_invariant_suite(
    base: ModelParams, draws: int = 100, seed: int = 0, max_order: int = 4
) -> ValidationResult:
    """
    Run every invariant at the base point and at seeded random draws.

    Args:
        base: Base parameter set (must have omega_rabi > 0)
        draws: Number of random parameter sets
        seed: Seed of the draw generator
        max_order: Moment order of the generator under test

    Returns:
        ValidationResult; failed identities are errors
    """
    result = ValidationResult()
    basis = enumerate_basis(max_order)
    rng = np.random.default_rng(seed)

    points = [("base", base)] + [(f"draw {i}", random_draw(base, rng)) for i in range(draws)]
    steady_points = 0
    for label, p in points:
        gen = _generator(p, basis)
        check_dressed_identities(p, result, label)
        check_first_moment_system(p, gen, result, label)
        check_generator_structure(gen, result, label)
        if check_steady_symmetry(gen, result, label):
            steady_points += 1
        elif label == "base":
            result.add_warning("Base point has no moment steady state")
        check_resonant_decoupling(p, basis, result, label)

    check_thermal_limit(base, basis, result)
    result.add_info(f"{len(points)} parameter set(s), {steady_points} with a steady state, seed {seed}")
    logger.info(f"Invariant suite: {result.get_summary()}")
    return result


def suite_passed(result: Optional[ValidationResult]) -> bool:
    return result is not None and result.is_valid
