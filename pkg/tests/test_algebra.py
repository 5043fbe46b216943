import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gha_coherent.algebra import (
    CharacteristicFn,
    FockVector,
    GhaRep,
    apply_annihilation,
    apply_creation,
    casimir_residual,
    casimir_values,
    commutator_residual,
    harmonic_fn,
    iterate_spectrum,
    ladder_coefficients,
    q_deformed_fn,
    square_well_fn,
)
from gha_coherent.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NegativeSquare,
    NonFinite,
    NonMonotonicLadder,
    TruncationOverflow,
)
from gha_coherent.powerlaw import PowerLawSpec, rep_for_spec


@pytest.fixture
def harmonic():
    return GhaRep.build(harmonic_fn(), 0.0, 12)


@pytest.fixture
def square_well():
    return GhaRep.build(square_well_fn(), 1.0, 12)


def test_iterate_spectrum_examples():
    assert list(iterate_spectrum(harmonic_fn(), 0.0, 3)) == [0, 1, 2, 3]
    assert list(iterate_spectrum(square_well_fn(), 1.0, 2)) == [1, 4, 9]
    assert list(iterate_spectrum(harmonic_fn(), 0.5, 2)) == [0.5, 1.5, 2.5]


def test_iterate_spectrum_errors():
    with pytest.raises(NonMonotonicLadder):
        iterate_spectrum(lambda x: x, 1.0, 3)
    with pytest.raises(NonMonotonicLadder):
        iterate_spectrum(lambda x: 0.5 * x, 1.0, 3)
    with pytest.raises(NonFinite):
        iterate_spectrum(lambda x: x * 1e200, 1e200, 3)
    with pytest.raises(ValueError):
        iterate_spectrum(harmonic_fn(), 0.0, 0)


def test_ladder_coefficients_examples():
    np.testing.assert_allclose(ladder_coefficients([0, 1, 2, 3]), [1, math.sqrt(2), math.sqrt(3)])
    np.testing.assert_allclose(ladder_coefficients([1, 4, 9, 16]),
                               [math.sqrt(3), math.sqrt(8), math.sqrt(15)])
    assert ladder_coefficients([5.0]).size == 0


def test_ladder_coefficients_rejects_corrupt_input():
    with pytest.raises(NegativeSquare):
        ladder_coefficients([2.0, 1.0, 3.0])


def test_annihilation_examples(harmonic, square_well):
    assert apply_annihilation(harmonic.basis(0), harmonic).norm() == 0.0
    out = apply_annihilation(harmonic.basis(2), harmonic)
    np.testing.assert_allclose(out.coeffs, math.sqrt(2) * harmonic.basis(1).coeffs)
    out = apply_annihilation(square_well.basis(1), square_well)
    np.testing.assert_allclose(out.coeffs, math.sqrt(3) * square_well.basis(0).coeffs)


def test_creation_examples(harmonic, square_well):
    np.testing.assert_allclose(apply_creation(harmonic.basis(0), harmonic).coeffs,
                               harmonic.basis(1).coeffs)
    np.testing.assert_allclose(apply_creation(square_well.basis(0), square_well).coeffs,
                               math.sqrt(3) * square_well.basis(1).coeffs)
    with pytest.raises(TruncationOverflow):
        apply_creation(harmonic.basis(harmonic.n_max), harmonic)


def test_short_vectors_are_padded(harmonic):
    v = FockVector([0, 1])
    out = apply_creation(v, harmonic)
    assert len(out) == harmonic.dim
    assert out.coeffs[2] == pytest.approx(math.sqrt(2))


def test_dimension_mismatch(harmonic):
    with pytest.raises(DimensionMismatch):
        apply_annihilation(FockVector(np.ones(harmonic.dim + 1)), harmonic)


def test_fock_vector_rejects_nonfinite():
    with pytest.raises(NonFinite):
        FockVector([1.0, math.nan])


def test_commutator_examples(harmonic, square_well):
    assert commutator_residual(0, harmonic) <= 1e-12
    assert commutator_residual(3, square_well) <= 1e-12
    assert square_well.char_fn(square_well.energies[3]) - square_well.energies[3] == 9.0
    rep = rep_for_spec(PowerLawSpec(1.5, 4.0), 10)
    assert commutator_residual(5, rep) <= 1e-12


def test_commutator_index_bounds(harmonic):
    with pytest.raises(IndexOutOfRange):
        commutator_residual(harmonic.n_max - 1, harmonic)
    with pytest.raises(IndexOutOfRange):
        casimir_residual(-1, harmonic)


def test_casimir_examples(harmonic, square_well):
    assert casimir_values(2, harmonic) == pytest.approx((0.0, 0.0), abs=1e-14)
    first, second = casimir_values(1, square_well)
    assert first == pytest.approx(-1.0, abs=1e-12) and second == pytest.approx(-1.0, abs=1e-12)
    rep = rep_for_spec(PowerLawSpec(5.0, 4.0), 10)
    first, second = casimir_values(3, rep)
    assert first == pytest.approx(-1.0, abs=1e-12) and second == pytest.approx(-1.0, abs=1e-12)
    assert casimir_residual(3, rep) <= 1e-12


def test_casimir_detects_wrong_char_fn():
    # energies from x+1 but a char_fn claiming x+2: commutator must notice
    good = GhaRep.build(harmonic_fn(), 0.0, 6)
    bad = GhaRep(good.energies, good.ladder, CharacteristicFn(lambda x: x + 2.0), good.casimir)
    assert commutator_residual(1, bad) > 0.1
    assert casimir_residual(1, bad) > 0.1


ks = st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 15.0, math.inf])
gammas = st.sampled_from([0.0, 1.0, 2.0, 4.0])


@given(ks, gammas)
def test_algebra_closes_on_truncated_space(k, gamma):
    rep = rep_for_spec(PowerLawSpec(k, gamma), 24)
    for n in range(rep.n_max - 1):
        assert commutator_residual(n, rep) <= 1e-12
        assert casimir_residual(n, rep) <= 1e-12


@given(ks, gammas)
def test_ladder_squares_reproduce_levels(k, gamma):
    rep = rep_for_spec(PowerLawSpec(k, gamma), 30)
    np.testing.assert_allclose(rep.ladder**2 + rep.energies[0], rep.energies[1:], rtol=1e-14)


@given(ks, gammas)
def test_ground_state_is_annihilated(k, gamma):
    rep = rep_for_spec(PowerLawSpec(k, gamma), 5)
    assert apply_annihilation(rep.basis(0), rep).norm() == 0.0


def test_harmonic_ladder_is_exact():
    rep = GhaRep.build(harmonic_fn(), 0.0, 100)
    assert np.array_equal(rep.ladder**2, np.arange(1, 101, dtype=float)) or np.allclose(
        rep.ladder**2, np.arange(1, 101), rtol=0, atol=1e-13
    )


def test_q_deformed_smoke():
    rep = GhaRep.build(q_deformed_fn(1.5), 0.0, 10)
    assert np.all(np.diff(rep.energies) > 0)
    for n in range(rep.n_max - 1):
        assert commutator_residual(n, rep) <= 1e-12


def test_rep_is_immutable(harmonic):
    with pytest.raises(ValueError):
        harmonic.energies[0] = 3.0
