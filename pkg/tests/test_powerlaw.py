import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from gha_coherent.errors import MissingPhysicalParams, PhysicalModeUnsupported
from gha_coherent.powerlaw import (
    PowerLawSpec,
    SpacingClass,
    characteristic_fn,
    effective_frequency,
    energy,
    g_factor,
    log_g_sequence,
    rep_for_spec,
    spacing_class,
)
from gha_coherent.special import log_factorial

mpmath.mp.dps = 40
INF = math.inf


def test_spec_validation():
    with pytest.raises(ValueError):
        PowerLawSpec(k=0.0)
    with pytest.raises(ValueError):
        PowerLawSpec(k=2.0, gamma=-1.0)
    with pytest.raises(MissingPhysicalParams):
        PowerLawSpec(k=2.0, use_physical_omega=True)


@given(st.floats(min_value=1e-3, max_value=1e6))
def test_exponent_range(k):
    p = PowerLawSpec(k).exponent
    assert 0 < p < 2


def test_exponent_special_values():
    assert PowerLawSpec(2.0).exponent == 1.0
    assert PowerLawSpec(INF).exponent == 2.0


def test_energy_examples():
    assert energy(3, PowerLawSpec(2.0, 0.0)) == 3.0
    assert energy(2, PowerLawSpec(INF, 4.0)) == 9.0
    ref = float(mpmath.cbrt(4))  # 2^(2/3)
    assert energy(1, PowerLawSpec(1.0, 4.0)) == pytest.approx(ref, rel=1e-15)


def test_square_well_levels():
    np.testing.assert_array_equal(energy(np.arange(5), PowerLawSpec(INF, 4.0)), [1, 4, 9, 16, 25])


def test_effective_frequency_harmonic():
    # V0 = m w0^2 a^2 / 2 gives back w0
    for m, a, w0 in [(1.0, 1.0, 1.0), (2.0, 0.5, 3.0), (0.3, 4.0, 0.7)]:
        spec = PowerLawSpec(2.0, 0.0, v0=0.5 * m * w0**2 * a**2, a=a, mass=m)
        assert effective_frequency(spec) == pytest.approx(w0, rel=1e-14)


def test_effective_frequency_unit_case():
    assert effective_frequency(PowerLawSpec(2.0, v0=0.5, a=1.0, mass=1.0)) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("k", [0.5, 1.0, 3.0, 7.0])
def test_effective_frequency_matches_mpmath(k):
    v0, a, m = 1.7, 0.8, 2.3
    base = (mpmath.pi / (2 * a * mpmath.sqrt(2 * m)) * mpmath.mpf(v0) ** (1 / mpmath.mpf(k))
            * mpmath.gamma(1 / mpmath.mpf(k) + 1.5)
            / (mpmath.gamma(1 / mpmath.mpf(k) + 1) * mpmath.gamma(1.5)))
    ref = float(base ** (2 * mpmath.mpf(k) / (k + 2)))
    assert effective_frequency(PowerLawSpec(k, v0=v0, a=a, mass=m)) == pytest.approx(ref, rel=1e-13)


def test_effective_frequency_square_well():
    # hbar = 1: pi^2 / (8 m a^2) for a well of width 2a
    spec = PowerLawSpec(INF, v0=1.0, a=1.5, mass=2.0)
    assert effective_frequency(spec) == pytest.approx(math.pi**2 / (8 * 2.0 * 1.5**2), rel=1e-14)


@given(st.floats(min_value=0.1, max_value=10.0))
def test_effective_frequency_harmonic_scaling(lam):
    # V0 -> V0/lam^2, a -> lam a keeps m w0^2 a^2 and hence w0 fixed for k = 2
    s1 = PowerLawSpec(2.0, v0=1.3, a=0.9, mass=1.1)
    s2 = PowerLawSpec(2.0, v0=1.3 / lam**2 * lam**2, a=0.9, mass=1.1)
    s3 = PowerLawSpec(2.0, v0=1.3 * lam**2, a=0.9 * lam, mass=1.1)
    assert effective_frequency(s1) == pytest.approx(effective_frequency(s2), rel=1e-14)
    assert effective_frequency(s3) == pytest.approx(effective_frequency(s1), rel=1e-13)


def test_effective_frequency_needs_params():
    with pytest.raises(MissingPhysicalParams):
        effective_frequency(PowerLawSpec(2.0))


def test_physical_energy_scales_with_omega():
    spec = PowerLawSpec(3.0, 2.0, v0=2.0, a=1.0, mass=1.0, use_physical_omega=True)
    dimless = PowerLawSpec(3.0, 2.0)
    assert energy(4, spec) == pytest.approx(effective_frequency(spec) * energy(4, dimless), rel=1e-15)
    with pytest.raises(PhysicalModeUnsupported):
        characteristic_fn(1.0, spec)


def test_characteristic_fn_examples():
    assert characteristic_fn(3.0, PowerLawSpec(2.0)) == 4.0
    assert characteristic_fn(4.0, PowerLawSpec(INF)) == 9.0
    spec = PowerLawSpec(1.0, 4.0)
    assert characteristic_fn(energy(1, spec), spec) == pytest.approx(energy(2, spec), rel=1e-12)


@given(st.sampled_from([0.5, 1.0, 1.5, 2.0, 5.0, 15.0, 1e3, INF]),
       st.sampled_from([0.0, 1.0, 2.0, 4.0]),
       st.integers(min_value=0, max_value=500))
def test_characteristic_fn_steps_the_spectrum(k, gamma, n):
    spec = PowerLawSpec(k, gamma)
    assert characteristic_fn(energy(n, spec), spec) == pytest.approx(energy(n + 1, spec), rel=1e-12)


def _g_bruteforce(n, k, gamma):
    p = mpmath.mpf(2) if k == INF else 2 * mpmath.mpf(k) / (k + 2)
    q = mpmath.mpf(gamma) / 4
    out = mpmath.mpf(1)
    for i in range(1, n + 1):
        out *= (i + q) ** p - q**p
    return out


def test_g_factor_examples():
    assert g_factor(4, PowerLawSpec(2.0, 1.0)) == pytest.approx(math.log(24), rel=1e-15)
    assert math.exp(g_factor(3, PowerLawSpec(INF, 4.0))) == pytest.approx(360.0, rel=1e-14)
    for spec in (PowerLawSpec(0.5), PowerLawSpec(INF, 0.0), PowerLawSpec(7.0, 3.0)):
        assert g_factor(0, spec) == 0.0


def test_g_factor_square_well_matches_closed_form():
    # g(n, inf) = n!(n+2)!/2, i.e. (N_{n-1}!)^2 with N_{n-1}! = sqrt(n!(n+2)!/2)
    for n in range(30):
        ref = log_factorial(n) + log_factorial(n + 2) - math.log(2)
        assert g_factor(n, PowerLawSpec(INF, 4.0)) == pytest.approx(ref, rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("k, gamma", [(0.5, 4.0), (1.0, 4.0), (1.5, 2.0), (5.0, 4.0), (15.0, 0.0)])
def test_g_factor_matches_bruteforce_product(k, gamma):
    for n in (1, 2, 7, 40):
        ref = float(mpmath.log(_g_bruteforce(n, k, gamma)))
        assert g_factor(n, PowerLawSpec(k, gamma)) == pytest.approx(ref, rel=1e-13, abs=1e-13)


@given(st.sampled_from([0.5, 1.0, 2.0, 5.0, INF]), st.sampled_from([0.0, 2.0, 4.0]),
       st.integers(min_value=0, max_value=300))
def test_g_factor_increments(k, gamma, n):
    spec = PowerLawSpec(k, gamma)
    inc = g_factor(n + 1, spec) - g_factor(n, spec)
    expected = math.log(energy(n + 1, spec) - energy(0, spec))
    assert math.isfinite(inc)
    assert inc == pytest.approx(expected, abs=1e-10)


def test_g_factor_harmonic_is_factorial():
    for n in range(171):
        assert g_factor(n, PowerLawSpec(2.0)) == pytest.approx(log_factorial(n), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("n", [0, 5, 20, 64])
def test_g_factor_harmonic_gamma_independent(n):
    vals = [g_factor(n, PowerLawSpec(2.0, g)) for g in (0.0, 1.0, 2.0, 4.0)]
    assert max(vals) - min(vals) <= 1e-12 * max(1.0, abs(vals[0]))


def test_g_factor_square_well_limit():
    for n in range(21):
        ref = log_factorial(n) + log_factorial(n + 2) - math.log(2)
        got = g_factor(n, PowerLawSpec(1e6, 4.0))
        assert got == pytest.approx(ref, rel=1e-4, abs=1e-12)


def test_log_g_sequence_agrees_with_g_factor():
    spec = PowerLawSpec(1.5, 4.0)
    seq = log_g_sequence(200, spec)
    for n in (0, 1, 17, 200):
        assert seq[n] == pytest.approx(g_factor(n, spec), rel=1e-14, abs=1e-14)


def test_spacing_class_examples():
    assert spacing_class(PowerLawSpec(5.0), 10) is SpacingClass.TIGHTENING
    assert spacing_class(PowerLawSpec(2.0), 10) is SpacingClass.UNIFORM
    assert spacing_class(PowerLawSpec(0.5), 10) is SpacingClass.LOOSENING
    assert spacing_class(PowerLawSpec(INF), 10) is SpacingClass.TIGHTENING
    with pytest.raises(ValueError):
        spacing_class(PowerLawSpec(2.0), 2)


@given(st.floats(min_value=0.05, max_value=50.0).filter(lambda k: abs(k - 2) > 1e-3),
       st.sampled_from([0.0, 2.0, 4.0]))
def test_spacing_class_follows_binding(k, gamma):
    expected = SpacingClass.TIGHTENING if k > 2 else SpacingClass.LOOSENING
    assert spacing_class(PowerLawSpec(k, gamma), 20) is expected


def test_rep_for_spec_uses_wkb_ground_state():
    rep = rep_for_spec(PowerLawSpec(5.0, 4.0), 8)
    assert rep.energies[0] == 1.0
    assert rep.casimir == -1.0
    np.testing.assert_allclose(rep.energies, energy(np.arange(9), PowerLawSpec(5.0, 4.0)), rtol=1e-13)
