import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entropic_cv import (GridCoverageError, InvalidInputError, JointSampler, MeasurementSettings,
                         UnsupportedAngleError, coherent_product, combo_marginal, eta_state,
                         joint_density, mode_marginals, noon_state, product_state,
                         random_haar_mode, random_haar_state, two_mode_squeezed)
from entropic_cv.distributions import GriddedDensity1D, make_grid, reduce_angle
from entropic_cv.entropy import variance


def _mean(d):
    return float(np.sum(d.grid * d.density) * d.spacing)


def test_noon_density_at_origin():
    # Psi(0, 0) = sqrt(2) phi_N(0) phi_0(0), phi_{2k}(0) = (-1)^k sqrt((2k)!) / (2^k k!) pi^{-1/4}
    for N in (2, 4):
        k = N // 2
        phiN0 = (-1) ** k * math.sqrt(math.factorial(N)) / (2**k * math.factorial(k)) * math.pi**-0.25
        expected = 2 * (phiN0 * math.pi**-0.25) ** 2
        j = joint_density(noon_state(N), points=257, span=10.0)
        c = 128
        assert j.density[c, c] == pytest.approx(expected, rel=1e-9)


def test_coherent_marginal_mean_and_variance():
    a1, a2 = 1.2, -0.5
    j = joint_density(coherent_product(a1, a2), points=512)
    m1, m2 = mode_marginals(j)
    assert _mean(m1) == pytest.approx(math.sqrt(2) * a1, abs=1e-9)
    assert _mean(m2) == pytest.approx(math.sqrt(2) * a2, abs=1e-9)
    # the 1e-10 Poisson tail cut shifts the variance by ~1e-8
    assert variance(m1) == pytest.approx(0.5, abs=1e-7)
    # at pi/2 the quadrature is p, whose mean vanishes for real alpha
    m1p, _ = mode_marginals(joint_density(coherent_product(a1, a2), np.pi / 2, 0.0, points=512))
    assert _mean(m1p) == pytest.approx(0.0, abs=1e-9)


def test_tmsv_combination_variances():
    r = 0.5
    s = two_mode_squeezed(r)
    jx = joint_density(s, 0.0, 0.0, points=512)
    jp = joint_density(s, np.pi / 2, np.pi / 2, points=512)
    assert variance(combo_marginal(jx, sign=-1)) == pytest.approx(math.exp(-2 * r), abs=1e-8)
    assert variance(combo_marginal(jp, sign=1)) == pytest.approx(math.exp(-2 * r), abs=1e-8)
    assert variance(combo_marginal(jx, sign=1)) == pytest.approx(math.exp(2 * r), abs=1e-8)


def test_combo_of_product_state_is_convolution():
    s = product_state(random_haar_mode(3, 4, 0), random_haar_mode(2, 4, 1))
    j = joint_density(s, 0.3, 1.1, points=512, span=10.0)
    m1, m2 = mode_marginals(j)
    u = combo_marginal(j, 1.0, 1.0, 1)
    h = m1.spacing
    conv = np.convolve(m1.density, m2.density) * h
    assert np.max(np.abs(conv - u.density)) < 1e-10
    # difference: density of r1 - r2 is the convolution with the reflected marginal
    conv_minus = np.convolve(m1.density, m2.density[::-1]) * h
    assert np.max(np.abs(conv_minus - combo_marginal(j, 1.0, 1.0, -1).density)) < 1e-10


@pytest.mark.parametrize("a1,a2,sign", [(1.0, 2.0, 1), (2.0, 0.5, -1), (0.7, 1.3, -1)])
def test_combo_variance_matches_two_dimensional_moments(a1, a2, sign):
    s = random_haar_state(2, seed=8)
    j = joint_density(s, 0.2, 0.9, points=512)
    g1, g2 = np.meshgrid(j.grid1, j.grid2, indexing="ij")
    h = j.grid1[1] - j.grid1[0]
    u = a1 * g1 + sign * a2 * g2
    m = np.sum(u * j.density) * h * h
    v = np.sum(u * u * j.density) * h * h - m * m
    d = combo_marginal(j, a1, a2, sign)
    assert d.integral() == pytest.approx(1.0, abs=1e-12)
    assert variance(d) == pytest.approx(v, rel=1e-7)
    assert _mean(d) == pytest.approx(m, abs=1e-5)


def test_combo_marginal_against_independent_samples():
    from scipy import stats
    # r1 + r2 for a two-mode squeezed state is Gaussian with variance e^{2r}
    r = 0.4
    j = joint_density(two_mode_squeezed(r), points=512)
    d = combo_marginal(j, 1.0, 1.0, 1)
    rng = np.random.default_rng(0)
    samples = rng.normal(0.0, math.sqrt(math.exp(2 * r)), 4000)
    cdf = np.cumsum(d.density) * d.spacing
    assert stats.kstest(samples, lambda x: np.interp(x, d.grid, cdf)).pvalue > 1e-3


def test_reflection_gives_flipped_joint():
    s = random_haar_state(2, seed=3)
    sampler = JointSampler(s, points=128)
    a = sampler.joint(0.4 + np.pi, 0.7)
    direct = joint_density(s, 0.4 + np.pi, 0.7, points=128)
    assert np.allclose(a.density, direct.density, atol=1e-12)
    assert np.allclose(a.density, sampler.joint(0.4, 0.7).density[::-1, :], atol=1e-12)


def test_reduce_angle():
    assert reduce_angle(0.0) == (0.0, False)
    b, f = reduce_angle(-np.pi / 4)
    assert b == pytest.approx(3 * np.pi / 4) and f
    b, f = reduce_angle(np.pi)
    assert b == pytest.approx(0.0) and f


def test_coverage_error_on_narrow_grid():
    with pytest.raises(GridCoverageError):
        joint_density(noon_state(3), points=64, span=1.5)


def test_analytic_state_angle_support():
    eta = eta_state(1.0, 0.5)
    joint_density(eta, np.pi / 2, np.pi / 2, points=128)
    with pytest.raises(UnsupportedAngleError):
        joint_density(eta, 0.0, np.pi / 2, points=128)
    with pytest.raises(UnsupportedAngleError):
        joint_density(eta, np.pi / 4, np.pi / 4, points=128)


def test_settings_and_density_validation():
    with pytest.raises(InvalidInputError):
        MeasurementSettings(a1=0.0)
    with pytest.raises(InvalidInputError):
        MeasurementSettings(sign=2)
    with pytest.raises(InvalidInputError):
        GriddedDensity1D.from_values(np.array([0.0, 1.0, 3.0]), np.ones(3))
    with pytest.raises(GridCoverageError):
        GriddedDensity1D.from_values(make_grid(11, 1.0), np.zeros(11))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, math.pi), st.floats(0.0, math.pi),
       st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([1, -1]))
def test_combo_marginal_is_normalized_and_nonnegative(seed, t1, t2, a1, a2, sign):
    j = joint_density(random_haar_state(1, seed), t1, t2, points=128)
    d = combo_marginal(j, a1, a2, sign)
    assert np.all(d.density >= 0)
    assert abs(d.defect) < 1e-3
    assert d.integral() == pytest.approx(1.0, abs=1e-12)
