import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entropic_cv import (CapacityError, Ensemble, InvalidInputError, cat_ensemble,
                         coherent_coefficients, eta_state, noon_state, phi_state,
                         two_mode_squeezed, vacuum)
from entropic_cv.distributions import make_grid


def _dense_cat(alpha, p, parity=1):
    """|a><a| + |b><b| + parity (1-p)(|a><b| + h.c.), normalized, built independently."""
    n = 40
    k = np.arange(n)
    fact = np.array([math.factorial(int(i)) for i in k], float)
    coh = lambda z: np.exp(-z * z / 2) * z**k / np.sqrt(fact)
    a = np.kron(coh(alpha), coh(alpha))
    b = np.kron(coh(-alpha), coh(-alpha))
    q = parity * (1 - p)
    rho = np.outer(a, a) + np.outer(b, b) + q * (np.outer(a, b) + np.outer(b, a))
    return rho / np.trace(rho)


@pytest.mark.parametrize("alpha,p,parity", [(0.5, 0.0, 1), (1.0, 0.3, 1), (1.0, 0.3, -1), (0.2, 0.9, 1)])
def test_cat_weights_match_density_matrix_spectrum(alpha, p, parity):
    ens = cat_ensemble(alpha, p, parity=parity)
    spectrum = np.sort(np.linalg.eigvalsh(_dense_cat(alpha, p, parity)))[::-1][:2]
    assert np.allclose(np.sort(ens.weights)[::-1], spectrum[: len(ens.weights)], atol=1e-9)


def test_cat_ensemble_density_matrix_matches_dense_oracle():
    alpha, p = 0.8, 0.4
    ens = cat_ensemble(alpha, p)
    rho = ens.density_matrix()
    d = ens.states[0].dims[0]
    oracle = _dense_cat(alpha, p).reshape(40, 40, 40, 40)[:d, :d, :d, :d].reshape(d * d, d * d)
    assert np.max(np.abs(rho - oracle)) < 1e-8


def test_cat_limits():
    assert len(cat_ensemble(0.0, 0.3).members) == 1
    assert len(cat_ensemble(1.0, 0.0).members) == 1
    assert cat_ensemble(1.0, 1.0).weights == pytest.approx(
        [(1 + math.exp(-4)) / 2, (1 - math.exp(-4)) / 2])
    with pytest.raises(InvalidInputError):
        cat_ensemble(1.0, 1.5)
    with pytest.raises(InvalidInputError):
        cat_ensemble(1.0, 0.5, parity=0)


def test_ensemble_validation():
    with pytest.raises(InvalidInputError):
        Ensemble(((0.5, vacuum()), (0.6, vacuum())))
    with pytest.raises(InvalidInputError):
        Ensemble(((1.0, "not a state"),))
    with pytest.raises(InvalidInputError):
        Ensemble(())


def test_tmsv_coefficients_and_photon_number():
    r = 0.7
    s = two_mode_squeezed(r)
    diag = np.diag(s.coeffs).real
    t = math.tanh(r)
    assert diag[:5] == pytest.approx(t ** np.arange(5) / math.cosh(r), abs=1e-10)
    n = np.arange(diag.size)
    assert np.sum(n * diag**2) == pytest.approx(math.sinh(r) ** 2, abs=1e-8)
    assert two_mode_squeezed(0.0).dims == (1, 1)
    with pytest.raises(CapacityError):
        two_mode_squeezed(6.0, max_cutoff=50)


def test_noon_and_phi():
    s = noon_state(3)
    assert s.dims == (4, 4)
    assert s.entanglement_entropy() == pytest.approx(math.log(2))
    assert phi_state().norm() == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        noon_state(0)


@pytest.mark.parametrize("sp,sm", [(1.0, 0.5), (1.0, 1.8), (0.7, 1.3)])
def test_eta_normalized_in_both_representations(sp, sm):
    eta = eta_state(sp, sm)
    g = make_grid(801, eta.span)
    h = g[1] - g[0]
    x1, x2 = np.meshgrid(g, g, indexing="ij")
    assert np.sum(np.abs(eta.position_wavefunction(x1, x2)) ** 2) * h * h == pytest.approx(1.0, abs=1e-8)
    assert np.sum(np.abs(eta.momentum_wavefunction(x1, x2)) ** 2) * h * h == pytest.approx(1.0, abs=1e-8)


def test_eta_momentum_is_fourier_transform_of_position():
    eta = eta_state(1.0, 0.6)
    n, span = 256, 16.0
    # grid aligned so that FFT frequencies map onto a symmetric momentum grid
    x = (np.arange(n) - n // 2) * (2 * span / n)
    h = x[1] - x[0]
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    psi = eta.position_wavefunction(x1, x2)
    ft = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(psi))) * h * h / (2 * np.pi)
    p = np.fft.fftshift(np.fft.fftfreq(n, d=h)) * 2 * np.pi
    p1, p2 = np.meshgrid(p, p, indexing="ij")
    assert np.max(np.abs(ft - eta.momentum_wavefunction(p1, p2))) < 1e-9


def test_eta_rejects_bad_widths():
    with pytest.raises(InvalidInputError):
        eta_state(0.0, 1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0.0, 1.0))
def test_cat_weights_sum_to_one(alpha, p):
    ens = cat_ensemble(alpha, p)
    assert sum(ens.weights) == pytest.approx(1.0, abs=1e-12)
    assert all(w >= 0 for w in ens.weights)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 4.0))
def test_coherent_states_are_normalized(alpha):
    c = coherent_coefficients(alpha).coeffs
    assert np.linalg.norm(c) == pytest.approx(1.0, abs=1e-12)
