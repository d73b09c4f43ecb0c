import math

import numpy as np
import pytest
from scipy import integrate, special

from runup import _kernels_numba, _kernels_numpy
from runup.core import DomainRangeError, InvalidParameterError, make_bay
from runup.transforms import (
    QuadratureConfig, TruncationWarning, abel_recover, bessel_j, composite_gauss_legendre, gamma, hankel_moment,
    spectral_moments,
)

ORDERS = [0.0, 0.5, 1.0, 1.5, 1 / 3, 4 / 3, 0.25, 1.25, 2.0]


def test_bessel_closed_forms():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, abs=1e-15)
    assert bessel_j(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sin(1.0), abs=1e-15)
    assert bessel_j(0.5, 1.0) == pytest.approx(0.671397, abs=1e-6)
    assert bessel_j(1.5, 0.0) == 0.0


@pytest.mark.parametrize("nu", ORDERS)
def test_bessel_against_scipy(nu):
    rng = np.random.default_rng(7)
    x = np.concatenate([np.linspace(0, 30, 3001), rng.uniform(0, 1000, 3000), [1e3]])
    err = np.abs(bessel_j(nu, x) - special.jv(nu, x))
    assert err.max() <= 1e-12


def test_bessel_half_integer_closed_form_large_x():
    x = np.linspace(1, 1000, 4001)
    closed = np.sqrt(2 / (np.pi * x)) * (np.sin(x) / x - np.cos(x))  # J_{3/2}
    assert np.max(np.abs(bessel_j(1.5, x) - closed)) <= 1e-12


def test_bessel_domain():
    with pytest.raises(DomainRangeError):
        bessel_j(0.5, -1.0)
    with pytest.raises(InvalidParameterError):
        bessel_j(-0.5, 1.0)


@pytest.mark.parametrize("name", ["jv_array"])
def test_backends_agree_on_bessel(name):
    x = np.linspace(0, 500, 20001)
    for nu in ORDERS:
        a = getattr(_kernels_numba, name)(nu, x)
        b = getattr(_kernels_numpy, name)(nu, x)
        assert np.max(np.abs(a - b)) <= 5e-14


def test_backends_agree_on_moments_and_matrix():
    lam, w = composite_gauss_legendre(0, 4, 512)
    f = np.exp(-lam**2) * np.cos(3 * lam)
    k = np.linspace(0, 40, 300)
    a = _kernels_numba.hankel_moments(k, lam, w, f, 0.5, 1.5)
    b = _kernels_numpy.hankel_moments(k, lam, w, f, 0.5, 1.5)
    assert np.max(np.abs(a - b)) <= 1e-14
    r = np.linspace(0.01, 3, 40)
    np.testing.assert_allclose(_kernels_numba.bessel_matrix(1.5, r, k), _kernels_numpy.bessel_matrix(1.5, r, k),
                               rtol=0, atol=5e-14)


def test_gamma_matches_scipy():
    x = np.linspace(0.1, 20, 200)
    for v in x:
        assert gamma(v) == pytest.approx(special.gamma(v), rel=1e-13)


def test_quadrature_config_validation():
    with pytest.raises(InvalidParameterError):
        QuadratureConfig(k_max=-1.0)
    with pytest.raises(InvalidParameterError):
        QuadratureConfig(n_k=8)
    with pytest.raises(InvalidParameterError):
        QuadratureConfig(scheme="simpson")


def weber(k, nu):
    # int_0^inf t^(nu+1) exp(-t^2) J_nu(2 k t) dt = k^nu exp(-k^2) / 2
    return 0.5 * k**nu * math.exp(-k * k)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_weber_oracle_itself(k):
    # the closed form is checked against adaptive quadrature before use
    val, _ = integrate.quad(lambda t: t**1.5 * math.exp(-t * t) * special.jv(0.5, 2 * k * t), 0, 12, limit=400,
                            epsabs=1e-15, epsrel=1e-13)
    assert val == pytest.approx(weber(k, 0.5), rel=1e-10)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_hankel_moment_weber(k):
    lam = np.linspace(0, 8, 2001)
    got = hankel_moment(np.exp(-lam**2), lam, 0.5, 1.5, k)
    assert got == pytest.approx(weber(k, 0.5), rel=1e-8)


def test_hankel_moment_examples():
    lam = np.linspace(0, 8, 2001)
    assert hankel_moment(np.exp(-lam**2), lam, 0.5, 1.5, 1.0) == pytest.approx(0.183940, abs=1e-6)
    assert hankel_moment(np.exp(-lam**2), lam, 0.5, 1.5, 0.0) == 0.0
    assert np.all(hankel_moment(np.zeros_like(lam), lam, 0.5, 1.5, np.array([0.1, 1.0, 5.0])) == 0.0)


def test_hankel_moment_trapezoid_scheme():
    lam = np.linspace(0, 8, 4001)
    got = hankel_moment(np.exp(-lam**2), lam, 0.5, 1.5, 1.0, QuadratureConfig(scheme="trapezoid"))
    assert got == pytest.approx(weber(1.0, 0.5), rel=1e-6)


def test_hankel_moment_truncation_warning():
    lam = np.linspace(0, 2, 201)
    with pytest.warns(TruncationWarning):
        hankel_moment(np.exp(-lam), lam, 0.5, 1.5, 1.0)


def test_spectral_moments_closed_form(bay):
    # psi_proj = phi_proj = exp(-sigma): a(k) = k^nu e^{-k^2}, b(k) = k^(nu+1) e^{-k^2}
    s = np.linspace(0, 40, 4001)
    f = np.exp(-s)
    mom = spectral_moments(s, f, f, bay, QuadratureConfig(n_inner=2048))
    k = mom.k.nodes
    nu = bay.nu
    assert np.max(np.abs(mom.a - k**nu * np.exp(-k**2))) <= 1e-9
    assert np.max(np.abs(mom.b - k ** (nu + 1) * np.exp(-k**2))) <= 1e-9
    # adaptive cutoff keeps everything above 1e-10 of the peak
    assert mom.k_max > 5.0 and abs(mom.a[-1]) <= 1e-10 * np.max(np.abs(mom.a))


def test_spectral_moments_fixed_kmax(bay):
    s = np.linspace(0, 40, 4001)
    mom = spectral_moments(s, np.exp(-s), np.zeros_like(s), bay, QuadratureConfig(k_max=12.0, n_k=256))
    assert mom.k_max == pytest.approx(12.0, abs=0.01)  # last Gauss node
    assert len(mom.k) == 256 and np.all(mom.b == 0)


# Abel formulas


def abel_oracle(kind, F, lam, m):
    """Adaptive quadrature of the printed xi-form of the recovery integrals."""
    nu = 1.0 / m
    if kind == "psi":
        c = 2 * math.sqrt(math.pi) * special.gamma(1 + nu) / (lam * special.gamma(nu + 0.5))
        g = lambda xi: (1 - xi * math.pi / lam) ** (nu - 0.5) * (1 + xi * math.pi / lam) ** (nu - 0.5) * F(xi)
    else:
        c = 2 * math.sqrt(math.pi) * special.gamma(2 + nu) / (lam ** (2 + 2 * nu) * special.gamma(1.5 + nu))
        g = lambda xi: (lam**2 - math.pi**2 * xi**2) ** (nu + 0.5) * F(xi)
    val, _ = integrate.quad(g, 0, lam / math.pi, limit=500, epsabs=0, epsrel=1e-13)
    return c * val


def pulse(xi):
    return np.exp(-4 * xi**2) * np.cos(2 * np.pi * xi**2)


def test_abel_unit_trace_m2():
    bay = make_bay(2)
    xi = np.linspace(0, 4, 101)
    lam = np.linspace(0.1, 10, 60)
    got = abel_recover("psi", xi, np.ones_like(xi), lam, bay)
    assert np.max(np.abs(got - 1.0)) <= 1e-8


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 3.0, 5.0])
def test_abel_unit_traces_any_m(m):
    bay = make_bay(m)
    xi = np.linspace(0, 4, 101)
    lam = np.array([0.3, 1.0, 7.0])
    np.testing.assert_allclose(abel_recover("psi", xi, np.ones_like(xi), lam, bay), 1.0, rtol=1e-10)
    np.testing.assert_allclose(abel_recover("phi", xi, np.ones_like(xi), lam, bay), 1.0, rtol=1e-10)


@pytest.mark.parametrize("kind", ["psi", "phi"])
@pytest.mark.parametrize("m", [2.0, 3.0])
def test_abel_against_adaptive_quadrature(kind, m):
    bay = make_bay(m)
    xi = np.linspace(0, 1, 20001)
    for lam in (0.5, 1.0, 2.0):
        got = abel_recover(kind, xi, pulse(xi), lam, bay)
        assert got == pytest.approx(abel_oracle(kind, pulse, lam, m), rel=1e-8)


def test_abel_singular_kernel_converges():
    bay = make_bay(4.0)  # exponent 1/4 - 1/2 < 0
    xi = np.linspace(0, 1, 4001)
    lam = np.array([0.5, 1.5, 3.0])
    coarse = abel_recover("psi", xi, pulse(xi), lam, bay, QuadratureConfig(n_abel=48))
    fine = abel_recover("psi", xi, pulse(xi), lam, bay, QuadratureConfig(n_abel=96))
    assert np.max(np.abs(coarse - fine) / np.abs(fine)) < 1e-6


def test_abel_zero_and_errors():
    bay = make_bay(2)
    xi = np.linspace(0, 1, 11)
    assert np.all(abel_recover("psi", xi, np.zeros(11), np.array([0.5, 1.0]), bay) == 0)
    with pytest.raises(DomainRangeError):
        abel_recover("psi", xi, np.ones(11), 4.0, bay)
    with pytest.raises(DomainRangeError):
        abel_recover("psi", xi + 0.1, np.ones(11), 1.0, bay)
    with pytest.raises(InvalidParameterError):
        abel_recover("eta", xi, np.ones(11), 1.0, bay)
