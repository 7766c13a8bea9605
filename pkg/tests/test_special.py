import math

import numpy as np
import pytest
import scipy.special

from necklace.errors import AccuracyError, DomainError, UnsupportedError
from necklace.special import (
    EULER_GAMMA,
    ZETA3,
    ZETA5,
    QuadratureConfig,
    bessel_k0,
    bessel_k0_prime,
    elliptic_k,
    euler_gamma,
    integrate,
    zeta_const,
)


def _zeta_series(s: float, terms: int = 200_000) -> float:
    """Independent oracle: direct series with an Euler-Maclaurin tail."""
    n = np.arange(1, terms, dtype=float)
    head = float(np.sum(n**-s))
    N = float(terms)
    return head + N ** (1 - s) / (s - 1) + N**-s / 2.0 + s * N ** (-s - 1) / 12.0


def _gamma_series(terms: int = 200_000) -> float:
    n = np.arange(1, terms + 1, dtype=float)
    harmonic = float(np.sum(1.0 / n))
    N = float(terms)
    return harmonic - math.log(N) - 1.0 / (2.0 * N) + 1.0 / (12.0 * N * N)


def test_zeta_constants_reproduced_from_series():
    assert zeta_const(3) == pytest.approx(_zeta_series(3.0), abs=1e-13)
    assert zeta_const(5) == pytest.approx(_zeta_series(5.0), abs=1e-13)
    with pytest.raises(UnsupportedError):
        zeta_const(7)


def test_euler_gamma_ten_digits():
    assert euler_gamma() == pytest.approx(_gamma_series(), abs=1e-10)
    assert EULER_GAMMA == euler_gamma()


def test_sinh_moment_integral():
    """int_0^inf t^2/sinh t dt = (7/2) zeta(3)."""
    val = integrate(lambda t: t * t / math.sinh(t) if t > 0 else 0.0, 0.0, math.inf)
    assert val == pytest.approx(3.5 * ZETA3, abs=1e-10)


def test_integrate_finite_interval():
    assert integrate(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)


def test_integrate_rejects_bad_limits():
    with pytest.raises(DomainError):
        integrate(math.sin, 1.0, 1.0)


def test_integrate_accuracy_error_carries_best():
    with pytest.raises(AccuracyError) as exc:
        integrate(lambda t: math.cos(1e4 * t * t),
                  0.0, 50.0, QuadratureConfig(max_subdivisions=2))
    assert hasattr(exc.value, "best")


def test_quadrature_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(max_subdivisions=0)


@pytest.mark.parametrize("sigma", [0.0, 0.3, 0.6, 0.89, 0.9])
def test_elliptic_k_quadrature_branch(sigma):
    assert elliptic_k(sigma) == pytest.approx(
        scipy.special.ellipkm1(1.0 - sigma * sigma), rel=1e-11
    )


@pytest.mark.parametrize("sigma", [0.901, 0.95, 0.99, 0.9999, 0.999999999])
def test_elliptic_k_series_branch(sigma):
    mc = (1.0 - sigma) * (1.0 + sigma)
    assert elliptic_k(sigma) == pytest.approx(scipy.special.ellipkm1(mc), rel=1e-13)


def test_elliptic_k_domain():
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            elliptic_k(bad)


@pytest.mark.parametrize("t", [0.01, 0.1, 1.0, 5.0, 29.9, 30.1, 50.0, 200.0])
def test_bessel_k0_both_branches(t):
    assert bessel_k0(t) == pytest.approx(scipy.special.k0(t), rel=1e-10)


@pytest.mark.parametrize("t", [0.05, 0.5, 2.0, 20.0, 40.0, 100.0])
def test_bessel_k0_prime(t):
    assert bessel_k0_prime(t) == pytest.approx(-scipy.special.k1(t), rel=1e-9)
    assert bessel_k0_prime(t) < 0.0


def test_bessel_domain():
    for fn in (bessel_k0, bessel_k0_prime):
        with pytest.raises(DomainError):
            fn(0.0)
        with pytest.raises(DomainError):
            fn(-1.0)
