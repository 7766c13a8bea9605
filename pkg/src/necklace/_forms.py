"""Closed-form sum assemblies shared by the interaction kernels and the
reduced-energy model: the ring-interaction coefficients C0(K, d), C2(K, d)
and the 2x2 angular quadratic form built from pure cosecant sums.
"""
from __future__ import annotations

import math

import numpy as np

from .trigsums import SumSpec, sum_direct


def s_hat(k: int, n: int) -> float:
    """Shat_k(n) = sum_{j=1}^{n-1} (-1)^{j+1} csc^k(j pi/n)."""
    return sum_direct(SumSpec("alt_hat", k, n, 0.0))


def s_alt(k: int, n: int, x: float) -> float:
    """S_k(n, x) = sum_{j=0}^{n-1} (-1)^j (x^2 + sin^2(j pi/n))^{-k/2}."""
    return sum_direct(SumSpec("alt", k, n, x))


def c0_form(K: int, d: float) -> float:
    """Shat_1(K) + S_1(K, d): the coefficient of the first-order ring term."""
    return s_hat(1, K) + s_alt(1, K, d)


def c2_form(K: int, d: float) -> float:
    """Shat_1 + Shat_3 + S_1 - (d + sqrt(1+d^2))^2 S_3 + 3(d^2 + d^4) S_5,
    the coefficient of the third-order ring term."""
    root = d + math.sqrt(1.0 + d * d)
    return (
        s_hat(1, K)
        + s_hat(3, K)
        + s_alt(1, K, d)
        - root * root * s_alt(3, K, d)
        + 3.0 * (d * d + d**4) * s_alt(5, K, d)
    )


def a_gamma_form(K: int) -> np.ndarray:
    """The symmetric 2x2 quadratic form in (alpha_w, alpha_b) governing the
    angular dependence of the third-order ring term, assembled exactly from
    the pure cosecant sums S^o_1, S^o_3, S^o_5 and Shat^e_3."""
    s1o = sum_direct(SumSpec("odd", 1, K, 0.0))
    s3o = sum_direct(SumSpec("odd", 3, K, 0.0))
    s5o = sum_direct(SumSpec("odd", 5, K, 0.0))
    s3e_hat = sum_direct(SumSpec("even_hat", 3, K, 0.0))
    s3_hat = s3o - s3e_hat
    a11 = s3o - 2.0 * s1o + 3.0 * s3e_hat
    a12 = -3.0 * s3_hat + 3.0 * s1o
    a22 = 1.5 * (4.0 * s5o + s3o - 3.0 * s1o) + 3.0 * s3e_hat
    return np.array([[a11, a12], [a12, a22]])
