"""Finite cosecant-power sums: direct evaluation, the contour-integral
representation of the alternating k=1 sum, exponential asymptotics, and the
leading cosecant-sum constants, plus two auxiliary bounded sums.

Variants, each over offsets x >= 0 with n even:

    odd       S^o_k(n,x)    = sum_{j=0}^{n/2-1} (x^2 + sin^2((2j+1) pi/n))^{-k/2}
    even      S^e_k(n,x)    = sum_{j=0}^{n/2-1} (x^2 + sin^2(2j pi/n))^{-k/2}
    even_hat  Shat^e_k(n,x) = sum_{j=1}^{n/2-1} (x^2 + sin^2(2j pi/n))^{-k/2}
    alt       S_k(n,x)      = S^e_k - S^o_k
    alt_hat   Shat_k(n,x)   = S^o_k - Shat^e_k

``even`` and ``alt`` contain the singular j=0 term and reject x = 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath as mp
import scipy.integrate

from .errors import AccuracyError, DomainError, RegimeWarning, UnsupportedError
from .special import EULER_GAMMA, ZETA3, ZETA5

VARIANTS = ("odd", "even", "even_hat", "alt", "alt_hat")

# Alternating sums are exponentially small in n*x while their terms are O(1);
# below this cancellation level the float pathway is recomputed in escalating
# multiprecision (see sum_direct).
_CANCEL_THRESHOLD = 1e-8


@dataclass(frozen=True)
class SumSpec:
    variant: str
    k: int
    n: int
    x: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.k not in (1, 3, 5):
            raise DomainError(f"k must be one of 1, 3, 5, got {self.k}")
        if self.n < 4 or self.n % 2 != 0:
            raise DomainError(f"n must be an even integer >= 4, got {self.n}")
        if self.x < 0:
            raise DomainError("x must be >= 0")
        if self.x == 0.0 and self.variant in ("even", "alt"):
            raise DomainError(
                f"variant {self.variant!r} contains the singular j=0 term at x=0"
            )


def _term_indices(spec: SumSpec):
    """Yield (j, sign) pairs where the term is (x^2 + sin^2(j pi/n))^{-k/2}."""
    n = spec.n
    if spec.variant == "odd":
        for j in range(0, n, 2):
            yield j + 1, 1.0
    elif spec.variant == "even":
        for j in range(0, n, 2):
            yield j, 1.0
    elif spec.variant == "even_hat":
        for j in range(2, n, 2):
            yield j, 1.0
    elif spec.variant == "alt":
        for j in range(n):
            yield j, 1.0 if j % 2 == 0 else -1.0
    else:  # alt_hat
        for j in range(1, n):
            yield j, 1.0 if j % 2 == 1 else -1.0


def _sum_mp(spec: SumSpec, dps: int):
    with mp.workdps(dps):
        x2 = mp.mpf(spec.x) ** 2
        step = mp.pi / spec.n
        khalf = mp.mpf(spec.k) / 2
        total = mp.mpf(0)
        abssum = mp.mpf(0)
        for j, sign in _term_indices(spec):
            t = (x2 + mp.sin(j * step) ** 2) ** (-khalf)
            total += sign * t
            abssum += t
        return total, abssum


def sum_direct(spec: SumSpec) -> float:
    """The finite sum, by compensated summation.

    When the alternating cancellation exceeds what double precision can
    resolve (|sum| below 1e-8 of the term magnitude), the sum is recomputed
    in multiprecision with doubling working precision until the result is
    resolved, then rounded back to float.
    """
    x2 = spec.x * spec.x
    step = math.pi / spec.n
    khalf = spec.k / 2.0
    terms = []
    for j, sign in _term_indices(spec):
        s = math.sin(j * step)
        terms.append(sign * (x2 + s * s) ** (-khalf))
    total = math.fsum(terms)
    abssum = math.fsum(abs(t) for t in terms)
    if abs(total) >= _CANCEL_THRESHOLD * abssum:
        return total
    dps = 40
    while dps <= 640:
        total_mp, abs_mp = _sum_mp(spec, dps)
        if abs(total_mp) > abs_mp * mp.mpf(10) ** (-(dps - 15)):
            return float(total_mp)
        dps *= 2
    raise AccuracyError(
        "alternating sum unresolved at 640 digits", best=float(total_mp)
    )


def s1_contour(n: int, x: float) -> float:
    """The alternating k=1 sum S_1(n, x) via its contour-integral form
    (2n/pi) int_{asinh x}^inf csch(n t) / sqrt(sinh^2 t - x^2) dt.

    The endpoint inverse-square-root singularity is removed by the
    substitution sinh t = x cosh u, and the dominant factor e^{-n asinh x}
    is pulled out of csch so the quadrature runs in relative mode.
    """
    if n < 4 or n % 2 != 0:
        raise DomainError(f"n must be an even integer >= 4, got {n}")
    if x <= 0.0:
        raise DomainError("s1_contour requires x > 0")
    y0 = n * math.asinh(x)
    if y0 > 700.0:
        # below double-precision underflow; the value is indistinguishable from 0
        return 0.0
    # truncate where the integrand has decayed by e^{-45}
    arg = math.sinh(math.asinh(x) + 45.0 / n) / x
    ucut = math.acosh(max(arg, 1.0 + 1e-15))

    def g(u: float) -> float:
        ch = math.cosh(u)
        y = n * math.asinh(x * ch)
        return 2.0 * math.exp(y0 - y) / (
            (1.0 - math.exp(-2.0 * y)) * math.sqrt(1.0 + x * x * ch * ch)
        )

    val, err = scipy.integrate.quad(g, 0.0, ucut, epsabs=0.0, epsrel=1e-11, limit=200)
    if err > 1e-9 * abs(val):
        raise AccuracyError("contour quadrature did not converge", best=val)
    return (2.0 * n / math.pi) * math.exp(-y0) * val


def s_asym(k: int, n: int, x: float) -> float:
    """Exponential asymptotics of the alternating sums S_k(n, x) for n*x large:

    S_1 ~ sqrt(8/pi) n (nx)^{-1/2} e^{-nx}
    S_3 ~ sqrt(8/pi) n^3 (nx)^{-3/2} e^{-nx}
    S_5 ~ (1/3) sqrt(8/pi) n^5 (nx)^{-5/2} e^{-nx}
    """
    if k not in (1, 3, 5):
        raise DomainError(f"k must be one of 1, 3, 5, got {k}")
    if n < 4 or n % 2 != 0:
        raise DomainError(f"n must be an even integer >= 4, got {n}")
    if x <= 0.0:
        raise DomainError("s_asym requires x > 0")
    nx = n * x
    if nx < 5.0:
        warnings.warn(
            f"n*x = {nx:.3g} < 5: outside the asymptotic regime", RegimeWarning
        )
    pref = math.sqrt(8.0 / math.pi)
    if k == 1:
        return pref * n * nx ** -0.5 * math.exp(-nx)
    if k == 3:
        return pref * n**3 * nx ** -1.5 * math.exp(-nx)
    return pref / 3.0 * n**5 * nx ** -2.5 * math.exp(-nx)


_CSC_LEADING = {
    ("odd", 3): lambda n: 7.0 * ZETA3 * n**3 / (4.0 * math.pi**3),
    ("odd", 5): lambda n: 93.0 * ZETA5 * n**5 / (48.0 * math.pi**5),
    ("even_hat", 3): lambda n: ZETA3 * n**3 / (4.0 * math.pi**3),
    ("alt_hat", 1): lambda n: n / math.pi * math.log(4.0),
}


def csc_asym(variant: str, k: int, n: int) -> float:
    """Leading term of the pure cosecant sums (x = 0) for the four supported
    (variant, k) pairs."""
    try:
        fn = _CSC_LEADING[(variant, k)]
    except KeyError:
        raise UnsupportedError(
            f"no leading constant provided for ({variant!r}, k={k})"
        ) from None
    if n < 4 or n % 2 != 0:
        raise DomainError(f"n must be an even integer >= 4, got {n}")
    return fn(n)


def csc_full_sum(m: int) -> float:
    """sum_{j=1}^{m-1} csc(j pi / m); approaches (2m/pi)(log(2m/pi) + gamma0)."""
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    return math.fsum(1.0 / math.sin(j * math.pi / m) for j in range(1, m))


def csc_full_sum_asym(m: int) -> float:
    """The (2m/pi)(log(2m/pi) + gamma0) approximation of csc_full_sum."""
    return 2.0 * m / math.pi * (math.log(2.0 * m / math.pi) + EULER_GAMMA)


@dataclass(frozen=True)
class RoughBoundReport:
    total: float
    denominator: float
    ratio: float


def rough_bound_check(k: int, n: int, x: float) -> RoughBoundReport:
    """Ratio of S^o_k + S^e_k against its coarse bound n|log x| (k=1) or
    n x^{1-k} (k >= 2), for x in (0, 1].  The caller asserts boundedness."""
    if not 0.0 < x <= 1.0:
        raise DomainError("rough_bound_check requires x in (0, 1]")
    total = sum_direct(SumSpec("odd", k, n, x)) + sum_direct(SumSpec("even", k, n, x))
    if k == 1:
        denom = n * max(abs(math.log(x)), 1.0)
    else:
        denom = n * x ** (1 - k)
    return RoughBoundReport(total=total, denominator=denom, ratio=total / denom)


def appendix_h_sum(m: int, theta: float, h: float) -> float:
    """sum_{j=0}^{m-1} (h^2 + sin^2(j pi/m - theta/2))^{-1/2}.

    Intended for h in (m^{-1/2}, 1/3) and theta in (0, pi/m), where it is
    bounded by a constant times m log(1/h); other inputs get a warning."""
    if h <= 0.0:
        raise DomainError("appendix_h_sum requires h > 0")
    if not (m ** -0.5 < h < 1.0 / 3.0) or not (0.0 < theta < math.pi / m):
        warnings.warn(
            "outside the intended range h in (m^{-1/2}, 1/3), theta in (0, pi/m)",
            RegimeWarning,
        )
    h2 = h * h
    return math.fsum(
        (h2 + math.sin(j * math.pi / m - theta / 2.0) ** 2) ** -0.5
        for j in range(m)
    )
