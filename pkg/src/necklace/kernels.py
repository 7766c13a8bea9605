"""Sector interaction functions: the alternating Newtonian image sum, the
regular part of the ball Green's function and its alternating extension, the
placed rescaled bubble and its image-bubble sum, with exact closed forms and
ring asymptotics for each.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .crown import ProfileHandle, fd_gradient, fd_hessian
from .errors import DomainError
from .geometry import CONJ_MATRIX, Point3, SectorConfig, rotation_matrix
from .trigsums import SumSpec, sum_direct

_COINCIDENT_TOL = 1e-13


def _ext_images(cfg: SectorConfig) -> List[Tuple[np.ndarray, float]]:
    """(matrix, sign) pairs of the alternating extension: + rotations by
    4j theta0, - conjugation followed by rotations by (4j+2) theta0."""
    t0 = cfg.theta0
    out: List[Tuple[np.ndarray, float]] = []
    for j in range(cfg.K // 2):
        out.append((rotation_matrix(4 * j * t0), 1.0))
        out.append((rotation_matrix((4 * j + 2) * t0) @ CONJ_MATRIX, -1.0))
    return out


def _tail_images(cfg: SectorConfig) -> List[Tuple[np.ndarray, float]]:
    """The extension images without the identity; signs flipped so that
    sum_s s u(Mz) equals u(z) - extension(u)(z)."""
    return [(m, -s) for (m, s) in _ext_images(cfg)
            if not np.allclose(m, np.eye(3))]


@dataclass(frozen=True)
class KernelReport:
    direct: float
    closed_form: float
    asymptotic: float
    abs_err_dc: float = field(default=math.nan)
    abs_err_ca: float = field(default=math.nan)

    @staticmethod
    def build(direct: float, closed_form: float, asymptotic: float) -> "KernelReport":
        return KernelReport(
            direct=direct, closed_form=closed_form, asymptotic=asymptotic,
            abs_err_dc=abs(direct - closed_form),
            abs_err_ca=abs(closed_form - asymptotic),
        )


@dataclass(frozen=True)
class PlacedBubble:
    """One rescaled bubble placed in the sector.

    The profile-dependent scalars are the value ``q_hat`` at the shifted
    anchor, the rotated gradient ``w`` (stored as modulus and angle; third
    component is zero), and the rotated Hessian ``W``.  The placement is the
    in-plane point ``b`` (modulus and angle) with the frame rotation offset
    ``beta_hat``; the construction forces alpha_w == beta_hat.
    """

    eps: float
    a: float
    q_hat: float
    w_abs: float
    alpha_w: float
    b_abs: float
    alpha_b: float
    beta_hat: float
    W: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    profile: Optional[ProfileHandle] = None
    xi_hat: Optional[Point3] = None
    theta_star: float = 0.0

    def __post_init__(self):
        if self.eps <= 0:
            raise DomainError("eps must be positive")
        if not 0.0 < self.b_abs < 1.0:
            raise DomainError("|b| must lie in (0, 1)")
        if abs(self.alpha_w - self.beta_hat) > 1e-12:
            raise DomainError("alpha_w must equal beta_hat by the frame convention")
        W = np.asarray(self.W, dtype=float)
        if W.shape != (3, 3) or not np.allclose(W, W.T, atol=1e-10):
            raise DomainError("W must be a symmetric 3x3 matrix")

    @property
    def b_point(self) -> Point3:
        return Point3(self.b_abs * math.cos(self.alpha_b),
                      self.b_abs * math.sin(self.alpha_b), 0.0)

    @property
    def w_vec(self) -> np.ndarray:
        return self.w_abs * np.array(
            [math.cos(self.alpha_w), math.sin(self.alpha_w), 0.0]
        )

    @property
    def d(self) -> float:
        return (1.0 - self.b_abs**2) / (2.0 * self.b_abs)

    @property
    def beta(self) -> float:
        return self.theta_star + self.beta_hat


def place_bubble(eps: float, a: float, b_abs: float, alpha_b: float,
                 beta_hat: float, profile: ProfileHandle,
                 xi: Point3) -> PlacedBubble:
    """Compute the profile scalars (q_hat, w, W) at xi_hat = xi + a nu(xi),
    nu the unit gradient direction, and assemble a PlacedBubble.

    The frame rotation beta = theta_star + beta_hat is derived from the
    profile: theta_star is chosen so that the rotated gradient w = R_beta^T
    grad q(xi_hat) points along the in-plane angle beta_hat, which is the
    convention the PlacedBubble scalars encode (alpha_w == beta_hat)."""
    xi_arr = xi.as_array()
    g0 = fd_gradient(profile.fn, xi_arr)
    n0 = float(np.linalg.norm(g0))
    if n0 == 0.0:
        raise DomainError("profile gradient vanishes at the anchor")
    xi_hat_arr = xi_arr + a * g0 / n0
    grad = fd_gradient(profile.fn, xi_hat_arr)
    beta = math.atan2(grad[1], grad[0]) - beta_hat
    theta_star = beta - beta_hat
    rot = rotation_matrix(beta)
    w = rot.T @ grad
    hess = fd_hessian(profile.fn, xi_hat_arr)
    W = rot.T @ hess @ rot
    W = 0.5 * (W + W.T)
    return PlacedBubble(
        eps=eps, a=a, q_hat=float(np.asarray(profile.fn(xi_hat_arr))),
        w_abs=float(np.hypot(w[0], w[1])), alpha_w=beta_hat,
        b_abs=b_abs, alpha_b=alpha_b, beta_hat=beta_hat, W=W,
        profile=profile, xi_hat=Point3.from_array(xi_hat_arr),
        theta_star=theta_star,
    )


# ---------------------------------------------------------------------------
# alternating Newtonian image sum


def gamma_direct(z: Point3, p: Point3, cfg: SectorConfig) -> float:
    """1/|zbar e^{2i t0} - p| - sum_{j=1}^{K/2-1} (1/|z e^{4ij t0} - p|
    - 1/|zbar e^{(4j+2)i t0} - p|): the image-interaction kernel."""
    zv, pv = z.as_array(), p.as_array()
    terms = []
    for mat, sign in _tail_images(cfg):
        r = float(np.linalg.norm(mat @ zv - pv))
        if r < _COINCIDENT_TOL:
            raise DomainError("evaluation point coincides with an image point")
        terms.append(sign / r)
    return math.fsum(terms)


def gamma_bb(b: Point3, cfg: SectorConfig) -> KernelReport:
    """Diagonal value gamma(b, b) with its exact cosecant resummation and the
    alpha_b = 0 asymptotic Shat_1(K)/(2|b|)."""
    babs = math.hypot(b.z1, b.z2)
    alpha_b = math.atan2(b.z2, b.z1)
    if abs(b.z3) > 1e-12:
        raise DomainError("b must lie in the z1 z2 plane")
    if babs <= 0.5:
        raise DomainError("|b| must exceed 1/2")
    t0 = cfg.theta0
    if abs(alpha_b) >= t0 / 2.0:
        raise DomainError("|alpha_b| must be below theta0/2")
    direct = gamma_direct(b, b, cfg)
    terms = [1.0 / math.sin((2 * j + 1) * t0 - alpha_b) for j in range(cfg.K // 2)]
    terms += [-1.0 / math.sin(2 * j * t0) for j in range(1, cfg.K // 2)]
    closed = math.fsum(terms) / (2.0 * babs)
    asym = sum_direct(SumSpec("alt_hat", 1, cfg.K, 0.0)) / (2.0 * babs)
    return KernelReport.build(direct, closed, asym)


# ---------------------------------------------------------------------------
# regular part of the ball Green's function


def h0(z: Point3, p: Point3) -> float:
    """(1 - 2 z.p + |z|^2 |p|^2)^{-1/2}."""
    zv, pv = z.as_array(), p.as_array()
    rad = 1.0 - 2.0 * float(zv @ pv) + float(zv @ zv) * float(pv @ pv)
    if rad <= 0.0:
        raise DomainError("nonpositive radicand in h0")
    return rad**-0.5


def _h0_mat(v: np.ndarray, pv: np.ndarray) -> float:
    rad = 1.0 - 2.0 * float(v @ pv) + float(v @ v) * float(pv @ pv)
    if rad <= 0.0:
        raise DomainError("nonpositive radicand in h0")
    return rad**-0.5


def h0e(z: Point3, p: Point3, cfg: SectorConfig) -> float:
    """The alternating extension of h0 in its first slot."""
    zv, pv = z.as_array(), p.as_array()
    return math.fsum(
        sign * _h0_mat(mat @ zv, pv) for mat, sign in _ext_images(cfg)
    )


def h0e_bb(b: Point3, cfg: SectorConfig) -> KernelReport:
    """Diagonal value h0e(b, b) with its exact shifted-sum closed form and the
    alpha_b = 0 asymptotic S_1(K, d)/(2|b|), d = (1 - |b|^2)/(2|b|)."""
    babs = math.hypot(b.z1, b.z2)
    alpha_b = math.atan2(b.z2, b.z1)
    if abs(b.z3) > 1e-12:
        raise DomainError("b must lie in the z1 z2 plane")
    if not 0.0 < babs < 1.0:
        raise DomainError("|b| must lie in (0, 1)")
    t0 = cfg.theta0
    if abs(alpha_b) > t0 / 2.0:
        raise DomainError("|alpha_b| must be at most theta0/2")
    d = (1.0 - babs * babs) / (2.0 * babs)
    direct = h0e(b, b, cfg)
    terms = []
    for j in range(cfg.K // 2):
        terms.append((d * d + math.sin(2 * j * t0) ** 2) ** -0.5)
        terms.append(-((d * d + math.sin((2 * j + 1) * t0 - alpha_b) ** 2) ** -0.5))
    closed = math.fsum(terms) / (2.0 * babs)
    asym = sum_direct(SumSpec("alt", 1, cfg.K, d)) / (2.0 * babs)
    return KernelReport.build(direct, closed, asym)


# ---------------------------------------------------------------------------
# first and second derivatives along the placement direction


def _grad_newton_closed(A: PlacedBubble, cfg: SectorConfig, slot: str) -> float:
    bv = A.b_point.as_array()
    w = A.w_vec
    total = []
    for mat, sign in _tail_images(cfg):
        v = mat @ bv
        r = v - bv
        rn = float(np.linalg.norm(r))
        if slot == "p":
            total.append(sign * float(r @ w) / rn**3)
        else:
            total.append(-sign * float(r @ (mat @ w)) / rn**3)
    return math.fsum(total)


def _grad_h0e_closed(A: PlacedBubble, cfg: SectorConfig, slot: str) -> float:
    bv = A.b_point.as_array()
    w = A.w_vec
    b2 = float(bv @ bv)
    total = []
    for mat, sign in _ext_images(cfg):
        v = mat @ bv
        F = _h0_mat(v, bv)
        if slot == "p":
            total.append(sign * F**3 * float((v - float(v @ v) * bv) @ w))
        else:
            total.append(sign * F**3 * float((bv - float(v @ v) * v) @ (mat @ w)))
    return math.fsum(total)


def _hess_newton_closed(A: PlacedBubble, cfg: SectorConfig) -> float:
    bv = A.b_point.as_array()
    w = A.w_vec
    total = []
    for mat, sign in _tail_images(cfg):
        v = mat @ bv
        r = v - bv
        rn = float(np.linalg.norm(r))
        mw = mat @ w
        total.append(
            sign * (float(mw @ w) / rn**3
                    - 3.0 * float(r @ mw) * float(r @ w) / rn**5)
        )
    return math.fsum(total)


def _hess_h0e_closed(A: PlacedBubble, cfg: SectorConfig) -> float:
    bv = A.b_point.as_array()
    w = A.w_vec
    total = []
    for mat, sign in _ext_images(cfg):
        v = mat @ bv
        v2 = float(v @ v)
        F = _h0_mat(v, bv)
        mw = mat @ w
        total.append(
            sign * (3.0 * F**5 * float((bv - v2 * v) @ mw)
                    * float((v - v2 * bv) @ w)
                    + F**3 * (float(mw @ w) - 2.0 * float(v @ mw) * float(bv @ w)))
        )
    return math.fsum(total)


def _direct_fn(kind: str, cfg: SectorConfig):
    if kind == "gamma":
        return lambda zv, pv: gamma_direct(
            Point3.from_array(zv), Point3.from_array(pv), cfg
        )
    if kind == "h0e":
        return lambda zv, pv: h0e(
            Point3.from_array(zv), Point3.from_array(pv), cfg
        )
    raise DomainError(f"unknown kernel kind {kind!r}")


def kernel_grad(kind: str, slot: str, A: PlacedBubble, cfg: SectorConfig,
                fd_step: float = 1e-6) -> KernelReport:
    """w-directional derivative of the kernel in the chosen slot at (b, b):
    finite difference vs exact analytic sum vs the alpha = 0 cosecant form."""
    if slot not in ("z", "p"):
        raise DomainError(f"slot must be 'z' or 'p', got {slot!r}")
    f = _direct_fn(kind, cfg)
    bv = A.b_point.as_array()
    w = A.w_vec
    what = w / np.linalg.norm(w)
    h = fd_step
    if slot == "z":
        direct = A.w_abs * (f(bv + h * what, bv) - f(bv - h * what, bv)) / (2 * h)
    else:
        direct = A.w_abs * (f(bv, bv + h * what) - f(bv, bv - h * what)) / (2 * h)
    if kind == "gamma":
        closed = _grad_newton_closed(A, cfg, slot)
        asym = -A.w_abs * sum_direct(SumSpec("alt_hat", 1, cfg.K, 0.0)) / (
            4.0 * A.b_abs**2
        )
    else:
        closed = _grad_h0e_closed(A, cfg, slot)
        d = A.d
        s1 = sum_direct(SumSpec("alt", 1, cfg.K, d))
        s3 = sum_direct(SumSpec("alt", 3, cfg.K, d))
        asym = A.w_abs / (4.0 * A.b_abs**2) * (
            -s1 + d * math.sqrt(1.0 + d * d) * s3
        )
    return KernelReport.build(direct, closed, asym)


def _mixed_second_difference(f, bv, what, h: float) -> float:
    return (
        f(bv + h * what, bv + h * what)
        - f(bv + h * what, bv - h * what)
        - f(bv - h * what, bv + h * what)
        + f(bv - h * what, bv - h * what)
    ) / (4.0 * h * h)


def kernel_hess(kind: str, A: PlacedBubble, cfg: SectorConfig,
                fd_step: float = 1e-4, tol: float = 1e-3) -> KernelReport:
    """w^T (mixed z/p Hessian) w at (b, b): second difference (with Richardson
    refinement when needed) vs exact analytic sum vs the ring asymptotic."""
    f = _direct_fn(kind, cfg)
    bv = A.b_point.as_array()
    w = A.w_vec
    what = w / np.linalg.norm(w)
    if kind == "gamma":
        closed = _hess_newton_closed(A, cfg)
        from ._forms import a_gamma_form

        s1h = sum_direct(SumSpec("alt_hat", 1, cfg.K, 0.0))
        s3h = sum_direct(SumSpec("alt_hat", 3, cfg.K, 0.0))
        alpha = np.array([A.alpha_w, A.alpha_b])
        quad = float(alpha @ a_gamma_form(cfg.K) @ alpha)
        asym = A.w_abs**2 / (8.0 * A.b_abs**3) * (s1h + s3h + quad)
    else:
        closed = _hess_h0e_closed(A, cfg)
        d = A.d
        s1 = sum_direct(SumSpec("alt", 1, cfg.K, d))
        s3 = sum_direct(SumSpec("alt", 3, cfg.K, d))
        s5 = sum_direct(SumSpec("alt", 5, cfg.K, d))
        root = d + math.sqrt(1.0 + d * d)
        asym = A.w_abs**2 / (8.0 * A.b_abs**3) * (
            s1 - root * root * s3 + 3.0 * (d * d + d**4) * s5
        )
    direct = A.w_abs**2 * _mixed_second_difference(f, bv, what, fd_step)
    if abs(direct - closed) > tol:
        finer = A.w_abs**2 * _mixed_second_difference(f, bv, what, fd_step / 2.0)
        direct = (4.0 * finer - direct) / 3.0
    return KernelReport.build(direct, closed, asym)


# ---------------------------------------------------------------------------
# the placed bubble and its image sum


def q_a(z: Point3, A: PlacedBubble) -> float:
    """The placed bubble eps^{1/2}/|z-b| q(eps R_beta (z-b)/|z-b|^2 + xi_hat).

    Uses the attached profile when available, otherwise the second-order
    far-field expansion in the stored scalars."""
    zv = z.as_array()
    bv = A.b_point.as_array()
    r = zv - bv
    rn = float(np.linalg.norm(r))
    if rn < _COINCIDENT_TOL:
        raise DomainError("q_a is undefined at the placement point")
    if A.profile is not None and A.xi_hat is not None:
        rot = rotation_matrix(A.beta)
        inner = A.eps * (rot @ r) / rn**2 + A.xi_hat.as_array()
        return math.sqrt(A.eps) / rn * float(np.asarray(A.profile.fn(inner)))
    return q_a_expansion(z, A)


def q_a_expansion(z: Point3, A: PlacedBubble) -> float:
    """Far-field expansion (eps^{1/2}/|z-b|)[q_hat + eps w.(z-b)/|z-b|^2
    + eps^2 (z-b)^T W (z-b)/(2 |z-b|^4)], valid for |z-b| >= eps."""
    zv = z.as_array()
    bv = A.b_point.as_array()
    r = zv - bv
    rn = float(np.linalg.norm(r))
    if rn < _COINCIDENT_TOL:
        raise DomainError("expansion undefined at the placement point")
    W = np.asarray(A.W, dtype=float)
    bracket = (
        A.q_hat
        + A.eps * float(A.w_vec @ r) / rn**2
        + A.eps**2 * float(r @ W @ r) / (2.0 * rn**4)
    )
    return math.sqrt(A.eps) / rn * bracket


def t_a(z: Point3, A: PlacedBubble, cfg: SectorConfig) -> KernelReport:
    """The image-bubble sum of q_a over the sector reflections, with its
    kernel expansion
    eps^{1/2} q_hat gamma + eps^{3/2} w.grad_p gamma
    + (1/6) eps^{5/2} W : d2_p gamma
    as the closed form, and the first two orders as the asymptotic."""
    zv = z.as_array()
    bv = A.b_point.as_array()
    w = A.w_vec
    W = np.asarray(A.W, dtype=float)
    trW = float(np.trace(W))
    direct_terms = []
    g_terms = []
    g1_terms = []
    g2_terms = []
    for mat, sign in _tail_images(cfg):
        v = mat @ zv
        direct_terms.append(sign * q_a(Point3.from_array(v), A))
        r = v - bv
        rn = float(np.linalg.norm(r))
        g_terms.append(sign / rn)
        g1_terms.append(sign * float(r @ w) / rn**3)
        g2_terms.append(sign * (-trW / rn**3 + 3.0 * float(r @ W @ r) / rn**5))
    direct = math.fsum(direct_terms)
    e = A.eps
    lead = math.sqrt(e) * A.q_hat * math.fsum(g_terms)
    grad_term = e**1.5 * math.fsum(g1_terms)
    hess_term = e**2.5 / 6.0 * math.fsum(g2_terms)
    closed = lead + grad_term + hess_term
    asym = lead + grad_term
    return KernelReport.build(direct, closed, asym)
