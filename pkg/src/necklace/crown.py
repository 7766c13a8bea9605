"""The crown approximate solution: a positive bubble at the origin crowned by
m negative bubbles on a ring, its explicit first correction, the midpoint
positivity estimate, and the six linearization-kernel evaluators of the
placed-bubble family.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import DomainError, NearPoleWarning
from .geometry import Point3, rotation_matrix
from .trigsums import csc_full_sum

TALENTI_AMP = 3.0**0.25

PointLike = Union[Point3, np.ndarray]


def _as_array(z: PointLike) -> np.ndarray:
    if isinstance(z, Point3):
        return z.as_array()
    return np.asarray(z, dtype=float)


@dataclass(frozen=True)
class CrownParams:
    """Ring data: m bubbles of concentration mu on the circle of radius
    sqrt(1 - mu^2), equally spaced in the z1 z2 plane."""

    m: int
    mu: float
    d: float
    xi: Tuple[Point3, ...]

    @property
    def ring_radius(self) -> float:
        return math.sqrt(1.0 - self.mu * self.mu)

    def centers_array(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.xi])

    def unit_centers_array(self) -> np.ndarray:
        """The centers pushed out to the unit circle (the mu -> 0 positions)."""
        ang = 2.0 * np.pi * np.arange(self.m) / self.m
        return np.stack([np.cos(ang), np.sin(ang), np.zeros(self.m)], axis=-1)


def build_crown(m: int) -> CrownParams:
    """Ring parameters for m bubbles:
    d = sqrt(2) m log m / sum_{j<m} csc(j pi/m), mu = d^2/(m log m)^2."""
    if m < 8 or m % 2 != 0:
        raise DomainError(f"m must be an even integer >= 8, got {m}")
    d = math.sqrt(2.0) * m * math.log(m) / csc_full_sum(m)
    mu = d * d / (m * math.log(m)) ** 2
    rr = math.sqrt(1.0 - mu * mu)
    xi = tuple(
        Point3(
            rr * math.cos(2.0 * math.pi * j / m),
            rr * math.sin(2.0 * math.pi * j / m),
            0.0,
        )
        for j in range(m)
    )
    return CrownParams(m=m, mu=mu, d=d, xi=xi)


def u_bubble(z: PointLike) -> Union[float, np.ndarray]:
    """The standard bubble 3^{1/4} (1 + |z|^2)^{-1/2}."""
    arr = _as_array(z)
    val = TALENTI_AMP / np.sqrt(1.0 + np.sum(arr * arr, axis=-1))
    return float(val) if np.ndim(val) == 0 else val


def u_star(z: PointLike, p: CrownParams) -> Union[float, np.ndarray]:
    """u_bubble minus the m ring bubbles 3^{1/4} mu^{1/2} (mu^2 + |z-xi_j|^2)^{-1/2}."""
    arr = _as_array(z)
    centers = p.centers_array()
    # |z - xi_j|^2 expanded through a matmul; all |xi_j| are equal, and
    # mu^2 >> the round-off of the expansion, so adding mu^2 keeps this safe
    dist2 = (
        np.sum(arr * arr, axis=-1)[..., None]
        + (1.0 - p.mu * p.mu)
        - 2.0 * (arr @ centers.T)
    )
    ring = TALENTI_AMP * math.sqrt(p.mu) * np.sum(
        (p.mu * p.mu + np.maximum(dist2, 0.0)) ** -0.5, axis=-1
    )
    val = u_bubble(arr) - ring
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class ProfileHandle:
    """A scalar field on R^3 with a tag describing its construction.

    ``fn`` is vectorized over trailing (..., 3) point arrays.  ``features``
    lists points near which the field has sharp concentration (used by
    quadrature routines to adapt), ``singularities`` lists genuine poles.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    tag: str  # talenti | u_star | u_star_corrected
    params: Optional[CrownParams] = None
    features: Tuple[Point3, ...] = ()
    singularities: Tuple[Point3, ...] = ()

    def __call__(self, z: PointLike) -> Union[float, np.ndarray]:
        val = self.fn(_as_array(z))
        return float(val) if np.ndim(val) == 0 else val


def talenti_profile() -> ProfileHandle:
    return ProfileHandle(fn=u_bubble, tag="talenti")


def u_star_profile(p: CrownParams) -> ProfileHandle:
    return ProfileHandle(
        fn=lambda arr: u_star(arr, p), tag="u_star", params=p, features=p.xi
    )


def u_star_corrected_profile(p: CrownParams) -> ProfileHandle:
    """u_star plus the explicit ring correction (poles on the unit circle)."""
    sing = tuple(Point3.from_array(row) for row in p.unit_centers_array())

    def fn(arr: np.ndarray) -> np.ndarray:
        return u_star(arr, p) + psi_d1(arr, p)

    return ProfileHandle(
        fn=fn, tag="u_star_corrected", params=p, features=p.xi, singularities=sing
    )


def psi_d11(z: PointLike) -> Union[float, np.ndarray]:
    """The explicit correction with unit poles at +-(1, 0, 0):

    -sqrt(2) (1+|z|^2)^{-1/2} (8 z1^2 - (1+|z|^2)^2) / ((1+|z|^2) sqrt((1+|z|^2)^2 - 4 z1^2))
    """
    arr = _as_array(z)
    z1 = arr[..., 0]
    s = 1.0 + np.sum(arr * arr, axis=-1)
    disc = s * s - 4.0 * z1 * z1
    if np.any(disc <= 1e-24):
        raise DomainError("psi_d11 evaluated at (or numerically on) a pole")
    val = -math.sqrt(2.0) * s**-0.5 * (8.0 * z1 * z1 - s * s) / (s * np.sqrt(disc))
    return float(val) if np.ndim(val) == 0 else val


def psi_d1(z: PointLike, p: CrownParams) -> Union[float, np.ndarray]:
    """The full ring correction

    3^{1/4} mu^{1/2} sum_{j=1}^{m/2} [ psi_d11(R_{-2(j-1)pi/m} z)
                                       + 1/|z - xihat_j| + 1/|z - xihat_{j+m/2}| ]

    where xihat_j are the unit-circle ring positions.  The rotated-correction
    poles cancel the Newtonian terms analytically; evaluation closer than
    1e-6 to a unit-circle position is flagged with a warning because the
    cancellation degrades numerically there.
    """
    arr = _as_array(z)
    m = p.m
    units = p.unit_centers_array()
    diff = arr[..., None, :] - units
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    if np.any(dist < 1e-6):
        warnings.warn(
            "evaluation within 1e-6 of a cancelling pole pair", NearPoleWarning
        )
    newton = np.sum(1.0 / dist, axis=-1)
    rotated = np.zeros(arr.shape[:-1])
    for j in range(1, m // 2 + 1):
        rot = rotation_matrix(-2.0 * math.pi * (j - 1) / m)
        rotated = rotated + psi_d11(arr @ rot.T)
    val = TALENTI_AMP * math.sqrt(p.mu) * (rotated + newton)
    return float(val) if np.ndim(val) == 0 else val


def psi_d1_mid_closed(p: CrownParams) -> float:
    """Closed cosecant form of psi_d1 at the ring midpoint direction
    (cos(pi/m), sin(pi/m), 0)."""
    m = p.m
    total = 0.0
    for j in range(1, m // 2 + 1):
        a = (2 * j - 3) * math.pi / m
        total += (1.0 - 2.0 * math.cos(a) ** 2) / abs(math.sin(a))
        total += 1.0 / math.sin((2 * j - 1) * math.pi / (2 * m))
    return TALENTI_AMP * math.sqrt(p.mu) * total


class MidpointReport(NamedTuple):
    value: float
    lower_bound: float


def q_mid_lower(p: CrownParams) -> MidpointReport:
    """u_star at the in-ring midpoint plus psi_d1 at the unit midpoint,
    reported alongside the asymptotic lower bound 3^{1/4} d / (2 pi log m)."""
    m = p.m
    ang = math.pi / m
    rr = p.ring_radius
    xi0 = np.array([rr * math.cos(ang), rr * math.sin(ang), 0.0])
    xihat0 = np.array([math.cos(ang), math.sin(ang), 0.0])
    value = float(u_star(xi0, p)) + float(psi_d1(xihat0, p))
    bound = TALENTI_AMP * p.d / (2.0 * math.pi * math.log(m))
    return MidpointReport(value=value, lower_bound=bound)


def h_param(z: PointLike, p: CrownParams, validate: bool = False) -> float:
    """Scaled distance to the ring circle:
    h = sqrt(((r - rho)^2 + z3^2) / (4 r rho)), rho = sqrt(1 - mu^2).

    With ``validate`` the defining identity
    |z - xi_j|^2 = 4 r rho (h^2 + sin^2((j-1) pi/m - theta/2)) is checked for
    every j."""
    arr = _as_array(z)
    if arr.ndim != 1:
        raise DomainError("h_param takes a single point")
    r = math.hypot(arr[0], arr[1])
    if r == 0.0:
        raise DomainError("h_param is undefined on the z3 axis")
    rho = p.ring_radius
    h = math.sqrt(((r - rho) ** 2 + arr[2] ** 2) / (4.0 * r * rho))
    if validate:
        theta = math.atan2(arr[1], arr[0])
        centers = p.centers_array()
        for j in range(p.m):
            lhs = float(np.sum((arr - centers[j]) ** 2))
            ang = j * math.pi / p.m - theta / 2.0
            rhs = 4.0 * r * rho * (h * h + math.sin(ang) ** 2)
            if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs)):
                raise DomainError(
                    f"ring-distance identity violated at j={j}: {lhs} vs {rhs}"
                )
    return h


def fd_gradient(profile: Callable[[np.ndarray], np.ndarray], point: np.ndarray,
                h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a vectorized scalar field."""
    point = np.asarray(point, dtype=float)
    eye = np.eye(3)
    plus = np.asarray(profile(point + h * eye), dtype=float)
    minus = np.asarray(profile(point - h * eye), dtype=float)
    return (plus - minus) / (2.0 * h)


def fd_hessian(profile: Callable[[np.ndarray], np.ndarray], point: np.ndarray,
               h: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian of a vectorized scalar field."""
    point = np.asarray(point, dtype=float)
    eye = np.eye(3)
    f0 = float(np.asarray(profile(point)))
    hess = np.empty((3, 3))
    for i in range(3):
        fp = float(np.asarray(profile(point + h * eye[i])))
        fm = float(np.asarray(profile(point - h * eye[i])))
        hess[i, i] = (fp - 2.0 * f0 + fm) / (h * h)
        for j in range(i + 1, 3):
            fpp = float(np.asarray(profile(point + h * eye[i] + h * eye[j])))
            fpm = float(np.asarray(profile(point + h * eye[i] - h * eye[j])))
            fmp = float(np.asarray(profile(point - h * eye[i] + h * eye[j])))
            fmm = float(np.asarray(profile(point - h * eye[i] - h * eye[j])))
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    return hess


def kernel_z(j: int, y: PointLike, profile: ProfileHandle, xi: Point3,
             theta_star: float) -> float:
    """The six linearization kernels of the placed-bubble family at the base
    parameters (scale 1, no offsets, rotation theta_star):

    Z0: scale derivative, Z1/Z2: in-plane frame derivatives,
    Z3/Z4: center derivatives, Z5: rotation derivative.
    """
    if j not in range(6):
        raise DomainError(f"kernel index must be 0..5, got {j}")
    yv = _as_array(y)
    norm = float(np.linalg.norm(yv))
    if norm == 0.0:
        raise DomainError("kernels are undefined at the origin")
    rot = rotation_matrix(theta_star)
    inner = rot @ (yv / norm**2) + xi.as_array()
    grad = fd_gradient(profile, inner)
    qv = float(np.asarray(profile(inner)))
    z0 = qv / (2.0 * norm) + float(grad @ (rot @ yv)) / norm**3
    z1 = float(grad @ rot[:, 0]) / norm
    z2 = float(grad @ rot[:, 1]) / norm
    if j == 0:
        return z0
    if j == 1:
        return z1
    if j == 2:
        return z2
    if j == 3:
        return 2.0 * yv[0] / norm**2 * z0 - z1 / norm**2
    if j == 4:
        return 2.0 * yv[1] / norm**2 * z0 - z2 / norm**2
    return (yv[0] * z2 - yv[1] * z1) / norm**2
