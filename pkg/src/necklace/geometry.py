"""Points of R^3, planar rotations, conjugation, Kelvin transform, and the
alternating odd-extension operator over an even-order angular sector.

The first two coordinates are viewed as a complex number z1 + i z2 when a
rotation or conjugation is applied; points themselves are stored as three
reals so there is a single representation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

#: tolerance for the half-open angular sector membership test
ANGULAR_TOL = 1e-12


@dataclass(frozen=True)
class Point3:
    """A point of R^3 (dimensionless; the domain of interest is the unit ball)."""

    z1: float
    z2: float
    z3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3], dtype=float)

    @staticmethod
    def from_array(arr) -> "Point3":
        a = np.asarray(arr, dtype=float).reshape(3)
        return Point3(float(a[0]), float(a[1]), float(a[2]))

    def norm(self) -> float:
        return math.sqrt(self.z1 * self.z1 + self.z2 * self.z2 + self.z3 * self.z3)

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.z1 + other.z1, self.z2 + other.z2, self.z3 + other.z3)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.z1 - other.z1, self.z2 - other.z2, self.z3 - other.z3)

    def scale(self, c: float) -> "Point3":
        return Point3(c * self.z1, c * self.z2, c * self.z3)


@dataclass(frozen=True)
class SectorConfig:
    """An angular sector of opening 2*pi/K, K even.

    ``theta0`` is always pi/K; passing a conflicting value is an error.
    """

    K: int
    theta0: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.K < 4 or self.K % 2 != 0:
            raise DomainError(f"K must be an even integer >= 4, got {self.K}")
        t0 = math.pi / self.K
        if self.theta0 is None:
            object.__setattr__(self, "theta0", t0)
        elif abs(self.theta0 - t0) > 1e-15:
            raise DomainError("theta0 must equal pi/K")


def rotate(z: Point3, theta: float) -> Point3:
    """Rotate (z1, z2) by ``theta`` radians; z3 is unchanged."""
    c, s = math.cos(theta), math.sin(theta)
    return Point3(c * z.z1 - s * z.z2, s * z.z1 + c * z.z2, z.z3)


def conj(z: Point3) -> Point3:
    """Complex conjugation of the in-plane part: (z1, -z2, z3)."""
    return Point3(z.z1, -z.z2, z.z3)


def kelvin(z: Point3) -> Point3:
    """The inversion z -> z/|z|^2.  The origin is outside the domain."""
    n2 = z.z1 * z.z1 + z.z2 * z.z2 + z.z3 * z.z3
    if n2 == 0.0:
        raise DomainError("kelvin transform is undefined at the origin")
    return Point3(z.z1 / n2, z.z2 / n2, z.z3 / n2)


def in_sector(z: Point3, cfg: SectorConfig) -> bool:
    """Membership in the open wedge -theta0 < arg(z1+iz2) < theta0, 0 < |z| < 1."""
    r = math.hypot(z.z1, z.z2)
    if r == 0.0:
        return False
    ang = math.atan2(z.z2, z.z1)
    if abs(ang) >= cfg.theta0 - ANGULAR_TOL:
        return False
    return 0.0 < z.norm() < 1.0


def extend_odd(u: Callable[[Point3], float], z: Point3, cfg: SectorConfig) -> float:
    """Alternating extension sum_{j=0}^{K/2-1} [u(z e^{4ij t0}) - u(zbar e^{(4j+2)i t0})].

    The result vanishes on the rays arg = j*theta0 with j odd and is odd across
    them.  Evaluation failures of ``u`` propagate.
    """
    t0 = cfg.theta0
    zb = conj(z)
    total = 0.0
    for j in range(cfg.K // 2):
        total += u(rotate(z, 4 * j * t0)) - u(rotate(zb, (4 * j + 2) * t0))
    return total


def rotation_matrix(theta: float) -> np.ndarray:
    """The in-plane rotation matrix acting on (z1, z2, z3) column vectors."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


#: reflection of the in-plane imaginary part, as a matrix
CONJ_MATRIX = np.diag([1.0, -1.0, 1.0])
