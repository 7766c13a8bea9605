"""Zero-level-set extraction for a profile: radial root finding along rays,
grid + edge-bisection point clouds, and the minimum gradient norm over the
extracted set (polished to a surface-constrained local minimum so it is
stable under grid refinement).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
import scipy.optimize

from .crown import CrownParams, ProfileHandle, _as_array
from .errors import DomainError, NotFoundError
from .geometry import Point3

_BISECT_ITERS = 60
_RESIDUAL_TOL = 1e-8

BBox = Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]


def _normalize_bbox(bbox) -> BBox:
    if np.isscalar(bbox):
        b = float(bbox)
        return ((-b, b), (-b, b), (-b, b))
    bbox = tuple(tuple(float(v) for v in ax) for ax in bbox)
    if len(bbox) != 3 or any(len(ax) != 2 or ax[0] >= ax[1] for ax in bbox):
        raise DomainError("bbox must be a scalar half-width or three (lo, hi) pairs")
    return bbox  # type: ignore[return-value]


@dataclass(frozen=True)
class NodalMesh:
    """A point cloud of approximate zeros with residuals and gradient norms."""

    points: np.ndarray      # (N, 3)
    values: np.ndarray      # (N,) residuals |u|
    gradients: np.ndarray   # (N,) |grad u|
    bbox: BBox
    resolution: int

    def __len__(self) -> int:
        return len(self.points)


def gradient_norms(profile: ProfileHandle, points: np.ndarray) -> np.ndarray:
    """Central-difference |grad u| with scale-aware step h = 1e-5 max(1, |z|)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    h = 1e-5 * np.maximum(1.0, np.linalg.norm(pts, axis=-1))[:, None]
    acc = np.zeros((len(pts), 3))
    eye = np.eye(3)
    for ax in range(3):
        step = h * eye[ax]
        acc[:, ax] = (profile.fn(pts + step) - profile.fn(pts - step)) / (2.0 * h[:, 0])
    return np.linalg.norm(acc, axis=-1)


def radial_nodal_root(p: CrownParams, profile: ProfileHandle, j: int,
                      direction: Union[Point3, Sequence[float]]) -> float:
    """The first sign-change radius t of profile(xi_j + t * direction) inside
    the bracket [1e-3/m, 0.5], refined by bisection to 1e-12."""
    if not 0 <= j < p.m:
        raise DomainError(f"bubble index out of range: {j}")
    d = _as_array(direction).astype(float)
    if abs(d[2]) > 1e-12:
        raise DomainError("direction must lie in the z1 z2 plane")
    d = d / np.linalg.norm(d)
    center = p.xi[j].as_array()
    lo, hi = 1e-3 / p.m, 0.5
    ts = np.linspace(lo, hi, 1024)
    vals = profile.fn(center + ts[:, None] * d)
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(sign_change) == 0:
        raise NotFoundError("no sign change in the bracket [1e-3/m, 0.5]")
    a, b = float(ts[sign_change[0]]), float(ts[sign_change[0] + 1])
    fa = float(profile.fn(center + a * d))
    while b - a > 1e-12:
        mid = 0.5 * (a + b)
        fm = float(profile.fn(center + mid * d))
        if fm == 0.0:
            return mid
        if (fa < 0) == (fm < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _collect_edge_segments(vals_a, vals_b, pts_a, pts_b, segs):
    mask = np.sign(vals_a) * np.sign(vals_b) < 0
    if np.any(mask):
        segs.append((pts_a[mask], pts_b[mask]))


def nodal_mesh(p: CrownParams, profile: ProfileHandle, bbox, resolution: int) -> NodalMesh:
    """Scan a resolution^3 grid for sign changes along the axis edges and
    refine each crossing by bisection until the residual is at most 1e-8.

    An empty result is returned as an empty mesh, not an error."""
    bbox = _normalize_bbox(bbox)
    if resolution < 16:
        raise DomainError("resolution must be >= 16 per axis")
    xs = np.linspace(*bbox[0], resolution)
    ys = np.linspace(*bbox[1], resolution)
    zs = np.linspace(*bbox[2], resolution)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    plane_xy = np.stack([gx, gy], axis=-1)

    segs = []
    prev_vals = None
    prev_pts = None
    # slab-by-slab scan in deterministic z order
    for z in zs:
        pts = np.concatenate(
            [plane_xy, np.full((resolution, resolution, 1), z)], axis=-1
        )
        vals = profile.fn(pts)
        _collect_edge_segments(
            vals[:-1, :].ravel(), vals[1:, :].ravel(),
            pts[:-1, :].reshape(-1, 3), pts[1:, :].reshape(-1, 3), segs,
        )
        _collect_edge_segments(
            vals[:, :-1].ravel(), vals[:, 1:].ravel(),
            pts[:, :-1].reshape(-1, 3), pts[:, 1:].reshape(-1, 3), segs,
        )
        if prev_vals is not None:
            _collect_edge_segments(
                prev_vals.ravel(), vals.ravel(),
                prev_pts.reshape(-1, 3), pts.reshape(-1, 3), segs,
            )
        prev_vals, prev_pts = vals, pts

    if not segs:
        empty = np.empty((0, 3))
        return NodalMesh(points=empty, values=np.empty(0), gradients=np.empty(0),
                         bbox=bbox, resolution=resolution)

    a = np.concatenate([s[0] for s in segs])
    b = np.concatenate([s[1] for s in segs])
    fa = profile.fn(a)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (a + b)
        fm = profile.fn(mid)
        left = (fa < 0) == (fm < 0)
        a = np.where(left[:, None], mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left[:, None], b, mid)
    mid = 0.5 * (a + b)
    residual = np.abs(profile.fn(mid))
    keep = residual <= _RESIDUAL_TOL
    points = mid[keep]
    residual = residual[keep]
    grads = gradient_norms(profile, points) if len(points) else np.empty(0)
    return NodalMesh(points=points, values=residual, gradients=grads,
                     bbox=bbox, resolution=resolution)


def _polish_min(profile: ProfileHandle, start: np.ndarray) -> float:
    """Minimize |grad u| constrained to u = 0 from a mesh candidate."""

    def objective(z):
        return float(gradient_norms(profile, z[None, :])[0])

    def constraint(z):
        return float(profile.fn(np.asarray(z, dtype=float)))

    res = scipy.optimize.minimize(
        objective, start, method="SLSQP",
        constraints=[{"type": "eq", "fun": constraint}],
        options={"maxiter": 200, "ftol": 1e-14},
    )
    if not res.success or abs(constraint(res.x)) > 1e-6:
        return math.inf
    return float(res.fun)


def gradient_min_on_nodal(mesh: NodalMesh, profile: ProfileHandle,
                          polish: bool = True, candidates: int = 24) -> float:
    """Minimum of |grad u| over the extracted zero set.

    The raw grid minimum is polished by a surface-constrained local
    minimization from the lowest-gradient candidates, which makes the result
    independent of the grid resolution."""
    if len(mesh) == 0:
        raise DomainError("empty mesh has no gradient minimum")
    raw_min = float(np.min(mesh.gradients))
    if not polish:
        return raw_min
    order = np.argsort(mesh.gradients)[:candidates]
    best = raw_min
    for idx in order:
        val = _polish_min(profile, mesh.points[idx].copy())
        if val < best:
            best = val
    return best
