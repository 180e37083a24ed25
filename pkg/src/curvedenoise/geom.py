"""Exact 2D primitives: segment and polygon distances, inside tests, angles.

Points are plain ``(x, y)`` sequences or numpy arrays of shape ``(2,)``;
point sets are arrays of shape ``(N, 2)``.  The vectorized helpers
(``distances_to_polygon``, ``signed_distances``) are what the rest of the
package uses; the scalar functions wrap them.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

ArrayLike = Union[Sequence[float], np.ndarray]

CCW = "CCW"
CW = "CW"


class GeometryError(ValueError):
    """Raised for degenerate input (coincident points, bad polygons)."""


def as_point(p: ArrayLike) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise GeometryError(f"expected a 2D point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError(f"non-finite point {arr!r}")
    return arr


def as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"expected an (N, 2) point array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(arr), axis=1))[0])
        raise GeometryError(f"non-finite coordinate at point {bad}")
    return arr


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace area, positive for counter-clockwise order."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class ClosedPolygon:
    """Closed polygon stored in counter-clockwise order.

    Use :meth:`from_vertices` to build one; clockwise input is reversed and
    ``reversed_input`` records that it happened.
    """

    vertices: np.ndarray
    orientation: str = CCW
    reversed_input: bool = False

    @classmethod
    def from_vertices(cls, vertices) -> "ClosedPolygon":
        v = as_points(vertices).copy()
        if len(v) < 3:
            raise GeometryError(f"polygon needs at least 3 vertices, got {len(v)}")
        step = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if np.any(step == 0):
            i = int(np.flatnonzero(step == 0)[0])
            raise GeometryError(f"consecutive vertices {i} and {(i + 1) % len(v)} coincide")
        flipped = signed_area(v) < 0
        if flipped:
            v = v[::-1].copy()
        v.setflags(write=False)
        return cls(v, CCW, flipped)

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self):
        """Return ``(starts, ends)`` arrays; edge k runs from vertex k to k+1."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)


def distance_point_segment(p: ArrayLike, a: ArrayLike, b: ArrayLike) -> float:
    p, a, b = as_point(p), as_point(a), as_point(b)
    if np.array_equal(a, b):
        raise GeometryError("degenerate segment: endpoints coincide")
    return float(segment_distances(p[None, :], a[None, :], b[None, :])[0, 0])


def segment_distances(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Distance matrix of shape ``(len(points), len(starts))`` to segments."""
    d = ends - starts
    len2 = np.einsum("ij,ij->i", d, d)
    rel = points[:, None, :] - starts[None, :, :]
    # a tiny but nonzero edge can underflow to len2 == 0; its foot is the start
    safe = np.where(len2 > 0, len2, 1.0)
    t = np.where(len2 > 0, np.einsum("pki,ki->pk", rel, d) / safe, 0.0)
    np.clip(t, 0.0, 1.0, out=t)
    off = rel - t[..., None] * d[None, :, :]
    return np.hypot(off[..., 0], off[..., 1])


def distances_to_polygon(points, polygon: ClosedPolygon) -> np.ndarray:
    pts = as_points(points)
    starts, ends = polygon.edges()
    out = np.empty(len(pts))
    # chunk to keep the (points x edges) matrix small
    for lo in range(0, len(pts), 512):
        out[lo:lo + 512] = segment_distances(pts[lo:lo + 512], starts, ends).min(axis=1)
    return out


def points_inside(points, polygon: ClosedPolygon) -> np.ndarray:
    """Even-odd test with a horizontal ray towards +x.

    Vertices exactly on the ray count as lying above it (half-open rule),
    which is the usual symbolic perturbation and keeps vertex hits from
    being counted twice.
    """
    pts = as_points(points)
    a, b = polygon.edges()
    px, py = pts[:, 0:1], pts[:, 1:2]
    ay, by = a[None, :, 1], b[None, :, 1]
    straddle = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = a[None, :, 0] + (py - ay) * (b[None, :, 0] - a[None, :, 0]) / (by - ay)
    hits = straddle & (px < x_cross)
    return (np.count_nonzero(hits, axis=1) % 2) == 1


def signed_distances(points, polygon: ClosedPolygon) -> np.ndarray:
    """Distance to the polygon, negated for points strictly inside."""
    pts = as_points(points)
    d = distances_to_polygon(pts, polygon)
    inside = points_inside(pts, polygon) & (d > 0)
    return np.where(inside, -d, d)


def hausdorff_distance_to_polygon(p: ArrayLike, polygon: ClosedPolygon) -> float:
    """Point-to-polygon distance (the one-sided Hausdorff distance of ``{p}``)."""
    return float(distances_to_polygon(as_point(p)[None, :], polygon)[0])


def signed_distance(p: ArrayLike, polygon: ClosedPolygon) -> float:
    return float(signed_distances(as_point(p)[None, :], polygon)[0])


def exterior_angle(prev: ArrayLike, v: ArrayLike, nxt: ArrayLike) -> float:
    """Turning angle at ``v`` in radians, in ``[0, pi]``."""
    prev, v, nxt = as_point(prev), as_point(v), as_point(nxt)
    if np.array_equal(prev, v) or np.array_equal(v, nxt):
        raise GeometryError("exterior angle undefined for coincident points")
    return float(turning_angles(np.array([prev, v, nxt]), closed=False)[0])


def turning_angles(vertices: np.ndarray, closed: bool = True) -> np.ndarray:
    """Unsigned turning angle at every vertex (interior vertices if open)."""
    v = np.asarray(vertices, dtype=float)
    if closed:
        d_in = v - np.roll(v, 1, axis=0)
        d_out = np.roll(v, -1, axis=0) - v
    else:
        d_in = v[1:-1] - v[:-2]
        d_out = v[2:] - v[1:-1]
    cross = d_in[:, 0] * d_out[:, 1] - d_in[:, 1] * d_out[:, 0]
    dot = np.einsum("ij,ij->i", d_in, d_out)
    return np.arctan2(np.abs(cross), dot)


def total_angle_sum(polygon) -> float:
    """Sum of turning angles in degrees.  Accepts a polygon or a vertex array."""
    verts = polygon.vertices if isinstance(polygon, ClosedPolygon) else as_points(polygon)
    return float(np.degrees(turning_angles(verts).sum()))


def bbox_diagonal(points) -> float:
    pts = as_points(points)
    return float(np.hypot(*(pts.max(axis=0) - pts.min(axis=0))))
