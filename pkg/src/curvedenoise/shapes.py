"""Synthetic test shapes with exact ground truth.

Each shape yields noise-free footpoints in curve order, outward normals at
those footpoints, and a ground-truth object answering distance queries
exactly (analytic for the circle, per-segment for polylines).
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geom import ClosedPolygon, as_points, distances_to_polygon
from .noise import perturb_samples

SHAPES = ("circle", "square", "sawtooth")
PROFILES = ("uniform", "sides", "ramp")


class Circle:
    kind = "circle"

    def __init__(self, center=(0.0, 0.0), radius: float = 1.0):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def distance(self, points) -> np.ndarray:
        pts = as_points(points)
        return np.abs(np.hypot(*(pts - self.center).T) - self.radius)

    def header(self) -> str:
        cx, cy = self.center
        return f"circle {cx!r} {cy!r} {self.radius!r}"


class Polyline:
    """Closed polyline ground truth."""

    kind = "polyline"

    def __init__(self, corners):
        self.polygon = ClosedPolygon.from_vertices(corners)

    @property
    def corners(self) -> np.ndarray:
        return self.polygon.vertices

    def distance(self, points) -> np.ndarray:
        return distances_to_polygon(points, self.polygon)

    def header(self) -> str:
        return "polyline"


@dataclass
class ShapeSpec:
    """Parameters of a synthetic test set.

    ``size`` is the circle radius, the square side, or the sawtooth width.
    ``profile`` shapes the per-sample noise amplitude: ``uniform`` is
    ``delta`` everywhere; ``sides`` falls linearly with polar angle from
    ``delta`` at the left/right extremes to 0 at top and bottom; ``ramp``
    grows linearly in x from ``delta`` to ``delta_end``.  With
    ``perturb=False`` the samples stay on the curve but still carry the
    noise extents as radii.
    """

    kind: str = "circle"
    n: int = 100
    delta: float = 0.0
    seed: int = 0
    size: float = 1.0
    profile: str = "uniform"
    delta_end: Optional[float] = None
    teeth: int = 6
    amplitude: float = 0.1
    perturb: bool = True
    decimation: int = 1

    def __post_init__(self):
        if self.kind not in SHAPES:
            raise ValueError(f"unknown shape {self.kind!r}; choose from {SHAPES}")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown noise profile {self.profile!r}")
        if self.n < 3:
            raise ValueError("sample count must be at least 3")
        if self.delta < 0 or (self.delta_end is not None and self.delta_end < 0):
            raise ValueError("noise amplitude must be nonnegative")
        if self.decimation < 1:
            raise ValueError("decimation must be a positive integer")


@dataclass
class SampledCurve:
    footpoints: np.ndarray
    normals: np.ndarray
    gt: object
    amplitudes: np.ndarray = field(default=None)


def _polyline_samples(corners: np.ndarray, n: int):
    """``n`` samples on a closed polyline including every corner.

    Extra samples go to the longest remaining gaps.  Corner normals bisect
    the two adjacent edge normals.
    """
    corners = np.asarray(corners, dtype=float)
    k = len(corners)
    if n < k:
        raise ValueError(f"need at least {k} samples to include all corners")
    seg = np.roll(corners, -1, axis=0) - corners
    length = np.hypot(seg[:, 0], seg[:, 1])
    # outward edge normals for counter-clockwise corners
    enorm = np.column_stack([seg[:, 1], -seg[:, 0]]) / length[:, None]
    pieces = np.ones(k, dtype=int)
    for _ in range(n - k):
        pieces[np.argmax(length / pieces)] += 1
    pts, nrm = [], []
    for i in range(k):
        bis = enorm[i - 1] + enorm[i]
        nb = np.linalg.norm(bis)
        pts.append(corners[i])
        nrm.append(bis / nb if nb > 1e-12 else enorm[i])
        for j in range(1, pieces[i]):
            pts.append(corners[i] + seg[i] * (j / pieces[i]))
            nrm.append(enorm[i])
    return np.array(pts), np.array(nrm)


def square_corners(side: float) -> np.ndarray:
    h = side / 2.0
    return np.array([[-h, -h], [h, -h], [h, h], [-h, h]])


def sawtooth_corners(width: float, teeth: int, amplitude: float) -> np.ndarray:
    """Counter-clockwise outline: flat bottom, sawtooth top, bottom-left first."""
    height = width / 4.0
    pitch = width / teeth
    top = []
    for t in range(teeth, 0, -1):
        x0 = t * pitch
        top.append([x0, height])
        top.append([x0 - pitch / 2.0, height + amplitude])
    top.append([0.0, height])
    return np.array([[0.0, 0.0], [width, 0.0]] + top)


def sample_curve(spec: ShapeSpec) -> SampledCurve:
    if spec.kind == "circle":
        theta = 2.0 * math.pi * np.arange(spec.n) / spec.n
        nrm = np.column_stack([np.cos(theta), np.sin(theta)])
        gt = Circle((0.0, 0.0), spec.size)
        foot = spec.size * nrm
    else:
        if spec.kind == "square":
            corners = square_corners(spec.size)
        else:
            corners = sawtooth_corners(spec.size, spec.teeth, spec.amplitude)
        gt = Polyline(corners)
        foot, nrm = _polyline_samples(corners, spec.n)
    return SampledCurve(foot, nrm, gt, noise_amplitudes(spec, foot))


def noise_amplitudes(spec: ShapeSpec, foot: np.ndarray) -> np.ndarray:
    if spec.profile == "uniform":
        return np.full(len(foot), float(spec.delta))
    lo, hi = foot.min(axis=0), foot.max(axis=0)
    if spec.profile == "sides":
        c = 0.5 * (lo + hi)
        ang = np.arctan2(foot[:, 1] - c[1], foot[:, 0] - c[0])
        off_axis = np.minimum(np.abs(ang), math.pi - np.abs(ang))
        w = 1.0 - off_axis / (math.pi / 2.0)
        return spec.delta * np.clip(w, 0.0, 1.0)
    end = spec.delta if spec.delta_end is None else spec.delta_end
    w = (foot[:, 0] - lo[0]) / (hi[0] - lo[0])
    return spec.delta + (end - spec.delta) * w


def generate(spec: ShapeSpec):
    """Sample the shape, perturb it and build its connectivity.

    Returns ``(curve, noisy_samples, model)``.
    """
    from .model import synthetic_connectivity

    curve = sample_curve(spec)
    amps = curve.amplitudes * (spec.size if spec.kind == "circle" else 1.0)
    curve.amplitudes = amps
    if spec.perturb:
        noisy = perturb_samples(curve.footpoints, amps, spec.seed)
    else:
        noisy = curve.footpoints.copy()
    model = synthetic_connectivity(curve, noisy, spec.decimation)
    return curve, noisy, model
