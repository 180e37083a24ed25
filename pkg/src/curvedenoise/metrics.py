"""Evaluation numbers: error against ground truth, balance, straightening, timing."""

import json
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .geom import ClosedPolygon, as_points, bbox_diagonal, signed_distances, total_angle_sum

FIELDS = ("max_err", "mean_err", "rms_err", "avg_signed_distance_pct",
          "angle_sum_before", "angle_sum_after", "time_connectivity", "time_denoise")


def error_stats(points, gt):
    """``(max, mean, rms)`` of the distances of ``points`` to ``gt``.

    ``gt`` is anything with a vectorized ``distance(points)`` method, e.g.
    :class:`~curvedenoise.shapes.Circle` or :class:`~curvedenoise.shapes.Polyline`.
    """
    d = np.asarray(gt.distance(as_points(points)), dtype=float)
    if d.size == 0:
        raise ValueError("error statistics need at least one point")
    return float(d.max()), float(d.mean()), float(np.sqrt(np.mean(d * d)))


def avg_signed_distance(model, polygon) -> float:
    """Absolute mean signed distance of the model's samples to ``polygon``,
    in percent of the samples' bounding-box diagonal."""
    if not isinstance(polygon, ClosedPolygon):
        polygon = ClosedPolygon.from_vertices(polygon)
    samples = model.samples
    diag = bbox_diagonal(samples)
    if diag == 0:
        return 0.0
    return float(abs(np.mean(signed_distances(samples, polygon))) / diag * 100.0)


@dataclass
class MetricsReport:
    """One evaluation row.  Fields that need a connectivity model may be None."""

    max_err: float
    mean_err: float
    rms_err: float
    avg_signed_distance_pct: Optional[float]
    angle_sum_before: Optional[float]
    angle_sum_after: Optional[float]
    time_connectivity: float = 0.0
    time_denoise: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    def row(self, label: str = "") -> str:
        vals = " ".join("         -" if getattr(self, k) is None else f"{getattr(self, k):10.4f}"
                        for k in FIELDS)
        return f"{label:>8} {vals}" if label else vals

    @staticmethod
    def header(label: bool = True) -> str:
        names = " ".join(f"{k[:10]:>10}" for k in FIELDS)
        return f"{'':>8} {names}" if label else names


def evaluate(model, output_vertices, gt, time_connectivity=0.0, time_denoise=0.0) -> MetricsReport:
    mx, mean, rms = error_stats(output_vertices, gt)
    return MetricsReport(mx, mean, rms, avg_signed_distance(model, output_vertices),
                         total_angle_sum(model.vertices), total_angle_sum(output_vertices),
                         time_connectivity, time_denoise)


def benchmark(spec, repeats: int = 3):
    """Time connectivity provisioning and the denoising pass for ``spec``.

    Returns a dict with the sample and vertex counts and the best of
    ``repeats`` wall-clock timings for each phase.
    """
    from .denoise import denoise
    from .shapes import generate

    best_conn = best_den = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        _, _, model = generate(spec)
        best_conn = min(best_conn, time.perf_counter() - t0)
        t0 = time.perf_counter()
        denoise(model)
        best_den = min(best_den, time.perf_counter() - t0)
    return {"samples": len(model.samples), "vertices": len(model),
            "time_connectivity": best_conn, "time_denoise": best_den}
