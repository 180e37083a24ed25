"""Denoising of closed polygonal curves inside per-vertex noise extents.

The polygon's vertices move only along their normals and never farther
than their noise radius.  Runs of vertices that one straight line can pass
through are straightened by a small bounded least-squares problem, while a
balance row keeps the samples evenly on both sides of the new edges.
"""

from .denoise import DenoiseResult, angle_residual, build_angle_jacobian, build_balance_row, denoise
from .geom import ClosedPolygon, hausdorff_distance_to_polygon, signed_distance, total_angle_sum
from .metrics import MetricsReport, avg_signed_distance, error_stats
from .model import ConnectivityModel, associate_samples, load_model, loads_model, synthetic_connectivity
from .noise import NoiseSpec, perturb_samples
from .shapes import ShapeSpec, generate
from .solver import LinearSystem, solve_bounded
from .stab import Disc, grow_local_subset, line_stabs_discs

__version__ = "0.1.0"
