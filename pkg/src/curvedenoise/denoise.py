"""Denoising pass: straighten the polygon inside the vertices' noise discs.

Vertices move only along their normals, ``v'_i = v_i + x_i n_i``.  The
polygon is cut into runs of consecutive vertices whose noise discs admit a
common line transversal.  Each run is solved as one small linear problem:

* angle rows: the height of every interior vertex over the baseline of its
  two neighbours, divided by the baseline length, linearized in ``x``;
* one balance row: the summed signed distance of the samples attached to
  the run's edges must vanish after the move;
* bounds ``-r_i <= x_i <= r_i``.

Runs are processed in polygon order.  The vertex a run shares with an
earlier run keeps its solved position.
"""

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .geom import ClosedPolygon
from .model import ConnectivityModel, EdgeAssociation, associate_samples
from .solver import LinearSystem, SolveResult, solve_bounded
from .stab import grow_forward, grow_local_subset


def _rot_cw(v: np.ndarray) -> np.ndarray:
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


def orientation_sign(model: ConnectivityModel, positions=None) -> float:
    """+1 if the normals point to the right of the polygon direction (outward
    for counter-clockwise order), else -1."""
    p = model.vertices if positions is None else positions
    chord = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
    s = float(np.einsum("ij,ij->", _rot_cw(chord), model.normals))
    return 1.0 if s >= 0 else -1.0


def _neighbours(m: int, idx):
    idx = np.asarray(idx)
    return (idx - 1) % m, (idx + 1) % m


def angle_residuals(positions: np.ndarray, idx, sign: float = 1.0) -> np.ndarray:
    """Signed relative height of each vertex in ``idx`` over its baseline."""
    m = len(positions)
    prev, nxt = _neighbours(m, idx)
    p = positions[idx] - positions[prev]
    q = positions[nxt] - positions[prev]
    len2 = np.einsum("ij,ij->i", q, q)
    if np.any(len2 == 0):
        bad = int(np.asarray(idx)[np.flatnonzero(len2 == 0)[0]])
        raise ValueError(f"vertex {bad}: neighbours coincide, baseline undefined")
    cross = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    return sign * cross / len2


def angle_residual(model: ConnectivityModel, i: int, positions=None) -> float:
    """Relative height of vertex ``i`` over the baseline of its neighbours,
    positive on the side its normal points to."""
    pos = model.vertices if positions is None else np.asarray(positions, float)
    return float(angle_residuals(pos, [i], orientation_sign(model, pos))[0])


def residual_jacobian(positions, normals, rows, sign: float = 1.0) -> dict:
    """Sensitivities of each row's residual to moves along normals.

    The baseline length of every row is frozen at ``positions``, which
    makes each residual a bilinear function of the moves; its gradient is
    exact when the normals involved are parallel.  Returns
    ``{(row_vertex, column_vertex): value}`` for the three vertices each
    row depends on.
    """
    m = len(positions)
    rows = np.asarray(rows)
    prev, nxt = _neighbours(m, rows)
    a, v, c = positions[prev], positions[rows], positions[nxt]
    p, q = v - a, c - a
    len2 = np.einsum("ij,ij->i", q, q)[:, None]
    # y = sign * cross(v - a, c - a) / |c - a|^2 with the denominator frozen
    d_v = _rot_cw(q) / len2
    d_c = -_rot_cw(p) / len2
    d_a = _rot_cw(v - c) / len2
    out = {}
    for k, i in enumerate(rows.tolist()):
        for j, grad in ((int(prev[k]), d_a[k]), (i, d_v[k]), (int(nxt[k]), d_c[k])):
            out[(i, j)] = out.get((i, j), 0.0) + sign * float(grad @ normals[j])
    return out


def frozen_residuals(positions, rows, frozen_len2, sign: float = 1.0) -> np.ndarray:
    """Residuals of ``rows`` at ``positions`` with given squared baseline lengths."""
    m = len(positions)
    rows = np.asarray(rows)
    prev, nxt = _neighbours(m, rows)
    p = positions[rows] - positions[prev]
    q = positions[nxt] - positions[prev]
    return sign * (p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]) / frozen_len2


@dataclass
class SubsetProblem:
    """Local problem for one run of vertices.

    ``vertices`` are the run's cyclic vertex indices, ``columns`` the
    movable ones (one column of the system each), ``rows`` the interior
    vertices whose residuals are minimized.  ``positions`` is the polygon
    state the problem was linearized at.
    """

    vertices: np.ndarray
    columns: np.ndarray
    rows: np.ndarray
    system: LinearSystem
    positions: np.ndarray
    samples: np.ndarray
    sign: float


def build_angle_jacobian(model: ConnectivityModel, subset, columns=None, positions=None, sign=None):
    """Angle rows ``(H, y)`` of a run; ``H x + y`` is the linearized residual
    after the move, so the solver targets ``-y``.

    Returns ``(H, y, rows)`` where ``y`` holds the current residuals.
    """
    pos = model.vertices if positions is None else positions
    sign = orientation_sign(model, pos) if sign is None else sign
    subset = np.asarray(subset)
    columns = subset if columns is None else np.asarray(columns)
    rows = subset[1:-1]
    col_of = {int(j): k for k, j in enumerate(columns.tolist())}
    H = np.zeros((len(rows), len(columns)))
    if len(rows):
        for (i, j), val in residual_jacobian(pos, model.normals, rows, sign).items():
            k = col_of.get(j)
            if k is not None:
                H[rows.tolist().index(i), k] += val
        y = angle_residuals(pos, rows, sign)
    else:
        y = np.zeros(0)
    return H, y, rows


def build_balance_row(model: ConnectivityModel, columns, association: EdgeAssociation,
                      positions=None, sign=None):
    """Balance row ``(c, b)`` with ``c . x = b``, plus the samples involved.

    Every sample attached to an edge with at least one movable endpoint
    counts once.  ``b`` sums its current signed distance to the edge line;
    the coefficient of a movable endpoint is the sample's clamped relative
    position along the edge measured from the other endpoint, i.e. 1 at the
    vertex itself and 0 at the far end.
    """
    pos = model.vertices if positions is None else positions
    sign = orientation_sign(model, pos) if sign is None else sign
    m = len(model)
    columns = np.asarray(columns)
    col_of = {int(j): k for k, j in enumerate(columns.tolist())}
    edges = sorted({(j - 1) % m for j in col_of} | set(col_of))
    c = np.zeros(len(columns))
    total = 0.0
    used = []
    for e in edges:
        members = association.by_edge[e]
        if len(members) == 0:
            continue
        a, z = pos[e], pos[(e + 1) % m]
        d = z - a
        len2 = float(d @ d)
        if len2 == 0:
            raise ValueError(f"edge {e} has zero length")
        n_e = sign * _rot_cw(d) / np.sqrt(len2)
        rel = model.samples[members] - a
        total += float(np.sum(rel @ n_e))
        t = np.clip(rel @ d / len2, 0.0, 1.0)
        if e in col_of:
            c[col_of[e]] += float(np.sum(1.0 - t))
        if (e + 1) % m in col_of:
            c[col_of[(e + 1) % m]] += float(np.sum(t))
        used.append(members)
    samples = np.concatenate(used) if used else np.zeros(0, dtype=np.int64)
    return c, total, samples


def build_subset_problem(model, subset, solved, positions, association, radii, sign) -> SubsetProblem:
    subset = np.asarray(subset)
    columns = subset[~solved[subset]]
    H, y, rows = build_angle_jacobian(model, subset, columns, positions, sign)
    c, b, samples = build_balance_row(model, columns, association, positions, sign)
    r = radii[columns]
    system = LinearSystem(H, -y, c[None, :], [b], -r, r.copy())
    return SubsetProblem(subset, columns, rows, system, positions.copy(), samples, sign)


@dataclass
class SubsetReport:
    vertices: List[int]
    columns: int
    clamped: int
    iterations: int
    objective: float
    equality_residual: float
    kept_equality: bool


@dataclass
class DenoiseResult:
    vertices: np.ndarray
    displacements: np.ndarray
    subsets: List[SubsetReport] = field(default_factory=list)
    time_denoise: float = 0.0

    @property
    def polygon(self) -> ClosedPolygon:
        return ClosedPolygon.from_vertices(self.vertices)

    def report(self) -> dict:
        return {
            "subsets": len(self.subsets),
            "clamped": int(sum(s.clamped for s in self.subsets)),
            "max_equality_residual": max((s.equality_residual for s in self.subsets if s.kept_equality),
                                         default=0.0),
            "dropped_equality": int(sum(not s.kept_equality for s in self.subsets)),
            "time_denoise": self.time_denoise,
            "runs": [vars(s) for s in self.subsets],
        }


def displace_within(origin: np.ndarray, normals: np.ndarray, x: np.ndarray, radii: np.ndarray):
    """``origin + x * normals`` with each move shortened by ulps where rounding
    would otherwise leave it longer than its radius."""
    x = np.array(x, dtype=float)
    out = origin + x[:, None] * normals
    for k in range(52):
        over = np.hypot(*(out - origin).T) > radii
        if not over.any():
            return out, x
        x[over] *= 1.0 - 2.0 ** (k - 52)
        out[over] = origin[over] + x[over, None] * normals[over]
    out[over] = origin[over]
    x[over] = 0.0
    return out, x


def _local_turning(positions, idx) -> float:
    m = len(positions)
    ids = np.unique(np.concatenate([(idx - 1) % m, idx, (idx + 1) % m]))
    d_in = positions[ids] - positions[(ids - 1) % m]
    d_out = positions[(ids + 1) % m] - positions[ids]
    cross = d_in[:, 0] * d_out[:, 1] - d_in[:, 1] * d_out[:, 0]
    return float(np.arctan2(np.abs(cross), np.einsum("ij,ij->i", d_in, d_out)).sum())


def _backtrack(positions, cols, origin, normals, xs, radii, new, halvings=8):
    """Halve a run's step until its local turning does not grow; give up
    (zero step, ``None`` returned) after ``halvings`` tries."""
    base = _local_turning(positions, cols)
    trial = positions.copy()
    for _ in range(halvings + 1):
        trial[cols] = new
        if _local_turning(trial, cols) <= base:
            return new, xs
        xs = xs * 0.5
        new, xs = displace_within(origin, normals, xs, radii)
    return None


def denoise(model: ConnectivityModel, min_noise: float = 0.0,
            inspect: Optional[Callable[[SubsetProblem, SolveResult], None]] = None,
            safeguard: bool = True) -> DenoiseResult:
    """Run the full pass over the polygon.

    ``min_noise`` raises small noise extents first.  ``inspect`` is called
    with every local problem and its solution.  With ``safeguard`` a run
    whose solved step would increase the turning of its own and adjacent
    vertices is shortened by halving; if no length helps, the run is split
    in two and each half is solved on its own, down to runs of three.
    """
    t0 = time.perf_counter()
    if min_noise:
        model = model.with_min_noise(min_noise)
    m = len(model)
    origin = model.vertices.copy()
    radii = np.asarray(model.noise_radii, dtype=float)
    positions = origin.copy()
    x_total = np.zeros(m)
    solved = np.zeros(m, dtype=bool)
    association = associate_samples(model)
    sign = orientation_sign(model)
    reports: List[SubsetReport] = []

    def run(subset):
        if solved[subset].all():
            return
        prob = build_subset_problem(model, subset, solved, positions, association, radii, sign)
        res = solve_bounded(prob.system)
        if inspect is not None:
            inspect(prob, res)
        cols = prob.columns
        new, xs = displace_within(origin[cols], model.normals[cols], res.x, radii[cols])
        if safeguard:
            step = _backtrack(positions, cols, origin[cols], model.normals[cols], xs, radii[cols], new)
            if step is None and len(subset) > 3:
                half = len(subset) // 2
                run(subset[:half + 1])
                run(subset[half:])
                return
            new, xs = (origin[cols], np.zeros_like(xs)) if step is None else step
        positions[cols] = new
        x_total[cols] = xs
        solved[cols] = True
        reports.append(SubsetReport(subset.tolist(), len(cols), len(res.clamped), res.iterations,
                                    res.objective, res.equality_residual, res.kept_equality))

    first = grow_local_subset(model, 0, positions, radii, bidirectional=True)
    run(first)
    anchor, cur = int(first[0]), int(first[-1])
    if len(first) < m:
        while cur != anchor:
            limit = (anchor - cur) % m + 1
            count = grow_forward(positions, radii, cur, limit)
            subset = (cur + np.arange(count)) % m
            run(subset)
            cur = int(subset[-1])
    return DenoiseResult(positions, x_total, reports, time.perf_counter() - t0)
