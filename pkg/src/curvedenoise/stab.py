"""Line transversals of discs and growth of locally straight vertex runs.

``line_stabs_discs`` answers whether one straight line meets every disc.
The discs are first moved into a unit frame where the first and last
centers sit at (0, 0) and (1, 0).  If the highest disc bottom lies below
the lowest disc top, a line parallel to the x-axis works.  Otherwise the
candidates are the internal tangents between a disc lying above that band
and one lying below it, followed by the internal tangents of every other
pair of disjoint discs.  The last step makes the test complete: when no
parallel line exists, every boundary direction of the set of transversals
belongs to a line tangent to two discs from opposite sides.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

REL_TOL = 1e-12


@dataclass(frozen=True)
class Disc:
    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError(f"disc radius must be nonnegative, got {self.radius}")


def _arrays(discs):
    if isinstance(discs, tuple) and len(discs) == 2 and not isinstance(discs[0], Disc):
        centers, radii = discs
    else:
        centers = [d.center for d in discs]
        radii = [d.radius for d in discs]
    return np.asarray(centers, dtype=float).reshape(-1, 2), np.asarray(radii, dtype=float).reshape(-1)


def line_stabs_discs(discs: Sequence[Disc]) -> bool:
    """True iff some line intersects every (closed) disc.

    Accepts a sequence of :class:`Disc` or a ``(centers, radii)`` tuple.
    """
    centers, radii = _arrays(discs)
    return stabs(centers, radii)


def stabs(centers: np.ndarray, radii: np.ndarray) -> bool:
    k = len(centers)
    if k <= 2:
        return True
    lo = (centers - radii[:, None]).min(axis=0)
    hi = (centers + radii[:, None]).max(axis=0)
    scale = float(np.hypot(*(hi - lo)))
    if scale == 0.0:
        return True

    # unit frame: similarity taking the first center to 0 and the last to (1, 0)
    axis = centers[-1] - centers[0]
    length = float(np.hypot(*axis))
    if length <= REL_TOL * scale:
        # first and last coincide: frame on the pencil through that point
        axis, length = np.array([scale, 0.0]), scale
    u = axis / length
    rel = centers - centers[0]
    pts = np.column_stack([rel @ u, rel[:, 1] * u[0] - rel[:, 0] * u[1]]) / length
    r = radii / length
    tol = REL_TOL * scale / length

    top = pts[:, 1] + r
    bottom = pts[:, 1] - r
    t_min, b_max = top.min(), bottom.max()
    if b_max <= t_min + tol:
        return True

    iu, ju = np.triu_indices(k, 1)
    gap = np.hypot(*(pts[iu] - pts[ju]).T) - r[iu] - r[ju]
    if not np.any(gap > -tol):
        # pairwise overlapping discs always share a transversal; an adversarial
        # search against the angular sweep drives the margin to 0 but never below
        return True

    above = bottom > t_min
    below = top < b_max
    first = (above[iu] & below[ju]) | (below[iu] & above[ju])
    pairs = np.column_stack([iu, ju])
    return (_any_tangent_stabs(pts, r, pairs[first], tol)
            or _any_tangent_stabs(pts, r, pairs[~first], tol))


def internal_tangents(c1, r1, c2, r2):
    """The two lines ``n . p = c`` tangent to both discs, discs on opposite sides.

    Returns ``(normals, offsets)`` with shapes ``(2, 2)`` and ``(2,)``, or
    ``None`` when the discs overlap.
    """
    lines = _tangent_lines(np.asarray([c1], float), np.asarray([r1], float),
                           np.asarray([c2], float), np.asarray([r2], float), 0.0)
    if lines is None or len(lines[0]) == 0:
        return None
    return lines


def _tangent_lines(ci, ri, cj, rj, tol):
    d = ci - cj
    dist = np.hypot(d[:, 0], d[:, 1])
    ok = (dist > 0) & (dist + tol >= ri + rj)
    if not ok.any():
        return None
    d, dist, ci, ri = d[ok], dist[ok], ci[ok], ri[ok]
    rs = (ri + rj[ok])
    cos_phi = np.clip(rs / dist, -1.0, 1.0)
    sin_phi = np.sqrt(1.0 - cos_phi ** 2)
    dh = d / dist[:, None]
    normals = []
    for sgn in (1.0, -1.0):
        s = sgn * sin_phi
        normals.append(np.column_stack([dh[:, 0] * cos_phi - dh[:, 1] * s,
                                        dh[:, 0] * s + dh[:, 1] * cos_phi]))
    n = np.concatenate(normals)
    # disc i on the positive side, touching
    c = np.einsum("ij,ij->i", n, np.concatenate([ci, ci])) - np.concatenate([ri, ri])
    return n, c


def _any_tangent_stabs(pts, r, pairs, tol) -> bool:
    if len(pairs) == 0:
        return False
    for lo in range(0, len(pairs), 2048):
        chunk = pairs[lo:lo + 2048]
        lines = _tangent_lines(pts[chunk[:, 0]], r[chunk[:, 0]], pts[chunk[:, 1]], r[chunk[:, 1]], tol)
        if lines is None:
            continue
        n, c = lines
        dist = np.abs(n @ pts.T - c[:, None])
        if np.any(np.all(dist <= r[None, :] + tol, axis=1)):
            return True
    return False


def _stabs_run(centers, radii, idx) -> bool:
    return stabs(centers[idx], radii[idx])


def grow_forward(centers: np.ndarray, radii: np.ndarray, start: int, limit: int) -> int:
    """Number of vertices in the longest stabbable cyclic run from ``start``.

    ``limit`` caps the run length.  Uses the fact that stabbability is
    inherited by sub-runs, so an exponential-then-binary search suffices.
    """
    m = len(centers)
    limit = min(limit, m)
    if limit <= 2:
        return limit

    def ok(count):
        return _stabs_run(centers, radii, (start + np.arange(count)) % m)

    good, step = 2, 4
    while True:
        if step >= limit:
            if ok(limit):
                return limit
            bad = limit
            break
        if not ok(step):
            bad = step
            break
        good, step = step, step * 2
    while bad - good > 1:
        mid = (good + bad) // 2
        if ok(mid):
            good = mid
        else:
            bad = mid
    return good


def grow_local_subset(model, start: int, positions: Optional[np.ndarray] = None,
                      radii: Optional[np.ndarray] = None, limit: Optional[int] = None,
                      bidirectional: bool = False) -> np.ndarray:
    """Cyclic vertex indices of a maximal stabbable run containing ``start``.

    Forward growth starts at ``start``.  With ``bidirectional`` the run is
    extended alternately forward and backward one vertex at a time, which
    is how the first run of a pass is formed.  ``positions`` gives the
    current vertex positions (already solved vertices displaced).
    """
    centers = model.vertices if positions is None else np.asarray(positions, dtype=float)
    r = model.noise_radii if radii is None else np.asarray(radii, dtype=float)
    m = len(centers)
    limit = m if limit is None else min(limit, m)
    if not bidirectional:
        count = grow_forward(centers, r, start, limit)
        return (start + np.arange(count)) % m
    first, count = start, 1
    can_fwd = can_back = True
    while (can_fwd or can_back) and count < limit:
        if can_fwd:
            idx = (first + np.arange(count + 1)) % m
            if count + 1 <= 2 or _stabs_run(centers, r, idx):
                count += 1
            else:
                can_fwd = False
        if can_back and count < limit:
            idx = (first - 1 + np.arange(count + 1)) % m
            if count + 1 <= 2 or _stabs_run(centers, r, idx):
                first = (first - 1) % m
                count += 1
            else:
                can_back = False
    return (first + np.arange(count)) % m
