"""Connectivity model: the polygon over the samples plus per-vertex data.

A model holds every sample, the polygon vertices as sample indices in
polygon order, a unit normal and a noise extent per vertex, and for each
vertex the ordered list of samples in its neighborhood.  Edge ``k`` runs
from vertex ``k`` to vertex ``k + 1`` (cyclic).
"""

import json
import warnings
from dataclasses import dataclass, replace
from typing import List

import numpy as np


class ModelError(ValueError):
    """Invalid connectivity document or model."""


@dataclass(frozen=True)
class ConnectivityModel:
    samples: np.ndarray
    vertex_indices: np.ndarray
    normals: np.ndarray
    noise_radii: np.ndarray
    neighborhoods: tuple
    closed: bool = True

    @classmethod
    def build(cls, samples, vertex_indices, normals, noise_radii, neighborhoods,
              closed=True, strict=False):
        """Validate raw arrays into a model.

        Non-unit normals are rescaled with a warning, or rejected when
        ``strict`` is set.
        """
        s = np.asarray(samples, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(s)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(s), axis=1))[0])
            raise ModelError(f"samples[{bad}]: non-finite coordinate")
        vi = np.asarray(vertex_indices)
        if vi.ndim != 1 or (vi.size and not np.issubdtype(vi.dtype, np.integer)):
            raise ModelError("vertices: expected a list of integer sample indices")
        vi = vi.astype(np.int64)
        if len(vi) < 3:
            raise ModelError(f"vertices: need at least 3, got {len(vi)}")
        for k, idx in enumerate(vi):
            if not 0 <= idx < len(s):
                raise ModelError(f"vertices[{k}]: sample index {idx} out of range 0..{len(s) - 1}")
        if len(np.unique(vi)) != len(vi):
            raise ModelError("vertices: indices must be distinct")
        pos = s[vi]
        step = np.hypot(*(np.roll(pos, -1, axis=0) - pos).T)
        if np.any(step == 0):
            k = int(np.flatnonzero(step == 0)[0])
            raise ModelError(f"vertices[{k}] and vertices[{(k + 1) % len(vi)}] coincide")
        n = np.asarray(normals, dtype=float).reshape(-1, 2)
        if len(n) != len(vi):
            raise ModelError(f"normals: expected {len(vi)} entries, got {len(n)}")
        length = np.hypot(n[:, 0], n[:, 1])
        off = np.flatnonzero(~(np.abs(length - 1.0) <= 1e-9))
        if off.size:
            k = int(off[0])
            if strict or not np.all(length > 0) or not np.all(np.isfinite(length)):
                raise ModelError(f"normals[{k}]: length {length[k]!r} is not 1")
            warnings.warn(f"normals: {off.size} non-unit normal(s) rescaled, first at index {k}")
            n = n / length[:, None]
        r = np.asarray(noise_radii, dtype=float).reshape(-1)
        if len(r) != len(vi):
            raise ModelError(f"radii: expected {len(vi)} entries, got {len(r)}")
        bad = np.flatnonzero(~(r >= 0) | ~np.isfinite(r))
        if bad.size:
            raise ModelError(f"radii[{int(bad[0])}]: must be finite and nonnegative")
        if len(neighborhoods) != len(vi):
            raise ModelError(f"neighborhoods: expected {len(vi)} lists, got {len(neighborhoods)}")
        hoods = []
        covered = np.zeros(len(s), dtype=bool)
        for k, hood in enumerate(neighborhoods):
            h = np.asarray(hood)
            if h.size and (h.ndim != 1 or not np.issubdtype(h.dtype, np.integer)):
                raise ModelError(f"neighborhoods[{k}]: expected a list of integer sample indices")
            h = h.astype(np.int64)
            out = np.flatnonzero((h < 0) | (h >= len(s)))
            if out.size:
                raise ModelError(f"neighborhoods[{k}]: sample index {int(h[out[0]])} out of range")
            covered[h] = True
            h.setflags(write=False)
            hoods.append(h)
        if not covered.all():
            j = int(np.flatnonzero(~covered)[0])
            raise ModelError(f"samples[{j}] is in no neighborhood")
        if not closed:
            raise ModelError("closed: only closed polygons are supported")
        for arr in (s, vi, n, r):
            arr.setflags(write=False)
        return cls(s, vi, n, r, tuple(hoods), True)

    def __len__(self) -> int:
        return len(self.vertex_indices)

    @property
    def vertices(self) -> np.ndarray:
        return self.samples[self.vertex_indices]

    def with_min_noise(self, min_noise: float) -> "ConnectivityModel":
        """Raise every noise extent below ``min_noise`` to it."""
        if min_noise < 0:
            raise ModelError("min_noise must be nonnegative")
        if min_noise == 0:
            return self
        r = np.maximum(self.noise_radii, float(min_noise))
        r.setflags(write=False)
        return replace(self, noise_radii=r)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples.tolist(),
            "vertices": self.vertex_indices.tolist(),
            "normals": self.normals.tolist(),
            "radii": self.noise_radii.tolist(),
            "neighborhoods": [h.tolist() for h in self.neighborhoods],
            "closed": self.closed,
        }


_KEYS = ("samples", "vertices", "normals", "radii", "neighborhoods", "closed")


def dumps_model(model: ConnectivityModel) -> str:
    """Canonical JSON text: one top-level key per line, compact values."""
    d = model.to_dict()
    body = ",\n".join(f"  {json.dumps(k)}: {json.dumps(d[k])}" for k in _KEYS)
    return "{\n" + body + "\n}\n"


def loads_model(text, strict: bool = False) -> ConnectivityModel:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object")
    missing = [k for k in _KEYS if k not in doc]
    if missing:
        raise ModelError(f"missing key(s): {', '.join(missing)}")
    for key in ("samples", "normals"):
        for k, item in enumerate(_list(doc[key], key)):
            if not (isinstance(item, list) and len(item) == 2
                    and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in item)):
                raise ModelError(f"{key}[{k}]: expected [x, y] numbers")
    if not isinstance(doc["closed"], bool):
        raise ModelError("closed: expected a boolean")
    hoods = [_int_list(h, f"neighborhoods[{k}]") for k, h in enumerate(_list(doc["neighborhoods"], "neighborhoods"))]
    return ConnectivityModel.build(doc["samples"], np.array(_int_list(doc["vertices"], "vertices"), dtype=np.int64),
                                   doc["normals"], _list(doc["radii"], "radii"), hoods, doc["closed"], strict)


def _list(values, where) -> list:
    if not isinstance(values, list):
        raise ModelError(f"{where}: expected a list")
    return values


def _int_list(values, where) -> List[int]:
    _list(values, where)
    for k, v in enumerate(values):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ModelError(f"{where}[{k}]: expected an integer index, got {v!r}")
    return values


def load_model(path, strict: bool = False) -> ConnectivityModel:
    with open(path, "rb") as fh:
        return loads_model(fh.read(), strict)


def save_model(model: ConnectivityModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(model))


def read_points(path) -> np.ndarray:
    """Read an ``x y`` per line text file; ``#`` starts a comment."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ModelError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ModelError(f"{path}:{lineno}: not a number in {line!r}") from None
    return np.array(rows, dtype=float).reshape(-1, 2)


def format_points(points, header: str = "") -> str:
    lines = [f"# {header}"] if header else []
    lines += [f"{float(x)!r} {float(y)!r}" for x, y in np.asarray(points, dtype=float)]
    return "\n".join(lines) + "\n"


def write_points(path, points, header: str = "") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_points(points, header))


def read_header(path) -> str:
    """First comment line of a points file, without the ``#``."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    return first[1:].strip() if first.startswith("#") else ""


def synthetic_connectivity(curve, noisy_samples, decimation: int = 1) -> ConnectivityModel:
    """Ground-truth connectivity for a synthetic shape.

    Every ``decimation``-th noisy sample becomes a vertex, with the
    ground-truth normal at its footpoint and the generator's noise amplitude
    as its extent.  Vertex ``i`` owns the samples from the previous vertex
    to the next one, in curve order.
    """
    noisy = np.asarray(noisy_samples, dtype=float)
    n = len(noisy)
    if decimation < 1:
        raise ModelError("decimation must be a positive integer")
    vidx = np.arange(0, n, decimation)
    if len(vidx) < 3:
        raise ModelError(f"only {len(vidx)} vertices after decimation by {decimation}")
    hoods = []
    for k, v in enumerate(vidx):
        prev_v = vidx[k - 1] if k > 0 else vidx[-1] - n
        next_v = vidx[k + 1] if k + 1 < len(vidx) else vidx[0] + n
        hoods.append([int(j % n) for j in range(prev_v, next_v + 1)])
    return ConnectivityModel.build(noisy, vidx, curve.normals[vidx], curve.amplitudes[vidx], hoods)


@dataclass(frozen=True)
class EdgeAssociation:
    """Closest polygon edge of every sample.

    ``edge_of[j]`` is the edge index of sample ``j``; ``distance[j]`` its
    distance to that edge; ``by_edge[k]`` lists the samples of edge ``k``
    in increasing sample index.
    """

    edge_of: np.ndarray
    distance: np.ndarray
    by_edge: tuple


def candidate_pairs(model: ConnectivityModel):
    """(sample, edge) pairs offered by the neighborhoods, deduplicated."""
    m = len(model)
    samp, edge = [], []
    for i, hood in enumerate(model.neighborhoods):
        samp.append(np.concatenate([hood, hood]))
        edge.append(np.concatenate([np.full(len(hood), (i - 1) % m), np.full(len(hood), i)]))
    pairs = np.unique(np.column_stack([np.concatenate(samp), np.concatenate(edge)]), axis=0)
    return pairs[:, 0], pairs[:, 1]


def associate_samples(model: ConnectivityModel, positions=None) -> EdgeAssociation:
    """Associate each sample with its closest candidate edge.

    Candidates of a sample are the two edges incident to every vertex whose
    neighborhood contains it.  Ties go to the smaller edge index.
    ``positions`` overrides the vertex positions (used after displacement).
    """
    verts = model.vertices if positions is None else np.asarray(positions, dtype=float)
    samp, edge = candidate_pairs(model)
    a = verts[edge]
    b = verts[(edge + 1) % len(model)]
    d = _pair_distances(model.samples[samp], a, b)
    order = np.lexsort((edge, d, samp))
    first = np.ones(len(order), dtype=bool)
    first[1:] = samp[order][1:] != samp[order][:-1]
    pick = order[first]
    n = len(model.samples)
    if len(pick) != n:
        missing = sorted(set(range(n)) - set(samp[pick].tolist()))
        raise ModelError(f"samples[{missing[0]}] is in no neighborhood")
    edge_of = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    edge_of[samp[pick]] = edge[pick]
    dist[samp[pick]] = d[pick]
    by_edge = tuple(np.flatnonzero(edge_of == k) for k in range(len(model)))
    return EdgeAssociation(edge_of, dist, by_edge)


def _pair_distances(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    t = np.einsum("ij,ij->i", p - a, d) / np.einsum("ij,ij->i", d, d)
    t = np.clip(t, 0.0, 1.0)
    foot = a + t[:, None] * d
    return np.hypot(p[:, 0] - foot[:, 0], p[:, 1] - foot[:, 1])
