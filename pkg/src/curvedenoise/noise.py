"""Noise model: cut-off Gaussian and the uniform radial perturbation.

Random numbers come from SplitMix64 evaluated per point index, so each point
owns its own substream.  Output depends only on ``(seed, index)``: the same
point set perturbed with different amplitudes gets the same directions and
radius fractions, which keeps comparisons across amplitudes paired.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian lateral noise with a cut-off radius.

    Give either ``cutoff_probability`` or ``cutoff_radius``; the other one is
    derived.  If both are given they must agree to 1e-9 relative.
    """

    sigma: float
    mu: float = 0.0
    cutoff_probability: Optional[float] = None
    cutoff_radius: Optional[float] = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        p, r = self.cutoff_probability, self.cutoff_radius
        if r is not None and r < 0:
            raise ValueError(f"cutoff_radius must be nonnegative, got {r}")
        if p is not None and r is None:
            object.__setattr__(self, "cutoff_radius", cutoff_radius_for_probability(self.sigma, p))
        elif r is not None and p is None:
            object.__setattr__(self, "cutoff_probability", two_sided_mass(r, self.sigma))
        elif p is not None and r is not None:
            expected = cutoff_radius_for_probability(self.sigma, p)
            if abs(expected - r) > 1e-9 * max(1.0, expected):
                raise ValueError(
                    f"cutoff_radius {r} inconsistent with probability {p} (expected {expected})")


def gaussian_pdf(x, spec: NoiseSpec):
    if not spec.sigma > 0:
        raise ValueError("sigma must be positive")
    z = (np.asarray(x, dtype=float) - spec.mu) / spec.sigma
    out = np.exp(-0.5 * z * z) / (spec.sigma * math.sqrt(2.0 * math.pi))
    return float(out) if out.ndim == 0 else out


def two_sided_mass(r: float, sigma: float) -> float:
    """P(|X| <= r) for X ~ N(0, sigma^2)."""
    return math.erf(r / (sigma * math.sqrt(2.0)))


def cutoff_radius_for_probability(sigma: float, pi: float, tol: float = 1e-12) -> float:
    """Radius ``r`` with ``P(|X| <= r) = pi`` for zero-mean lateral noise."""
    if not 0.0 < pi < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {pi}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    lo, hi = 0.0, sigma
    while two_sided_mass(hi, sigma) < pi:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if two_sided_mass(mid, sigma) < pi:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def splitmix64(x: np.ndarray) -> np.ndarray:
    z = (np.asarray(x, dtype=np.uint64) + _GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, index: np.ndarray, lane: int) -> np.ndarray:
    """Uniform doubles in [0, 1) for point ``index``, substream ``lane``.

    Stream splitting: the 64-bit state for (seed, index, lane) is
    ``splitmix64(seed) ^ (2 * index + lane) * GOLDEN``, mixed once more.
    """
    with np.errstate(over="ignore"):
        base = splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        key = (np.asarray(index, dtype=np.uint64) * np.uint64(2) + np.uint64(lane)) * _GOLDEN
        bits = splitmix64(base ^ key)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def perturb_samples(points, delta, seed: int) -> np.ndarray:
    """Displace every point by a radius ~ U[0, delta] in a uniform direction.

    ``delta`` may be a scalar or one amplitude per point.  The displacement
    of each output point is at most its ``delta`` after rounding.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    amp = np.broadcast_to(np.asarray(delta, dtype=float), (len(pts),))
    if np.any(amp < 0):
        raise ValueError("noise amplitude must be nonnegative")
    idx = np.arange(len(pts), dtype=np.uint64)
    radius = amp * uniform_stream(seed, idx, 0)
    angle = 2.0 * math.pi * uniform_stream(seed, idx, 1)
    offset = radius[:, None] * np.column_stack([np.cos(angle), np.sin(angle)])
    out = pts + offset
    # rounding can push |out - pts| a few ulps past delta; pull those back
    for k in range(52):
        over = np.hypot(*(out - pts).T) > amp
        if not over.any():
            break
        offset[over] *= 1.0 - 2.0 ** (k - 52)
        out[over] = pts[over] + offset[over]
    else:
        out[over] = pts[over]
    return out
