"""Static SVG 1.1 figures: samples as dots, noise discs shaded, curves as outlines."""

import numpy as np

PALETTE = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad")


def _fmt(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(samples=None, polygons=(), discs=None, width: int = 600, margin: float = 0.05) -> str:
    """Return an SVG document.

    ``samples`` is an ``(n, 2)`` array or None, ``polygons`` a sequence of
    closed vertex arrays drawn in order, ``discs`` an optional
    ``(centers, radii)`` pair.  The drawing is scaled to ``width`` pixels
    with the y axis pointing up.
    """
    layers = [np.asarray(p, float).reshape(-1, 2) for p in polygons]
    pts = [] if samples is None else [np.asarray(samples, float).reshape(-1, 2)]
    extent = pts + layers
    if discs is not None:
        centers, radii = np.asarray(discs[0], float).reshape(-1, 2), np.asarray(discs[1], float).reshape(-1)
        extent += [centers - radii[:, None], centers + radii[:, None]]
    allpts = np.concatenate(extent) if extent and sum(len(e) for e in extent) else np.zeros((1, 2))
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    pad = margin * (float(max(hi - lo)) or 1.0)
    lo, hi = lo - pad, hi + pad
    scale = width / float(hi[0] - lo[0])
    height = max(1, int(np.ceil((hi[1] - lo[1]) * scale)))

    def xy(p):
        return _fmt((p[0] - lo[0]) * scale), _fmt(height - (p[1] - lo[1]) * scale)

    out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
           '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    if discs is not None:
        out.append('<g id="discs" fill="#888888" fill-opacity="0.25" stroke="none">')
        for c, r in zip(centers, radii):
            x, y = xy(c)
            out.append(f'<circle cx="{x}" cy="{y}" r="{_fmt(r * scale)}"/>')
        out.append("</g>")
    for k, poly in enumerate(layers):
        if len(poly) == 0:
            continue
        coords = " ".join(",".join(xy(p)) for p in poly)
        out.append(f'<polygon id="curve{k}" points="{coords}" fill="none" '
                   f'stroke="{PALETTE[k % len(PALETTE)]}" stroke-width="1.5"/>')
    if pts:
        out.append('<g id="samples" fill="black">')
        for p in pts[0]:
            x, y = xy(p)
            out.append(f'<circle cx="{x}" cy="{y}" r="2"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, *args, **kwargs) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg(*args, **kwargs))
