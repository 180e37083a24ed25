"""Command line: generate, denoise, evaluate, render, pipeline.

Exit codes: 0 success, 2 file errors, 3 invalid input, 4 numerical failure.
"""

import argparse
import json
import sys
import time

import numpy as np

from .denoise import denoise
from .geom import total_angle_sum
from .metrics import MetricsReport, avg_signed_distance, error_stats
from .model import ModelError, load_model, read_header, read_points, save_model, write_points
from .shapes import PROFILES, SHAPES, Circle, Polyline, ShapeSpec, generate
from .solver import SolverError
from .svg import write_svg

EXIT_IO, EXIT_INVALID, EXIT_NUMERIC = 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _shape_args(p):
    p.add_argument("--shape", choices=SHAPES, default="circle")
    p.add_argument("--n", type=int, default=100, help="sample count")
    p.add_argument("--delta", type=float, default=0.0,
                   help="noise amplitude; in radii for the circle, scene units otherwise")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=float, default=1.0, help="circle radius, square side or sawtooth width")
    p.add_argument("--profile", choices=PROFILES, default="uniform")
    p.add_argument("--delta-end", type=float, default=None, help="end amplitude of the ramp profile")
    p.add_argument("--teeth", type=int, default=6)
    p.add_argument("--amplitude", type=float, default=0.1, help="sawtooth tooth height")
    p.add_argument("--decimation", type=int, default=1, help="use every k-th sample as a vertex")
    p.add_argument("--no-perturb", action="store_true", help="keep samples on the curve")


def _spec(a) -> ShapeSpec:
    try:
        return ShapeSpec(a.shape, a.n, a.delta, a.seed, size=a.size, profile=a.profile,
                         delta_end=a.delta_end, teeth=a.teeth, amplitude=a.amplitude,
                         perturb=not a.no_perturb, decimation=a.decimation)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc))


def _load_gt(path):
    """Ground truth from a points file whose header names the shape."""
    head = read_header(path).split()
    if head and head[0] == "circle" and len(head) == 4:
        cx, cy, r = map(float, head[1:])
        return Circle((cx, cy), r)
    return Polyline(read_points(path))


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _report(metrics, extra=None) -> str:
    doc = dict(vars(metrics))
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def cmd_generate(a):
    spec = _spec(a)
    t0 = time.perf_counter()
    curve, noisy, model = generate(spec)
    header = curve.gt.header()
    # the ground-truth file holds the clean footpoints; polyline footpoints
    # include every corner, so they describe the polyline exactly
    write_points(a.out, noisy, header)
    if a.gt:
        write_points(a.gt, curve.footpoints, header)
    if a.connectivity:
        save_model(model, a.connectivity)
    print(f"{len(noisy)} samples, {len(model)} vertices ({time.perf_counter() - t0:.3f} s)")


def cmd_denoise(a):
    model = load_model(a.connectivity, strict=a.strict)
    res = denoise(model, min_noise=a.min_noise)
    write_points(a.out, res.vertices, "denoised polygon")
    if a.report:
        before, after = total_angle_sum(model.vertices), total_angle_sum(res.vertices)
        doc = res.report()
        doc.update(angle_sum_before=before, angle_sum_after=after,
                   avg_signed_distance_pct=avg_signed_distance(model, res.vertices))
        _write(a.report, json.dumps(doc, indent=2) + "\n")
    print(f"{len(res.subsets)} subsets, angle sum {total_angle_sum(model.vertices):.1f} -> "
          f"{total_angle_sum(res.vertices):.1f} deg, {res.time_denoise:.4f} s")


def cmd_evaluate(a):
    pts = read_points(a.curve)
    gt = _load_gt(a.gt)
    mx, mean, rms = error_stats(pts, gt)
    asd = before = None
    if a.connectivity:
        model = load_model(a.connectivity)
        asd = avg_signed_distance(model, pts)
        before = total_angle_sum(model.vertices)
    metrics = MetricsReport(mx, mean, rms, asd, before, total_angle_sum(pts))
    text = _report(metrics)
    if a.report:
        _write(a.report, text)
    sys.stdout.write(text)


def cmd_render(a):
    samples = read_points(a.samples) if a.samples else None
    polys = [read_points(p) for p in a.polygons]
    discs = None
    if a.discs:
        if not a.connectivity:
            raise CliError(EXIT_INVALID, "--discs needs --connectivity")
        model = load_model(a.connectivity)
        discs = (model.vertices, model.noise_radii)
        if samples is None:
            samples = model.samples
    write_svg(a.svg, samples, polys, discs)


def cmd_pipeline(a):
    spec = _spec(a)
    t0 = time.perf_counter()
    curve, noisy, model = generate(spec)
    t_conn = time.perf_counter() - t0
    res = denoise(model, min_noise=a.min_noise)
    unit = spec.size if spec.kind == "circle" else 1.0
    inp = np.array(error_stats(noisy, curve.gt)) / unit
    out = np.array(error_stats(res.vertices, curve.gt)) / unit
    metrics = MetricsReport(*out, avg_signed_distance(model, res.vertices),
                            total_angle_sum(model.vertices), total_angle_sum(res.vertices),
                            t_conn, res.time_denoise)
    if a.report:
        _write(a.report, _report(metrics, {"input_max_err": inp[0], "input_mean_err": inp[1],
                                           "input_rms_err": inp[2]}))
    if a.out:
        write_points(a.out, res.vertices, "denoised polygon")
    if a.connectivity:
        save_model(model, a.connectivity)
    if a.svg:
        write_svg(a.svg, noisy, [model.vertices, res.vertices],
                  (model.vertices, model.noise_radii) if a.discs else None)
    print("delta  in_max in_mean  in_rms out_max out_mean out_rms  angles_before angles_after  t_den")
    print(f"{spec.delta:5.2f} {inp[0]:7.3f} {inp[1]:7.3f} {inp[2]:7.3f} {out[0]:7.3f} {out[1]:8.3f} "
          f"{out[2]:7.3f} {metrics.angle_sum_before:14.1f} {metrics.angle_sum_after:12.1f} {res.time_denoise:6.3f}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvedenoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic noisy shape")
    _shape_args(g)
    g.add_argument("--out", required=True, help="samples file")
    g.add_argument("--gt", help="ground-truth file")
    g.add_argument("--connectivity", help="connectivity file")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("denoise", help="denoise a connectivity model")
    d.add_argument("--connectivity", required=True)
    d.add_argument("--min-noise", type=float, default=0.0)
    d.add_argument("--out", required=True, help="denoised polygon file")
    d.add_argument("--report")
    d.add_argument("--strict", action="store_true", help="reject non-unit normals")
    d.set_defaults(func=cmd_denoise)

    e = sub.add_parser("evaluate", help="error of a point file against ground truth")
    e.add_argument("curve")
    e.add_argument("--gt", required=True)
    e.add_argument("--connectivity", help="model for the signed distance and angle sums")
    e.add_argument("--report")
    e.set_defaults(func=cmd_evaluate)

    r = sub.add_parser("render", help="SVG figure of samples, discs and polygons")
    r.add_argument("polygons", nargs="*")
    r.add_argument("--samples")
    r.add_argument("--connectivity")
    r.add_argument("--discs", action="store_true")
    r.add_argument("--svg", required=True)
    r.set_defaults(func=cmd_render)

    p = sub.add_parser("pipeline", help="generate, denoise and evaluate in one go")
    _shape_args(p)
    p.add_argument("--min-noise", type=float, default=0.0)
    p.add_argument("--out")
    p.add_argument("--connectivity")
    p.add_argument("--report")
    p.add_argument("--svg")
    p.add_argument("--discs", action="store_true")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
