"""Command-line entry point: ``pleatlab <subcommand> [flags]``.

Exit status is 0 on success, 1 when a certification fails or a numeric error
is raised (reported in a JSON ``error`` field), and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import curves, formulas, lattices, smoothing, wallspace
from .errors import PleatlabError

FLOAT_FMT = "%.17g"


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % x
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _interval(text: str) -> tuple[float, float]:
    v = _floats(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected a,b, got {text!r}")
    return v[0], v[1]


def _pmap(fn, items, jobs: int):
    """Map preserving input order, optionally over a process pool."""
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ---- subcommands --------------------------------------------------------------


def cmd_trig(a):
    if a.tangency:
        out = {"theta": a.theta, "eps": a.eps, "r": formulas.tangency_radius(a.theta, a.eps)}
    elif a.lambert:
        out = {"theta": a.theta, "eps": a.eps, "leg": formulas.lambert_leg(a.theta, a.eps)}
    elif a.hull:
        out = {"theta": a.theta, "eps": a.eps, "w": formulas.hull_width(a.theta, a.eps)}
    elif a.tube:
        out = {"n": a.n, "A": a.A, "c": formulas.tube_width(a.n, a.A)}
    else:
        out = {"x": a.x, "r": formulas.inversion_r(a.x)}
    if a.format == "csv":
        return _csv(list(out), [list(out.values())]), True
    return _json(out), True


def _comparison_row(args):
    k, T, h, profile = args
    prof = None
    if profile == "sine":
        prof = curves.CurvatureProfile(curves.SineCurvature(k), k)
    elif profile == "block":
        prof = curves.CurvatureProfile(curves.BlockCurvature(k, 0.5), k)
    return curves.verify_comparison(k, T, curves.IntegratorConfig(h=h), prof)


def cmd_comparison(a):
    reps = _pmap(_comparison_row, [(k, a.T, a.h, a.profile) for k in a.k], a.jobs)
    ok = all(r.passed for r in reps)
    if a.format == "json":
        text = _json({"rows": [{"k": r.k, "T": r.T, "h": r.h, "max_ratio": r.max_ratio, "pass": r.passed}
                               for r in reps], "pass": ok})
    else:
        text = _csv(["k", "T", "h", "max_ratio", "pass"], [[r.k, r.T, r.h, r.max_ratio, r.passed] for r in reps])
    return text, ok


def _smooth_one(args):
    theta, r, samples = args
    p = smoothing.build_profile(theta, r, samples=samples)
    rep = smoothing.curvature_profile(p)
    ln = smoothing.length_decrease(p)
    summary = {
        "theta": theta,
        "r": r,
        "R": p.R,
        "sup_kappa": rep.sup_curvature,
        "c_times_R": rep.sup_curvature * p.R,
        "ray_sup_kappa": rep.ray_sup,
        "arc_len": ln.arc_len,
        "corner_len": ln.corner_len,
        "ratio": ln.ratio,
        "strict": ln.strict,
    }
    return summary, rep.s.tolist(), rep.kappa.tolist()


def cmd_smooth(a):
    res = _pmap(_smooth_one, [(t, a.r, a.samples) for t in a.theta], a.jobs)
    summaries = [r[0] for r in res]
    ok = all(x["c_times_R"] <= smoothing.CALIBRATED_C and x["strict"] for x in summaries)
    doc = {"C": smoothing.CALIBRATED_C, "profiles": summaries, "pass": ok}
    if a.summary_out:
        _write(a.summary_out, _json(doc))
    if a.format == "json":
        return _json(doc), ok
    rows = [[x["theta"], s, k] for x, (_, ss, ks) in zip(summaries, res) for s, k in zip(ss, ks)]
    return _csv(["theta", "s", "kappa_g"], rows), ok


def cmd_lattice(a):
    F = lattices.QuadForm.standard(a.n, a.d)
    elems = lattices.enumerate_elements(F, a.height, jobs=a.jobs)
    ordered = sorted(elems, key=lambda e: json.dumps(e.coords()))
    report = lattices.closure_report(elems, F, a.height)
    out = {
        "d": a.d,
        "n": a.n,
        "height": a.height,
        "basis": str(F.basis),
        "count": len(ordered),
        "elements": [e.coords() for e in ordered],
        "closure_report": report.as_dict(),
    }
    if a.angles_in is not None:
        res = lattices.angle_search(F, a.angle_height, a.angles_in)
        hist_rows = [[lo, hi, int(c)] for lo, hi, c in zip(res.bin_edges[:-1], res.bin_edges[1:], res.counts)]
        out["angles"] = {
            "interval": list(a.angles_in),
            "height": a.angle_height,
            "planes": res.planes,
            "pairs": [p.coords() for p in res.pairs],
        }
        if a.hist_out:
            with open(a.hist_out, "w", newline="") as fh:
                fh.write(_csv(["bin_lo", "bin_hi", "count"], hist_rows))
        else:
            out["angles"]["histogram"] = [{"bin_lo": lo, "bin_hi": hi, "count": c} for lo, hi, c in hist_rows]
    if a.format == "csv":
        return _csv(["index", "matrix"], [[i, json.dumps(m)] for i, m in enumerate(out["elements"])]), True
    return _json(out), True


def _load_json(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _random_system(k: int, rng: np.random.Generator) -> wallspace.WallSystem:
    return wallspace.WallSystem(rng.uniform(0.0, 2 * math.pi, size=(k, 2)).tolist())


def cmd_cubulate(a):
    if a.random is not None:
        ws = _random_system(a.random, np.random.default_rng(a.seed))
    else:
        doc = _load_json(a.input)
        ws = wallspace.WallSystem(doc["walls"], int(doc.get("symmetry_N", 1)))
    c = wallspace.build_dual(ws, jobs=a.jobs)
    rep = wallspace.check_cat0(c)
    dims = c.cubes_by_dim()
    out = {
        "walls": [[w.alpha, w.beta] for w in ws.walls],
        "vertices": dims[0],
        "edges": dims[1] if len(dims) > 1 else 0,
        "cubes_by_dim": dims,
        "cat0": rep.as_dict(),
        "families": wallspace.hyperplane_families(c, ws),
    }
    return _json(out), rep.ok


def cmd_separate(a):
    if a.walls:
        doc = _load_json(a.walls)
        ws = wallspace.WallSystem(doc["walls"], int(doc.get("symmetry_N", 1)))
    else:
        ws = wallspace.rotated_diameters(a.diameters)
    out = {"walls": len(ws)}
    ok = True
    if a.b is not None:
        s = wallspace.separates_pair(ws, a.b[0], a.b[1])
        out["pair"] = {"b1": a.b[0], "b2": a.b[1], "separated": s.separated, "wall": s.wall}
    if a.grid is not None:
        rep = wallspace.filling_at_resolution(ws, wallspace.grid_points(a.grid))
        out["grid"] = {"resolution": rep.resolution, "filling": rep.filling, "unseparated": rep.unseparated,
                       "witness": list(rep.witness) if rep.witness else None}
        ok = rep.filling
    if a.random_pairs:
        rng = np.random.default_rng(a.seed)
        pts = rng.uniform(0.0, 2 * math.pi, size=(a.random_pairs, 2))
        res = [wallspace.separates_pair(ws, p, q) for p, q in pts]
        out["random"] = {"pairs": a.random_pairs, "separated": sum(r.separated for r in res),
                         "samples": [[float(p), float(q), r.wall] for (p, q), r in zip(pts, res)]}
    return _json(out), ok


# ---- parser -------------------------------------------------------------------


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("PLEATLAB_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=_default_jobs())

    p = argparse.ArgumentParser(prog="pleatlab", description="Hyperbolic bend-and-smooth workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trig", parents=[common], help="closed-form hyperbolic trigonometry")
    mode = t.add_mutually_exclusive_group(required=True)
    for flag in ("tangency", "lambert", "hull", "tube", "inversion"):
        mode.add_argument(f"--{flag}", action="store_true")
    t.add_argument("--theta", type=float)
    t.add_argument("--eps", type=float)
    t.add_argument("--n", type=int)
    t.add_argument("--A", type=float)
    t.add_argument("--x", type=float)
    t.add_argument("--format", choices=("json", "csv"), default="json")
    t.set_defaults(func=cmd_trig)

    v = sub.add_parser("verify-lemma47", parents=[common], help="curvature comparison certificate")
    v.add_argument("--k", type=_floats, required=True, help="comma-separated curvature bounds")
    v.add_argument("--T", type=float, default=5.0)
    v.add_argument("--h", type=float, default=1e-3)
    v.add_argument("--profile", choices=("constant", "sine", "block"), default="constant")
    v.add_argument("--format", choices=("json", "csv"), default="csv")
    v.set_defaults(func=cmd_comparison)

    s = sub.add_parser("smooth", parents=[common], help="circle smoothing of a bent corner")
    s.add_argument("--theta", type=_floats, required=True, help="comma-separated bend angles")
    s.add_argument("--r", type=float, default=0.5)
    s.add_argument("--samples", type=int, default=2001)
    s.add_argument("--summary-out", default=None, help="also write the JSON summary to this path")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.set_defaults(func=cmd_smooth)

    la = sub.add_parser("lattice", parents=[common], help="integral orthogonal group enumeration")
    la.add_argument("--d", type=int, default=2)
    la.add_argument("--n", type=int, default=2)
    la.add_argument("--height", type=int, default=1)
    la.add_argument("--angles-in", type=_interval, default=None, metavar="A,B")
    la.add_argument("--angle-height", type=int, default=1)
    la.add_argument("--hist-out", default=None, help="CSV path for the angle histogram")
    la.add_argument("--format", choices=("json", "csv"), default="json")
    la.set_defaults(func=cmd_lattice)

    c = sub.add_parser("cubulate", parents=[common], help="dual cube complex of a wall system")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="JSON file {walls: [[a, b], ...], symmetry_N}; '-' for stdin")
    src.add_argument("--random", type=int, help="random system with this many walls (uses --seed)")
    c.add_argument("--format", choices=("json",), default="json")
    c.set_defaults(func=cmd_cubulate)

    se = sub.add_parser("separate", parents=[common], help="boundary-pair separation")
    src = se.add_mutually_exclusive_group(required=True)
    src.add_argument("--walls", help="JSON file {walls: [[a, b], ...]}")
    src.add_argument("--diameters", type=int, help="use N evenly rotated diameters")
    se.add_argument("--b", type=_interval, default=None, metavar="B1,B2")
    se.add_argument("--grid", type=int, default=None)
    se.add_argument("--random-pairs", type=int, default=0)
    se.add_argument("--format", choices=("json",), default="json")
    se.set_defaults(func=cmd_separate)
    return p


def _check_trig_args(p, a):
    need = {"tangency": ("theta", "eps"), "lambert": ("theta", "eps"), "hull": ("theta", "eps"),
            "tube": ("n", "A"), "inversion": ("x",)}
    for mode, flags in need.items():
        if getattr(a, mode):
            missing = [f"--{f}" for f in flags if getattr(a, f) is None]
            if missing:
                p.error(f"trig --{mode} requires {', '.join(missing)}")


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    p = build_parser()
    a = p.parse_args(argv)
    if a.command == "trig":
        _check_trig_args(p, a)
    if a.jobs < 1:
        p.error("--jobs must be >= 1")
    try:
        text, ok = a.func(a)
    except (PleatlabError, ValueError, RuntimeError, ArithmeticError, KeyError, OSError) as exc:
        _write(a.out, _json({"error": f"{type(exc).__name__}: {exc}"}))
        return 1
    _write(a.out, text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
