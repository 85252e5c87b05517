"""Command line front end: instance I/O, solving, verification, diagnostics.

Instance and result files carry coordinates as decimal strings so that a
parse/serialize round trip is bit-exact across languages.

Exit codes: 0 success, 1 verification mismatch, 2 size cap exceeded,
3 parse error, 4 unsupported density.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .geometry import GeometryError, PoincarePoint
from .instances import (
    GenerationError,
    gen_grid_like,
    gen_random_alpha_spaced,
    gen_regular_ngon,
)
from .separator import SegmentClass, bounds, build_region, classify_segment
from .solvers import (
    CapExceededError,
    SolverConfig,
    SolveResult,
    UnsupportedDensityError,
    held_karp_tsp,
    tsp_via_path_cover,
)
from .tour import Instance, Tour, tour_is_noncrossing, tour_length, verify_spacing

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CAP = 2
EXIT_PARSE = 3
EXIT_DENSITY = 4


class ParseError(ValueError):
    pass


def serialize_instance(inst: Instance) -> str:
    doc = {
        "model": "poincare",
        "alpha": repr(inst.alpha),
        "points": [[repr(p.x), repr(p.y)] for p in inst.points],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("model") != "poincare":
        raise ParseError('instance file must declare "model": "poincare"')
    try:
        alpha = float(doc["alpha"])
        pts = tuple(PoincarePoint(float(x), float(y)) for x, y in doc["points"])
    except (KeyError, TypeError, ValueError, GeometryError) as exc:
        raise ParseError(f"malformed instance file: {exc}") from exc
    inst = Instance(pts, alpha)
    if inst.n >= 2:
        _, ok = verify_spacing(inst)
        if not ok:
            raise ParseError("instance violates its declared spacing")
    return inst


def load_instance(path: str) -> Instance:
    try:
        with open(path) as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def serialize_result(res: SolveResult, algorithm: str) -> str:
    assert isinstance(res.witness, Tour)
    doc = {
        "length": f"{res.length:.15g}",
        "tour": list(res.witness.order),
        "algorithm": algorithm,
        "stats": res.stats.as_dict(),
    }
    return json.dumps(doc, indent=2) + "\n"


def load_result(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read result {path}: {exc}") from exc
    if not isinstance(doc, dict) or "length" not in doc or "tour" not in doc:
        raise ParseError("result file needs 'length' and 'tour'")
    return doc


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _config_from_args(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        threshold_t=args.threshold_t,
        epsilon_len=args.epsilon,
        prune_crossing=not args.no_prune_crossing,
        prune_reroute=not args.no_prune_reroute,
        prune_matchings=args.prune_matchings,
        parallel=args.parallel,
    )


def _add_solver_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--threshold-t", type=int, default=8, dest="threshold_t")
    sp.add_argument("--epsilon", type=float, default=1e-9)
    sp.add_argument("--no-prune-crossing", action="store_true")
    sp.add_argument("--no-prune-reroute", action="store_true")
    sp.add_argument("--prune-matchings", action="store_true")
    sp.add_argument("--parallel", action="store_true")


def cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "random":
        inst = gen_random_alpha_spaced(args.n, args.alpha, args.seed)
    elif args.kind == "ngon":
        inst = gen_regular_ngon(args.n, args.side)
    else:
        inst = gen_grid_like(args.n, args.c, args.alpha).to_instance()
    _write(args.out, serialize_instance(inst))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    cfg = _config_from_args(args)
    if args.algo == "heldkarp":
        res = held_karp_tsp(inst)
    elif args.algo == "brute":
        res = tsp_via_path_cover(inst, cfg, engine="brute")
    else:
        res = tsp_via_path_cover(inst, cfg, engine="dnc")
    if not res.feasible:
        print("infeasible", file=sys.stderr)
        return EXIT_MISMATCH
    if args.check:
        recomputed = tour_length(res.witness, inst)
        if abs(recomputed - res.length) > 1e-9 * max(1.0, abs(recomputed)):
            print("self-check failed: witness length mismatch", file=sys.stderr)
            return EXIT_MISMATCH
        if sorted(res.witness.order) != list(range(inst.n)):
            print("self-check failed: witness is not a permutation", file=sys.stderr)
            return EXIT_MISMATCH
    _write(args.out, serialize_result(res, args.algo))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    doc = load_result(args.result)
    order = doc["tour"]
    if sorted(order) != list(range(inst.n)):
        print("INVALID TOUR: not a permutation")
        return EXIT_MISMATCH
    t = Tour(tuple(order))
    recomputed = tour_length(t, inst)
    stated = float(doc["length"])
    rel = abs(recomputed - stated) / max(1.0, abs(recomputed))
    if rel > 1e-9:
        print(f"LENGTH MISMATCH: stated {stated!r}, recomputed {recomputed!r}")
        return EXIT_MISMATCH
    if inst.n >= 3 and not tour_is_noncrossing(t, inst):
        print("warning: tour self-crosses (cannot be optimal)", file=sys.stderr)
    print("OK")
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    region = build_region(list(inst.points), inst.alpha)
    bnds = bounds(region, inst.alpha)
    from .geometry import side_of_line

    sides = [side_of_line(p, region.axis) for p in inst.points]
    in_r = [region.contains(p) for p in inst.points]
    report = {
        "n": inst.n,
        "alpha": repr(inst.alpha),
        "centerpoint": [repr(region.cone.apex.x), repr(region.cone.apex.y)],
        "line_ideal_points": [list(map(repr, region.axis.ideal_a)), list(map(repr, region.axis.ideal_b))],
        "qt": repr(region.qt_distance()),
        "rho": repr(region.rho),
        "n_in": repr(bnds.n_in),
        "s_cr": repr(bnds.s_cr),
        "points_in_region": sum(in_r),
        "points_in_region_ok": sum(in_r) < bnds.n_in,
        "side_counts": {"positive": sum(s > 0 for s in sides), "negative": sum(s < 0 for s in sides)},
        "balance_ok": max(sum(s > 0 for s in sides), sum(s < 0 for s in sides)) <= (2 * inst.n) // 3,
        "cone_empty_ok": not any(region.cone.contains_open(p) for p in inst.points),
    }
    tour = None
    if args.result:
        doc = load_result(args.result)
        tour = Tour(tuple(doc["tour"]))
        histogram = {c.value: 0 for c in SegmentClass}
        n = inst.n
        for i in range(n):
            seg = inst.segment(tour.order[i], tour.order[(i + 1) % n])
            histogram[classify_segment(seg, region).value] += 1
        report["tour_segment_classes"] = histogram
        report["crossings_ok"] = histogram["crosses"] < bnds.s_cr
    print(json.dumps(report, indent=2))
    if args.svg:
        from .svg import render_separator_svg

        with open(args.svg, "w") as fh:
            fh.write(render_separator_svg(inst, region, tour))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    alphas = [float(a) for a in args.alphas.split(",")]
    algos = args.algos.split(",")
    cfg = _config_from_args(args)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n", "alpha", "algo", "length", "nodes", "time_s"])
    for n in sizes:
        for alpha in alphas:
            inst = gen_random_alpha_spaced(n, alpha, args.seed)
            for algo in algos:
                if algo == "heldkarp":
                    res = held_karp_tsp(inst)
                elif algo == "brute":
                    res = tsp_via_path_cover(inst, cfg, engine="brute")
                elif algo == "dnc":
                    res = tsp_via_path_cover(inst, cfg, engine="dnc")
                else:
                    raise ParseError(f"unknown algorithm {algo!r}")
                writer.writerow(
                    [n, alpha, algo, f"{res.length:.15g}", res.stats.nodes, f"{res.stats.wall_time_s:.4f}"]
                )
    _write(args.out, buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypertsp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    gsub = g.add_subparsers(dest="kind", required=True)
    gr = gsub.add_parser("random")
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--alpha", type=float, required=True)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("--out", default="-")
    gn = gsub.add_parser("ngon")
    gn.add_argument("--n", type=int, required=True)
    gn.add_argument("--side", type=float, required=True)
    gn.add_argument("--out", default="-")
    gg = gsub.add_parser("grid")
    gg.add_argument("--n", type=int, required=True)
    gg.add_argument("--c", type=float, required=True)
    gg.add_argument("--alpha", type=float, required=True)
    gg.add_argument("--out", default="-")
    for p in (gr, gn, gg):
        p.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--algo", choices=("dnc", "heldkarp", "brute"), default="dnc")
    s.add_argument("--check", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="verify a result file against its instance")
    v.add_argument("instance")
    v.add_argument("result")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("inspect", help="separator diagnostics (JSON, optional SVG)")
    i.add_argument("instance")
    i.add_argument("--svg")
    i.add_argument("--result")
    i.set_defaults(func=cmd_inspect)

    b = sub.add_parser("bench", help="benchmark solvers over generated instances")
    b.add_argument("--sizes", default="6,8,10")
    b.add_argument("--alphas", default="1.5")
    b.add_argument("--algos", default="dnc,heldkarp")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="-")
    _add_solver_flags(b)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except UnsupportedDensityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DENSITY
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
