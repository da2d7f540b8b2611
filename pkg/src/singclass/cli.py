"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 numeric failure, 4 provisional
result (result still printed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import errors
from .classify import classify_curve, canonical_form
from .catalogue import (dump_manifest, find_realizations, load_manifest,
                        run_catalogue)
from .diagram import diagram_to_json
from .parser import parse_poly
from .polygon import newton_polygon
from .puiseux import ExpansionSettings, expand_to_probranches, puiseux_expand
from .render import to_text, to_tikz
from .report import summary_table, write_report

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_PROVISIONAL = 4


def _settings_from(args) -> ExpansionSettings:
    bits = args.precision or int(os.environ.get("SINGCLASS_PRECISION", "256"))
    kw = {"precision_bits": bits}
    if getattr(args, "tol", None):
        kw["tol"] = args.tol
    if getattr(args, "max_order", None):
        kw["max_order"] = Fraction(args.max_order)
    return ExpansionSettings(**kw)


def _read_poly(args):
    if getattr(args, "file", None):
        with open(args.file) as fh:
            text = fh.read().strip()
    else:
        text = args.poly
    if not text:
        raise errors.PolyParseError(0, "a curve expression")
    return parse_poly(text)


def cmd_classify(args):
    f = _read_poly(args)
    settings = _settings_from(args)
    result = classify_curve(f, settings)
    key = result.key_real if args.mode == "real" else result.key_complex
    if args.format == "json":
        print(json.dumps(result.to_json(), indent=1))
    elif args.format == "tikz":
        print(to_tikz(result.diagram))
    else:
        print(key.text)
        if result.flags:
            print("flags:", ", ".join(sorted(result.flags)), file=sys.stderr)
    return EXIT_PROVISIONAL if result.provisional else EXIT_OK


def cmd_polygon(args):
    f = _read_poly(args)
    poly = newton_polygon(f)
    if args.format == "json":
        print(json.dumps(poly.to_json(), indent=1))
    elif args.format == "tikz":
        print(to_tikz(poly))
    else:
        for e in poly.edges:
            mu = f"{e.mu.numerator}/{e.mu.denominator}" \
                if e.mu.denominator != 1 else str(e.mu.numerator)
            print(f"edge {e.p1} -> {e.p2}  mu={mu}  height={e.height}")
    return EXIT_OK


def cmd_puiseux(args):
    f = _read_poly(args)
    settings = _settings_from(args)
    cycles, flags = puiseux_expand(f, settings)
    if args.format == "json":
        print(json.dumps({"cycles": [c.to_json() for c in cycles],
                          "flags": sorted(flags)}, indent=1))
    else:
        import mpmath as mp
        branches = expand_to_probranches(cycles, settings)
        for c in cycles:
            print(f"cycle {c.cycle_id}: ramification {c.ramification}, "
                  f"real rays {c.real_rays}")
            for e, v in c.terms:
                print(f"    x^({e})  *  {mp.nstr(v.v, 12)}")
        for b in branches:
            tag = "real" if b.is_real else (
                "real-marked" if b.real_marked else "complex")
            print(f"  branch {b.branch_id} (cycle {b.cycle_id}, k={b.root_of_unity_index}): {tag}")
    return EXIT_PROVISIONAL if flags else EXIT_OK


def cmd_render(args):
    f = _read_poly(args)
    settings = _settings_from(args)
    result = classify_curve(f, settings)
    if args.what == "polygon":
        obj = result.polygon
    else:
        obj = result.diagram
    if args.format == "tikz":
        print(to_tikz(obj))
    elif args.format == "json":
        print(json.dumps(diagram_to_json(obj) if args.what == "diagram"
                         else obj.to_json(), indent=1))
    elif args.format == "png":
        from .render import render_figure
        out = args.out or "render.png"
        render_figure(out, diagram=result.diagram, polygon=result.polygon,
                      title=str(f))
        print(out)
    else:
        print(to_text(obj) if args.what == "diagram" else obj.to_json())
    return EXIT_OK


def cmd_catalogue(args):
    families = load_manifest(args.manifest)
    if args.multiplicity:
        families = [f for f in families if f.multiplicity == args.multiplicity]
    settings = _settings_from(args)
    report = run_catalogue(families, settings,
                           samples_per_family=args.samples, seed=args.seed,
                           jobs=args.jobs)
    print(summary_table(report))
    if args.out:
        write_report(report, args.out, figures=not args.no_figures)
        print(f"\nreport written to {args.out}/", file=sys.stderr)
    return EXIT_OK if not report.errors else EXIT_NUMERIC


def cmd_realize(args):
    families = load_manifest(args.manifest)
    matching = [f for f in families if f.id == args.family]
    if not matching:
        print(f"unknown family {args.family!r}", file=sys.stderr)
        return EXIT_INPUT
    settings = _settings_from(args)
    try:
        results = find_realizations(matching[0], Fraction(args.target),
                                    settings, budget=args.budget,
                                    seed=args.seed)
    except errors.Exhausted as e:
        print(f"Exhausted: {e.reason} (absence is not a nonexistence proof)")
        return EXIT_OK
    f, r = results[0]
    print(f"curve: {f}")
    print(f"key (real):    {r.key_real.text}")
    print(f"key (complex): {r.key_complex.text}")
    return EXIT_OK


def cmd_manifest(args):
    families = load_manifest(args.manifest)
    if args.list:
        for f in families:
            slots = sum(1 for d in f.diagrams if d.params or d.pair_values)
            print(f"{f.id:12s} m={f.multiplicity} polygon={f.polygon_id:8s} "
                  f"cone={f.tangent_cone:42s} diagrams={len(f.diagrams)} "
                  f"(slotted {slots})")
    else:
        dump_manifest(families, sys.stdout)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="singclass",
        description="Classify singular points of plane algebraic curves "
                    "at the origin by Newton polygons, Puiseux expansions, "
                    "and weighted contact-exponent tree diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, poly=True):
        if poly:
            g = sp.add_mutually_exclusive_group(required=True)
            g.add_argument("--poly", help="curve expression, e.g. 'y^2-x^3'")
            g.add_argument("--file", help="file containing the expression")
        sp.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (default 256 or "
                             "$SINGCLASS_PRECISION)")
        sp.add_argument("--tol", type=float, default=None,
                        help="root clustering tolerance")
        sp.add_argument("--max-order", default=None,
                        help="truncation order p/q (default adaptive)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("classify", help="classify the singular point")
    common(sp)
    sp.add_argument("--mode", choices=("real", "complex"), default="real")
    sp.add_argument("--format", choices=("text", "json", "tikz"),
                    default="text")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("polygon", help="Newton polygon of the curve")
    common(sp)
    sp.add_argument("--format", choices=("text", "json", "tikz"),
                    default="text")
    sp.set_defaults(func=cmd_polygon)

    sp = sub.add_parser("puiseux", help="Puiseux cycles of the curve")
    common(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_puiseux)

    sp = sub.add_parser("render", help="render diagram or polygon")
    common(sp)
    sp.add_argument("--what", choices=("diagram", "polygon"),
                    default="diagram")
    sp.add_argument("--format", choices=("text", "json", "tikz", "png"),
                    default="tikz")
    sp.add_argument("--out", default=None, help="output file for png")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("catalogue", help="run a family catalogue")
    common(sp, poly=False)
    sp.add_argument("--manifest", default=None,
                    help="manifest JSON (default: packaged data)")
    sp.add_argument("--multiplicity", type=int, default=None)
    sp.add_argument("--samples", type=int, default=0,
                    help="generic samples per family")
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--out", default=None, help="report output directory")
    sp.add_argument("--no-figures", action="store_true")
    sp.set_defaults(func=cmd_catalogue)

    sp = sub.add_parser("realize", help="search for a parameter realization")
    common(sp, poly=False)
    sp.add_argument("--manifest", default=None)
    sp.add_argument("--family", required=True)
    sp.add_argument("--target", required=True, help="target label p/q")
    sp.add_argument("--budget", type=int, default=60)
    sp.set_defaults(func=cmd_realize)

    sp = sub.add_parser("manifest", help="inspect the packaged manifest")
    sp.add_argument("--manifest", default=None)
    sp.add_argument("--list", action="store_true")
    sp.set_defaults(func=cmd_manifest)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (errors.PolyParseError, errors.DegreeOverflow, errors.SchemaError,
            errors.ZeroPolynomial, FileNotFoundError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (errors.NumericFailure, errors.NeedsPreparation,
            errors.NonReduced, errors.DepthExceeded,
            errors.UltrametricViolation) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
