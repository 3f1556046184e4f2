"""Command-line interface.

Exit codes: 0 success, 1 usage or malformed input file, 2 domain error
(parse failure, singular point, violated hypothesis), 3 inconclusive
multiplicity, 4 bound violation found by ``experiment``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import bounds as bnd
from . import polytope as pt
from .experiment import (
    CSV_FIELDS,
    ExperimentConfig,
    GenerationError,
    Instance,
    generate_instance,
    rows_to_csv,
    run_experiment,
    run_instance,
)
from .formats import FormatError, load_cycle, load_field, load_levels, load_points, load_polytope, parse_point
from .multiplicity import AUTO, CERTIFIED_INFINITE, FINITE, multiplicity
from .polyalg import PolynomialError, parse_poly
from .polytope import PolytopeError
from .witness import WitnessError, degf_eval, witness_family, witness_set

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_INCONCLUSIVE, EXIT_VIOLATION = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(fmt: str, rows: list[dict], fields: list[str], payload=None) -> str:
    if fmt == "json":
        return json.dumps(payload if payload is not None else rows, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    widths = {f: max([len(f)] + [len(str(r.get(f, ""))) for r in rows]) for f in fields}
    lines = ["  ".join(f.ljust(widths[f]) for f in fields)]
    lines += ["  ".join(str(r.get(f, "")).ljust(widths[f]) for f in fields) for r in rows]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _cutoff(text: str):
    if text == AUTO:
        return AUTO
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cutoff must be 'auto' or a nonnegative integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("cutoff must be nonnegative")
    return value


# subcommands -----------------------------------------------------------------------


def cmd_mult(args) -> int:
    field = load_field(args.field)
    if args.poly_file:
        text = Path(args.poly_file).read_text(encoding="utf-8").strip()
    else:
        text = args.poly
    poly = parse_poly(text, field.n, field.mode)
    point = parse_point(args.point)
    res = multiplicity(field, poly, point, args.cutoff)
    row = res.to_dict()
    fields = ["status", "order", "witness_value", "cutoff", "certificate"]
    if args.format == "table":
        out = "\n".join(f"{k}: {'' if row[k] is None else row[k]}" for k in fields) + "\n"
    else:
        out = _emit(args.format, [row], fields, row)
    sys.stdout.write(out)
    return EXIT_OK if res.status in (FINITE, CERTIFIED_INFINITE) else EXIT_INCONCLUSIVE


def cmd_bounds(args) -> int:
    poly_poly = load_polytope(args.poly_polytope) if args.poly_polytope else None
    field_poly = load_polytope(args.field_polytope) if args.field_polytope else None
    if (poly_poly is None) != (field_poly is None):
        raise UsageError("--poly-polytope and --field-polytope must be given together")
    params = bnd.BoundParams(args.n, args.d, args.delta, poly_poly, field_poly, args.mode)
    report = bnd.compare_report(params, args.which, waive=args.waive)
    if args.multipoint:
        counts = [int(x) for x in args.multipoint.split(",")]
        report.add("multipoint", bnd.multipoint_bound(args.n, args.d, args.delta, counts),
                   "several-point estimate with incidence counts")
    rows = [{"name": e.name, "value": str(e.value), "cite": e.cite} for e in report.entries]
    if args.format == "table" and report.comparisons:
        text = _emit("table", rows, ["name", "value", "cite"])
        text += "".join(f"checked: {' '.join(c)}\n" for c in report.comparisons)
        text += "".join(f"note: {n}\n" for n in report.notes)
        sys.stdout.write(text)
    else:
        sys.stdout.write(_emit(args.format, rows, ["name", "value", "cite"], report.to_dict()))
    return EXIT_OK


def cmd_polytope(args) -> int:
    polys = [load_polytope(f) for f in args.files]
    op = args.op
    if op == "hull":
        rows = [{"file": f, "vertices": json.dumps([list(v) for v in p.vertices])} for f, p in zip(args.files, polys)]
        payload = [{"file": f, **pt_dump(p)} for f, p in zip(args.files, polys)]
        sys.stdout.write(_emit(args.format, rows, ["file", "vertices"], payload))
        return EXIT_OK
    if op == "volume":
        rows = [{"file": f, "volume": str(pt.volume(p))} for f, p in zip(args.files, polys)]
        sys.stdout.write(_emit(args.format, rows, ["file", "volume"]))
        return EXIT_OK
    if op == "quermass":
        if len(polys) != 1 or args.j is None:
            raise UsageError("quermass needs one polytope file and --j")
        value = pt.quermassintegral(polys[0], args.j)
        rows = [{"j": args.j, "quermassintegral": str(value)}]
        sys.stdout.write(_emit(args.format, rows, ["j", "quermassintegral"], rows[0]))
        return EXIT_OK
    if op == "mixed-volume":
        value = str(pt.mixed_volume(polys))
        rows = [{"mixed_volume": value}]
    else:
        rows = [{"bk_count": pt.bk_count(polys)}]
    sys.stdout.write(_emit(args.format, rows, list(rows[0]), rows[0]))
    return EXIT_OK


def pt_dump(p) -> dict:
    return {"n": p.n, "vertices": [list(v) for v in p.vertices], "volume": str(pt.volume(p))}


def cmd_witness(args) -> int:
    if args.cycle:
        if args.at is None or args.n is None:
            raise UsageError("--cycle needs --n and --at")
        value = degf_eval(load_cycle(args.cycle, args.n), parse_point(args.at))
        rows = [{"degf": value}]
        sys.stdout.write(_emit(args.format, rows, ["degf"], rows[0]))
        return EXIT_OK
    if args.levels:
        n, D, levels = load_levels(args.levels)
        chosen = witness_family(levels, n, D)
    elif args.points:
        if args.n is None or args.D is None:
            raise UsageError("--points needs --n and --D")
        chosen = witness_set(load_points(args.points), args.n, args.D)
    else:
        raise UsageError("witness needs --levels, --points or --cycle")
    rows = [{"point": " ".join(str(x) for x in p)} for p in chosen]
    payload = [[str(x) for x in p] for p in chosen]
    sys.stdout.write(_emit(args.format, rows, ["point"], payload))
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.instance is not None:
        config = ExperimentConfig(args.n, args.d, args.delta, args.trials, args.seed, args.coeff_range,
                                  args.cutoff).with_env()
        inst = generate_instance(config, args.instance)
        sys.stdout.write(json.dumps({**inst.to_dict(), "cutoff": config.cutoff}, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    if args.replay:
        data = json.loads(Path(args.replay).read_text(encoding="utf-8"))
        rows = [run_instance(Instance.from_dict(data), data.get("cutoff", AUTO))]
        failures = [] if rows[0]["pass"] == "pass" else [data]
    else:
        config = ExperimentConfig(args.n, args.d, args.delta, args.trials, args.seed, args.coeff_range,
                                  args.cutoff).with_env()
        rows, bad = run_experiment(config)
        failures = [{**inst.to_dict(), "cutoff": config.cutoff} for inst in bad]
    if args.format == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    elif args.format == "table":
        text = _emit("table", rows, CSV_FIELDS)
    else:
        text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if failures:
        dump = json.dumps(failures, indent=2, sort_keys=True)
        if args.violations:
            Path(args.violations).write_text(dump + "\n", encoding="utf-8")
        sys.stderr.write(f"bound violated on {len(failures)} instance(s):\n{dump}\n")
        return EXIT_VIOLATION
    return EXIT_OK


# parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json", "csv"], default=argparse.SUPPRESS)

    parser = _Parser(prog="multlab", description="Multiplicities along vector-field trajectories and their bounds.")
    parser.add_argument("--format", choices=["table", "json", "csv"], default=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mult", parents=[common], help="multiplicity of a polynomial at a point")
    p.add_argument("--field", required=True, help="vector field JSON file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--poly", help="polynomial text, e.g. 'x1^2 - x2'")
    g.add_argument("--poly-file")
    p.add_argument("--point", required=True, help="comma-separated rationals or a JSON array")
    p.add_argument("--cutoff", type=_cutoff, default=AUTO)
    p.set_defaults(func=cmd_mult)

    p = sub.add_parser("bounds", parents=[common], help="evaluate and compare multiplicity bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--which", choices=["all", "degree", "gr", "polytope"], default="all")
    p.add_argument("--poly-polytope", help="Newton polytope of P (JSON file)")
    p.add_argument("--field-polytope", help="Newton polytope of V (JSON file)")
    p.add_argument("--mode", choices=["affine", "torus"], default="affine")
    p.add_argument("--waive", action="store_true", help="evaluate polytope bounds even when hypotheses fail")
    p.add_argument("--multipoint", help="comma-separated incidence counts a_0..a_{n-1}")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("polytope", parents=[common], help="lattice polytope computations")
    p.add_argument("op", choices=["hull", "volume", "mixed-volume", "quermass", "bk-count"])
    p.add_argument("files", nargs="+", help="polytope JSON files")
    p.add_argument("--j", type=int)
    p.set_defaults(func=cmd_polytope)

    p = sub.add_parser("witness", parents=[common], help="witness sets and cycle degree functions")
    p.add_argument("--levels", help="level-set JSON file")
    p.add_argument("--points", help="point JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--D", type=int)
    p.add_argument("--cycle", help="cycle JSON file")
    p.add_argument("--at", help="evaluation point for --cycle")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("experiment", parents=[common], help="randomized soundness experiment")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--delta", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--coeff-range", type=int, default=3)
    p.add_argument("--cutoff", type=_cutoff, default=AUTO)
    p.add_argument("--out", help="write rows here instead of stdout")
    p.add_argument("--violations", help="write failing instances here for replay")
    p.add_argument("--replay", help="rerun one serialized instance")
    p.add_argument("--instance", type=int, help="print instance K of the stream as JSON and exit")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.format is None:
        args.format = "csv" if args.command == "experiment" else "table"
    try:
        return args.func(args)
    except (UsageError, FormatError, OSError) as exc:
        sys.stderr.write(f"multlab: error: {exc}\n")
        return EXIT_USAGE
    except (PolynomialError, PolytopeError, WitnessError, bnd.BoundError, GenerationError, ArithmeticError) as exc:
        sys.stderr.write(f"multlab: {exc}\n")
        return EXIT_DOMAIN
    except ValueError as exc:
        sys.stderr.write(f"multlab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
