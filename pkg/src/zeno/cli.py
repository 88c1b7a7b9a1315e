"""Command-line driver.

    zeno point <config> [--engines ...] [--oracle] [--out file.csv]
    zeno sweep <config> --axis T --from 0.01 --to 1.0 --count 50 --spacing log
               --engines perturbative,asymptotic [--oracle] [--jobs N] [--out file.csv]

Output is CSV: a ``#``-prefixed block echoing the resolved scenario, a header
row, then one row per point.  Floats carry 17 significant digits.

Exit codes: 0 success, 1 validation error, 2 numerical/engine error,
3 partial sweep (some rows failed).
"""

import argparse
import csv
import io
import math
import sys

from . import engines as eng
from .config import ConfigError, dump_config, load_config

EXIT_OK, EXIT_INVALID, EXIT_ENGINE, EXIT_PARTIAL = 0, 1, 2, 3


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float)):
        return format(float(value), ".17g")
    return str(value)


def _engine_list(text, sc, with_oracle):
    if text:
        names = [e.strip() for e in text.split(",") if e.strip()]
    else:
        names = [eng.PERTURBATIVE]
        if sc.is_two_level():
            names += [eng.TWOLEVEL, eng.ASYMPTOTIC]
    bad = [e for e in names if e not in eng.ENGINES]
    if bad:
        raise ConfigError(f"unknown engines {bad}; choose from {', '.join(eng.ENGINES)}")
    if with_oracle and eng.ORACLE not in names:
        names.append(eng.ORACLE)
    if not with_oracle and eng.ORACLE in names:
        names.remove(eng.ORACLE)
        if not names:
            raise ConfigError("only the oracle engine was requested but --oracle was not given")
    return names


def render_csv(sc, rows, cols, preamble=(), summary=()):
    """Full CSV document as a string."""
    buf = io.StringIO()
    buf.write("# zeno scenario (resolved)\n")
    for line in dump_config(sc).splitlines():
        buf.write(f"#   {line}\n")
    for line in preamble:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for rec in rows:
        writer.writerow([_fmt(rec.get(c, math.nan)) for c in cols])
    for line in summary:
        buf.write(f"# summary: {line}\n")
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_errors(rows, names):
    for k, rec in enumerate(rows):
        for e in eng.failed_engines(rec, names):
            print(f"row {k}: {e}: {rec[f'{e}_error']}", file=sys.stderr)


def cmd_point(args):
    sc = load_config(args.config)
    names = _engine_list(args.engines, sc, args.oracle)
    rec = eng.run_point(sc, names)
    text = render_csv(sc, [rec], eng.columns(names), preamble=[f"engines: {','.join(names)}"])
    _emit(text, args.out)
    _report_errors([rec], names)
    return EXIT_ENGINE if eng.failed_engines(rec, names) else EXIT_OK


def cmd_sweep(args):
    sc = load_config(args.config)
    names = _engine_list(args.engines, sc, args.oracle)
    if args.values:
        spec = eng.SweepSpec(args.axis, tuple(float(v) for v in args.values.split(",")), tuple(names))
    else:
        if args.start is None or args.stop is None:
            raise ConfigError("sweep needs --from and --to (or --values)")
        spec = eng.SweepSpec.from_range(args.axis, args.start, args.stop, args.count, args.spacing, names)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    rows = eng.run_sweep(sc, spec, jobs=args.jobs)
    summary = [f"slope_R_vs_T[{e}] = {_fmt(s)} intercept = {_fmt(c)}" for e, (s, c) in eng.sweep_summary(spec, rows).items()]
    preamble = [f"sweep: axis={spec.axis} count={len(spec.values)}", f"engines: {','.join(names)}"]
    text = render_csv(sc, rows, [spec.axis] + eng.columns(names), preamble, summary)
    _emit(text, args.out)
    _report_errors(rows, names)
    failed = sum(bool(eng.failed_engines(r, names)) for r in rows)
    if failed == 0:
        return EXIT_OK
    return EXIT_ENGINE if failed == len(rows) else EXIT_PARTIAL


def build_parser():
    parser = argparse.ArgumentParser(prog="zeno", description="Measurement-modified jump probabilities and decay rates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="scenario YAML file")
        p.add_argument("--engines", help="comma-separated subset of " + ",".join(eng.ENGINES))
        p.add_argument("--oracle", action="store_true", help="include the exact oracle (slow)")
        p.add_argument("--out", help="write CSV here instead of stdout")

    p_point = sub.add_parser("point", help="evaluate one configuration")
    common(p_point)
    p_point.set_defaults(func=cmd_point)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=eng.AXES)
    p_sweep.add_argument("--from", dest="start", type=float)
    p_sweep.add_argument("--to", dest="stop", type=float)
    p_sweep.add_argument("--count", type=int, default=10)
    p_sweep.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p_sweep.add_argument("--values", help="explicit comma-separated values (overrides --from/--to)")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"zeno: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as exc:
        print(f"zeno: numerical error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
