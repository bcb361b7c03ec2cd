"""``cpt`` command line.

Exit statuses: 0 ok, 2 catalog error, 3 unknown reference, 4 bad arguments,
5 reproduction outside tolerance.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from . import catalog as cat
from . import report, scenario as scen
from .errors import CatalogError, CPTError

EXIT_OK = 0
EXIT_CATALOG = 2
EXIT_UNKNOWN = 3
EXIT_USAGE = 4
EXIT_TOLERANCE = 5


class UsageError(CPTError):
    exit_status = EXIT_USAGE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(parser, suppress=False):
    default = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--catalog", metavar="PATH", default=default,
                   help="catalog JSON merged over the built-in records (env: CPT_CATALOG)")
    g.add_argument("--scenario", metavar="PATH", default=default, help="scenario JSON file")
    g.add_argument("--format", choices=["json", "csv", "md", "markdown"],
                   default=argparse.SUPPRESS if suppress else "md")
    g.add_argument("--output", metavar="PATH", default=default,
                   help="write data here instead of standard output")
    g.add_argument("--lenient", action="store_true",
                   default=argparse.SUPPRESS if suppress else False,
                   help="ignore unknown catalog fields instead of rejecting them")


def _scenario_flags(parser):
    parser.add_argument("--years", type=float)
    parser.add_argument("--hours-per-day", type=float)
    parser.add_argument("--utilization", type=float)
    parser.add_argument("--ef", type=float, help="grid emission factor, kgCO2/kWh")
    parser.add_argument("--grid", help="grid record id")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpt", description="Carbon per transistor calculator")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="list catalog records with provenance")
    _global_flags(p, suppress=True)

    p = sub.add_parser("assess", help="full breakdown for one processor")
    _global_flags(p, suppress=True)
    p.add_argument("--processor", required=True)
    _scenario_flags(p)

    p = sub.add_parser("compare", help="rank processors")
    _global_flags(p, suppress=True)
    p.add_argument("processors", nargs="+", metavar="ID")
    p.add_argument("--key", choices=scen.RANK_KEYS, default="total_per_transistor")
    _scenario_flags(p)

    p = sub.add_parser("sweep", help="sensitivity sweep over one scenario parameter")
    _global_flags(p, suppress=True)
    p.add_argument("--processor", required=True)
    p.add_argument("--param", required=True,
                   choices=sorted(set(scen.SWEEP_PARAMETERS) | set(scen.PARAMETER_ALIASES)))
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--workers", type=int, default=None, help=argparse.SUPPRESS)
    _scenario_flags(p)

    p = sub.add_parser("reproduce", help="recompute a published table with its discrepancy ledger")
    _global_flags(p, suppress=True)
    p.add_argument("--table", type=int, required=True)
    _scenario_flags(p)
    return parser


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _load_catalog(args) -> cat.Catalog:
    path = args.catalog or os.environ.get("CPT_CATALOG")
    if not path:
        return cat.load_builtin()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        catalog = cat.load_file(path, lenient=args.lenient)
    for w in caught:
        _warn(str(w.message))
    return catalog


def _scenario(args) -> scen.UsageScenario:
    s = scen.UsageScenario.from_file(args.scenario) if args.scenario else scen.UsageScenario()
    overrides = {
        "years": args.years,
        "hours_per_day": args.hours_per_day,
        "utilization": args.utilization,
        "emission_factor": args.ef,
        "grid_id": args.grid,
    }
    return replace(s, **{k: v for k, v in overrides.items() if v is not None})


def cmd_list(args, catalog):
    return report.render_catalog(catalog, args.format), EXIT_OK


def cmd_assess(args, catalog):
    s = _scenario(args)
    a = report.build_assessment(args.processor, s, catalog)
    return report.render([a], args.format), EXIT_OK


def cmd_compare(args, catalog):
    ids = []
    for pid in args.processors:
        if pid in ids:
            _warn(f"duplicate processor id {pid!r} ignored")
        else:
            ids.append(pid)
    for pid in ids:
        catalog.processor(pid)
    if len(ids) < 2:
        raise UsageError("compare needs at least two distinct processors")
    s = _scenario(args)
    ranked = scen.rank(ids, s, catalog, key=args.key)
    assessments = [report.build_assessment(pid, s, catalog) for pid, _ in ranked]
    return report.render(assessments, args.format), EXIT_OK


def cmd_sweep(args, catalog):
    spec = scen.SweepSpec(args.param, args.start, args.stop, args.steps)
    s = _scenario(args)
    points = scen.sweep(spec, s, args.processor, catalog, workers=args.workers)
    return report.render_sweep(args.processor, spec.parameter, points, args.format), EXIT_OK


def cmd_reproduce(args, catalog):
    if args.table not in (3, 4):
        raise UsageError(f"--table must be 3 or 4, got {args.table}")
    rows = report.reproduce(args.table, catalog, _scenario(args))
    status = EXIT_OK if all(r.passed for r in rows) else EXIT_TOLERANCE
    for r in rows:
        if not r.passed:
            _warn(f"table {r.table} row {r.row} {r.column}: deviation "
                  f"{100 * r.deviation:.2f}% exceeds {100 * r.tolerance:.2f}%")
    return report.render_reproduction(rows, args.format), status


COMMANDS = {
    "list": cmd_list,
    "assess": cmd_assess,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        catalog = _load_catalog(args)
        data, status = COMMANDS[args.command](args, catalog)
    except CatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CATALOG
    except CPTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_status if exc.exit_status in (EXIT_UNKNOWN, EXIT_USAGE) else EXIT_USAGE
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
