"""Recompute the published per-transistor and chip-level tables.

Writes one report per table (plus the summary rows each carries) and prints
a one-line verdict for every gated row.

    python scripts/reproduce_tables.py --out results/
"""

import argparse
import sys
from pathlib import Path

from cpt import report
from cpt.catalog import load_builtin, load_file
from cpt.scenario import UsageScenario


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--catalog", help="extra catalog JSON merged over the built-ins")
    ap.add_argument("--format", default="md", choices=report.FORMATS)
    ap.add_argument("--out", type=Path, help="directory for the reports (default: stdout)")
    args = ap.parse_args(argv)

    catalog = load_file(args.catalog) if args.catalog else load_builtin()
    failures = 0
    for table in (3, 4):
        rows = report.reproduce(table, catalog, UsageScenario())
        data = report.render_reproduction(rows, args.format)
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"table{table}.{args.format}").write_bytes(data)
        else:
            sys.stdout.buffer.write(data + b"\n")
        for r in rows:
            if r.gated:
                verdict = "ok  " if r.passed else "FAIL"
                print(f"{verdict} {report.table_label(r.table)} row {r.row} {r.column}: "
                      f"{100 * r.deviation:.2f}% (limit {report.tolerance_label(r)})", file=sys.stderr)
                failures += not r.passed
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
