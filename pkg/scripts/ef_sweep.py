"""Grid emission factor sensitivity for every catalogued processor.

Sweeps the emission factor from a very clean grid to a coal-heavy one and
writes a long-format CSV: one row per (processor, emission factor).

    python scripts/ef_sweep.py --from 0.02 --to 0.9 --steps 12 > ef.csv
"""

import argparse
import csv
import sys

from cpt import scenario as scen
from cpt.catalog import load_builtin, load_file
from cpt.quantities import midpoint


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--catalog")
    ap.add_argument("--from", dest="start", type=float, default=0.02)
    ap.add_argument("--to", dest="stop", type=float, default=0.9)
    ap.add_argument("--steps", type=int, default=12)
    ap.add_argument("--years", type=float, default=5)
    ap.add_argument("--hours-per-day", type=float, default=8)
    args = ap.parse_args(argv)

    catalog = load_file(args.catalog) if args.catalog else load_builtin()
    spec = scen.SweepSpec("emission_factor", args.start, args.stop, args.steps)
    base = scen.UsageScenario(hours_per_day=args.hours_per_day, years=args.years)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["processor_id", "emission_factor_kgCO2_per_kWh", "total_ug_lo", "total_ug_hi",
                  "total_ug_mid", "total_chip_kg_mid", "manufacturing_share"])
    for pid in sorted(catalog.processors):
        for ef, b in scen.sweep(spec, base, pid, catalog):
            lo, hi = b.total_per_transistor.in_unit("ug")
            out.writerow([pid, f"{ef:.4g}", f"{lo:.6g}", f"{hi:.6g}",
                          f"{midpoint(b.total_per_transistor).to('ug'):.6g}",
                          f"{midpoint(b.total_chip).to('kg'):.6g}",
                          f"{b.manufacturing_share:.4f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
