"""Rendering of assessments, sweeps, catalog listings and table reproductions.

Every renderer is deterministic: the same inputs give byte-identical output.
Text formats print 4 significant digits with explicit units; JSON carries
full-precision values in the catalog quantity encoding.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from . import engine, scenario as scen
from .catalog import Catalog
from .errors import CPTError
from .quantities import (
    Dimension,
    Interval,
    add,
    hull,
    midpoint,
)

FORMATS = ("json", "csv", "md")
FORMAT_ALIASES = {"markdown": "md"}

PER_TRANSISTOR_UNIT = "ug"
CHIP_UNIT = "kg"
POWER_UNIT = "nW"

# breakdown field -> display unit
METRICS = {
    "power_per_transistor": POWER_UNIT,
    "manufacturing_per_transistor": PER_TRANSISTOR_UNIT,
    "operational_per_transistor": PER_TRANSISTOR_UNIT,
    "total_per_transistor": PER_TRANSISTOR_UNIT,
    "manufacturing_chip": CHIP_UNIT,
    "operational_chip": CHIP_UNIT,
    "total_chip": CHIP_UNIT,
}

LABELS = {
    "power_per_transistor": "Power / transistor",
    "manufacturing_per_transistor": "Manufacturing / transistor",
    "operational_per_transistor": "Operational / transistor",
    "total_per_transistor": "Total / transistor",
    "manufacturing_chip": "Manufacturing / chip",
    "operational_chip": "Operational / chip",
    "total_chip": "Total / chip",
}

# printed figures carry 3 significant digits (<= 0.5% rounding); anything wider is noted
PRINTED_POWER_TOLERANCE = 0.01


class FormatError(CPTError, ValueError):
    exit_status = 4


def normalize_format(fmt: str) -> str:
    fmt = FORMAT_ALIASES.get(fmt, fmt)
    if fmt not in FORMATS:
        raise FormatError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    return fmt


def sig4(x: float) -> str:
    """4 significant digits; plain notation between 1e-3 and 1e7."""
    text = f"{x:.4g}"
    if "e" in text and 1e4 <= abs(x) < 1e7:
        text = f"{float(text):.0f}"
    return text


def fmt_interval(interval: Interval, unit: str) -> str:
    lo, hi = interval.in_unit(unit)
    suffix = "" if unit == "1" else f" {unit}"
    if sig4(lo) == sig4(hi):
        return f"{sig4(lo)}{suffix}"
    return f"{sig4(lo)} – {sig4(hi)}{suffix}"


def encode(interval: Interval, unit: str) -> dict:
    lo, hi = interval.in_unit(unit)
    return {"value": lo if interval.is_point else [lo, hi], "unit": unit}


def _md_cell(value) -> str:
    return str(value).replace("|", "\\|").replace("\n", " ")


def _md_table(header, rows) -> list[str]:
    lines = ["| " + " | ".join(_md_cell(h) for h in header) + " |"]
    lines.append("|" + "|".join("---" for _ in header) + "|")
    for row in rows:
        lines.append("| " + " | ".join(_md_cell(c) for c in row) + " |")
    return lines


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _json_bytes(doc) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def _md_bytes(lines) -> bytes:
    return ("\n".join(lines).rstrip("\n") + "\n").encode("utf-8")


# -- assessments ----------------------------------------------------------------

@dataclass(frozen=True)
class Assessment:
    processor_id: str
    processor_name: str
    node_id: str
    scenario: scen.UsageScenario
    lifetime_hours: float
    emission_factor: float
    breakdown: engine.CptBreakdown
    provenance: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def manufacturing_share(self) -> float:
        return self.breakdown.manufacturing_share


def build_assessment(processor, scenario: scen.UsageScenario, catalog: Catalog) -> Assessment:
    proc = catalog.processor(processor) if isinstance(processor, str) else processor
    node = catalog.node_for(proc)
    grid = catalog.grid(scenario.grid_id)
    result = scen.assess(proc, scenario, catalog)
    notes = []
    printed = proc.printed_power_per_transistor
    if printed is not None:
        derived = proc.derived_power_per_transistor
        for end, p, d in (("lower", printed.lo, derived.lo), ("upper", printed.hi, derived.hi)):
            if abs(d - p) > PRINTED_POWER_TOLERANCE * p:
                notes.append(
                    f"published power/transistor {end} bound {sig4(p * 1e9)} nW differs from "
                    f"TDP / transistor count = {sig4(d * 1e9)} nW; the derived value is used"
                )
    if scenario.emission_factor is not None:
        notes.append(
            f"emission factor overridden to {sig4(scenario.emission_factor)} kgCO2/kWh "
            f"(grid {grid.id!r} lists {sig4(grid.emission_factor.canonical)})"
        )
    provenance = (
        f"processor {proc.id}: {proc.source}",
        f"node {node.id}: {node.source}",
        f"grid {grid.id}: {grid.source}",
    )
    return Assessment(
        processor_id=proc.id,
        processor_name=proc.name,
        node_id=node.id,
        scenario=scenario,
        lifetime_hours=scen.lifetime_hours(scenario).magnitude,
        emission_factor=scen.emission_factor(scenario, catalog).canonical,
        breakdown=result,
        provenance=provenance,
        notes=tuple(notes),
    )


def describe_scenario(a: Assessment) -> str:
    s = a.scenario
    return (
        f"{sig4(s.years)} years x {sig4(s.hours_per_day)} h/day = {sig4(a.lifetime_hours)} h, "
        f"utilization {sig4(s.utilization)}, grid {s.grid_id} "
        f"({sig4(a.emission_factor)} kgCO2/kWh)"
    )


def _metric_columns():
    cols = []
    for name, unit in METRICS.items():
        cols += [f"{name}_lo_{unit}", f"{name}_hi_{unit}", f"{name}_mid_{unit}"]
    return cols


def _metric_values(b: engine.CptBreakdown):
    vals = []
    for name, unit in METRICS.items():
        interval = getattr(b, name)
        lo, hi = interval.in_unit(unit)
        vals += [sig4(lo), sig4(hi), sig4((lo + hi) / 2)]
    return vals


def _assessment_json(a: Assessment, rank: int) -> dict:
    b = a.breakdown
    doc = {
        "rank": rank,
        "processor_id": a.processor_id,
        "processor": a.processor_name,
        "node_id": a.node_id,
        "scenario": a.scenario.to_dict(),
        "lifetime_hours": {"value": a.lifetime_hours, "unit": "h"},
        "emission_factor": {"value": a.emission_factor, "unit": "kgCO2/kWh"},
        "transistor_count": encode(b.transistor_count, "count"),
        "manufacturing_share": a.manufacturing_share,
        "midpoints": {},
        "provenance": list(a.provenance),
        "notes": list(a.notes),
    }
    for name, unit in METRICS.items():
        interval = getattr(b, name)
        doc[name] = encode(interval, unit)
        lo, hi = interval.in_unit(unit)
        doc["midpoints"][name] = {"value": (lo + hi) / 2, "unit": unit}
    return doc


def render(assessments, fmt: str = "md") -> bytes:
    """Render assessments in the order given."""
    fmt = normalize_format(fmt)
    assessments = list(assessments)
    if not assessments:
        raise CPTError("nothing to render: no assessments")
    if fmt == "json":
        return _json_bytes({
            "assessments": [_assessment_json(a, i) for i, a in enumerate(assessments, 1)]
        })
    if fmt == "csv":
        header = ["rank", "processor_id", "processor", "node_id", "lifetime_h",
                  "emission_factor_kgCO2_per_kWh", "transistor_count_lo", "transistor_count_hi"]
        header += _metric_columns() + ["manufacturing_share"]
        rows = []
        for i, a in enumerate(assessments, 1):
            b = a.breakdown
            rows.append(
                [i, a.processor_id, a.processor_name, a.node_id, sig4(a.lifetime_hours),
                 sig4(a.emission_factor), sig4(b.transistor_count.lo), sig4(b.transistor_count.hi)]
                + _metric_values(b) + [sig4(a.manufacturing_share)]
            )
        return _csv_bytes(header, rows)

    lines = ["# Carbon per transistor", ""]
    scenarios = []
    for a in assessments:
        d = describe_scenario(a)
        if d not in scenarios:
            scenarios.append(d)
    for d in scenarios:
        lines.append(f"Scenario: {d}")
    lines.append("")
    header = ["#", "Processor", "Transistors"] + [LABELS[m] for m in METRICS] + ["Manufacturing share"]
    rows = []
    for i, a in enumerate(assessments, 1):
        b = a.breakdown
        rows.append(
            [i, f"{a.processor_name} ({a.processor_id})", fmt_interval(b.transistor_count, "count")]
            + [fmt_interval(getattr(b, m), u) for m, u in METRICS.items()]
            + [f"{sig4(100 * a.manufacturing_share)} %"]
        )
    lines += _md_table(header, rows)
    notes = [(a.processor_id, n) for a in assessments for n in a.notes]
    if notes:
        lines += ["", "## Notes", ""]
        lines += [f"- {pid}: {n}" for pid, n in notes]
    lines += ["", "## Provenance", ""]
    seen = []
    for a in assessments:
        for p in a.provenance:
            if p not in seen:
                seen.append(p)
                lines.append(f"- {p}")
    return _md_bytes(lines)


# -- sweeps ---------------------------------------------------------------------

SWEEP_METRICS = ("operational_per_transistor", "total_per_transistor", "operational_chip", "total_chip")


def render_sweep(processor_id: str, parameter: str, points, fmt: str = "md") -> bytes:
    fmt = normalize_format(fmt)
    if fmt == "json":
        return _json_bytes({
            "processor_id": processor_id,
            "parameter": parameter,
            "points": [
                {"value": v, **{m: encode(getattr(b, m), METRICS[m]) for m in SWEEP_METRICS}}
                for v, b in points
            ],
        })
    if fmt == "csv":
        header = [parameter]
        for m in SWEEP_METRICS:
            header += [f"{m}_lo_{METRICS[m]}", f"{m}_hi_{METRICS[m]}", f"{m}_mid_{METRICS[m]}"]
        rows = []
        for v, b in points:
            row = [sig4(v)]
            for m in SWEEP_METRICS:
                lo, hi = getattr(b, m).in_unit(METRICS[m])
                row += [sig4(lo), sig4(hi), sig4((lo + hi) / 2)]
            rows.append(row)
        return _csv_bytes(header, rows)
    lines = [f"# Sweep of {parameter} for {processor_id}", ""]
    header = [parameter] + [LABELS[m] for m in SWEEP_METRICS]
    rows = [[sig4(v)] + [fmt_interval(getattr(b, m), METRICS[m]) for m in SWEEP_METRICS]
            for v, b in points]
    lines += _md_table(header, rows)
    return _md_bytes(lines)


# -- catalog listing ------------------------------------------------------------

def render_catalog(catalog: Catalog, fmt: str = "md") -> bytes:
    fmt = normalize_format(fmt)
    procs = [catalog.processors[k] for k in sorted(catalog.processors)]
    nodes = [catalog.nodes[k] for k in sorted(catalog.nodes)]
    grids = [catalog.grids[k] for k in sorted(catalog.grids)]

    def origin(kind, rid):
        return catalog.origins.get((kind, rid), "")

    if fmt == "json":
        return _json_bytes({
            "processors": [{
                "id": p.id, "name": p.name, "node_id": p.node_id,
                "transistor_count": encode(p.transistor_count, "count"),
                "tdp": encode(p.tdp, "W"),
                "derived_power_per_transistor": encode(p.derived_power_per_transistor, POWER_UNIT),
                "printed_power_per_transistor": (
                    encode(p.printed_power_per_transistor, POWER_UNIT)
                    if p.printed_power_per_transistor is not None else None),
                "source": p.source, "origin": origin("processors", p.id),
            } for p in procs],
            "nodes": [{
                "id": n.id, "node_name": n.node_name,
                "wafer_total": encode(n.profile.wafer_total, "kg"),
                "manufacturing_per_transistor": encode(
                    engine.manufacturing_per_transistor(n.profile), PER_TRANSISTOR_UNIT),
                "source": n.source, "origin": origin("nodes", n.id),
            } for n in nodes],
            "grids": [{
                "id": g.id, "region": g.region,
                "emission_factor": {"value": g.emission_factor.canonical, "unit": "kgCO2/kWh"},
                "source": g.source, "origin": origin("grids", g.id),
            } for g in grids],
        })
    if fmt == "csv":
        header = ["kind", "id", "name", "summary", "source", "origin"]
        rows = []
        for p in procs:
            rows.append(["processor", p.id, p.name,
                         f"{fmt_interval(p.transistor_count, 'count')} transistors; "
                         f"TDP {fmt_interval(p.tdp, 'W')}; node {p.node_id}",
                         p.source, origin("processors", p.id)])
        for n in nodes:
            rows.append(["node", n.id, n.node_name,
                         f"{fmt_interval(n.profile.wafer_total, 'kg')} per wafer; "
                         f"{fmt_interval(engine.manufacturing_per_transistor(n.profile), PER_TRANSISTOR_UNIT)} per transistor",
                         n.source, origin("nodes", n.id)])
        for g in grids:
            rows.append(["grid", g.id, g.region, f"{sig4(g.emission_factor.canonical)} kgCO2/kWh",
                         g.source, origin("grids", g.id)])
        return _csv_bytes(header, rows)

    lines = ["# Catalog", "", "## Processors", ""]
    rows = []
    for p in procs:
        printed = p.printed_power_per_transistor
        rows.append([
            p.id, p.name, fmt_interval(p.transistor_count, "count"), fmt_interval(p.tdp, "W"),
            p.node_id, fmt_interval(p.derived_power_per_transistor, POWER_UNIT),
            fmt_interval(printed, POWER_UNIT) if printed is not None else "-",
        ])
    lines += _md_table(["id", "Name", "Transistors", "TDP", "Node",
                        "Power / transistor (derived)", "Power / transistor (published)"], rows)
    lines += ["", "## Process nodes", ""]
    rows = [[n.id, n.node_name, fmt_interval(n.profile.wafer_total, "kg"),
             fmt_interval(n.profile.yield_fraction, "1"),
             fmt_interval(n.profile.transistors_per_wafer, "count"),
             fmt_interval(engine.manufacturing_per_transistor(n.profile), PER_TRANSISTOR_UNIT)]
            for n in nodes]
    lines += _md_table(["id", "Node", "CO2 / wafer", "Yield", "Transistors / wafer",
                        "Manufacturing / transistor"], rows)
    lines += ["", "## Grids", ""]
    rows = [[g.id, g.region, f"{sig4(g.emission_factor.canonical)} kgCO2/kWh"] for g in grids]
    lines += _md_table(["id", "Region", "Emission factor"], rows)
    lines += ["", "## Provenance", ""]
    for kind, recs in (("processors", procs), ("nodes", nodes), ("grids", grids)):
        for r in recs:
            lines.append(f"- {kind[:-1]} {r.id} [{origin(kind, r.id)}]: {r.source}")
    return _md_bytes(lines)


# -- reproduction -----------------------------------------------------------------

EXACT = 1e-9
TABLE3_TOLERANCE = 0.08
TABLE3_ROW3_TOTAL_TOLERANCE = 0.05
TABLE4_OPERATIONAL_TOLERANCE = 0.02
AVERAGE_TOLERANCE = 0.023
UNIT_SLIP = 1000

# published per-transistor figures (ug): row, processor, manufacturing, operational, total
TABLE3 = (
    (1, "i9-13900K", (4.5, 4.5), (62, 126), (66, 130)),
    (2, "ryzen9-7950X", (5.0, 5.0), (78, 106), (83, 111)),
    (3, "m3", (2.0, 2.0), (2.0, 2.0), (6.8, 7.0)),
)

# published chip-level figures (kg), as printed
TABLE4 = (
    (1, "i9-13900K", (60, 60), (0.73, 1.48), (60.73, 61.48)),
    (2, "ryzen9-7950X", (565.7, 565.7), (0.99, 1.34), (66.69, 67.04)),
    (3, "m3", (50, 50), (0.125, 0.140), (50.12, 50.14)),
)
TABLE4_MANUFACTURING_CORRECTIONS = {2: ((65.7, 65.7), "typo: printed 565.7 kg, 13.14e9 x 5 ug = 65.7 kg")}

# summary ranges, ug per transistor
SUMMARY_MANUFACTURING = (2, 5)
SUMMARY_OPERATIONAL = (60, 250)
SUMMARY_AVERAGE = 155


@dataclass(frozen=True)
class ReproductionRow:
    table: str
    row: int
    processor_id: str
    column: str
    unit: str
    computed: Interval
    published: Interval
    published_corrected: Interval
    deviation: float
    tolerance: float | None
    correction: str | None = None
    note: str | None = None
    published_unit: str | None = None

    @property
    def gated(self) -> bool:
        return self.tolerance is not None

    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.deviation <= self.tolerance


def deviation(computed: Interval, reference: Interval) -> float:
    ref = midpoint(reference).magnitude
    return abs(midpoint(computed).magnitude - ref) / ref


def _row(table, row, pid, column, unit, computed, printed, tolerance,
         corrected=None, correction=None, note=None, printed_unit=None) -> ReproductionRow:
    published = Interval.of(*printed, unit=printed_unit or unit)
    published_corrected = published if corrected is None else Interval.of(*corrected, unit=unit)
    return ReproductionRow(
        table=table, row=row, processor_id=pid, column=column, unit=unit,
        computed=computed, published=published, published_corrected=published_corrected,
        deviation=deviation(computed, published_corrected), tolerance=tolerance,
        correction=correction, note=note, published_unit=printed_unit,
    )


def _default_scenario():
    return scen.UsageScenario()


def reproduce_table3(catalog: Catalog, scenario: scen.UsageScenario | None = None):
    s = scenario or _default_scenario()
    rows = []
    for row, pid, man, op, total in TABLE3:
        proc = catalog.processor(pid)
        c_man = engine.manufacturing_per_transistor(catalog.node_for(proc).profile)
        c_op = engine.operational_per_transistor(scen.to_operational_inputs(s, proc, catalog))
        c_total = engine.cpt_per_transistor(c_man, c_op)
        u = PER_TRANSISTOR_UNIT
        rows.append(_row("3", row, pid, "manufacturing", u, c_man, man, EXACT))
        if row == 3:
            implied = (total[0] - man[0], total[1] - man[1])
            rows.append(_row(
                "3", row, pid, "operational", u, c_op, op, None,
                note=(f"published operational cell {sig4(op[0])} ug contradicts the row total "
                      f"{sig4(total[0])}-{sig4(total[1])} ug, which implies "
                      f"{sig4(implied[0])}-{sig4(implied[1])} ug; reported, not gated"),
            ))
            rows.append(_row("3", row, pid, "total", u, c_total, total, TABLE3_ROW3_TOTAL_TOLERANCE))
        else:
            rows.append(_row("3", row, pid, "operational", u, c_op, op, TABLE3_TOLERANCE))
            rows.append(_row("3", row, pid, "total", u, c_total, total, TABLE3_TOLERANCE))
    return rows


def reproduce_table4(catalog: Catalog, scenario: scen.UsageScenario | None = None):
    s = scenario or _default_scenario()
    rows = []
    slip = f"x{UNIT_SLIP} unit slip: operational printed {UNIT_SLIP}x too small"
    for row, pid, man, op, total in TABLE4:
        proc = catalog.processor(pid)
        n = proc.transistor_count
        c_man_t = proc.reference_manufacturing.get("table4")
        if c_man_t is None:
            c_man_t = engine.manufacturing_per_transistor(catalog.node_for(proc).profile)
        c_op_t = engine.operational_per_transistor(scen.to_operational_inputs(s, proc, catalog))
        c_man = engine.manufacturing_chip_total(n, c_man_t)
        c_op = engine.chip_total(n, c_op_t)
        c_total = engine.chip_total(n, engine.cpt_per_transistor(c_man_t, c_op_t))
        u = CHIP_UNIT

        man_fix, man_note = TABLE4_MANUFACTURING_CORRECTIONS.get(row, (man, None))
        rows.append(_row("4", row, pid, "manufacturing", u, c_man, man, EXACT,
                         corrected=man_fix, correction=man_note))
        op_fix = (op[0] * UNIT_SLIP, op[1] * UNIT_SLIP)
        rows.append(_row("4", row, pid, "operational", u, c_op, op, TABLE4_OPERATIONAL_TOLERANCE,
                         corrected=op_fix, correction=slip))
        implied_op = (total[0] - man_fix[0], total[1] - man_fix[1])
        if row == 3:
            rows.append(_row(
                "4", row, pid, "operational (total-column reading)", u, c_op, implied_op, None,
                corrected=(implied_op[0] * UNIT_SLIP, implied_op[1] * UNIT_SLIP),
                correction=slip,
                note=(f"operational cell printed '.125-140 kg' disagrees with the row total "
                      f"{sig4(total[0])}-{sig4(total[1])} kg, which implies "
                      f"{sig4(implied_op[0])}-{sig4(implied_op[1])} kg; both readings reported"),
            ))
        total_fix = (man_fix[0] + implied_op[0] * UNIT_SLIP, man_fix[1] + implied_op[1] * UNIT_SLIP)
        rows.append(_row(
            "4", row, pid, "total", u, c_total, total, None, corrected=total_fix,
            correction=f"total rebuilt as manufacturing + x{UNIT_SLIP} operational part",
            note="total column inherits the operational unit slip; reported, not gated",
        ))
    return rows


def reproduce_summary(catalog: Catalog, scenario: scen.UsageScenario | None = None):
    """Headline per-transistor ranges and the single representative average."""
    s = scenario or _default_scenario()
    u = PER_TRANSISTOR_UNIT
    man_hull = hull(*(engine.manufacturing_per_transistor(catalog.nodes[k].profile)
                      for k in sorted(catalog.nodes)))
    x86 = [p for p in ("i9-13900K", "ryzen9-7950X") if p in catalog.processors]
    op_hull = hull(*(engine.operational_per_transistor(scen.to_operational_inputs(s, p, catalog))
                     for p in x86))
    op_stated = Interval.of(*SUMMARY_OPERATIONAL, unit=u)
    composed = add(man_hull, op_stated)
    avg = midpoint(composed)
    total_stated = (SUMMARY_MANUFACTURING[0] + SUMMARY_OPERATIONAL[0],
                    SUMMARY_MANUFACTURING[1] + SUMMARY_OPERATIONAL[1])
    return [
        _row("summary", 1, "*", "manufacturing range (all nodes)", u, man_hull,
             SUMMARY_MANUFACTURING, EXACT),
        _row("summary", 2, "*", "operational range (x86 processors)", u, op_hull,
             SUMMARY_OPERATIONAL, None, corrected=SUMMARY_OPERATIONAL, printed_unit="mg",
             correction="unit typo: range printed in mg where the summary and the dimensional check give ug",
             note="upper bound 250 ug is not derivable from the catalogued processors; reported, not gated"),
        _row("summary", 3, "*", "total range (nodes + stated operational range)", u, composed,
             total_stated, EXACT),
        _row("summary", 4, "*", "representative average (interval midpoint)", u,
             Interval(avg.magnitude, avg.magnitude, Dimension.MASS_CO2),
             (SUMMARY_AVERAGE, SUMMARY_AVERAGE), AVERAGE_TOLERANCE,
             note=(f"published single value {SUMMARY_AVERAGE} ug; averaging method undefined, "
                   f"midpoint {sig4(avg.to(u))} ug used instead")),
    ]


def reproduce(table: int, catalog: Catalog, scenario: scen.UsageScenario | None = None):
    if table == 3:
        rows = reproduce_table3(catalog, scenario)
    elif table == 4:
        rows = reproduce_table4(catalog, scenario)
    else:
        raise FormatError(f"no reproduction for table {table!r}; choose 3 or 4")
    return rows + reproduce_summary(catalog, scenario)


def table_label(table: str) -> str:
    return table if table == "summary" else f"table {table}"


def _printed(r: ReproductionRow) -> str:
    return fmt_interval(r.published, r.published_unit or r.unit)


def ledger(rows) -> list[str]:
    """Every correction and note attached to ``rows``, one line each."""
    entries = []
    for r in rows:
        tag = f"{table_label(r.table)} row {r.row} {r.column}"
        if r.correction:
            entries.append(
                f"{tag}: {r.correction} (printed {_printed(r)} -> "
                f"compared as {fmt_interval(r.published_corrected, r.unit)})"
            )
        if r.note:
            entries.append(f"{tag}: {r.note}")
    return entries


def _status(r: ReproductionRow) -> str:
    if not r.gated:
        return "reported"
    return "pass" if r.passed else "FAIL"


def tolerance_label(r: ReproductionRow) -> str:
    if r.tolerance is None:
        return "-"
    if r.tolerance <= EXACT:
        return "exact"
    return f"{sig4(100 * r.tolerance)} %"


def render_reproduction(rows, fmt: str = "md") -> bytes:
    fmt = normalize_format(fmt)
    rows = list(rows)
    entries = ledger(rows)
    passed = all(r.passed for r in rows)
    if fmt == "json":
        return _json_bytes({
            "passed": passed,
            "rows": [{
                "table": r.table, "row": r.row, "processor_id": r.processor_id,
                "column": r.column,
                "computed": encode(r.computed, r.unit),
                "published": encode(r.published, r.published_unit or r.unit),
                "published_corrected": encode(r.published_corrected, r.unit),
                "deviation": r.deviation, "tolerance": r.tolerance,
                "status": _status(r), "correction": r.correction, "note": r.note,
            } for r in rows],
            "ledger": entries,
        })
    header = ["table", "row", "processor", "column", "computed", "published", "published_corrected",
              "deviation", "tolerance", "status"]
    body = [[r.table, r.row, r.processor_id, r.column, fmt_interval(r.computed, r.unit),
             _printed(r), fmt_interval(r.published_corrected, r.unit),
             f"{sig4(100 * r.deviation if r.deviation > EXACT else 0)} %", tolerance_label(r), _status(r)]
            for r in rows]
    if fmt == "csv":
        return _csv_bytes(header + ["correction", "note"],
                          [b + [r.correction or "", r.note or ""] for b, r in zip(body, rows)])
    tables = sorted({r.table for r in rows if r.table != "summary"})
    lines = [f"# Reproduction of table {', '.join(tables)}", ""]
    lines += _md_table(header, body)
    lines += ["", "## Discrepancy ledger", ""]
    lines += [f"- {e}" for e in entries] or ["- none"]
    lines += ["", f"Result: {'all gated rows within tolerance' if passed else 'tolerance failures present'}"]
    return _md_bytes(lines)
