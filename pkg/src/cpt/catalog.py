"""Processor, process-node and grid records.

The built-in records carry the published figures; user files are merged on
top (a file record with a colliding id shadows the built-in one). Files are
strict JSON::

    {"processors": [...], "nodes": [...], "grids": [...]}

where every quantity is ``{"value": number | [lo, hi], "unit": "..."}``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

from .engine import PROFILE_STAGES, STAGE_TOLERANCE, WaferProfile, stage_sum
from .errors import CatalogError, UnknownReferenceError
from .quantities import (
    CANONICAL_UNIT,
    UNITS,
    Dimension,
    Interval,
    Quantity,
    to_canonical,
)

KINDS = ("processors", "nodes", "grids")
_TOP_LEVEL = set(KINDS) | {"version"}


class ShadowWarning(UserWarning):
    """A file record replaced a record of the same id."""


class LenientWarning(UserWarning):
    """An unknown field was ignored because lenient parsing was requested."""


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    record_id: str | None
    field: str | None
    rule: str
    message: str
    origin: str = ""

    def __str__(self):
        where = f"{self.origin}: " if self.origin else ""
        rec = f"{self.kind} {self.record_id!r}" if self.record_id else self.kind
        fld = f" field {self.field!r}" if self.field else ""
        return f"{where}{rec}{fld}: [{self.rule}] {self.message}"


@dataclass(frozen=True, eq=True)
class ProcessorRecord:
    id: str
    name: str
    transistor_count: Interval
    tdp: Interval
    node_id: str
    source: str
    printed_power_per_transistor: Interval | None = None
    # per-transistor manufacturing figures implied by a named published table
    reference_manufacturing: Mapping[str, Interval] = field(default_factory=dict)

    __hash__ = None

    @property
    def derived_power_per_transistor(self) -> Interval:
        from .engine import per_transistor_power

        return per_transistor_power(self.tdp, self.transistor_count)


@dataclass(frozen=True)
class ProcessNodeRecord:
    id: str
    profile: WaferProfile
    source: str

    __hash__ = None

    @property
    def node_name(self) -> str:
        return self.profile.node_name


@dataclass(frozen=True)
class GridRecord:
    id: str
    region: str
    emission_factor: Quantity
    source: str


@dataclass(frozen=True)
class Catalog:
    processors: Mapping[str, ProcessorRecord]
    nodes: Mapping[str, ProcessNodeRecord]
    grids: Mapping[str, GridRecord]
    # (kind, id) -> where the record came from
    origins: Mapping[tuple[str, str], str] = field(default_factory=dict)
    version: str = "1"

    __hash__ = None

    @classmethod
    def build(cls, processors=(), nodes=(), grids=(), origins=None, version="1"):
        def table(records):
            return MappingProxyType({r.id: r for r in records})

        return cls(
            table(processors), table(nodes), table(grids),
            MappingProxyType(dict(origins or {})), version,
        )

    @classmethod
    def empty(cls) -> Catalog:
        return cls.build()

    def processor(self, pid: str) -> ProcessorRecord:
        try:
            return self.processors[pid]
        except KeyError:
            raise UnknownReferenceError("processor", pid) from None

    def node(self, nid: str) -> ProcessNodeRecord:
        try:
            return self.nodes[nid]
        except KeyError:
            raise UnknownReferenceError("node", nid) from None

    def grid(self, gid: str) -> GridRecord:
        try:
            return self.grids[gid]
        except KeyError:
            raise UnknownReferenceError("grid", gid) from None

    def lookup(self, rid: str):
        for table in (self.processors, self.nodes, self.grids):
            if rid in table:
                return table[rid]
        raise UnknownReferenceError("record", rid)

    def node_for(self, processor: ProcessorRecord) -> ProcessNodeRecord:
        return self.node(processor.node_id)


# -- parsing ------------------------------------------------------------------

_PROCESSOR_FIELDS = {
    "id", "name", "transistor_count", "tdp", "node_id", "source",
    "printed_power_per_transistor", "reference_manufacturing",
}
_NODE_FIELDS = {
    "id", "node_name", "wafer_total", "yield", "transistors_per_wafer",
    "stage_emissions", "source",
}
_GRID_FIELDS = {"id", "region", "emission_factor", "source"}


class _Reader:
    """Collects diagnostics while pulling typed fields out of one record."""

    def __init__(self, kind, rec, origin, lenient, allowed, diags):
        self.kind = kind
        self.rec = rec
        self.origin = origin
        self.diags = diags
        self.start = len(diags)
        rid = rec.get("id")
        self.rid = rid if isinstance(rid, str) else None
        for key in sorted(set(rec) - allowed):
            if lenient:
                warnings.warn(
                    f"{origin}: {kind} {self.rid!r}: ignoring unknown field {key!r}",
                    LenientWarning, stacklevel=4,
                )
            else:
                self.fail(key, "field.unknown", "unknown field (use --lenient to ignore)")

    @property
    def ok(self) -> bool:
        return len(self.diags) == self.start

    def fail(self, fld, rule, message):
        self.diags.append(Diagnostic(self.kind, self.rid, fld, rule, message, self.origin))

    def text(self, name, required=True):
        if name not in self.rec:
            if required:
                self.fail(name, "field.missing", "required field is missing")
            return None
        value = self.rec[name]
        if not isinstance(value, str) or not value:
            self.fail(name, "field.type", "expected a non-empty string")
            return None
        return value

    def interval(self, name, dimension, required=True, point_only=False, obj=None, label=None):
        obj = self.rec if obj is None else obj
        label = label or name
        if name not in obj:
            if required:
                self.fail(label, "field.missing", "required field is missing")
            return None
        raw = obj[name]
        if not isinstance(raw, dict) or set(raw) != {"value", "unit"}:
            self.fail(label, "quantity.encoding", 'expected {"value": ..., "unit": ...}')
            return None
        unit = raw["unit"]
        if not isinstance(unit, str) or unit not in UNITS:
            self.fail(label, "unit.unknown", f"unknown unit {unit!r}")
            return None
        if UNITS[unit][0] is not dimension:
            self.fail(label, "unit.dimension", f"unit {unit!r} is not a {dimension.value} unit")
            return None
        value = raw["value"]
        if _is_number(value):
            lo = hi = value
        elif (
            not point_only and isinstance(value, list) and len(value) == 2
            and all(_is_number(v) for v in value)
        ):
            lo, hi = value
        else:
            shape = "a number" if point_only else "a number or a [lo, hi] pair"
            self.fail(label, "quantity.value", f"value must be {shape}")
            return None
        if not (math.isfinite(lo) and math.isfinite(hi)):
            self.fail(label, "interval.finite", "bounds must be finite")
            return None
        if lo < 0 or hi < 0:
            self.fail(label, "interval.nonnegative", f"negative bound in [{lo}, {hi}]")
            return None
        if lo > hi:
            self.fail(label, "interval.order", f"lower bound {lo} exceeds upper bound {hi}")
            return None
        return Interval(to_canonical(lo, unit), to_canonical(hi, unit), dimension)


def decode_interval(obj: dict, dimension: Dimension) -> Interval:
    """Decode one ``{"value": ..., "unit": ...}`` quantity; raises CatalogError."""
    diags = []
    r = _Reader("quantity", {"value": obj}, "<quantity>", False, {"value"}, diags)
    out = r.interval("value", dimension)
    if diags:
        raise CatalogError("invalid quantity", diags)
    return out


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _parse_processor(r: _Reader):
    pid = r.text("id")
    name = r.text("name")
    node_id = r.text("node_id")
    source = r.text("source")
    count = r.interval("transistor_count", Dimension.COUNT)
    if count is not None and count.lo <= 0:
        r.fail("transistor_count", "count.positive", "transistor count must be positive")
    tdp = r.interval("tdp", Dimension.POWER)
    printed = r.interval("printed_power_per_transistor", Dimension.POWER, required=False)
    refs = {}
    raw_refs = r.rec.get("reference_manufacturing", {})
    if not isinstance(raw_refs, dict):
        r.fail("reference_manufacturing", "field.type", "expected an object of quantities")
    else:
        for label in sorted(raw_refs):
            refs[label] = r.interval(
                label, Dimension.MASS_CO2, obj=raw_refs,
                label=f"reference_manufacturing.{label}",
            )
    if not r.ok:
        return None
    return ProcessorRecord(pid, name, count, tdp, node_id, source, printed, refs)


def _parse_node(r: _Reader):
    nid = r.text("id")
    node_name = r.text("node_name")
    source = r.text("source")
    wafer = r.interval("wafer_total", Dimension.MASS_CO2)
    yld = r.interval("yield", Dimension.DIMENSIONLESS)
    if yld is not None and not (0 < yld.lo and yld.hi <= 1):
        r.fail("yield", "yield.range", f"yield must lie in (0, 1], got [{yld.lo}, {yld.hi}]")
    tpw = r.interval("transistors_per_wafer", Dimension.COUNT)
    if tpw is not None and tpw.lo <= 0:
        r.fail("transistors_per_wafer", "count.positive", "transistor count must be positive")
    stages = None
    raw_stages = r.rec.get("stage_emissions")
    if raw_stages is not None:
        if not isinstance(raw_stages, dict) or not raw_stages:
            r.fail("stage_emissions", "field.type", "expected a non-empty object of quantities")
        else:
            stages = {}
            for stage in sorted(raw_stages):
                if stage not in PROFILE_STAGES:
                    r.fail(f"stage_emissions.{stage}", "stage.unknown",
                           f"stage must be one of {list(PROFILE_STAGES)}")
                    continue
                stages[stage] = r.interval(
                    stage, Dimension.MASS_CO2, obj=raw_stages, label=f"stage_emissions.{stage}"
                )
            if r.ok and wafer is not None:
                total = stage_sum(stages)
                if not total.contains(wafer, rel_tol=STAGE_TOLERANCE):
                    r.fail("stage_emissions", "stage_sum.contains",
                           f"stage sum {total} does not cover wafer_total {wafer} within 1%")
    if not r.ok:
        return None
    profile = WaferProfile(node_name, wafer, yld, tpw, stages)
    return ProcessNodeRecord(nid, profile, source)


def _parse_grid(r: _Reader):
    gid = r.text("id")
    region = r.text("region")
    source = r.text("source")
    ef = r.interval("emission_factor", Dimension.EMISSION_FACTOR, point_only=True)
    if not r.ok:
        return None
    return GridRecord(gid, region, Quantity(ef.lo, CANONICAL_UNIT[Dimension.EMISSION_FACTOR]), source)


_PARSERS = {
    "processors": (_PROCESSOR_FIELDS, _parse_processor),
    "nodes": (_NODE_FIELDS, _parse_node),
    "grids": (_GRID_FIELDS, _parse_grid),
}


def _parse_document(doc: Any, origin: str, lenient: bool):
    """Return ``({kind: [records]}, version, diagnostics)``."""
    diags: list[Diagnostic] = []
    parsed = {kind: [] for kind in KINDS}
    if not isinstance(doc, dict):
        diags.append(Diagnostic("document", None, None, "document.type",
                                "top level must be a JSON object", origin))
        return parsed, "1", diags
    for key in sorted(set(doc) - _TOP_LEVEL):
        if lenient:
            warnings.warn(f"{origin}: ignoring unknown top-level key {key!r}",
                          LenientWarning, stacklevel=3)
        else:
            diags.append(Diagnostic("document", None, key, "field.unknown",
                                    "unknown top-level key", origin))
    version = str(doc.get("version", "1"))
    for kind in KINDS:
        records = doc.get(kind, [])
        if not isinstance(records, list):
            diags.append(Diagnostic(kind, None, None, "field.type", "expected an array", origin))
            continue
        allowed, parse = _PARSERS[kind]
        seen = set()
        for i, rec in enumerate(records):
            if not isinstance(rec, dict):
                diags.append(Diagnostic(kind, None, f"[{i}]", "record.type",
                                        "each record must be an object", origin))
                continue
            reader = _Reader(kind, rec, origin, lenient, allowed, diags)
            record = parse(reader)
            if reader.rid is not None:
                if reader.rid in seen:
                    reader.fail("id", "id.unique", "duplicate id within this document")
                    continue
                seen.add(reader.rid)
            if record is not None:
                parsed[kind].append(record)
    return parsed, version, diags


def _reference_diagnostics(catalog: Catalog) -> list[Diagnostic]:
    diags = []
    for pid in sorted(catalog.processors):
        proc = catalog.processors[pid]
        if proc.node_id not in catalog.nodes:
            diags.append(Diagnostic(
                "processors", pid, "node_id", "reference.node",
                f"node {proc.node_id!r} is not defined",
                catalog.origins.get(("processors", pid), ""),
            ))
    return diags


def _record_diagnostics(catalog: Catalog) -> list[Diagnostic]:
    diags = []

    def bad(kind, rid, fld, rule, msg):
        diags.append(Diagnostic(kind, rid, fld, rule, msg, catalog.origins.get((kind, rid), "")))

    for kind in KINDS:
        for key, rec in getattr(catalog, kind).items():
            if key != rec.id:
                bad(kind, key, "id", "id.unique", f"stored under {key!r} but has id {rec.id!r}")
            if not rec.source:
                bad(kind, key, "source", "provenance.required", "record has no source")
    for pid, proc in catalog.processors.items():
        if proc.transistor_count.lo <= 0:
            bad("processors", pid, "transistor_count", "count.positive", "must be positive")
    for nid, node in catalog.nodes.items():
        p = node.profile
        if not (0 < p.yield_fraction.lo and p.yield_fraction.hi <= 1):
            bad("nodes", nid, "yield", "yield.range", "yield must lie in (0, 1]")
        if p.stage_emissions and not stage_sum(p.stage_emissions).contains(
            p.wafer_total, rel_tol=STAGE_TOLERANCE
        ):
            bad("nodes", nid, "stage_emissions", "stage_sum.contains",
                "stage sum does not cover wafer_total within 1%")
    return diags


def validate(source: Catalog | Mapping) -> list[Diagnostic]:
    """Diagnostics for a catalog, or for a raw JSON document; empty when valid."""
    if isinstance(source, Catalog):
        return _record_diagnostics(source) + _reference_diagnostics(source)
    parsed, version, diags = _parse_document(source, "<document>", lenient=False)
    if diags:
        return diags
    return _reference_diagnostics(Catalog.build(**parsed, version=version))


def merge(base: Catalog, overlay: Catalog, origin: str = "") -> Catalog:
    """Overlay records shadow base records with the same id."""
    tables = {}
    origins = dict(base.origins)
    for kind in KINDS:
        merged = dict(getattr(base, kind))
        for rid, rec in getattr(overlay, kind).items():
            if rid in merged:
                warnings.warn(
                    f"{kind[:-1]} {rid!r} from {origin or 'overlay'} shadows "
                    f"{origins.get((kind, rid), 'existing record')}",
                    ShadowWarning, stacklevel=3,
                )
            merged[rid] = rec
            origins[(kind, rid)] = overlay.origins.get((kind, rid), origin)
        tables[kind] = MappingProxyType(merged)
    return Catalog(tables["processors"], tables["nodes"], tables["grids"],
                   MappingProxyType(origins), overlay.version)


def loads(text: str, origin: str = "<string>", lenient: bool = False) -> Catalog:
    """Parse one catalog document on its own (no merge)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(
            f"{origin}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from None
    parsed, version, diags = _parse_document(doc, origin, lenient)
    if diags:
        raise CatalogError(f"{origin}: invalid catalog", diags)
    origins = {(kind, r.id): origin for kind in KINDS for r in parsed[kind]}
    return Catalog.build(**parsed, origins=origins, version=version)


@lru_cache(maxsize=None)
def load_builtin() -> Catalog:
    text = resources.files("cpt").joinpath("data/builtin_catalog.json").read_text("utf-8")
    catalog = loads(text, origin="builtin")
    diags = validate(catalog)
    if diags:  # pragma: no cover - guarded by the test suite
        raise CatalogError("built-in catalog is invalid", diags)
    return catalog


def load_file(path, lenient: bool = False, base: Catalog | None = None) -> Catalog:
    """Load ``path`` and merge it over ``base`` (the built-in catalog by default)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CatalogError(f"{path}: cannot read catalog: {exc}") from None
    overlay = loads(text, origin=str(path), lenient=lenient)
    base = load_builtin() if base is None else base
    merged = merge(base, overlay, origin=str(path))
    diags = _reference_diagnostics(merged)
    if diags:
        raise CatalogError(f"{path}: unresolved references", diags)
    return merged


# -- serialization -------------------------------------------------------------

def _encode(interval: Interval) -> dict:
    unit = CANONICAL_UNIT[interval.dimension]
    value = interval.lo if interval.is_point else [interval.lo, interval.hi]
    return {"value": value, "unit": unit}


def to_document(catalog: Catalog) -> dict:
    processors = []
    for pid in sorted(catalog.processors):
        p = catalog.processors[pid]
        rec = {
            "id": p.id, "name": p.name,
            "transistor_count": _encode(p.transistor_count),
            "tdp": _encode(p.tdp), "node_id": p.node_id, "source": p.source,
        }
        if p.printed_power_per_transistor is not None:
            rec["printed_power_per_transistor"] = _encode(p.printed_power_per_transistor)
        if p.reference_manufacturing:
            rec["reference_manufacturing"] = {
                k: _encode(v) for k, v in sorted(p.reference_manufacturing.items())
            }
        processors.append(rec)
    nodes = []
    for nid in sorted(catalog.nodes):
        n = catalog.nodes[nid]
        prof = n.profile
        rec = {
            "id": n.id, "node_name": prof.node_name,
            "wafer_total": _encode(prof.wafer_total),
            "yield": _encode(prof.yield_fraction),
            "transistors_per_wafer": _encode(prof.transistors_per_wafer),
            "source": n.source,
        }
        if prof.stage_emissions:
            rec["stage_emissions"] = {k: _encode(v) for k, v in sorted(prof.stage_emissions.items())}
        nodes.append(rec)
    grids = [
        {
            "id": g.id, "region": g.region,
            "emission_factor": {"value": g.emission_factor.canonical,
                                "unit": CANONICAL_UNIT[Dimension.EMISSION_FACTOR]},
            "source": g.source,
        }
        for g in (catalog.grids[k] for k in sorted(catalog.grids))
    ]
    return {"version": catalog.version, "processors": processors, "nodes": nodes, "grids": grids}


def dumps(catalog: Catalog) -> str:
    return json.dumps(to_document(catalog), indent=2, sort_keys=True) + "\n"


__all__ = [
    "Catalog", "CatalogError", "Diagnostic", "GridRecord",
    "LenientWarning", "ProcessNodeRecord", "ProcessorRecord", "ShadowWarning",
    "dumps", "load_builtin", "load_file", "loads", "merge", "to_document", "validate",
]
