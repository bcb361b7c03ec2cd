"""Usage scenarios, parameter sweeps and rankings."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from . import engine
from .catalog import Catalog, ProcessorRecord
from .errors import ScenarioError
from .quantities import Quantity, midpoint

DAYS_PER_YEAR = 365

SWEEP_PARAMETERS = ("emission_factor", "hours_per_day", "years", "utilization")
PARAMETER_ALIASES = {"ef": "emission_factor", "hours": "hours_per_day"}
RANK_KEYS = ("total_per_transistor", "total_chip", "operational_chip")


@dataclass(frozen=True)
class UsageScenario:
    hours_per_day: float = 8.0
    years: float = 5.0
    utilization: float = 1.0
    grid_id: str = "global-avg"
    # kg CO2/kWh; overrides the grid record when set
    emission_factor: float | None = None

    def __post_init__(self):
        if not 0 <= self.hours_per_day <= 24:
            raise ScenarioError(f"hours_per_day must lie in [0, 24], got {self.hours_per_day}")
        if not self.years >= 0:
            raise ScenarioError(f"years must be >= 0, got {self.years}")
        if not 0 <= self.utilization <= 1:
            raise ScenarioError(f"utilization must lie in [0, 1], got {self.utilization}")
        if self.emission_factor is not None and not self.emission_factor >= 0:
            raise ScenarioError(f"emission factor must be >= 0, got {self.emission_factor}")
        if not isinstance(self.grid_id, str) or not self.grid_id:
            raise ScenarioError("grid_id must be a non-empty string")

    @classmethod
    def from_dict(cls, data: dict) -> UsageScenario:
        allowed = {"hours_per_day", "years", "utilization", "grid_id"}
        unknown = set(data) - allowed
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ScenarioError(str(exc)) from None

    @classmethod
    def from_file(cls, path) -> UsageScenario:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"{path}: cannot read scenario: {exc}") from None
        if not isinstance(data, dict):
            raise ScenarioError(f"{path}: scenario must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["emission_factor"] is None:
            del d["emission_factor"]
        return d


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        name = PARAMETER_ALIASES.get(self.parameter, self.parameter)
        if name not in SWEEP_PARAMETERS:
            raise ScenarioError(
                f"cannot sweep {self.parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}"
            )
        object.__setattr__(self, "parameter", name)
        if isinstance(self.steps, bool) or not isinstance(self.steps, int) or self.steps < 2:
            raise ScenarioError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not self.start <= self.stop:
            raise ScenarioError(f"sweep start {self.start} exceeds stop {self.stop}")

    def values(self) -> list[float]:
        span = self.stop - self.start
        last = self.steps - 1
        return [self.start + span * i / last for i in range(last)] + [self.stop]


def lifetime_hours(s: UsageScenario) -> Quantity:
    return Quantity(s.years * DAYS_PER_YEAR * s.hours_per_day, "h")


def emission_factor(s: UsageScenario, catalog: Catalog) -> Quantity:
    grid = catalog.grid(s.grid_id)
    if s.emission_factor is not None:
        return Quantity(s.emission_factor, "kgCO2/kWh")
    return grid.emission_factor


def _processor(processor, catalog: Catalog) -> ProcessorRecord:
    return catalog.processor(processor) if isinstance(processor, str) else processor


def to_operational_inputs(s: UsageScenario, processor, catalog: Catalog) -> engine.OperationalInputs:
    proc = _processor(processor, catalog)
    power = engine.per_transistor_power(proc.tdp.scaled(s.utilization), proc.transistor_count)
    return engine.OperationalInputs(power, lifetime_hours(s), emission_factor(s, catalog))


def assess(processor, s: UsageScenario, catalog: Catalog) -> engine.CptBreakdown:
    proc = _processor(processor, catalog)
    return engine.assess(
        proc,
        catalog.node_for(proc),
        lifetime_hours(s),
        emission_factor(s, catalog),
        utilization=s.utilization,
    )


def sweep(spec: SweepSpec, base: UsageScenario, processor, catalog: Catalog, workers: int | None = None):
    """Evaluate ``processor`` at each grid value; results are in grid order."""
    proc = _processor(processor, catalog)
    catalog.grid(base.grid_id)
    scenarios = [replace(base, **{spec.parameter: v}) for v in spec.values()]

    def run(s):
        return assess(proc, s, catalog)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, scenarios))
    else:
        results = [run(s) for s in scenarios]
    return [(getattr(s, spec.parameter), r) for s, r in zip(scenarios, results)]


def rank(processors, s: UsageScenario, catalog: Catalog, key: str = "total_per_transistor"):
    """Ascending by midpoint of ``key``; equal midpoints fall back to id order."""
    if key not in RANK_KEYS:
        raise ScenarioError(f"unknown ranking key {key!r}; choose from {', '.join(RANK_KEYS)}")
    rows = []
    for p in processors:
        proc = _processor(p, catalog)
        rows.append((proc.id, assess(proc, s, catalog)))
    return sorted(rows, key=lambda row: (midpoint(getattr(row[1], key)).magnitude, row[0]))
