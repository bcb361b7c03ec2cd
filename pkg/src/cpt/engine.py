"""Carbon-per-transistor formula chain over intervals.

Per-transistor manufacturing emissions come from spreading a wafer's CO2
over its good transistors; operational emissions are per-transistor power
integrated over the service life and weighted by grid intensity. Chip-level
figures multiply back by the transistor count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import ModelError
from .quantities import (
    Dimension,
    Interval,
    Quantity,
    add,
    div_by_count,
    midpoint,
    mul,
)

STAGE_ORDER = ("crystal", "wafer_processing", "manufacturing", "operational")
PROFILE_STAGES = STAGE_ORDER[:3]
STAGE_TOLERANCE = 0.01


def _require(interval: Interval, dimension: Dimension, what: str) -> None:
    if interval.dimension is not dimension:
        raise ModelError(f"{what} must be {dimension.value}, got {interval.dimension.value}")


@dataclass(frozen=True)
class WaferProfile:
    node_name: str
    wafer_total: Interval
    yield_fraction: Interval
    transistors_per_wafer: Interval
    stage_emissions: Mapping[str, Interval] | None = None

    def __post_init__(self):
        _require(self.wafer_total, Dimension.MASS_CO2, "wafer_total")
        _require(self.yield_fraction, Dimension.DIMENSIONLESS, "yield")
        _require(self.transistors_per_wafer, Dimension.COUNT, "transistors_per_wafer")
        if not (0 < self.yield_fraction.lo and self.yield_fraction.hi <= 1):
            raise ModelError(
                f"yield must lie in (0, 1], got [{self.yield_fraction.lo}, {self.yield_fraction.hi}]"
            )
        if self.transistors_per_wafer.lo <= 0:
            raise ModelError("transistors_per_wafer must be positive")
        if self.stage_emissions:
            unknown = set(self.stage_emissions) - set(PROFILE_STAGES)
            if unknown:
                raise ModelError(f"unknown wafer stages {sorted(unknown)}")
            total = stage_sum(self.stage_emissions)
            if not total.contains(self.wafer_total, rel_tol=STAGE_TOLERANCE):
                raise ModelError(
                    f"stage emissions sum {total} does not cover wafer_total {self.wafer_total}"
                )


@dataclass(frozen=True)
class OperationalInputs:
    power_per_transistor: Interval
    lifetime_hours: Quantity
    emission_factor: Quantity

    def __post_init__(self):
        _require(self.power_per_transistor, Dimension.POWER, "power_per_transistor")
        if self.lifetime_hours.dimension is not Dimension.TIME:
            raise ModelError("lifetime_hours must be a Time quantity")
        if self.emission_factor.dimension is not Dimension.EMISSION_FACTOR:
            raise ModelError("emission_factor must be an EmissionFactor quantity")


@dataclass(frozen=True)
class CptBreakdown:
    manufacturing_per_transistor: Interval
    operational_per_transistor: Interval
    total_per_transistor: Interval
    manufacturing_chip: Interval
    operational_chip: Interval
    total_chip: Interval
    transistor_count: Interval
    power_per_transistor: Interval | None = field(default=None, compare=False)

    @property
    def manufacturing_share(self) -> float:
        """Manufacturing fraction of the chip total, taken at midpoints."""
        total = midpoint(self.total_chip).magnitude
        if total == 0:
            return 0.0
        return min(1.0, midpoint(self.manufacturing_chip).magnitude / total)


def stage_sum(stages: Mapping[str, Interval]) -> Interval:
    if not stages:
        raise ModelError("stage_sum needs at least one stage")
    known = [s for s in STAGE_ORDER if s in stages]
    names = known + sorted(s for s in stages if s not in STAGE_ORDER)
    total = stages[names[0]]
    _require(total, Dimension.MASS_CO2, f"stage {names[0]!r}")
    for name in names[1:]:
        _require(stages[name], Dimension.MASS_CO2, f"stage {name!r}")
        total = add(total, stages[name])
    return total


def manufacturing_per_transistor(profile: WaferProfile) -> Interval:
    good_transistors = mul(profile.yield_fraction, profile.transistors_per_wafer)
    return div_by_count(profile.wafer_total, good_transistors)


def manufacturing_chip_total(n_trans: Interval, c_fab: Interval) -> Interval:
    _require(n_trans, Dimension.COUNT, "transistor count")
    _require(c_fab, Dimension.MASS_CO2, "per-transistor fabrication emissions")
    return mul(n_trans, c_fab)


def per_transistor_power(p_total: Interval, n_trans: Interval) -> Interval:
    _require(p_total, Dimension.POWER, "total power")
    _require(n_trans, Dimension.COUNT, "transistor count")
    if n_trans.lo <= 0:
        raise ModelError("transistor count must be positive")
    return div_by_count(p_total, n_trans)


def operational_per_transistor(inp: OperationalInputs) -> Interval:
    energy = mul(inp.power_per_transistor, Interval.point(inp.lifetime_hours))
    return mul(energy, Interval.point(inp.emission_factor))


def cpt_per_transistor(c_man: Interval, c_oper: Interval) -> Interval:
    _require(c_man, Dimension.MASS_CO2, "manufacturing emissions")
    _require(c_oper, Dimension.MASS_CO2, "operational emissions")
    return add(c_man, c_oper)


def chip_total(n_trans: Interval, cpt: Interval) -> Interval:
    _require(n_trans, Dimension.COUNT, "transistor count")
    _require(cpt, Dimension.MASS_CO2, "per-transistor emissions")
    return mul(n_trans, cpt)


def breakdown(
    transistor_count: Interval,
    manufacturing: Interval,
    inputs: OperationalInputs,
) -> CptBreakdown:
    """Compose per-transistor and chip-level figures from prepared inputs."""
    operational = operational_per_transistor(inputs)
    total = cpt_per_transistor(manufacturing, operational)
    return CptBreakdown(
        manufacturing_per_transistor=manufacturing,
        operational_per_transistor=operational,
        total_per_transistor=total,
        manufacturing_chip=manufacturing_chip_total(transistor_count, manufacturing),
        operational_chip=chip_total(transistor_count, operational),
        total_chip=chip_total(transistor_count, total),
        transistor_count=transistor_count,
        power_per_transistor=inputs.power_per_transistor,
    )


def assess(
    processor,
    node,
    lifetime_hours: Quantity,
    emission_factor: Quantity,
    utilization: float = 1.0,
) -> CptBreakdown:
    """Full breakdown for one processor on one wafer profile.

    ``processor`` needs ``transistor_count`` and ``tdp``; ``node`` is a
    :class:`WaferProfile` or anything with a ``profile`` attribute holding one.
    TDP stands in for total power, scaled by ``utilization``.
    """
    profile = getattr(node, "profile", node)
    power = per_transistor_power(processor.tdp.scaled(utilization), processor.transistor_count)
    inputs = OperationalInputs(power, lifetime_hours, emission_factor)
    return breakdown(
        processor.transistor_count, manufacturing_per_transistor(profile), inputs
    )
