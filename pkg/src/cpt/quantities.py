"""Dimension-checked quantities and closed, non-negative intervals.

Magnitudes are held in one canonical unit per dimension (grams of CO2, watts,
hours, kilowatt-hours, kg CO2 per kWh, plain counts). Display units exist only
at the edges: parsing catalog files, CLI flags and rendering.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionError, IntervalError, UnitError


class Dimension(enum.Enum):
    MASS_CO2 = "MassCO2"
    POWER = "Power"
    TIME = "Time"
    ENERGY = "Energy"
    EMISSION_FACTOR = "EmissionFactor"
    COUNT = "Count"
    DIMENSIONLESS = "Dimensionless"


CANONICAL_UNIT = {
    Dimension.MASS_CO2: "g",
    Dimension.POWER: "W",
    Dimension.TIME: "h",
    Dimension.ENERGY: "kWh",
    Dimension.EMISSION_FACTOR: "kgCO2/kWh",
    Dimension.COUNT: "count",
    Dimension.DIMENSIONLESS: "1",
}

HOURS_PER_YEAR = 365 * 24

# unit name -> (dimension, exact ratio to the canonical unit)
UNITS: dict[str, tuple[Dimension, Fraction]] = {
    "ug": (Dimension.MASS_CO2, Fraction(1, 10**6)),
    "mg": (Dimension.MASS_CO2, Fraction(1, 10**3)),
    "g": (Dimension.MASS_CO2, Fraction(1)),
    "kg": (Dimension.MASS_CO2, Fraction(10**3)),
    "t": (Dimension.MASS_CO2, Fraction(10**6)),
    "nW": (Dimension.POWER, Fraction(1, 10**9)),
    "W": (Dimension.POWER, Fraction(1)),
    "h": (Dimension.TIME, Fraction(1)),
    "hours": (Dimension.TIME, Fraction(1)),
    "years": (Dimension.TIME, Fraction(HOURS_PER_YEAR)),
    "Wh": (Dimension.ENERGY, Fraction(1, 10**3)),
    "kWh": (Dimension.ENERGY, Fraction(1)),
    "kgCO2/kWh": (Dimension.EMISSION_FACTOR, Fraction(1)),
    "count": (Dimension.COUNT, Fraction(1)),
    "1": (Dimension.DIMENSIONLESS, Fraction(1)),
}

# (left, right) -> (result, canonical scale factor); both orders are accepted.
# W*h is Wh, i.e. 1e-3 kWh; kWh * kgCO2/kWh is kg, i.e. 1e3 g.
_PRODUCTS: dict[tuple[Dimension, Dimension], tuple[Dimension, Fraction]] = {
    (Dimension.POWER, Dimension.TIME): (Dimension.ENERGY, Fraction(1, 10**3)),
    (Dimension.ENERGY, Dimension.EMISSION_FACTOR): (Dimension.MASS_CO2, Fraction(10**3)),
    (Dimension.COUNT, Dimension.MASS_CO2): (Dimension.MASS_CO2, Fraction(1)),
}


def unit_info(unit: str) -> tuple[Dimension, Fraction]:
    try:
        return UNITS[unit]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}; expected one of {sorted(UNITS)}") from None


def _scale(value: float, ratio: Fraction) -> float:
    # one rounding step when the ratio is a pure power of ten either way
    if ratio.denominator == 1:
        return value * ratio.numerator
    if ratio.numerator == 1:
        return value / ratio.denominator
    return value * ratio.numerator / ratio.denominator


def to_canonical(value: float, unit: str) -> float:
    return _scale(value, unit_info(unit)[1])


def from_canonical(value: float, unit: str) -> float:
    return _scale(value, 1 / unit_info(unit)[1])


def product_dimension(a: Dimension, b: Dimension) -> tuple[Dimension, Fraction]:
    """Result dimension and canonical scale factor of ``a * b``."""
    if b is Dimension.DIMENSIONLESS:
        return a, Fraction(1)
    if a is Dimension.DIMENSIONLESS:
        return b, Fraction(1)
    for key in ((a, b), (b, a)):
        if key in _PRODUCTS:
            return _PRODUCTS[key]
    raise DimensionError(f"cannot multiply {a.value} by {b.value}")


def _check_magnitude(x: float, what: str) -> float:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise IntervalError(f"{what} must be finite, got {x}")
    if x < 0:
        raise IntervalError(f"{what} must be non-negative, got {x}")
    return x


@dataclass(frozen=True)
class Quantity:
    """A non-negative magnitude expressed in ``unit``."""

    magnitude: float
    unit: str

    def __post_init__(self):
        unit_info(self.unit)
        object.__setattr__(self, "magnitude", _check_magnitude(self.magnitude, "magnitude"))

    @property
    def dimension(self) -> Dimension:
        return UNITS[self.unit][0]

    @property
    def canonical(self) -> float:
        return to_canonical(self.magnitude, self.unit)

    def to(self, unit: str) -> float:
        return convert(self, unit).magnitude

    def __str__(self):
        return f"{self.magnitude:.4g} {self.unit}"


def convert(q: Quantity, target_unit: str) -> Quantity:
    dim, _ = unit_info(target_unit)
    if dim is not q.dimension:
        raise UnitError(f"cannot express {q.dimension.value} in {target_unit!r} ({dim.value})")
    if target_unit == q.unit:
        return q
    _, src = UNITS[q.unit]
    _, dst = UNITS[target_unit]
    return Quantity(_scale(q.magnitude, src / dst), target_unit)


@dataclass(frozen=True)
class Interval:
    """Closed range ``[lo, hi]`` of canonical magnitudes of one dimension."""

    lo: float
    hi: float
    dimension: Dimension

    def __post_init__(self):
        lo = _check_magnitude(self.lo, "interval lower bound")
        hi = _check_magnitude(self.hi, "interval upper bound")
        if lo > hi:
            raise IntervalError(f"inverted interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def of(cls, lo: float, hi: float | None = None, unit: str = "1") -> Interval:
        """Build from display-unit bounds; ``hi`` defaults to ``lo``."""
        dim, _ = unit_info(unit)
        hi = lo if hi is None else hi
        return cls(to_canonical(lo, unit), to_canonical(hi, unit), dim)

    @classmethod
    def point(cls, q: Quantity) -> Interval:
        return cls(q.canonical, q.canonical, q.dimension)

    @classmethod
    def zero(cls, dimension: Dimension) -> Interval:
        return cls(0.0, 0.0, dimension)

    @property
    def lower(self) -> Quantity:
        return Quantity(self.lo, CANONICAL_UNIT[self.dimension])

    @property
    def upper(self) -> Quantity:
        return Quantity(self.hi, CANONICAL_UNIT[self.dimension])

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def in_unit(self, unit: str) -> tuple[float, float]:
        dim, _ = unit_info(unit)
        if dim is not self.dimension:
            raise UnitError(f"cannot express {self.dimension.value} in {unit!r}")
        return from_canonical(self.lo, unit), from_canonical(self.hi, unit)

    def contains(self, other: Interval, rel_tol: float = 0.0) -> bool:
        _same_dimension(self, other)
        return (
            self.lo * (1 - rel_tol) <= other.lo
            and other.hi <= self.hi * (1 + rel_tol)
        )

    def scaled(self, factor: float) -> Interval:
        factor = _check_magnitude(factor, "scale factor")
        return Interval(self.lo * factor, self.hi * factor, self.dimension)

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __str__(self):
        unit = CANONICAL_UNIT[self.dimension]
        return f"[{self.lo:.4g}, {self.hi:.4g}] {unit}"


def _same_dimension(a: Interval, b: Interval) -> None:
    if a.dimension is not b.dimension:
        raise DimensionError(f"dimension mismatch: {a.dimension.value} vs {b.dimension.value}")


def add(a: Interval, b: Interval) -> Interval:
    _same_dimension(a, b)
    return Interval(a.lo + b.lo, a.hi + b.hi, a.dimension)


def mul(a: Interval, b: Interval) -> Interval:
    # non-negative operands: the corner products are ordered lo*lo <= hi*hi
    dim, factor = product_dimension(a.dimension, b.dimension)
    return Interval(
        _scale(a.lo * b.lo, factor), _scale(a.hi * b.hi, factor), dim
    )


def div_by_count(a: Interval, n: Interval) -> Interval:
    if n.dimension is not Dimension.COUNT:
        raise DimensionError(f"divisor must be a Count, got {n.dimension.value}")
    if n.lo <= 0:
        raise IntervalError(f"count divisor must be positive, got lower bound {n.lo}")
    return Interval(a.lo / n.hi, a.hi / n.lo, a.dimension)


def midpoint(a: Interval) -> Quantity:
    return Quantity((a.lo + a.hi) / 2, CANONICAL_UNIT[a.dimension])


def hull(*intervals: Interval) -> Interval:
    if not intervals:
        raise IntervalError("hull of no intervals")
    first = intervals[0]
    for other in intervals[1:]:
        _same_dimension(first, other)
    return Interval(
        min(i.lo for i in intervals), max(i.hi for i in intervals), first.dimension
    )
