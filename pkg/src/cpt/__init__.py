"""Carbon per transistor: embodied and operational CO2 per transistor, with intervals."""

from .catalog import Catalog, load_builtin, load_file
from .engine import CptBreakdown, OperationalInputs, WaferProfile
from .quantities import Dimension, Interval, Quantity
from .scenario import SweepSpec, UsageScenario

__all__ = [
    "Catalog", "CptBreakdown", "Dimension", "Interval", "OperationalInputs",
    "Quantity", "SweepSpec", "UsageScenario", "WaferProfile", "load_builtin", "load_file",
]
