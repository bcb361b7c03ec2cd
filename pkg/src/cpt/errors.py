"""Exception types. Each maps to one CLI exit status."""


class CPTError(Exception):
    exit_status = 1


class DimensionError(CPTError, ValueError):
    exit_status = 4


class UnitError(DimensionError):
    pass


class IntervalError(CPTError, ValueError):
    exit_status = 4


class ModelError(CPTError, ValueError):
    """An engine input violates its domain (yield outside (0, 1], no transistors...)."""

    exit_status = 4


class ScenarioError(CPTError, ValueError):
    exit_status = 4


class UnknownReferenceError(CPTError, LookupError):
    exit_status = 3

    def __init__(self, kind: str, ref: str):
        super().__init__(f"unknown {kind} {ref!r}")
        self.kind = kind
        self.ref = ref


class CatalogError(CPTError):
    exit_status = 2

    def __init__(self, message: str, diagnostics=()):
        self.diagnostics = list(diagnostics)
        if self.diagnostics:
            message += "\n" + "\n".join(f"  {d}" for d in self.diagnostics)
        super().__init__(message)
