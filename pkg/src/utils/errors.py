"""
Error hierarchy for the heart-rate benchmark.

Every error raised on purpose by the pipeline derives from ``BenchError`` and
carries the process exit code the CLI should return for it.
"""

from typing import Optional


class BenchError(Exception):
    """Base class for all benchmark errors."""

    exit_code: int = 1

    def __init__(self, message: str, exit_code: Optional[int] = None):
        super().__init__(message)
        if exit_code is not None:
            self.exit_code = exit_code


# --- data / guard errors (exit 2) ---

class DataError(BenchError):
    exit_code = 2


class EmptySignal(DataError):
    """A record has fewer than two R-peaks, so no RR interval exists."""


class GuardUnsatisfied(DataError):
    """No candidate threshold yields enough positive records and windows."""

    def __init__(self, message: str, best_theta: Optional[float] = None,
                 n_positive_windows: int = 0, n_positive_records: int = 0):
        super().__init__(message)
        self.best_theta = best_theta
        self.n_positive_windows = n_positive_windows
        self.n_positive_records = n_positive_records


class SplitInfeasible(DataError):
    """Too few records to build train/validation/test splits."""


class DegenerateScale(DataError):
    """Training contexts are constant, so the standard deviation is zero."""


class NoRecords(DataError):
    """The manifest or peak table lists no records."""


class ConfigError(DataError):
    """Configuration file is missing, malformed or fails validation."""


# --- training errors (exit 3) ---

class TrainingDiverged(BenchError):
    exit_code = 3

    def __init__(self, message: str, step: int = -1, run_id: str = ""):
        super().__init__(message)
        self.step = step
        self.run_id = run_id


# --- evaluation errors (exit 4) ---

class EvaluationError(BenchError):
    exit_code = 4


class MetricUndefined(EvaluationError):
    """A metric is undefined on the given data (e.g. a single class)."""


class CIUndefined(EvaluationError):
    """Every bootstrap draw produced an undefined metric."""


class ThresholdUndefined(EvaluationError):
    """F-beta threshold selection needs at least one positive example."""


class CalibrationSkipped(EvaluationError):
    """Temperature scaling needs both classes; the fallback temperature is 1."""

    temperature: float = 1.0


class MissingSplit(EvaluationError):
    """A split required for evaluation has no windows."""


# --- contract errors (exit 1) ---

class ContractViolation(BenchError):
    """A caller broke a documented precondition."""


class ShapeError(ContractViolation):
    """Operands of a tensor operation have incompatible shapes."""

    def __init__(self, op: str, *shapes):
        shown = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {shown}")
        self.op = op
        self.shapes = shapes
