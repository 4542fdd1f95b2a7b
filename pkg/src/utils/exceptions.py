"""
Custom Exceptions for the SFC-LDPC Toolkit
==========================================

This module defines the exception hierarchy used across the toolkit. Every
error raised on purpose by the library derives from ``SFCError`` and carries
structured context (the offending field, the step size that failed, the line
of a graph file that could not be parsed...) so that the CLI can report it
precisely and callers can recover programmatically.

Hierarchy:
    SFCError
    ├── ValidationError
    ├── ConfigurationError
    ├── CapacityError
    ├── InfeasibleTargetError
    ├── ConditioningError
    ├── GraphFormatError
    ├── SolverError
    │   ├── NoLocalMinimumError
    │   └── BracketError
    ├── MissingArtifactError
    └── ToleranceFailure
"""

from functools import wraps
from typing import Any, Iterable, Optional


class SFCError(Exception):
    """
    Base exception for all toolkit errors.

    Attributes:
        message (str): Human-readable error message
        stage (str): Pipeline stage that raised the error (optional)
        original_error (Exception): Original exception that caused this error
    """

    def __init__(self, message: str, stage: Optional[str] = None,
                 original_error: Optional[BaseException] = None):
        self.message = message
        self.stage = stage
        self.original_error = original_error

        full_message = f"[{stage}] {message}" if stage else message
        super().__init__(full_message)

    def __str__(self):
        return self.args[0] if self.args else self.message


class ValidationError(SFCError):
    """
    Raised when parameters or inputs fail validation.

    This exception is raised when:
    - Ensemble parameters violate their invariants (d_v < 2, alpha < 1, ...)
    - An erasure probability lies outside [0, 1]
    - An erasure pattern does not match the graph it is applied to
    """

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None,
                 original_error: Optional[BaseException] = None):
        full_message = message
        if field is not None and value is not None:
            full_message = f"Invalid value for '{field}' ({value!r}): {message}"
        elif field is not None:
            full_message = f"Invalid value for '{field}': {message}"

        super().__init__(full_message, original_error=original_error)
        self.field = field
        self.value = value


class ConfigurationError(SFCError):
    """
    Raised when a configuration file is missing, malformed or has bad keys.
    """

    def __init__(self, message: str, config_key: Optional[str] = None,
                 config_file: Optional[str] = None,
                 original_error: Optional[BaseException] = None):
        full_message = message
        if config_key and config_file:
            full_message = f"Configuration error in '{config_file}' at key '{config_key}': {message}"
        elif config_key:
            full_message = f"Configuration error at key '{config_key}': {message}"
        elif config_file:
            full_message = f"Configuration error in '{config_file}': {message}"

        super().__init__(full_message, original_error=original_error)
        self.config_key = config_key
        self.config_file = config_file


class CapacityError(SFCError):
    """
    Raised when exact node counts would exceed what the toolkit can hold.

    Node counts are stored in 64-bit integer arrays; an ensemble whose
    largest section exceeds ``limit`` nodes is rejected before any exact
    power is expanded.
    """

    def __init__(self, message: str, required_bits: Optional[float] = None,
                 limit: Optional[int] = None):
        full_message = message
        if required_bits is not None and limit is not None:
            full_message = f"{message} (needs ~2^{required_bits:.1f} nodes, limit 2^{limit.bit_length() - 1})"
        super().__init__(full_message, stage="ensemble")
        self.required_bits = required_bits
        self.limit = limit


class InfeasibleTargetError(SFCError):
    """
    Raised when no (L, M) pair can meet a construction target.

    Attributes:
        nearest (dict): Nearest achievable {'L', 'M', 'length', 'rate'} if any
    """

    def __init__(self, message: str, nearest: Optional[dict] = None):
        full_message = message
        if nearest:
            full_message += (f". Nearest achievable: L={nearest['L']}, M={nearest['M']}, "
                             f"length={nearest['length']}, rate={nearest['rate']:.4f}")
        super().__init__(full_message, stage="construction")
        self.nearest = nearest


class ConditioningError(SFCError):
    """
    Raised when girth conditioning runs out of swap attempts.
    """

    def __init__(self, message: str, remaining_cycles: int, max_cycle: int):
        super().__init__(
            f"{message}: {remaining_cycles} variable node(s) still on cycles of length <= {max_cycle}",
            stage="girth",
        )
        self.remaining_cycles = remaining_cycles
        self.max_cycle = max_cycle


class GraphFormatError(SFCError):
    """
    Raised when a serialized Tanner graph cannot be parsed.
    """

    def __init__(self, message: str, line_number: Optional[int] = None,
                 missing_section: Optional[str] = None, file_path: Optional[str] = None):
        full_message = message
        if missing_section:
            full_message = f"Missing section '{missing_section}': {message}"
        if line_number is not None:
            full_message = f"Line {line_number}: {full_message}"
        if file_path:
            full_message = f"{file_path}: {full_message}"

        super().__init__(full_message, stage="graph-io")
        self.line_number = line_number
        self.missing_section = missing_section
        self.file_path = file_path


class SolverError(SFCError):
    """
    Raised when numerical integration of the evolution equations fails.

    Attributes:
        step (float): Step size in use when the failure happened
        tau (float): Normalized time of the failure
    """

    def __init__(self, message: str, step: Optional[float] = None, tau: Optional[float] = None,
                 advice: Optional[str] = None):
        full_message = message
        if tau is not None:
            full_message += f" at tau={tau:.6g}"
        if step is not None:
            full_message += f" with h={step:.3g}"
        if advice:
            full_message += f"; {advice}"

        super().__init__(full_message, stage="evolution")
        self.step = step
        self.tau = tau
        self.advice = advice


class NoLocalMinimumError(SolverError):
    """
    Raised when r1(tau) shows no strict interior local minimum.
    """

    def __init__(self, epsilon: float, flat: bool = False):
        reason = "a flat critical phase" if flat else "no strict interior local minimum"
        super().__init__(f"r1(tau) has {reason} at epsilon={epsilon:.6f}")
        self.epsilon = epsilon
        self.flat = flat


class BracketError(SolverError):
    """
    Raised when threshold bisection cannot bracket the BP threshold.
    """

    def __init__(self, low: float, high: float, completed_low: bool, completed_high: bool):
        super().__init__(
            f"Cannot bracket the BP threshold in [{low:.6f}, {high:.6f}] "
            f"(completed at low={completed_low}, at high={completed_high})"
        )
        self.low = low
        self.high = high


class MissingArtifactError(SFCError):
    """
    Raised when plot data is requested from an incomplete run directory.
    """

    def __init__(self, run_dir: str, missing: Iterable[str]):
        self.missing = sorted(missing)
        super().__init__(
            f"Run directory '{run_dir}' lacks required artifact(s): {', '.join(self.missing)}",
            stage="plot-data",
        )
        self.run_dir = run_dir


class ToleranceFailure(SFCError):
    """
    Raised when reproduced values fall outside their published tolerances.
    """

    def __init__(self, table: str, failures: Iterable[str]):
        self.failures = list(failures)
        super().__init__(
            f"Table {table}: {len(self.failures)} cell(s) outside tolerance: " + "; ".join(self.failures),
            stage="reproduce",
        )
        self.table = table


def handle_sfc_error(func):
    """
    Decorator that re-raises stray exceptions as ``SFCError`` subclasses.

    Usage:
        @handle_sfc_error
        def load_something(path):
            ...
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SFCError:
            raise
        except FileNotFoundError as e:
            raise SFCError(f"File not found: {e}", original_error=e) from e
        except (OverflowError, MemoryError) as e:
            raise CapacityError(f"Arithmetic capacity exceeded: {e}") from e
        except ValueError as e:
            raise ValidationError(f"Invalid data: {e}", original_error=e) from e

    return wrapper
