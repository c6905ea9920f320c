"""
Exception hierarchy for the BPC simulator.

Library code raises these; the CLI maps them onto exit codes.
"""

from typing import Any, Dict, Optional


class BpcError(Exception):
    """Base class for all simulator errors."""


class ConfigError(BpcError):
    """Invalid or unreadable configuration."""


class TrajectoryFormatError(BpcError, ValueError):
    """Malformed, empty or non-monotone trajectory input."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidOrientationError(BpcError, ValueError):
    """Quaternion is not a valid orientation (non-unit, gimbal lock)."""


class InvalidMeasurementError(BpcError, ValueError):
    """Sensor sample is non-finite or carries no usable component."""


class DegenerateGeometryError(BpcError, ValueError):
    """Vehicles too close, or the peer sits on the vertical axis."""


class NonPsdCovarianceError(BpcError, ValueError):
    """Covariance input is not symmetric positive semidefinite."""


class NumericalFailureError(BpcError, ArithmeticError):
    """A numerical step produced an unusable result."""

    def __init__(self, message: str, step: Optional[int] = None) -> None:
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class QuadratureError(NumericalFailureError):
    """Quadrature did not converge; diagnostics are attached."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        self.diagnostics = diagnostics or {}
        super().__init__(f"{message} {self.diagnostics}" if self.diagnostics else message)
