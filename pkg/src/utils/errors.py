"""Exception hierarchy shared by the numerics services and the CLI.

The CLI maps these onto exit codes: ``DomainError`` and ``FieldDataError`` are
usage/data problems (exit 2), ``QuadratureAccuracyError`` surfaces when a
verifying layer could not reach its tolerance.
"""
from __future__ import annotations

from typing import Any, Optional


class AxiKernelError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AxiKernelError, ValueError):
    """Argument outside the mathematical domain (non-finite, negative, t <= 0, ...)."""


class SingularityError(DomainError):
    """Evaluation requested on the diagonal (r == rho and zeta == 0) of the Green function."""


class ParameterRangeError(DomainError):
    """p, delta, alpha or beta outside the admissible set of the estimate being evaluated."""

    def __init__(self, name: str, value: float, valid: str) -> None:
        self.name = name
        self.value = value
        self.valid = valid
        super().__init__(f"{name}={value!r} is out of range; valid range is {valid}")


class QuadratureAccuracyError(AxiKernelError, RuntimeError):
    """Quadrature did not converge; ``result`` carries the achieved estimate."""

    def __init__(self, message: str, result: Optional[Any] = None) -> None:
        self.result = result
        if result is not None:
            message = (
                f"{message} (value={result.value!r}, "
                f"error_estimate={result.error_estimate!r}, evaluations={result.evaluations})"
            )
        super().__init__(message)


class FieldDataError(AxiKernelError, ValueError):
    """Malformed grid, mismatched axes, or an unparsable field file."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


__all__ = [
    "AxiKernelError",
    "DomainError",
    "SingularityError",
    "ParameterRangeError",
    "QuadratureAccuracyError",
    "FieldDataError",
]
