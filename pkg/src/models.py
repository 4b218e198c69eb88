"""Shared domain records.

Plain value objects are frozen dataclasses; anything that is configured from
the outside (env, CLI) or rendered into a report is a pydantic model so it is
validated on construction and serializes cleanly to CSV rows.
"""
from __future__ import annotations

import math
import os
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.utils.errors import DomainError

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------------------
# Geometry
# --------------------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfPlanePoint:
    """A point (r, z) of the meridian half-plane."""

    r: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.z)):
            raise DomainError(f"HalfPlanePoint needs finite coordinates, got ({self.r}, {self.z})")
        if self.r < 0.0:
            raise DomainError(f"HalfPlanePoint needs r >= 0, got r={self.r}")


@dataclass(frozen=True)
class KernelArgs:
    """Arguments (t; r, rho, z - l) of the heat kernel G."""

    t: float
    r: float
    rho: float
    zeta: float

    def __post_init__(self) -> None:
        for name in ("t", "r", "rho", "zeta"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"KernelArgs.{name} must be finite")
        if self.t <= 0.0:
            raise DomainError(f"heat kernel needs t > 0, got t={self.t}")
        if self.r < 0.0 or self.rho < 0.0:
            raise DomainError(f"heat kernel needs r, rho >= 0, got r={self.r}, rho={self.rho}")


# --------------------------------------------------------------------------------------
# Quadrature
# --------------------------------------------------------------------------------------

def _env_number(name: str, cast, default):
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return cast(raw)
    except ValueError:
        logger.warning("ignoring invalid %s=%r, using default %r", name, raw, default)
        return default


class QuadratureSpec(BaseModel):
    """Tolerances and subdivision policy for every improper or singular integral."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(1e-9, gt=0.0, description="relative tolerance")
    abs_tol: float = Field(1e-14, gt=0.0, description="absolute tolerance")
    max_subdivisions: int = Field(2000, ge=1, description="maximum number of panels per integral")
    truncation_drop: float = Field(
        1e-16, gt=0.0, description="integrand/peak ratio at which semi-infinite tails are cut"
    )

    @model_validator(mode="after")
    def _tail_below_tolerance(self) -> "QuadratureSpec":
        if not self.truncation_drop < self.rel_tol:
            raise ValueError(
                f"truncation_drop ({self.truncation_drop}) must be smaller than rel_tol ({self.rel_tol})"
            )
        return self

    @classmethod
    def from_env(cls, **overrides: Any) -> "QuadratureSpec":
        """Build from AXIKERNEL_* environment variables; explicit overrides win."""
        values: Dict[str, Any] = {
            "rel_tol": _env_number("AXIKERNEL_TOL_REL", float, 1e-9),
            "abs_tol": _env_number("AXIKERNEL_TOL_ABS", float, 1e-14),
            "max_subdivisions": _env_number("AXIKERNEL_MAX_SUBDIVISIONS", int, 2000),
            "truncation_drop": _env_number("AXIKERNEL_TRUNCATION_DROP", float, 1e-16),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def tighter(self, factor: float = 10.0) -> "QuadratureSpec":
        """Same policy with the tolerances divided by ``factor`` (used for inner integrals)."""
        return self.model_copy(
            update={
                "rel_tol": max(self.rel_tol / factor, self.truncation_drop * 10.0),
                "abs_tol": self.abs_tol / factor,
            }
        )


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )


# --------------------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------------------

class IdentityReport(BaseModel):
    """Outcome of checking a closed-form identity against a numerical evaluation."""

    name: str
    parameters: Dict[str, float] = Field(default_factory=dict)
    lhs: float
    rhs: float
    abs_error: float
    rel_error: float
    tolerance: Optional[float] = None
    error_estimate: float = 0.0

    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.rel_error <= self.tolerance

    @classmethod
    def compare(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        *,
        parameters: Optional[Dict[str, float]] = None,
        tolerance: Optional[float] = None,
        error_estimate: float = 0.0,
        scale: Optional[float] = None,
    ) -> "IdentityReport":
        """``scale`` replaces |rhs| as the denominator (e.g. when both sides vanish)."""
        abs_error = abs(lhs - rhs)
        denom = abs(rhs) if scale is None else abs(scale)
        if denom > 0.0:
            rel_error = abs_error / denom
        else:
            rel_error = 0.0 if abs_error == 0.0 else math.inf
        return cls(
            name=name,
            parameters=dict(parameters or {}),
            lhs=float(lhs),
            rhs=float(rhs),
            abs_error=float(abs_error),
            rel_error=float(rel_error),
            tolerance=tolerance,
            error_estimate=float(error_estimate),
        )


class NormKind(str, Enum):
    LP_INVERSE_RHO = "Lp_inverse_rho"
    L2_RHO = "L2_rho"
    DZ_L1_RHO_DELTA = "dz_L1_rho_delta"


class NormReport(BaseModel):
    kind: NormKind
    parameter: Optional[float] = None
    r_samples: List[float]
    values: List[float]
    fitted_exponent: float
    reference_exponent: float
    constant: float
    max_ratio_deviation: float

    @property
    def exponent_error(self) -> float:
        return abs(self.fitted_exponent - self.reference_exponent)


class FieldQuantity(str, Enum):
    OMEGA_THETA = "omega_theta"
    L_THETA = "L_theta"
    U_THETA = "u_theta"
    GENERIC = "generic"

    @property
    def vanishes_on_axis(self) -> bool:
        return self in (FieldQuantity.OMEGA_THETA, FieldQuantity.L_THETA, FieldQuantity.U_THETA)


class CriterionReport(BaseModel):
    alpha: float
    beta: float
    sup_b_functional: float = Field(ge=0.0)
    sup_utheta_functional: float = Field(ge=0.0)
    hypothesis_window: bool = Field(
        description="whether 0 <= beta < alpha/6, the drift-term window of the regularity criterion"
    )


class AssumptionReport(BaseModel):
    exponent: float
    sup_value: float = Field(ge=0.0)
    r_at_sup: float
    z_at_sup: float
    r_min: float

    @field_validator("exponent")
    @classmethod
    def _exponent_range(cls, v: float) -> float:
        if not (1.0 <= v <= 2.0):
            raise ValueError("exponent must lie in [1, 2]")
        return v


__all__ = [
    "HalfPlanePoint",
    "KernelArgs",
    "QuadratureSpec",
    "QuadratureResult",
    "IdentityReport",
    "NormKind",
    "NormReport",
    "FieldQuantity",
    "CriterionReport",
    "AssumptionReport",
]
