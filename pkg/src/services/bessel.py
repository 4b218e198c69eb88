"""Modified Bessel functions I0, I1 and the identities built on them.

Evaluation policy
-----------------
* ``x <= REGIME_BOUNDARY``: power series, truncated once the next term drops
  below ``1e-18`` of the partial sum. All terms are positive, so there is no
  cancellation anywhere on that range.
* ``x > REGIME_BOUNDARY``: large-argument expansion of the *scaled* function
  ``e^{-x} I_nu(x)``, summed until a term falls below ``1e-17`` or starts
  growing. The smallest term is about ``sqrt(x) e^{-2x}``, roughly ``1e-16``
  at the boundary, so both regimes agree there to rounding.

Kernel code only consumes the scaled functions, so nothing overflows even when
``r*rho/2t`` is huge. Every function accepts scalars or numpy arrays and
returns the same shape (a Python float for scalar input).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from src.models import IdentityReport, QuadratureResult, QuadratureSpec
from src.services.quadrature import integrate_finite, integrate_semi_infinite
from src.utils.errors import DomainError, QuadratureAccuracyError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

REGIME_BOUNDARY = 20.0
SERIES_CUTOFF = 1e-18
ASYMPTOTIC_CUTOFF = 1e-17
_MAX_SERIES_TERMS = 5000
_MAX_ASYMPTOTIC_TERMS = 80


class BesselRegime(str, Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class BesselEval:
    """I1 at one argument with the regime that produced it."""

    argument: float
    value: float
    scaled_value: float
    regime: BesselRegime


def _as_argument(x: ArrayLike, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    if np.any(arr < 0.0):
        raise DomainError(f"{name} must be >= 0, got {x!r}")
    return arr


def _out(arr: np.ndarray, like: ArrayLike) -> ArrayLike:
    if np.ndim(like) == 0:
        return float(arr)
    return arr


def _series(x: np.ndarray, nu: int) -> np.ndarray:
    """sum_m (x/2)^(2m+nu) / (m! (m+nu)!) for nu in {0, 1}."""
    half = 0.5 * x
    quarter_sq = half * half
    term = np.ones_like(x) if nu == 0 else half.copy()
    total = term.copy()
    active = term > 0.0
    m = 0
    while active.any():
        m += 1
        if m > _MAX_SERIES_TERMS:
            logger.warning("Bessel series hit %d terms without meeting the cutoff", _MAX_SERIES_TERMS)
            break
        term = np.where(active, term * quarter_sq / (m * (m + nu)), term)
        total = np.where(active, total + term, total)
        active &= term >= SERIES_CUTOFF * total
    return total


def _asymptotic_scaled(x: np.ndarray, nu: int) -> np.ndarray:
    """e^{-x} I_nu(x) from the large-argument expansion; x > 0."""
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _MAX_ASYMPTOTIC_TERMS + 1):
        nxt = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        active &= np.abs(nxt) < np.abs(term)
        total = np.where(active, total + nxt, total)
        term = np.where(active, nxt, term)
        active &= np.abs(nxt) >= ASYMPTOTIC_CUTOFF * np.abs(total)
        if not active.any():
            break
    return total / np.sqrt(2.0 * math.pi * x)


def _scaled(x: np.ndarray, nu: int) -> np.ndarray:
    out = np.empty_like(x)
    low = x <= REGIME_BOUNDARY
    if low.any():
        out[low] = _series(x[low], nu) * np.exp(-x[low])
    if (~low).any():
        out[~low] = _asymptotic_scaled(x[~low], nu)
    return out


def _unscaled(x: np.ndarray, nu: int) -> np.ndarray:
    out = np.empty_like(x)
    low = x <= REGIME_BOUNDARY
    if low.any():
        out[low] = _series(x[low], nu)
    if (~low).any():
        high = x[~low]
        with np.errstate(over="ignore"):
            out[~low] = _asymptotic_scaled(high, nu) * np.exp(high)
    return out


def bessel_i1(x: ArrayLike) -> ArrayLike:
    """I1(x); ``inf`` once e^x overflows (use :func:`bessel_i1_scaled` there)."""
    arr = _as_argument(x)
    return _out(_unscaled(np.atleast_1d(arr), 1).reshape(arr.shape), x)


def bessel_i1_scaled(x: ArrayLike) -> ArrayLike:
    """e^{-x} I1(x), finite for every finite x >= 0."""
    arr = _as_argument(x)
    return _out(_scaled(np.atleast_1d(arr), 1).reshape(arr.shape), x)


def bessel_i0(x: ArrayLike) -> ArrayLike:
    arr = _as_argument(x)
    return _out(_unscaled(np.atleast_1d(arr), 0).reshape(arr.shape), x)


def bessel_i0_scaled(x: ArrayLike) -> ArrayLike:
    arr = _as_argument(x)
    return _out(_scaled(np.atleast_1d(arr), 0).reshape(arr.shape), x)


def bessel_i1_series(x: ArrayLike) -> ArrayLike:
    """Raw power series of I1 at any argument (slow for large x)."""
    arr = _as_argument(x)
    return _out(_series(np.atleast_1d(arr), 1).reshape(arr.shape), x)


def bessel_i0_series(x: ArrayLike) -> ArrayLike:
    arr = _as_argument(x)
    return _out(_series(np.atleast_1d(arr), 0).reshape(arr.shape), x)


def bessel_i1_asymptotic_scaled(x: ArrayLike) -> ArrayLike:
    """Large-argument expansion of e^{-x} I1(x) at any x > 0."""
    arr = _as_argument(x)
    if np.any(arr == 0.0):
        raise DomainError("the asymptotic expansion needs x > 0")
    return _out(_asymptotic_scaled(np.atleast_1d(arr), 1).reshape(arr.shape), x)


def bessel_i1_eval(x: float) -> BesselEval:
    arr = _as_argument(x)
    if arr.ndim != 0:
        raise DomainError("bessel_i1_eval takes a single argument")
    xv = float(arr)
    regime = BesselRegime.SERIES if xv <= REGIME_BOUNDARY else BesselRegime.ASYMPTOTIC
    return BesselEval(
        argument=xv,
        value=float(bessel_i1(xv)),
        scaled_value=float(bessel_i1_scaled(xv)),
        regime=regime,
    )


# --------------------------------------------------------------------------------------
# Identities
# --------------------------------------------------------------------------------------

def _positive(value: float, name: str) -> float:
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return float(value)


def _require(result: QuadratureResult, what: str) -> QuadratureResult:
    if not result.converged:
        raise QuadratureAccuracyError(f"{what}: quadrature did not converge", result)
    return result


def verify_identity_id1(
    a: float, quad: QuadratureSpec, *, tolerance: Optional[float] = None
) -> IdentityReport:
    """int_0^inf e^{-s^2} I1(a s) ds = (e^{a^2/4} - 1) / a.

    Both sides are compared after multiplying by e^{-a^2/4}; the report carries
    the unscaled values.
    """
    a = _positive(a, "a")

    def integrand(s: np.ndarray) -> np.ndarray:
        return np.exp(-(s - 0.5 * a) ** 2) * bessel_i1_scaled(a * s)

    res = _require(
        integrate_semi_infinite(integrand, 0.0, max(0.5 * a, 0.5), quad), f"ID1 at a={a}"
    )
    rhs_scaled = -math.expm1(-0.25 * a * a) / a
    growth = math.exp(0.25 * a * a)
    report = IdentityReport.compare(
        "ID1",
        res.value * growth,
        rhs_scaled * growth,
        parameters={"a": a},
        tolerance=tolerance,
        error_estimate=res.error_estimate * growth,
    )
    logger.debug("ID1 a=%g rel_error=%.3e evaluations=%d", a, report.rel_error, res.evaluations)
    return report


def verify_identity_id2(
    a: float, quad: QuadratureSpec, *, tolerance: Optional[float] = None
) -> IdentityReport:
    """int_0^inf e^{-s^2} I1(a s)^2 s ds = e^{a^2/2} I1(a^2/2) / 2 (compared scaled by e^{-a^2})."""
    a = _positive(a, "a")

    def integrand(s: np.ndarray) -> np.ndarray:
        return np.exp(-(s - a) ** 2) * bessel_i1_scaled(a * s) ** 2 * s

    res = _require(integrate_semi_infinite(integrand, 0.0, max(a, 1.0), quad), f"ID2 at a={a}")
    rhs_scaled = 0.5 * float(bessel_i1_scaled(0.5 * a * a))
    growth = math.exp(a * a)
    report = IdentityReport.compare(
        "ID2",
        res.value * growth,
        rhs_scaled * growth,
        parameters={"a": a},
        tolerance=tolerance,
        error_estimate=res.error_estimate * growth,
    )
    logger.debug("ID2 a=%g rel_error=%.3e evaluations=%d", a, report.rel_error, res.evaluations)
    return report


def sphere_profile_scaled(A: float, quad: QuadratureSpec) -> QuadratureResult:
    """int_{-1}^{1} e^{A(s-1)} sqrt(1-s^2) ds."""

    def integrand(s: np.ndarray) -> np.ndarray:
        return np.exp(A * (s - 1.0)) * np.sqrt(np.maximum(1.0 - s * s, 0.0))

    points = [1.0 - 1.0 / A] if A > 1.0 else None
    return _require(integrate_finite(integrand, -1.0, 1.0, quad, breakpoints=points), f"sphere profile at A={A}")


def verify_lemma_sphere(
    A: float, quad: QuadratureSpec, *, tolerance: Optional[float] = None
) -> IdentityReport:
    """int_{-1}^{1} e^{A s} sqrt(1-s^2) ds = pi I1(A) / A."""
    A = _positive(A, "A")
    res = sphere_profile_scaled(A, quad)
    rhs_scaled = math.pi * float(bessel_i1_scaled(A)) / A
    growth = math.exp(A)
    return IdentityReport.compare(
        "sphere_lemma",
        res.value * growth,
        rhs_scaled * growth,
        parameters={"A": A},
        tolerance=tolerance,
        error_estimate=res.error_estimate * growth,
    )


def sphere_angle_integral(
    A: float, quad: QuadratureSpec, *, tolerance: Optional[float] = None
) -> IdentityReport:
    """Average of e^{A cos(angle)} over the 3-sphere: 4 pi int e^{As} sqrt(1-s^2) ds = 4 pi^2 I1(A)/A."""
    A = _positive(A, "A")
    res = sphere_profile_scaled(A, quad)
    growth = 4.0 * math.pi * math.exp(A)
    rhs = 4.0 * math.pi ** 2 * float(bessel_i1_scaled(A)) / A * math.exp(A)
    return IdentityReport.compare(
        "sphere_angle_integral",
        res.value * growth,
        rhs,
        parameters={"A": A},
        tolerance=tolerance,
        error_estimate=res.error_estimate * growth,
    )


__all__ = [
    "REGIME_BOUNDARY",
    "BesselRegime",
    "BesselEval",
    "bessel_i1",
    "bessel_i1_scaled",
    "bessel_i0",
    "bessel_i0_scaled",
    "bessel_i1_series",
    "bessel_i0_series",
    "bessel_i1_asymptotic_scaled",
    "bessel_i1_eval",
    "verify_identity_id1",
    "verify_identity_id2",
    "verify_lemma_sphere",
    "sphere_angle_integral",
    "sphere_profile_scaled",
]
