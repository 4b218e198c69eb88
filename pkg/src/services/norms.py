"""Weighted norms of Gamma and d/dz Gamma and their r-scaling.

All three families are exact power laws in the target radius r, because
Gamma is homogeneous of degree -1:

    Lp_inverse_rho   (int int Gamma^p / rho)^{1/p}         ~ r^{1/p - 1},  1 <= p < 2
    L2_rho           (int int Gamma^2 rho)^{1/2}           ~ r^{1/2}
    dz_L1_rho_delta  int int |dz Gamma| rho^{-delta}       ~ r^{-delta},   0 <= delta < 1

The integrals run over the source half-plane with the singular point (r, 0)
declared to the polar engine. The closed-form kernel is used throughout.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.models import NormKind, NormReport, QuadratureSpec
from src.services.kernel import green_function_closed, green_function_dz_closed, singular_point
from src.services.quadrature import integrate_2d_halfplane
from src.utils.errors import DomainError, ParameterRangeError, QuadratureAccuracyError

logger = logging.getLogger(__name__)

# Exact values, r-independent: int int Gamma / rho = 1 and int int |dz Gamma| = 1.
LP1_CONSTANT = 1.0
DZ0_CONSTANT = 1.0

_P_RANGE = "[1, 2)"
_DELTA_RANGE = "[0, 1)"


def _positive_r(r: float) -> float:
    if not (math.isfinite(r) and r > 0.0):
        raise DomainError(f"target radius must be a finite positive number, got {r!r}")
    return float(r)


def check_p(p: float) -> float:
    if not (math.isfinite(p) and 1.0 <= p < 2.0):
        raise ParameterRangeError("p", p, _P_RANGE)
    return float(p)


def check_delta(delta: float) -> float:
    if not (math.isfinite(delta) and 0.0 <= delta < 1.0):
        raise ParameterRangeError("delta", delta, _DELTA_RANGE)
    return float(delta)


def reference_exponent(kind: NormKind, parameter: Optional[float] = None) -> float:
    kind = NormKind(kind)
    if kind is NormKind.LP_INVERSE_RHO:
        return 1.0 / parameter - 1.0
    if kind is NormKind.L2_RHO:
        return 0.5
    return -parameter


def _integrand(kind: NormKind, r: float, parameter: Optional[float]) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    if kind is NormKind.LP_INVERSE_RHO:
        p = parameter

        def f(rho: np.ndarray, l: np.ndarray) -> np.ndarray:
            return green_function_closed(r, rho, l) ** p / rho

    elif kind is NormKind.L2_RHO:

        def f(rho: np.ndarray, l: np.ndarray) -> np.ndarray:
            return green_function_closed(r, rho, l) ** 2 * rho

    else:
        delta = parameter

        def f(rho: np.ndarray, l: np.ndarray) -> np.ndarray:
            return np.abs(green_function_dz_closed(r, rho, l)) * rho ** -delta

    return f


def _finish(kind: NormKind, parameter: Optional[float], integral: float) -> float:
    if kind is NormKind.LP_INVERSE_RHO:
        return integral ** (1.0 / parameter)
    if kind is NormKind.L2_RHO:
        return math.sqrt(integral)
    return integral


def _evaluate(
    kind: NormKind, r: float, parameter: Optional[float], spec: QuadratureSpec, exclusion_radius: float = 0.0
) -> float:
    res = integrate_2d_halfplane(
        _integrand(kind, r, parameter),
        spec,
        singular_at=singular_point(r),
        exclusion_radius=exclusion_radius,
    )
    if not res.converged:
        raise QuadratureAccuracyError(
            f"{kind.value} norm at r={r}, parameter={parameter}, exclusion={exclusion_radius} did not converge",
            res,
        )
    logger.debug(
        "%s r=%g parameter=%s exclusion=%g integral=%.12g evaluations=%d",
        kind.value, r, parameter, exclusion_radius, res.value, res.evaluations,
    )
    return _finish(kind, parameter, res.value)


def norm_lp_inverse_rho(r: float, p: float, spec: QuadratureSpec) -> float:
    """(int int Gamma(r, rho, l)^p rho^{-1} d(rho) dl)^{1/p} for 1 <= p < 2."""
    p = check_p(p)
    return _evaluate(NormKind.LP_INVERSE_RHO, _positive_r(r), p, spec)


def norm_l2_rho(r: float, spec: QuadratureSpec) -> float:
    """(int int Gamma(r, rho, l)^2 rho d(rho) dl)^{1/2}."""
    return _evaluate(NormKind.L2_RHO, _positive_r(r), None, spec)


def norm_dz_weighted(r: float, delta: float, spec: QuadratureSpec) -> float:
    """int int |dz Gamma(r, rho, l)| rho^{-delta} d(rho) dl for 0 <= delta < 1."""
    delta = check_delta(delta)
    return _evaluate(NormKind.DZ_L1_RHO_DELTA, _positive_r(r), delta, spec)


def norm_value(kind: NormKind, r: float, parameter: Optional[float], spec: QuadratureSpec) -> float:
    kind = NormKind(kind)
    if kind is NormKind.LP_INVERSE_RHO:
        return norm_lp_inverse_rho(r, parameter, spec)
    if kind is NormKind.L2_RHO:
        return norm_l2_rho(r, spec)
    return norm_dz_weighted(r, parameter, spec)


def truncated_norm(
    kind: NormKind, r: float, parameter: Optional[float], exclusion_radius: float, quad: QuadratureSpec
) -> float:
    """The same functional with the disc of ``exclusion_radius`` around (r, 0) removed.

    No admissibility check on ``parameter``: this is what the excluded
    endpoints p = 2 and delta = 1 are studied with.
    """
    kind = NormKind(kind)
    if not exclusion_radius > 0.0:
        raise DomainError(f"exclusion_radius must be positive, got {exclusion_radius}")
    if kind is not NormKind.L2_RHO and (parameter is None or not math.isfinite(parameter)):
        raise DomainError(f"{kind.value} needs a finite parameter")
    return _evaluate(kind, _positive_r(r), parameter, quad, exclusion_radius=exclusion_radius)


def fit_exponent(r_samples: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """Least squares on (log r, log value); returns (slope, intercept)."""
    slope, intercept = np.polyfit(np.log(np.asarray(r_samples)), np.log(np.asarray(values)), 1)
    return float(slope), float(intercept)


def scaling_report(
    kind: NormKind, parameter: Optional[float], r_samples: Sequence[float], spec: QuadratureSpec
) -> NormReport:
    kind = NormKind(kind)
    samples: List[float] = [float(r) for r in r_samples]
    if len(set(samples)) < 3:
        raise DomainError(f"scaling_report needs at least 3 distinct r samples, got {samples}")
    for r in samples:
        _positive_r(r)
    if kind is NormKind.LP_INVERSE_RHO:
        parameter = check_p(parameter)
    elif kind is NormKind.DZ_L1_RHO_DELTA:
        parameter = check_delta(parameter)
    else:
        parameter = None

    values = [norm_value(kind, r, parameter, spec) for r in samples]
    slope, _ = fit_exponent(samples, values)
    ref = reference_exponent(kind, parameter)
    ratios = np.asarray(values) / np.asarray(samples) ** ref
    constant = float(ratios.mean())
    deviation = float(np.max(np.abs(ratios / constant - 1.0)))
    logger.info(
        "%s parameter=%s fitted=%.6f reference=%.6f deviation=%.2e",
        kind.value, parameter, slope, ref, deviation,
    )
    return NormReport(
        kind=kind,
        parameter=parameter,
        r_samples=samples,
        values=values,
        fitted_exponent=slope,
        reference_exponent=ref,
        constant=constant,
        max_ratio_deviation=deviation,
    )


def proof_admissibility_window(kind: NormKind, parameter: float) -> Optional[Tuple[float, float]]:
    """Open interval of the auxiliary exponent the a-priori proof can use, or None when empty.

    Lp_inverse_rho: (1/p - 1/2, 1/p) intersected with (1/2, inf).
    dz_L1_rho_delta: (|delta - 1/2|, 1/2), empty at delta = 0 and delta = 1.
    Documentation only; nothing is computed with it.
    """
    kind = NormKind(kind)
    if kind is NormKind.LP_INVERSE_RHO:
        lo, hi = max(1.0 / parameter - 0.5, 0.5), 1.0 / parameter
    elif kind is NormKind.DZ_L1_RHO_DELTA:
        lo, hi = abs(parameter - 0.5), 0.5
    else:
        return None
    return (lo, hi) if lo < hi else None


__all__ = [
    "LP1_CONSTANT",
    "DZ0_CONSTANT",
    "check_p",
    "check_delta",
    "reference_exponent",
    "norm_lp_inverse_rho",
    "norm_l2_rho",
    "norm_dz_weighted",
    "norm_value",
    "truncated_norm",
    "fit_exponent",
    "scaling_report",
    "proof_admissibility_window",
]
