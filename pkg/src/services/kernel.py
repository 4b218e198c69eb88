"""Heat kernel G and Green function Gamma of -(Laplacian - 1/r^2) on the meridian half-plane.

G(t; r, rho, zeta) is evaluated in the cancellation-safe form

    1 / (4 sqrt(pi) t^{3/2}) * exp(-((r - rho)^2 + zeta^2) / 4t) * [e^{-xi} I1(xi)],   xi = r rho / 2t

and Gamma = int_0^inf G dt. Two independent routes to Gamma are provided:
the mode-1 ring potential (a phi-quadrature of the Newtonian kernel) and a
closed form through complete elliptic integrals, which is what the norm and
field code uses because it is vectorized and cheap.
"""
from __future__ import annotations

import logging
import math
from typing import List, Optional, Union

import numpy as np
from scipy import special

from src.models import HalfPlanePoint, IdentityReport, KernelArgs, QuadratureResult, QuadratureSpec
from src.services.bessel import bessel_i0_scaled, bessel_i1_scaled, sphere_profile_scaled
from src.services.quadrature import integrate_2d_halfplane, integrate_finite, integrate_semi_infinite
from src.utils.errors import DomainError, QuadratureAccuracyError, SingularityError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_PREFACTOR = 1.0 / (4.0 * math.sqrt(math.pi))
# Below this modulus the hypergeometric form is used; above it, K and E.
_HYPERGEOMETRIC_MAX_M = 0.5


# --------------------------------------------------------------------------------------
# Heat kernel
# --------------------------------------------------------------------------------------

def _arrays(t: ArrayLike, r: ArrayLike, rho: ArrayLike, zeta: ArrayLike):
    t, r, rho, zeta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, r, rho, zeta)))
    if not all(np.all(np.isfinite(v)) for v in (t, r, rho, zeta)):
        raise DomainError("heat kernel arguments must be finite")
    if np.any(t <= 0.0):
        raise DomainError("heat kernel needs t > 0")
    if np.any(r < 0.0) or np.any(rho < 0.0):
        raise DomainError("heat kernel needs r, rho >= 0")
    return t, r, rho, zeta


def _envelope(t: np.ndarray, r: np.ndarray, rho: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore"):
        return _PREFACTOR * t ** -1.5 * np.exp(-((r - rho) ** 2 + zeta ** 2) / (4.0 * t))


def heat_kernel_array(t: ArrayLike, r: ArrayLike, rho: ArrayLike, zeta: ArrayLike) -> np.ndarray:
    """Vectorized G; arguments broadcast against each other."""
    t, r, rho, zeta = _arrays(t, r, rho, zeta)
    return _envelope(t, r, rho, zeta) * bessel_i1_scaled(r * rho / (2.0 * t))


def heat_kernel_dz_array(t: ArrayLike, r: ArrayLike, rho: ArrayLike, zeta: ArrayLike) -> np.ndarray:
    """Vectorized d/dz G = -(zeta / 2t) G."""
    t, r, rho, zeta = _arrays(t, r, rho, zeta)
    return -(zeta / (2.0 * t)) * heat_kernel_array(t, r, rho, zeta)


def heat_kernel_dr_array(t: ArrayLike, r: ArrayLike, rho: ArrayLike, zeta: ArrayLike) -> np.ndarray:
    """Vectorized d/dr G through I1'(xi) = I0(xi) - I1(xi)/xi; needs r > 0."""
    t, r, rho, zeta = _arrays(t, r, rho, zeta)
    if np.any(r == 0.0):
        raise DomainError("d/dr of the heat kernel is only taken at r > 0")
    xi = r * rho / (2.0 * t)
    bracket = (rho / (2.0 * t)) * bessel_i0_scaled(xi) - (r / (2.0 * t) + 1.0 / r) * bessel_i1_scaled(xi)
    return _envelope(t, r, rho, zeta) * bracket


def heat_kernel(args: KernelArgs) -> float:
    return float(heat_kernel_array(args.t, args.r, args.rho, args.zeta))


def heat_kernel_dz(args: KernelArgs) -> float:
    return float(heat_kernel_dz_array(args.t, args.r, args.rho, args.zeta))


def heat_kernel_dr(args: KernelArgs) -> float:
    if args.r == 0.0:
        raise DomainError("d/dr of the heat kernel is only taken at r > 0")
    return float(heat_kernel_dr_array(args.t, args.r, args.rho, args.zeta))


def heat_kernel_5d_lift(args: KernelArgs, quad: QuadratureSpec) -> QuadratureResult:
    """G rebuilt from the five-dimensional Gaussian.

    With v = f / r the operator becomes the radial Laplacian of R^4 x R, so
    G = r rho (4 pi t)^{-5/2} * int_{S^3} exp(-|x - y|^2 / 4t) d(omega); the sphere
    integral is done by quadrature over the angle, not through I1.
    """
    t, r, rho, zeta = args.t, args.r, args.rho, args.zeta
    if r == 0.0 or rho == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    A = r * rho / (2.0 * t)
    profile = sphere_profile_scaled(A, quad)
    factor = (
        r * rho * (4.0 * math.pi * t) ** -2.5 * 4.0 * math.pi
        * math.exp(-((r - rho) ** 2 + zeta ** 2) / (4.0 * t))
    )
    return QuadratureResult(
        value=factor * profile.value,
        error_estimate=factor * profile.error_estimate,
        evaluations=profile.evaluations,
        converged=profile.converged,
    )


# --------------------------------------------------------------------------------------
# Green function by quadrature
# --------------------------------------------------------------------------------------

def _check_point(r: float, rho: float, zeta: float) -> None:
    for name, v in (("r", r), ("rho", rho), ("zeta", zeta)):
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")
    if r < 0.0 or rho < 0.0:
        raise DomainError(f"Green function needs r, rho >= 0, got r={r}, rho={rho}")
    if (r - rho) ** 2 + zeta ** 2 == 0.0:
        raise SingularityError(f"Green function is singular on the diagonal (r=rho={r}, zeta=0)")


def _time_integral(kernel, r: float, rho: float, zeta: float, spec: QuadratureSpec, what: str) -> QuadratureResult:
    t_star = 0.5 * r * rho

    def integrand(t: np.ndarray) -> np.ndarray:
        return kernel(t, r, rho, zeta)

    res = integrate_semi_infinite(integrand, 0.0, t_star, spec)
    if not res.converged:
        raise QuadratureAccuracyError(f"{what}({r}, {rho}, {zeta}) did not converge", res)
    return res


def green_function_quad(r: float, rho: float, zeta: float, spec: QuadratureSpec) -> QuadratureResult:
    """Gamma(r, rho, zeta) = int_0^inf G dt with the log map anchored at t* = r rho / 2."""
    _check_point(r, rho, zeta)
    if r == 0.0 or rho == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    return _time_integral(heat_kernel_array, r, rho, zeta, spec, "Gamma")


def green_function(r: float, rho: float, zeta: float, spec: QuadratureSpec) -> float:
    return green_function_quad(r, rho, zeta, spec).value


def green_function_dz_quad(r: float, rho: float, zeta: float, spec: QuadratureSpec) -> QuadratureResult:
    _check_point(r, rho, zeta)
    if r == 0.0 or rho == 0.0 or zeta == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    return _time_integral(heat_kernel_dz_array, r, rho, zeta, spec, "dz Gamma")


def green_function_dz(r: float, rho: float, zeta: float, spec: QuadratureSpec) -> float:
    return green_function_dz_quad(r, rho, zeta, spec).value


def green_function_oracle_quad(r: float, rho: float, zeta: float, spec: QuadratureSpec) -> QuadratureResult:
    """(1/4pi) int_0^{2pi} cos(phi) / sqrt(r^2 + rho^2 - 2 r rho cos(phi) + zeta^2) d(phi).

    The cos(phi) mode of the Newtonian kernel; integrated over [0, pi] and doubled.
    """
    _check_point(r, rho, zeta)
    if r == 0.0 or rho == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    base = r * r + rho * rho + zeta * zeta
    two_r_rho = 2.0 * r * rho

    def integrand(phi: np.ndarray) -> np.ndarray:
        return np.cos(phi) / np.sqrt(base - two_r_rho * np.cos(phi))

    points = [0.5 * math.pi]
    width = math.sqrt(((r - rho) ** 2 + zeta ** 2) / (r * rho))
    if width < 0.25:
        points.extend([width, 4.0 * width])
    res = integrate_finite(integrand, 0.0, math.pi, spec, breakpoints=points)
    if not res.converged:
        raise QuadratureAccuracyError(f"ring oracle at ({r}, {rho}, {zeta}) did not converge", res)
    scale = 1.0 / (2.0 * math.pi)
    return QuadratureResult(res.value * scale, res.error_estimate * scale, res.evaluations, True)


def green_function_oracle(r: float, rho: float, zeta: float, spec: QuadratureSpec) -> float:
    return green_function_oracle_quad(r, rho, zeta, spec).value


# --------------------------------------------------------------------------------------
# Closed forms (vectorized)
# --------------------------------------------------------------------------------------

def _closed_arrays(r: ArrayLike, rho: ArrayLike, zeta: ArrayLike):
    r, rho, zeta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, rho, zeta)))
    if not (np.all(np.isfinite(r)) and np.all(np.isfinite(rho)) and np.all(np.isfinite(zeta))):
        raise DomainError("Green function arguments must be finite")
    if np.any(r < 0.0) or np.any(rho < 0.0):
        raise DomainError("Green function needs r, rho >= 0")
    p = (r - rho) ** 2 + zeta ** 2
    if np.any(p == 0.0):
        raise SingularityError("Green function is singular on the diagonal")
    q = (r + rho) ** 2 + zeta ** 2
    return r, rho, zeta, p, q


def _shape_out(values: np.ndarray, *inputs: ArrayLike) -> ArrayLike:
    return float(values) if all(np.ndim(v) == 0 for v in inputs) else values


def green_function_closed(r: ArrayLike, rho: ArrayLike, zeta: ArrayLike) -> ArrayLike:
    """Gamma through complete elliptic integrals (parameter m = 4 r rho / Q).

    Gamma = sqrt(Q) / (2 pi r rho) * [(1 - m/2) K(m) - E(m)] for m > 1/2 and
    r rho / (4 Q^{3/2}) * 2F1(3/2, 3/2; 3; m) otherwise, which avoids the
    cancellation in the bracket when m is small.
    """
    r_a, rho_a, zeta_a, p, q = _closed_arrays(r, rho, zeta)
    m = 4.0 * r_a * rho_a / q
    out = np.zeros_like(m)
    small = (m > 0.0) & (m <= _HYPERGEOMETRIC_MAX_M)
    large = m > _HYPERGEOMETRIC_MAX_M
    if small.any():
        ms = m[small]
        out[small] = r_a[small] * rho_a[small] / (4.0 * q[small] ** 1.5) * special.hyp2f1(1.5, 1.5, 3.0, ms)
    if large.any():
        ml = m[large]
        k = special.ellipkm1(p[large] / q[large])
        e = special.ellipe(ml)
        out[large] = np.sqrt(q[large]) / (2.0 * math.pi * r_a[large] * rho_a[large]) * ((1.0 - 0.5 * ml) * k - e)
    return _shape_out(out, r, rho, zeta)


def green_function_dz_closed(r: ArrayLike, rho: ArrayLike, zeta: ArrayLike) -> ArrayLike:
    """d/dzeta of :func:`green_function_closed`; odd in zeta."""
    r_a, rho_a, zeta_a, p, q = _closed_arrays(r, rho, zeta)
    m = 4.0 * r_a * rho_a / q
    out = np.zeros_like(m)
    small = (m > 0.0) & (m <= _HYPERGEOMETRIC_MAX_M)
    large = m > _HYPERGEOMETRIC_MAX_M
    if small.any():
        ms = m[small]
        f1 = special.hyp2f1(1.5, 1.5, 3.0, ms)
        f2 = special.hyp2f1(2.5, 2.5, 4.0, ms)
        out[small] = -(r_a[small] * rho_a[small] * zeta_a[small] / (4.0 * q[small] ** 2.5)) * (3.0 * f1 + 1.5 * ms * f2)
    if large.any():
        ml = m[large]
        rl, rhol, zl, pl, ql = r_a[large], rho_a[large], zeta_a[large], p[large], q[large]
        k = special.ellipkm1(pl / ql)
        e = special.ellipe(ml)
        out[large] = -zl / (2.0 * math.pi * rl * rhol * np.sqrt(ql)) * ((rl * rl + rhol * rhol + zl * zl) / pl * e - k)
    return _shape_out(out, r, rho, zeta)


# --------------------------------------------------------------------------------------
# Identity checks
# --------------------------------------------------------------------------------------

def _converged(res: QuadratureResult, what: str) -> QuadratureResult:
    if not res.converged:
        raise QuadratureAccuracyError(f"{what} did not converge", res)
    return res


def first_moment_check(t: float, r: float, quad: QuadratureSpec, *, tolerance: Optional[float] = None) -> IdentityReport:
    """int int G(t; r, rho, zeta) rho^2 d(rho) d(zeta) = r, since v = r is a steady state.

    ``rel_error`` of the report is the absolute error.
    """
    if r <= 0.0:
        raise DomainError(f"first moment check needs r > 0, got {r}")
    if not t > 0.0:
        raise DomainError(f"first moment check needs t > 0, got {t}")

    def integrand(rho: np.ndarray, l: np.ndarray) -> np.ndarray:
        return heat_kernel_array(t, r, rho, l) * rho * rho

    res = _converged(
        integrate_2d_halfplane(integrand, quad, scale=max(r, math.sqrt(t))),
        f"first moment at t={t}, r={r}",
    )
    return IdentityReport.compare(
        "first_moment",
        res.value,
        r,
        parameters={"t": t, "r": r},
        tolerance=tolerance,
        error_estimate=res.error_estimate,
        scale=1.0,
    )


def semigroup_check(
    s: float,
    t: float,
    r: float,
    rho_final: float,
    zeta: float,
    spec: QuadratureSpec,
    *,
    tolerance: Optional[float] = None,
) -> IdentityReport:
    """G(s + t; r, rho', zeta) against the composition int int G(s; r, rho, zeta - eta) G(t; rho, rho', eta) rho."""
    KernelArgs(s, r, rho_final, zeta)
    KernelArgs(t, r, rho_final, zeta)
    params = {"s": s, "t": t, "r": r, "rho_final": rho_final, "zeta": zeta}
    rhs = float(heat_kernel_array(s + t, r, rho_final, zeta))
    if r == 0.0 or rho_final == 0.0:
        return IdentityReport.compare("semigroup", 0.0, rhs, parameters=params, tolerance=tolerance)

    def integrand(rho: np.ndarray, eta: np.ndarray) -> np.ndarray:
        return heat_kernel_array(s, r, rho, zeta - eta) * heat_kernel_array(t, rho, rho_final, eta) * rho

    res = _converged(
        integrate_2d_halfplane(integrand, spec, scale=max(r, rho_final, math.sqrt(s + t))),
        f"semigroup composition at s={s}, t={t}",
    )
    return IdentityReport.compare(
        "semigroup", res.value, rhs, parameters=params, tolerance=tolerance, error_estimate=res.error_estimate
    )


def axial_integral_check(r: float, rho: float, quad: QuadratureSpec, *, tolerance: Optional[float] = None) -> IdentityReport:
    """int Gamma(r, rho, zeta) d(zeta) over the whole line = min(r, rho) / (2 max(r, rho))."""
    if not (r > 0.0 and rho > 0.0):
        raise DomainError(f"axial integral check needs r, rho > 0, got r={r}, rho={rho}")

    def integrand(z: np.ndarray) -> np.ndarray:
        return green_function_closed(r, rho, z)

    res = _converged(integrate_semi_infinite(integrand, 0.0, max(r, rho), quad), "axial integral")
    expected = min(r, rho) / (2.0 * max(r, rho))
    return IdentityReport.compare(
        "axial_integral",
        2.0 * res.value,
        expected,
        parameters={"r": r, "rho": rho},
        tolerance=tolerance,
        error_estimate=2.0 * res.error_estimate,
    )


def scaling_check(
    lmbda: float, r: float, rho: float, zeta: float, quad: QuadratureSpec, *, tolerance: Optional[float] = None
) -> List[IdentityReport]:
    """lambda Gamma(lambda x) = Gamma(x) and lambda^2 dzGamma(lambda x) = dzGamma(x)."""
    if not lmbda > 0.0:
        raise DomainError(f"scaling factor must be positive, got {lmbda}")
    params = {"lambda": lmbda, "r": r, "rho": rho, "zeta": zeta}
    g_base = green_function(r, rho, zeta, quad)
    g_scaled = lmbda * green_function(lmbda * r, lmbda * rho, lmbda * zeta, quad)
    dz_base = green_function_dz(r, rho, zeta, quad)
    dz_scaled = lmbda ** 2 * green_function_dz(lmbda * r, lmbda * rho, lmbda * zeta, quad)
    return [
        IdentityReport.compare("scaling_Gamma", g_scaled, g_base, parameters=params, tolerance=tolerance),
        IdentityReport.compare(
            "scaling_dzGamma",
            dz_scaled,
            dz_base,
            parameters=params,
            tolerance=tolerance,
            scale=None if dz_base != 0.0 else 1.0,
        ),
    ]


def singular_point(r: float) -> HalfPlanePoint:
    """Where Gamma(r, ., .) blows up in the source plane."""
    return HalfPlanePoint(r, 0.0)


__all__ = [
    "heat_kernel",
    "heat_kernel_dz",
    "heat_kernel_dr",
    "heat_kernel_array",
    "heat_kernel_dz_array",
    "heat_kernel_dr_array",
    "heat_kernel_5d_lift",
    "green_function",
    "green_function_quad",
    "green_function_dz",
    "green_function_dz_quad",
    "green_function_oracle",
    "green_function_oracle_quad",
    "green_function_closed",
    "green_function_dz_closed",
    "first_moment_check",
    "semigroup_check",
    "axial_integral_check",
    "scaling_check",
    "singular_point",
]
