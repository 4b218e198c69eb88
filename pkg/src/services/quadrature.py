"""Adaptive quadrature engines.

All integrands are vectorized: they receive a 1-D ``numpy`` array of abscissae
(or two arrays for the half-plane engine) and return an array of the same
shape. Scalar-valued lambdas are broadcast, so ``lambda x: 1.0`` works too.

The core is a batched Gauss-Kronrod (7, 15) rule with the QUADPACK error
estimate. Each refinement round bisects the panels carrying most of the error
and evaluates every new panel in a single integrand call, which keeps numpy
kernels busy instead of paying Python overhead per node.

Semi-infinite ranges are mapped through ``x = a + scale * exp(u)`` and the
``u`` window is cut where the mapped integrand falls below
``truncation_drop`` times its sampled peak.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from src.models import HalfPlanePoint, QuadratureResult, QuadratureSpec
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
Integrand2D = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Kronrod 15-point abscissae (descending, last is the centre) and weights; the
# 7-point Gauss rule uses every other abscissa.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_gauss_half = np.zeros(7)
_gauss_half[1::2] = _WG[:3]
_GAUSS_W = np.concatenate([_gauss_half, [_WG[3]], _gauss_half[::-1]])

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny
NODES_PER_PANEL = _NODES.size

# Log-coordinate sampling window for semi-infinite maps.
_WINDOW_CAP = 120.0
_WINDOW_STEP = 1.0


def _call(f: Integrand, x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    return y


def _panels(f: Integrand, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Kronrod value and QUADPACK-style error estimate for each panel [a_i, b_i]."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = _call(f, x.ravel()).reshape(x.shape)

    resk = fx @ _KRONROD_W
    resg = fx @ _GAUSS_W
    resabs = np.abs(fx) @ _KRONROD_W
    mean = 0.5 * resk
    resasc = np.abs(fx - mean[:, None]) @ _KRONROD_W

    value = resk * half
    habs = np.abs(half)
    err = np.abs((resk - resg) * half)
    resasc = resasc * habs
    resabs = resabs * habs
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0.0) & (err != 0.0), scaled, err)
    err = np.where(resabs > _UFLOW / (50.0 * _EPS), np.maximum(50.0 * _EPS * resabs, err), err)

    bad = ~np.isfinite(value) | ~np.isfinite(err)
    if bad.any():
        value = np.where(bad, 0.0, value)
        err = np.where(bad, np.inf, err)
    return value, err


def _select_for_split(err: np.ndarray, tol: float, budget: int) -> np.ndarray:
    """Indices of the panels to bisect this round (largest errors first)."""
    if budget <= 0:
        return np.empty(0, dtype=int)
    nonfinite = np.flatnonzero(~np.isfinite(err))
    if nonfinite.size:
        return nonfinite[:budget]
    order = np.argsort(-err, kind="stable")
    remaining = err.sum() - np.cumsum(err[order])
    k = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
    return order[: min(max(k, 1), budget)]


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    spec: QuadratureSpec,
    breakpoints: Optional[Iterable[float]] = None,
) -> QuadratureResult:
    """Adaptive integral of ``f`` over [a, b].

    Integrable endpoint singularities are fine (nodes never touch the ends).
    ``breakpoints`` seed the initial partition. Non-convergence within
    ``spec.max_subdivisions`` panels is reported through ``converged=False``.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"integrate_finite needs finite limits, got [{a}, {b}]")
    if not a < b:
        raise DomainError(f"integrate_finite needs a < b, got [{a}, {b}]")

    edges = [a]
    if breakpoints is not None:
        edges.extend(sorted(float(p) for p in breakpoints if a < p < b))
    edges.append(b)
    edges_arr = np.unique(np.asarray(edges, dtype=float))
    left, right = edges_arr[:-1], edges_arr[1:]

    values, errors = _panels(f, left, right)
    evaluations = NODES_PER_PANEL * left.size
    rounds = 0
    converged = False

    while True:
        total = math.fsum(values)
        total_err = float(errors.sum())
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= tol:
            converged = True
            break
        budget = spec.max_subdivisions - left.size
        chosen = _select_for_split(errors, tol, budget)
        if chosen.size:
            # Panels too narrow to bisect in floating point are frozen.
            mid = 0.5 * (left[chosen] + right[chosen])
            splittable = (mid > left[chosen]) & (mid < right[chosen])
            chosen, mid = chosen[splittable], mid[splittable]
        if chosen.size == 0:
            break

        new_left = np.concatenate([left[chosen], mid])
        new_right = np.concatenate([mid, right[chosen]])
        new_values, new_errors = _panels(f, new_left, new_right)
        evaluations += NODES_PER_PANEL * new_left.size

        keep = np.ones(left.size, dtype=bool)
        keep[chosen] = False
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        values = np.concatenate([values[keep], new_values])
        errors = np.concatenate([errors[keep], new_errors])
        order = np.argsort(left, kind="stable")
        left, right, values, errors = left[order], right[order], values[order], errors[order]
        rounds += 1

    total = math.fsum(values)
    total_err = float(errors.sum())
    if not converged:
        logger.warning(
            "quadrature on [%g, %g] not converged: value=%.6g err=%.3g panels=%d",
            a, b, total, total_err, left.size,
        )
    else:
        logger.debug("quadrature on [%g, %g]: %d panels, %d rounds", a, b, left.size, rounds)
    return QuadratureResult(
        value=float(total),
        error_estimate=total_err,
        evaluations=int(evaluations),
        converged=converged,
    )


def _log_window(
    g: Integrand,
    drop: float,
    *,
    u_min: Optional[float] = None,
    u_max: Optional[float] = None,
    step: float = _WINDOW_STEP,
    cap: float = _WINDOW_CAP,
) -> Tuple[float, float, bool, int]:
    """Find [lo, hi] in log-coordinates outside which |g| < drop * peak.

    A fixed end (``u_min``/``u_max``) is kept as is. Returns
    ``(lo, hi, closed, evaluations)``; ``closed`` is False when a free end hit
    the cap without the integrand dropping off.
    """
    lo_cap = -cap if u_min is None else u_min
    hi_cap = cap if u_max is None else u_max
    if not lo_cap < hi_cap:
        return lo_cap, hi_cap, True, 0
    n = max(int(math.ceil((hi_cap - lo_cap) / step)), 2) + 1
    u = np.linspace(lo_cap, hi_cap, n)
    mag = np.abs(_call(g, u))
    mag = np.where(np.isnan(mag), 0.0, mag)
    peak = float(np.max(mag[np.isfinite(mag)], initial=0.0))
    if peak == 0.0 and np.isfinite(mag).all():
        return lo_cap, hi_cap, True, n
    significant = np.flatnonzero(~np.isfinite(mag) | (mag > drop * peak))
    closed = True
    if u_min is None:
        first = int(significant[0])
        lo = u[max(first - 1, 0)]
        closed &= first > 0
    else:
        lo = u_min
    if u_max is None:
        last = int(significant[-1])
        hi = u[min(last + 1, n - 1)]
        closed &= last < n - 1
    else:
        hi = u_max
    if hi <= lo:
        hi = lo + step
    return float(lo), float(hi), closed, n


def _log_breakpoints(lo: float, hi: float, width: float, dyadic_below: bool = False) -> List[float]:
    points: List[float] = []
    if dyadic_below:
        step = math.log(2.0)
        k = 1
        while -k * step > lo:
            points.append(-k * step)
            k += 1
        start = 0.0
    else:
        start = math.ceil(lo / width) * width
    x = start
    while x < hi:
        points.append(x)
        x += width
    return points


def _integrate_log(
    g: Integrand,
    spec: QuadratureSpec,
    *,
    u_min: Optional[float] = None,
    u_max: Optional[float] = None,
    panel_width: float = 1.0,
    window_step: float = _WINDOW_STEP,
    window_cap: float = _WINDOW_CAP,
    dyadic: bool = False,
) -> QuadratureResult:
    lo, hi, closed, sampled = _log_window(
        g, spec.truncation_drop, u_min=u_min, u_max=u_max, step=window_step, cap=window_cap
    )
    if not closed:
        logger.warning("integrand tail does not drop below %.1e inside |u| <= %g", spec.truncation_drop, window_cap)
    points = _log_breakpoints(lo, hi, panel_width, dyadic_below=dyadic)
    res = integrate_finite(g, lo, hi, spec, breakpoints=points)
    return QuadratureResult(
        value=res.value,
        error_estimate=res.error_estimate,
        evaluations=res.evaluations + sampled,
        converged=res.converged and closed,
    )


def integrate_semi_infinite(
    f: Integrand,
    a: float,
    scale: float,
    spec: QuadratureSpec,
    *,
    panel_width: float = 1.0,
) -> QuadratureResult:
    """Integral of ``f`` over [a, inf) through ``x = a + scale * exp(u)``.

    ``scale`` should sit where the integrand changes character (for the
    Green function that is t* = r*rho/2); the result does not depend on it
    beyond the requested tolerance.
    """
    if not (math.isfinite(scale) and scale > 0.0):
        raise DomainError(f"integrate_semi_infinite needs scale > 0, got {scale}")
    if not math.isfinite(a):
        raise DomainError(f"integrate_semi_infinite needs a finite lower limit, got {a}")

    def mapped(u: np.ndarray) -> np.ndarray:
        jac = scale * np.exp(u)
        return _call(f, a + jac) * jac

    return _integrate_log(mapped, spec, panel_width=panel_width)


def _integrate_polar(
    f: Integrand2D,
    spec: QuadratureSpec,
    centre: HalfPlanePoint,
    scale: float,
    exclusion_radius: float,
) -> QuadratureResult:
    rho0, l0 = centre.r, centre.z
    r_ref = rho0 if rho0 > 0.0 else scale
    inner_spec = spec.tighter()
    u_min = math.log(exclusion_radius / r_ref) if exclusion_radius > 0.0 else None
    stats = {"evaluations": 0, "converged": True, "error": 0.0}

    def radial(theta: np.ndarray) -> np.ndarray:
        out = np.empty_like(theta)
        for i, th in enumerate(theta):
            c, s = math.cos(th), math.sin(th)

            def g(u: np.ndarray, c: float = c, s: float = s) -> np.ndarray:
                radius = r_ref * np.exp(u)
                rho = np.maximum(rho0 + radius * c, 0.0)
                return _call(lambda _: f(rho, l0 + radius * s), u) * radius * radius

            u_max = None
            if c < 0.0:
                r_max = rho0 / (-c)
                if r_max <= (exclusion_radius if exclusion_radius > 0.0 else 0.0):
                    out[i] = 0.0
                    continue
                u_max = math.log(r_max / r_ref)
            res = _integrate_log(g, inner_spec, u_min=u_min, u_max=u_max, dyadic=True)
            out[i] = res.value
            stats["evaluations"] += res.evaluations
            stats["converged"] = stats["converged"] and res.converged
            stats["error"] += res.error_estimate
        return out

    half_pi = 0.5 * math.pi
    if rho0 > 0.0:
        lo, hi = 0.0, 2.0 * math.pi
    else:
        lo, hi = -half_pi, half_pi
    points = np.linspace(lo, hi, 9)[1:-1]
    outer = integrate_finite(radial, lo, hi, spec, breakpoints=points)
    return QuadratureResult(
        value=outer.value,
        error_estimate=outer.error_estimate,
        evaluations=outer.evaluations + stats["evaluations"],
        converged=outer.converged and bool(stats["converged"]),
    )


def _integrate_tensor(f: Integrand2D, spec: QuadratureSpec, scale: float) -> QuadratureResult:
    inner_spec = spec.tighter()
    stats = {"evaluations": 0, "converged": True}

    def slab(sign: float) -> Integrand:
        def h(l_values: np.ndarray) -> np.ndarray:
            out = np.empty_like(l_values)
            for i, l in enumerate(l_values):
                level = sign * float(l)
                res = integrate_semi_infinite(
                    lambda rho, level=level: f(rho, np.full_like(rho, level)), 0.0, scale, inner_spec
                )
                out[i] = res.value
                stats["evaluations"] += res.evaluations
                stats["converged"] = stats["converged"] and res.converged
            return out

        return h

    total = QuadratureResult(0.0, 0.0, 0, True)
    for sign in (1.0, -1.0):
        h = slab(sign)

        def mapped(u: np.ndarray, h: Integrand = h) -> np.ndarray:
            jac = scale * np.exp(u)
            return h(jac) * jac

        total = total + _integrate_log(mapped, spec, panel_width=2.0, window_step=2.0, window_cap=60.0)
    return QuadratureResult(
        value=total.value,
        error_estimate=total.error_estimate,
        evaluations=total.evaluations + stats["evaluations"],
        converged=total.converged and bool(stats["converged"]),
    )


def integrate_2d_halfplane(
    f: Integrand2D,
    spec: QuadratureSpec,
    singular_at: Optional[HalfPlanePoint] = None,
    *,
    scale: float = 1.0,
    exclusion_radius: float = 0.0,
) -> QuadratureResult:
    """Integral of ``f(rho, l)`` over (0, inf) x (-inf, inf), measure d(rho) dl.

    With ``singular_at`` the plane is integrated in polar coordinates around
    that point, radius in log-coordinates pre-split into dyadic annuli, so a
    logarithmic or inverse-distance singularity there is resolved;
    ``exclusion_radius`` removes the disc of that radius around it. Without a
    singular point the integral is iterated (rho inner, l outer) on
    log-mapped half-lines anchored at ``scale``.
    """
    if not (math.isfinite(scale) and scale > 0.0):
        raise DomainError(f"integrate_2d_halfplane needs scale > 0, got {scale}")
    if exclusion_radius < 0.0:
        raise DomainError("exclusion_radius must be >= 0")
    if singular_at is None:
        if exclusion_radius > 0.0:
            raise DomainError("exclusion_radius requires a singular point")
        return _integrate_tensor(f, spec, scale)
    return _integrate_polar(f, spec, singular_at, scale, exclusion_radius)


__all__ = [
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_2d_halfplane",
    "NODES_PER_PANEL",
]
