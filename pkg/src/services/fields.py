"""Gridded meridian fields and the stream-function / velocity reconstruction.

A field lives on a rectilinear (r, z) grid, values indexed ``[i_r, i_z]``.
Sources are treated as zero outside their grid.

Reconstruction evaluates, for every target (r, z),

    L(r, z)   =  int int Gamma(r, rho, z - l)    omega(rho, l) rho d(rho) dl
    u_r(r, z) = -int int dzGamma(r, rho, z - l)  omega(rho, l) rho d(rho) dl

cell by cell with omega bilinear inside each cell. Cells far from the target
get a tensor Gauss rule; cells within ``NEAR_FACTOR`` diameters are split
into four signed triangles with the target at the apex and integrated through
the collapsed-square (Duffy) map, which absorbs the logarithmic (Gamma) and
inverse-distance (dzGamma) singularities.

u_z and the divergence come from grid differentiation: fourth-order central
stencils inside, fourth-order one-sided stencils at the two ends.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np

from src.models import AssumptionReport, CriterionReport, FieldQuantity, QuadratureSpec
from src.services.kernel import green_function_closed, green_function_dz_closed
from src.utils.errors import FieldDataError, ParameterRangeError

logger = logging.getLogger(__name__)

PathOrStream = Union[str, Path, TextIO]
Kernel = Callable[[float, np.ndarray, np.ndarray], np.ndarray]

NEAR_FACTOR = 2.0
FAR_ORDER = 2
NEAR_ORDERS = (10, 14, 20)
MIN_STENCIL_NODES = 5

SCALAR_COLUMNS = ["r", "z", "value"]
VELOCITY_COLUMNS = ["r", "z", "u_r", "u_z"]


# --------------------------------------------------------------------------------------
# Grids and fields
# --------------------------------------------------------------------------------------

def _axis(values, name: str, nonnegative: bool = False) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if arr.size == 0:
        raise FieldDataError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise FieldDataError(f"{name} has non-finite entries")
    if arr.size > 1 and not np.all(np.diff(arr) > 0.0):
        raise FieldDataError(f"{name} must be strictly increasing")
    if nonnegative and arr[0] < 0.0:
        raise FieldDataError(f"{name} must be >= 0, starts at {arr[0]}")
    arr.setflags(write=False)
    return arr


def _matrix(values, shape: Tuple[int, int], name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise FieldDataError(f"{name} has shape {arr.shape}, grid needs {shape}")
    if not np.all(np.isfinite(arr)):
        raise FieldDataError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MeridianGrid:
    r_axis: np.ndarray
    z_axis: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "r_axis", _axis(self.r_axis, "r_axis", nonnegative=True))
        object.__setattr__(self, "z_axis", _axis(self.z_axis, "z_axis"))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.r_axis.size, self.z_axis.size

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.r_axis, self.z_axis, indexing="ij")

    def same_as(self, other: "MeridianGrid") -> bool:
        return np.array_equal(self.r_axis, other.r_axis) and np.array_equal(self.z_axis, other.z_axis)

    @classmethod
    def parse(cls, text: str) -> "MeridianGrid":
        """'rmin:rmax:nr,zmin:zmax:nz' -> uniform grid."""
        try:
            r_part, z_part = text.split(",")
            rmin, rmax, nr = r_part.split(":")
            zmin, zmax, nz = z_part.split(":")
            return cls(
                uniform_axis(float(rmin), float(rmax), int(nr)),
                uniform_axis(float(zmin), float(zmax), int(nz)),
            )
        except ValueError as exc:
            raise FieldDataError(f"bad grid {text!r}, expected rmin:rmax:nr,zmin:zmax:nz ({exc})") from exc


@dataclass(frozen=True, eq=False)
class MeridianScalarField:
    """Axisymmetric scalar (omega_theta, L_theta, u_theta or anything else) on a grid."""

    r_axis: np.ndarray
    z_axis: np.ndarray
    values: np.ndarray
    quantity: FieldQuantity = FieldQuantity.GENERIC
    provenance: str = ""

    def __post_init__(self) -> None:
        grid = MeridianGrid(self.r_axis, self.z_axis)
        object.__setattr__(self, "r_axis", grid.r_axis)
        object.__setattr__(self, "z_axis", grid.z_axis)
        object.__setattr__(self, "values", _matrix(self.values, grid.shape, "values"))
        object.__setattr__(self, "quantity", FieldQuantity(self.quantity))
        if self.quantity.vanishes_on_axis and self.r_axis[0] == 0.0:
            axis_max = float(np.max(np.abs(self.values[0]), initial=0.0))
            scale = float(np.max(np.abs(self.values), initial=0.0))
            if axis_max > 1e-12 * scale:
                raise FieldDataError(f"{self.quantity.value} must vanish on the axis r=0 (max |value| {axis_max:.3g})")

    @property
    def grid(self) -> MeridianGrid:
        return MeridianGrid(self.r_axis, self.z_axis)

    @classmethod
    def from_function(
        cls,
        fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
        grid: MeridianGrid,
        quantity: FieldQuantity = FieldQuantity.GENERIC,
        provenance: str = "",
    ) -> "MeridianScalarField":
        rr, zz = grid.mesh()
        return cls(grid.r_axis, grid.z_axis, np.broadcast_to(fn(rr, zz), rr.shape), quantity, provenance)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values), initial=0.0))


@dataclass(frozen=True, eq=False)
class MeridianVelocityField:
    """(u_r, u_z) on one grid; u_r vanishes on the axis."""

    r_axis: np.ndarray
    z_axis: np.ndarray
    u_r: np.ndarray
    u_z: np.ndarray
    provenance: str = ""

    def __post_init__(self) -> None:
        grid = MeridianGrid(self.r_axis, self.z_axis)
        object.__setattr__(self, "r_axis", grid.r_axis)
        object.__setattr__(self, "z_axis", grid.z_axis)
        object.__setattr__(self, "u_r", _matrix(self.u_r, grid.shape, "u_r"))
        object.__setattr__(self, "u_z", _matrix(self.u_z, grid.shape, "u_z"))
        if self.r_axis[0] == 0.0:
            axis_max = float(np.max(np.abs(self.u_r[0]), initial=0.0))
            if axis_max > 1e-12 * max(float(np.max(np.abs(self.u_r))), 1e-300):
                raise FieldDataError(f"u_r must vanish on the axis r=0 (max |u_r| {axis_max:.3g})")

    @property
    def grid(self) -> MeridianGrid:
        return MeridianGrid(self.r_axis, self.z_axis)

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.u_r, self.u_z)


def uniform_axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 2 or not hi > lo:
        raise FieldDataError(f"uniform axis needs lo < hi and n >= 2, got ({lo}, {hi}, {n})")
    return np.linspace(lo, hi, n)


def geometric_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """n points from lo to hi with constant ratio; lo > 0."""
    if n < 2 or not (0.0 < lo < hi):
        raise FieldDataError(f"geometric axis needs 0 < lo < hi and n >= 2, got ({lo}, {hi}, {n})")
    return np.geomspace(lo, hi, n)


def symmetric_axis(inner: float, outer: float, n_half: int) -> np.ndarray:
    """0 plus +-geometric spacing from ``inner`` to ``outer`` (2 n_half + 1 points)."""
    half = geometric_axis(inner, outer, n_half)
    return np.concatenate([-half[::-1], [0.0], half])


# --------------------------------------------------------------------------------------
# Manufactured solution
# --------------------------------------------------------------------------------------

def manufactured_stream(r, z):
    """L = r exp(-r^2 - z^2)."""
    return r * np.exp(-(r * r + z * z))


def manufactured_vorticity(r, z):
    """-(Laplacian - 1/r^2) L for the manufactured L."""
    return 2.0 * r * (5.0 - 2.0 * r * r - 2.0 * z * z) * np.exp(-(r * r + z * z))


def manufactured_velocity(r, z) -> Tuple[np.ndarray, np.ndarray]:
    """(u_r, u_z) = (-dz L, (1/r) dr(r L))."""
    decay = np.exp(-(r * r + z * z))
    return 2.0 * r * z * decay, 2.0 * (1.0 - r * r) * decay


# --------------------------------------------------------------------------------------
# Reconstruction
# --------------------------------------------------------------------------------------

def _gauss01(n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


class _SourceCells:
    """Active cells of a source grid with bilinear omega and precomputed far-field nodes."""

    def __init__(self, omega: MeridianScalarField) -> None:
        r, z, w = omega.r_axis, omega.z_axis, omega.values
        if r.size < 2 or z.size < 2:
            raise FieldDataError("source grid needs at least 2 nodes per axis")
        w00, w10, w01, w11 = w[:-1, :-1], w[1:, :-1], w[:-1, 1:], w[1:, 1:]
        active = (w00 != 0.0) | (w10 != 0.0) | (w01 != 0.0) | (w11 != 0.0)
        ir, iz = np.nonzero(active)
        self.r0, self.r1 = r[ir], r[ir + 1]
        self.z0, self.z1 = z[iz], z[iz + 1]
        self.w = np.stack([w00[ir, iz], w10[ir, iz], w01[ir, iz], w11[ir, iz]], axis=-1)
        self.diameter = np.hypot(self.r1 - self.r0, self.z1 - self.z0)
        self.count = ir.size

        a, wa = _gauss01(FAR_ORDER)
        aa, bb = np.meshgrid(a, a, indexing="ij")
        ww = np.outer(wa, wa).ravel()
        aa, bb = aa.ravel(), bb.ravel()
        dr = (self.r1 - self.r0)[:, None]
        dz = (self.z1 - self.z0)[:, None]
        self.far_rho = self.r0[:, None] + aa[None, :] * dr
        self.far_l = self.z0[:, None] + bb[None, :] * dz
        omega_nodes = self._bilinear(slice(None), aa[None, :], bb[None, :])
        self.far_weight = ww[None, :] * dr * dz * omega_nodes * self.far_rho

    def _bilinear(self, idx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        w = self.w[idx]
        return (
            w[..., 0, None] * (1.0 - a) * (1.0 - b)
            + w[..., 1, None] * a * (1.0 - b)
            + w[..., 2, None] * (1.0 - a) * b
            + w[..., 3, None] * a * b
        )

    def distance(self, r_t: float, z_t: float) -> np.ndarray:
        dr = np.maximum(np.maximum(self.r0 - r_t, r_t - self.r1), 0.0)
        dz = np.maximum(np.maximum(self.z0 - z_t, z_t - self.z1), 0.0)
        return np.hypot(dr, dz)

    def far_sum(self, kernel: Kernel, r_t: float, z_t: float, far: np.ndarray) -> float:
        if not far.any():
            return 0.0
        rho = self.far_rho[far].ravel()
        l = self.far_l[far].ravel()
        return float(np.sum(kernel(r_t, rho, z_t - l) * self.far_weight[far].ravel()))

    def near_sum(self, kernel: Kernel, r_t: float, z_t: float, near: np.ndarray, order: int) -> float:
        """Signed-triangle Duffy rule over the near cells, target at every apex."""
        idx = np.flatnonzero(near)
        if idx.size == 0:
            return 0.0
        r0, r1, z0, z1 = self.r0[idx], self.r1[idx], self.z0[idx], self.z1[idx]
        # counter-clockwise corners, edges (c_k, c_{k+1})
        cr = np.stack([r0, r1, r1, r0], axis=1)
        cz = np.stack([z0, z0, z1, z1], axis=1)
        ar, az = cr - r_t, cz - z_t
        er, ez = np.roll(cr, -1, axis=1) - cr, np.roll(cz, -1, axis=1) - cz
        det = ar * ez - az * er
        area = ((r1 - r0) * (z1 - z0))[:, None]
        det = np.where(np.abs(det) > 1e-13 * area, det, 0.0)

        u, wu = _gauss01(order)
        uu, vv = np.meshgrid(u, u, indexing="ij")
        weight = np.outer(wu, wu).ravel() * uu.ravel()
        uu, vv = uu.ravel(), vv.ravel()

        shape = (idx.size, 4, uu.size)
        rho = r_t + uu * ar[..., None] + (uu * vv) * er[..., None]
        l = z_t + uu * az[..., None] + (uu * vv) * ez[..., None]
        live = np.broadcast_to((det != 0.0)[..., None], shape)
        rho_live, l_live = rho[live], l[live]

        a = (rho - r0[:, None, None]) / (r1 - r0)[:, None, None]
        b = (l - z0[:, None, None]) / (z1 - z0)[:, None, None]
        w = self.w[idx][:, None, :, None]
        omega = (
            w[..., 0, :] * (1.0 - a) * (1.0 - b)
            + w[..., 1, :] * a * (1.0 - b)
            + w[..., 2, :] * (1.0 - a) * b
            + w[..., 3, :] * a * b
        )
        integrand = np.zeros(shape)
        integrand[live] = kernel(r_t, rho_live, z_t - l_live) * omega[live] * rho_live
        return float(np.sum(integrand * weight * det[..., None]))


def _gamma_kernel(r: float, rho: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    return green_function_closed(r, rho, zeta)


def _ur_kernel(r: float, rho: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    return -green_function_dz_closed(r, rho, zeta)


def _convolve(
    omega: MeridianScalarField, target_grid: MeridianGrid, kernel: Kernel, spec: QuadratureSpec, label: str
) -> np.ndarray:
    if omega.quantity is not FieldQuantity.OMEGA_THETA:
        raise FieldDataError(f"reconstruction needs an omega_theta field, got {omega.quantity.value}")
    cells = _SourceCells(omega)
    out = np.zeros(target_grid.shape)
    if cells.count == 0:
        return out
    started = time.perf_counter()
    unresolved = 0
    for i, r_t in enumerate(target_grid.r_axis):
        if r_t == 0.0:
            continue
        for j, z_t in enumerate(target_grid.z_axis):
            d = cells.distance(r_t, z_t)
            near = d < NEAR_FACTOR * cells.diameter
            far_part = cells.far_sum(kernel, r_t, z_t, ~near)
            previous = cells.near_sum(kernel, r_t, z_t, near, NEAR_ORDERS[0])
            for order in NEAR_ORDERS[1:]:
                current = cells.near_sum(kernel, r_t, z_t, near, order)
                settled = abs(current - previous) <= max(spec.abs_tol, spec.rel_tol * abs(far_part + current))
                previous = current
                if settled:
                    break
            else:
                unresolved += 1
            out[i, j] = far_part + previous
    if unresolved:
        logger.warning("%s: near field at %d targets still moving at the highest order", label, unresolved)
    logger.debug(
        "%s: %d targets over %d active cells in %.2fs",
        label, out.size, cells.count, time.perf_counter() - started,
    )
    return out


def stream_from_vorticity(
    omega: MeridianScalarField, target_grid: MeridianGrid, spec: QuadratureSpec
) -> MeridianScalarField:
    """L_theta on ``target_grid`` from the Gamma convolution of omega_theta."""
    values = _convolve(omega, target_grid, _gamma_kernel, spec, "stream")
    return MeridianScalarField(
        target_grid.r_axis,
        target_grid.z_axis,
        values,
        FieldQuantity.L_THETA,
        provenance=_provenance("L_theta = Gamma * omega_theta", omega),
    )


def ur_from_vorticity(
    omega: MeridianScalarField, target_grid: MeridianGrid, spec: QuadratureSpec
) -> MeridianScalarField:
    """u_r on ``target_grid`` from the -dzGamma convolution of omega_theta."""
    values = _convolve(omega, target_grid, _ur_kernel, spec, "u_r")
    return MeridianScalarField(
        target_grid.r_axis,
        target_grid.z_axis,
        values,
        FieldQuantity.GENERIC,
        provenance=_provenance("u_r = -dzGamma * omega_theta", omega),
    )


def _provenance(what: str, source: MeridianScalarField) -> str:
    return f"{what}; source: {source.provenance}" if source.provenance else what


# --------------------------------------------------------------------------------------
# Grid differentiation
# --------------------------------------------------------------------------------------

def _is_uniform(coords: np.ndarray) -> bool:
    steps = np.diff(coords)
    return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))


def grid_derivative(values: np.ndarray, coords: np.ndarray, axis: int) -> np.ndarray:
    """d/dx along ``axis``; fourth order on uniform axes, second order otherwise."""
    n = coords.size
    if n < MIN_STENCIL_NODES:
        raise FieldDataError(f"need at least {MIN_STENCIL_NODES} nodes along the differentiated axis, got {n}")
    if not _is_uniform(coords):
        logger.warning("nonuniform axis: falling back to second-order differences")
        return np.gradient(values, coords, axis=axis, edge_order=2)

    f = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    h12 = 12.0 * (coords[1] - coords[0])
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / h12
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / h12
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / h12
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / h12
    return np.moveaxis(d, 0, axis)


def _one_over_r_dr_r(values: np.ndarray, r_axis: np.ndarray) -> np.ndarray:
    """(1/r) d/dr (r f); 2 df/dr on the axis, where f vanishes."""
    d = grid_derivative(r_axis[:, None] * values, r_axis, axis=0)
    out = np.empty_like(d)
    positive = r_axis > 0.0
    out[positive] = d[positive] / r_axis[positive][:, None]
    if not positive.all():
        out[~positive] = 2.0 * grid_derivative(values, r_axis, axis=0)[~positive]
    return out


def uz_from_stream(L: MeridianScalarField) -> MeridianScalarField:
    if L.quantity is not FieldQuantity.L_THETA:
        raise FieldDataError(f"u_z needs an L_theta field, got {L.quantity.value}")
    values = _one_over_r_dr_r(L.values, L.r_axis)
    return MeridianScalarField(
        L.r_axis, L.z_axis, values, FieldQuantity.GENERIC, provenance=_provenance("u_z = (1/r) dr(r L_theta)", L)
    )


def velocity_from_stream(L: MeridianScalarField) -> MeridianVelocityField:
    """(u_r, u_z) = (-dz L, (1/r) dr(r L)) on the grid of L."""
    if L.quantity is not FieldQuantity.L_THETA:
        raise FieldDataError(f"velocity needs an L_theta field, got {L.quantity.value}")
    u_r = -grid_derivative(L.values, L.z_axis, axis=1)
    if L.r_axis[0] == 0.0:
        u_r[0] = 0.0
    u_z = _one_over_r_dr_r(L.values, L.r_axis)
    return MeridianVelocityField(
        L.r_axis, L.z_axis, u_r, u_z, provenance=_provenance("grid curl of L_theta e_theta", L)
    )


def velocity_divergence(b: MeridianVelocityField) -> MeridianScalarField:
    """(1/r) dr(r u_r) + dz u_z, i.e. dr u_r + u_r / r + dz u_z."""
    div = _one_over_r_dr_r(b.u_r, b.r_axis) + grid_derivative(b.u_z, b.z_axis, axis=1)
    return MeridianScalarField(b.r_axis, b.z_axis, div, FieldQuantity.GENERIC, provenance="divergence")


def grid_rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(values))))


def sup_relative_error(field: MeridianScalarField, reference: MeridianScalarField) -> float:
    """max |field - reference| / max |reference| on a shared grid."""
    if not field.grid.same_as(reference.grid):
        raise FieldDataError("fields live on different grids")
    scale = reference.sup()
    diff = float(np.max(np.abs(field.values - reference.values), initial=0.0))
    if scale == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / scale


def velocity_sup_relative_errors(
    velocity: MeridianVelocityField, reference: MeridianVelocityField
) -> Tuple[float, float]:
    """Componentwise :func:`sup_relative_error` for (u_r, u_z)."""
    if not velocity.grid.same_as(reference.grid):
        raise FieldDataError("velocity fields live on different grids")
    return tuple(
        sup_relative_error(
            MeridianScalarField(velocity.r_axis, velocity.z_axis, mine),
            MeridianScalarField(reference.r_axis, reference.z_axis, theirs),
        )
        for mine, theirs in ((velocity.u_r, reference.u_r), (velocity.u_z, reference.u_z))
    )


# --------------------------------------------------------------------------------------
# Functionals
# --------------------------------------------------------------------------------------

def criterion_functionals(
    b: MeridianVelocityField, u_theta: MeridianScalarField, alpha: float, beta: float
) -> CriterionReport:
    """sup r |b| (1 + |ln r|)^{-beta} and sup r |u_theta| (1 + |ln r|)^{alpha} over r > 0."""
    if not b.grid.same_as(u_theta.grid):
        raise FieldDataError("velocity and swirl fields live on different grids")
    if not (math.isfinite(alpha) and 0.0 < alpha <= 1.0):
        raise ParameterRangeError("alpha", alpha, "(0, 1]")
    if not (math.isfinite(beta) and beta >= 0.0):
        raise ParameterRangeError("beta", beta, "[0, inf)")
    positive = b.r_axis > 0.0
    r = b.r_axis[positive][:, None]
    log_weight = 1.0 + np.abs(np.log(r))
    b_functional = r * b.magnitude()[positive] * log_weight ** -beta
    swirl_functional = r * np.abs(u_theta.values[positive]) * log_weight ** alpha
    return CriterionReport(
        alpha=alpha,
        beta=beta,
        sup_b_functional=float(np.max(b_functional, initial=0.0)),
        sup_utheta_functional=float(np.max(swirl_functional, initial=0.0)),
        hypothesis_window=0.0 <= beta < alpha / 6.0,
    )


def corollary_assumption_check(omega: MeridianScalarField, exponent: float) -> AssumptionReport:
    """sup over r > 0 of r^exponent |omega|; exponent 2 for the stream bound, 1 + delta for u_r."""
    if not (math.isfinite(exponent) and 1.0 <= exponent <= 2.0):
        raise ParameterRangeError("exponent", exponent, "[1, 2]")
    positive = omega.r_axis > 0.0
    if not positive.any():
        raise FieldDataError("grid has no r > 0 nodes")
    r = omega.r_axis[positive]
    weighted = r[:, None] ** exponent * np.abs(omega.values[positive])
    i, j = np.unravel_index(int(np.argmax(weighted)), weighted.shape)
    return AssumptionReport(
        exponent=exponent,
        sup_value=float(weighted[i, j]),
        r_at_sup=float(r[i]),
        z_at_sup=float(omega.z_axis[j]),
        r_min=float(r[0]),
    )


# --------------------------------------------------------------------------------------
# CSV files
# --------------------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return format(float(value), ".17g")


@contextmanager
def _writer(target: PathOrStream) -> Iterator[TextIO]:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            yield fh
    else:
        yield target


def _header(fh: TextIO, kind: str, quantity: str, provenance: str, shape: Tuple[int, int], stamp: bool) -> None:
    fh.write(f"# field: {kind}\n")
    fh.write(f"# quantity: {quantity}\n")
    fh.write(f"# provenance: {provenance}\n")
    fh.write(f"# nr: {shape[0]}\n")
    fh.write(f"# nz: {shape[1]}\n")
    if stamp:
        fh.write(f"# created: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")


def write_scalar_field_csv(field: MeridianScalarField, target: PathOrStream, *, stamp: bool = False) -> None:
    with _writer(target) as fh:
        _header(fh, "scalar", field.quantity.value, field.provenance, field.grid.shape, stamp)
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SCALAR_COLUMNS)
        for i, r in enumerate(field.r_axis):
            for j, z in enumerate(field.z_axis):
                out.writerow([_fmt(r), _fmt(z), _fmt(field.values[i, j])])


def write_velocity_field_csv(field: MeridianVelocityField, target: PathOrStream, *, stamp: bool = False) -> None:
    with _writer(target) as fh:
        _header(fh, "velocity", "velocity", field.provenance, field.grid.shape, stamp)
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(VELOCITY_COLUMNS)
        for i, r in enumerate(field.r_axis):
            for j, z in enumerate(field.z_axis):
                out.writerow([_fmt(r), _fmt(z), _fmt(field.u_r[i, j]), _fmt(field.u_z[i, j])])


@dataclass
class _ParsedGrid:
    meta: dict = dc_field(default_factory=dict)
    r_axis: Optional[np.ndarray] = None
    z_axis: Optional[np.ndarray] = None
    columns: List[np.ndarray] = dc_field(default_factory=list)


def _read_grid_csv(source: PathOrStream, columns: List[str]) -> _ParsedGrid:
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise FieldDataError(f"cannot read {source}: {exc}") from exc
    else:
        text = source.read()

    parsed = _ParsedGrid()
    header_seen = False
    rows: List[Tuple[int, List[float]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, _, value = stripped[1:].partition(":")
            parsed.meta[key.strip()] = value.strip()
            continue
        row = next(csv.reader(io.StringIO(line)))
        if not header_seen:
            if [c.strip() for c in row] != columns:
                raise FieldDataError(f"expected header {','.join(columns)}, got {','.join(row)}", lineno)
            header_seen = True
            continue
        if len(row) != len(columns):
            raise FieldDataError(f"expected {len(columns)} columns, got {len(row)}", lineno)
        try:
            numbers = [float(c) for c in row]
        except ValueError as exc:
            raise FieldDataError(f"not a number: {exc}", lineno) from exc
        if not all(math.isfinite(x) for x in numbers):
            raise FieldDataError("non-finite value", lineno)
        rows.append((lineno, numbers))

    if not header_seen:
        raise FieldDataError("missing header row")
    if not rows:
        raise FieldDataError("no data rows")

    first_r = rows[0][1][0]
    nz = 0
    while nz < len(rows) and rows[nz][1][0] == first_r:
        nz += 1
    if len(rows) % nz:
        raise FieldDataError(f"{len(rows)} rows do not form a rectilinear grid with {nz} z nodes", rows[-1][0])
    nr = len(rows) // nz
    z_axis = np.array([rows[k][1][1] for k in range(nz)])
    r_axis = np.array([rows[k * nz][1][0] for k in range(nr)])
    for k, (lineno, numbers) in enumerate(rows):
        if numbers[0] != r_axis[k // nz] or numbers[1] != z_axis[k % nz]:
            raise FieldDataError("rows are not r-major over a rectilinear grid", lineno)
    for key, expected in (("nr", nr), ("nz", nz)):
        declared = parsed.meta.get(key)
        if declared is not None and declared.isdigit() and int(declared) != expected:
            raise FieldDataError(f"header declares {key}={declared}, data has {expected}")

    data = np.array([numbers for _, numbers in rows])
    parsed.r_axis, parsed.z_axis = r_axis, z_axis
    parsed.columns = [data[:, c].reshape(nr, nz) for c in range(2, len(columns))]
    return parsed


def read_scalar_field_csv(source: PathOrStream) -> MeridianScalarField:
    parsed = _read_grid_csv(source, SCALAR_COLUMNS)
    raw_quantity = parsed.meta.get("quantity", FieldQuantity.GENERIC.value)
    try:
        quantity = FieldQuantity(raw_quantity)
    except ValueError as exc:
        raise FieldDataError(f"unknown quantity {raw_quantity!r}") from exc
    return MeridianScalarField(
        parsed.r_axis, parsed.z_axis, parsed.columns[0], quantity, parsed.meta.get("provenance", "")
    )


def read_velocity_field_csv(source: PathOrStream) -> MeridianVelocityField:
    parsed = _read_grid_csv(source, VELOCITY_COLUMNS)
    return MeridianVelocityField(
        parsed.r_axis, parsed.z_axis, parsed.columns[0], parsed.columns[1], parsed.meta.get("provenance", "")
    )


__all__ = [
    "MeridianGrid",
    "MeridianScalarField",
    "MeridianVelocityField",
    "uniform_axis",
    "geometric_axis",
    "symmetric_axis",
    "manufactured_stream",
    "manufactured_vorticity",
    "manufactured_velocity",
    "stream_from_vorticity",
    "ur_from_vorticity",
    "uz_from_stream",
    "velocity_from_stream",
    "velocity_divergence",
    "grid_derivative",
    "grid_rms",
    "sup_relative_error",
    "velocity_sup_relative_errors",
    "criterion_functionals",
    "corollary_assumption_check",
    "write_scalar_field_csv",
    "read_scalar_field_csv",
    "write_velocity_field_csv",
    "read_velocity_field_csv",
]
