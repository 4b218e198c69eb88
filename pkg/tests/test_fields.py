import math
from unittest.mock import Mock

import numpy as np
import pytest
from scipy.interpolate import RegularGridInterpolator

from src.models import FieldQuantity, HalfPlanePoint, QuadratureSpec
from src.services import fields, kernel
from src.services.quadrature import integrate_2d_halfplane
from src.utils.errors import FieldDataError, ParameterRangeError


def _manufactured(quantity, fn, r_axis, z_axis):
    grid = fields.MeridianGrid(r_axis, z_axis)
    return fields.MeridianScalarField.from_function(fn, grid, quantity, provenance="test")


@pytest.fixture(scope="module")
def fine_stream():
    return _manufactured(
        FieldQuantity.L_THETA,
        fields.manufactured_stream,
        fields.uniform_axis(0.0, 3.0, 301),
        fields.uniform_axis(-3.0, 3.0, 601),
    )


# --------------------------------------------------------------------------------------
# Grids and containers
# --------------------------------------------------------------------------------------

@pytest.mark.unit
def test_grid_parse():
    grid = fields.MeridianGrid.parse("0:2:5,-1:1:9")
    assert grid.shape == (5, 9)
    assert grid.r_axis[-1] == 2.0 and grid.z_axis[0] == -1.0


@pytest.mark.unit
@pytest.mark.parametrize("text", ["0:2:5", "0:2,-1:1:9", "-1:2:5,-1:1:9", "0:2:1,-1:1:9", "a:b:c,d:e:f"])
def test_grid_parse_rejects(text):
    with pytest.raises(FieldDataError):
        fields.MeridianGrid.parse(text)


@pytest.mark.unit
def test_axes_must_increase():
    with pytest.raises(FieldDataError):
        fields.MeridianGrid([0.0, 1.0, 0.5], [0.0, 1.0])


@pytest.mark.unit
def test_omega_must_vanish_on_axis():
    r = np.array([0.0, 0.5, 1.0])
    z = np.array([-1.0, 0.0, 1.0])
    values = np.ones((3, 3))
    with pytest.raises(FieldDataError):
        fields.MeridianScalarField(r, z, values, FieldQuantity.OMEGA_THETA)
    # a generic field may be anything on the axis
    assert fields.MeridianScalarField(r, z, values).sup() == 1.0


@pytest.mark.unit
def test_values_shape_and_finiteness():
    r, z = np.array([0.5, 1.0]), np.array([0.0, 1.0])
    with pytest.raises(FieldDataError):
        fields.MeridianScalarField(r, z, np.ones((3, 2)))
    with pytest.raises(FieldDataError):
        fields.MeridianScalarField(r, z, np.array([[1.0, np.nan], [0.0, 0.0]]))


@pytest.mark.unit
def test_velocity_ur_must_vanish_on_axis():
    r, z = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    with pytest.raises(FieldDataError):
        fields.MeridianVelocityField(r, z, np.ones((2, 2)), np.zeros((2, 2)))


@pytest.mark.unit
def test_symmetric_axis():
    axis = fields.symmetric_axis(1e-3, 10.0, 4)
    assert axis.size == 9
    assert axis[4] == 0.0
    np.testing.assert_allclose(axis[:4], -axis[5:][::-1])


# --------------------------------------------------------------------------------------
# Manufactured solution and grid calculus
# --------------------------------------------------------------------------------------

@pytest.mark.unit
def test_manufactured_vorticity_is_operator_of_stream():
    r, z, h = 0.7, -0.4, 1e-4
    L = fields.manufactured_stream
    lap = (
        (L(r + h, z) - 2 * L(r, z) + L(r - h, z)) / h ** 2
        + (L(r + h, z) - L(r - h, z)) / (2 * h * r)
        + (L(r, z + h) - 2 * L(r, z) + L(r, z - h)) / h ** 2
        - L(r, z) / r ** 2
    )
    assert fields.manufactured_vorticity(r, z) == pytest.approx(-lap, rel=1e-6)


@pytest.mark.unit
def test_grid_derivative_fourth_order():
    x = fields.uniform_axis(0.0, 1.0, 101)
    values = np.sin(3.0 * x)[None, :].repeat(2, axis=0)
    d = fields.grid_derivative(values, x, axis=1)
    np.testing.assert_allclose(d[0], 3.0 * np.cos(3.0 * x), atol=1e-6)


@pytest.mark.unit
def test_grid_derivative_needs_five_nodes():
    x = fields.uniform_axis(0.0, 1.0, 4)
    with pytest.raises(FieldDataError):
        fields.grid_derivative(np.zeros((4, 3)), x, axis=0)


@pytest.mark.unit
def test_grid_derivative_nonuniform_fallback():
    x = fields.geometric_axis(0.1, 2.0, 200)
    d = fields.grid_derivative(x ** 2, x, axis=0)
    np.testing.assert_allclose(d, 2.0 * x, rtol=1e-9, atol=1e-9)


@pytest.mark.unit
def test_velocity_from_stream_matches_closed_form(fine_stream):
    velocity = fields.velocity_from_stream(fine_stream)
    rr, zz = fine_stream.grid.mesh()
    u_r, u_z = fields.manufactured_velocity(rr, zz)
    assert np.max(np.abs(velocity.u_r - u_r)) < 1e-5
    assert np.max(np.abs(velocity.u_z - u_z)) < 1e-5


@pytest.mark.unit
def test_divergence_of_curl_vanishes(fine_stream):
    velocity = fields.velocity_from_stream(fine_stream)
    div = fields.velocity_divergence(velocity)
    scale = float(np.max(velocity.magnitude()))
    assert fields.grid_rms(div.values) <= 1e-8 * scale


@pytest.mark.unit
def test_uz_from_stream_requires_stream():
    grid = fields.MeridianGrid(fields.uniform_axis(0.0, 1.0, 6), fields.uniform_axis(0.0, 1.0, 6))
    field = fields.MeridianScalarField.from_function(fields.manufactured_stream, grid, FieldQuantity.GENERIC)
    with pytest.raises(FieldDataError):
        fields.uz_from_stream(field)


# --------------------------------------------------------------------------------------
# Reconstruction
# --------------------------------------------------------------------------------------

ROUNDTRIP_QUAD = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-12, truncation_drop=1e-14)
# r spacing 0.05 on multiples of the source spacing; u_z is an r-derivative of L
ROUNDTRIP_TARGET = fields.MeridianGrid(fields.uniform_axis(0.1, 3.0, 59), fields.uniform_axis(-3.0, 3.0, 7))
DIVERGENCE_PATCH = fields.MeridianGrid(fields.uniform_axis(0.6, 1.2, 13), fields.uniform_axis(-0.3, 0.3, 13))
SMALL_TARGET = fields.MeridianGrid(fields.uniform_axis(0.0, 2.0, 5), np.array([-1.0, -0.5, 0.0, 0.5, 1.0]))


@pytest.fixture(scope="module")
def source_omega():
    return _manufactured(
        FieldQuantity.OMEGA_THETA,
        fields.manufactured_vorticity,
        fields.uniform_axis(0.0, 4.0, 161),
        fields.uniform_axis(-4.0, 4.0, 321),
    )


@pytest.fixture(scope="module")
def roundtrip(source_omega):
    L = fields.stream_from_vorticity(source_omega, ROUNDTRIP_TARGET, ROUNDTRIP_QUAD)
    u_r = fields.ur_from_vorticity(source_omega, ROUNDTRIP_TARGET, ROUNDTRIP_QUAD)
    return L, u_r


def _small_source(fn):
    # mirror-exact z axis
    half = np.linspace(0.0, 3.0, 31)
    return _manufactured(FieldQuantity.OMEGA_THETA, fn, np.linspace(0.0, 3.0, 31), np.concatenate([-half[:0:-1], half]))


def _tilted_vorticity(r, z):
    return r * (1.0 + z) * np.exp(-(r * r + (z - 0.5) ** 2))


@pytest.mark.slow
def test_stream_roundtrip(roundtrip):
    L, _ = roundtrip
    assert L.quantity is FieldQuantity.L_THETA
    exact = fields.MeridianScalarField.from_function(fields.manufactured_stream, ROUNDTRIP_TARGET, FieldQuantity.L_THETA)
    error = fields.sup_relative_error(L, exact)
    assert error < 1e-3, f"L sup relative error {error:.3e}"


@pytest.mark.slow
def test_ur_roundtrip(roundtrip):
    _, u_r = roundtrip
    exact, _ = fields.manufactured_velocity(*ROUNDTRIP_TARGET.mesh())
    error = np.max(np.abs(u_r.values - exact)) / np.max(np.abs(exact))
    assert error < 1e-3, f"u_r sup relative error {error:.3e}"


@pytest.mark.slow
def test_uz_roundtrip(roundtrip):
    L, _ = roundtrip
    u_z = fields.uz_from_stream(L)
    _, exact = fields.manufactured_velocity(*ROUNDTRIP_TARGET.mesh())
    error = np.max(np.abs(u_z.values - exact)) / np.max(np.abs(exact))
    assert error < 1e-3, f"u_z sup relative error {error:.3e}"


@pytest.mark.slow
def test_reconstructed_velocity_is_divergence_free(source_omega):
    L = fields.stream_from_vorticity(source_omega, DIVERGENCE_PATCH, ROUNDTRIP_QUAD)
    u_r = fields.ur_from_vorticity(source_omega, DIVERGENCE_PATCH, ROUNDTRIP_QUAD)
    b = fields.MeridianVelocityField(L.r_axis, L.z_axis, u_r.values, fields.uz_from_stream(L).values)
    rms = fields.grid_rms(fields.velocity_divergence(b).values)
    assert rms <= 1e-4, f"divergence rms {rms:.3e}"


@pytest.mark.unit
def test_reconstruction_is_linear(quad):
    first = _small_source(fields.manufactured_vorticity)
    second = _small_source(_tilted_vorticity)
    mixed = fields.MeridianScalarField(
        first.r_axis, first.z_axis, 2.0 * first.values - 3.0 * second.values, FieldQuantity.OMEGA_THETA
    )
    for reconstruct in (fields.stream_from_vorticity, fields.ur_from_vorticity):
        combined = reconstruct(mixed, SMALL_TARGET, quad).values
        parts = 2.0 * reconstruct(first, SMALL_TARGET, quad).values - 3.0 * reconstruct(second, SMALL_TARGET, quad).values
        scale = np.max(np.abs(parts))
        assert np.max(np.abs(combined - parts)) <= 1e-8 * scale, reconstruct.__name__


@pytest.mark.unit
def test_even_vorticity_gives_even_stream_and_odd_ur(quad):
    omega = _small_source(fields.manufactured_vorticity)
    L = fields.stream_from_vorticity(omega, SMALL_TARGET, quad).values
    u_r = fields.ur_from_vorticity(omega, SMALL_TARGET, quad).values
    assert np.all(L[0] == 0.0) and np.all(u_r[0] == 0.0)
    assert np.max(np.abs(L - L[:, ::-1])) <= 1e-8 * np.max(np.abs(L))
    assert np.max(np.abs(u_r + u_r[:, ::-1])) <= 1e-8 * np.max(np.abs(u_r))


@pytest.mark.unit
def test_unsettled_near_field_is_a_warning(monkeypatch, loose_quad):
    monkeypatch.setattr(fields._SourceCells, "near_sum", lambda self, kernel, r_t, z_t, near, order: float(order))
    log = Mock()
    monkeypatch.setattr(fields, "logger", log)
    omega = _manufactured(
        FieldQuantity.OMEGA_THETA, fields.manufactured_vorticity,
        fields.uniform_axis(0.0, 1.0, 5), fields.uniform_axis(-1.0, 1.0, 5),
    )
    target = fields.MeridianGrid(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5]))
    L = fields.stream_from_vorticity(omega, target, loose_quad)
    log.warning.assert_called_once()
    assert log.warning.call_args.args[2] == 4
    assert np.all(L.values[0] == 0.0)


@pytest.mark.unit
def test_reconstruction_needs_vorticity(loose_quad):
    grid = fields.MeridianGrid(fields.uniform_axis(0.0, 1.0, 3), fields.uniform_axis(0.0, 1.0, 3))
    stream = fields.MeridianScalarField.from_function(fields.manufactured_stream, grid, FieldQuantity.L_THETA)
    with pytest.raises(FieldDataError):
        fields.stream_from_vorticity(stream, grid, loose_quad)


@pytest.mark.unit
def test_zero_vorticity_gives_zero_stream(loose_quad):
    grid = fields.MeridianGrid(fields.uniform_axis(0.0, 1.0, 4), fields.uniform_axis(0.0, 1.0, 4))
    omega = fields.MeridianScalarField(grid.r_axis, grid.z_axis, np.zeros(grid.shape), FieldQuantity.OMEGA_THETA)
    L = fields.stream_from_vorticity(omega, grid, loose_quad)
    assert np.all(L.values == 0.0)


@pytest.mark.slow
def test_single_cell_against_direct_quadrature(loose_quad):
    # target on the corner of a plateau cell: the Duffy near field handles the log singularity
    r_axis = np.array([0.0, 1.0, 1.2, 3.0])
    z_axis = np.array([-1.0, 0.0, 0.2, 1.0])
    values = np.zeros((4, 4))
    values[1, 1] = 1.0
    values[2, 1] = 1.0
    values[1, 2] = 1.0
    values[2, 2] = 1.0
    omega = fields.MeridianScalarField(r_axis, z_axis, values, FieldQuantity.OMEGA_THETA)
    target = fields.MeridianGrid(np.array([1.0]), np.array([0.0]))
    L = fields.stream_from_vorticity(omega, target, loose_quad).values[0, 0]

    bilinear = RegularGridInterpolator((r_axis, z_axis), values, bounds_error=False, fill_value=0.0)

    def integrand(rho, l):
        pts = np.stack([rho, l], axis=-1)
        return kernel.green_function_closed(1.0, rho, -l) * bilinear(pts) * rho

    direct = integrate_2d_halfplane(integrand, loose_quad, singular_at=HalfPlanePoint(1.0, 0.0))
    assert L > 0.0
    assert L == pytest.approx(direct.value, rel=1e-4), f"cells {L!r} vs direct {direct.value!r}"


# --------------------------------------------------------------------------------------
# Functionals
# --------------------------------------------------------------------------------------

@pytest.mark.unit
def test_corollary_assumption_on_inverse_square():
    r_axis = fields.geometric_axis(1e-3, 10.0, 40)
    z_axis = fields.symmetric_axis(1e-3, 10.0, 20)
    rr, zz = np.meshgrid(r_axis, z_axis, indexing="ij")
    omega = fields.MeridianScalarField(r_axis, z_axis, 1.0 / (rr * rr + zz * zz), FieldQuantity.GENERIC)
    report = fields.corollary_assumption_check(omega, 2.0)
    assert report.sup_value == pytest.approx(1.0, rel=1e-12)
    assert report.z_at_sup == 0.0
    assert report.r_min == pytest.approx(1e-3)


@pytest.mark.unit
def test_corollary_assumption_exponent_range():
    grid = fields.MeridianGrid([0.5, 1.0], [0.0, 1.0])
    omega = fields.MeridianScalarField(grid.r_axis, grid.z_axis, np.ones(grid.shape))
    with pytest.raises(ParameterRangeError):
        fields.corollary_assumption_check(omega, 2.5)


@pytest.mark.unit
def test_criterion_functionals():
    r_axis = np.array([0.0, 0.5, 1.0, 2.0])
    z_axis = np.array([-1.0, 0.0, 1.0])
    shape = (4, 3)
    b = fields.MeridianVelocityField(r_axis, z_axis, np.zeros(shape), np.ones(shape))
    swirl = fields.MeridianScalarField(r_axis, z_axis, np.ones(shape))
    report = fields.criterion_functionals(b, swirl, alpha=1.0, beta=0.0)
    assert report.sup_b_functional == pytest.approx(2.0)
    assert report.sup_utheta_functional == pytest.approx(2.0 * (1.0 + math.log(2.0)))
    assert report.hypothesis_window
    assert not fields.criterion_functionals(b, swirl, alpha=0.6, beta=0.2).hypothesis_window
    with pytest.raises(ParameterRangeError):
        fields.criterion_functionals(b, swirl, alpha=0.0, beta=0.0)
    with pytest.raises(ParameterRangeError):
        fields.criterion_functionals(b, swirl, alpha=0.5, beta=-1.0)


@pytest.mark.unit
def test_sup_relative_error_needs_same_grid():
    a = fields.MeridianScalarField([0.5, 1.0], [0.0, 1.0], np.ones((2, 2)))
    b = fields.MeridianScalarField([0.5, 1.5], [0.0, 1.0], np.ones((2, 2)))
    with pytest.raises(FieldDataError):
        fields.sup_relative_error(a, b)
    assert fields.sup_relative_error(a, a) == 0.0
