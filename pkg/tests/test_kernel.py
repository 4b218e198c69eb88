import math

import numpy as np
import pytest
from scipy import special

from src.main import FIRST_MOMENT_POINTS, SEMIGROUP_TUPLES
from src.models import KernelArgs
from src.services import kernel
from src.utils.errors import DomainError, SingularityError


OFF_DIAGONAL = [
    (1.0, 1.0, 1.0),
    (0.5, 2.0, 0.0),
    (3.0, 0.7, -1.0),
    (1.0, 1.02, 0.01),
    (0.1, 5.0, 0.25),
]


@pytest.mark.unit
def test_kernel_args_validation():
    with pytest.raises(DomainError):
        KernelArgs(0.0, 1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        KernelArgs(1.0, -1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        KernelArgs(1.0, 1.0, 1.0, float("nan"))


@pytest.mark.unit
def test_heat_kernel_against_direct_formula():
    t, r, rho, zeta = 0.7, 1.3, 0.4, -0.2
    direct = (
        1.0 / (4.0 * math.sqrt(math.pi) * t ** 1.5)
        * math.exp(-(r * r + rho * rho + zeta * zeta) / (4.0 * t))
        * special.i1(r * rho / (2.0 * t))
    )
    assert kernel.heat_kernel(KernelArgs(t, r, rho, zeta)) == pytest.approx(direct, rel=1e-13)


@pytest.mark.unit
def test_heat_kernel_vanishes_on_axis_and_is_symmetric():
    assert kernel.heat_kernel(KernelArgs(1.0, 0.0, 2.0, 0.5)) == 0.0
    a = kernel.heat_kernel(KernelArgs(0.3, 0.8, 1.7, 0.4))
    b = kernel.heat_kernel(KernelArgs(0.3, 1.7, 0.8, -0.4))
    assert a == pytest.approx(b, rel=1e-14)


@pytest.mark.unit
def test_heat_kernel_no_overflow_for_small_t():
    g = kernel.heat_kernel(KernelArgs(1e-6, 1.0, 1.0, 0.0))
    assert math.isfinite(g) and g > 0.0


@pytest.mark.unit
def test_heat_kernel_dz_relation():
    args = KernelArgs(0.5, 1.0, 1.5, 0.8)
    assert kernel.heat_kernel_dz(args) == pytest.approx(-(0.8 / 1.0) * kernel.heat_kernel(args), rel=1e-14)


@pytest.mark.unit
def test_heat_kernel_dr_matches_difference_quotient():
    t, r, rho, zeta = 0.4, 1.1, 0.9, 0.3
    h = 1e-5
    fd = (
        kernel.heat_kernel(KernelArgs(t, r + h, rho, zeta)) - kernel.heat_kernel(KernelArgs(t, r - h, rho, zeta))
    ) / (2.0 * h)
    assert kernel.heat_kernel_dr(KernelArgs(t, r, rho, zeta)) == pytest.approx(fd, rel=1e-7)
    with pytest.raises(DomainError):
        kernel.heat_kernel_dr(KernelArgs(t, 0.0, rho, zeta))


def _sample(seed, n, t_range, r_range, zeta_range):
    rng = np.random.default_rng(seed)
    t = np.exp(rng.uniform(*np.log(t_range), n))
    r, rho = rng.uniform(*r_range, (2, n))
    zeta = rng.uniform(*zeta_range, n) * rng.choice([-1.0, 1.0], n)
    return t, r, rho, zeta


@pytest.mark.unit
def test_heat_kernel_sample_positive_symmetric_and_zero_on_axis():
    t, r, rho, zeta = _sample(0, 1000, (0.05, 5.0), (1e-3, 5.0), (0.0, 5.0))
    g = kernel.heat_kernel_array(t, r, rho, zeta)
    assert np.all(g > 0.0)
    np.testing.assert_allclose(kernel.heat_kernel_array(t, rho, r, zeta), g, rtol=1e-12, atol=0.0)
    assert np.all(kernel.heat_kernel_array(t, 0.0, rho, zeta) == 0.0)


@pytest.mark.unit
def test_green_function_sample_positive_symmetric_and_zero_on_axis():
    _, r, rho, zeta = _sample(1, 1000, (1.0, 2.0), (1e-3, 5.0), (1e-3, 5.0))
    gamma = kernel.green_function_closed(r, rho, zeta)
    assert np.all(gamma > 0.0)
    np.testing.assert_allclose(kernel.green_function_closed(rho, r, zeta), gamma, rtol=1e-12, atol=0.0)
    assert np.all(kernel.green_function_closed(np.zeros_like(rho), rho, zeta) == 0.0)


@pytest.mark.unit
def test_heat_kernel_derivatives_match_central_differences():
    t, r, rho, zeta = _sample(2, 50, (0.2, 2.0), (0.3, 3.0), (0.1, 2.0))
    h = 1e-5
    fd_z = (kernel.heat_kernel_array(t, r, rho, zeta + h) - kernel.heat_kernel_array(t, r, rho, zeta - h)) / (2.0 * h)
    fd_r = (kernel.heat_kernel_array(t, r + h, rho, zeta) - kernel.heat_kernel_array(t, r - h, rho, zeta)) / (2.0 * h)
    np.testing.assert_allclose(kernel.heat_kernel_dz_array(t, r, rho, zeta), fd_z, rtol=1e-6, atol=1e-10)
    np.testing.assert_allclose(kernel.heat_kernel_dr_array(t, r, rho, zeta), fd_r, rtol=1e-6, atol=1e-10)


@pytest.mark.unit
@pytest.mark.parametrize("point", [(1.0, 1.0, 1.0, 0.0), (0.1, 1.0, 2.0, 0.3), (1e-3, 1.0, 1.05, 0.0)])
def test_five_dimensional_lift(point, quad):
    args = KernelArgs(*point)
    lifted = kernel.heat_kernel_5d_lift(args, quad)
    assert lifted.converged
    assert lifted.value == pytest.approx(kernel.heat_kernel(args), rel=1e-8)


@pytest.mark.unit
@pytest.mark.parametrize("r, rho, zeta", OFF_DIAGONAL)
def test_three_routes_to_gamma_agree(r, rho, zeta, quad):
    by_time = kernel.green_function(r, rho, zeta, quad)
    by_ring = kernel.green_function_oracle(r, rho, zeta, quad)
    closed = kernel.green_function_closed(r, rho, zeta)
    assert by_time == pytest.approx(by_ring, rel=1e-7), f"({r},{rho},{zeta}) time {by_time!r} ring {by_ring!r}"
    assert closed == pytest.approx(by_ring, rel=1e-9), f"({r},{rho},{zeta}) closed {closed!r} ring {by_ring!r}"


@pytest.mark.unit
def test_gamma_reference_value(quad):
    assert kernel.green_function(1.0, 1.0, 1.0, quad) == pytest.approx(0.062576, abs=2e-6)


@pytest.mark.unit
@pytest.mark.parametrize("r, rho, zeta", OFF_DIAGONAL)
def test_dz_gamma_routes_agree(r, rho, zeta, quad):
    by_time = kernel.green_function_dz(r, rho, zeta, quad)
    closed = kernel.green_function_dz_closed(r, rho, zeta)
    if zeta == 0.0:
        assert by_time == 0.0 and closed == 0.0
    else:
        assert by_time == pytest.approx(closed, rel=1e-7)


@pytest.mark.unit
def test_dz_closed_matches_difference_quotient():
    r, rho, zeta, h = 1.2, 0.8, 0.35, 1e-6
    fd = (kernel.green_function_closed(r, rho, zeta + h) - kernel.green_function_closed(r, rho, zeta - h)) / (2 * h)
    assert kernel.green_function_dz_closed(r, rho, zeta) == pytest.approx(fd, rel=1e-6)


@pytest.mark.unit
def test_closed_form_branches_join():
    # m = 4 r rho / Q on either side of the switch point 1/2
    rho = 1.0
    zeta = np.array([math.sqrt(4.0 / 0.5 - 4.0) * (1 - 1e-9), math.sqrt(4.0 / 0.5 - 4.0) * (1 + 1e-9)])
    values = kernel.green_function_closed(1.0, rho, zeta)
    assert values[0] == pytest.approx(values[1], rel=1e-7)


@pytest.mark.unit
def test_closed_form_is_vectorized_and_homogeneous():
    rho = np.linspace(0.1, 3.0, 7)
    zeta = np.linspace(-2.0, 2.0, 7)
    g = kernel.green_function_closed(1.5, rho, zeta)
    assert isinstance(g, np.ndarray) and g.shape == (7,)
    lam = 3.0
    np.testing.assert_allclose(lam * kernel.green_function_closed(lam * 1.5, lam * rho, lam * zeta), g, rtol=1e-12)
    dz = kernel.green_function_dz_closed(1.5, rho, zeta)
    np.testing.assert_allclose(lam ** 2 * kernel.green_function_dz_closed(lam * 1.5, lam * rho, lam * zeta), dz, rtol=1e-12)


@pytest.mark.unit
def test_gamma_symmetry_and_positivity():
    g = kernel.green_function_closed(0.6, 1.9, 0.4)
    assert g > 0.0
    assert kernel.green_function_closed(1.9, 0.6, 0.4) == pytest.approx(g, rel=1e-14)
    assert kernel.green_function_closed(0.6, 1.9, -0.4) == pytest.approx(g, rel=1e-14)
    assert kernel.green_function_dz_closed(0.6, 1.9, -0.4) == pytest.approx(
        -kernel.green_function_dz_closed(0.6, 1.9, 0.4), rel=1e-14
    )


@pytest.mark.unit
def test_gamma_on_axis_is_zero(quad):
    assert kernel.green_function(0.0, 1.0, 0.5, quad) == 0.0
    assert kernel.green_function_closed(1.0, 0.0, 0.5) == 0.0


@pytest.mark.unit
def test_far_field_decay():
    # Gamma ~ r rho / (4 |x|^3) away from the source
    zeta = 1e3
    assert kernel.green_function_closed(1.0, 1.0, zeta) == pytest.approx(1.0 / (4.0 * zeta ** 3), rel=1e-5)


@pytest.mark.unit
def test_diagonal_is_singular(quad):
    with pytest.raises(SingularityError):
        kernel.green_function(1.0, 1.0, 0.0, quad)
    with pytest.raises(SingularityError):
        kernel.green_function_closed(np.array([1.0, 2.0]), np.array([0.5, 2.0]), 0.0)
    with pytest.raises(DomainError):
        kernel.green_function_oracle(-1.0, 1.0, 0.0, quad)


@pytest.mark.unit
def test_logarithmic_growth_near_diagonal():
    # rho Gamma ~ -(1/2pi) log(d) + O(1) near (r, 0)
    near = kernel.green_function_closed(1.0, 1.0, 1e-6)
    nearer = kernel.green_function_closed(1.0, 1.0, 1e-8)
    assert nearer - near == pytest.approx(math.log(100.0) / (2.0 * math.pi), rel=1e-4)


@pytest.mark.unit
@pytest.mark.parametrize("r, rho", [(1.0, 0.5), (1.0, 2.0), (0.3, 0.3)])
def test_axial_integral(r, rho, quad):
    rep = kernel.axial_integral_check(r, rho, quad, tolerance=1e-6)
    assert rep.passed, f"r={r} rho={rho}: {rep.lhs!r} vs {rep.rhs!r}"


@pytest.mark.unit
@pytest.mark.parametrize("lmbda", [0.5, 2.0, 4.0])
def test_scaling_check(lmbda, quad):
    reports = kernel.scaling_check(lmbda, 1.0, 1.0, 1.0, quad, tolerance=1e-8)
    assert [rep.name for rep in reports] == ["scaling_Gamma", "scaling_dzGamma"]
    assert all(rep.passed for rep in reports), [rep.rel_error for rep in reports]


@pytest.mark.slow
@pytest.mark.parametrize("t, r", FIRST_MOMENT_POINTS)
def test_first_moment(t, r, quad):
    rep = kernel.first_moment_check(t, r, quad, tolerance=1e-6)
    assert rep.passed, f"t={t} r={r}: integral {rep.lhs!r}"


@pytest.mark.slow
@pytest.mark.parametrize("s, t, r, rho_final, zeta", SEMIGROUP_TUPLES)
def test_semigroup(s, t, r, rho_final, zeta, loose_quad):
    rep = kernel.semigroup_check(s, t, r, rho_final, zeta, loose_quad, tolerance=1e-4)
    assert rep.passed, f"composition {rep.lhs!r} vs {rep.rhs!r}"


@pytest.mark.unit
def test_semigroup_on_axis_short_circuits(quad):
    rep = kernel.semigroup_check(1.0, 1.0, 0.0, 1.0, 0.0, quad, tolerance=1e-12)
    assert rep.passed and rep.lhs == 0.0 and rep.rhs == 0.0


@pytest.mark.unit
def test_singular_point():
    p = kernel.singular_point(2.5)
    assert (p.r, p.z) == (2.5, 0.0)
