import numpy as np
import pytest

from src.analysis import envelope_studies as env
from src.models import FieldQuantity
from src.services import fields
from src.utils.errors import ParameterRangeError
from src.utils.settings import Settings

COARSE = env.EnvelopeBox(nodes_per_decade=10, z_nodes=20)


@pytest.mark.unit
def test_box_doubling_keeps_resolution():
    wide = COARSE.doubled()
    assert (wide.rho_max, wide.half_height) == (20.0, 20.0)
    assert wide.rho_min == COARSE.rho_min and wide.nodes_per_decade == COARSE.nodes_per_decade
    assert wide.r_axis().size > COARSE.r_axis().size


@pytest.mark.unit
def test_end_graded_axis():
    z = env._end_graded_axis(COARSE)
    assert z[0] == -COARSE.half_height and z[-1] == COARSE.half_height
    assert np.all(np.diff(z) > 0.0)
    assert z[-1] - z[-2] == pytest.approx(COARSE.z_inner)
    assert np.allclose(z, -z[::-1])


@pytest.mark.unit
def test_envelope_vorticity_matches_power_law():
    omega = env.envelope_vorticity(1.5, COARSE, env._centre_graded_axis(COARSE))
    assert omega.values[0, 0] == pytest.approx(COARSE.rho_min ** -1.5)
    assert np.allclose(omega.values[:, 0], omega.values[:, -1])


@pytest.mark.unit
def test_radial_study_rejects_delta_one(quad):
    with pytest.raises(ParameterRangeError):
        env.radial_velocity_profile(1.0, COARSE, quad)


@pytest.mark.unit
def test_stream_target_heights():
    z = env.stream_target_z(COARSE)
    assert z == pytest.approx([0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 9.0])
    short = env.EnvelopeBox(half_height=1.5, nodes_per_decade=10, z_nodes=20)
    assert env.stream_target_z(short) == pytest.approx([0.0, 0.1, 0.5, 0.75, 1.0, 1.35])


@pytest.mark.unit
def test_stream_profile_catches_off_plane_peak(monkeypatch, quad):
    def peaked_at_one(omega, target, spec):
        rr, zz = target.mesh()
        return fields.MeridianScalarField(
            target.r_axis, target.z_axis, np.exp(-(zz - 1.0) ** 2) + 0.0 * rr, FieldQuantity.L_THETA
        )

    monkeypatch.setattr(env.fields, "stream_from_vorticity", peaked_at_one)
    profile = env.stream_profile(COARSE, quad, r_targets=[0.1, 1.0])
    assert profile.sup_values == [1.0, 1.0]
    assert 1.0 in profile.z_samples


@pytest.mark.slow
def test_stream_envelope_is_flat_and_box_stable(loose_quad):
    profiles, rows = env.stream_bound_study(Settings(), loose_quad, COARSE)
    base, wide = profiles
    # identically 1 on the whole half-plane; truncation only removes mass
    assert all(0.0 < v < 1.1 for v in base.sup_values), base.sup_values
    assert max(wide.sup_values) == pytest.approx(max(base.sup_values), rel=0.05)
    failed = [(r.name, r.lhs, r.rhs) for r in rows if not r.passed]
    assert not failed, f"envelope gates failed: {failed}"


@pytest.mark.slow
def test_radial_velocity_decays_like_r_to_minus_delta(loose_quad):
    profiles, rows = env.radial_velocity_study(Settings(), loose_quad, 0.5, COARSE)
    values = profiles[0].sup_values
    assert values == sorted(values, reverse=True), values
    slope = rows[-1].lhs
    assert slope == pytest.approx(-0.5, abs=0.05), f"fitted slope {slope:.4f}"
