"""Truncation studies for power-law vorticity envelopes.

omega_theta = rho^(-exponent), independent of z, on a box rho in [rho_min, rho_max],
|z| <= half_height, is pushed through the reconstruction and sampled:

  * exponent 2: sup_z |L_theta(r, .)| stays bounded and flat in r (on the whole
    half-plane it is identically 1), and barely moves when the box doubles.
  * exponent 1 + delta: sup_z |u_r(r, .)| decays like r^(-delta). The supremum sits
    at the box ends, so targets run up to |z| = half_height.
"""
from __future__ import annotations

import logging
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from src.models import FieldQuantity, IdentityReport, QuadratureSpec
from src.services import fields
from src.services.norms import check_delta, fit_exponent
from src.utils.settings import Settings

logger = logging.getLogger(__name__)

STREAM_TARGET_R = (1e-2, 5.0)
STREAM_TARGET_COUNT = 8
RADIAL_TARGET_R = (0.05, 0.1, 0.2, 0.4)
STREAM_TARGET_Z = (0.0, 0.1, 0.5, 1.0, 2.0)
STREAM_TARGET_Z_FRACTIONS = (0.5, 0.9)


class EnvelopeBox(BaseModel):
    """Truncation box and source-grid resolution."""

    rho_min: float = Field(1e-3, gt=0)
    rho_max: float = Field(10.0, gt=0)
    half_height: float = Field(10.0, gt=0)
    nodes_per_decade: int = Field(20, ge=4)
    z_inner: float = Field(1e-3, gt=0)
    z_nodes: int = Field(40, ge=4)

    def doubled(self) -> "EnvelopeBox":
        return self.model_copy(update={"rho_max": 2.0 * self.rho_max, "half_height": 2.0 * self.half_height})

    def r_axis(self) -> np.ndarray:
        decades = np.log10(self.rho_max / self.rho_min)
        return fields.geometric_axis(self.rho_min, self.rho_max, max(int(np.ceil(decades * self.nodes_per_decade)) + 1, 2))


class EnvelopeProfile(BaseModel):
    name: str
    exponent: float
    box: EnvelopeBox
    r_samples: List[float]
    z_samples: List[float] = Field(default_factory=list)
    sup_values: List[float]

    @property
    def spread(self) -> float:
        return max(self.sup_values) / min(self.sup_values)


def _centre_graded_axis(box: EnvelopeBox) -> np.ndarray:
    return fields.symmetric_axis(box.z_inner, box.half_height, box.z_nodes)


def _end_graded_axis(box: EnvelopeBox) -> np.ndarray:
    """Nodes on [-H, H], geometric toward both ends and uniform-ish through the middle."""
    steps = fields.geometric_axis(box.z_inner, box.half_height, box.z_nodes)
    upper = box.half_height - steps[::-1]
    upper = np.append(upper[upper > 0.0], box.half_height)
    return np.concatenate([-upper[::-1], [0.0], upper])


def envelope_vorticity(exponent: float, box: EnvelopeBox, z_axis: np.ndarray) -> fields.MeridianScalarField:
    grid = fields.MeridianGrid(box.r_axis(), z_axis)
    return fields.MeridianScalarField.from_function(
        lambda r, z: r ** -exponent,
        grid,
        FieldQuantity.OMEGA_THETA,
        provenance=f"envelope: rho^-{exponent:g} on rho in [{box.rho_min:g}, {box.rho_max:g}], |z| <= {box.half_height:g}",
    )


def _sup_over_z(values: np.ndarray) -> List[float]:
    return [float(v) for v in np.max(np.abs(values), axis=1)]


def stream_target_z(box: EnvelopeBox) -> np.ndarray:
    """Fixed heights below the box plus fractions of half_height; L is even in z."""
    heights = [z for z in STREAM_TARGET_Z if z < box.half_height]
    heights += [f * box.half_height for f in STREAM_TARGET_Z_FRACTIONS]
    return np.unique(np.asarray(heights, dtype=float))


def stream_profile(box: EnvelopeBox, spec: QuadratureSpec, r_targets: Sequence[float] = ()) -> EnvelopeProfile:
    """sup_z |L_theta| for omega = rho^-2 over :func:`stream_target_z`."""
    r_targets = list(r_targets) or list(fields.geometric_axis(*STREAM_TARGET_R, STREAM_TARGET_COUNT))
    omega = envelope_vorticity(2.0, box, _centre_graded_axis(box))
    z_targets = stream_target_z(box)
    target = fields.MeridianGrid(np.asarray(r_targets, dtype=float), z_targets)
    L = fields.stream_from_vorticity(omega, target, spec)
    sups = _sup_over_z(L.values)
    logger.info("stream envelope rho_max=%g H=%g: sup |L| in [%.4f, %.4f]", box.rho_max, box.half_height, min(sups), max(sups))
    return EnvelopeProfile(
        name="stream", exponent=2.0, box=box, r_samples=[float(r) for r in r_targets],
        z_samples=z_targets.tolist(), sup_values=sups,
    )


def radial_velocity_profile(
    delta: float, box: EnvelopeBox, spec: QuadratureSpec, r_targets: Sequence[float] = RADIAL_TARGET_R
) -> EnvelopeProfile:
    """sup_z |u_r| for omega = rho^-(1 + delta), targets up to the box ends."""
    delta = check_delta(delta)
    omega = envelope_vorticity(1.0 + delta, box, _end_graded_axis(box))
    H = box.half_height
    z_targets = np.array([0.0, 0.5 * H, 0.9 * H, H])
    target = fields.MeridianGrid(np.asarray(r_targets, dtype=float), z_targets)
    u_r = fields.ur_from_vorticity(omega, target, spec)
    sups = _sup_over_z(u_r.values)
    logger.info("radial envelope delta=%g: sup |u_r| %s", delta, ", ".join(f"{v:.4g}" for v in sups))
    return EnvelopeProfile(
        name="radial_velocity", exponent=1.0 + delta, box=box, r_samples=[float(r) for r in r_targets],
        z_samples=z_targets.tolist(), sup_values=sups,
    )


def _assumption_row(exponent: float, box: EnvelopeBox) -> IdentityReport:
    omega = envelope_vorticity(exponent, box, _centre_graded_axis(box))
    check = fields.corollary_assumption_check(omega, exponent)
    return IdentityReport.compare(
        "envelope_assumption", check.sup_value, 1.0, parameters={"exponent": exponent}, tolerance=1e-12
    )


def stream_bound_study(
    settings: Settings, spec: QuadratureSpec, box: EnvelopeBox = EnvelopeBox()
) -> Tuple[List[EnvelopeProfile], List[IdentityReport]]:
    """Flatness across r and stability under box doubling of sup |L_theta|."""
    base = stream_profile(box, spec)
    wide = stream_profile(box.doubled(), spec, base.r_samples)
    base_sup, wide_sup = max(base.sup_values), max(wide.sup_values)
    rows = [
        _assumption_row(2.0, box),
        IdentityReport.compare(
            "stream_envelope_spread",
            base.spread,
            1.0,
            parameters={"rho_max": box.rho_max, "half_height": box.half_height},
            tolerance=settings.gate_envelope_spread - 1.0,
        ),
        IdentityReport.compare(
            "stream_envelope_box_doubling",
            wide_sup,
            base_sup,
            parameters={"rho_max": box.rho_max, "half_height": box.half_height},
            tolerance=settings.gate_envelope_box,
        ),
    ]
    return [base, wide], rows


def radial_velocity_study(
    settings: Settings, spec: QuadratureSpec, delta: float = 0.5, box: EnvelopeBox = EnvelopeBox()
) -> Tuple[List[EnvelopeProfile], List[IdentityReport]]:
    """Fitted log-log slope of sup_z |u_r| against -delta."""
    profile = radial_velocity_profile(delta, box, spec)
    slope, _ = fit_exponent(profile.r_samples, profile.sup_values)
    rows = [
        _assumption_row(1.0 + delta, box),
        IdentityReport.compare(
            "radial_velocity_slope",
            slope,
            -delta,
            parameters={"delta": delta},
            scale=1.0,
            tolerance=settings.gate_envelope_slope,
        ),
    ]
    return [profile], rows
