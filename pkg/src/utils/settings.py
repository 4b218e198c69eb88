"""Runtime settings: gates and default sample sets.

Reads the real environment and a local ``.env`` (python-dotenv). CLI flags
override whatever is found here.
"""
from __future__ import annotations

import os
import logging
from typing import List

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

load_dotenv()


def parse_float_list(raw: str) -> List[float]:
    """'0.25, 1,4' -> [0.25, 1.0, 4.0]. Raises ValueError on junk."""
    out: List[float] = []
    for part in (raw or "").split(","):
        part = part.strip()
        if not part:
            continue
        out.append(float(part))
    return out


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning("ignoring invalid %s=%r", name, raw)
        return default


def _env_list(name: str, default: List[float]) -> List[float]:
    raw = os.getenv(name)
    if not raw:
        return list(default)
    try:
        return parse_float_list(raw)
    except ValueError:
        logger.warning("ignoring invalid %s=%r", name, raw)
        return list(default)


class Settings(BaseModel):
    """Numerical gates (pass/fail thresholds) and default parameter sets."""

    gate_bessel: float = Field(1e-8, gt=0)
    gate_first_moment: float = Field(1e-6, gt=0)
    gate_semigroup: float = Field(1e-4, gt=0)
    gate_oracle: float = Field(1e-6, gt=0)
    gate_scaling: float = Field(1e-8, gt=0)
    gate_axial: float = Field(1e-6, gt=0)
    gate_exponent_lp: float = Field(1e-3, gt=0)
    gate_exponent_l2: float = Field(1e-3, gt=0)
    gate_exponent_dz: float = Field(5e-3, gt=0)
    gate_ratio_deviation: float = Field(2e-3, gt=0)
    gate_ratio_deviation_dz: float = Field(5e-3, gt=0)
    gate_roundtrip: float = Field(1e-3, gt=0)
    gate_envelope_spread: float = Field(2.0, gt=1)
    gate_envelope_box: float = Field(0.1, gt=0)
    gate_envelope_slope: float = Field(0.05, gt=0)

    r_samples: List[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0, 4.0])
    p_values: List[float] = Field(default_factory=lambda: [1.0, 1.5, 1.9])
    delta_values: List[float] = Field(default_factory=lambda: [0.0, 0.5, 0.9])
    identity_parameters: List[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0, 2.0, 4.0, 10.0])

    @classmethod
    def from_env(cls) -> "Settings":
        base = cls()
        return cls(
            gate_bessel=_env_float("AXIKERNEL_GATE_BESSEL", base.gate_bessel),
            gate_first_moment=_env_float("AXIKERNEL_GATE_FIRST_MOMENT", base.gate_first_moment),
            gate_semigroup=_env_float("AXIKERNEL_GATE_SEMIGROUP", base.gate_semigroup),
            gate_oracle=_env_float("AXIKERNEL_GATE_ORACLE", base.gate_oracle),
            gate_scaling=_env_float("AXIKERNEL_GATE_SCALING", base.gate_scaling),
            gate_axial=_env_float("AXIKERNEL_GATE_AXIAL", base.gate_axial),
            gate_exponent_lp=_env_float("AXIKERNEL_GATE_EXPONENT_LP", base.gate_exponent_lp),
            gate_exponent_l2=_env_float("AXIKERNEL_GATE_EXPONENT_L2", base.gate_exponent_l2),
            gate_exponent_dz=_env_float("AXIKERNEL_GATE_EXPONENT_DZ", base.gate_exponent_dz),
            gate_ratio_deviation=_env_float("AXIKERNEL_GATE_RATIO", base.gate_ratio_deviation),
            gate_ratio_deviation_dz=_env_float("AXIKERNEL_GATE_RATIO_DZ", base.gate_ratio_deviation_dz),
            gate_roundtrip=_env_float("AXIKERNEL_GATE_ROUNDTRIP", base.gate_roundtrip),
            gate_envelope_spread=_env_float("AXIKERNEL_GATE_ENVELOPE_SPREAD", base.gate_envelope_spread),
            gate_envelope_box=_env_float("AXIKERNEL_GATE_ENVELOPE_BOX", base.gate_envelope_box),
            gate_envelope_slope=_env_float("AXIKERNEL_GATE_ENVELOPE_SLOPE", base.gate_envelope_slope),
            r_samples=_env_list("AXIKERNEL_R_SAMPLES", base.r_samples),
            p_values=_env_list("AXIKERNEL_P_VALUES", base.p_values),
            delta_values=_env_list("AXIKERNEL_DELTA_VALUES", base.delta_values),
        )
