import logging

import pytest
from pydantic import ValidationError

from src.models import IdentityReport, QuadratureSpec
from src.utils.logger import configure_logging
from src.utils.settings import Settings, parse_float_list


@pytest.mark.unit
def test_defaults():
    settings = Settings.from_env()
    assert settings.gate_bessel == 1e-8
    assert settings.gate_oracle == 1e-6
    assert settings.r_samples == [0.25, 0.5, 1.0, 2.0, 4.0]


@pytest.mark.unit
def test_env_overrides(monkeypatch):
    monkeypatch.setenv("AXIKERNEL_GATE_ORACLE", "1e-7")
    monkeypatch.setenv("AXIKERNEL_R_SAMPLES", "1, 2,3")
    settings = Settings.from_env()
    assert settings.gate_oracle == 1e-7
    assert settings.r_samples == [1.0, 2.0, 3.0]


@pytest.mark.unit
def test_invalid_env_falls_back(monkeypatch):
    monkeypatch.setenv("AXIKERNEL_GATE_BESSEL", "tight")
    monkeypatch.setenv("AXIKERNEL_P_VALUES", "1,x")
    settings = Settings.from_env()
    assert settings.gate_bessel == 1e-8
    assert settings.p_values == [1.0, 1.5, 1.9]


@pytest.mark.unit
def test_gates_must_be_positive():
    with pytest.raises(ValidationError):
        Settings(gate_roundtrip=0.0)


@pytest.mark.unit
def test_parse_float_list():
    assert parse_float_list(" 0.25, 1,,4 ") == [0.25, 1.0, 4.0]
    assert parse_float_list("") == []
    with pytest.raises(ValueError):
        parse_float_list("1,two")


@pytest.mark.unit
def test_quadrature_spec_from_env(monkeypatch):
    monkeypatch.setenv("AXIKERNEL_TOL_REL", "1e-6")
    monkeypatch.setenv("AXIKERNEL_MAX_SUBDIVISIONS", "50")
    spec = QuadratureSpec.from_env()
    assert spec.rel_tol == 1e-6 and spec.max_subdivisions == 50
    assert QuadratureSpec.from_env(rel_tol=1e-8, abs_tol=None).rel_tol == 1e-8


@pytest.mark.unit
def test_quadrature_spec_validation():
    with pytest.raises(ValidationError):
        QuadratureSpec(rel_tol=1e-17)
    with pytest.raises(ValidationError):
        QuadratureSpec(abs_tol=0.0)
    spec = QuadratureSpec()
    with pytest.raises(ValidationError):
        spec.rel_tol = 1.0
    tighter = spec.tighter()
    assert tighter.rel_tol == pytest.approx(spec.rel_tol / 10.0)
    assert tighter.truncation_drop == spec.truncation_drop


@pytest.mark.unit
@pytest.mark.parametrize(
    "lhs, rhs, scale, rel",
    [(1.0, 1.0, None, 0.0), (1.5, 1.0, None, 0.5), (0.0, 0.0, None, 0.0), (1e-3, 0.0, None, float("inf")), (0.25, 0.0, 1.0, 0.25)],
)
def test_identity_report_compare(lhs, rhs, scale, rel):
    rep = IdentityReport.compare("x", lhs, rhs, scale=scale, tolerance=1.0)
    assert rep.rel_error == rel
    assert rep.passed is (rel <= 1.0)


@pytest.mark.unit
def test_configure_logging_is_idempotent(monkeypatch):
    monkeypatch.setenv("APP_DEBUG", "1")
    root = configure_logging()
    configure_logging()
    assert root.level == logging.DEBUG
    assert sum(1 for h in root.handlers if getattr(h, "_axikernel", False)) == 1
    assert configure_logging(debug=False).level == logging.INFO
