import os, sys
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import pytest

from src.models import QuadratureSpec


@pytest.fixture
def quad():
    """Default tolerances; what the CLI runs with."""
    return QuadratureSpec()


@pytest.fixture
def loose_quad():
    """Cheaper tolerances for the 2-D integrals."""
    return QuadratureSpec(rel_tol=1e-7, abs_tol=1e-12, truncation_drop=1e-14)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith("AXIKERNEL_"):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.delenv("APP_DEBUG", raising=False)
