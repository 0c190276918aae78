"""Test fixtures."""

import json
import math

import pytest

from gaussent.config import get_settings
from gaussent.services.gaussian_core import CovarianceMatrix, thermal_squeezed, tmsv


@pytest.fixture(autouse=True)
def fresh_settings():
    """Environment overrides in one test must not leak into the next."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def tmsv_r1() -> CovarianceMatrix:
    return tmsv(1.0)


@pytest.fixture
def pure_sgs() -> CovarianceMatrix:
    """n = 1 on the lower curve: η1 = -1/3, m_c = √2, exactly pure."""
    return thermal_squeezed(1.0, math.sqrt(2.0))


@pytest.fixture
def counterexample() -> CovarianceMatrix:
    """Symmetric state with both m_s and m_c: breaks the single-term relations."""
    return CovarianceMatrix(n1=1.0, n2=1.0, ms=0.5, mc=0.3)


@pytest.fixture
def write_json(tmp_path):
    def _write(name: str, data) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write
