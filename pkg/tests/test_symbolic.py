"""Cross-check against symbolic differentiation at random points."""

import importlib.util
from pathlib import Path

import numpy as np
import pytest

sp = pytest.importorskip("sympy")

from spacethread import geometry  # noqa: E402

from conftest import catalog_points  # noqa: E402


@pytest.fixture(scope="module")
def derive():
    path = Path(__file__).resolve().parents[1] / "tools" / "derive_oracles.py"
    spec = importlib.util.spec_from_file_location("derive_oracles", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_kerr_newman_threading_symbolic(derive):
    g = derive.kerr_newman_g(1, sp.Rational(1, 2), sp.Rational(3, 10))
    spec, pts = catalog_points("kerr_newman", {"m": 1.0, "a": 0.5, "e": 0.3}, 3, seed=13)
    for p in pts:
        ref = derive.threading(g, tuple(float(v) for v in p))
        ours = geometry(spec, p)
        assert np.isclose(ours.phi2.v, ref["phi2"], rtol=1e-12)
        assert np.allclose(ours.h.v, ref["h"], rtol=1e-12)
        assert np.allclose(ours.c.v, ref["c"], atol=1e-12)
        assert np.allclose(ours.omega.v, ref["omega"], atol=1e-12)
