import numpy as np
import pytest

from spacethread import (catalog_lookup, covariant_derivative_spatial, covariant_derivative_time,
                         curvature, curvature_bundle, eval_sample, geometry, levi_civita_table,
                         random_quadratic, sample_points, spatial_connection)
from spacethread import oracle4d as o
from spacethread.connection import skew_ricci_residual, weyl_e_residual

from conftest import CATALOG_CASES, catalog_points
from reference_values import KN_POINT, KN_RICCI_00


def _quadratic_points(seed, count):
    spec = random_quadratic(seed)
    return spec, sample_points(spec, [(-1, 1)] * 4, count, seed=seed)


def test_spatial_connection_symmetric_and_flat_limit(kn):
    c = spatial_connection(kn, KN_POINT)
    assert np.array_equal(c.gamma_space, np.swapaxes(c.gamma_space, 1, 2))
    flat = spatial_connection(catalog_lookup("minkowski"), [0, 1, 2, 3])
    assert np.all(flat.gamma_space == 0) and np.all(flat.gamma_time == 0)


def test_static_connection_is_christoffel_of_h(schwarzschild):
    c = spatial_connection(schwarzschild, [0.0, 5.0, 1.0, 0.0])
    # h11 = 1/(1 - 2/r), h22 = r^2: Gamma^1_22 = -(1 - 2/r) r
    assert np.isclose(c.gamma_space[0, 1, 1], -(1 - 2 / 5) * 5, rtol=1e-14)
    assert np.all(c.gamma_time == 0.0)


@pytest.mark.parametrize("case", ["kn", "quadratic", "flrw"])
def test_levi_civita_table_matches_oracle(case):
    if case == "kn":
        spec, pts = catalog_points("kerr_newman", {"m": 1.0, "a": 0.5, "e": 0.3}, 10)
    elif case == "flrw":
        spec, pts = catalog_points("flrw", {"scale": "(mul x0 x0)", "k": 0.5}, 10)
    else:
        spec, pts = _quadratic_points(7, 10)
    for p in pts:
        C = levi_civita_table(spec, p)
        ref = o.frame_connection(spec, p)
        assert np.max(np.abs(C - ref)) <= 1e-9 * max(1.0, np.max(np.abs(ref)))


@pytest.mark.parametrize("seed", [0, 1])
def test_metricity(seed):
    spec, pts = _quadratic_points(seed, 5)
    for p in pts:
        for name in ("h", "h_up"):
            assert np.max(np.abs(covariant_derivative_spatial(name, spec, p))) < 1e-10
            assert np.max(np.abs(covariant_derivative_time(name, spec, p))) < 1e-10


def test_raising_commutes_with_covariant_derivative():
    spec, pts = _quadratic_points(3, 3)
    for p in pts:
        g = geometry(spec, p)
        dw = covariant_derivative_spatial("omega", spec, p)  # [i, h, k] = omega_ih|k
        dmixed = covariant_derivative_spatial("omega_mixed", spec, p)  # [i, j, k] = omega_i^j|k
        raised = np.einsum("jh,hik->ijk", g.hinv.v, dw)
        assert np.allclose(dmixed, raised, atol=1e-12)
        dt = covariant_derivative_time("omega", spec, p)
        dtm = covariant_derivative_time("omega_mixed", spec, p)
        assert np.allclose(dtm, np.einsum("jh,hi->ij", g.hinv.v, dt), atol=1e-12)


def test_callable_field_matches_builtin():
    spec, pts = _quadratic_points(2, 2)
    for p in pts:
        def b_field(q):
            return geometry(spec, q, order=1).b.v
        a = covariant_derivative_spatial(b_field, spec, p)
        ref = covariant_derivative_spatial("b", spec, p)
        assert np.allclose(a, ref, atol=1e-8)


def test_scalar_covariant_derivative_is_frame_derivative(kn):
    g = geometry(kn, KN_POINT)
    d = covariant_derivative_spatial("phi_sq", kn, KN_POINT)
    assert np.allclose(d, 2 * g.phi2.v * g.c.v)


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_curvature_matches_oracle(name, params):
    spec, pts = catalog_points(name, params, 10, seed=21)
    for p in pts:
        cv = curvature(spec, p)
        Rf = o.project_riemann(spec, p)
        scale = max(1.0, np.max(np.abs(Rf)))
        assert np.max(np.abs(cv.r_ssss - Rf[1:, 1:, 1:, 1:])) <= 1e-9 * scale
        assert np.max(np.abs(cv.r_s0ss - Rf[1:, 0, 1:, 1:])) <= 1e-9 * scale
        assert np.max(np.abs(cv.r_s0s0_full - Rf[1:, 0, 1:, 0])) <= 1e-9 * scale


def test_curvature_matches_oracle_without_symmetry():
    spec, pts = _quadratic_points(11, 10)
    for p in pts:
        cv = curvature(spec, p)
        ref = o.project_ricci(spec, p)
        assert np.allclose(cv.ricci_ss, ref["ricci_ss"], atol=1e-12)
        assert np.allclose(cv.ricci_s0, ref["ricci_s0"], atol=1e-12)
        assert np.isclose(cv.ricci_00, ref["ricci_00"], atol=1e-12)
        assert np.isclose(cv.scalar_r, o.ricci4(spec, p)[1], atol=1e-12)
        byc = cv.ricci_by_contraction()
        assert np.allclose(byc["ricci_ss"], cv.ricci_ss, atol=1e-12)


def test_spatial_curvature_structure():
    spec, pts = _quadratic_points(5, 3)
    for p in pts:
        cv = curvature(spec, p)
        Rs = cv.r_star
        assert np.allclose(Rs, -np.swapaxes(Rs, 2, 3), atol=1e-14)
        # the skew part of the contracted spatial curvature is not zero here
        Rc = cv.r_star_contracted
        assert np.max(np.abs(Rc - Rc.T)) > 1e-6
        assert skew_ricci_residual(spec, p) < 1e-12
        assert weyl_e_residual(spec, p) < 1e-12
        assert np.allclose(cv.weyl_e, cv.weyl_e.T, atol=1e-12)


def test_kerr_newman_stationary_shortcut(kn):
    cv = curvature(kn, KN_POINT)
    c, hinv, p = cv.c, cv.hinv, cv.phi2
    r00 = p * (c @ hinv @ c + cv.div_c + p * cv.omega_sq)
    assert np.isclose(r00, KN_RICCI_00, rtol=1e-10)
    forms = cv.stationary_forms()
    for key in ("ricci_ss", "ricci_s0", "r_ssss", "r_s0ss", "r_s0s0"):
        assert np.allclose(forms[key], getattr(cv, key), atol=1e-12)


def test_static_black_hole_forms():
    spec = catalog_lookup("reissner_nordstrom", m=1.0, e=0.4)
    cv = curvature(spec, [0.0, 4.0, 1.2, 0.3])
    assert np.all(cv.ricci_s0 == 0.0)
    assert np.isclose(cv.ricci_00, cv.phi2 * (cv.c @ cv.hinv @ cv.c + cv.div_c), rtol=1e-12)
    forms = cv.static_forms()
    assert np.allclose(forms["ricci_ss"], cv.ricci_ss, atol=1e-14)


def test_bundle_serializes(kn):
    d = curvature_bundle(kn, KN_POINT).to_dict()
    assert np.array(d["r_ssss"]).shape == (3, 3, 3, 3)
    assert np.array(d["r_s0ss"]).shape == (3, 3, 3)
    assert isinstance(d["ricci_00"], float)
