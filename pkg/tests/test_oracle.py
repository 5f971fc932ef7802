import math

import numpy as np
import pytest

from spacethread import catalog_lookup, eval_sample, random_quadratic, sample_points
from spacethread import oracle4d as o

from conftest import CATALOG_CASES, catalog_points
from reference_values import (DESITTER_RICCI_00, KN_POINT, KN_RICCI_00, KN_RICCI_11,
                              KN_RICCI_22, KN_RICCI_30, KN_RICCI_33, RN_STATIC_RADIUS,
                              SCHW_CIRCULAR_OMEGA2_R6, SCHW_GAMMA1_00)


def test_minkowski_is_flat():
    spec = catalog_lookup("minkowski")
    p = [0.1, 0.2, 0.3, 0.4]
    assert np.all(o.christoffel4(spec, p) == 0.0)
    assert np.all(o.riemann4(spec, p) == 0.0)
    assert np.all(o.geodesic_rhs4(spec, p + [1, 0.2, 0.1, 0])[4:] == 0.0)


def test_schwarzschild_christoffel(schwarzschild):
    G = o.christoffel4(schwarzschild, [0, 4.0, 1.0, 0])
    assert np.isclose(G[1, 0, 0], SCHW_GAMMA1_00, rtol=1e-14)
    assert np.allclose(G, np.swapaxes(G, 1, 2))


def test_de_sitter_sign_convention():
    spec = catalog_lookup("flrw", scale="(exp x0)")
    p = [1.3, 0.4, 1.0, 0.2]
    ric, scalar = o.ricci4(spec, p)
    g = eval_sample(spec, p).g4()
    assert np.allclose(ric, 3.0 * g, rtol=1e-12)
    assert np.isclose(ric[0, 0], DESITTER_RICCI_00)
    assert np.isclose(scalar, 12.0)
    assert np.isclose(o.project_ricci(spec, p)["ricci_00"], DESITTER_RICCI_00, rtol=1e-12)


def test_kerr_newman_frame_ricci_reference(kn):
    R = o.project_ricci(kn, KN_POINT)
    assert np.isclose(R["ricci_00"], KN_RICCI_00, rtol=1e-10)
    assert np.allclose(np.diag(R["ricci_ss"]), [KN_RICCI_11, KN_RICCI_22, KN_RICCI_33], rtol=1e-10)
    assert np.allclose(R["ricci_s0"], [0.0, 0.0, KN_RICCI_30], rtol=1e-10, atol=1e-15)


def test_projection_is_identity_when_xi_vanishes(schwarzschild):
    p = [0.0, 5.0, 1.0, 0.0]
    ric, _ = o.ricci4(schwarzschild, p)
    R = o.project_ricci(schwarzschild, p, ricci4_out=ric)
    assert np.array_equal(R["ricci_ss"], ric[1:, 1:])


def test_kerr_is_vacuum(kerr):
    spec, pts = catalog_points("kerr", {"m": 1.0, "a": 0.5}, 20, seed=2)
    for p in pts:
        ric, scalar = o.ricci4(spec, p)
        assert np.max(np.abs(ric)) < 1e-8 and abs(scalar) < 1e-8


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_riemann_symmetries(name, params):
    spec, pts = catalog_points(name, params, 10, seed=9)
    for p in pts:
        R = o.riemann4_lowered(spec, p)
        scale = max(1.0, np.max(np.abs(R)))
        assert np.max(np.abs(R + np.swapaxes(R, 0, 1))) <= 1e-9 * scale
        assert np.max(np.abs(R + np.swapaxes(R, 2, 3))) <= 1e-9 * scale
        assert np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))) <= 1e-9 * scale
        bianchi = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
        assert np.max(np.abs(bianchi)) <= 1e-9 * scale
        ric, _ = o.ricci4(spec, p)
        raw = np.einsum("abad->bd", o.riemann4(spec, p))
        assert np.max(np.abs(raw - raw.T)) <= 1e-10 * max(1.0, np.max(np.abs(raw)))


def test_metric_inverse(kn):
    m = o.metric4(kn, KN_POINT)
    assert np.allclose(m.g4_up @ m.g4_lo, np.eye(4), atol=1e-12)
    assert np.sum(np.linalg.eigvalsh(m.g4_lo) < 0) == 1


def test_circular_orbit_has_no_radial_acceleration(schwarzschild):
    r = 6.0
    w = math.sqrt(SCHW_CIRCULAR_OMEGA2_R6)
    state = [0.0, r, math.pi / 2, 0.0, 1.0, 0.0, 0.0, w]
    acc = o.geodesic_rhs4(schwarzschild, state)[4:]
    assert abs(acc[1]) < 1e-15


def test_static_observer_on_geodesic_locus():
    # with e > m there is no horizon and r = e^2/m lies in the static region
    spec = catalog_lookup("reissner_nordstrom", m=1.0, e=1.5)
    acc = o.geodesic_rhs4(spec, [0.0, RN_STATIC_RADIUS, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0])[4:]
    assert np.allclose(acc[1:], 0.0, atol=1e-15)
    acc = o.geodesic_rhs4(spec, [0.0, 3.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0])[4:]
    assert abs(acc[1]) > 1e-3


def _frame_metric(spec, q):
    s = eval_sample(spec, q, order=1)
    E = o.frame_matrix(s)
    return E.T @ s.g4() @ E


def test_frame_connection_is_metric_compatible():
    spec = random_quadratic(4)
    for p in sample_points(spec, [(-1, 1)] * 4, 5):
        s = eval_sample(spec, p)
        C = o.frame_connection(s)
        E = o.frame_matrix(s)
        G = E.T @ s.g4() @ E
        # e_C(G_AB) = G(∇_C e_A, e_B) + G(e_A, ∇_C e_B)
        lhs = np.einsum("aAC,aB->ABC", C, G) + np.einsum("aBC,Aa->ABC", C, G)
        h = 1e-6
        num = np.zeros((4, 4, 4))
        for c in range(4):
            dp = E[:, c] * h
            num[:, :, c] = (_frame_metric(spec, p + dp) - _frame_metric(spec, p - dp)) / (2 * h)
        assert np.allclose(lhs, num, atol=1e-7)
