import json
import math

import numpy as np
import pytest

from spacethread import catalog_lookup, force3, force_identity_residual, initial_state, integrate
from spacethread.errors import HypothesisViolated, SpatialGeodesic
from spacethread.geodesics import (CSV_COLUMNS, coordinate_rhs, force3_direct, geodesic_locus_check,
                                   integrate_coordinate, trajectory_csv, trajectory_summary_json)
from spacethread import oracle4d as o

from reference_values import RN_STATIC_RADIUS, SCHW_CIRCULAR_OMEGA2_R6

ORBIT_X = [0.0, 8.0, math.pi / 2 - 0.3, 0.0]
ORBIT_DX = [1.0, 0.01, 0.005, 0.044]


@pytest.fixture(scope="module")
def kerr_orbit():
    spec = catalog_lookup("kerr", m=1.0, a=0.7)
    init = initial_state(spec, ORBIT_X, dx=ORBIT_DX, normalize=True)
    return spec, integrate(spec, init, 50.0, tol=1e-12)


def test_conserved_quantities(kerr_orbit):
    spec, traj = kerr_orbit
    assert traj.status == "done" and traj.lam[-1] == 50.0
    assert np.max(np.abs(traj.k_drift)) < 1e-9
    assert np.max(np.abs(traj.norm_drift)) < 1e-8


def test_initial_state_normalized(kerr_orbit):
    spec, traj = kerr_orbit
    st = next(traj.states())
    g = spec.g4(st.x)
    assert np.isclose(st.dx @ g @ st.dx, -1.0, atol=1e-14)
    # spatial-velocity form gives the same state
    st2 = initial_state(spec, st.x, v=st.dx[1:], K=st.K)
    assert np.allclose(st2.dx, st.dx, atol=1e-15)


def test_threading_rhs_is_coordinate_geodesic_equation(kerr_orbit):
    spec, traj = kerr_orbit
    for y in traj.y[::40]:
        ours = coordinate_rhs(spec, y)
        x = y[:4]
        s = spec.g4(x)
        n = s[0, 1:] / -s[0, 0]
        dx = np.concatenate([[y[7] + n @ y[4:7]], y[4:7]])
        ref = o.geodesic_rhs4(spec, np.concatenate([x, dx]))
        assert np.allclose(ours, ref, atol=1e-12)


def test_agrees_with_coordinate_integration():
    spec = catalog_lookup("kerr", m=1.0, a=0.9)
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = [0.0, rng.uniform(6, 12), rng.uniform(1.0, 2.1), rng.uniform(0, 6)]
        dx = [1.0, *rng.uniform(-0.05, 0.05, 2), rng.uniform(-0.05, 0.05)]
        init = initial_state(spec, x, dx=dx, normalize=True)
        traj = integrate(spec, init, 10.0, tol=1e-12)
        ref = integrate_coordinate(spec, init.x, init.dx, 10.0, tol=1e-12)
        assert np.max(np.abs(traj.y[-1, :4] - ref.y[-1][:4])) < 1e-6
        last = list(traj.states())[-1]
        assert np.max(np.abs(last.dx - ref.y[-1][4:])) < 1e-6


def test_minkowski_straight_line():
    spec = catalog_lookup("minkowski")
    init = initial_state(spec, [0, 0, 0, 0], dx=[1.0, 0.3, -0.2, 0.1], normalize=True)
    traj = integrate(spec, init, 5.0)
    assert np.allclose(traj.y[-1, :4], init.x + 5.0 * init.dx, atol=1e-12)


def test_circular_orbit_schwarzschild():
    spec = catalog_lookup("schwarzschild", m=1.0)
    w = math.sqrt(SCHW_CIRCULAR_OMEGA2_R6)
    init = initial_state(spec, [0, 6.0, math.pi / 2, 0], dx=[1.0, 0, 0, w], normalize=True)
    traj = integrate(spec, init, 100.0, tol=1e-12)
    assert np.max(np.abs(traj.y[:, 1] - 6.0)) < 1e-7
    # the 3D force on a circular orbit points inward and is orthogonal to v
    fs = force3(spec, list(traj.states())[-1])
    assert fs.f_up[0] < 0 and abs(fs.orthogonality) < 1e-12


def test_spatial_geodesic_keeps_time_fixed():
    spec = catalog_lookup("schwarzschild", m=1.0)
    init = initial_state(spec, [0, 6.0, 1.0, 0], v=[0.1, 0.01, 0.02], K=0.0)
    traj = integrate(spec, init, 5.0)
    assert traj.spatial
    assert np.all(traj.y[:, 7] == 0.0)
    assert traj.summary()["delta_x0_max"] == 0.0


def test_plunge_stops_at_boundary():
    spec = catalog_lookup("kerr", m=1.0, a=0.9)
    init = initial_state(spec, [0, 6.0, math.pi / 2, 0], dx=[1.0, -0.3, 0, 0], normalize=True)
    traj = integrate(spec, init, 200.0)
    assert traj.status == "boundary"
    assert traj.boundary_point is not None
    assert spec.in_domain(traj.boundary_point)
    # the domain edge for Kerr-class metrics is the ergosurface
    r, th = traj.boundary_point[1], traj.boundary_point[2]
    assert r < 1.0 + math.sqrt(1.0 - 0.81 * math.cos(th) ** 2) + 0.05


def test_force_identity_and_direct_force(kerr_orbit):
    spec, traj = kerr_orbit
    assert force_identity_residual(spec, traj) < 1e-6
    for st in list(traj.states())[::50]:
        fs = force3(spec, st)
        assert abs(fs.orthogonality) < 1e-10
        assert np.allclose(fs.f_up, force3_direct(spec, st), atol=1e-10)


def test_force_needs_motion():
    spec = catalog_lookup("schwarzschild", m=1.0)
    st = initial_state(spec, [0, 6.0, 1.0, 0], dx=[1.0, 0, 0, 0], normalize=True)
    with pytest.raises(SpatialGeodesic):
        force3(spec, st)


def test_locus_check():
    rn = geodesic_locus_check(catalog_lookup("reissner_nordstrom", m=1.0, e=1.5))
    assert len(rn) == 1 and rn[0]["kind"] == "hypersurface"
    assert np.isclose(rn[0]["r"], RN_STATIC_RADIUS) and rn[0]["in_domain"]
    assert rn[0]["b_residual"] < 1e-12
    assert geodesic_locus_check(catalog_lookup("schwarzschild", m=1.0)) == []
    kn = geodesic_locus_check(catalog_lookup("kerr_newman", m=1.0, a=0.5, e=0.3))
    kinds = sorted(l["kind"] for l in kn)
    # the axis quadratic has a root of each sign at both poles
    assert kinds == ["axis"] * 4 + ["equatorial"]
    assert sum(l["r"] > 0 for l in kn if l["kind"] == "axis") == 2
    for l in kn:
        m, a, e = 1.0, 0.5, 0.3
        cos2 = math.cos(l["theta"]) ** 2
        assert np.isclose(m * l["r"] ** 2 - e * e * l["r"] - m * a * a * cos2, 0.0, atol=1e-12)
    with pytest.raises(HypothesisViolated):
        geodesic_locus_check(catalog_lookup("minkowski"))


def test_csv_and_summary(kerr_orbit):
    spec, traj = kerr_orbit
    text = trajectory_csv(traj, with_force=True)
    lines = text.strip().split("\n")
    assert lines[0].split(",") == CSV_COLUMNS + ["F1", "F2", "F3"]
    assert len(lines) == len(traj.lam) + 1
    row = [float(v) for v in lines[1].split(",")]
    assert row[0] == 0.0 and row[2] == 8.0
    d = json.loads(trajectory_summary_json(traj, {"extra": 1}))
    assert d["status"] == "done" and d["extra"] == 1 and d["steps"] == len(traj.lam) - 1
