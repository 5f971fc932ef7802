import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spacethread import (FocusingScenario, catalog_lookup, focusing_classify, focusing_evolve,
                         kinematic_rates, random_quadratic, raychaudhuri_residual, sample_points)
from spacethread.errors import HypothesisViolated, NoBlowup
from spacethread.raychaudhuri import blowup_time_constant

from conftest import CATALOG_CASES, catalog_points
from reference_values import DE_SITTER_POINT


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_raychaudhuri_forms_on_catalog(name, params):
    spec, pts = catalog_points(name, params, 5, seed=4)
    for p in pts:
        rep = raychaudhuri_residual(spec, p)
        scale = max(1.0, abs(rep.theta_dot))
        assert rep.residual_kinematic / scale < 1e-9
        assert rep.residual_curvature / scale < 1e-9


def test_raychaudhuri_forms_without_symmetry():
    spec = random_quadratic(9)
    for p in sample_points(spec, [(-1, 1)] * 4, 5, seed=9):
        rep = raychaudhuri_residual(spec, p)
        assert abs(rep.theta_dot) > 1e-6  # nontrivial
        assert rep.residual_kinematic < 1e-10
        assert rep.residual_curvature < 1e-10
        res = kinematic_rates(spec, p)["residuals"]
        assert max(res.values()) < 1e-9
        # threading curvature gives the same answer as the oracle
        rep_t = raychaudhuri_residual(spec, p, source="threading")
        assert np.isclose(rep_t.ricci_00, rep.ricci_00, atol=1e-12)


def test_unit_and_geodesic_forms_on_flrw():
    spec = catalog_lookup("flrw", scale="(exp x0)", k=0.0)
    rep = raychaudhuri_residual(spec, DE_SITTER_POINT)
    assert rep.residual_unit is not None and rep.residual_unit < 1e-12
    assert rep.residual_geodesic is not None and rep.residual_geodesic < 1e-12
    # dΘ/dt = −Θ²/3 − R_00 = −3 + 3 = 0 for constant Hubble rate
    assert abs(rep.theta_dot) < 1e-12


def test_unit_form_skipped_when_not_unit(kn):
    rep = raychaudhuri_residual(kn, [0.0, 3.0, 1.0, 0.0])
    assert rep.residual_unit is None and rep.residual_geodesic is None


def test_bad_source(kn):
    with pytest.raises(ValueError):
        raychaudhuri_residual(kn, [0.0, 3.0, 1.0, 0.0], source="nope")


def test_classify():
    a = focusing_classify(-2.0)
    assert (a.case, a.lo, a.hi, a.hi_closed) == ("a", 0.5, 1.5, True)
    b1 = focusing_classify(-2.0, r_ge_rstar=False, ric_ge_gap=True)
    assert (b1.case, b1.lo, b1.hi) == ("b1", 0.5, 1.5)
    b2 = focusing_classify(-2.0, r_ge_rstar=False, ric_ge_gap=False)
    assert (b2.case, b2.lo, b2.hi, b2.hi_closed) == ("b2", 0.0, 0.5, False)
    assert not b2.contains(0.5) and b2.contains(0.49)
    for bad in ({"theta0": 0.0}, {"theta0": 1.0}, {"theta0": -1.0, "strong_energy": False}):
        with pytest.raises(HypothesisViolated):
            focusing_classify(**bad)


@pytest.mark.parametrize("theta0,s", [(-2.0, 0.0), (-1.0, -1.0), (-3.0, 2.0), (-0.5, -4.0)])
def test_evolve_matches_closed_form(theta0, s):
    sc = FocusingScenario(theta0, ric00_profile=max(s, 0.0), r_star_profile=max(-s, 0.0))
    res = focusing_evolve(sc)
    assert abs(res.blowup_tau - blowup_time_constant(theta0, s)) < 1e-8
    assert res.theta[-1] < -1e11


def test_closed_form_values():
    assert blowup_time_constant(-2.0, 0.0) == 0.5
    # s = −1, Θ0 = −1: (π/2 − π/4) / 1
    assert math.isclose(blowup_time_constant(-1.0, -1.0), math.pi / 4)
    assert blowup_time_constant(-1.0, 4.0) == math.inf


def test_no_blowup():
    # Θ0 = −1 with s = 4: Θ relaxes to −2 from above and stays finite
    sc = FocusingScenario(-1.0, ric00_profile=4.0, tau_max=5.0)
    with pytest.raises(NoBlowup):
        focusing_evolve(sc)


def test_scenario_cases_from_evolution():
    r = focusing_evolve(FocusingScenario(-2.0))
    assert r.interval.case == "a" and r.in_interval and r.flags_hold
    r = focusing_evolve(FocusingScenario(-2.0, r_star_profile=1.0))
    assert r.interval.case == "b2" and r.in_interval
    assert math.isclose(r.blowup_tau, math.atan(0.5), abs_tol=1e-8)
    r = focusing_evolve(FocusingScenario(-2.0, r_star_profile=1.0, ric00_profile=3.0))
    assert r.interval.case == "b1" and r.in_interval


def test_inconsistent_profile_is_flagged():
    # s well above 2Θ²/3 pushes the blow-up past 3/|Θ0|
    r = focusing_evolve(FocusingScenario(-2.0, ric00_profile=3.99))
    assert r.interval.case == "a" and not r.in_interval
    assert any("2 Θ²/3" in n for n in r.notes)


def test_changing_flags_give_no_interval():
    r = focusing_evolve(FocusingScenario(-2.0, r_profile="(sub 0.2 tau)"))
    assert r.interval is None and not r.flags_hold


def test_scenario_from_file(tmp_path):
    path = tmp_path / "sc.json"
    path.write_text(json.dumps({"theta0": -2.0, "profiles": {"ric00": "(mul 0.5 tau)"},
                                "tau_max": 4}))
    sc = FocusingScenario.load(path)
    assert sc.tau_max == 4.0 and sc.source(2.0) == 1.0
    with pytest.raises(HypothesisViolated):
        FocusingScenario.from_dict({"theta0": 0.5})
    with pytest.raises(ValueError):
        FocusingScenario(-1.0, ric00_profile="(mul q tau)")


@settings(max_examples=30, deadline=None)
@given(theta0=st.floats(-10.0, -0.1), frac=st.floats(0.0, 1.0))
def test_consistent_source_lands_in_interval(theta0, frac):
    s = frac * 2.0 * theta0 ** 2 / 3.0
    r = focusing_evolve(FocusingScenario(theta0, ric00_profile=s, tau_max=4.0 / abs(theta0)))
    assert r.interval.contains(r.blowup_tau, 1e-8)
    assert abs(r.blowup_tau - blowup_time_constant(theta0, s)) < 1e-8


def test_no_blowup_reports_final_expansion():
    # Θ rises through zero to the attractor Θ = +2
    with pytest.raises(NoBlowup, match="final Θ = 2"):
        focusing_evolve(FocusingScenario(-1.0, ric00_profile=4.0, tau_max=5.0))


def test_blowup_after_expansion_changes_sign():
    # s = 4 up to τ = 2 drives Θ positive, then s = −4 drives it to −∞
    sc = FocusingScenario(-1.0, ric00_profile=lambda t: 4.0 if t < 2.0 else 0.0,
                          r_star_profile=lambda t: 0.0 if t < 2.0 else 4.0)
    res = focusing_evolve(sc)
    theta1 = 2.0 * math.tanh(2.0 * (2.0 - math.atanh(0.5) / 2.0))
    expected = 2.0 + (math.pi / 2.0 - math.atan(-theta1 / 2.0)) / 2.0
    assert abs(res.blowup_tau - expected) < 1e-7
    assert res.interval is None  # the curvature flags change along the path
    assert np.max(res.theta) > 1.9
