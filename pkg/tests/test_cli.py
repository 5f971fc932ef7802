import json

import numpy as np
import pytest

from spacethread.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_FAIL, EXIT_OK, dumps, main

from reference_values import KN_OMEGA13


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_kerr_newman(capsys):
    code, out, _ = run(capsys, "analyze", "--metric", "kerr_newman", "--m", "1", "--a", "0.5",
                       "--e", "0.3", "--point", "0,3,1.0471975511965976,0")
    assert code == EXIT_OK
    doc = json.loads(out)
    om = np.array(doc["points"][0]["kinematics"]["omega"])
    assert np.isclose(om[0, 2], KN_OMEGA13, rtol=1e-12)
    assert "index_order" in doc


def test_analyze_csv(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, _, _ = run(capsys, "analyze", "--metric", "schwarzschild", "--m", "1", "--point",
                     "0,4,1,0", "--format", "csv", "--out", str(out))
    assert code == EXIT_OK
    head, row = out.read_text().strip().split("\n")
    rec = dict(zip(head.split(","), map(float, row.split(","))))
    assert np.isclose(rec["b1"], 0.125)


def test_analyze_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "1.json", tmp_path / "2.json"]
    for p in paths:
        assert main(["analyze", "--metric", "kerr", "--m", "1", "--a", "0.6", "--samples", "3",
                     "--seed", "11", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("argv", [
    ["--metric", "minkowski"],
    ["--metric", "kerr", "--m", "1", "--a", "0.9", "--vacuum"],
    ["--metric", "flrw", "--scale", "(exp x0)", "--k", "0"],
])
def test_verify_passes(capsys, argv):
    code, out, _ = run(capsys, "verify", "--samples", "4", *argv)
    assert code == EXIT_OK
    assert out.strip().endswith("(4 points)") and "FAIL" not in out


def test_verify_vacuum_fails_for_charged_metric(capsys):
    code, out, _ = run(capsys, "verify", "--metric", "reissner_nordstrom", "--m", "1", "--e", "0.5",
                       "--samples", "3", "--vacuum")
    assert code == EXIT_FAIL
    assert "vacuum_ricci" in out and "FAIL" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--metric", "schwarzschild", "--m", "1", "--samples", "2",
                       "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["passed"] and len(doc["points"]) == 2


def test_geodesic_orbit(tmp_path, capsys):
    init = tmp_path / "init.json"
    init.write_text(json.dumps({"x": [0, 8, 1.27, 0], "dx": [1, 0.01, 0.005, 0.044],
                                "normalize": True, "lambda_end": 20}))
    out = tmp_path / "orbit.csv"
    code, _, _ = run(capsys, "geodesic", "--metric", "kerr", "--m", "1", "--a", "0.7",
                     "--init-file", str(init), "--out", str(out), "--with-force")
    assert code == EXIT_OK
    summary = json.loads((tmp_path / "orbit.summary.json").read_text())
    assert summary["status"] == "done" and summary["lambda_end"] == 20.0
    assert summary["K_drift_max"] < 1e-9 and summary["norm_drift_max"] < 1e-8
    assert summary["force_identity_max_residual"] < 1e-6
    assert out.read_text().split("\n")[0].endswith("F1,F2,F3")


def test_geodesic_boundary_exit(tmp_path, capsys):
    code, _, err = run(capsys, "geodesic", "--metric", "kerr", "--m", "1", "--a", "0.9",
                       "--x", "0,6,1.5707963267948966,0", "--dx", "1,-0.3,0,0", "--normalize",
                       "--lambda-end", "200", "--out", str(tmp_path / "p.csv"))
    assert code == EXIT_DOMAIN and "boundary" in err


def test_geodesic_config_errors(capsys):
    assert run(capsys, "geodesic", "--metric", "kerr", "--m", "1", "--a", "0.5")[0] == EXIT_CONFIG
    # spacelike velocity cannot be normalized
    code, _, _ = run(capsys, "geodesic", "--metric", "minkowski", "--x", "0,0,0,0",
                     "--dx", "0.1,1,0,0", "--normalize")
    assert code == EXIT_CONFIG


def test_focusing(capsys):
    code, out, err = run(capsys, "focusing", "--theta0", "-2", "--format", "json")
    assert code == EXIT_OK and "case a" in err
    doc = json.loads(out)
    assert abs(doc["blowup_tau"] - 0.5) < 1e-6
    code, out, _ = run(capsys, "focusing", "--theta0", "-2", "--r-star", "1")
    assert "case b2" in out
    code, out, _ = run(capsys, "focusing", "--theta0", "-2", "--r-star", "1", "--ric00", "3")
    assert "case b1" in out
    assert run(capsys, "focusing", "--theta0", "1")[0] == EXIT_CONFIG


def test_focusing_scenario_file(tmp_path, capsys):
    sc = tmp_path / "sc.json"
    sc.write_text(json.dumps({"theta0": -1.0, "profiles": {"ric00": 0.5}}))
    code, out, _ = run(capsys, "focusing", "--scenario", str(sc), "--no-integrate")
    assert code == EXIT_OK and "[1, 3]" in out


@pytest.mark.parametrize("argv", [
    ["analyze", "--metric", "nope"],
    ["analyze", "--metric", "kerr", "--m", "1"],
    ["analyze", "--metric", "kerr", "--m", "1", "--a", "0.5", "--point", "1,2"],
    ["analyze", "--spec-file", "/nonexistent.json", "--point", "0,1,1,1"],
    ["analyze", "--metric", "minkowski", "--no-such-flag"],
])
def test_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_CONFIG


def test_domain_error(capsys):
    code = run(capsys, "analyze", "--metric", "schwarzschild", "--m", "1", "--point", "0,1.5,1,0")[0]
    assert code == EXIT_DOMAIN


def test_catalog_listing_and_dump(tmp_path, capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == EXIT_OK and "kerr_newman" in out
    code, out, _ = run(capsys, "catalog", "--metric", "kerr", "--m", "1", "--a", "0.5")
    path = tmp_path / "kerr.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "verify", "--spec-file", str(path), "--point", "0,4,1,0.5")
    assert code == EXIT_OK


def test_dumps_format():
    text = dumps({"b": [1.0, 2, float("nan")], "a": np.array([[0.1]])})
    assert text.index('"a"') < text.index('"b"')
    assert "null" in text and "1.0" in text
    assert json.loads(text)["a"] == [[0.1]]
