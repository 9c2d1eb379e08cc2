import json
import math
import os
from fractions import Fraction

import pytest

from orbitgcd.cli import dispatch
from orbitgcd.experiments import GcdSeriesConfig, gcd_series
from orbitgcd.maps import ProjPoint, RationalMap
from orbitgcd.polys import Polynomial
from orbitgcd.serialize import (build_manifest, map_from_json, map_to_json,
                                point_from_str, point_to_str, poly_from_json,
                                poly_to_json, rational_from_str,
                                rational_to_str, report_to_csv, report_to_dict,
                                report_to_json)

X2 = RationalMap([0, 0, 1])


@pytest.fixture(autouse=True)
def _test_mode(monkeypatch):
    monkeypatch.setenv("ORBITGCD_TEST_MODE", "1")


@pytest.fixture()
def map_file(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)
    return write


def run_cli(capsys, argv):
    code = dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rational_and_point_strings_roundtrip():
    for text in ("3", "-7/2", "0", "1000000007/3"):
        assert rational_to_str(rational_from_str(text)) == text
    assert point_to_str(point_from_str("oo")) == "oo"
    assert point_from_str("5/3") == ProjPoint(Fraction(5, 3))


def test_poly_and_map_json_roundtrip():
    poly = Polynomial([Fraction(1, 2), 0, -3])
    assert poly_from_json(poly_to_json(poly)) == poly
    f = RationalMap([1, 0, 6], [0, 2])
    assert map_from_json(map_to_json(f)) == f
    g = RationalMap([0, 1, 0, 1])
    echo = map_to_json(g)
    assert "den" not in echo
    assert map_from_json(echo) == g
    # a bare polynomial object is accepted as a polynomial map
    assert map_from_json({"coeffs": ["0", "0", "1"]}) == X2


def test_report_json_and_csv_shape():
    cfg = GcdSeriesConfig(X2, X2, 125, 25, 1, 1, n_max=3)
    rep = gcd_series(cfg)
    manifest = build_manifest("gcd-series", {"demo": True}, seed=0)
    blob = report_to_dict(rep, manifest)
    assert blob["manifest"]["created"] == "1970-01-01T00:00:00Z"
    assert [row["n"] for row in blob["rows"]] == [0, 1, 2, 3]
    assert blob["rows"][1]["gcd"] == "24"
    csv_text = report_to_csv(rep)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "n,digits_f,digits_g,gcd,log_gcd,ratio,hgcd_fin,hgcd_S,flags"
    assert lines[2].startswith("1,5,3,24,")


def test_csv_elides_huge_gcds():
    cfg = GcdSeriesConfig(X2, X2, 125, 25, 1, 1, n_max=3)
    rep = gcd_series(cfg)
    text = report_to_csv(rep, gcd_digit_threshold=2)
    line3 = text.strip().splitlines()[4]
    assert "elided:digits=6" in line3     # gcd 390624 has 6 digits


def test_json_elides_huge_gcds_to_digit_counts():
    cfg = GcdSeriesConfig(X2, X2, 125, 25, 1, 1, n_max=3)
    rep = gcd_series(cfg)
    manifest = build_manifest("gcd-series", {})
    blob = report_to_dict(rep, manifest, gcd_digit_threshold=3)
    assert blob["rows"][1]["gcd"] == "24"
    assert blob["rows"][2]["gcd"] == {"elided": True, "digits": 3}
    assert blob["rows"][3]["gcd"] == {"elided": True, "digits": 6}


def test_cli_surface_ample(capsys):
    code, out, err = run_cli(capsys, ["surface", "ample", "--s", "4", "--N", "5"])
    assert code == 0
    payload = json.loads(out)
    assert payload["ample"] is True
    assert payload["A_selfintersection"] == "46/25"
    code, out, _ = run_cli(capsys, ["surface", "ample", "--s", "5", "--N", "5"])
    assert json.loads(out)["ample"] is False


def test_cli_surface_intersect(capsys):
    code, out, _ = run_cli(capsys, [
        "surface", "intersect", "--s", "2",
        "--d1", "1,1:1/5,1/5", "--d2", "0,0:-1,0",
    ])
    assert code == 0
    assert json.loads(out)["intersection"] == "1/5"


def test_cli_hgcd_decimal(capsys):
    code, out, _ = run_cli(capsys, ["hgcd", "-x", "12", "-y", "18"])
    assert code == 0
    payload = json.loads(out)
    assert payload["hgcd"]["finite_str"] == "log 2 + log 3"
    assert abs(payload["hgcd"]["total"] - 1.7917594692) < 1e-9
    code, out, _ = run_cli(capsys, ["hgcd", "-x", "12", "-y", "18",
                                    "--exclude", "2,3"])
    assert json.loads(out)["hgcd"]["finite"] == {}


def test_cli_gcd_series_and_round_trip(capsys, map_file, tmp_path):
    x2 = map_file("x2.json", {"coeffs": ["0", "0", "1"]})
    out_path = str(tmp_path / "report.json")
    code, _, _ = run_cli(capsys, [
        "gcd-series", "--f", x2, "--g", x2, "-a", "125", "-b", "25",
        "--alpha", "1", "--beta", "1", "--max-n", "3", "--out", out_path,
    ])
    assert code == 0
    blob = json.loads(open(out_path).read())
    assert [row["gcd"] for row in blob["rows"]] == ["4", "24", "624", "390624"]
    # the config echo parses back to the same map
    assert map_from_json(blob["manifest"]["config"]["f"]) == X2
    # determinism: identical manifest implies identical bytes in test mode
    out2 = str(tmp_path / "report2.json")
    run_cli(capsys, [
        "gcd-series", "--f", x2, "--g", x2, "-a", "125", "-b", "25",
        "--alpha", "1", "--beta", "1", "--max-n", "3", "--out", out2,
    ])
    assert open(out_path, "rb").read() == open(out2, "rb").read()


def test_cli_gcd_series_csv_and_plot_data(capsys, map_file, tmp_path):
    x2 = map_file("x2.json", {"coeffs": ["0", "0", "1"]})
    plot = str(tmp_path / "plot.txt")
    code, out, _ = run_cli(capsys, [
        "gcd-series", "--f", x2, "--g", x2, "-a", "125", "-b", "25",
        "--alpha", "1", "--beta", "1", "--max-n", "2", "--format", "csv",
        "--plot-data", plot,
    ])
    assert code == 0
    assert out.splitlines()[0].startswith("n,digits_f")
    lines = open(plot).read().strip().splitlines()
    assert len(lines) == 3 and lines[0].startswith("0 ")


def test_cli_iterate_and_heights(capsys, map_file):
    x2 = map_file("x2.json", {"coeffs": ["0", "0", "1"]})
    code, out, _ = run_cli(capsys, ["iterate", "--map", x2, "--start", "125",
                                    "--steps", "2"])
    assert code == 0
    assert json.loads(out)["orbit"] == ["125", "15625", "244140625"]
    code, out, _ = run_cli(capsys, ["height", "-x", "3/2"])
    assert abs(json.loads(out)["height"] - math.log(3)) < 1e-12
    code, out, _ = run_cli(capsys, ["canonical-height", "--map", x2,
                                    "--point", "3", "--tol", "1e-9"])
    payload = json.loads(out)
    assert abs(payload["value"] - math.log(3)) < 1e-9
    assert payload["error_bound"] <= 1e-9


def test_cli_classify_subcommands(capsys, map_file):
    x2 = map_file("x2.json", {"coeffs": ["0", "0", "1"]})
    x3x = map_file("x3x.json", {"coeffs": ["0", "1", "0", "1"]})
    minus_x = map_file("minus_x.json", {"coeffs": ["0", "-1"]})
    cheb = map_file("cheb.json", {"coeffs": ["-2", "0", "1"]})
    code, out, _ = run_cli(capsys, ["classify", "exceptional", "--map", x2,
                                    "--point", "0"])
    assert json.loads(out)["exceptional"] is True
    code, out, _ = run_cli(capsys, ["classify", "preperiodic", "--map", x2,
                                    "--point", "1"])
    assert json.loads(out)["preperiodic"] is True
    code, out, _ = run_cli(capsys, ["classify", "mult-indep", "-a", "125",
                                    "-b", "25"])
    assert json.loads(out)["multiplicatively_independent"] is False
    code, out, _ = run_cli(capsys, ["classify", "special", "--poly", cheb])
    assert json.loads(out)["tag"] == "chebyshev"
    code, out, _ = run_cli(capsys, ["classify", "commutes", "--h", minus_x,
                                    "--f", x3x, "--k-max", "2"])
    assert json.loads(out)["commutes_at"] == 1


def test_cli_probe_genericity(capsys, map_file):
    x3x = map_file("x3x.json", {"coeffs": ["0", "1", "0", "1"]})
    code, out, _ = run_cli(capsys, [
        "probe-genericity", "--f", x3x, "--g", x3x, "-a", "1", "-b", "-1",
        "--deg-max", "1", "--points", "8",
    ])
    assert code == 0
    relation = json.loads(out)["relation"]
    assert relation["monomials"] == {"0,1": "1", "1,0": "1"}


def test_cli_choose_depth_and_exit_codes(capsys, map_file):
    x2 = map_file("x2.json", {"coeffs": ["0", "0", "1"]})
    code, out, _ = run_cli(capsys, [
        "choose-depth", "--f", x2, "--g", x2, "-a", "3", "-b", "2",
        "--alpha", "1", "--beta", "1", "--epsilon", "0.1",
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["depth"] == 8 and payload["certificate"]["replays"] is True
    # hypothesis violation: exceptional alpha
    code, _, err = run_cli(capsys, [
        "choose-depth", "--f", x2, "--g", x2, "-a", "3", "-b", "2",
        "--alpha", "0", "--beta", "1", "--epsilon", "0.1",
    ])
    assert code == 3
    assert json.loads(err)["error"] == "hypothesis-violation"


def test_cli_usage_and_budget_exit_codes(capsys, map_file, tmp_path):
    x2 = map_file("x2.json", {"coeffs": ["0", "0", "1"]})
    # invalid input -> 2
    code, _, err = run_cli(capsys, ["hgcd", "-x", "0", "-y", "0"])
    assert code == 2 and json.loads(err)["error"] == "invalid-input"
    # unknown subcommand -> SystemExit(2) from argparse
    with pytest.raises(SystemExit) as exc:
        dispatch(["bogus"])
    assert exc.value.code == 2
    capsys.readouterr()
    # budget exhaustion -> 4
    os.environ["ORBITGCD_DIGIT_BUDGET"] = "50"
    try:
        code, _, err = run_cli(capsys, ["iterate", "--map", x2, "--start",
                                        "125", "--steps", "30"])
    finally:
        del os.environ["ORBITGCD_DIGIT_BUDGET"]
    assert code == 4 and json.loads(err)["error"] == "budget-exhausted"
    # missing file -> 2
    code, _, err = run_cli(capsys, ["iterate", "--map",
                                    str(tmp_path / "nope.json"),
                                    "--start", "1", "--steps", "1"])
    assert code == 2


def test_cli_ap_structure_pipeline(capsys, map_file, tmp_path):
    x3x = map_file("x3x.json", {"coeffs": ["0", "1", "0", "1"]})
    report = str(tmp_path / "rep.json")
    run_cli(capsys, [
        "gcd-series", "--f", x3x, "--g", x3x, "-a", "2", "-b", "-2",
        "--alpha", "1", "--beta", "-1", "--max-n", "6", "--out", report,
    ])
    code, out, _ = run_cli(capsys, ["ap-structure", "--report", report,
                                    "--eta", "0.3"])
    assert code == 0
    payload = json.loads(out)
    assert payload["label"] == "window-consistent"
    assert {"start": 1, "step": 1} in payload["progressions"] or \
        payload["progressions"][0]["step"] == 1
