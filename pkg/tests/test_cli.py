import json
import math

import pytest

from gupwit.cli import main


def write_spec(tmp_path, name, tree):
    path = tmp_path / name
    path.write_text(json.dumps(tree), encoding="utf-8")
    return str(path)


@pytest.fixture
def tmsv_spec(tmp_path):
    return write_spec(tmp_path, "tmsv.json", {"tmsv": {"r": 0.5}})


@pytest.fixture
def vacuum2_spec(tmp_path):
    return write_spec(tmp_path, "vac2.json",
                      {"product": [{"kind": "vacuum"}, {"kind": "vacuum"}], "cutoff": 10})


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------

def test_witness_duan_tmsv(tmp_path, tmsv_spec, capsys):
    out = str(tmp_path / "report.json")
    code = main(["witness", "--criterion", "duan", "--state", tmsv_spec,
                 "--a", "1.0", "--out", out])
    assert code == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("lhs=0.735759")
    assert "verdict=detected_inseparable" in line
    report = json.loads(open(out).read())
    assert report["criterion"] == "duan"
    assert report["lhs"] == pytest.approx(2 * math.exp(-1.0), abs=1e-4)
    assert report["verdict"] == "detected_inseparable"
    assert set(report) == {"criterion", "lhs", "bound_hup", "delta_gup", "bound_gup",
                           "verdict", "verdict_gup", "beta", "convention", "diagnostics"}


def test_witness_rigolin_vacuum_saturates(vacuum2_spec, capsys):
    code = main(["witness", "--criterion", "rigolin_collective", "--state", vacuum2_spec])
    assert code == 0
    out = capsys.readouterr().out
    assert "lhs=1 bound=1" in out
    assert "verdict=not_detected" in out


def test_witness_mode_count_usage_error(vacuum2_spec, capsys):
    code = main(["witness", "--criterion", "vanloock", "--state", vacuum2_spec])
    assert code == 2
    assert "3-mode" in capsys.readouterr().err


def test_witness_missing_file(capsys):
    code = main(["witness", "--criterion", "duan", "--state", "/nonexistent.json"])
    assert code == 2


def test_witness_report_round_trip(tmp_path, tmsv_spec):
    out = str(tmp_path / "r.json")
    main(["witness", "--criterion", "duan", "--state", tmsv_spec, "--beta", "1e-3",
          "--out", out])
    blob = open(out).read()
    assert json.dumps(json.loads(blob), indent=2, sort_keys=True) + "\n" == blob


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_sweep_beta_csv(tmp_path, tmsv_spec):
    out = str(tmp_path / "sweep.csv")
    args = ["sweep", "--parameter", "beta", "--from", "0", "--to", "0.01",
            "--steps", "11", "--criterion", "duan", "--state", tmsv_spec,
            "--a", "1", "--out", out]
    assert main(args) == 0
    text1 = open(out, "rb").read()
    assert main(args) == 0
    assert open(out, "rb").read() == text1  # byte-identical

    lines = text1.decode().splitlines()
    assert lines[0] == "beta,lhs,bound_hup,delta_gup,bound_gup,verdict,verdict_gup"
    assert len(lines) == 12
    lhs_vals = [float(l.split(",")[1]) for l in lines[1:]]
    gup_bounds = [float(l.split(",")[4]) for l in lines[1:]]
    assert len(set(lhs_vals)) == 1  # lhs is beta-independent with canonical moments
    assert all(b2 > b1 for b1, b2 in zip(gup_bounds, gup_bounds[1:]))
    assert not text1.decode().count("\r")


def test_sweep_a_bound_minimum(tmp_path, vacuum2_spec):
    out = str(tmp_path / "a.csv")
    assert main(["sweep", "--parameter", "a", "--from", "0.5", "--to", "2.0",
                 "--steps", "16", "--criterion", "duan", "--state", vacuum2_spec,
                 "--out", out]) == 0
    rows = [l.split(",") for l in open(out).read().splitlines()[1:]]
    bounds = {float(r[0]): float(r[2]) for r in rows}
    assert min(bounds.values()) == pytest.approx(2.0)
    assert bounds[1.0] == pytest.approx(2.0)


def test_sweep_r_matches_closed_form(tmp_path, tmsv_spec):
    out = str(tmp_path / "r.csv")
    assert main(["sweep", "--parameter", "r", "--from", "0", "--to", "1.0",
                 "--steps", "11", "--criterion", "duan", "--state", tmsv_spec,
                 "--a", "1", "--out", out]) == 0
    for line in open(out).read().splitlines()[1:]:
        cells = line.split(",")
        r, lhs = float(cells[0]), float(cells[1])
        assert lhs == pytest.approx(2 * math.exp(-2 * r), abs=1e-4)


def test_sweep_invalid_range(tmsv_spec, capsys):
    code = main(["sweep", "--parameter", "beta", "--from", "0.01", "--to", "0",
                 "--steps", "5", "--criterion", "duan", "--state", tmsv_spec])
    assert code == 2


def test_sweep_r_needs_parametric_family(vacuum2_spec):
    code = main(["sweep", "--parameter", "r", "--from", "0", "--to", "1",
                 "--steps", "3", "--criterion", "duan", "--state", vacuum2_spec])
    assert code == 2


# ---------------------------------------------------------------------------
# scenario kim-shih
# ---------------------------------------------------------------------------

def test_scenario_kimshih_default(capsys, tmp_path):
    out = str(tmp_path / "ks.json")
    assert main(["scenario", "kim-shih", "--beta", "0", "--out", out]) == 0
    text = capsys.readouterr().out
    assert "classification     = disagreement" in text
    result = json.loads(open(out).read())
    hbar = 1.054571817e-34
    assert result["delta_p_kg_m_per_s"] == pytest.approx(hbar / (2 * 0.16e-3))
    assert result["delta_gup_J_s"] == 0.0


def test_scenario_kimshih_small_beta(tmp_path):
    out = str(tmp_path / "ks2.json")
    assert main(["scenario", "kim-shih", "--beta", "1e-3", "--out", out]) == 0
    result = json.loads(open(out).read())
    assert result["beta_delta_p_squared"] < 1.0
    assert result["classification"] == "disagreement"
    assert result["delta_gup_J_s"] > 0.0


def test_scenario_kimshih_boundary(tmp_path):
    hbar = 1.054571817e-34
    dp = hbar / (2 * 0.16e-3)
    beta_star = 1.0 / dp**2
    out = str(tmp_path / "ks3.json")
    assert main(["scenario", "kim-shih", "--beta", repr(beta_star), "--out", out]) == 0
    result = json.loads(open(out).read())
    assert result["classification"] == "no_disagreement"


def test_scenario_kimshih_rejects_bad_delta_y():
    assert main(["scenario", "kim-shih", "--delta-y", "0"]) == 2


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def test_validate_subset_deterministic(tmp_path, capsys):
    out1 = str(tmp_path / "v1.json")
    out2 = str(tmp_path / "v2.json")
    args = ["validate", "--suites", "beta_monotonicity,exhaustive_qubit_duan",
            "--seed", "7"]
    assert main(args + ["--out", out1]) == 0
    assert "[PASS] beta_monotonicity" in capsys.readouterr().out
    assert main(args + ["--out", out2]) == 0

    def strip(payload):
        for suite in payload["suites"]:
            suite.pop("elapsed")
        return payload

    p1 = strip(json.loads(open(out1).read()))
    p2 = strip(json.loads(open(out2).read()))
    assert p1 == p2


def test_validate_unknown_suite(capsys):
    assert main(["validate", "--suites", "bogus"]) == 2
