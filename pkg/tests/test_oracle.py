import math

import numpy as np
import pytest

from gupwit import (
    BipartiteCoefficients,
    GupConfig,
    TripartiteCoefficients,
    beta_monotonicity,
    exhaustive_qubit_duan,
    first_order_consistency,
    rigolin_universal,
    run_suites,
    separable_bound_sweep,
    violation_search,
)


def strip_elapsed(report_dict):
    d = dict(report_dict)
    d.pop("elapsed")
    return d


# ---------------------------------------------------------------------------
# Separable soundness
# ---------------------------------------------------------------------------

def test_duan_sweep_small_run_clean():
    rep = separable_bound_sweep("duan", 40, seed=11, cutoff=20)
    assert rep.passed
    assert rep.min_slack >= -1e-9
    assert rep.details["bound_argmin_at_unit_a"] is True


def test_duan_sweep_with_beta_checks_monotonicity():
    rep = separable_bound_sweep("duan", 15, seed=3, config=GupConfig(1e-3), cutoff=20)
    assert rep.passed
    assert rep.details["detection_monotonic"] is True


def test_vanloock_sweep_small_run_clean():
    rep = separable_bound_sweep("vanloock", 15, seed=5, cutoff=10)
    assert rep.passed
    assert rep.min_slack >= -1e-9


def test_sweep_determinism():
    a = separable_bound_sweep("duan", 10, seed=42, cutoff=16)
    b = separable_bound_sweep("duan", 10, seed=42, cutoff=16)
    assert strip_elapsed(a.to_dict()) == strip_elapsed(b.to_dict())


def test_sweep_single_sample():
    rep = separable_bound_sweep("duan", 1, seed=0, cutoff=16)
    assert rep.n_samples == 1
    assert rep.passed


def test_sweep_rejects_bad_args():
    with pytest.raises(ValueError):
        separable_bound_sweep("simon", 5, seed=0)
    with pytest.raises(ValueError):
        separable_bound_sweep("duan", 0, seed=0)


# ---------------------------------------------------------------------------
# Violation search
# ---------------------------------------------------------------------------

def test_tmsv_violation_search():
    grid = [round(0.1 * k, 10) for k in range(11)]
    rep = violation_search("tmsv", grid, BipartiteCoefficients(1.0))
    assert rep.passed
    assert rep.details["detection_threshold_r"] == pytest.approx(0.1)
    rows = rep.details["rows"]
    assert rows[0]["verdict"] == "not_detected"
    for row in rows[1:]:
        assert row["verdict"] == "detected_inseparable"
    r_half = next(row for row in rows if abs(row["r"] - 0.5) < 1e-12)
    assert r_half["lhs"] == pytest.approx(2 * math.exp(-1.0), abs=1e-4)


def test_cv_ghz_violation_search():
    rep = violation_search(
        "cv_ghz", [0.0, 0.4, 0.8], TripartiteCoefficients((1, -1, 0), (1, 1, 1)),
        cutoff=10,
    )
    assert rep.passed
    rows = rep.details["rows"]
    assert rows[0]["lhs"] == pytest.approx(2.5, abs=1e-8)
    assert rows[0]["lhs"] > rows[1]["lhs"] > rows[2]["lhs"]
    assert rows[2]["verdict"] == "detected_inseparable"
    assert rep.details["detection_threshold_r"] <= 0.8


def test_violation_search_family_coeff_mismatch():
    with pytest.raises(ValueError):
        violation_search("tmsv", [0.1], TripartiteCoefficients((1, -1, 0), (1, 1, 1)))
    with pytest.raises(ValueError):
        violation_search("cv_ghz", [0.1], BipartiteCoefficients(1.0))
    with pytest.raises(ValueError):
        violation_search("tmsv", [], BipartiteCoefficients(1.0))


# ---------------------------------------------------------------------------
# First-order GUP consistency
# ---------------------------------------------------------------------------

def test_first_order_consistency_passes():
    rep = first_order_consistency(20, seed=9)
    assert rep.passed, rep.failures
    assert 1.8 <= rep.details["loglog_slope"] <= 2.2
    assert rep.details["fitted_c"] <= 10.0


def test_first_order_zero_beta_handled():
    rep = first_order_consistency(5, seed=2, beta_grid=(0.0, 1e-4, 3e-4, 1e-3))
    assert rep.passed
    assert rep.details["zero_beta_checked"] is True


def test_first_order_refuses_paper_convention():
    with pytest.raises(ValueError, match="kempf"):
        first_order_consistency(5, seed=1, convention="paper")


# ---------------------------------------------------------------------------
# Universal bounds, exhaustive scan, beta growth
# ---------------------------------------------------------------------------

def test_rigolin_universal_clean():
    rep = rigolin_universal(60, seed=21)
    assert rep.passed
    assert rep.min_slack >= -1e-9


def test_exhaustive_qubit_duan():
    rep = exhaustive_qubit_duan(grid=6)
    assert rep.passed
    assert rep.n_samples == 6**4
    # the uncorrected bound genuinely fails at cutoff 2; the suite records it
    assert rep.details["naive_bound_fails_here"] is True
    assert rep.details["worst_naive_slack"] < -0.5


def test_beta_monotonicity_suite():
    rep = beta_monotonicity(seed=4)
    assert rep.passed
    assert rep.min_slack > 0.0


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def test_run_suites_filter_and_unknown():
    reports = run_suites(seed=1, names=["beta_monotonicity"])
    assert len(reports) == 1
    assert reports[0].suite == "beta_monotonicity"
    with pytest.raises(ValueError):
        run_suites(names=["nope"])
