import csv
import math

import pytest

import clustercache as cc

SMALL = {
    "n_trials": 5,
    "network": {"search_range": {"min": 2, "max": 6}},
    "sweep": {"variable": "radius", "values": [0.4, 0.8]},
}


def test_resolved_config_applies_overrides():
    cfg = cc.resolved_config({"network": {"radius": 0.9}, "seed": 7})
    assert cfg["network"]["radius"] == 0.9
    assert cfg["seed"] == 7
    assert cfg["network"]["catalog_size"] == 100


def test_generate_and_cluster_recover_planted_groups():
    profiles, planted = cc.generate({"seed": 3})
    assert len(profiles) == 200
    assert all(abs(sum(p) - 1.0) < 1e-9 for p in profiles)
    result = cc.adaptive_cluster(profiles, 2, 10, seed=3)
    assert result["cluster_count"] == 4
    assert [t["cluster_count"] for t in result["trace"]] == list(range(2, 11))


def test_allocation_closed_form():
    a = cc.optimize_fractions([math.e**2 / 4, math.e / 4], 4 / math.pi, 1.0)
    assert a["method"] == "closed-form"
    assert a["fractions"] == pytest.approx([0.625, 0.375], abs=1e-12)


def test_hit_model_matches_monte_carlo():
    profiles, planted = cc.generate({"seed": 2})
    sets = [list(range(25 * c, 25 * c + 10)) for c in range(4)]
    masses = [sum(sum(p[i] for i in s) for p in profiles) for s in sets]
    x = cc.optimize_fractions(masses, 10.0, 0.5, len(profiles))["fractions"]
    h = cc.analytic_hit(profiles, sets, x, 10.0, 0.5)
    assert 0.0 < h["probability"] <= 1.0
    assert h["exact"] == pytest.approx(h["probability"])
    assert cc.analytic_hit_baseline(profiles, 10, 10.0, 0.5) < h["probability"]
    mc = cc.monte_carlo_hit(profiles, sets, x, 200, 9)
    assert abs(mc["mc_estimate"] - mc["analytic"]) < 4 * mc["mc_halfwidth"]


def test_pipeline_writes_plot_inputs(tmp_path):
    files = cc.run_pipeline(SMALL, tmp_path)
    names = sorted(p.rsplit("/", 1)[-1] for p in files)
    assert names == ["aic_trace.csv", "allocation.csv", "centroids.csv", "clusters.csv", "hits.csv"]
    with open(tmp_path / "hits.csv") as f:
        rows = list(csv.DictReader(f))
    assert [r["scheme"] for r in rows] == ["clustered", "baseline"] * 2
    with open(tmp_path / "aic_trace.csv") as f:
        header = next(csv.reader(f))
    assert header == ["cluster_count", "k_i", "log_likelihood", "aic", "aic_normalized"]


def test_stage_errors_surface_as_exceptions(tmp_path):
    with pytest.raises(cc.StageError, match=r"\[config\]"):
        cc.run_pipeline({"network": {"radius": -1.0}}, tmp_path)
