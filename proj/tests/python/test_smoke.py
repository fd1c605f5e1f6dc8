import json
import math
import os

import pytest

import slotune

SCENARIOS = os.environ.get(
    "SLOTUNE_SCENARIOS", os.path.join(os.path.dirname(__file__), "..", "..", "scenarios")
)


def test_objective_matches_a_hand_computation():
    y, v = [5.0, 13.0, 34.0], [10.0, 13.0, 17.0]
    r = [a / b for a, b in zip(y, v)]
    lse = math.log(sum(math.exp(10 * x) for x in r)) / 10
    mean = sum(r) / 3
    mad = sum(abs(x - mean) for x in r) / 3
    assert slotune.ratios(y, v) == pytest.approx(r)
    assert slotune.lse(r) == pytest.approx(lse, abs=1e-12)
    assert slotune.objective(y, v) == pytest.approx(lse + 0.5 * mad, abs=1e-12)
    assert not slotune.compliant(r)


def test_errors_cross_the_boundary():
    with pytest.raises(slotune.ShapeError):
        slotune.ratios([1.0, 2.0], [1.0])
    with pytest.raises(slotune.ShapeError):
        slotune.fairness([])
    with pytest.raises(slotune.Error):
        slotune.run_scenario("/nonexistent.json")


def test_expected_improvement():
    assert slotune.expected_improvement(1.0, 1.0, 1.0) == pytest.approx(0.3989423, abs=1e-6)
    assert slotune.expected_improvement(2.0, 0.0, 1.0) == 0.0


def test_geometry():
    u, v = [0.2, 0.3, 0.5], [0.5, 0.3, 0.2]
    assert slotune.aitchison_distance(u, v) == pytest.approx(slotune.aitchison_distance(v, u))
    x = [1 / 3] * 3 + [0.5] * 6
    y = [1 / 3] * 3 + [0.8] + [0.5] * 5
    assert slotune.mixed_distance(x, y, alpha=0.0) == pytest.approx(0.3)


def test_analytic_optimum():
    x = [1 / 3] * 3 + [0.3, 0.5, 0.7] + [0.5] * 3
    y = slotune.analytic_system(x, [2e9, 2e9, 2e9])
    assert y == pytest.approx([10.261, 12.826, 15.391], abs=1e-3)


def test_denoiser():
    d = slotune.Denoiser()
    assert d.push(4.0) == 4.0
    out = d.push(6.0)
    assert 4.0 <= out <= 6.0
    d.reset()
    assert d.buffer == []


def test_short_run_is_deterministic(tmp_path):
    with open(os.path.join(SCENARIOS, "analytic-high-slo.json")) as f:
        s = json.load(f)
    s["iterations"] = 4
    s["control"] = {"proposal": {"n_starts": 4, "local_budget": 40},
                    "gp": {"n_starts": 2, "evals_per_start": 40}}
    path = tmp_path / "short.json"
    path.write_text(json.dumps(s))
    a = slotune.run_scenario(str(path), seed=5)
    b = slotune.run_scenario(str(path), seed=5)
    assert a["trace_csv"] == b["trace_csv"]
    summary = json.loads(a["summary"])
    assert summary["iterations"] == 4
    assert summary["seed"] == 5
    assert a["model_calls"] > 0
