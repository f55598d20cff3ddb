import json
import math
import pathlib

import pytest

import surfacemdp as sm

ROOT = pathlib.Path(__file__).resolve().parents[2]


def toy():
    return sm.AirportConfig.load(str(ROOT / "configs" / "toy.json"))


def lga():
    return sm.AirportConfig.load(str(ROOT / "configs" / "lga.json"))


def test_state_coding():
    c = lga()
    s = sm.SurfaceState("001001101", 3, False)
    assert sm.encode(s, c) == 0b001001101011
    assert sm.decode(619, c) == s
    assert s.aircraft() == 7
    states = sm.enumerate_states(c)
    assert states == sorted(states)


def test_kernel_rows_sum_to_one():
    t = sm.TransitionModel(toy())
    assert t.num_states == 4
    assert t.validate() == []
    for pos in range(t.num_states):
        row = t.successors(pos, sm.Decision.Hold)
        assert math.isclose(sum(p for _, p in row), 1.0, abs_tol=1e-12)
    with pytest.raises(sm.InvalidState):
        t.successors(4, sm.Decision.Hold)


def test_toy_threshold_and_optimum():
    t = sm.TransitionModel(toy())
    m = sm.evaluate_threshold(t, 1)
    assert m["avg_taxiing"] == pytest.approx(2 / 3)
    assert m["utilization"] == pytest.approx(2 / 3)
    sol = sm.solve(t, 2.0)
    assert sol["converged"]
    assert sol["gap"] >= -1e-12
    assert sol["gap"] <= 1e-8
    assert len(sol["policy"]) == t.num_states
    again = sm.evaluate_policy(t, sol["policy"], 2.0)
    assert again["expected_cost"] == pytest.approx(sol["objective"], abs=1e-9)


def test_sweep_is_monotone():
    t = sm.TransitionModel(sm.AirportConfig.load(str(ROOT / "configs" / "toy_two_ramp.json")))
    points = sm.pareto_sweep(t, [0.5, 2.0, 10.0, 100.0])
    assert all(p["ok"] for p in points)
    utils = [p["metrics"]["utilization"] for p in points]
    assert utils == sorted(utils)


def test_simulation_is_seeded():
    t = sm.TransitionModel(toy())
    a = sm.simulate(t, "threshold", 1, steps=20000, seed=5)
    b = sm.simulate(t, "threshold", 1, steps=20000, seed=5)
    assert a == b
    assert a["rng"] == "mt19937_64+splitmix64"
    assert a["conservation_violations"] == 0
    with pytest.raises(ValueError):
        sm.simulate(t, "nonsense")


def test_mls_rollout_runs():
    t = sm.TransitionModel(sm.AirportConfig.load(str(ROOT / "configs" / "toy_two_ramp.json")))
    pi = sm.solve(t, 5.0)["policy"]
    r = sm.simulate(t, "mls", pi, steps=10000, seed=3)
    assert 0.0 < r["utilization"] <= 1.0


def test_calibration():
    c1, c2 = sm.solve_bernoulli_pair(0.605, 0.578)
    assert abs(c1 - 0.514) <= 0.01
    assert c1 >= c2
    report = json.loads(
        sm.calibrate(
            json.dumps(
                {
                    "throughput": {"mean_rate": 0.605, "std_rate": 0.578},
                    "ramp1": {"unimpeded_mean": 13.56, "unimpeded_std": 2.0, "pushback_mean": 2.0, "pushback_std": 1.33},
                    "ramp2_unimpeded_mean": 6.4,
                }
            )
        )
    )
    assert report["B"] == 7
    with pytest.raises(sm.CalibrationError):
        sm.solve_bernoulli_pair(0.5, 0.9)


def test_invalid_config_rejected():
    c = toy()
    c.move_prob = 1.5
    with pytest.raises(sm.ConfigError):
        c.validate()
    with pytest.raises(sm.ParseError):
        sm.AirportConfig.from_json("not json")
