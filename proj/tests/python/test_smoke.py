import math

import pytest

import ldbounds


def test_t0():
    t0 = ldbounds.solve_t0()
    assert abs(t0 - 0.432646) < 1e-5
    assert abs(ldbounds.t0_residual(t0)) < 1e-12


def test_family_and_renyi():
    u = ldbounds.make_family("uniform", [0.0, 1.0])
    assert u.support == (0.0, 1.0)
    assert ldbounds.renyi_divergence(u, 0.0, 0.1, 0.5) == pytest.approx(-math.log(0.9), rel=1e-10)
    assert math.isinf(ldbounds.renyi_divergence(u, 0.0, 1.5, 0.5))
    g = ldbounds.make_family("gaussian", [1.0])
    assert ldbounds.renyi_divergence(g, 0.0, 1.0, 0.3) == pytest.approx(0.3 * 0.7 / 2, rel=1e-9)
    x = g.sample(0.0, 1000, 7)
    assert len(x) == 1000 and x == g.sample(0.0, 1000, 7)


def test_classify_and_bounds():
    info = ldbounds.classify(ldbounds.make_family("beta", [2.0, 2.0]))
    assert info["regime"] == "kappa_two"
    b = ldbounds.closed_form_bounds("kappa_one", A1=1.0, A2=1.0, kappa=1.0)
    assert b["alpha1_bar"] == pytest.approx(2.0)
    assert b["coincide"]
    lb = ldbounds.ladder_bounds(ldbounds.make_family("uniform", [0.0, 1.0]))
    assert lb["alpha1_bar"] == pytest.approx(2.0, rel=1e-3)


def test_estimators_and_rates():
    u = ldbounds.make_family("uniform", [0.0, 1.0])
    assert ldbounds.estimate(u, "min_shift", [0.2, 0.5, 0.9]) == pytest.approx(0.2)
    r = ldbounds.mc_tail_rate(u, "min_shift", 0.1, list(range(10, 41, 5)), trials=20000, seed=3, threads=1)
    assert r["beta"] == pytest.approx(-math.log(0.9), rel=0.05)
    assert ldbounds.chernoff_test_rate(ldbounds.make_family("gaussian", [1.0]), 0.0, 1.0) == pytest.approx(0.125, rel=1e-6)


def test_errors():
    u = ldbounds.make_family("uniform", [0.0, 1.0])
    with pytest.raises(ValueError):
        ldbounds.renyi_divergence(u, 0.0, 0.1, 1.5)
    with pytest.raises(ValueError):
        ldbounds.make_family("cauchy", [])
    with pytest.raises(ldbounds.ConfigError):
        ldbounds.run("bounds", {"version": 1, "family": {"kind": "uniform", "params": [0, 1]}})


def test_run_config():
    rows = ldbounds.run("bounds", {"version": 1, "family": {"kind": "uniform", "params": [0, 1]}, "seed": 1})
    assert len(rows) == 1
    assert rows[0]["alpha1_bar_closed"] == pytest.approx(2.0)


def test_lemma_suite():
    res = ldbounds.lemma_suite("quick")
    assert res and all(r["pass"] for r in res)
