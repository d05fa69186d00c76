import math

import numpy as np
import pytest

import anolab


def test_presets():
    names = anolab.preset_names()
    assert len(names) == 13
    assert {"ano", "anolog", "adamw", "lion"} <= set(names)
    spec = anolab.preset("ano")
    assert spec.beta1 == 0.92 and spec.beta2 == 0.99
    assert spec.second_moment == anolab.SecondMoment.YOGI
    assert anolab.preset("anolog").beta1_schedule == "b1:log"
    with pytest.raises(anolab.ConfigError):
        anolab.preset("sgd")


def test_first_step():
    spec = anolab.preset("ano")
    spec.base_lr = 0.1
    state = anolab.OptState(1)
    x = np.array([1.0])
    info = anolab.step(spec, state, x, np.array([2.0]))
    assert state.m[0] == pytest.approx(0.16, abs=1e-15)
    assert state.v[0] == pytest.approx(0.04, abs=1e-15)
    assert abs(x[0]) <= 1e-7
    assert info.lr == 0.1
    assert state.k == 2


def test_ops_and_errors():
    assert anolab.tri_sign(0.0) == 0
    assert anolab.yogi_update_v([4.0], [2.0], 0.99)[0] == 4.0
    np.testing.assert_allclose(anolab.ema_update_m([0.0], [2.0], 0.92), [0.16])
    with pytest.raises(anolab.DimensionError):
        anolab.ema_update_m([0.0, 1.0], [2.0], 0.9)
    state = anolab.OptState(2)
    x = np.array([1.0, 1.0])
    with pytest.raises(anolab.NumericError):
        anolab.step(anolab.preset("ano"), state, x, np.array([1.0, math.nan]))
    assert list(x) == [1.0, 1.0]
    assert isinstance(anolab.DomainError("x"), anolab.Error)


def test_schedules():
    assert anolab.beta1_at("b1:log", 0.0, 1) == pytest.approx(1 - 1 / math.log(3), rel=1e-15)
    assert anolab.lr_at("power34", 0.1, 1) == pytest.approx(0.1 * 2 ** -0.75, rel=1e-15)
    with pytest.raises(anolab.DomainError):
        anolab.lr_at("constant", 0.1, 0)


def test_problems_and_noise():
    q = anolab.Quadratic(3, 100.0)
    np.testing.assert_allclose(q.curvature, [1.0, 10.0, 100.0])
    assert q.loss(np.ones(3)) == pytest.approx(55.5)
    r = anolab.Rosenbrock(2)
    assert r.loss(np.array([1.0, 1.0])) == 0.0
    lr = anolab.logreg_synthetic(100, 4, 2.0, 1)
    assert lr.loss(np.zeros(5)) == pytest.approx(math.log(2))
    g = np.array([1.0, 2.0])
    np.testing.assert_array_equal(anolab.inject_noise(g, 0.0, 3), g)
    assert not np.array_equal(anolab.inject_noise(g, 0.5, 3), g)


def test_run_and_analysis():
    cfg = anolab.RunConfig()
    cfg.problem.kind = "quadratic"
    cfg.problem.dim = 4
    cfg.optimizer = anolab.preset("ano")
    cfg.optimizer.base_lr = 0.01
    cfg.steps = 200
    cfg.record_every = 10
    cfg.sigma = 0.1
    cfg.seed = 2
    trace = anolab.run(cfg)
    assert not trace.diverged
    assert trace.rows[0].k == 1 and trace.rows[-1].k == 200
    assert trace.rows[-1].loss < trace.rows[0].loss
    again = anolab.run(cfg)
    np.testing.assert_array_equal(trace.final_x, again.final_x)
    env = anolab.running_min_envelope(trace)
    assert all(b[1] <= a[1] for a, b in zip(env, env[1:]))
    assert anolab.fit_loglog_slope([(1, 1), (10, 0.1), (100, 0.01)]) == pytest.approx(-1.0)
    assert anolab.mismatch_rate([1.0, -1.0], [1.0, 1.0]) == 0.5


def test_sweeps():
    cfg = anolab.RunConfig()
    cfg.problem.dim = 3
    cfg.optimizer = anolab.preset("ano")
    cfg.steps = 30
    cfg.record_every = 30
    rows = anolab.noise_sweep([0.0, 0.1], [("ano", anolab.preset("ano")),
                                           ("adamw", anolab.preset("adamw"))], cfg, seeds=2, jobs=1)
    assert len(rows) == 2 * 2 * 2
    groups = []
    for row in anolab.ablation_grid(cfg, seeds=2, jobs=1):
        if not groups or groups[-1] != row.group:
            groups.append(row.group)
    assert groups[0] == "Adam" and groups[-1] == "Anolog" and len(groups) == 11


def test_config_round_trip():
    c = anolab.parse_config("problem = rosenbrock\ndim = 6\noptimizer = anolog\nsteps = 500\n")
    assert c.problem.kind == "rosenbrock"
    assert anolab.parse_config(anolab.render_config(c)) == c
    with pytest.raises(anolab.ConfigError):
        anolab.parse_config("nope = 1\n")


def test_check_exactness():
    code, report = anolab.check("exactness", 1)
    assert code == 0, report
    assert report.count("PASS") == 3
