import math

import pytest

rcp = pytest.importorskip("rcp_lab")


def test_law_closed_forms():
    par = rcp.Law.pareto(0.5, 1.0)
    assert par.tail_mass(4.0) == pytest.approx(0.5)
    assert par.truncated_first_moment(4.0) == pytest.approx(1.0)
    exp = rcp.Law.parse("exponential(rate=1)")
    assert exp.quantile_from_tail(0.5) == pytest.approx(math.log(2.0))
    with pytest.raises(ValueError):
        rcp.Law.pareto(-1.0, 1.0)


def test_conditions_verdicts():
    p = rcp.ConditionParams()
    p.eps1 = 0.15
    p.eps2 = 0.25
    p.t0 = 1.0
    p.r2 = 1.0
    reports = rcp.check_conditions(
        rcp.Law.pareto(0.5, 1.0), p, [1e2, 1e3, 1e4], [1.0, 3.0, 6.0]
    )
    assert [r.condition for r in reports] == ["A", "B", "C"]
    assert all(r.verdict for r in reports)


def test_gap_probability_oracle():
    g = rcp.estimate_gap_probability(rcp.Law.exponential(1.0), 1.0, 2.0, 20000, 3)
    assert g.est.ci_low <= math.exp(-1.0) <= g.est.ci_high


def test_batch_deterministic():
    cfg = rcp.SimConfig(rcp.Law.pareto(0.5, 1.0))
    cfg.lambda_ = 0.5
    cfg.half_width = 20
    cfg.horizon = 10.0
    cfg.replicas = 100
    cfg.seed = 7
    a = rcp.run_batch(cfg)
    b = rcp.run_batch(cfg)
    assert a.survival.p_hat == b.survival.p_hat
    assert 0.0 <= a.survival.p_hat <= 1.0


def test_survival_curve_monotone():
    cfg = rcp.SimConfig(rcp.Law.exponential(1.0))
    cfg.lambda_ = 0.3
    cfg.half_width = 30
    cfg.replicas = 300
    cfg.seed = 11
    curve = rcp.survival_curve(cfg, [1.0, 4.0, 16.0])
    assert curve.pathwise_violations == 0
    ps = [row.est.p_hat for row in curve.rows]
    assert ps == sorted(ps, reverse=True)
