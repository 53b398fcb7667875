import math

import pytest
from hypothesis import given, strategies as st

from hamcone import Grid, compute_constants, example_system
from hamcone.constants import ConstantsReport
from hamcone.expr import Expression
from hamcone.hypotheses import (Check, HypothesisConfig, Status, beta_slack, check_H1_to_H5, check_H6, check_H7,
                                check_H7_star, check_system, check_thm23, check_thm25, find_beta, find_rho,
                                lambda_supremum, plan_thm23, required_M)

from conftest import HALF_PI

PAPER_GAMMAS = ConstantsReport.from_values((1.5, 0.625), (1.0, 19 / 56))
LAMS = [(a, b) for a in (0.1, 1.0, 10.0) for b in (0.1, 1.0, 10.0)]


def f(text):
    return Expression.parse(text, ["u1", "u2"])


EXF1, EXF2 = f("(2 + sin(u2))*u1^2"), f("(2 + sin(u1))*u2^2")


def test_failed_check_needs_witness():
    with pytest.raises(ValueError):
        Check("x", Status.FAIL, -1.0)


def test_h6_example():
    rep = check_H6(EXF1, EXF2, HALF_PI, HALF_PI)
    assert rep.passed and all(c.status is Status.HEURISTIC_PASS for c in rep)


def test_h6_decreasing_caught():
    rep = check_H6(f("u1 - u2"), EXF2, 1.0, 1.0)
    bad = rep.failures
    assert len(bad) == 1 and bad[0].witness["f(v)"] < bad[0].witness["f(u)"]


def test_h6_constant():
    c = check_H6(f("5"), f("5"), 1.0, 1.0).checks[0]
    assert c.status is Status.HEURISTIC_PASS and c.margin == 0.0


def test_h7_examples():
    sq1, sq2 = f("u1^2"), f("u2^2")
    assert check_H7(sq1, sq2, 0.5, 10.0, 5.0).passed
    assert check_H7(sq1, sq2, 0.5, 10.0, 5.0).checks[0].margin == pytest.approx(5.0)
    rep = check_H7(sq1, sq2, 0.5, 3.0, 5.0)
    assert not rep.passed and rep.checks[0].witness["inf"] == pytest.approx(3.0)
    assert not check_H7(f("0"), sq2, 0.5, 10.0, 1e-3).passed


def test_find_rho():
    rho = find_rho(f("u1^2"), f("u2^2"), 0.5, 5.0)
    assert rho == 8.0
    assert find_rho(f("0"), f("0"), 0.5, 1.0) is None


def test_h7_star_examples():
    assert check_H7_star(EXF1, EXF2, (10, 100, 1000)).passed
    ratios = check_H7_star(EXF1, EXF2, (10, 100, 1000)).checks[0].detail
    assert "ratios" in ratios
    lin = check_H7_star(f("u1"), EXF2, (10, 100, 1000))
    assert lin.failures[0].name.startswith("H7*[1]")
    # log growth is slow: log(1 + 1000) ~ 6.9, so the threshold is lowered
    assert check_H7_star(f("u1*log(1 + u1)"), f("u2*log(1 + u2)"), (10, 100, 1000), threshold=5.0).passed
    assert not check_H7_star(f("u1*log(1 + u1)"), f("u2*log(1 + u2)"), (10, 100, 1000)).passed


def test_h1_to_h5_example(exf_system, grid):
    rep = check_H1_to_H5(exf_system, grid, HALF_PI)
    assert rep.passed and len(rep) == 10


def test_h1_catches_nonpositive_lambda(grid):
    rep = check_H1_to_H5(example_system(lam=(0.0, 1.0)), grid, 1.0, density=16)
    assert rep["H1[1] lambda > 0"].status is Status.FAIL


def test_h4_catches_negative_f(grid):
    rep = check_H1_to_H5(example_system(f1="u1 - 1"), grid, 1.0, density=16)
    assert rep["H4[1] f >= 0"].status is Status.FAIL


def test_lambda_sup_unbounded_for_example(exf_system):
    sups = lambda_supremum(exf_system, exf_system.cone, PAPER_GAMMAS, HALF_PI, HALF_PI)
    assert all(s.unbounded for s in sups)
    assert all(s.admits(1e9) for s in sups)


def test_lambda_sup_affine():
    sys = example_system(f1="1 + u1 + u2", f2="1 + u1 + u2")
    sup = lambda_supremum(sys, sys.cone, PAPER_GAMMAS, 1.0, 1.0)[0]
    assert not sup.unbounded and sup.boundary_trend
    assert sup.value < 1 / 6 and sup.value == pytest.approx(1 / 6, abs=2e-3)
    assert sup.at[0] > 0.99 and sup.at[1] < 0.01
    assert sup.admits(0.1) and not sup.admits(0.2)


def test_lambda_sup_zero_of_f():
    sys = example_system(f1="abs(u1 - 0.53125)", f2="1")
    sups = lambda_supremum(sys, sys.cone, PAPER_GAMMAS, 1.0, 1.0, density=16)
    assert sups[0].unbounded and not sups[1].unbounded


@given(st.floats(1e-3, 1e3))
def test_lambda_sup_inverse_scaling(kappa):
    base = example_system(f1="1 + u1 + u2", f2="2 + u1*u2")
    scaled = base.with_nonlinearities(base.equations[0].f.scaled(kappa), base.equations[1].f.scaled(kappa))
    a = lambda_supremum(base, base.cone, PAPER_GAMMAS, 1.0, 2.0, density=16, levels=2)
    b = lambda_supremum(scaled, scaled.cone, PAPER_GAMMAS, 1.0, 2.0, density=16, levels=2)
    for x, y in zip(a, b):
        assert y.value * kappa == pytest.approx(x.value, rel=1e-12)
        assert x.unbounded == y.unbounded


def test_beta_slack_examples(exf_system):
    s1, _ = beta_slack(exf_system, 0.5, PAPER_GAMMAS, (0.1, 0.1))
    assert s1 == pytest.approx(0.1 - 1.5 * (2 + math.sin(0.1)) * 0.01 - 0.05)
    assert s1 > 0.018
    sys = example_system(lam=(0.1, 1.0), f1="1 + u1 + u2")
    assert beta_slack(sys, 0.5, PAPER_GAMMAS, (0.9, 0.05))[0] > 0


def test_find_beta_none_for_huge_lambda():
    sys = example_system(lam=(1e6, 1e6), f1="1 + u1", f2="1 + u2")
    assert find_beta(sys, sys.cone, PAPER_GAMMAS, HALF_PI, HALF_PI) is None


@given(st.floats(0.01, 100.0), st.floats(0.01, 100.0))
def test_find_beta_reverifies(lam1, lam2):
    sys = example_system(lam=(lam1, lam2))
    cand = find_beta(sys, sys.cone, PAPER_GAMMAS, HALF_PI, HALF_PI, density=16)
    assert cand is not None
    slack = beta_slack(sys, sys.cone.c, PAPER_GAMMAS, cand.beta)
    assert min(slack) > 0
    assert slack == pytest.approx(cand.slack, abs=1e-14)


def test_required_M(exf_system):
    assert required_M(exf_system, PAPER_GAMMAS) == pytest.approx(56 / 19)


def test_thm23_example(exf_system, grid):
    rho = find_rho(EXF1, EXF2, 0.5, 4.0)
    rep = check_thm23(exf_system, exf_system.cone, (0.1, 0.1), 0.02, rho, grid, PAPER_GAMMAS, M=4.0)
    assert rep.passed, rep.format()


def test_thm23_radius_too_large(exf_system, grid):
    rep = check_thm23(exf_system, exf_system.cone, (0.1, 0.1), 0.05, 8.0, grid, PAPER_GAMMAS, M=4.0)
    assert rep["(a) B[beta,R] in K, R < rho"].status is Status.FAIL


def test_thm23_non_monotone(grid):
    sys = example_system(f1="(2 + sin(u2))*u1^2 + 0.01*cos(40*u2)")
    rep = check_thm23(sys, sys.cone, (0.1, 0.1), 0.02, 8.0, grid, PAPER_GAMMAS, M=4.0)
    bad = [c for c in rep.failures if c.name.startswith("(c)")]
    assert bad and "u" in bad[0].witness


def test_thm23_small_M(exf_system, grid):
    rep = check_thm23(exf_system, exf_system.cone, (0.1, 0.1), 0.02, 8.0, grid, PAPER_GAMMAS, M=2.0)
    assert rep["(d) M > max 1/(lam_i gamma_i,*)"].status is Status.FAIL


@pytest.mark.parametrize("lam", LAMS)
def test_thm23_pipeline_every_lambda(lam, grid):
    sys = example_system(lam=lam)
    gammas = compute_constants(sys, grid)
    plan = plan_thm23(sys, sys.cone, gammas, HALF_PI, HALF_PI)
    assert plan is not None
    assert plan.M > required_M(sys, gammas) and plan.M > max(1.0, 56 / 19)
    rep = check_thm23(sys, sys.cone, plan.beta, plan.R, plan.rho, grid, gammas, plan.M)
    assert rep.passed, rep.format()


def test_thm25_decreasing(grid):
    sys = example_system(f1="1/(1 + u1 + u2)", f2="1/(1 + u1 + u2)")
    assert check_thm25(sys, sys.cone, (5.0, 5.0), 1.0, grid).passed


def test_thm25_increasing_fails(exf_system, grid):
    rep = check_thm25(exf_system, exf_system.cone, (5.0, 5.0), 1.0, grid)
    assert any(c.name.startswith("(2')") for c in rep.failures)


def test_thm25_radius_too_big(grid):
    sys = example_system(f1="1/(1 + u1 + u2)", f2="1/(1 + u1 + u2)")
    rep = check_thm25(sys, sys.cone, (5.0, 5.0), 5.0, grid)
    assert rep["(1') 0 < R < ||alpha||"].status is Status.FAIL


def test_check_system_example(exf_system, grid):
    gammas = compute_constants(exf_system, grid)
    rep, plan, sups = check_system(exf_system, grid, HypothesisConfig(), gammas)
    assert rep.passed, rep.format()
    assert plan is not None and all(s.unbounded for s in sups)
    assert "heuristic-pass" in rep.format()


def test_hypothesis_config_validation():
    with pytest.raises(ValueError):
        HypothesisConfig(B1=0.0)
    with pytest.raises(ValueError):
        HypothesisConfig(density=8)
