"""Acceptance gate: one test per shipping criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

import math
import time

import numpy as np
import pytest

import sscn.cli as cli
from sscn.model import CubicModel, ExactCurvature, model_value
from sscn.optimizer import (
    AdaptiveDoubling,
    FixedM,
    OptimizerConfig,
    StopRule,
    Termination,
    m_k_theory,
    run,
    theory_rule_for,
)
from sscn.baselines import full_cubic_newton_run
from sscn.objectives import finite_diff_check
from sscn.problems import make_saddle, make_synthetic_logistic
from sscn.sampling import (
    Adaptive,
    Constant,
    CoordinateSubset,
    concentration_probe,
    enumerate_grad_gap,
    p2_pair_probability,
)
from sscn.subproblem import brute_force_oracle, solve_global

TOL_GRAD = 1e-6


def _report(num, label):
    print(f"\nACCEPTANCE {num:>2} PASS: {label}")


@pytest.fixture(scope="module")
def fixture_objective():
    return make_synthetic_logistic(n_features=50, n_samples=200, lam=0.1, seed=7)


def _model_of(g, Q, M):
    g = np.atleast_1d(np.asarray(g, float))
    Q = np.atleast_2d(np.asarray(Q, float))
    return CubicModel(0.0, g, Q, M, CoordinateSubset(np.arange(g.size), g.size))


def test_criterion_01_subproblem_exactness():
    rng = np.random.default_rng(11)
    t0 = time.perf_counter()
    for i in range(200):
        tau = 1 + i % 3
        A = rng.normal(size=(tau, tau))
        Q = 1.5 * (A + A.T)  # indefinite allowed
        g = rng.normal(size=tau) * rng.uniform(0.1, 3.0)
        M = rng.uniform(0.1, 10.0)
        m = _model_of(g, Q, M)
        s = solve_global(m, tol=1e-5)

        lam1 = float(np.linalg.eigvalsh(Q)[0])
        radius = 1.2 * (-lam1 + math.sqrt(lam1 * lam1 + 2.0 * M * np.linalg.norm(g))) / M + 0.1
        _, v_oracle = brute_force_oracle(m, radius, 101)
        assert model_value(m, s.h_star) <= v_oracle + 1e-6
        assert s.stationarity_residual <= 1e-5 * max(1.0, float(np.linalg.norm(g)))
        assert s.min_shifted_eig >= -1e-8
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _report(1, f"subproblem exactness on 200 instances in {elapsed:.1f}s")


def test_criterion_02_hard_case_fixture():
    m = _model_of([0.0], [[-1.0]], 2.0)
    s = solve_global(m)
    assert abs(s.r - 1.0) <= 1e-10
    assert abs(model_value(m, s.h_star) - (-1.0 / 6.0)) <= 1e-10
    _report(2, "hard-case fixture r=1, model value -1/6")


def test_criterion_03_cd_recovery_identity():
    rng = np.random.default_rng(5)
    for _ in range(50):
        tau = int(rng.integers(1, 8))
        g = rng.normal(size=tau) * rng.uniform(0.1, 5.0)
        M = rng.uniform(0.1, 10.0)
        m = _model_of(g, np.zeros((tau, tau)), M)
        h = solve_global(m).h_star
        expected = -math.sqrt(2.0 / (M * np.linalg.norm(g))) * g
        assert np.abs(h - expected).max() <= 1e-10
    _report(3, "zero-curvature step equals the closed-form scaled gradient")


def test_criterion_04_concentration_identities():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    n, trials = 50, 100_000
    g = rng.normal(size=n)
    A = rng.normal(size=(n, n))
    H = 0.5 * (A + A.T)
    g_total = float(g @ g)
    h_total = float((H * H).sum())
    for tau in (1, 5, 25, 50):
        mc_g, mc_h = concentration_probe(g, H, tau, trials, rng)
        target_g = (1.0 - tau / n) * g_total
        target_h = (1.0 - p2_pair_probability(n, tau)) * h_total
        if tau == n:
            assert mc_g == 0.0 and mc_h == 0.0 and target_g == 0.0 and target_h == 0.0
        else:
            assert abs(mc_g - target_g) <= 0.01 * target_g
            assert abs(mc_h - target_h) <= 0.02 * target_h
    # exhaustive fixture: all-ones gradient on n=4, tau=2
    assert enumerate_grad_gap(np.ones(4), 2) == 2.0
    mc_fix, _ = concentration_probe(np.ones(4), np.zeros((4, 4)), 2, 1000, rng)
    assert mc_fix == 2.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report(4, f"sampling-gap identities within 1%/2% in {elapsed:.1f}s")


def test_criterion_05_lemma1_decrease(fixture_objective):
    obj = fixture_objective
    L2 = obj.estimate_hess_lipschitz(np.random.default_rng(11), n_pairs=20)
    M = 2.0 * L2
    steps = []
    cfg = OptimizerConfig(m_policy=FixedM(M), schedule=Constant(25),
                          curvature=ExactCurvature(),
                          stop=StopRule(grad_tol=1e-300, max_iters=200), seed=21,
                          full_grad_every=50)
    trace = run(obj, np.zeros(50), cfg,
                observer=lambda i: steps.append((i.f_before, i.f_after, np.linalg.norm(i.h))))
    assert len(trace.records) == 200
    worst = min(fb - fa - (M / 12.0) * h**3 for fb, fa, h in steps)
    assert worst >= -1e-12
    _report(5, f"per-step decrease >= (M/12)||h||^3 over 200 iterations (worst slack {worst:.1e})")


def test_criterion_06_full_cr_equivalence(fixture_objective):
    obj = fixture_objective
    stop = StopRule(grad_tol=1e-300, max_iters=50)
    cfg = OptimizerConfig(m_policy=AdaptiveDoubling(), schedule=Constant(50), stop=stop, seed=13)
    xs_subspace, xs_full = [], []
    run(obj, np.zeros(50), cfg, observer=lambda i: xs_subspace.append(i.x_next))
    full_cubic_newton_run(obj, np.zeros(50), cfg, observer=lambda i: xs_full.append(i.x_next))
    assert len(xs_subspace) == len(xs_full) == 50
    worst = max(np.abs(a - b).max() for a, b in zip(xs_subspace, xs_full))
    assert worst <= 1e-10
    _report(6, f"tau=n run matches the full cubic-Newton entry point (max gap {worst:.1e})")


def test_criterion_07_convergence(fixture_objective):
    obj = fixture_objective
    x0 = np.zeros(50)

    cfg_full = OptimizerConfig(m_policy=AdaptiveDoubling(), schedule=Constant(50),
                               stop=StopRule(TOL_GRAD, 200), seed=1, full_grad_every=1)
    tr_full = run(obj, x0, cfg_full)
    assert tr_full.termination is Termination.GRAD_TOL
    assert len(tr_full.records) <= 200
    fs = [tr_full.f_initial] + [r.f_value for r in tr_full.records]
    assert all(b < a for a, b in zip(fs, fs[1:]))

    iters = []
    for seed in range(1, 6):
        cfg_half = OptimizerConfig(m_policy=AdaptiveDoubling(), schedule=Constant(25),
                                   stop=StopRule(TOL_GRAD, 600), seed=seed, full_grad_every=1)
        tr = run(obj, x0, cfg_half)
        assert tr.termination is Termination.GRAD_TOL
        fs = [tr.f_initial] + [r.f_value for r in tr.records]
        assert all(b < a for a, b in zip(fs, fs[1:]))
        iters.append(len(tr.records))
    med = float(np.median(iters))
    assert med <= 600
    _report(7, f"grad tol 1e-6: tau=n in {len(tr_full.records)} iters; tau=n/2 median {med:.0f}")


def test_criterion_08_rate_interpolation_trend(fixture_objective):
    obj = fixture_objective
    medians = []
    for tau in (5, 25, 50):
        its = []
        for seed in range(1, 6):
            cfg = OptimizerConfig(m_policy=AdaptiveDoubling(), schedule=Constant(tau),
                                  stop=StopRule(1e-4, 2000), seed=seed, full_grad_every=1)
            tr = run(obj, np.zeros(50), cfg)
            assert tr.termination is Termination.GRAD_TOL
            its.append(len(tr.records))
        medians.append(float(np.median(its)))
    assert medians[0] >= medians[1] >= medians[2]
    _report(8, f"median iterations to 1e-4 nonincreasing over tau grid: {medians}")


def test_criterion_09_second_order_stationarity():
    sad = make_saddle(n=10, scale=0.25)
    x0 = 1e-3 * np.ones(10)
    good = 0
    for seed in range(10):
        cfg = OptimizerConfig(m_policy=AdaptiveDoubling(), schedule=Adaptive(c=1.0),
                              stop=StopRule(TOL_GRAD, 1000), seed=seed, full_grad_every=1)
        tr = run(sad, x0, cfg)
        lam_min = float(np.linalg.eigvalsh(sad.hessian_full(tr.final_x))[0])
        if tr.final_grad_norm <= 1e-6 and lam_min >= -1e-3:
            good += 1
    assert good >= 9
    _report(9, f"saddle escaped with second-order certificate in {good}/10 seeded runs")


def test_criterion_10_theory_rule(fixture_objective):
    assert m_k_theory(0.0, 1.0, 1.0, 24.5) == 3.0
    obj = fixture_objective
    L1 = obj.estimate_grad_lipschitz()
    L2 = obj.estimate_hess_lipschitz(np.random.default_rng(11), n_pairs=20)
    infos = []
    cfg = OptimizerConfig(m_policy=theory_rule_for(ExactCurvature(), L1, L2),
                          schedule=Constant(25), stop=StopRule(1e-300, 100), seed=3,
                          full_grad_every=25)
    trace = run(obj, np.zeros(50), cfg, observer=infos.append)
    assert len(trace.records) == 100
    assert all(r.m_retries == 0 for r in trace.records)
    assert all(i.f_after <= i.model_value_at_h for i in infos)
    _report(10, "theory M rule: exact value 3 and progress condition with zero retries")


def test_criterion_11_derivative_audits(fixture_objective):
    obj = fixture_objective
    rng = np.random.default_rng(17)
    for _ in range(10):
        x = rng.uniform(-1, 1, 50)
        idx = np.sort(rng.choice(50, size=10, replace=False))
        ge, he = finite_diff_check(obj, x, idx, 1e-5)
        assert ge <= 1e-6 * (1.0 + float(np.abs(obj.grad_subset(x, idx)).max()))
        assert he <= 1e-4 * (1.0 + float(np.abs(obj.hessian_block(x, idx)).max()))
    _report(11, "finite-difference audits at 10 random points (1e-6 grad, 1e-4 curvature)")


def test_criterion_12_harness_contract(tmp_path):
    for suite in ("subproblem", "concentration", "gradcheck", "lemma1"):
        assert cli.main(["validate", suite, "--out", str(tmp_path / "val")]) == 0

    cfg = tmp_path / "two.cfg"
    cfg.write_text("""
objective.kind = synthetic_logistic
objective.n_features = 30
objective.n_samples = 100
objective.lambda = 0.1
run.seeds = 4
run.max_iters = 30
run.grad_tol = 1e-6
output.timing = none
method.newton_sub.algorithm = sscn
method.newton_sub.schedule.tau = 0.5
method.cd.algorithm = cd
method.cd.schedule.tau = 0.5
""")
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert cli.main(["compare", str(cfg), "--out", str(out1)]) == 0
    header = (out1 / "compare.csv").read_text().splitlines()[0]
    assert header == ",".join(cli.COMPARE_COLUMNS)
    assert cli.main(["compare", str(cfg), "--out", str(out2)]) == 0
    for name in ("newton_sub-s4.csv", "cd-s4.csv", "compare.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    _report(12, "validate suites exit 0; compare CSV schema stable and byte-reproducible")
