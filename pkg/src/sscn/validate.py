"""Self-contained validation suites bound to the CLI `validate` subcommand."""

from dataclasses import dataclass

import numpy as np

from .model import CubicModel, ExactCurvature, model_value
from .objectives import Quadratic, SaddleQuartic, finite_diff_check
from .optimizer import FixedM, OptimizerConfig, StopRule, run
from .problems import make_synthetic_logistic
from .sampling import (
    Constant,
    CoordinateSubset,
    concentration_probe,
    enumerate_grad_gap,
    enumerate_hessian_gap,
    exact_grad_gap,
    exact_hessian_gap,
)
from .subproblem import HardCaseError, brute_force_oracle, closed_form_zero_curvature, solve_alpha_dual, solve_global


@dataclass
class CheckResult:
    label: str
    passed: bool
    detail: str


@dataclass
class SuiteReport:
    suite: str
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


def _model(g, Q, M):
    g = np.atleast_1d(np.asarray(g, dtype=np.float64))
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    subset = CoordinateSubset(np.arange(g.size), g.size)
    return CubicModel(0.0, g, Q, M, subset)


def _random_model(rng, tau, m_range=(0.1, 10.0)):
    A = rng.normal(size=(tau, tau))
    Q = 1.5 * (A + A.T)
    g = rng.normal(size=tau) * rng.uniform(0.1, 3.0)
    M = rng.uniform(*m_range)
    return _model(g, Q, M)


def _oracle_radius(m):
    lam1 = float(np.linalg.eigvalsh(m.Q_S)[0])
    gnorm = float(np.linalg.norm(m.g_S))
    return 1.2 * (-lam1 + np.sqrt(lam1 * lam1 + 2.0 * m.M * gnorm)) / m.M + 0.1


def suite_subproblem(seed=0):
    rng = np.random.default_rng(seed)
    checks = []

    m = _model([0.0], [[-1.0]], 2.0)
    s = solve_global(m)
    val = float(model_value(m, s.h_star))
    ok = abs(s.r - 1.0) <= 1e-10 and abs(val - (-1.0 / 6.0)) <= 1e-10 and s.hard_case
    checks.append(CheckResult("hard-case fixture r=1, value=-1/6", ok,
                              f"r={s.r!r} value={val!r} hard={s.hard_case}"))

    worst_gap = 0.0
    worst_resid = 0.0
    worst_cert = 0.0
    for i in range(60):
        m = _random_model(rng, int(rng.integers(1, 4)))
        s = solve_global(m)
        _, v_oracle = brute_force_oracle(m, _oracle_radius(m), 101)
        worst_gap = max(worst_gap, model_value(m, s.h_star) - v_oracle)
        worst_resid = max(worst_resid, s.stationarity_residual / max(1.0, np.linalg.norm(m.g_S)))
        worst_cert = max(worst_cert, -s.min_shifted_eig)
    checks.append(CheckResult("oracle equivalence on 60 random tau<=3 instances",
                              worst_gap <= 1e-6, f"worst value gap {worst_gap:.3e}"))
    checks.append(CheckResult("relative stationarity residual <= 1e-5",
                              worst_resid <= 1e-5, f"worst residual {worst_resid:.3e}"))
    checks.append(CheckResult("shifted-eigenvalue certificate >= -1e-8",
                              worst_cert <= 1e-8, f"worst violation {worst_cert:.3e}"))

    worst_dual = 0.0
    n_dual = 0
    while n_dual < 20:
        m = _random_model(rng, 3)
        try:
            d = solve_alpha_dual(m)
        except HardCaseError:
            continue
        n_dual += 1
        worst_dual = max(worst_dual, abs(model_value(m, d.h_star) - model_value(m, solve_global(m).h_star)))
    checks.append(CheckResult("dual cross-check agrees within 1e-7",
                              worst_dual <= 1e-7, f"worst value deviation {worst_dual:.3e}"))

    worst_cd = 0.0
    for _ in range(20):
        tau = int(rng.integers(1, 6))
        g = rng.normal(size=tau)
        M = rng.uniform(0.1, 10.0)
        m = _model(g, np.zeros((tau, tau)), M)
        h_closed = closed_form_zero_curvature(g, M)
        worst_cd = max(worst_cd, float(np.abs(solve_global(m).h_star - h_closed).max()))
    checks.append(CheckResult("zero-curvature closed form matches solver to 1e-10",
                              worst_cd <= 1e-10, f"worst deviation {worst_cd:.3e}"))
    return SuiteReport("subproblem", checks)


def suite_concentration(seed=0, trials=100_000):
    rng = np.random.default_rng(seed)
    checks = []

    g4 = np.ones(4)
    enum = enumerate_grad_gap(g4, 2)
    formula = exact_grad_gap(g4, 2)
    checks.append(CheckResult("n=4 all-ones gradient gap equals 2 exactly",
                              enum == 2.0 and formula == 2.0,
                              f"enumeration={enum!r} formula={formula!r}"))

    H4 = np.eye(4)
    enum_h = enumerate_hessian_gap(H4, 2)
    mixed = exact_hessian_gap(H4, 2)
    checks.append(CheckResult("n=4 identity-matrix gap matches the exact identity",
                              abs(enum_h - mixed) <= 1e-12, f"enumeration={enum_h!r} identity={mixed!r}"))

    n = 50
    g = rng.normal(size=n)
    A = rng.normal(size=(n, n))
    H = 0.5 * (A + A.T)
    for tau in (5, 25):
        mc_g, mc_h = concentration_probe(g, H, tau, trials, rng)
        g_exact = exact_grad_gap(g, tau)
        h_exact = exact_hessian_gap(H, tau)
        rel_g = abs(mc_g - g_exact) / g_exact
        rel_h = abs(mc_h - h_exact) / h_exact
        checks.append(CheckResult(f"MC gradient gap within 1% (tau={tau})", rel_g <= 0.01,
                                  f"rel err {rel_g:.4%}"))
        checks.append(CheckResult(f"MC curvature gap within 2% (tau={tau})", rel_h <= 0.02,
                                  f"rel err {rel_h:.4%}"))
    return SuiteReport("concentration", checks)


def suite_gradcheck(seed=0):
    rng = np.random.default_rng(seed)
    checks = []
    obj = make_synthetic_logistic(n_features=30, n_samples=120, lam=0.1, seed=3)

    worst_g = 0.0
    worst_h = 0.0
    for _ in range(5):
        x = rng.uniform(-1, 1, obj.n)
        idx = np.sort(rng.choice(obj.n, size=8, replace=False))
        ge, he = finite_diff_check(obj, x, idx, 1e-5)
        worst_g = max(worst_g, ge / (1.0 + float(np.abs(obj.grad_subset(x, idx)).max())))
        worst_h = max(worst_h, he / (1.0 + float(np.abs(obj.hessian_block(x, idx)).max())))
    checks.append(CheckResult("logistic gradient FD audit at 1e-6 relative",
                              worst_g <= 1e-6, f"worst rel err {worst_g:.3e}"))
    checks.append(CheckResult("logistic curvature FD audit at 1e-4 relative",
                              worst_h <= 1e-4, f"worst rel err {worst_h:.3e}"))

    quad = Quadratic(np.diag(np.linspace(1, 10, 6)), rng.normal(size=6))
    x = rng.normal(size=6)
    idx = np.arange(6)
    ge, _ = finite_diff_check(quad, x, idx, 1e-5)
    bound = 1e-8 * (1.0 + float(np.linalg.norm(quad.grad_full(x))))
    checks.append(CheckResult("quadratic FD is exact to rounding", ge <= bound,
                              f"err {ge:.3e} bound {bound:.3e}"))

    sad = SaddleQuartic(0.25, n=4)
    _, he = finite_diff_check(sad, np.zeros(4), np.array([0, 1]), 1e-5)
    lam_min = float(np.linalg.eigvalsh(sad.hessian_block(np.zeros(4), np.array([0, 1])))[0])
    checks.append(CheckResult("saddle block at origin: FD <= 1e-6 and lambda_min = -2",
                              he <= 1e-6 and abs(lam_min + 2.0) <= 1e-12,
                              f"hess err {he:.3e} lambda_min {lam_min!r}"))
    return SuiteReport("gradcheck", checks)


def suite_lemma1(seed=0):
    checks = []
    obj = make_synthetic_logistic(n_features=50, n_samples=200, lam=0.1, seed=7)
    L2 = obj.estimate_hess_lipschitz(np.random.default_rng(11), n_pairs=20)
    M = 2.0 * L2

    decreases = []

    def observe(info):
        decreases.append((info.f_before - info.f_after, np.linalg.norm(info.h) ** 3))

    cfg = OptimizerConfig(m_policy=FixedM(M), schedule=Constant(25),
                          curvature=ExactCurvature(),
                          stop=StopRule(grad_tol=1e-300, max_iters=60), seed=seed)
    run(obj, np.zeros(obj.n), cfg, observer=observe)
    worst = min(dec - (M / 12.0) * h3 for dec, h3 in decreases)
    checks.append(CheckResult("per-step decrease >= (M/12)||h||^3 - 1e-12 over 60 steps",
                              worst >= -1e-12, f"worst slack {worst:.3e} (M={M:.3f})"))
    return SuiteReport("lemma1", checks)


SUITES = {
    "subproblem": suite_subproblem,
    "concentration": suite_concentration,
    "gradcheck": suite_gradcheck,
    "lemma1": suite_lemma1,
}


def run_suite(name, seed=0):
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed=seed)


def format_report(report):
    lines = [f"suite: {report.suite}"]
    for c in report.checks:
        lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.label}: {c.detail}")
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"
