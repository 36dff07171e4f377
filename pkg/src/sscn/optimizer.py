"""Subspace cubic-Newton main loop: sample, model, weight selection, exact step."""

import enum
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .model import ExactCurvature, LazyAnchor, LazyCurvature, ZeroCurvature, build_model, model_value
from .sampling import Adaptive, Constant, ScheduleState, next_tau, sample_uniform, smoothed_tau_value, update_estimates
from .subproblem import solve_global


class RunAbort(RuntimeError):
    """Objective became non-finite; the run cannot continue."""


class Termination(enum.Enum):
    GRAD_TOL = "grad_tol"
    MAX_ITERS = "max_iters"
    MAX_TIME = "max_time"


@dataclass(frozen=True)
class FixedM:
    M: float

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("M must be > 0")


@dataclass(frozen=True)
class AdaptiveDoubling:
    """Grow M until the progress condition f(x+h) <= m(h) holds; then relax."""

    M0: float = 1.0
    grow: float = 2.0
    shrink: float = 0.5
    M_min: float = 1e-6

    def __post_init__(self):
        if self.M0 <= 0 or self.M_min <= 0:
            raise ValueError("M values must be > 0")
        if self.grow <= 1 or not 0 < self.shrink <= 1:
            raise ValueError("need grow > 1 and shrink in (0, 1]")


@dataclass(frozen=True)
class TheoryRule:
    """M_k = 2 L2 + 49 (sigma + L1)^2 / (2 ||grad restricted to S||)."""

    sigma: float
    L1: float
    L2: float


@dataclass(frozen=True)
class StopRule:
    grad_tol: float = 1e-6
    max_iters: int = 1000
    max_seconds: float = math.inf

    def __post_init__(self):
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class OptimizerConfig:
    m_policy: object = AdaptiveDoubling()
    schedule: object = None
    curvature: object = ExactCurvature()
    subproblem_tol: float = 1e-5
    stop: StopRule = StopRule()
    seed: int = 0
    full_grad_every: int = 10

    def __post_init__(self):
        if self.subproblem_tol <= 0:
            raise ValueError("subproblem_tol must be > 0")
        if self.full_grad_every < 1:
            raise ValueError("full_grad_every must be >= 1")


@dataclass
class IterationRecord:
    k: int
    tau: int
    f_value: float
    grad_subset_norm: float
    full_grad_norm: float | None
    step_norm: float
    M: float
    coord_cost: int
    cum_coord_cost: int
    elapsed_seconds: float
    m_retries: int


@dataclass(frozen=True)
class RunTrace:
    config: OptimizerConfig
    f_initial: float
    records: list
    final_x: np.ndarray
    termination: Termination
    final_grad_norm: float


@dataclass
class StepInfo:
    """Per-step diagnostics handed to an observer callback."""

    k: int
    subset: object
    h: np.ndarray
    x_next: np.ndarray
    f_before: float
    f_after: float
    model_value_at_h: float
    progress_ok: bool
    retries: int
    M: float
    q_spectral: float | None = None
    solution: object = None


@dataclass
class _MState:
    M: float


def m_k_theory(sigma, L1, L2, g_subset_norm):
    """Regularization weight that provably satisfies the progress condition."""
    if g_subset_norm <= 0:
        raise ValueError("zero restricted gradient: no-move step, M undefined")
    return 2.0 * L2 + 49.0 * (sigma + L1) ** 2 / (2.0 * g_subset_norm)


def theory_rule_for(curvature, L1, L2, fd_error_scale=None):
    """TheoryRule with the curvature-error bound sigma matched to the provider."""
    if isinstance(curvature, ExactCurvature):
        sigma = 0.0
    elif isinstance(curvature, ZeroCurvature):
        sigma = L1
    else:
        if fd_error_scale is None:
            raise ValueError("need fd_error_scale (~ L2 * delta) for this provider")
        sigma = fd_error_scale
    return TheoryRule(sigma=sigma, L1=L1, L2=L2)


def criticality_mu(obj, x, max_n=2000):
    """max(||grad f||^{3/2}, [-lambda_min(hess f)]_+^3); full eigensolve, small n only."""
    if obj.n > max_n:
        raise ValueError(f"criticality_mu guards n <= {max_n}")
    g = obj.grad_full(x)
    lam_min = float(np.linalg.eigvalsh(obj.hessian_full(x))[0])
    return max(float(np.linalg.norm(g)) ** 1.5, max(0.0, -lam_min) ** 3)


_MAX_M_RETRIES = 200


def sscn_step(obj, x, subset, config, m_state, *, lazy_anchor=None, iteration=0,
              state=None, cum_coord_cost=0, elapsed=0.0, observer=None):
    """One step: build the model on S, pick M, solve exactly, update x on S only.

    Returns (x_next, record). When `state` is provided it must be positioned
    at x and is advanced in place; otherwise a fresh state is created.
    """
    if state is None:
        state = obj.init_state(x)
    base = build_model(obj, state.x, subset, config.curvature, 1.0,
                       lazy_anchor=lazy_anchor, iteration=iteration, state=state)
    f_x = base.f_at_x
    if not np.isfinite(f_x):
        raise RunAbort(f"non-finite objective value at iteration {iteration}")
    g_norm = float(np.linalg.norm(base.g_S))
    policy = config.m_policy

    retries = 0
    if isinstance(policy, AdaptiveDoubling):
        M = m_state.M
        while True:
            model = base.with_weight(M)
            sol = solve_global(model, config.subproblem_tol)
            mv = model_value(model, sol.h_star)
            f_trial = f_x if sol.r == 0.0 else float(obj.trial_value(state, subset, sol.h_star))
            # roundoff slack: at stagnation both sides agree to machine precision
            if f_trial <= mv + 4.0 * np.finfo(float).eps * (1.0 + abs(f_x)):
                break
            M *= policy.grow
            retries += 1
            if retries > _MAX_M_RETRIES:
                raise RunAbort(f"progress condition unattainable at iteration {iteration}")
        m_state.M = max(policy.M_min, policy.shrink * M)
        progress_ok = True
    else:
        if isinstance(policy, FixedM):
            M = policy.M
        else:  # TheoryRule
            M = m_k_theory(policy.sigma, policy.L1, policy.L2, g_norm) if g_norm > 0 else math.nan
        if g_norm == 0.0 and math.isnan(M):
            sol = None
            mv = f_x
            f_trial = f_x
            progress_ok = True
        else:
            model = base.with_weight(M)
            sol = solve_global(model, config.subproblem_tol)
            mv = model_value(model, sol.h_star)
            f_trial = f_x if sol.r == 0.0 else float(obj.trial_value(state, subset, sol.h_star))
            progress_ok = bool(f_trial <= mv + 4.0 * np.finfo(float).eps * (1.0 + abs(f_x)))

    if not np.isfinite(f_trial):
        raise RunAbort(f"non-finite trial value at iteration {iteration}")

    if sol is not None and sol.r > 0.0 and f_trial <= f_x:
        obj.commit_step(state, subset, sol.h_star)
        f_after = f_trial
        step_norm = sol.r
        h = sol.h_star
    else:
        f_after = f_x
        step_norm = 0.0
        h = np.zeros(subset.tau)

    tau = subset.tau
    cost = tau * tau + tau
    record = IterationRecord(
        k=iteration, tau=tau, f_value=f_after, grad_subset_norm=g_norm,
        full_grad_norm=None, step_norm=step_norm, M=M, coord_cost=cost,
        cum_coord_cost=cum_coord_cost + cost, elapsed_seconds=elapsed, m_retries=retries,
    )

    if observer is not None:
        q_spec = sol.q_spectral_norm if sol is not None else 0.0
        observer(StepInfo(k=iteration, subset=subset, h=h, x_next=state.x.copy(),
                          f_before=f_x, f_after=f_after, model_value_at_h=mv,
                          progress_ok=progress_ok, retries=retries, M=M,
                          q_spectral=q_spec, solution=sol))
    return state.x, record


def _initial_m(policy):
    if isinstance(policy, AdaptiveDoubling):
        return policy.M0
    if isinstance(policy, FixedM):
        return policy.M
    return math.nan


def run(obj, x0, config, observer=None):
    """Iterate sscn_step until a stop condition; deterministic given (seed, config, data).

    The full gradient norm is a diagnostic computed every config.full_grad_every
    iterations (and at termination); the stopping test uses it.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (obj.n,):
        raise ValueError(f"x0 must have shape ({obj.n},)")
    schedule = config.schedule if config.schedule is not None else Constant(obj.n)
    config = replace(config, schedule=schedule)

    if not 0 <= config.seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    rng = np.random.default_rng(config.seed)
    state = obj.init_state(x0)
    f_initial = float(obj.value_state(state))
    if not np.isfinite(f_initial):
        raise RunAbort("non-finite objective at x0")

    sched_state = ScheduleState()
    lazy_anchor = LazyAnchor() if isinstance(config.curvature, LazyCurvature) else None
    m_state = _MState(_initial_m(config.m_policy))
    adaptive = isinstance(schedule, Adaptive)

    records = []
    start = time.monotonic()
    cum_cost = 0
    k = 0
    fg = None
    termination = None
    while True:
        if k % config.full_grad_every == 0:
            fg = float(np.linalg.norm(obj.grad_full(state.x)))
            if fg <= config.stop.grad_tol:
                termination = Termination.GRAD_TOL
                break
        else:
            fg = None
        if k >= config.stop.max_iters:
            termination = Termination.MAX_ITERS
            break
        if time.monotonic() - start > config.stop.max_seconds:
            termination = Termination.MAX_TIME
            break

        tau = next_tau(schedule, sched_state, obj.n)
        subset = sample_uniform(obj.n, tau, rng)

        info_box = []

        def capture(info):
            info_box.append(info)
            if observer is not None:
                observer(info)

        need_info = adaptive or observer is not None
        _, record = sscn_step(obj, state.x, subset, config, m_state,
                              lazy_anchor=lazy_anchor, iteration=k, state=state,
                              cum_coord_cost=cum_cost,
                              elapsed=time.monotonic() - start,
                              observer=capture if need_info else None)
        record.full_grad_norm = fg
        record.elapsed_seconds = time.monotonic() - start
        records.append(record)
        cum_cost = record.cum_coord_cost

        if adaptive:
            info = info_box[0]
            sched_state = update_estimates(sched_state, record.grad_subset_norm,
                                           info.q_spectral, schedule.ema_alpha)
            sched_state = replace(sched_state, k=k + 1, prev_step_norm=record.step_norm,
                                  prev_tau_smoothed=smoothed_tau_value(schedule, sched_state, tau))
        else:
            sched_state = replace(sched_state, k=k + 1, prev_step_norm=record.step_norm)
        k += 1

    final_grad = fg if fg is not None else float(np.linalg.norm(obj.grad_full(state.x)))
    if not records:
        # terminated before the first step; emit one diagnostic record
        records.append(IterationRecord(
            k=0, tau=0, f_value=f_initial, grad_subset_norm=final_grad,
            full_grad_norm=final_grad, step_norm=0.0, M=_initial_m(config.m_policy),
            coord_cost=0, cum_coord_cost=0,
            elapsed_seconds=time.monotonic() - start, m_retries=0,
        ))
    elif records[-1].full_grad_norm is None:
        records[-1].full_grad_norm = final_grad

    return RunTrace(config=config, f_initial=f_initial, records=records,
                    final_x=state.x.copy(), termination=termination,
                    final_grad_norm=final_grad)
