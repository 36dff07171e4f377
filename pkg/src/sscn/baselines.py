"""First-order coordinate descent with Armijo backtracking, and the full
cubic-Newton entry point realized as the subspace method with tau = n."""

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .model import ExactCurvature
from .objectives import as_indices
from .optimizer import IterationRecord, RunAbort, RunTrace, StepInfo, StopRule, Termination, run
from .sampling import Constant, ScheduleState, next_tau, sample_uniform


@dataclass(frozen=True)
class ArmijoParams:
    eta0: float = 1.0
    backtrack: float = 0.5
    c: float = 0.5
    max_backtracks: int = 50

    def __post_init__(self):
        if self.eta0 <= 0 or not 0 < self.backtrack < 1 or not 0 < self.c < 1:
            raise ValueError("require eta0 > 0, backtrack and c in (0, 1)")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be >= 0")


@dataclass(frozen=True)
class CdConfig:
    schedule: object = None
    armijo: ArmijoParams = ArmijoParams()
    stop: StopRule = StopRule()
    seed: int = 0
    full_grad_every: int = 10


def cd_step(obj, x, subset, cfg, *, state=None, iteration=0, cum_coord_cost=0,
            elapsed=0.0, observer=None):
    """Steepest descent on the sampled coordinates with Armijo sufficient decrease.

    Accepts the first eta with f(x) - f(x + eta d) >= c * eta * ||g_S||^2,
    d = -g_S; on exhaustion takes eta = 0 (no move). Cost accounting is
    first-order: tau per iteration.
    """
    if state is None:
        state = obj.init_state(x)
    idx = as_indices(subset)
    f_x = float(obj.value_state(state))
    if not np.isfinite(f_x):
        raise RunAbort(f"non-finite objective value at iteration {iteration}")
    g = obj.grad_subset_state(state, idx)
    g_norm = float(np.linalg.norm(g))

    eta = 0.0
    backtracks = 0
    f_after = f_x
    if g_norm > 0.0:
        d = -g
        need = cfg.armijo.c * g_norm * g_norm
        eta_try = cfg.armijo.eta0
        while True:
            f_trial = float(obj.trial_value(state, idx, eta_try * d))
            if not np.isfinite(f_trial):
                f_trial = math.inf
            if f_x - f_trial >= need * eta_try:
                eta = eta_try
                f_after = f_trial
                break
            if backtracks >= cfg.armijo.max_backtracks:
                break
            backtracks += 1
            eta_try *= cfg.armijo.backtrack

    if eta > 0.0:
        h = -eta * g
        obj.commit_step(state, idx, h)
    else:
        h = np.zeros(idx.size)

    tau = int(idx.size)
    record = IterationRecord(
        k=iteration, tau=tau, f_value=f_after, grad_subset_norm=g_norm,
        full_grad_norm=None, step_norm=eta * g_norm, M=eta, coord_cost=tau,
        cum_coord_cost=cum_coord_cost + tau, elapsed_seconds=elapsed,
        m_retries=backtracks,
    )
    if observer is not None:
        observer(StepInfo(k=iteration, subset=subset, h=h, x_next=state.x.copy(),
                          f_before=f_x, f_after=f_after, model_value_at_h=f_x,
                          progress_ok=eta > 0.0, retries=backtracks, M=eta))
    return state.x, record


def cd_run(obj, x0, cfg, observer=None):
    """Coordinate-descent driver; shares the seeding rule with the subspace
    method so equal seeds visit identical subset sequences."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (obj.n,):
        raise ValueError(f"x0 must have shape ({obj.n},)")
    schedule = cfg.schedule if cfg.schedule is not None else Constant(obj.n)

    if not 0 <= cfg.seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    rng = np.random.default_rng(cfg.seed)
    state = obj.init_state(x0)
    f_initial = float(obj.value_state(state))
    if not np.isfinite(f_initial):
        raise RunAbort("non-finite objective at x0")

    sched_state = ScheduleState()
    records = []
    start = time.monotonic()
    cum_cost = 0
    k = 0
    fg = None
    termination = None
    while True:
        if k % cfg.full_grad_every == 0:
            fg = float(np.linalg.norm(obj.grad_full(state.x)))
            if fg <= cfg.stop.grad_tol:
                termination = Termination.GRAD_TOL
                break
        else:
            fg = None
        if k >= cfg.stop.max_iters:
            termination = Termination.MAX_ITERS
            break
        if time.monotonic() - start > cfg.stop.max_seconds:
            termination = Termination.MAX_TIME
            break

        tau = next_tau(schedule, sched_state, obj.n)
        subset = sample_uniform(obj.n, tau, rng)
        _, record = cd_step(obj, state.x, subset, cfg, state=state, iteration=k,
                            cum_coord_cost=cum_cost,
                            elapsed=time.monotonic() - start, observer=observer)
        record.full_grad_norm = fg
        record.elapsed_seconds = time.monotonic() - start
        records.append(record)
        cum_cost = record.cum_coord_cost
        sched_state = replace(sched_state, k=k + 1, prev_step_norm=record.step_norm)
        k += 1

    final_grad = fg if fg is not None else float(np.linalg.norm(obj.grad_full(state.x)))
    if not records:
        records.append(IterationRecord(
            k=0, tau=0, f_value=f_initial, grad_subset_norm=final_grad,
            full_grad_norm=final_grad, step_norm=0.0, M=0.0, coord_cost=0,
            cum_coord_cost=0, elapsed_seconds=time.monotonic() - start, m_retries=0,
        ))
    elif records[-1].full_grad_norm is None:
        records[-1].full_grad_norm = final_grad

    return RunTrace(config=cfg, f_initial=f_initial, records=records,
                    final_x=state.x.copy(), termination=termination,
                    final_grad_norm=final_grad)


def full_cubic_newton_run(obj, x0, config, observer=None):
    """Full cubic Newton: the subspace method with all coordinates and exact
    curvature. Named entry point for the benchmark grid."""
    config = replace(config, schedule=Constant(obj.n), curvature=ExactCurvature())
    return run(obj, x0, config, observer=observer)
