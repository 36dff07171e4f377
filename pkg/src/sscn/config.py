"""Flat key-value experiment configs with dotted sections (schema version 1)."""

import math
from dataclasses import dataclass

from .baselines import ArmijoParams, CdConfig
from .model import ExactCurvature, FiniteDiffCurvature, LazyCurvature, ZeroCurvature
from .optimizer import AdaptiveDoubling, FixedM, OptimizerConfig, StopRule, TheoryRule
from .sampling import Adaptive, Exponential, Constant


class ConfigError(ValueError):
    """Unusable config: unknown key, bad value, or missing requirement."""


def parse_config_text(text):
    """`key = value` lines; '#' starts a comment; returns an ordered flat dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _as_int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected integer, got {value!r}") from None


def _as_float(key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected number, got {value!r}") from None


def _as_bool(key, value):
    if value.lower() in ("true", "yes", "1"):
        return True
    if value.lower() in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {value!r}")


class _Section:
    """View over a flat dict that tracks which keys were consumed."""

    def __init__(self, flat, used):
        self.flat = flat
        self.used = used

    def get(self, key, default=None):
        if key in self.flat:
            self.used.add(key)
            return self.flat[key]
        return default

    def require(self, key):
        value = self.get(key)
        if value is None:
            raise ConfigError(f"missing required key {key!r}")
        return value


@dataclass(frozen=True)
class ScheduleSpec:
    """Schedule parameters before the ambient dimension n is known.

    For constant schedules tau may be 'full', an absolute size, or a fraction
    of n (a value in (0,1) in the config).
    """

    kind: str
    params: object

    def resolve(self, n):
        if self.kind == "constant":
            mode, x = self.params
            if mode == "full":
                tau = n
            elif mode == "fraction":
                tau = math.ceil(x * n)
            else:
                tau = x
            return Constant(max(1, min(n, tau)))
        return self.params

    @property
    def label(self):
        if self.kind == "constant":
            mode, x = self.params
            return "constant-tau=full" if mode == "full" else f"constant-tau={x}"
        if self.kind == "exponential":
            p = self.params
            return f"exp-tau0={p.tau0}-ce={p.c_e}-d={p.d}"
        return f"adaptive-c={self.params.c}"


@dataclass(frozen=True)
class MethodSpec:
    label: str
    algorithm: str  # sscn | cd | cr
    optimizer_config: object  # OptimizerConfig or CdConfig, schedule unset
    schedule_spec: ScheduleSpec


@dataclass(frozen=True)
class ExperimentSpec:
    objective_kind: str
    objective_kwargs: dict
    seeds: tuple
    methods: tuple
    timing: str  # wall | none
    x0_spec: str
    flat: dict


def _parse_tau(sec, key):
    raw = sec.get(key)
    if raw is None:
        return ("full", None)
    x = _as_float(key, raw)
    if 0 < x < 1:
        return ("fraction", x)
    if x >= 1 and float(x).is_integer():
        return ("absolute", int(x))
    raise ConfigError(f"{key}: expected an integer >= 1 or a fraction in (0,1)")


def _parse_schedule(sec, prefix):
    kind = sec.get(f"{prefix}.kind", "constant")
    if kind == "constant":
        return ScheduleSpec("constant", _parse_tau(sec, f"{prefix}.tau"))
    if kind == "exponential":
        sched = Exponential(
            tau0=_as_int(f"{prefix}.tau0", sec.get(f"{prefix}.tau0", "1")),
            c_e=_as_float(f"{prefix}.c_e", sec.get(f"{prefix}.c_e", "1.0")),
            d=_as_float(f"{prefix}.d", sec.get(f"{prefix}.d", "0.05")),
        )
        return ScheduleSpec("exponential", sched)
    if kind == "adaptive":
        sched = Adaptive(
            c=_as_float(f"{prefix}.c", sec.get(f"{prefix}.c", "1.0")),
            ema_alpha=_as_float(f"{prefix}.ema_alpha", sec.get(f"{prefix}.ema_alpha", "0.2")),
            smooth_beta=_as_float(f"{prefix}.smooth_beta", sec.get(f"{prefix}.smooth_beta", "0.5")),
            tau_min=_as_int(f"{prefix}.tau_min", sec.get(f"{prefix}.tau_min", "1")),
        )
        return ScheduleSpec("adaptive", sched)
    raise ConfigError(f"{prefix}.kind: unknown schedule {kind!r}")


def _parse_curvature(sec, prefix):
    kind = sec.get(f"{prefix}.kind", "exact")
    if kind == "exact":
        return ExactCurvature()
    if kind == "zero":
        return ZeroCurvature()
    if kind == "lazy":
        return LazyCurvature(
            period=_as_int(f"{prefix}.period", sec.get(f"{prefix}.period", "5")),
            refresh_radius=_as_float(f"{prefix}.refresh_radius", sec.get(f"{prefix}.refresh_radius", "inf")),
        )
    if kind == "fd":
        delta = sec.get(f"{prefix}.delta")
        return FiniteDiffCurvature(delta=None if delta is None else _as_float(f"{prefix}.delta", delta))
    raise ConfigError(f"{prefix}.kind: unknown curvature {kind!r}")


def _parse_m_policy(sec, prefix):
    kind = sec.get(f"{prefix}.kind", "adaptive")
    if kind == "adaptive":
        return AdaptiveDoubling(
            M0=_as_float(f"{prefix}.m0", sec.get(f"{prefix}.m0", "1.0")),
            grow=_as_float(f"{prefix}.grow", sec.get(f"{prefix}.grow", "2.0")),
            shrink=_as_float(f"{prefix}.shrink", sec.get(f"{prefix}.shrink", "0.5")),
            M_min=_as_float(f"{prefix}.m_min", sec.get(f"{prefix}.m_min", "1e-6")),
        )
    if kind == "fixed":
        return FixedM(M=_as_float(f"{prefix}.m", sec.require(f"{prefix}.m")))
    if kind == "theory":
        return TheoryRule(
            sigma=_as_float(f"{prefix}.sigma", sec.get(f"{prefix}.sigma", "0.0")),
            L1=_as_float(f"{prefix}.l1", sec.require(f"{prefix}.l1")),
            L2=_as_float(f"{prefix}.l2", sec.require(f"{prefix}.l2")),
        )
    raise ConfigError(f"{prefix}.kind: unknown M policy {kind!r}")


def _parse_objective(sec):
    kind = sec.require("objective.kind")
    kwargs = {}
    if kind == "synthetic_logistic":
        kwargs["n_features"] = _as_int("objective.n_features", sec.get("objective.n_features", "50"))
        kwargs["n_samples"] = _as_int("objective.n_samples", sec.get("objective.n_samples", "200"))
        kwargs["lam"] = _as_float("objective.lambda", sec.get("objective.lambda", "0.1"))
        kwargs["seed"] = _as_int("objective.data_seed", sec.get("objective.data_seed", "7"))
        kwargs["density"] = _as_float("objective.density", sec.get("objective.density", "0.3"))
        kwargs["normalize"] = _as_bool("objective.normalize", sec.get("objective.normalize", "true"))
    elif kind == "logistic":
        kwargs["dataset"] = sec.require("objective.dataset")
        kwargs["lam"] = _as_float("objective.lambda", sec.get("objective.lambda", "0.1"))
        kwargs["normalize"] = _as_bool("objective.normalize", sec.get("objective.normalize", "true"))
        hint = sec.get("objective.n_features_hint")
        kwargs["n_features_hint"] = None if hint is None else _as_int("objective.n_features_hint", hint)
    elif kind == "quadratic":
        kwargs["n"] = _as_int("objective.n", sec.get("objective.n", "50"))
        kwargs["cond"] = _as_float("objective.cond", sec.get("objective.cond", "100.0"))
        kwargs["seed"] = _as_int("objective.b_seed", sec.get("objective.b_seed", "0"))
    elif kind == "saddle":
        kwargs["n"] = _as_int("objective.n", sec.get("objective.n", "10"))
        kwargs["scale"] = _as_float("objective.scale", sec.get("objective.scale", "0.25"))
    else:
        raise ConfigError(f"objective.kind: unknown objective {kind!r}")
    return kind, kwargs


def _method_labels(flat):
    labels = []
    for key in flat:
        if key.startswith("method."):
            parts = key.split(".")
            if len(parts) < 3:
                raise ConfigError(f"{key}: method keys look like method.<label>.<field>")
            if parts[1] not in labels:
                labels.append(parts[1])
    return labels


def load_experiment(text):
    """Parse and validate a config; unknown keys are errors."""
    flat = parse_config_text(text)
    used = set()
    sec = _Section(flat, used)

    version = sec.get("config_version", "1")
    if version != "1":
        raise ConfigError(f"config_version {version!r} not supported")

    objective_kind, objective_kwargs = _parse_objective(sec)

    seeds_raw = sec.get("run.seeds", "0")
    try:
        seeds = tuple(int(s.strip()) for s in seeds_raw.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"run.seeds: expected comma-separated integers, got {seeds_raw!r}") from None
    if not seeds:
        raise ConfigError("run.seeds: at least one seed required")
    if any(not 0 <= s < 2**64 for s in seeds):
        raise ConfigError("run.seeds: seeds are 64-bit unsigned integers")

    stop = StopRule(
        grad_tol=_as_float("run.grad_tol", sec.get("run.grad_tol", "1e-6")),
        max_iters=_as_int("run.max_iters", sec.get("run.max_iters", "1000")),
        max_seconds=_as_float("run.max_seconds", sec.get("run.max_seconds", "inf")),
    )
    full_grad_every = _as_int("run.full_grad_every", sec.get("run.full_grad_every", "10"))
    x0_spec = sec.get("run.x0", "origin")
    if x0_spec != "origin" and not x0_spec.startswith("ones:"):
        raise ConfigError(f"run.x0: expected 'origin' or 'ones:<scale>', got {x0_spec!r}")

    timing = sec.get("output.timing", "wall")
    if timing not in ("wall", "none"):
        raise ConfigError(f"output.timing: expected wall|none, got {timing!r}")

    methods = []
    for label in _method_labels(flat):
        p = f"method.{label}"
        algorithm = sec.require(f"{p}.algorithm")
        if algorithm not in ("sscn", "cd", "cr"):
            raise ConfigError(f"{p}.algorithm: unknown algorithm {algorithm!r}")
        schedule_spec = _parse_schedule(sec, f"{p}.schedule")
        if algorithm == "cd":
            armijo = ArmijoParams(
                eta0=_as_float(f"{p}.armijo.eta0", sec.get(f"{p}.armijo.eta0", "1.0")),
                backtrack=_as_float(f"{p}.armijo.backtrack", sec.get(f"{p}.armijo.backtrack", "0.5")),
                c=_as_float(f"{p}.armijo.c", sec.get(f"{p}.armijo.c", "0.5")),
                max_backtracks=_as_int(f"{p}.armijo.max_backtracks", sec.get(f"{p}.armijo.max_backtracks", "50")),
            )
            cfg = CdConfig(schedule=None, armijo=armijo, stop=stop, seed=0,
                           full_grad_every=full_grad_every)
        else:
            cfg = OptimizerConfig(
                m_policy=_parse_m_policy(sec, f"{p}.m_policy"),
                schedule=None,
                curvature=_parse_curvature(sec, f"{p}.curvature"),
                subproblem_tol=_as_float(f"{p}.subproblem_tol", sec.get(f"{p}.subproblem_tol", "1e-5")),
                stop=stop, seed=0, full_grad_every=full_grad_every,
            )
        methods.append(MethodSpec(label=label, algorithm=algorithm,
                                  optimizer_config=cfg, schedule_spec=schedule_spec))

    unused = set(flat) - used
    if unused:
        raise ConfigError(f"unknown config keys: {sorted(unused)}")

    return ExperimentSpec(objective_kind=objective_kind, objective_kwargs=objective_kwargs,
                          seeds=seeds, methods=tuple(methods), timing=timing,
                          x0_spec=x0_spec, flat=dict(flat))
