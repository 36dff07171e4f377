"""Benchmark harness CLI: `sscn run|compare|validate`.

Emits one trace CSV per (method, seed) plus a summary JSON; `compare` adds a
joined long-format CSV keyed by (method, schedule, seed, k). Plotting is
out-of-process: the CSVs are tidy enough for any plotting tool.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .baselines import cd_run, full_cubic_newton_run
from .config import ConfigError, load_experiment
from .datasets import LibsvmFormatError, load_dataset
from .objectives import RegularizedLogistic
from .optimizer import RunAbort, run
from .problems import make_quadratic, make_saddle, make_synthetic_logistic

CSV_COLUMNS = ("run_id", "method", "seed", "k", "tau", "f", "grad_subset_norm",
               "full_grad_norm", "step_norm", "M", "coord_cost", "cum_coord_cost",
               "elapsed_s", "m_retries")
COMPARE_COLUMNS = ("method", "schedule", "seed", "k", "tau", "f", "grad_subset_norm",
                   "full_grad_norm", "step_norm", "M", "coord_cost", "cum_coord_cost",
                   "elapsed_s", "m_retries")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def build_objective(spec):
    kind = spec.objective_kind
    kw = spec.objective_kwargs
    if kind == "synthetic_logistic":
        return make_synthetic_logistic(**kw)
    if kind == "logistic":
        data = load_dataset(kw["dataset"], n_features_hint=kw["n_features_hint"])
        return RegularizedLogistic(data, lam=kw["lam"], normalize=kw["normalize"])
    if kind == "quadratic":
        return make_quadratic(**kw)
    return make_saddle(**kw)


def initial_point(spec, n):
    if spec.x0_spec == "origin":
        return np.zeros(n)
    scale = float(spec.x0_spec.split(":", 1)[1])
    return scale * np.ones(n)


def execute_one(obj, method, seed, x0):
    cfg = method.optimizer_config
    schedule = method.schedule_spec.resolve(obj.n)
    cfg = replace(cfg, schedule=schedule, seed=seed)
    if method.algorithm == "cd":
        return cd_run(obj, x0, cfg)
    if method.algorithm == "cr":
        return full_cubic_newton_run(obj, x0, cfg)
    return run(obj, x0, cfg)


def _record_values(rec, timing):
    elapsed = 0.0 if timing == "none" else rec.elapsed_seconds
    return (rec.k, rec.tau, rec.f_value, rec.grad_subset_norm, rec.full_grad_norm,
            rec.step_norm, rec.M, rec.coord_cost, rec.cum_coord_cost, elapsed,
            rec.m_retries)


def write_trace_csv(path, run_id, label, seed, trace, timing):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in trace.records:
            row = (run_id, label, seed) + _record_values(rec, timing)
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_compare_csv(path, results, timing):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(COMPARE_COLUMNS) + "\n")
        for method, seed, trace in results:
            sched = method.schedule_spec.label
            for rec in trace.records:
                row = (method.label, sched, seed) + _record_values(rec, timing)
                fh.write(",".join(_fmt(v) for v in row) + "\n")


def _aggregate(values):
    arr = np.asarray(values, dtype=np.float64)
    return {"mean": float(arr.mean()), "std": float(arr.std())}


def build_summary(spec, results, timing):
    runs = []
    per_label = {}
    for method, seed, trace in results:
        last = trace.records[-1]
        entry = {
            "run_id": f"{method.label}-s{seed}",
            "method": method.label,
            "algorithm": method.algorithm,
            "schedule": method.schedule_spec.label,
            "seed": seed,
            "termination": trace.termination.value,
            "iterations": len(trace.records),
            "cum_coord_cost": last.cum_coord_cost,
            "f_initial": trace.f_initial,
            "final_f": last.f_value,
            "final_grad_norm": trace.final_grad_norm,
            "elapsed_s": 0.0 if timing == "none" else last.elapsed_seconds,
        }
        runs.append(entry)
        per_label.setdefault(method.label, []).append(entry)
    aggregate = {}
    for label, entries in per_label.items():
        aggregate[label] = {
            "seeds": [e["seed"] for e in entries],
            "final_f": _aggregate([e["final_f"] for e in entries]),
            "final_grad_norm": _aggregate([e["final_grad_norm"] for e in entries]),
            "iterations": _aggregate([e["iterations"] for e in entries]),
            "cum_coord_cost": _aggregate([e["cum_coord_cost"] for e in entries]),
        }
    return {"config": spec.flat, "runs": runs, "aggregate": aggregate}


def _load_spec(args):
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return None
    try:
        spec = load_experiment(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None
    if args.seed_override is not None:
        if not 0 <= args.seed_override < 2**64:
            print("error: --seed-override must be a 64-bit unsigned integer", file=sys.stderr)
            return None
        spec = replace(spec, seeds=(args.seed_override,))
    if args.max_seconds is not None:
        methods = tuple(
            replace(m, optimizer_config=replace(
                m.optimizer_config,
                stop=replace(m.optimizer_config.stop, max_seconds=args.max_seconds)))
            for m in spec.methods
        )
        spec = replace(spec, methods=methods)
    return spec


def _execute_all(spec, out_dir):
    try:
        obj = build_objective(spec)
    except FileNotFoundError as exc:
        print(f"error: dataset not found: {exc}", file=sys.stderr)
        return None, 2
    except (LibsvmFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, 2
    x0 = initial_point(spec, obj.n)
    results = []
    for method in spec.methods:
        for seed in spec.seeds:
            run_id = f"{method.label}-s{seed}"
            try:
                trace = execute_one(obj, method, seed, x0)
            except RunAbort as exc:
                print(f"error: run {run_id} aborted: {exc}", file=sys.stderr)
                return None, 3
            results.append((method, seed, trace))
            write_trace_csv(out_dir / f"{run_id}.csv", run_id, method.label, seed,
                            trace, spec.timing)
    return (obj, results), 0


def cmd_run(args):
    spec = _load_spec(args)
    if spec is None:
        return 2
    if not spec.methods:
        print("error: config declares no method blocks", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload, code = _execute_all(spec, out_dir)
    if code != 0:
        return code
    _, results = payload
    summary = build_summary(spec, results, spec.timing)
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    for entry in summary["runs"]:
        print(f"{entry['run_id']}: {entry['termination']} after {entry['iterations']} iterations, "
              f"f={entry['final_f']:.6g}, |grad|={entry['final_grad_norm']:.3g}")
    print(f"wrote {len(results)} trace(s) and summary.json to {out_dir}")
    return 0


def cmd_compare(args):
    spec = _load_spec(args)
    if spec is None:
        return 2
    if len(spec.methods) < 2:
        print("error: compare needs at least two method blocks", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload, code = _execute_all(spec, out_dir)
    if code != 0:
        return code
    _, results = payload
    write_compare_csv(out_dir / "compare.csv", results, spec.timing)
    summary = build_summary(spec, results, spec.timing)
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"wrote compare.csv, {len(results)} trace(s) and summary.json to {out_dir}")
    return 0


def cmd_validate(args):
    from .validate import SUITES, format_report, run_suite

    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {sorted(SUITES)}",
              file=sys.stderr)
        return 2
    report = run_suite(args.suite, seed=args.seed_override or 0)
    text = format_report(report)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"validate_{args.suite}.txt").write_text(text)
    print(text, end="")
    return 0 if report.passed else 1


def make_parser():
    parser = argparse.ArgumentParser(prog="sscn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="sscn-out", help="output directory")
        p.add_argument("--seed-override", type=int, default=None,
                       help="replace the config seed list with this single seed")
        p.add_argument("--max-seconds", type=float, default=None,
                       help="override the per-run wall-time budget")

    p_run = sub.add_parser("run", help="execute every (method, seed) pair in a config")
    p_run.add_argument("config")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run >=2 methods and emit a joined CSV")
    p_cmp.add_argument("config")
    common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate", help="run a named validation suite")
    p_val.add_argument("suite")
    p_val.add_argument("--out", default="sscn-out", help="output directory")
    p_val.add_argument("--seed-override", type=int, default=None,
                       help="seed the suite's randomized checks")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
