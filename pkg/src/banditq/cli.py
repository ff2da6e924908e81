"""Command-line driver.

Subcommands:

* ``run``         one episode -> trace.csv, summary.json, audit.csv
* ``sweep``       horizon sweep -> sweep.csv, exponents.json
* ``audit``       re-check an existing trace -> audit.csv
* ``gen-fixture`` record a reward source -> replay CSV

Exit codes: 0 success, 1 error, 2 ran-but-infeasible (run/sweep only).
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import config_from_json, validate_config
from .env import episode_rng, source_from_json, write_rewards_csv
from .errors import BanditQError, InvalidConfigError
from .oracle import (
    adaptive_bound_check,
    default_audit_intervals,
    drift_audit,
    rate_audit,
    scaling_fit,
    write_audit_csv,
)
from .policies import run_episode
from .presets import get_preset, get_sweep_preset
from .records import Trace, fmt
from . import presets as _presets

TRACE_LIMIT = 10**6  # above this, runs are summary-only unless traced explicitly

SWEEP_METRICS = ("regret", "max_queue")


def _load_experiment(args, sweep=False):
    """Resolve --config/--preset into a parsed JSON object."""
    if getattr(args, "preset", None):
        return get_sweep_preset(args.preset) if sweep else get_preset(args.preset)
    if not args.config:
        raise InvalidConfigError(["MissingConfig: provide --config PATH or --preset NAME"])
    with open(args.config, encoding="utf-8") as fh:
        obj = json.load(fh)
    base_dir = os.path.dirname(os.path.abspath(args.config))
    for holder in (obj, obj.get("base_config", {})):
        source = holder.get("source")
        if (isinstance(source, dict) and source.get("type") == "replay"
                and not os.path.isabs(source.get("path", ""))):
            # replay paths are relative to the config file, not the cwd
            source["path"] = os.path.join(base_dir, source["path"])
    return obj


def _build_config(obj, seed_override=None):
    cfg = config_from_json(obj)
    if seed_override is not None:
        cfg = cfg.with_overrides(seed=seed_override)
    return validate_config(cfg)


def _print_summary(cfg, summary):
    slack = summary.feasibility_slack
    slack_txt = f"{slack:.6g}" if math.isfinite(slack) else "-inf"
    print(f"feasible: {str(summary.feasible).lower()} (slack {slack_txt})")
    print(f"total reward {summary.total_reward:.6g}  benchmark {summary.benchmark_reward:.6g}"
          f"  regret {summary.regret:.6g}")
    for arm in sorted(cfg.protected):
        print(f"arm {arm + 1}: target {cfg.target_rates[arm]:.4g}"
              f"  achieved {summary.achieved_rate[arm]:.4g}"
              f"  max queue {summary.max_queue[arm]:.4g}")


def cmd_run(args):
    obj = _load_experiment(args)
    cfg = _build_config(obj, args.seed)
    if "source" not in obj:
        raise InvalidConfigError(["MissingSource: config has no 'source' object"])
    source = source_from_json(obj["source"])
    record = not args.no_trace and cfg.horizon <= TRACE_LIMIT
    trace, summary = run_episode(cfg, source, record_trace=record)

    os.makedirs(args.out, exist_ok=True)
    summary.write_json(os.path.join(args.out, "summary.json"))
    written = ["summary.json"]
    if trace is not None:
        trace.write_csv(os.path.join(args.out, "trace.csv"))
        rows = rate_audit(trace, cfg.target_rates, default_audit_intervals(cfg.horizon))
        write_audit_csv(os.path.join(args.out, "audit.csv"), rows)
        written += ["trace.csv", "audit.csv"]
        _report_checks(trace, cfg, rows)

    _print_summary(cfg, summary)
    print("wrote " + " ".join(os.path.join(args.out, name) for name in written))
    return 0 if summary.feasible else 2


def _report_checks(trace, cfg, audit_rows):
    """Print certificate statuses; returns True when every check holds."""
    drift = drift_audit(trace, cfg.target_rates, cfg.protected)
    print(f"drift inequality: {'ok' if drift.ok else 'VIOLATED'}"
          f" (worst margin {drift.worst_margin:.3g})")
    bound_ok = True
    if cfg.policy == "banditq":
        bound_rows = adaptive_bound_check(trace)
        bound_ok = all(row.ok for row in bound_rows)
        print(f"adaptive regret bound: {'ok' if bound_ok else 'VIOLATED'} at t=" +
              ",".join(str(row.t) for row in bound_rows))
    bad = [row for row in audit_rows if not row.passed]
    print(f"rate certificates: {'ok' if not bad else f'{len(bad)} VIOLATED'}")
    if not drift.ok or not bound_ok or bad:
        print("warning: certified inequality violated; this indicates a bug", file=sys.stderr)
    return drift.ok and bound_ok and not bad


def _parse_intervals(text, horizon):
    if not text:
        return default_audit_intervals(horizon)
    out = []
    for part in text.split(","):
        a, _, b = part.partition(":")
        out.append((int(a), int(b)))
    return out


def cmd_audit(args):
    obj = _load_experiment(args)
    cfg = _build_config(obj)
    trace = Trace.read_csv(args.trace)
    rows = rate_audit(trace, cfg.target_rates, _parse_intervals(args.intervals, trace.horizon))
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "audit.csv")
    write_audit_csv(out_path, rows)
    all_ok = _report_checks(trace, cfg, rows)
    print(f"wrote {out_path}")
    return 0 if all_ok else 1


def _sweep_errors(spec):
    out = []
    horizons = spec.get("horizons", [])
    if len(horizons) < 1:
        out.append("BadSweep: no horizons")
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        out.append("BadSweep: horizons must be strictly increasing")
    if spec.get("repetitions", 1) < 1:
        out.append("BadSweep: repetitions must be >= 1")
    policies = spec.get("policies", [])
    if not policies or any(p not in ("banditq", "hedge") for p in policies):
        out.append(f"BadSweep: policies must be a non-empty subset of banditq/hedge, got {policies}")
    if spec.get("metric", "regret") not in SWEEP_METRICS:
        out.append(f"BadSweep: metric must be one of {SWEEP_METRICS}")
    if "base_config" not in spec or "source" not in spec["base_config"]:
        out.append("BadSweep: base_config with a source is required")
    return out


def _episode_task(payload):
    """Run one sweep episode; module-level so process pools can pickle it."""
    obj, episode_index = payload
    cfg = validate_config(config_from_json(obj))
    source = source_from_json(obj["source"])
    _, summary = run_episode(cfg, source, episode_index=episode_index, record_trace=False)
    prot = sorted(cfg.protected)
    return {
        "policy": cfg.policy,
        "T": cfg.horizon,
        "regret": summary.regret,
        "max_queue": max((summary.max_queue[a] for a in prot), default=0.0),
        "achieved_rate": [summary.achieved_rate[i] for i in range(cfg.n_arms)],
        "feasible": summary.feasible,
    }


def run_sweep(spec, parallel=1, seed_override=None):
    """Execute a sweep spec; returns (rows, exponents, all_feasible)."""
    errs = _sweep_errors(spec)
    if errs:
        raise InvalidConfigError(errs)
    base = dict(spec["base_config"])
    if seed_override is not None:
        base["seed"] = seed_override
    tasks = []
    labels = []
    # rows (and episode seed streams) are keyed by the sorted task order, so
    # output is identical no matter how many workers run the episodes
    for policy in sorted(set(spec["policies"])):
        for horizon in spec["horizons"]:
            for rep in range(spec.get("repetitions", 1)):
                obj = {**base, "policy": policy, "horizon": horizon}
                labels.append((policy, horizon, rep))
                tasks.append((obj, len(tasks)))
    # validate once up front so bad configs fail before any work starts
    _build_config(tasks[0][0])

    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_episode_task, tasks, chunksize=1))
    else:
        results = [_episode_task(t) for t in tasks]

    rows = [{**res, "rep": lab[2]} for res, lab in zip(results, labels)]
    exponents = {}
    for policy in sorted(set(spec["policies"])):
        exponents[policy] = {}
        for metric in SWEEP_METRICS:
            pts = []
            for horizon in spec["horizons"]:
                vals = [row[metric] if metric != "regret" else max(row[metric], 1.0)
                        for row in rows if row["policy"] == policy and row["T"] == horizon]
                pts.append((horizon, float(np.median(vals))))
            try:
                fit = scaling_fit(pts)
                exponents[policy][metric] = {"exponent": fit.exponent, "r2": fit.r2}
            except BanditQError as exc:
                exponents[policy][metric] = {"error": str(exc)}
    return rows, exponents, all(row["feasible"] for row in rows)


def _write_sweep_outputs(out_dir, rows, exponents, n_arms):
    os.makedirs(out_dir, exist_ok=True)
    sweep_path = os.path.join(out_dir, "sweep.csv")
    with open(sweep_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("policy,T,rep,regret,max_queue,"
                 + ",".join(f"achieved_rate_{i + 1}" for i in range(n_arms)) + "\n")
        for row in rows:
            fh.write(f"{row['policy']},{row['T']},{row['rep']},{fmt(row['regret'])},"
                     f"{fmt(row['max_queue'])},"
                     + ",".join(fmt(v) for v in row["achieved_rate"]) + "\n")
    exp_path = os.path.join(out_dir, "exponents.json")
    with open(exp_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(exponents, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sweep_path, exp_path


def cmd_sweep(args):
    spec = _load_experiment(args, sweep=True)
    rows, exponents, feasible = run_sweep(spec, parallel=args.parallel,
                                          seed_override=args.seed)
    n_arms = int(spec["base_config"]["n_arms"])
    sweep_path, exp_path = _write_sweep_outputs(args.out, rows, exponents, n_arms)
    metric = spec.get("metric", "regret")
    for policy in sorted(set(spec["policies"])):
        info = exponents[policy][metric]
        if "exponent" in info:
            print(f"{policy} {metric} exponent {info['exponent']:.4f} (r2 {info['r2']:.4f})")
        else:
            print(f"{policy} {metric} fit failed: {info['error']}")
    print(f"wrote {sweep_path} {exp_path}")
    return 0 if feasible else 2


def cmd_gen_fixture(args):
    if args.horizon < 1:
        raise InvalidConfigError([f"BadHorizon: horizon={args.horizon} must be >= 1"])
    if args.preset:
        obj = get_preset(args.preset)
        seed = args.seed if args.seed is not None else obj.get("seed", 0)
        source = source_from_json(obj["source"])
    else:
        if not args.source:
            raise InvalidConfigError(["MissingConfig: provide --source PATH or --preset NAME"])
        with open(args.source, encoding="utf-8") as fh:
            obj = json.load(fh)
        seed = args.seed if args.seed is not None else obj.get("seed", 0)
        source = source_from_json(obj.get("source", obj))
    rng = episode_rng(seed, 0)
    rewards = np.vstack([source.rewards(t, rng) for t in range(1, args.horizon + 1)])
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    write_rewards_csv(args.out, rewards)
    print(f"wrote {args.out} ({args.horizon} rounds, {source.n_arms} arms)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="banditq",
        description="Fair online prediction with per-arm rate guarantees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, preset_names, needs_out=True):
        p.add_argument("--config", help="path to a JSON config file")
        p.add_argument("--preset", choices=preset_names,
                       help="named built-in config (alternative to --config)")
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p_run = sub.add_parser("run", help="run one episode and score it")
    add_common(p_run, sorted(_presets.PRESETS))
    p_run.add_argument("--no-trace", action="store_true", help="skip trace.csv (summary only)")
    p_run.add_argument("--parallel", type=int, default=1,
                       help="accepted for interface parity; a single episode is sequential")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a horizon sweep and fit scaling exponents")
    add_common(p_sweep, sorted(_presets.SWEEP_PRESETS))
    p_sweep.add_argument("--parallel", type=int, default=1, help="worker processes")
    p_sweep.set_defaults(func=cmd_sweep)

    p_audit = sub.add_parser("audit", help="re-check certificates on an existing trace")
    add_common(p_audit, sorted(_presets.PRESETS))
    p_audit.add_argument("--trace", required=True, help="trace.csv to audit")
    p_audit.add_argument("--intervals", default=None,
                         help="comma-separated a:b intervals (default: quartile prefixes)")
    p_audit.set_defaults(func=cmd_audit)

    p_gen = sub.add_parser("gen-fixture", help="record a reward source to a replay CSV")
    p_gen.add_argument("--source", help="JSON file with a source spec (or a full config)")
    p_gen.add_argument("--preset", choices=sorted(_presets.PRESETS),
                       help="take the source from a named preset")
    p_gen.add_argument("--horizon", type=int, required=True, help="rounds to record")
    p_gen.add_argument("--out", required=True, help="output CSV path")
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.set_defaults(func=cmd_gen_fixture)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidConfigError as exc:
        for violation in exc.violations:
            print(f"error: {violation}", file=sys.stderr)
        return 1
    except (BanditQError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
