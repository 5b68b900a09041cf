"""Command-line experiment runner.

    vifw run <config.json>       run the config's mode (solve by default)
    vifw oracle <config.json>    compute and cache the reference solution
    vifw compare <config.json>   running-min gaps for several schedules
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import oracle
from .config import ConfigError, ExperimentConfig, load_config
from .dynamics import decay_check, integrate_br
from .solver import SolverError, solve

log = logging.getLogger("vifw")

GAP_FLOOR = -1e-12


class InvariantError(RuntimeError):
    pass


def _write_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cached_solution(cfg: ExperimentConfig, compute: bool):
    if compute:
        return oracle.cached_extragradient(cfg.set, cfg.operator, tol=cfg.oracle_tol)
    return oracle.lookup(cfg.set, cfg.operator, cfg.oracle_tol)


def _check_trace(trace, cfg: ExperimentConfig) -> None:
    if trace.gap.min() < GAP_FLOOR:
        raise InvariantError(f"negative gap {trace.gap.min():.3g} in trace")
    for x in trace.x:
        if not cfg.set.contains(x, 1e-9):
            raise InvariantError("trace iterate outside the feasible set")


def run_solve(cfg: ExperimentConfig) -> dict:
    ref = _cached_solution(cfg, cfg.use_oracle)
    t0 = time.perf_counter()
    trace = solve(cfg.set, cfg.operator, cfg.schedule, cfg.tie_rule, cfg.x0, cfg.max_iter,
                  cfg.gap_tol, None if ref is None else ref.x_star, gauss_seidel=cfg.gauss_seidel)
    wall = time.perf_counter() - t0
    _check_trace(trace, cfg)
    cfg.trace_path.parent.mkdir(parents=True, exist_ok=True)
    trace.write_csv(cfg.trace_path)
    return {
        "iterations": int(trace.k[-1]),
        "final_gap": float(trace.gap[-1]),
        "running_min_gap": float(trace.running_min_gap[-1]),
        "final_x": trace.final_x.tolist(),
        "dist_to_oracle": None if trace.dist is None else float(trace.dist[-1]),
        "oracle_method": None if ref is None else ref.method,
        "stopped_on_gap": trace.stopped_on_gap,
        "schedule": trace.schedule_label,
        "wall_time_s": wall,
    }


def run_dynamics(cfg: ExperimentConfig) -> dict:
    traj = integrate_br(cfg.set, cfg.operator, cfg.x0, cfg.t_end, cfg.h, cfg.tie_rule)
    report = decay_check(traj, cfg.set, cfg.operator, cfg.tie_rule)
    cfg.trace_path.parent.mkdir(parents=True, exist_ok=True)
    traj.write_csv(cfg.trace_path, report.gaps)
    if not report.passed:
        raise InvariantError(f"decay check failed on {report.violation_fraction:.2%} of steps")
    return {
        "h": cfg.h,
        "t_end": float(traj.times[-1]),
        "steps": len(traj) - 1,
        "initial_gap": float(report.gaps[0]),
        "final_gap": float(report.gaps[-1]),
        "decay_passed": report.passed,
        "decay_tol": report.tol,
        "violation_fraction": report.violation_fraction,
        "max_u_increase": report.max_increase,
        "max_envelope_excess": report.max_envelope_excess,
        "endpoint_excess": report.endpoint_excess,
    }


def run_oracle(cfg: ExperimentConfig) -> dict:
    res = _cached_solution(cfg, True)
    out = {
        "x_star": res.x_star.tolist(),
        "residual": res.residual,
        "iterations": res.iterations,
        "method": res.method,
        "cache": str(oracle.cache_dir() / oracle.CACHE_FILE),
    }
    if cfg.operator.mu > 0:
        uq = oracle.uniqueness_check(cfg.set, cfg.operator, trials=5, rng_seed=cfg.seed)
        out["uniqueness_max_pairwise"] = uq.max_pairwise
        out["uniqueness_passed"] = uq.passed
    else:
        out["note"] = "merely monotone: distances are to this one solution, an upper bound on dist to SOL"
    return out


def run_compare(cfg: ExperimentConfig) -> dict:
    columns, finals = {}, {}
    ks = None
    for sched in cfg.schedules:
        trace = solve(cfg.set, cfg.operator, sched, cfg.tie_rule, cfg.x0, cfg.max_iter, 0.0)
        _check_trace(trace, cfg)
        label = f"gap[{sched.label}]"
        columns[label] = trace.running_min_gap
        finals[sched.label] = float(trace.running_min_gap[-1])
        ks = trace.k
    cfg.trace_path.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.trace_path, "w") as fh:
        fh.write(",".join(["k"] + list(columns)) + "\n")
        for r, k in enumerate(ks):
            fh.write(",".join([str(int(k))] + ["%.17g" % c[r] for c in columns.values()]) + "\n")
    return {"running_min_gap": finals, "rows": len(ks)}


RUNNERS = {"solve": run_solve, "dynamics": run_dynamics, "oracle": run_oracle, "compare": run_compare}


def run(cfg: ExperimentConfig) -> int:
    """Execute ``cfg`` and write its artifacts; returns a process exit status."""
    log.info("running %s (mode=%s)", cfg.name, cfg.mode)
    try:
        result = RUNNERS[cfg.mode](cfg)
    except (SolverError, InvariantError, oracle.OracleError) as exc:
        log.error("%s: %s", cfg.name, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    summary = {"name": cfg.name, "mode": cfg.mode, **result}
    _write_json(cfg.summary_path, summary)
    print(json.dumps({k: v for k, v in summary.items() if not isinstance(v, list)}, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vifw", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "oracle", "compare"):
        p = sub.add_parser(name)
        p.add_argument("config", type=Path)
        p.add_argument("--max-iter", type=int)
        p.add_argument("--gap-tol", type=float)
        p.add_argument("--seed", type=int)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    overrides = {"max_iter": args.max_iter, "gap_tol": args.gap_tol, "seed": args.seed}
    if args.command != "run":
        overrides["mode"] = args.command
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    np.seterr(all="warn")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
