"""Pilot runs that back the convergence thresholds used by the acceptance suite.

Writes tests/data/pilot_evidence.json. Each entry stores the measured values
next to the threshold the acceptance test applies to them.
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from vifw import instances
from vifw.oracle import extragradient
from vifw.solver import Harmonic, solve

GAP_THRESHOLD = 0.05
DIST_THRESHOLD = 1e-2


def gap_pilot(name, iters):
    inst = instances.get(name)
    t0 = time.perf_counter()
    tr = solve(inst.set, inst.op, Harmonic(), x0=inst.set.vertices()[0], max_iter=iters)
    wall = time.perf_counter() - t0
    rm = tr.running_min_gap
    checkpoints = {str(k): float(rm[np.searchsorted(tr.k, k)]) for k in (10**3, 10**4, iters) if k <= iters}
    return {"iterations": iters, "running_min_gap": checkpoints, "threshold": GAP_THRESHOLD,
            "wall_time_s": round(wall, 2)}


def dist_pilot(name, iters):
    inst = instances.get(name)
    ref = extragradient(inst.set, inst.op, x0=inst.set.vertices()[0], tol=1e-12).x_star
    t0 = time.perf_counter()
    tr = solve(inst.set, inst.op, Harmonic(), x0=inst.set.vertices()[0], max_iter=iters,
               oracle_solution=ref)
    wall = time.perf_counter() - t0
    d = tr.dist
    windows = {f"{K // 2}-{K}": float(d[K // 2:K + 1].max()) for K in (10**3, iters)}
    return {"iterations": iters, "dist": {"1000": float(d[1000]), str(iters): float(d[iters])},
            "window_max": windows, "threshold": DIST_THRESHOLD, "wall_time_s": round(wall, 2)}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests/data/pilot_evidence.json"))
    p.add_argument("--gap-iters", type=int, default=10**5)
    p.add_argument("--dist-iters", type=int, default=10**4)
    args = p.parse_args(argv)

    evidence = {"gap": {}, "dist": {}}
    for name in ("identity_fp", "rps_fp", "lp_saddle"):
        evidence["gap"][name] = gap_pilot(name, args.gap_iters)
        print(name, evidence["gap"][name])
    for name in ("affine_box", "affine_simplex", "gfp_quadratic"):
        evidence["dist"][name] = dist_pilot(name, args.dist_iters)
        print(name, evidence["dist"][name])
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(evidence, indent=2) + "\n")
    print("wrote", out)


if __name__ == "__main__":
    main()
