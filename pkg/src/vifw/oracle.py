"""Independent reference solutions.

Extragradient with exact projections finds a point of SOL(C, F) by a
mechanism unrelated to the LMO iteration (projections and a fixed step),
and vertex enumeration gives the Frank-Wolfe gap without calling the LMO.
Solutions can be cached in a JSON sidecar keyed by an instance hash.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .feasible_sets import DEFAULT_RULE, FeasibleSet, TieRule
from .operators import Operator, operator_norm_estimate
from .solver import FEAS_TOL, fw_gap

CACHE_ENV = "VIFW_CACHE_DIR"
CACHE_FILE = "oracle_cache.json"


class OracleError(RuntimeError):
    pass


@dataclass
class OracleResult:
    x_star: np.ndarray
    residual: float
    iterations: int
    method: str


def default_step(set_: FeasibleSet, op: Operator) -> float:
    """0.5 / ||J(centroid)||, the usual extragradient step bound."""
    L = operator_norm_estimate(op, set_.centroid())
    return 0.5 / L if L > 0 else 1.0


def extragradient(set_: FeasibleSet, op: Operator, x0=None, eta: float | None = None,
                  tol: float = 1e-10, max_iter: int = 200_000,
                  rule: TieRule = DEFAULT_RULE) -> OracleResult:
    """Korpelevich extragradient: y = P(x - eta F(x)), x+ = P(x - eta F(y)).

    Stops as soon as the Frank-Wolfe gap of the last iterate is <= tol.
    For merely monotone operators (mu = 0) the ergodic average of the
    extrapolated points is monitored too and returned if it gets there
    first; ``method`` records which one was returned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = set_.centroid() if x0 is None else np.array(x0, dtype=np.float64)
    if not set_.contains(x, FEAS_TOL):
        raise ValueError("x0 must be a point of the feasible set")
    if eta is None:
        eta = default_step(set_, op)
    if eta <= 0:
        raise ValueError("eta must be positive")

    gap = fw_gap(set_, op, x, rule)[0]
    if gap <= tol:
        return OracleResult(x, gap, 0, "extragradient")

    track_avg = op.mu == 0
    avg = np.zeros_like(x)
    for it in range(1, max_iter + 1):
        y = set_.project(x - eta * op(x))
        x = set_.project(x - eta * op(y))
        gap = fw_gap(set_, op, x, rule)[0]
        if gap <= tol:
            return OracleResult(x, gap, it, "extragradient")
        if track_avg:
            avg += (y - avg) / it
            avg_gap = fw_gap(set_, op, avg, rule)[0]
            if avg_gap <= tol:
                return OracleResult(avg.copy(), avg_gap, it, "extragradient-ergodic")
    raise OracleError(f"extragradient did not reach gap {tol:g} in {max_iter} iterations "
                      f"(last gap {gap:.3g}); try a smaller eta")


def brute_force_gap(set_: FeasibleSet, op: Operator, x) -> float:
    """max over all vertices v of <F(x), x - v>, by enumeration."""
    x = np.asarray(x, dtype=np.float64)
    V = set_.vertices()  # raises past 10^6 vertices
    g = op(x)
    return float(np.max((x - V) @ g))


@dataclass
class UniquenessReport:
    solutions: np.ndarray
    max_pairwise: float
    atol: float

    @property
    def passed(self) -> bool:
        return self.max_pairwise <= self.atol


def uniqueness_check(set_: FeasibleSet, op: Operator, trials: int = 10, rng_seed: int = 0,
                     tol: float = 1e-8, atol: float | None = None) -> UniquenessReport:
    """Solve from random starts; a strongly monotone VI has a single solution.

    Passes when every pair of returned points is within ``atol``
    (default 10 * tol).
    """
    if not op.mu > 0:
        raise ValueError("uniqueness check needs a strongly monotone operator (mu > 0)")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    sols = np.array([extragradient(set_, op, set_.sample(rng), tol=tol).x_star
                     for _ in range(trials)])
    d = sols[:, None, :] - sols[None, :, :]
    max_pair = float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))
    return UniquenessReport(sols, max_pair, 10 * tol if atol is None else atol)


# --------------------------------------------------------------------------- cache


def instance_key(set_: FeasibleSet, op: Operator, tol: float) -> str:
    blob = json.dumps({"set": set_.to_dict(), "operator": op.to_dict(), "tol": tol},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "vifw"))


def _load(path: Path) -> dict:
    if not path.exists():
        return {}
    with open(path) as fh:
        return json.load(fh)


def lookup(set_: FeasibleSet, op: Operator, tol: float, directory=None) -> OracleResult | None:
    entry = _load(Path(directory or cache_dir()) / CACHE_FILE).get(instance_key(set_, op, tol))
    if entry is None:
        return None
    return OracleResult(np.array(entry["x_star"]), entry["residual"], entry["iterations"], entry["method"])


def store(set_: FeasibleSet, op: Operator, tol: float, result: OracleResult, directory=None) -> Path:
    d = Path(directory or cache_dir())
    d.mkdir(parents=True, exist_ok=True)
    path = d / CACHE_FILE
    data = _load(path)
    entry = asdict(result)
    entry["x_star"] = result.x_star.tolist()
    data[instance_key(set_, op, tol)] = entry
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
    os.replace(tmp, path)
    return path


def cached_extragradient(set_: FeasibleSet, op: Operator, tol: float = 1e-10, directory=None,
                         **kwargs) -> OracleResult:
    """Extragradient solution from the sidecar cache, computing and storing it on a miss."""
    hit = lookup(set_, op, tol, directory)
    if hit is not None:
        return hit
    result = extragradient(set_, op, tol=tol, **kwargs)
    store(set_, op, tol, result, directory)
    return result
