"""Frank-Wolfe iteration for monotone variational inequalities.

    x_{k+1} = x_k + gamma_{k+1} (s_k - x_k),   s_k = lmo(F(x_k))

with vanishing, nonsummable step sizes gamma_k. The Frank-Wolfe gap
V(x) = max_s <F(x), x - s> certifies progress; it is >= 0 on the set and
vanishes exactly at solutions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .feasible_sets import DEFAULT_RULE, FeasibleSet, Product, TieRule
from .operators import Operator

FEAS_TOL = 1e-9
MAX_RECORDED_ROWS = 100_000


class SolverError(RuntimeError):
    """Raised when the iteration produces a non-finite or infeasible iterate."""


# --------------------------------------------------------------------------- schedules


class StepSchedule:
    # True when gamma_k -> 0 and sum gamma_k = inf hold by construction
    certified: bool = True

    def step_size(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"step index starts at 1, got {k}")
        g = self._gamma(k)
        if not 0.0 < g <= 1.0:
            raise ValueError(f"gamma_{k} = {g} is outside (0, 1]")
        return g

    def _gamma(self, k: int) -> float:
        raise NotImplementedError

    @property
    def label(self) -> str:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Harmonic(StepSchedule):
    """gamma_k = 1/k; with this schedule the iteration is generalized fictitious play."""

    def _gamma(self, k):
        return 1.0 / k

    @property
    def label(self):
        return "1/k"

    def to_dict(self):
        return {"type": "harmonic"}


@dataclass(frozen=True)
class PowerLaw(StepSchedule):
    """gamma_k = min(1, c * k^-a) with a in (0, 1], c > 0."""

    a: float
    c: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0:
            raise ValueError("power-law exponent must lie in (0, 1]")
        if not self.c > 0.0:
            raise ValueError("power-law scale must be positive")

    def _gamma(self, k):
        return min(1.0, self.c * k ** (-self.a))

    @property
    def label(self):
        return f"{self.c:g}*k^-{self.a:g}"

    def to_dict(self):
        return {"type": "power_law", "a": self.a, "c": self.c}


@dataclass(frozen=True)
class Explicit(StepSchedule):
    """A finite list of step sizes gamma_1, gamma_2, ...

    Only the declared horizon is checked; vanishing and nonsummability
    cannot be certified, hence ``certified = False``.
    """

    values: tuple
    certified: bool = field(default=False, init=False)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("explicit schedule is empty")
        bad = [v for v in vals if not 0.0 < v <= 1.0]
        if bad:
            raise ValueError(f"explicit step sizes must lie in (0, 1], got {bad[0]}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, h: float, n: int) -> "Explicit":
        return cls((h,) * n)

    def _gamma(self, k):
        if k > len(self.values):
            raise IndexError(f"explicit schedule has {len(self.values)} steps, asked for step {k}")
        return self.values[k - 1]

    @property
    def label(self):
        v = self.values
        return f"const={v[0]:g}" if len(set(v)) == 1 else f"explicit[{len(v)}]"

    def to_dict(self):
        return {"type": "explicit", "values": list(self.values)}


def step_size(sched: StepSchedule, k: int) -> float:
    return sched.step_size(k)


def schedule_from_dict(d: dict) -> StepSchedule:
    kind = d.get("type")
    if kind == "harmonic":
        return Harmonic()
    if kind == "power_law":
        return PowerLaw(float(d["a"]), float(d.get("c", 1.0)))
    if kind == "explicit":
        return Explicit(tuple(d["values"]))
    if kind == "constant":
        return Explicit.constant(float(d["value"]), int(d["steps"]))
    raise ValueError(f"unknown schedule type {kind!r}")


# --------------------------------------------------------------------------- gap and step


def _gap_and_vertex(set_, op, x, rule):
    g = op(x)
    s = set_._lmo(g, rule)
    return float(g @ (x - s)), s


def fw_gap(set_: FeasibleSet, op: Operator, x, rule: TieRule = DEFAULT_RULE):
    """Frank-Wolfe gap V(x) and the LMO vertex s attaining it."""
    x = np.asarray(x, dtype=np.float64)
    if not set_.contains(x, FEAS_TOL):
        raise ValueError("x is not in the feasible set")
    return _gap_and_vertex(set_, op, x, rule)


def _advance(x, s, gamma):
    return x + gamma * (s - x)


def fw_step(set_: FeasibleSet, op: Operator, x_k, k: int, sched: StepSchedule,
            rule: TieRule = DEFAULT_RULE):
    """One iteration from x_k: returns (x_{k+1}, s_k), using gamma_{k+1}."""
    x_k = np.asarray(x_k, dtype=np.float64)
    if not set_.contains(x_k, FEAS_TOL):
        raise ValueError(f"iterate {k} is not in the feasible set")
    s = set_._lmo(op(x_k), rule)
    x_next = _advance(x_k, s, sched.step_size(k + 1))
    if not set_.contains(x_next, FEAS_TOL):
        raise SolverError(f"iterate {k + 1} left the feasible set")
    return x_next, s


def _gauss_seidel_vertex(set_: Product, op, x, gamma, rule):
    """Blockwise LMO where each block sees the blocks already updated this sweep."""
    z = x.copy()
    s = np.empty_like(x)
    for f, sl in set_.blocks():
        s[sl] = f._lmo(op(z)[sl], rule)
        z[sl] = _advance(x[sl], s[sl], gamma)
    return z, s


# --------------------------------------------------------------------------- trace


@dataclass
class SolverTrace:
    """Recorded rows of a run.

    Row k holds x_k, the LMO vertex s_k = lmo(F(x_k)), the gap V(x_k), the
    step gamma_k that produced x_k (0 for the initial row) and
    tau_k = gamma_1 + ... + gamma_k. ``stride`` > 1 means the trace was
    thinned.
    """

    k: np.ndarray
    tau: np.ndarray
    gamma: np.ndarray
    x: np.ndarray
    s: np.ndarray
    gap: np.ndarray
    dist: np.ndarray | None = None
    stride: int = 1
    stopped_on_gap: bool = False
    schedule_label: str = ""

    def __len__(self):
        return len(self.k)

    @property
    def running_min_gap(self) -> np.ndarray:
        return np.minimum.accumulate(self.gap)

    @property
    def final_x(self) -> np.ndarray:
        return self.x[-1]

    def write_csv(self, path, include_s: bool = True) -> None:
        write_trace_csv(path, self.k, self.tau, self.gamma, self.gap, self.dist, self.x,
                        self.s if include_s else None)


def _fmt(v: float) -> str:
    return "%.17g" % v


def write_trace_csv(path, k, tau, gamma, gap, dist, x, s=None) -> None:
    """CSV with header k,tau,gamma,gap,dist,x0..,s0.. (``dist`` empty when absent)."""
    n = x.shape[1]
    header = ["k", "tau", "gamma", "gap", "dist"] + [f"x{i}" for i in range(n)]
    if s is not None:
        header += [f"s{i}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in range(len(k)):
            row = [str(int(k[r])), _fmt(tau[r]), _fmt(gamma[r]), _fmt(gap[r]),
                   "" if dist is None else _fmt(dist[r])]
            row += [_fmt(v) for v in x[r]]
            if s is not None:
                row += [_fmt(v) for v in s[r]]
            w.writerow(row)


def solve(set_: FeasibleSet, op: Operator, sched: StepSchedule, rule: TieRule = DEFAULT_RULE,
          x0=None, max_iter: int = 1000, gap_tol: float = 0.0, oracle_solution=None,
          record_every: int | None = None, gauss_seidel: bool = False) -> SolverTrace:
    """Run the iteration until ``max_iter`` or until the running-min gap <= ``gap_tol``.

    ``gap_tol = 0`` runs to ``max_iter``. Rows are recorded for k = 0..K;
    by default every row, or every ceil(max_iter / 1e5)-th row (plus the
    last one) for longer runs. ``gauss_seidel`` (product sets only,
    experimental) lets each block's LMO see the blocks updated earlier in
    the same sweep; its convergence is not established.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if gap_tol < 0:
        raise ValueError("gap_tol must be >= 0")
    if gauss_seidel and not isinstance(set_, Product):
        raise ValueError("gauss_seidel updates need a product set")
    n = set_.dimension
    x = set_.centroid() if x0 is None else np.array(x0, dtype=np.float64)
    if x.shape != (n,) or not set_.contains(x, FEAS_TOL):
        raise ValueError("x0 must be a point of the feasible set")
    if oracle_solution is not None:
        oracle_solution = np.asarray(oracle_solution, dtype=np.float64)
    if record_every is None:
        record_every = max(1, math.ceil(max_iter / MAX_RECORDED_ROWS))
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    cap = max_iter // record_every + 2
    K = np.empty(cap, dtype=np.int64)
    TAU, GAMMA, GAP = np.empty(cap), np.empty(cap), np.empty(cap)
    X, S = np.empty((cap, n)), np.empty((cap, n))
    rows = 0

    tau, gamma = 0.0, 0.0
    best = np.inf
    stopped = False
    k = 0
    while True:
        gap, s = _gap_and_vertex(set_, op, x, rule)
        if not math.isfinite(gap):
            raise SolverError(f"non-finite gap at k={k}; F(x_k) = {op(x)}")
        best = min(best, gap)
        done = k == max_iter or (gap_tol > 0 and best <= gap_tol)
        if k % record_every == 0 or done:
            K[rows], TAU[rows], GAMMA[rows], GAP[rows] = k, tau, gamma, gap
            X[rows], S[rows] = x, s
            rows += 1
        if done:
            stopped = k < max_iter
            break
        gamma = sched.step_size(k + 1)
        if gauss_seidel:
            x_new, s_gs = _gauss_seidel_vertex(set_, op, x, gamma, rule)
            if rows and K[rows - 1] == k:
                S[rows - 1] = s_gs
            x = x_new
        else:
            x = _advance(x, s, gamma)
        tau += gamma
        k += 1
        if not np.all(np.isfinite(x)):
            raise SolverError(f"non-finite iterate at k={k} (gamma={gamma}); check the operator/config")
        if not set_.contains(x, FEAS_TOL):
            raise SolverError(f"iterate k={k} left the feasible set")

    X, S = X[:rows], S[:rows]
    dist = None
    if oracle_solution is not None:
        dist = np.linalg.norm(X - oracle_solution, axis=1)
    return SolverTrace(K[:rows], TAU[:rows], GAMMA[:rows], X, S, GAP[:rows], dist,
                       stride=record_every, stopped_on_gap=stopped,
                       schedule_label=sched.label)
