"""Continuous-time view of the iteration.

The iterates are placed at times tau_k = gamma_1 + ... + gamma_k and joined
linearly, giving a curve w(t) whose slope on (tau_k, tau_{k+1}) is
s_k - x_k. Best-response dynamics x' in lmo(F(x)) - x are integrated with
explicit Euler, which is the same iteration run with a constant step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feasible_sets import DEFAULT_RULE, FeasibleSet, TieRule
from .operators import Operator
from .solver import FEAS_TOL, Explicit, SolverTrace, _gap_and_vertex, fw_step, write_trace_csv


@dataclass
class Trajectory:
    """Piecewise-linear curve through breakpoints (times[k], points[k])."""

    times: np.ndarray
    points: np.ndarray
    feasible_set: FeasibleSet | None = None
    step: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.points = np.asarray(self.points, dtype=np.float64)
        if len(self.times) < 2 or len(self.times) != len(self.points):
            raise ValueError("a trajectory needs at least two breakpoints")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("breakpoint times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def segment(self, t: float) -> int:
        """Index k of the segment [times[k], times[k+1]] containing t."""
        if t < self.times[0] or t > self.times[-1]:
            raise ValueError(f"t={t} outside [{self.times[0]}, {self.times[-1]}]")
        return int(min(np.searchsorted(self.times, t, side="right") - 1, len(self.times) - 2))

    def __call__(self, t: float) -> np.ndarray:
        k = self.segment(t)
        t0, t1 = self.times[k], self.times[k + 1]
        if t == t0:
            w = self.points[k].copy()
        elif t == t1:
            w = self.points[k + 1].copy()
        else:
            theta = (t - t0) / (t1 - t0)
            w = (1.0 - theta) * self.points[k] + theta * self.points[k + 1]
        if self.feasible_set is not None and not self.feasible_set.contains(w, FEAS_TOL):
            raise ValueError(f"w({t}) is outside the feasible set")
        return w

    def slopes(self) -> np.ndarray:
        """Derivative of w on each open segment."""
        return np.diff(self.points, axis=0) / np.diff(self.times)[:, None]

    def lipschitz_ratios(self, pairs: int = 10_000, rng_seed: int = 0) -> np.ndarray:
        """||w(t) - w(t')|| / |t - t'| on random time pairs."""
        rng = np.random.default_rng(rng_seed)
        ts = rng.uniform(self.times[0], self.times[-1], size=(pairs, 2))
        out = np.empty(pairs)
        for i, (a, b) in enumerate(ts):
            if a == b:
                out[i] = 0.0
                continue
            out[i] = np.linalg.norm(self(a) - self(b)) / abs(a - b)
        return out

    def write_csv(self, path, gaps=None) -> None:
        """Same schema as the solver trace, ``gamma`` fixed to the step, no s columns."""
        m = len(self.times)
        gamma = np.full(m, np.nan if self.step is None else self.step)
        gamma[0] = 0.0
        gaps = np.full(m, np.nan) if gaps is None else gaps
        write_trace_csv(path, np.arange(m), self.times, gamma, gaps, None, self.points)


def interpolate(trace: SolverTrace, feasible_set: FeasibleSet | None = None) -> Trajectory:
    if trace.stride != 1:
        raise ValueError("interpolation needs consecutive iterates; the trace was thinned")
    if len(trace) < 2:
        raise ValueError("interpolation needs at least two rows")
    return Trajectory(trace.tau, trace.x, feasible_set)


@dataclass
class PerturbationBound:
    delta: np.ndarray          # gamma_{k+1} * diam(C), one per segment
    max_deviation: np.ndarray  # max sampled ||x_k - w(t)|| over the segment interior

    @property
    def holds(self) -> bool:
        return bool(np.all(self.max_deviation < self.delta))


def perturbation_bound(trace: SolverTrace, set_: FeasibleSet, samples: int = 7) -> PerturbationBound:
    """delta_k = gamma_{k+1} diam(C), checked against ||x_k - w(t)|| on interior t."""
    traj = interpolate(trace)
    delta = trace.gamma[1:] * set_.diameter()
    thetas = (np.arange(1, samples + 1) / (samples + 1)).tolist() + [1.0 - 1e-9]
    dev = np.empty(len(delta))
    for k in range(len(delta)):
        t0, t1 = traj.times[k], traj.times[k + 1]
        dev[k] = max(np.linalg.norm(traj.points[k] - traj(t0 + th * (t1 - t0))) for th in thetas)
    return PerturbationBound(delta, dev)


def integrate_br(set_: FeasibleSet, op: Operator, x0, t_end: float, h: float,
                 rule: TieRule = DEFAULT_RULE) -> Trajectory:
    """Explicit Euler for x' = lmo(F(x)) - x: the iteration with constant step h."""
    if not 0.0 < h <= 1.0:
        raise ValueError("Euler step must lie in (0, 1]")
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    steps = max(1, int(np.ceil(t_end / h - 1e-9)))
    sched = Explicit.constant(h, steps)
    x = np.asarray(x0, dtype=np.float64)
    points = [x]
    for j in range(steps):
        x, _ = fw_step(set_, op, x, j, sched, rule)
        points.append(x)
    return Trajectory(np.arange(steps + 1) * h, np.array(points), set_, step=h)


@dataclass
class DecayReport:
    gaps: np.ndarray
    u: np.ndarray              # e^{t_j} V(x_j)
    max_increase: float        # max_j (u_{j+1} - u_j)
    tol: float
    violation_fraction: float  # fraction of steps breaking the discounted decay by more than tol
    envelope: np.ndarray       # V(x_j) - e^{-t_j} V(x_0)

    @property
    def passed(self) -> bool:
        return self.violation_fraction == 0.0

    @property
    def max_envelope_excess(self) -> float:
        return float(self.envelope.max())

    @property
    def endpoint_excess(self) -> float:
        """V(x(T)) - e^{-T} V(x(0)); compare against ``tol``."""
        return float(self.envelope[-1])


def decay_check(traj: Trajectory, set_: FeasibleSet, op: Operator, rule: TieRule = DEFAULT_RULE,
                tol_factor: float = 10.0) -> DecayReport:
    """Discrete check of V(x(t)) <= e^{-t} V(x(0)) along an Euler trajectory.

    With h the step and tol = tol_factor * h * (1 + max V), a step j counts
    as a violation when e^{-t_{j+1}} (u_{j+1} - u_j) > tol, i.e. when
    V(x_{j+1}) exceeds e^{-h} V(x_j) by more than tol; the check passes
    when no step does. The envelope V(x_j) - e^{-t_j} V(x_0) is reported
    alongside. For bilinear games the Euler residual gap shrinks only like
    sqrt(h), so the envelope is not part of the pass condition.
    """
    t = traj.times
    gaps = np.array([_gap_and_vertex(set_, op, x, rule)[0] for x in traj.points])
    h = traj.step if traj.step is not None else float(np.max(np.diff(t)))
    tol = tol_factor * h * (1.0 + float(gaps.max()))
    u = np.exp(t) * gaps
    du = np.diff(u)
    discounted = du * np.exp(-t[1:])
    envelope = gaps - np.exp(-t) * gaps[0]
    return DecayReport(
        gaps=gaps,
        u=u,
        max_increase=float(du.max()),
        tol=tol,
        violation_fraction=float(np.mean(discounted > tol)),
        envelope=envelope,
    )
