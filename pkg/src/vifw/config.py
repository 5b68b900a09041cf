"""JSON experiment configs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .feasible_sets import FeasibleSet, TieRule, set_from_dict
from .operators import Operator, operator_from_dict
from .solver import StepSchedule, schedule_from_dict

MODES = ("solve", "dynamics", "oracle", "compare")


class ConfigError(ValueError):
    """A schema violation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ExperimentConfig:
    name: str
    set: FeasibleSet
    operator: Operator
    schedule: StepSchedule
    x0: np.ndarray
    mode: str = "solve"
    tie_rule: TieRule = TieRule.LEXICOGRAPHIC_MIN
    max_iter: int = 1000
    gap_tol: float = 0.0
    seed: int = 0
    schedules: list = field(default_factory=list)
    use_oracle: bool = False
    oracle_tol: float = 1e-10
    h: float = 1e-3
    t_end: float = 8.0
    gauss_seidel: bool = False
    trace_path: Path = Path("results/trace.csv")
    summary_path: Path = Path("results/summary.json")
    raw: dict = field(default_factory=dict, repr=False)


def _get(d: dict, key: str, path: str, kind=None, default=...):
    if key not in d:
        if default is ...:
            raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
        return default
    val = d[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"{path}.{key}" if path else key, f"expected {_kind_name(kind)}, got {type(val).__name__}")
    return val


def _kind_name(kind) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


def _build(builder, d, path):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    try:
        return builder(d)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        msg = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        raise ConfigError(path, msg) from None


def _initial_point(spec, set_: FeasibleSet, seed: int) -> np.ndarray:
    if isinstance(spec, list):
        x0 = np.array(spec, dtype=np.float64)
        if x0.shape != (set_.dimension,):
            raise ConfigError("x0", f"expected {set_.dimension} entries, got {len(spec)}")
        if not set_.contains(x0, 1e-9):
            raise ConfigError("x0", "point is not in the feasible set")
        return x0
    if spec == "centroid":
        return set_.centroid()
    if spec == "random":
        return set_.sample(np.random.default_rng(seed))
    if isinstance(spec, str) and spec.startswith("vertex:"):
        try:
            i = int(spec.split(":", 1)[1])
            return set_.vertices()[i]
        except (ValueError, IndexError):
            raise ConfigError("x0", f"bad vertex index in {spec!r}") from None
    raise ConfigError("x0", "expected a vector, 'centroid', 'random' or 'vertex:i'")


def parse_config(d: dict, overrides: dict | None = None) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    d = dict(d)
    for key, val in (overrides or {}).items():
        if val is not None:
            d[key] = val

    name = _get(d, "name", "", str)
    mode = _get(d, "mode", "", str, "solve")
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {MODES}, got {mode!r}")
    set_ = _build(set_from_dict, _get(d, "set", "", dict), "set")
    op = _build(operator_from_dict, _get(d, "operator", "", dict), "operator")
    if op.dimension != set_.dimension:
        raise ConfigError("operator", f"dimension {op.dimension} does not match set dimension {set_.dimension}")
    schedule = _build(schedule_from_dict, _get(d, "schedule", "", dict, {"type": "harmonic"}), "schedule")
    schedules = [_build(schedule_from_dict, s, f"schedules[{i}]")
                 for i, s in enumerate(_get(d, "schedules", "", list, []))]
    if mode == "compare" and not schedules:
        raise ConfigError("schedules", "compare mode needs a nonempty list of schedules")

    rule_name = _get(d, "tie_rule", "", str, TieRule.LEXICOGRAPHIC_MIN.value)
    try:
        rule = TieRule(rule_name)
    except ValueError:
        raise ConfigError("tie_rule", f"unknown tie rule {rule_name!r}") from None

    seed = _get(d, "seed", "", int, 0)
    max_iter = _get(d, "max_iter", "", int, 1000)
    if max_iter < 1:
        raise ConfigError("max_iter", "must be >= 1")
    gap_tol = float(_get(d, "gap_tol", "", (int, float), 0.0))
    if gap_tol < 0:
        raise ConfigError("gap_tol", "must be >= 0")

    oracle = _get(d, "oracle", "", dict, {})
    dyn = _get(d, "dynamics", "", dict, {})
    h = float(_get(dyn, "h", "dynamics", (int, float), 1e-3))
    t_end = float(_get(dyn, "t_end", "dynamics", (int, float), 8.0))
    if not 0 < h <= 1:
        raise ConfigError("dynamics.h", "must lie in (0, 1]")
    if t_end <= 0:
        raise ConfigError("dynamics.t_end", "must be positive")

    outputs = _get(d, "outputs", "", dict, {})
    trace_path = Path(_get(outputs, "trace_path", "outputs", str, f"results/{name}_trace.csv"))
    summary_path = Path(_get(outputs, "summary_path", "outputs", str, f"results/{name}_summary.json"))

    return ExperimentConfig(
        name=name,
        set=set_,
        operator=op,
        schedule=schedule,
        x0=_initial_point(d.get("x0", "centroid"), set_, seed),
        mode=mode,
        tie_rule=rule,
        max_iter=max_iter,
        gap_tol=gap_tol,
        seed=seed,
        schedules=schedules,
        use_oracle=bool(_get(oracle, "use", "oracle", bool, False)),
        oracle_tol=float(_get(oracle, "tol", "oracle", (int, float), 1e-10)),
        h=h,
        t_end=t_end,
        gauss_seidel=bool(_get(d, "gauss_seidel", "", bool, False)),
        trace_path=trace_path,
        summary_path=summary_path,
        raw=d,
    )


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return parse_config(d, overrides)
