"""Compact convex feasible sets with linear minimization oracles and projections.

Every set exposes the same small surface:

    lmo(pi, rule)       a minimizer of <pi, s> over the set (always a vertex)
    project(x)          Euclidean projection
    diameter()          exact diameter
    contains(x, tol)    membership up to a constraint-residual tolerance
    vertices()          the canonical (finite) vertex set, in enumeration order

Sets are immutable after construction.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

MAX_VERTICES = 10**6


class TieRule(enum.Enum):
    """Deterministic selection from the set-valued argmin.

    LEXICOGRAPHIC_MIN picks, among the minimizers, the lexicographically
    smallest point. On a simplex that is the smallest minimizing coordinate
    index; on a box ties go to the lower bound. FIRST_VERTEX picks the first
    minimizer in ``vertices()`` order. The two rules only differ on
    ``VertexPolytope``, where the vertex list order is arbitrary.
    """

    LEXICOGRAPHIC_MIN = "lexicographic_min"
    FIRST_VERTEX = "first_vertex"


DEFAULT_RULE = TieRule.LEXICOGRAPHIC_MIN


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _check_vector(x, n: int, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != n:
        raise ValueError(f"{name} has shape {x.shape}, expected ({n},)")
    return x


class FeasibleSet:
    """Base class; subclasses fill in the geometry."""

    dimension: int

    def lmo(self, pi, rule: TieRule = DEFAULT_RULE) -> np.ndarray:
        pi = _check_vector(pi, self.dimension, "pi")
        if not np.all(np.isfinite(pi)):
            raise ValueError("pi has non-finite entries")
        return self._lmo(pi, rule)

    def project(self, x) -> np.ndarray:
        return self._project(_check_vector(x, self.dimension))

    def contains(self, x, tol: float = 1e-9) -> bool:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        x = _check_vector(x, self.dimension)
        if not np.all(np.isfinite(x)):
            return False
        return self._contains(x, tol)

    def diameter(self) -> float:
        raise NotImplementedError

    def vertices(self) -> np.ndarray:
        raise NotImplementedError

    def num_vertices(self) -> int:
        raise NotImplementedError

    def centroid(self) -> np.ndarray:
        """Barycenter of the canonical vertex set."""
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Random points of the set (convex combinations of vertices)."""
        if size is None:
            return self._sample(rng, 1)[0]
        return self._sample(rng, size)

    def to_dict(self) -> dict:
        raise NotImplementedError

    # subclass hooks
    def _lmo(self, pi: np.ndarray, rule: TieRule) -> np.ndarray:
        raise NotImplementedError

    def _project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        raise NotImplementedError

    def _sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Simplex(FeasibleSet):
    """The probability simplex {x >= 0, sum(x) = 1} in R^n."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"simplex dimension must be a positive integer, got {self.n}")

    @property
    def dimension(self) -> int:
        return self.n

    def _lmo(self, pi, rule):
        s = np.zeros(self.n)
        s[int(np.argmin(pi))] = 1.0  # argmin returns the first minimizer
        return s

    def _project(self, x):
        return project_simplex(x)

    def _contains(self, x, tol):
        return bool(x.min() >= -tol and abs(x.sum() - 1.0) <= tol)

    def diameter(self):
        return float(np.sqrt(2.0)) if self.n >= 2 else 0.0

    def vertices(self):
        return np.eye(self.n)

    def num_vertices(self):
        return self.n

    def centroid(self):
        return np.full(self.n, 1.0 / self.n)

    def bounding_box(self):
        return np.zeros(self.n), np.ones(self.n)

    def _sample(self, rng, size):
        return rng.dirichlet(np.ones(self.n), size=size)

    def to_dict(self):
        return {"type": "simplex", "n": self.n}


@dataclass(frozen=True, eq=False)
class Box(FeasibleSet):
    """Axis-aligned box [lower, upper]."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = _frozen(self.lower), _frozen(self.upper)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise ValueError("box bounds must be nonempty vectors of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    def _lmo(self, pi, rule):
        # ties (pi_i == 0) go to the lower bound under both rules
        return np.where(pi < 0, self.upper, self.lower)

    def _project(self, x):
        return np.clip(x, self.lower, self.upper)

    def _contains(self, x, tol):
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    def num_vertices(self):
        return 2**self.dimension

    def vertices(self):
        if self.num_vertices() > MAX_VERTICES:
            raise ValueError(f"box in dimension {self.dimension} has too many corners to enumerate")
        corners = itertools.product(*zip(self.lower, self.upper))
        return np.array(list(corners), dtype=np.float64)

    def centroid(self):
        return 0.5 * (self.lower + self.upper)

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def _sample(self, rng, size):
        return rng.uniform(self.lower, self.upper, size=(size, self.dimension))

    def to_dict(self):
        return {"type": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False)
class VertexPolytope(FeasibleSet):
    """Convex hull of a finite list of points (one per row)."""

    points: np.ndarray
    _lex_order: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("vertex polytope needs at least one vertex given as a 2-d array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("vertices must be finite")
        object.__setattr__(self, "points", pts)
        # rank of each vertex in lexicographic order (first coordinate most significant)
        order = np.lexsort(pts.T[::-1])
        rank = np.empty(len(order), dtype=np.int64)
        rank[order] = np.arange(len(order))
        object.__setattr__(self, "_lex_order", rank)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def _lmo(self, pi, rule):
        values = self.points @ pi
        ties = np.flatnonzero(values == values.min())
        if rule is TieRule.LEXICOGRAPHIC_MIN and len(ties) > 1:
            i = ties[np.argmin(self._lex_order[ties])]
        else:
            i = ties[0]
        return self.points[i].copy()

    def _project(self, x):
        return nearest_point_in_hull(self.points, x)[0]

    def _contains(self, x, tol):
        return bool(np.linalg.norm(x - self._project(x)) <= tol)

    def diameter(self):
        d = self.points[:, None, :] - self.points[None, :, :]
        return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))

    def vertices(self):
        return self.points.copy()

    def num_vertices(self):
        return self.points.shape[0]

    def centroid(self):
        return self.points.mean(axis=0)

    def bounding_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def _sample(self, rng, size):
        w = rng.dirichlet(np.ones(self.num_vertices()), size=size)
        return w @ self.points

    def to_dict(self):
        return {"type": "vertices", "points": self.points.tolist()}


@dataclass(frozen=True, eq=False)
class Product(FeasibleSet):
    """Cartesian product of sets; vectors are the factor blocks concatenated."""

    factors: tuple
    _offsets: tuple = field(init=False, repr=False)

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors or not all(isinstance(f, FeasibleSet) for f in factors):
            raise ValueError("product needs at least one FeasibleSet factor")
        object.__setattr__(self, "factors", factors)
        offsets = np.cumsum([0] + [f.dimension for f in factors])
        object.__setattr__(self, "_offsets", tuple(int(o) for o in offsets))

    @property
    def dimension(self) -> int:
        return self._offsets[-1]

    def blocks(self):
        """(factor, slice) pairs in order."""
        return [(f, slice(a, b)) for f, a, b in zip(self.factors, self._offsets, self._offsets[1:])]

    def _lmo(self, pi, rule):
        return np.concatenate([f._lmo(pi[sl], rule) for f, sl in self.blocks()])

    def _project(self, x):
        return np.concatenate([f._project(x[sl]) for f, sl in self.blocks()])

    def _contains(self, x, tol):
        return all(f._contains(x[sl], tol) for f, sl in self.blocks())

    def diameter(self):
        return float(np.sqrt(sum(f.diameter() ** 2 for f in self.factors)))

    def num_vertices(self):
        return int(np.prod([f.num_vertices() for f in self.factors], dtype=object))

    def vertices(self):
        if self.num_vertices() > MAX_VERTICES:
            raise ValueError("product has too many vertices to enumerate")
        blocks = [f.vertices() for f in self.factors]
        return np.array([np.concatenate(c) for c in itertools.product(*blocks)])

    def centroid(self):
        return np.concatenate([f.centroid() for f in self.factors])

    def bounding_box(self):
        boxes = [f.bounding_box() for f in self.factors]
        return np.concatenate([b[0] for b in boxes]), np.concatenate([b[1] for b in boxes])

    def _sample(self, rng, size):
        return np.hstack([f._sample(rng, size) for f in self.factors])

    def to_dict(self):
        return {"type": "product", "factors": [f.to_dict() for f in self.factors]}


def project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex by sorting.

    Finds the threshold tau with sum(max(x - tau, 0)) = 1.
    """
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, x.shape[0] + 1)
    rho = np.flatnonzero(u - css / ks > 0)[-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(x - tau, 0.0)


def nearest_point_in_hull(points: np.ndarray, x: np.ndarray, tol: float = 1e-10,
                          max_iter: int = 10_000) -> tuple[np.ndarray, np.ndarray]:
    """Wolfe's minimum-norm-point method for the projection of x onto conv(points).

    Returns the projection and its barycentric weights. Stops when the
    Frank-Wolfe gap of 0.5*||y - x||^2 drops below ``tol`` (scaled by the
    squared point spread, so the criterion is unit-free).
    """
    P = np.asarray(points, dtype=np.float64) - x
    m = P.shape[0]
    scale = max(1.0, float(np.max(np.einsum("ij,ij->i", P, P))))
    j0 = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    active = [j0]
    lam = np.array([1.0])
    y = P[j0].copy()

    for _ in range(max_iter):
        # major cycle
        dots = P @ y
        j = int(np.argmin(dots))
        if y @ y - dots[j] <= tol * scale or j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)

        # minor cycles
        while True:
            Q = P[active]
            k = len(active)
            K = np.zeros((k + 1, k + 1))
            K[:k, :k] = Q @ Q.T
            K[:k, k] = 1.0
            K[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            mu = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
            if np.all(mu > 1e-14):
                lam = mu
                y = mu @ Q
                break
            neg = mu <= 1e-14
            ratios = lam[neg] / (lam[neg] - mu[neg])
            theta = float(np.min(ratios)) if ratios.size else 0.0
            lam = (1.0 - theta) * lam + theta * mu
            keep = lam > 1e-14
            # always drop at least the blocking index
            if keep.all():
                keep[np.flatnonzero(neg)[np.argmin(ratios)]] = False
            active = [a for a, kk in zip(active, keep) if kk]
            lam = lam[keep]
            lam = lam / lam.sum()
            y = lam @ P[active]

    weights = np.zeros(m)
    weights[active] = lam
    return weights @ np.asarray(points, dtype=np.float64), weights


def lmo(set_: FeasibleSet, pi, rule: TieRule = DEFAULT_RULE) -> np.ndarray:
    return set_.lmo(pi, rule)


def project(set_: FeasibleSet, x) -> np.ndarray:
    return set_.project(x)


def diameter(set_: FeasibleSet) -> float:
    return set_.diameter()


def contains(set_: FeasibleSet, x, tol: float = 1e-9) -> bool:
    return set_.contains(x, tol)


def set_from_dict(d: dict) -> FeasibleSet:
    """Build a set from its JSON description, e.g. ``{"type": "simplex", "n": 3}``."""
    kind = d.get("type")
    if kind == "simplex":
        return Simplex(int(d["n"]))
    if kind == "box":
        return Box(d["lower"], d["upper"])
    if kind == "vertices":
        return VertexPolytope(d["points"])
    if kind == "product":
        return Product(tuple(set_from_dict(f) for f in d["factors"]))
    raise ValueError(f"unknown set type {kind!r}")
