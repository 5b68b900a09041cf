"""Monotone affine operators F(z) = M z + q, with a declared monotonicity class.

All shipped variants are affine, so they are total on R^n and the
linear part is available for Jacobian and Lipschitz estimates. The
declared strong-monotonicity modulus ``mu`` is verified at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PSD_TOL = 1e-10


def _matrix(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != 2 or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be a finite 2-d array")
    arr.setflags(write=False)
    return arr


def _vector(a, n: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64).reshape(-1)
    if arr.shape[0] != n or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be a finite vector of length {n}")
    arr.setflags(write=False)
    return arr


def min_sym_eig(M: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetric part of M."""
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


class Operator:
    """Base class: an affine monotone map with modulus ``mu``."""

    mu: float
    _M: np.ndarray
    _q: np.ndarray

    @property
    def dimension(self) -> int:
        return self._q.shape[0]

    def linear_part(self) -> tuple[np.ndarray, np.ndarray]:
        """(M, q) with F(z) = M z + q."""
        return self._M, self._q

    def __call__(self, x) -> np.ndarray:
        return self._M @ x + self._q

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.dimension:
            raise ValueError(f"x has shape {x.shape}, expected ({self.dimension},)")
        if not np.all(np.isfinite(x)):
            raise ValueError("x has non-finite entries")
        return self(x)

    def scaled(self, c: float) -> "Scaled":
        """The operator c * F (c > 0)."""
        return Scaled(self, c)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _verify_mu(self):
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        lam = min_sym_eig(self._M)
        if lam < self.mu - PSD_TOL:
            raise ValueError(
                f"operator is not {self.mu}-strongly monotone: "
                f"smallest eigenvalue of the symmetric part is {lam:.3g}"
            )


@dataclass(frozen=True, eq=False)
class Affine(Operator):
    """F(x) = M x + q; monotone iff M + M^T is PSD."""

    M: np.ndarray
    q: np.ndarray
    mu: float = 0.0

    def __post_init__(self):
        M = _matrix(self.M, "M")
        if M.shape[0] != M.shape[1]:
            raise ValueError("M must be square")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "q", _vector(self.q, M.shape[0], "q"))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "_M", M)
        object.__setattr__(self, "_q", self.q)
        self._verify_mu()

    def to_dict(self):
        return {"type": "affine", "M": self.M.tolist(), "q": self.q.tolist(), "mu": self.mu}


@dataclass(frozen=True, eq=False)
class FictitiousPlay(Operator):
    """F(x, y) = (-A y, A^T x) for the zero-sum game with payoff matrix A (n x m)."""

    A: np.ndarray
    mu: float = field(init=False, default=0.0)

    def __post_init__(self):
        A = _matrix(self.A, "A")
        n, m = A.shape
        M = np.zeros((n + m, n + m))
        M[:n, n:] = -A
        M[n:, :n] = A.T
        M.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "_M", M)
        object.__setattr__(self, "_q", _vector(np.zeros(n + m), n + m, "q"))

    def __call__(self, z):
        n = self.A.shape[0]
        return np.concatenate([-(self.A @ z[n:]), self.A.T @ z[:n]])

    def to_dict(self):
        return {"type": "fictitious_play", "A": self.A.tolist()}


@dataclass(frozen=True, eq=False)
class LpSaddle(Operator):
    """F(x, y) = (c - A^T y, A x - b): saddle operator of c^T x - y^T (A x - b).

    A is m x n, x in R^n, y in R^m.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    mu: float = field(init=False, default=0.0)

    def __post_init__(self):
        A = _matrix(self.A, "A")
        m, n = A.shape
        b = _vector(self.b, m, "b")
        c = _vector(self.c, n, "c")
        M = np.zeros((n + m, n + m))
        M[:n, n:] = -A.T
        M[n:, :n] = A
        M.setflags(write=False)
        for name, val in (("A", A), ("b", b), ("c", c), ("_M", M)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "_q", _vector(np.concatenate([c, -b]), n + m, "q"))

    def __call__(self, z):
        n = self.A.shape[1]
        return np.concatenate([self.c - self.A.T @ z[n:], self.A @ z[:n] - self.b])

    def to_dict(self):
        return {"type": "lp_saddle", "A": self.A.tolist(), "b": self.b.tolist(), "c": self.c.tolist()}


@dataclass(frozen=True, eq=False)
class SaddleQuadratic(Operator):
    """Saddle gradient (grad_x L, -grad_y L) of

        L(x, y) = 0.5 x^T Q_x x + x^T B y - 0.5 y^T Q_y y + <q, (x, -y)>

    with Q_x, Q_y symmetric PSD. Strongly monotone with
    mu = min(lambda_min(Q_x), lambda_min(Q_y)).
    """

    Q_x: np.ndarray
    Q_y: np.ndarray
    B: np.ndarray
    q: np.ndarray
    mu: float = field(init=False, default=0.0)

    def __post_init__(self):
        Qx, Qy, B = _matrix(self.Q_x, "Q_x"), _matrix(self.Q_y, "Q_y"), _matrix(self.B, "B")
        n, m = B.shape
        if Qx.shape != (n, n) or Qy.shape != (m, m):
            raise ValueError("Q_x, Q_y must be square and match the coupling matrix B")
        for name, Q in (("Q_x", Qx), ("Q_y", Qy)):
            if not np.allclose(Q, Q.T, atol=PSD_TOL):
                raise ValueError(f"{name} must be symmetric")
        mu = min(min_sym_eig(Qx), min_sym_eig(Qy))
        if mu < -PSD_TOL:
            raise ValueError("Q_x and Q_y must be positive semidefinite")
        M = np.block([[Qx, B], [-B.T, Qy]])
        M.setflags(write=False)
        for name, val in (("Q_x", Qx), ("Q_y", Qy), ("B", B), ("_M", M)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "q", _vector(self.q, n + m, "q"))
        object.__setattr__(self, "_q", self.q)
        object.__setattr__(self, "mu", max(mu, 0.0))

    def to_dict(self):
        return {"type": "saddle_quadratic", "Q_x": self.Q_x.tolist(), "Q_y": self.Q_y.tolist(),
                "B": self.B.tolist(), "q": self.q.tolist()}


class Scaled(Operator):
    """c * F, evaluated as c * F(x) so powers of two scale exactly."""

    def __init__(self, base: Operator, c: float):
        if not c > 0:
            raise ValueError("scale must be positive")
        self.base, self.c = base, float(c)
        self.mu = self.c * base.mu
        M, q = base.linear_part()
        self._M, self._q = self.c * M, self.c * q

    def __call__(self, x):
        return self.c * self.base(x)

    def to_dict(self):
        return {"type": "affine", "M": self._M.tolist(), "q": self._q.tolist(), "mu": self.mu}


def evaluate(op: Operator, x) -> np.ndarray:
    return op.evaluate(x)


@dataclass
class MonotonicityReport:
    min_ratio: float
    trials: int
    mu: float
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def check_monotone(op: Operator, trials: int = 1000, rng_seed: int = 0, box=None,
                   tol: float = 1e-10) -> MonotonicityReport:
    """Sample pairs and test <F(x) - F(y), x - y> >= mu ||x - y||^2.

    ``box`` is a (lower, upper) pair, typically ``set.bounding_box()``;
    defaults to [-1, 1]^n. Reports the smallest observed ratio
    <F(x) - F(y), x - y> / ||x - y||^2 and the number of pairs below
    mu - tol.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = op.dimension
    lo, hi = (-np.ones(n), np.ones(n)) if box is None else box
    rng = np.random.default_rng(rng_seed)
    min_ratio = np.inf
    violations = 0
    for _ in range(trials):
        x, y = rng.uniform(lo, hi), rng.uniform(lo, hi)
        d = x - y
        dd = d @ d
        if dd == 0.0:
            continue
        ratio = (op(x) - op(y)) @ d / dd
        min_ratio = min(min_ratio, ratio)
        if ratio < op.mu - tol:
            violations += 1
    return MonotonicityReport(float(min_ratio), trials, op.mu, violations)


def jacobian_fd(op: Operator, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian, column j = (F(x + h e_j) - F(x - h e_j)) / 2h."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    J = np.empty((op.dimension, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (op(x + e) - op(x - e)) / (2 * h)
    return J


def operator_norm_estimate(op: Operator, x, iters: int = 100, rng_seed: int = 0) -> float:
    """Power iteration for the spectral norm of the Jacobian at x."""
    J = jacobian_fd(op, x)
    v = np.random.default_rng(rng_seed).standard_normal(J.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iters):
        w = J.T @ (J @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        sigma = np.sqrt(nw)
    return float(sigma)


def operator_from_dict(d: dict) -> Operator:
    kind = d.get("type")
    if kind == "affine":
        return Affine(d["M"], d["q"], mu=d.get("mu", 0.0))
    if kind == "fictitious_play":
        return FictitiousPlay(d["A"])
    if kind == "lp_saddle":
        return LpSaddle(d["A"], d["b"], d["c"])
    if kind == "saddle_quadratic":
        return SaddleQuadratic(d["Q_x"], d["Q_y"], d["B"], d["q"])
    raise ValueError(f"unknown operator type {kind!r}")
