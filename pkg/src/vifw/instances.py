"""Named problem instances used by the tests, example configs and scripts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feasible_sets import Box, FeasibleSet, Product, Simplex, VertexPolytope
from .operators import Affine, FictitiousPlay, LpSaddle, Operator, SaddleQuadratic

RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    set: FeasibleSet
    op: Operator
    solution: np.ndarray | None = None  # analytic solution when known and unique

    @property
    def strongly_monotone(self) -> bool:
        return self.op.mu > 0


def identity_fp() -> Instance:
    # matching pennies style identity game: unique equilibrium is uniform/uniform
    return Instance("identity_fp", Product((Simplex(2), Simplex(2))), FictitiousPlay(np.eye(2)),
                    np.full(4, 0.5))


def rps_fp() -> Instance:
    return Instance("rps_fp", Product((Simplex(3), Simplex(3))), FictitiousPlay(RPS),
                    np.full(6, 1.0 / 3.0))


def lp_saddle() -> Instance:
    # min x1 + 2 x2 s.t. A x = b over the simplex; x* = (0.5, 0.5), multipliers in a box
    A = [[1.0, 2.0], [3.0, 1.0]]
    return Instance("lp_saddle", Product((Simplex(2), Box([-1.0, -1.0], [1.0, 1.0]))),
                    LpSaddle(A, b=[1.5, 2.0], c=[1.0, 2.0]))


def affine_box() -> Instance:
    target = np.array([1.0 / np.pi, 1.4, -0.2])
    return Instance("affine_box", Box(np.zeros(3), np.ones(3)),
                    Affine(2.0 * np.eye(3), -2.0 * target, mu=2.0), np.clip(target, 0.0, 1.0))


def affine_simplex() -> Instance:
    target = np.array([np.e / 4.0, 0.5, -0.3])
    shift = (target[0] + target[1] - 1.0) / 2.0  # both positive coordinates stay active
    return Instance("affine_simplex", Simplex(3), Affine(2.0 * np.eye(3), -2.0 * target, mu=2.0),
                    np.array([target[0] - shift, target[1] - shift, 0.0]))


def affine_box_vertex() -> Instance:
    # solution (1, 0) is a corner and the unique LMO answer to F(x*) = (-0.5, 0.5)
    return Instance("affine_box_vertex", Box([0.0, 0.0], [1.0, 1.0]),
                    Affine(np.eye(2), [-1.5, 0.5], mu=1.0), np.array([1.0, 0.0]))


def gfp_quadratic() -> Instance:
    """Strongly monotone saddle operator over a product of simplices (a polytope)."""
    Qx = np.array([[2.0, 0.5, 0.0], [0.5, 1.5, 0.0], [0.0, 0.0, 1.0]])
    Qy = np.eye(3)
    q = np.array([0.2, -0.1, 0.3, -0.2, 0.1, 0.0])
    return Instance("gfp_quadratic", Product((Simplex(3), Simplex(3))),
                    SaddleQuadratic(Qx, Qy, RPS, q))


def pentagon() -> Instance:
    angles = 2 * np.pi * np.arange(5) / 5
    pts = np.column_stack([np.cos(angles), np.sin(angles)])
    target = np.array([1.2, 0.9])
    return Instance("pentagon", VertexPolytope(pts), Affine(2.0 * np.eye(2), -2.0 * target, mu=2.0))


SHIPPED = {f.__name__: f for f in (identity_fp, rps_fp, lp_saddle, affine_box, affine_simplex,
                                   affine_box_vertex, gfp_quadratic, pentagon)}


def get(name: str) -> Instance:
    try:
        return SHIPPED[name]()
    except KeyError:
        raise KeyError(f"unknown instance {name!r}; choose from {sorted(SHIPPED)}") from None


def all_instances() -> list[Instance]:
    return [f() for f in SHIPPED.values()]
