import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vifw.feasible_sets import (
    Box,
    Product,
    Simplex,
    TieRule,
    VertexPolytope,
    contains,
    diameter,
    lmo,
    nearest_point_in_hull,
    project,
    project_simplex,
    set_from_dict,
)

LEX = TieRule.LEXICOGRAPHIC_MIN
FIRST = TieRule.FIRST_VERTEX


def pentagon():
    a = 2 * np.pi * np.arange(5) / 5
    return VertexPolytope(np.column_stack([np.cos(a), np.sin(a)]))


def shipped_sets():
    return [
        Simplex(1),
        Simplex(3),
        Simplex(6),
        Box([0.0, -1.0, 2.0], [1.0, 1.0, 2.5]),
        pentagon(),
        VertexPolytope([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]]),
        Product((Simplex(2), Simplex(3))),
        Product((Simplex(2), Box([-1.0, -1.0], [1.0, 1.0]))),
    ]


SETS = shipped_sets()
IDS = [type(s).__name__ + str(s.dimension) for s in SETS]


# ------------------------------------------------------------------ lmo examples


def test_lmo_simplex_unique_min():
    assert np.array_equal(lmo(Simplex(3), [3.0, 1.0, 2.0]), [0.0, 1.0, 0.0])


def test_lmo_simplex_tie_goes_to_smallest_index():
    assert np.array_equal(lmo(Simplex(3), [1.0, 1.0, 2.0], LEX), [1.0, 0.0, 0.0])


def test_lmo_box_sign_pattern():
    assert np.array_equal(lmo(Box([0, 0], [1, 1]), [-1.0, 2.0]), [1.0, 0.0])


def test_lmo_product_factorwise():
    P = Product((Simplex(2), Simplex(2)))
    assert np.array_equal(lmo(P, [0.0, -1.0, 5.0, 4.0]), [0.0, 1.0, 0.0, 1.0])


def test_lmo_zero_direction_is_first_vertex():
    for s in SETS:
        out = s.lmo(np.zeros(s.dimension))
        V = s.vertices()
        if isinstance(s, VertexPolytope):
            expected = V[np.lexsort(V.T[::-1])[0]]
        else:
            expected = V[0]
        assert np.array_equal(out, expected)


def test_tie_rules_differ_only_on_vertex_lists():
    P = VertexPolytope([[1.0, 1.0], [0.0, 1.0], [5.0, 0.0]])
    pi = np.array([0.0, -1.0])  # first two vertices tie
    assert np.array_equal(P.lmo(pi, FIRST), [1.0, 1.0])
    assert np.array_equal(P.lmo(pi, LEX), [0.0, 1.0])
    for s in (Simplex(4), Box([0, 0, 0], [1, 2, 3])):
        pi = np.array([0.0, 0.0, 1.0, 0.0][: s.dimension])
        assert np.array_equal(s.lmo(pi, FIRST), s.lmo(pi, LEX))


@pytest.mark.parametrize("bad", [[1.0, 2.0], [1.0, np.nan, 0.0], [np.inf, 0.0, 0.0]])
def test_lmo_rejects_bad_direction(bad):
    with pytest.raises(ValueError):
        Simplex(3).lmo(bad)


@pytest.mark.parametrize("s", SETS, ids=IDS)
def test_lmo_optimal_against_sampled_points(s, rng):
    V = s.vertices()
    for _ in range(200):
        pi = rng.standard_normal(s.dimension)
        out = s.lmo(pi)
        # a vertex of the canonical set
        assert np.min(np.abs(V - out).sum(axis=1)) == 0.0
        Z = s.sample(rng, 50)
        assert pi @ out <= (Z @ pi).min() + 1e-12
        assert pi @ out <= (V @ pi).min() + 1e-12


@pytest.mark.parametrize("s", SETS, ids=IDS)
def test_lmo_positively_homogeneous(s, rng):
    for _ in range(100):
        pi = rng.standard_normal(s.dimension)
        pi[rng.random(s.dimension) < 0.3] = 0.0  # force ties
        for c in (0.25, 2.0, 1024.0):
            assert np.array_equal(s.lmo(c * pi), s.lmo(pi))


def test_lmo_deterministic(rng):
    s = pentagon()
    pi = rng.standard_normal(2)
    assert np.array_equal(s.lmo(pi), s.lmo(pi.copy()))


# ------------------------------------------------------------------ projections


def test_project_box_clamps():
    assert np.array_equal(project(Box([0, 0], [1, 1]), [2.0, -1.0]), [1.0, 0.0])


def test_project_simplex_symmetric():
    np.testing.assert_allclose(project(Simplex(2), [0.6, 0.6]), [0.5, 0.5], atol=1e-15)


def test_project_simplex_fixed_point():
    assert np.array_equal(project(Simplex(3), [1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])


def _simplex_projection_bisection(x, iters=200):
    """Threshold by bisection on sum(max(x - t, 0)) = 1; independent of the sort method."""
    lo, hi = x.min() - 1.0, x.max()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.maximum(x - mid, 0).sum() > 1.0:
            lo = mid
        else:
            hi = mid
    return np.maximum(x - 0.5 * (lo + hi), 0.0)


@given(arrays(np.float64, st.integers(1, 12), elements=st.floats(-50, 50)))
def test_simplex_projection_matches_bisection(x):
    p = project_simplex(x)
    np.testing.assert_allclose(p, _simplex_projection_bisection(x), atol=1e-9)
    assert Simplex(len(x)).contains(p, 1e-12)


def _vi_residual(s, x, p):
    """max over vertices of <x - p, v - p>; <= 0 iff p is the projection."""
    return float(np.max((s.vertices() - p) @ (x - p)))


@pytest.mark.parametrize("s", SETS, ids=IDS)
def test_projection_characterization(s, rng):
    lo, hi = s.bounding_box()
    for _ in range(50):
        x = rng.uniform(lo - 2.0, hi + 2.0)
        p = s.project(x)
        assert s.contains(p, 1e-9)
        assert _vi_residual(s, x, p) <= 1e-9
        Z = s.sample(rng, 30)
        assert np.max((Z - p) @ (x - p)) <= 1e-9


@pytest.mark.parametrize("s", SETS, ids=IDS)
def test_projection_idempotent_and_nonexpansive(s, rng):
    lo, hi = s.bounding_box()
    for _ in range(50):
        x, y = rng.uniform(lo - 1.0, hi + 1.0), rng.uniform(lo - 1.0, hi + 1.0)
        px, py = s.project(x), s.project(y)
        np.testing.assert_allclose(s.project(px), px, atol=1e-12)
        assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12


def test_wolfe_interior_point_is_fixed():
    P = pentagon()
    x = np.array([0.1, -0.2])
    p, w = nearest_point_in_hull(P.points, x)
    np.testing.assert_allclose(p, x, atol=1e-12)
    assert w.min() >= 0 and abs(w.sum() - 1) < 1e-12


def test_wolfe_outside_lands_on_edge():
    # unit square, point to the right: projection onto the right edge
    sq = VertexPolytope([[0, 0], [1, 0], [1, 1], [0, 1]])
    np.testing.assert_allclose(sq.project([3.0, 0.25]), [1.0, 0.25], atol=1e-12)
    np.testing.assert_allclose(sq.project([3.0, 4.0]), [1.0, 1.0], atol=1e-12)


# ------------------------------------------------------------------ diameter / contains


def test_diameter_examples():
    assert diameter(Simplex(3)) == pytest.approx(np.sqrt(2), abs=1e-15)
    assert diameter(Box([0, 0], [1, 1])) == pytest.approx(np.sqrt(2), abs=1e-15)
    assert diameter(Product((Simplex(2), Simplex(2)))) == pytest.approx(2.0, abs=1e-15)
    assert diameter(Simplex(1)) == 0.0


@pytest.mark.parametrize("s", [x for x in SETS if x.num_vertices() <= 64], ids=lambda s: str(s.dimension))
def test_diameter_is_max_vertex_distance(s):
    V = s.vertices()
    brute = max(np.linalg.norm(a - b) for a in V for b in V)
    assert s.diameter() == pytest.approx(brute, abs=1e-12)


def test_contains_examples():
    assert contains(Simplex(2), [0.5, 0.5], 1e-9)
    assert not contains(Simplex(2), [0.6, 0.6], 1e-9)
    assert contains(Box([0, 0], [1, 1]), [1 + 1e-12, 0.5], 1e-9)
    assert not contains(Box([0, 0], [1, 1]), [1 + 1e-6, 0.5], 1e-9)
    assert contains(pentagon(), [0.0, 0.0])
    assert not contains(pentagon(), [1.0, 1.0])


def test_contains_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        Simplex(3).contains([0.5, 0.5])


# ------------------------------------------------------------------ construction


@pytest.mark.parametrize("bad", [
    lambda: Simplex(0),
    lambda: Box([1.0, 0.0], [0.0, 1.0]),
    lambda: Box([0.0], [1.0, 2.0]),
    lambda: VertexPolytope(np.empty((0, 2))),
    lambda: Product(()),
])
def test_invalid_sets_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_sets_are_immutable():
    b = Box([0, 0], [1, 1])
    with pytest.raises(ValueError):
        b.lower[0] = 5.0


def test_product_dimension_and_vertices():
    P = Product((Simplex(2), Box([0, 0, 0], [1, 1, 1])))
    assert P.dimension == 5
    assert P.vertices().shape == (16, 5)


def test_box_too_many_corners():
    with pytest.raises(ValueError):
        Box(np.zeros(25), np.ones(25)).vertices()


@pytest.mark.parametrize("s", SETS, ids=IDS)
def test_json_round_trip(s, rng):
    t = set_from_dict(s.to_dict())
    assert t.dimension == s.dimension
    pi = rng.standard_normal(s.dimension)
    assert np.array_equal(t.lmo(pi), s.lmo(pi))
    assert t.diameter() == s.diameter()
