import json

import numpy as np
import pytest

from vifw import instances, oracle
from vifw.feasible_sets import Box, Product, Simplex
from vifw.operators import Affine
from vifw.oracle import OracleError, brute_force_gap, extragradient, uniqueness_check
from vifw.solver import fw_gap


@pytest.mark.parametrize("b", [[0.5, 0.5, 0.5], [1.7, -0.3, 0.25], [2.0, 2.0, -1.0]])
def test_affine_box_solution_is_clamp(b):
    C = Box(np.zeros(3), np.ones(3))
    op = Affine(np.eye(3), -np.array(b), mu=1.0)
    res = extragradient(C, op, tol=1e-10)
    assert res.residual <= 1e-10
    np.testing.assert_allclose(res.x_star, np.clip(b, 0, 1), atol=1e-8)
    assert C.contains(res.x_star, 1e-9)


def test_identity_game_uniform_equilibrium():
    inst = instances.identity_fp()
    res = extragradient(inst.set, inst.op, x0=[1.0, 0.0, 0.0, 1.0], tol=1e-10)
    np.testing.assert_allclose(res.x_star, np.full(4, 0.5), atol=1e-8)
    assert fw_gap(inst.set, inst.op, res.x_star)[0] <= 1e-10
    assert res.method in ("extragradient", "extragradient-ergodic")


def test_start_at_solution_returns_immediately():
    inst = instances.affine_box_vertex()
    res = extragradient(inst.set, inst.op, x0=inst.solution, tol=1e-10)
    assert res.iterations == 0
    assert np.array_equal(res.x_star, inst.solution)


def test_max_iter_raises():
    inst = instances.rps_fp()
    with pytest.raises(OracleError):
        extragradient(inst.set, inst.op, x0=inst.set.vertices()[0], tol=1e-12, max_iter=3)


def test_bad_arguments():
    inst = instances.rps_fp()
    with pytest.raises(ValueError):
        extragradient(inst.set, inst.op, tol=0.0)
    with pytest.raises(ValueError):
        extragradient(inst.set, inst.op, eta=-1.0)


@pytest.mark.parametrize("inst", instances.all_instances(), ids=lambda i: i.name)
def test_known_solutions_agree_with_oracle(inst):
    res = extragradient(inst.set, inst.op, x0=inst.set.vertices()[0], tol=1e-10)
    assert res.residual <= 1e-10
    if inst.solution is not None:
        np.testing.assert_allclose(res.x_star, inst.solution, atol=1e-7)


# ------------------------------------------------------------------ brute force


def test_brute_force_vertex_pair():
    inst = instances.identity_fp()
    assert brute_force_gap(inst.set, inst.op, [1.0, 0.0, 1.0, 0.0]) == 1.0


@pytest.mark.parametrize("inst", instances.all_instances(), ids=lambda i: i.name)
def test_brute_force_matches_fw_gap(inst, rng):
    for x in inst.set.sample(rng, 200):
        assert brute_force_gap(inst.set, inst.op, x) == pytest.approx(fw_gap(inst.set, inst.op, x)[0], abs=1e-12)


def test_brute_force_rejects_huge_vertex_sets():
    C = Box(np.zeros(21), np.ones(21))
    with pytest.raises(ValueError):
        brute_force_gap(C, Affine(np.eye(21), np.zeros(21)), np.zeros(21))


# ------------------------------------------------------------------ uniqueness


@pytest.mark.parametrize("C", [Box(np.zeros(3), np.ones(3)), Simplex(3),
                               Product((Simplex(2), Box([-1.0], [1.0])))], ids=["box", "simplex", "product"])
def test_uniqueness_strongly_monotone(C):
    q = np.linspace(-1.0, 0.7, C.dimension)
    rep = uniqueness_check(C, Affine(2 * np.eye(C.dimension), q, mu=2.0), trials=10, tol=1e-8)
    assert rep.max_pairwise <= 1e-6
    assert rep.passed


def test_uniqueness_refuses_merely_monotone():
    inst = instances.rps_fp()
    with pytest.raises(ValueError):
        uniqueness_check(inst.set, inst.op)


def test_uniqueness_single_trial():
    inst = instances.gfp_quadratic()
    rep = uniqueness_check(inst.set, inst.op, trials=1)
    assert rep.max_pairwise == 0.0 and rep.passed


def test_summed_vi_inequalities_nonpositive(rng):
    """<F(x)-F(y), x-y> <= 0 for two solutions, which mu-strong monotonicity turns into x = y."""
    inst = instances.gfp_quadratic()
    a = extragradient(inst.set, inst.op, x0=inst.set.sample(rng), tol=1e-12).x_star
    b = extragradient(inst.set, inst.op, x0=inst.set.sample(rng), tol=1e-12).x_star
    Fa, Fb = inst.op(a), inst.op(b)
    # each solution's VI inequality evaluated at the other one
    assert Fa @ (b - a) >= -1e-10 and Fb @ (a - b) >= -1e-10
    summed = (Fa - Fb) @ (a - b)
    assert summed <= 1e-10
    assert inst.op.mu * np.linalg.norm(a - b) ** 2 <= summed + 1e-10


# ------------------------------------------------------------------ cache


def test_cache_round_trip(tmp_path):
    inst = instances.affine_simplex()
    res = extragradient(inst.set, inst.op, tol=1e-10)
    path = oracle.store(inst.set, inst.op, 1e-10, res, tmp_path)
    data = json.loads(path.read_text())
    assert list(data) == [oracle.instance_key(inst.set, inst.op, 1e-10)]
    hit = oracle.lookup(inst.set, inst.op, 1e-10, tmp_path)
    assert np.array_equal(hit.x_star, res.x_star) and hit.method == res.method
    assert oracle.lookup(inst.set, inst.op, 1e-8, tmp_path) is None


def test_cached_extragradient_uses_env_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("VIFW_CACHE_DIR", str(tmp_path))
    inst = instances.identity_fp()
    first = oracle.cached_extragradient(inst.set, inst.op, tol=1e-10)
    assert (tmp_path / oracle.CACHE_FILE).exists()

    def boom(*a, **k):
        raise AssertionError("should have hit the cache")

    monkeypatch.setattr(oracle, "extragradient", boom)
    second = oracle.cached_extragradient(inst.set, inst.op, tol=1e-10)
    assert np.array_equal(first.x_star, second.x_star)


def test_instance_key_depends_on_data():
    a = oracle.instance_key(Simplex(2), Affine(np.eye(2), [0, 0]), 1e-8)
    assert a == oracle.instance_key(Simplex(2), Affine(np.eye(2), [0, 0]), 1e-8)
    assert a != oracle.instance_key(Simplex(2), Affine(np.eye(2), [0, 1]), 1e-8)
    assert a != oracle.instance_key(Simplex(2), Affine(np.eye(2), [0, 0]), 1e-9)
