import numpy as np
import pytest

from bcr import generators as gen
from bcr.errors import DegenerateGraph, Infeasible
from bcr.model import ConstraintSense, Style, default_config
from bcr.oracle import brute_force_bqp
from bcr.rounding import hyperplane_round
from bcr.solver import solve


def _bf_constraints(problem):
    return [(c.factor, c.bound, c.sense) for c in problem.constraints]


def test_synthetic_rank_one_forced():
    spec = gen.SyntheticSpec(n=2, true_rank=1, num_constraints=4, seed=0)
    problem, Y = gen.gen_synthetic(spec, x_true=np.array([1.0, 0.0]))
    np.testing.assert_allclose(Y, [[1.0, 0.0], [0.0, 0.0]])
    for c in problem.constraints:
        assert c.bound == pytest.approx(c.factor[0, 0] ** 2)


def test_synthetic_bounds_reevaluated():
    spec = gen.SyntheticSpec(n=20, true_rank=3, num_constraints=50, seed=2)
    problem, Y = gen.gen_synthetic(spec)
    assert problem.num_constraints == 50 and problem.rank == 3
    for c in problem.constraints:
        assert np.trace(c.factor.T @ c.factor @ Y) == pytest.approx(c.bound, rel=1e-10)
    np.testing.assert_allclose(gen.synthetic_truth(spec) @ gen.synthetic_truth(spec).T, Y)
    assert gen.relative_error(Y, Y) == 0.0


def test_affinity_rules():
    W = gen.affinity(np.zeros((2, 3)), np.array([[0.0, 0.0], [0.0, 0.0]]), 1.0, 1.0, 0.5)
    assert W[0, 1] == 1.0
    W = gen.affinity(np.zeros((2, 3)), np.array([[0.0, 0.0], [0.6, 0.0]]), 1.0, 1.0, 0.5)
    assert W[0, 1] == 0.0 and W[0, 0] == 1.0


def test_graphcut_structure():
    spec = gen.GraphCutSpec(n=20, fg_idx=(0, 1), bg_idx=(18, 19), seed=1)
    problem, lap = gen.gen_graphcut(spec)
    assert problem.num_constraints == 24
    senses = [c.sense for c in problem.constraints]
    assert senses.count(ConstraintSense.GE) == 3
    np.testing.assert_allclose(lap @ np.ones(20), 0.0, atol=1e-10)
    np.testing.assert_array_equal(lap, lap.T)
    assert problem.constraints[20].label == "balance"


def test_graphcut_degenerate():
    with pytest.raises(DegenerateGraph):
        gen.gen_graphcut(gen.GraphCutSpec(n=10, radius=1e-6))


def test_graphcut_spec_validation():
    with pytest.raises(ValueError):
        gen.GraphCutSpec(n=5, fg_idx=(0,), bg_idx=(0,))
    with pytest.raises(ValueError):
        gen.GraphCutSpec(n=5, kappa=1.5)


def test_graphcut_small_instances_match_brute_force():
    ok = total = 0
    for seed in range(20):
        problem, cost = gen.gen_graphcut(gen.GraphCutSpec(n=6, seed=seed))
        try:
            bf = brute_force_bqp(cost, _bf_constraints(problem))
        except Infeasible:
            continue
        total += 1
        r = solve(problem, default_config(problem, Style.BQP))
        lab = hyperplane_round(r.X, cost, seed=seed, problem=problem)
        ok += lab.labels[0] != lab.labels[5] and lab.objective <= 1.05 * bf.best_objective + 1e-12
    assert total >= 15 and ok >= 0.9 * total


def test_coseg_structure_and_rounding():
    spec = gen.CosegSpec(images=2, sizes=(4, 4), seed=3)
    problem, cost = gen.gen_coseg(spec)
    assert np.linalg.eigvalsh(cost)[0] >= -1e-10
    deltas = [c for c in problem.constraints if c.sense is ConstraintSense.LE]
    assert len(deltas) == 2
    x = np.array([1, 1, 1, -1, 1, 1, 1, 1.0])
    # Image 0 has label sum 2 <= lambda = 2; image 1 has sum 4 > 2.
    assert np.sum((deltas[0].factor @ x) ** 2) <= deltas[0].bound
    assert np.sum((deltas[1].factor @ x) ** 2) > deltas[1].bound
    bf = brute_force_bqp(cost, _bf_constraints(problem))
    r = solve(problem, default_config(problem, Style.BQP))
    lab = hyperplane_round(r.X, cost, seed=3, problem=problem)
    assert lab.feasible
    assert lab.objective <= 1.05 * bf.best_objective + 1e-12


def test_metric_distances():
    spec = gen.MetricSpec(num_matrices=6, dim=4, target_rank=2, seed=0)
    S = gen.spd_matrices(spec)
    R = [gen.spd_log(s) for s in S]
    assert gen.lem_distance(S[0], S[0]) == 0.0
    assert gen.lem_distance(S[0], S[1]) == gen.lem_distance(S[1], S[0])
    for i in range(6):
        for j in range(6):
            assert gen.projected_distance(np.eye(4), R[i], R[j]) == pytest.approx(
                gen.lem_distance(S[i], S[j]), abs=1e-10)


def test_metric_problem():
    spec = gen.MetricSpec(num_matrices=6, dim=4, target_rank=2, seed=0)
    problem, pairs = gen.gen_metric(spec)
    assert len(pairs) == 15 == problem.num_constraints
    u = {b for _, s, b in pairs if s is ConstraintSense.LE}
    l = {b for _, s, b in pairs if s is ConstraintSense.GE}
    assert len(u) == len(l) == 1 and u.pop() < l.pop()
    assert default_config(problem, Style.METRIC).alpha == pytest.approx(1 / np.sqrt(15))


def test_metric_pair_validation():
    with pytest.raises(ValueError):
        gen.MetricSpec(num_matrices=4, similar_pairs=((0, 1),), dissimilar_pairs=((1, 0),))


@pytest.mark.parametrize("make", [
    lambda s: gen.gen_synthetic(gen.SyntheticSpec(n=8, num_constraints=10, seed=s))[0],
    lambda s: gen.gen_graphcut(gen.GraphCutSpec(n=8, seed=s))[0],
    lambda s: gen.gen_coseg(gen.CosegSpec(seed=s))[0],
    lambda s: gen.gen_metric(gen.MetricSpec(num_matrices=5, dim=3, target_rank=2, seed=s))[0],
])
def test_generators_deterministic(make):
    a, b = make(7), make(7)
    assert np.array_equal(a.objective, b.objective)
    for ca, cb in zip(a.constraints, b.constraints):
        assert np.array_equal(ca.factor, cb.factor) and ca.bound == cb.bound
