import numpy as np
import pytest

from bcr.errors import Infeasible, TooLarge
from bcr.generators import SyntheticSpec, gen_synthetic, synthetic_truth
from bcr.model import ConstraintSense, FactoredConstraint, SdpProblem
from bcr.oracle import bcr_objective_termwise, brute_force_bqp, check_solution, jacobi_eigh


def test_brute_force_tie_rule():
    # Both optima tie at -2; the lexicographically smallest (-1 < +1) wins.
    res = brute_force_bqp(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert res.best_objective == -2.0
    np.testing.assert_array_equal(res.best_labels, [-1.0, 1.0])


def test_brute_force_zero_cost():
    res = brute_force_bqp(np.zeros((4, 4)))
    assert res.best_objective == 0.0
    np.testing.assert_array_equal(res.best_labels, -np.ones(4))
    assert res.num_feasible == 16


def test_brute_force_reverse_order_agrees(rng):
    G = rng.standard_normal((12, 12))
    cost = 0.5 * (G + G.T)
    a = brute_force_bqp(cost)
    b = brute_force_bqp(cost, reverse=True, chunk=100)
    np.testing.assert_array_equal(a.best_labels, b.best_labels)
    assert a.best_objective == b.best_objective


def test_brute_force_beats_random_feasible(rng):
    G = rng.standard_normal((10, 10))
    cost = G.T @ G
    cons = [(np.ones((1, 10)), 0.0, "eq")]
    res = brute_force_bqp(cost, cons)
    assert abs(res.best_labels.sum()) == 0
    for _ in range(1000):
        x = rng.permutation(np.repeat([-1.0, 1.0], 5))
        assert res.best_objective <= x @ cost @ x + 1e-9


def test_brute_force_errors():
    with pytest.raises(TooLarge):
        brute_force_bqp(np.zeros((23, 23)))
    with pytest.raises(Infeasible):
        brute_force_bqp(np.eye(3), [(np.ones((1, 3)), 0.0, "eq")])


def test_check_solution_truth_and_zero():
    spec = SyntheticSpec(n=10, true_rank=2, num_constraints=30, seed=4)
    problem, _ = gen_synthetic(spec)
    assert check_solution(problem, synthetic_truth(spec)).max_violation <= 1e-10
    rep = check_solution(problem, np.zeros((10, 2)))
    np.testing.assert_allclose(rep.violations, [c.bound for c in problem.constraints])
    assert not rep.feasible(1e-3)


def test_check_solution_matches_trace_formula(rng):
    L = [rng.standard_normal((3, 6)) for _ in range(4)]
    senses = ["eq", "le", "ge", "eq"]
    cons = tuple(FactoredConstraint(l, 2.0, ConstraintSense(s)) for l, s in zip(L, senses))
    problem = SdpProblem(np.eye(6), cons, 2)
    X = rng.standard_normal((6, 2))
    rep = check_solution(problem, X)
    for i, l in enumerate(L):
        v = np.trace(X.T @ l.T @ l @ X)
        assert rep.values[i] == pytest.approx(v, rel=1e-12)


def test_jacobi_matches_lapack(rng):
    A = rng.standard_normal((9, 9))
    A = 0.5 * (A + A.T)
    w, V = jacobi_eigh(A)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-10)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, A, atol=1e-10)


def test_termwise_objective_zero_state():
    assert bcr_objective_termwise(np.eye(2), [np.eye(2)], [1.0], ["eq"], 2.0, 1.0,
                                  np.zeros((2, 1)), [np.zeros((2, 1))]) == 0.0
