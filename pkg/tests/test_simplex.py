import numpy as np
import pytest
from scipy.optimize import linprog

from zonobasis.simplex import INFEASIBLE, OPTIMAL, LpResult, feasible, solve_lp


def test_known_minimum():
    # min x - y  s.t.  x + y = 1,  0 <= x, y <= 1
    res = solve_lp([1.0, -1.0], [[1.0, 1.0]], [1.0], [0.0, 0.0], [1.0, 1.0])
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(-1.0, abs=1e-9)
    assert res.x[1] == pytest.approx(1.0, abs=1e-9)


def test_box_membership_feasibility():
    A = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert feasible(A, [0.3, -0.2], [-0.5, -0.5], [0.5, 0.5])
    assert not feasible(A, [0.6, 0.0], [-0.5, -0.5], [0.5, 0.5])
    # boundary point is feasible at exact tolerance
    assert feasible(A, [0.5, 0.5], [-0.5, -0.5], [0.5, 0.5])


def test_redundant_rows():
    # duplicated constraint row must not confuse phase 1
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    assert feasible(A, [1.0, 1.0], [0.0, 0.0], [1.0, 1.0])
    assert not feasible(A, [1.0, 0.5], [0.0, 0.0], [1.0, 1.0])


def test_infeasible_bounds():
    res = solve_lp([1.0], [[1.0]], [0.0], [1.0], [0.0])
    assert res.status == INFEASIBLE


def test_upper_bound_infinite():
    # min x  s.t.  x - y = 0,  x >= 1, y in [0, inf)
    res = solve_lp([1.0, 0.0], [[1.0, -1.0]], [0.0], [1.0, 0.0], [np.inf, np.inf])
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(1.0, abs=1e-9)


def test_deterministic_repeat():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((3, 8))
    b = A @ rng.uniform(-0.4, 0.4, 8)
    c = rng.standard_normal(8)
    first = solve_lp(c, A, b, -0.5 * np.ones(8), 0.5 * np.ones(8))
    second = solve_lp(c, A, b, -0.5 * np.ones(8), 0.5 * np.ones(8))
    assert first.status == second.status == OPTIMAL
    assert np.array_equal(first.x, second.x)


@pytest.mark.parametrize("trial", range(20))
def test_random_lp_against_scipy(trial):
    rng = np.random.default_rng(1000 + trial)
    m = rng.integers(1, 4)
    n = rng.integers(m, 10)
    A = rng.standard_normal((m, n))
    c = rng.standard_normal(n)
    lower = -0.5 * np.ones(n)
    upper = 0.5 * np.ones(n)
    if trial % 3 == 0:
        b = A @ rng.uniform(-0.5, 0.5, n)  # feasible by construction
    else:
        b = rng.standard_normal(m)
    ours = solve_lp(c, A, b, lower, upper)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=[(-0.5, 0.5)] * n, method="highs")
    if ref.status == 2:
        assert ours.status == INFEASIBLE
    else:
        assert ref.status == 0
        assert ours.status == OPTIMAL
        assert ours.objective == pytest.approx(ref.fun, abs=1e-7)


def test_result_shape():
    res = solve_lp([0.0], [[1.0]], [0.25], [-0.5], [0.5])
    assert isinstance(res, LpResult)
    assert res.x.shape == (1,)
    assert res.x[0] == pytest.approx(0.25, abs=1e-9)
