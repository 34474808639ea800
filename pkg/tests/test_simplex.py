import numpy as np
import pytest

from polyreg.simplex import (
    InfeasibleError, UnboundedError, lp_feasible, solve_lp,
)


def scipy_lp(c, A, b):
    from scipy.optimize import linprog

    res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


def test_small_known_lp():
    # min x1 + x2 s.t. x1 + 2 x2 = 4, x >= 0 -> optimum at (0, 2), value 2
    c = np.array([1.0, 1.0])
    A = np.array([[1.0, 2.0]])
    b = np.array([4.0])
    x, val = solve_lp(c, A, b)
    assert val == pytest.approx(2.0, abs=1e-9)
    assert np.allclose(A @ x, b, atol=1e-9)


def test_matches_scipy_on_random_instances():
    rng = np.random.default_rng(3)
    for _ in range(40):
        m, n = rng.integers(1, 5), rng.integers(5, 12)
        A = rng.standard_normal((m, n))
        x_feas = rng.uniform(0, 1, n)
        b = A @ x_feas
        c = rng.uniform(0.1, 2.0, n)
        x, val = solve_lp(c, A, b)
        assert np.all(x >= -1e-9)
        assert np.allclose(A @ x, b, atol=1e-8)
        assert val == pytest.approx(scipy_lp(c, A, b), abs=1e-7)


def test_negative_rhs_handled():
    c = np.array([1.0, 1.0])
    A = np.array([[-1.0, 0.0]])
    b = np.array([-3.0])
    x, val = solve_lp(c, A, b)
    assert val == pytest.approx(3.0, abs=1e-9)


def test_infeasible_raises():
    # x1 + x2 = -1 with x >= 0 is infeasible
    with pytest.raises(InfeasibleError):
        solve_lp(np.ones(2), np.array([[1.0, 1.0]]), np.array([-1.0]))


def test_unbounded_raises():
    # min -x1 with a free direction
    with pytest.raises(UnboundedError):
        solve_lp(np.array([-1.0, 0.0]), np.array([[0.0, 1.0]]), np.array([1.0]))


def test_degenerate_instance_terminates():
    # heavily degenerate: many ties in the ratio test; Bland's rule must
    # still terminate at the optimum
    c = np.array([-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0])
    A = np.array([
        [0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
        [0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    ])
    b = np.array([0.0, 0.0, 1.0])
    x, val = solve_lp(c, A, b)
    assert val == pytest.approx(scipy_lp(c, A, b), abs=1e-8)


def test_redundant_rows_accepted():
    A = np.array([[1.0, 1.0], [2.0, 2.0]])
    b = np.array([2.0, 4.0])
    x, val = solve_lp(np.ones(2), A, b)
    assert val == pytest.approx(2.0, abs=1e-9)


def test_lp_feasible():
    A = np.array([[1.0, 1.0]])
    ok, _ = lp_feasible(A, np.array([1.0]))
    assert ok
    ok, _ = lp_feasible(A, np.array([-1.0]))
    assert not ok
