import numpy as np
import pytest

from mpvc.qp import solve_qp, solve_qp_elastic


def kkt_ok(B, c, A_eq, b_eq, A_in, b_in, res, tol=1e-7):
    """KKT verification oracle: for a strictly convex QP this certifies
    global optimality independently of the active-set path."""
    x, lam, mu = res.x, res.lam, res.mu
    r = B @ x + c
    if lam.size:
        r = r + A_in.T @ lam
    if mu.size:
        r = r + A_eq.T @ mu
    if np.max(np.abs(r)) > tol:
        return False
    if b_eq.size and np.max(np.abs(A_eq @ x - b_eq)) > tol:
        return False
    if b_in.size:
        s = A_in @ x - b_in
        if np.max(s) > tol:
            return False
        if np.min(lam) < -tol:
            return False
        if np.max(np.abs(s * lam)) > tol:
            return False
    return True


def test_unconstrained():
    B = np.diag([2.0, 4.0])
    c = np.array([-2.0, -8.0])
    res = solve_qp(B, c, np.zeros((0, 2)), np.zeros(0), np.zeros((0, 2)), np.zeros(0))
    np.testing.assert_allclose(res.x, [1.0, 2.0], atol=1e-10)


def test_equality_only():
    # min 1/2 ||x||^2 s.t. x1 + x2 = 2 -> x = (1, 1), mu = -1
    B = np.eye(2)
    c = np.zeros(2)
    A = np.array([[1.0, 1.0]])
    res = solve_qp(B, c, A, np.array([2.0]), np.zeros((0, 2)), np.zeros(0))
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-10)
    np.testing.assert_allclose(res.mu, [-1.0], atol=1e-10)


def test_active_bound():
    # min (x-2)^2 s.t. x <= 1 -> x = 1, lam = 2
    B = np.array([[2.0]])
    c = np.array([-4.0])
    res = solve_qp(B, c, np.zeros((0, 1)), np.zeros(0), np.array([[1.0]]), np.array([1.0]))
    np.testing.assert_allclose(res.x, [1.0], atol=1e-10)
    np.testing.assert_allclose(res.lam, [2.0], atol=1e-8)


def test_phase1_needed():
    # start infeasible: x <= -1 and x >= -3 with minimizer at origin
    B = np.eye(1)
    c = np.zeros(1)
    A = np.array([[1.0], [-1.0]])
    b = np.array([-1.0, 3.0])
    res = solve_qp(B, c, np.zeros((0, 1)), np.zeros(0), A, b)
    assert res.status == "optimal"
    np.testing.assert_allclose(res.x, [-1.0], atol=1e-8)


def test_infeasible_detected():
    A = np.array([[1.0], [-1.0]])
    b = np.array([-1.0, 0.0])  # x <= -1 and x >= 0
    res = solve_qp(np.eye(1), np.zeros(1), np.zeros((0, 1)), np.zeros(0), A, b)
    assert res.status == "infeasible"


def test_duplicated_rows_degenerate():
    B = np.eye(2)
    c = np.array([-1.0, -1.0])
    A = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    b = np.array([0.5, 0.5, 0.25])
    res = solve_qp(B, c, np.zeros((0, 2)), np.zeros(0), A, b)
    np.testing.assert_allclose(res.x, [0.5, 0.25], atol=1e-8)


def test_random_qps_against_kkt_oracle():
    rng = np.random.default_rng(11)
    for trial in range(60):
        n = rng.integers(2, 6)
        m = rng.integers(0, 8)
        p = rng.integers(0, max(1, n - 1))
        M = rng.normal(size=(n, n))
        B = M @ M.T + n * np.eye(n)
        c = rng.normal(size=n)
        A_eq = rng.normal(size=(p, n))
        b_eq = rng.normal(size=p)
        A_in = rng.normal(size=(m, n))
        b_in = rng.normal(size=m) + 1.0
        res = solve_qp(B, c, A_eq, b_eq, A_in, b_in)
        if res.status == "infeasible":
            continue
        assert res.status == "optimal", trial
        assert kkt_ok(B, c, A_eq, b_eq, A_in, b_in, res), trial


def test_warm_start_working_set():
    B = np.eye(2)
    c = np.array([-3.0, 0.0])
    A = np.array([[1.0, 0.0]])
    b = np.array([1.0])
    cold = solve_qp(B, c, np.zeros((0, 2)), np.zeros(0), A, b)
    warm = solve_qp(B, c, np.zeros((0, 2)), np.zeros(0), A, b, W0=cold.working_set)
    np.testing.assert_allclose(cold.x, warm.x)
    assert warm.iterations <= cold.iterations


def test_elastic_relaxation_of_infeasible_rows():
    # x <= -1, x >= 1 is inconsistent; elastic splits the difference
    A = np.array([[1.0], [-1.0]])
    b = np.array([-1.0, -1.0])
    res = solve_qp_elastic(
        np.eye(1), np.zeros(1), np.zeros((0, 1)), np.zeros(0), A, b, penalty=10.0
    )
    assert res.status == "optimal"
    assert abs(res.x[0]) <= 1.0
    assert res.lam.shape == (2,)


def test_elastic_matches_exact_when_feasible():
    B = np.diag([2.0, 2.0])
    c = np.array([-2.0, 0.0])
    A = np.array([[1.0, 0.0]])
    b = np.array([0.5])
    exact = solve_qp(B, c, np.zeros((0, 2)), np.zeros(0), A, b)
    elastic = solve_qp_elastic(
        B, c, np.zeros((0, 2)), np.zeros(0), A, b, penalty=100.0
    )
    np.testing.assert_allclose(exact.x, elastic.x, atol=1e-6)
    np.testing.assert_allclose(exact.lam, elastic.lam, atol=1e-5)
