"""Dense primal active-set solver for strictly convex QPs.

Solves

    min  1/2 x^T B x + c^T x
    s.t. A_eq x  = b_eq
         A_in x <= b_in

with B symmetric positive definite.  A feasible starting point is found by
a least-squares solve on the equalities followed, if needed, by a slack
phase-1 QP solved with the same active-set core.  Equality-constrained
subproblems are solved through the KKT system with an SVD fallback for
degenerate working sets.

The same routine backs the SQP subproblems, the elastic-mode relaxation,
the multiplier least-squares fit and the positive-linear-independence
probe, so it must stay deterministic: ties in ratio tests and multiplier
drops always pick the lowest row index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class QpResult:
    x: np.ndarray
    lam: np.ndarray             # inequality multipliers, >= 0, full length
    mu: np.ndarray              # equality multipliers
    status: str                 # "optimal" | "infeasible" | "max_iter"
    iterations: int
    working_set: list = field(default_factory=list)


def _eqp(B: np.ndarray, c: np.ndarray, C: np.ndarray, d: np.ndarray):
    """min 1/2 x^T B x + c^T x s.t. C x = d; returns (x, y) with y the
    multipliers of the rows of C.  Handles rank-deficient C via SVD."""
    n = B.shape[0]
    k = C.shape[0]
    if k == 0:
        try:
            return np.linalg.solve(B, -c), np.zeros(0)
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(B, -c, rcond=None)[0], np.zeros(0)
    # Fast path: direct KKT solve.
    kkt = np.zeros((n + k, n + k))
    kkt[:n, :n] = B
    kkt[:n, n:] = C.T
    kkt[n:, :n] = C
    rhs = np.concatenate([-c, d])
    try:
        sol = np.linalg.solve(kkt, rhs)
        x, y = sol[:n], sol[n:]
        if np.all(np.isfinite(sol)):
            scale = 1.0 + float(np.max(np.abs(d))) if d.size else 1.0
            scale += float(np.max(np.abs(x))) * float(np.max(np.abs(C))) if C.size else 0.0
            if np.max(np.abs(C @ x - d)) <= 1e-9 * scale:
                return x, y
    except np.linalg.LinAlgError:
        pass
    # Degenerate working set: null-space method on the SVD of C.
    U, s, Vt = np.linalg.svd(C, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > max(smax, 1.0) * 1e-13))
    if rank == 0:
        x_p = np.zeros(n)
    else:
        x_p = Vt[:rank].T @ ((U[:, :rank].T @ d) / s[:rank])
    Z = Vt[rank:].T
    if Z.shape[1] > 0:
        Hr = Z.T @ B @ Z
        u = np.linalg.solve(Hr, -Z.T @ (c + B @ x_p))
        x = x_p + Z @ u
    else:
        x = x_p
    y = np.linalg.lstsq(C.T, -(c + B @ x), rcond=None)[0]
    return x, y


def solve_qp(
    B: np.ndarray,
    c: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    A_in: np.ndarray,
    b_in: np.ndarray,
    x0: Optional[np.ndarray] = None,
    W0: Optional[list] = None,
    max_iter: Optional[int] = None,
    tol: float = 1e-10,
) -> QpResult:
    """Primal active-set method; see module docstring.

    ``x0`` (if given) must satisfy the equalities and inequalities up to a
    small tolerance; otherwise a feasible point is constructed internally.
    ``W0`` is a warm-start working set; rows not active at the starting
    point are dropped from it.
    """
    n = c.size
    p = b_eq.size
    m = b_in.size
    if max_iter is None:
        max_iter = min(5 * (n + m + p) + 30, 600)

    scale = 1.0 + (np.max(np.abs(b_in)) if m else 0.0) + (np.max(np.abs(b_eq)) if p else 0.0)
    feas_tol = 1e-9 * scale

    x = None
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        ok_eq = p == 0 or np.max(np.abs(A_eq @ x0 - b_eq)) <= feas_tol
        ok_in = m == 0 or np.max(A_in @ x0 - b_in) <= feas_tol
        if ok_eq and ok_in:
            x = x0.copy()
    if x is None:
        if p > 0:
            x = np.linalg.lstsq(A_eq, b_eq, rcond=None)[0]
            if np.max(np.abs(A_eq @ x - b_eq)) > 1e-7 * scale:
                return QpResult(x, np.zeros(m), np.zeros(p), "infeasible", 0)
        else:
            x = np.zeros(n)
        if m > 0 and np.max(A_in @ x - b_in) > feas_tol:
            x = _phase1(A_eq, b_eq, A_in, b_in, x)
            if x is None:
                return QpResult(np.zeros(n), np.zeros(m), np.zeros(p), "infeasible", 0)

    # Warm start: jump to the equality-constrained solution on the warm
    # working set when that point is feasible -- the rows of a useful warm
    # set are active at the solution, not at the phase-1 point, so
    # filtering them against the current activity would discard them and
    # force the active set to be rebuilt one row per iteration.
    W: list = []
    if W0:
        W_try = [i for i in W0 if 0 <= i < m]
        if p + len(W_try) <= n and len(W_try) == len(set(W_try)):
            C = np.vstack([A_eq, A_in[W_try]]) if (p or W_try) else np.zeros((0, n))
            dvec = np.concatenate([b_eq, b_in[W_try]])
            try:
                x_try, _ = _eqp(B, c, C, dvec)
            except np.linalg.LinAlgError:
                x_try = None
            if (
                x_try is not None
                and np.all(np.isfinite(x_try))
                and (m == 0 or np.max(A_in @ x_try - b_in) <= feas_tol)
            ):
                x = x_try
                W = list(W_try)
    if not W:
        resid = A_in @ x - b_in if m else np.zeros(0)
        active = set(np.flatnonzero(resid >= -10 * feas_tol).tolist())
        W = [i for i in W0 if i in active] if W0 else []
        while p + len(W) > n:
            W.pop()

    it = 0
    lam_W = np.zeros(0)
    y = np.zeros(p)
    while it < max_iter:
        it += 1
        C = np.vstack([A_eq] + [A_in[W]]) if (p or W) else np.zeros((0, n))
        d = np.concatenate([b_eq, b_in[W]]) if (p or W) else np.zeros(0)
        x_new, y = _eqp(B, c, C, d)
        lam_W = y[p:]
        if np.max(np.abs(x_new - x)) <= tol * (1.0 + np.max(np.abs(x))):
            if lam_W.size == 0 or np.min(lam_W) >= -1e-9:
                lam = np.zeros(m)
                for j, i in enumerate(W):
                    lam[i] = max(lam_W[j], 0.0)
                return QpResult(x_new, lam, y[:p], "optimal", it, list(W))
            W.pop(int(np.argmin(lam_W)))
            continue
        delta = x_new - x
        alpha = 1.0
        blocker = -1
        if m:
            s = A_in @ delta
            r = A_in @ x - b_in
            mask = s > 1e-13 * scale
            if W:
                mask[W] = False
            idx = np.flatnonzero(mask)
            if idx.size:
                ratios = -r[idx] / s[idx]
                j = int(np.argmin(ratios))
                if ratios[j] < alpha - 1e-15:
                    alpha = max(float(ratios[j]), 0.0)
                    blocker = int(idx[j])
        x = x + alpha * delta
        if blocker >= 0:
            W.append(blocker)
            if p + len(W) > n:
                # Working set saturated; drop the row with the smallest
                # multiplier estimate to restore room.
                W.pop(int(np.argmin(lam_W)) if lam_W.size else 0)
    # Iteration cap: report the last subproblem's multiplier estimates
    # rather than zeros so the caller's stationarity accounting stays sane.
    lam = np.zeros(m)
    for j, i in enumerate(W):
        if j < lam_W.size:
            lam[i] = max(float(lam_W[j]), 0.0)
    mu = y[:p] if y.size >= p else np.zeros(p)
    return QpResult(x, lam, mu, "max_iter", it, list(W))


def _phase1(A_eq, b_eq, A_in, b_in, x_init):
    """Find a feasible point by minimizing elastic slacks on the
    inequalities; returns None if the constraints are inconsistent."""
    n = x_init.size
    p = b_eq.size
    m = b_in.size
    viol = A_in @ x_init - b_in
    s_init = np.maximum(viol, 0.0)
    scale = 1.0 + np.max(np.abs(b_in))
    eps = 1e-6

    B = np.zeros((n + m, n + m))
    B[:n, :n] = eps * np.eye(n)
    B[n:, n:] = eps * np.eye(m)
    c = np.concatenate([-eps * x_init, np.ones(m)])
    A_eq_x = np.hstack([A_eq, np.zeros((p, m))]) if p else np.zeros((0, n + m))
    # rows: A_in x - s <= b_in  and  -s <= 0
    A1 = np.hstack([A_in, -np.eye(m)])
    A2 = np.hstack([np.zeros((m, n)), -np.eye(m)])
    A = np.vstack([A1, A2])
    b = np.concatenate([b_in, np.zeros(m)])
    z0 = np.concatenate([x_init, s_init])
    res = solve_qp(B, c, A_eq_x, b_eq, A, b, x0=z0)
    if res.status == "infeasible":
        return None
    x = res.x[:n]
    s = res.x[n:]
    if np.max(s) > 1e-7 * scale:
        return None
    if m and np.max(A_in @ x - b_in) > 1e-7 * scale:
        return None
    return x


def solve_qp_elastic(
    B: np.ndarray,
    c: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    A_in: np.ndarray,
    b_in: np.ndarray,
    penalty: float,
    W0: Optional[list] = None,
) -> QpResult:
    """Slack-penalized relaxation used when the QP constraints are
    inconsistent: every row gets an elastic slack charged ``penalty`` per
    unit in an l1 sense, which always yields a well-posed problem.

    The returned multipliers are those of the original rows (bounded in
    magnitude by ``penalty``)."""
    n = c.size
    p = b_eq.size
    m = b_in.size
    ns = 2 * p + m
    sigma = 1e-8 * max(penalty, 1.0)

    Bx = np.zeros((n + ns, n + ns))
    Bx[:n, :n] = B
    Bx[n:, n:] = sigma * np.eye(ns)
    cx = np.concatenate([c, penalty * np.ones(ns)])
    # equalities: A_eq d + s_plus - s_minus = b_eq
    A_eq_x = (
        np.hstack([A_eq, np.eye(p), -np.eye(p), np.zeros((p, m))])
        if p
        else np.zeros((0, n + ns))
    )
    # inequalities: A_in d - s_in <= b_in, -s <= 0
    rows = []
    rhs = []
    if m:
        rows.append(np.hstack([A_in, np.zeros((m, 2 * p)), -np.eye(m)]))
        rhs.append(b_in)
    rows.append(np.hstack([np.zeros((ns, n)), -np.eye(ns)]))
    rhs.append(np.zeros(ns))
    A_x = np.vstack(rows)
    b_x = np.concatenate(rhs)

    sp = np.maximum(b_eq, 0.0)
    sm = np.maximum(-b_eq, 0.0)
    si = np.maximum(-b_in, 0.0) if m else np.zeros(0)
    z0 = np.concatenate([np.zeros(n), sp, sm, si])
    # Seed the working set with the slack bounds active at z0: they pin
    # unnecessary slacks at zero immediately instead of rediscovering them
    # one blocking row at a time.  A warm set carrying expanded indices
    # (from a previous elastic solve of the same structure) is used as is.
    s0 = np.concatenate([sp, sm, si])
    W_init = [i for i in (W0 or []) if i < m + ns]
    if not any(i >= m for i in W_init):
        W_init += [m + j for j in range(ns) if s0[j] <= 0.0]
    res = solve_qp(Bx, cx, A_eq_x, b_eq, A_x, b_x, x0=z0, W0=W_init)
    lam = res.lam[:m] if m else np.zeros(0)
    return QpResult(res.x[:n], lam, res.mu, res.status, res.iterations, res.working_set)
