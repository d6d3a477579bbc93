"""Pointwise constraint-qualification diagnostics.

MPVC-LICQ asks the gradients

    grad g_i (i in I_g), grad h_i (all i),
    grad G_i (i in I_00 u I_+0), grad H_i (i in I_0)

to be linearly independent; MPVC-MFCQ asks

    grad g_i (i in I_g), -grad H_i (i in I_0-), grad G_i (i in I_+0 u I_00)

(the sign-constrained part) together with

    grad h_i (all i), grad H_i (i in I_0+ u I_00)

(the free part) to be positively linearly independent: no vanishing
combination with nonnegative weights on the first group and arbitrary
weights on the second, not all zero.

LICQ is certified by the smallest singular value of the stacked gradients.
Positive linear independence is certified in two parts: the free vectors
must have full column rank, and no nonzero nonnegative combination of the
sign-constrained vectors may lie in the span of the free ones.  The second
part is an exact restatement of the definition and is evaluated as a
convex QP over the unit simplex (minimize the norm of the projection of
the combination onto the orthogonal complement of the free span), solved
with the shared active-set QP.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MpvcProblem, index_sets
from .qp import solve_qp
from .regularize import Nlp


@dataclass
class CqReport:
    cq_name: str
    holds: bool
    certificate: float
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "cq_name": self.cq_name,
            "holds": bool(self.holds),
            "certificate": float(self.certificate),
            "tolerance": self.tolerance,
        }


def _licq_certificate(rows: list, n: int, tau_rank: float) -> tuple[bool, float]:
    if not rows:
        return True, np.inf
    M = np.array(rows)
    if M.shape[0] > n:
        return False, 0.0
    s = np.linalg.svd(M, compute_uv=False)
    smax = s[0] if s.size else 0.0
    smin = s[-1] if s.size else 0.0
    return smin > tau_rank * (smax + 1.0), float(smin)


def pli_probe(signed: list, free: list, tau: float = 1e-8) -> tuple[bool, float]:
    """Positive linear independence of signed (weights >= 0) and free vectors.

    Returns (independent, certificate).  Dependence (certificate ~ 0) means
    some combination sum a_i signed_i + sum b_i free_i = 0 exists with
    a >= 0 and (a, b) != 0.
    """
    if not signed and not free:
        return True, np.inf
    cert = np.inf
    if free:
        F = np.array(free).T                       # n x q
        s = np.linalg.svd(F, compute_uv=False)
        smax = s[0] if s.size else 0.0
        smin = s[-1] if s.size else 0.0
        if F.shape[1] > F.shape[0] or smin <= tau * (smax + 1.0):
            return False, float(smin)
        cert = float(smin)
    if not signed:
        return True, cert
    A = np.array(signed).T                          # n x k
    if free:
        F = np.array(free).T
        # projection onto the orthogonal complement of span(F)
        Q, _ = np.linalg.qr(F)
        P = np.eye(A.shape[0]) - Q @ Q.T
        M = P @ A
    else:
        M = A
    k = A.shape[1]
    # min ||M a||^2 over the unit simplex; zero iff positively dependent
    H = M.T @ M
    H = H + 1e-14 * (1.0 + np.trace(H)) * np.eye(k)
    A_eq = np.ones((1, k))
    b_eq = np.array([1.0])
    A_in = -np.eye(k)
    b_in = np.zeros(k)
    res = solve_qp(H, np.zeros(k), A_eq, b_eq, A_in, b_in, x0=np.full(k, 1.0 / k))
    probe = float(np.linalg.norm(M @ res.x))
    cert = min(cert, probe)
    return cert > tau, cert


def check_mpvc_licq(
    problem: MpvcProblem,
    x: np.ndarray,
    tau_act: float = 1e-8,
    tau_rank: float = 1e-8,
) -> CqReport:
    """MPVC-LICQ via the smallest singular value of the active gradients."""
    x = problem.check_point(x)
    ix = index_sets(problem, x, tau_act)
    rows = []
    if problem.m:
        _, Jg = problem.g(x)
        rows += [Jg[i] for i in sorted(ix.I_g)]
    if problem.p:
        _, Jh = problem.h(x)
        rows += list(Jh)
    if problem.l:
        _, JG = problem.G(x)
        _, JH = problem.H(x)
        rows += [JG[i] for i in sorted(ix.I_00 | ix.I_plus0)]
        rows += [JH[i] for i in sorted(ix.I_0)]
    holds, cert = _licq_certificate(rows, problem.n, tau_rank)
    return CqReport("MPVC-LICQ", holds, cert, tau_rank)


def check_mpvc_mfcq(
    problem: MpvcProblem,
    x: np.ndarray,
    tau_act: float = 1e-8,
    tau: float = 1e-8,
) -> CqReport:
    """MPVC-MFCQ via the positive-linear-independence probe."""
    x = problem.check_point(x)
    ix = index_sets(problem, x, tau_act)
    signed = []
    free = []
    if problem.m:
        _, Jg = problem.g(x)
        signed += [Jg[i] for i in sorted(ix.I_g)]
    if problem.l:
        _, JG = problem.G(x)
        _, JH = problem.H(x)
        signed += [-JH[i] for i in sorted(ix.I_0minus)]
        signed += [JG[i] for i in sorted(ix.I_plus0 | ix.I_00)]
        free += [JH[i] for i in sorted(ix.I_0plus | ix.I_00)]
    if problem.p:
        _, Jh = problem.h(x)
        free += list(Jh)
    holds, cert = pli_probe(signed, free, tau)
    return CqReport("MPVC-MFCQ", holds, cert, tau)


def check_licq(nlp: Nlp, x: np.ndarray, tau_act: float = 1e-8, tau_rank: float = 1e-8) -> CqReport:
    """Standard LICQ of a plain NLP at x (active rows banded by tau_act)."""
    g_vals, Jg = nlp.ineq(x)
    _, Jh = nlp.eq(x)
    rows = [Jg[i] for i in range(nlp.n_ineq) if g_vals[i] >= -tau_act]
    rows += list(Jh)
    holds, cert = _licq_certificate(rows, nlp.n, tau_rank)
    return CqReport("LICQ", holds, cert, tau_rank)


def check_mfcq(nlp: Nlp, x: np.ndarray, tau_act: float = 1e-8, tau: float = 1e-8) -> CqReport:
    """Standard MFCQ of a plain NLP at x."""
    g_vals, Jg = nlp.ineq(x)
    _, Jh = nlp.eq(x)
    signed = [Jg[i] for i in range(nlp.n_ineq) if g_vals[i] >= -tau_act]
    free = list(Jh)
    holds, cert = pli_probe(signed, free, tau)
    return CqReport("MFCQ", holds, cert, tau)
