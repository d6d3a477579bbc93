"""MPVC stationarity: multiplier recovery, classification, direct fitting.

A feasible point x is weakly stationary when multipliers
(lam, mu, etaH, etaG) exist with

    grad f + sum lam_i grad g_i + sum mu_i grad h_i
           - sum etaH_i grad H_i + sum etaG_i grad G_i = 0,

    lam >= 0 supported on the active inequalities,
    etaH_i = 0 on I_+, etaH_i >= 0 on I_0-, free on I_0+ u I_00,
    etaG_i = 0 on I_+- u I_0- u I_0+, etaG_i >= 0 on I_+0 u I_00.

The grades tighten only on the biactive set I_00:

    T:  etaG_i etaH_i <= 0      M:  etaG_i etaH_i = 0
    S:  etaH_i >= 0 and etaG_i = 0.

``recover_mpvc_multipliers`` maps the multipliers (nu, delta) of a solved
regularized problem back to MPVC multipliers using the scheme-specific
transformation under which the regularized stationarity equation becomes
the weak-stationarity equation; ``classify`` grades any multiplier set; and
``find_multipliers`` fits multipliers directly by sign-constrained linear
least squares when none are available (e.g. for the direct baseline).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .model import IndexSets, MpvcProblem, full_violation, index_sets
from .nlp import NlpSolution
from .qp import solve_qp
from .regularize import Scheme, phi_su


class Grade(IntEnum):
    NOT_WEAK = 0
    WEAK = 1
    T = 2
    M = 3
    S = 4

    def label(self) -> str:
        return {0: "NotWeak", 1: "Weak", 2: "T", 3: "M", 4: "S"}[int(self)]


@dataclass
class MpvcMultipliers:
    lam: np.ndarray
    mu: np.ndarray
    eta_H: np.ndarray
    eta_G: np.ndarray

    def as_dict(self) -> dict:
        return {
            "lam": self.lam.tolist(),
            "mu": self.mu.tolist(),
            "eta_H": self.eta_H.tolist(),
            "eta_G": self.eta_G.tolist(),
        }


@dataclass
class StationarityReport:
    grade: Grade
    stationarity_residual: float
    worst_sign_violation: float
    worst_support_violation: float
    biactive_products: list
    tau: float

    def as_dict(self) -> dict:
        return {
            "grade": self.grade.label(),
            "stationarity_residual": self.stationarity_residual,
            "worst_sign_violation": self.worst_sign_violation,
            "worst_support_violation": self.worst_support_violation,
            "biactive_products": list(self.biactive_products),
            "tau": self.tau,
        }


def recover_mpvc_multipliers(
    problem: MpvcProblem,
    scheme: Scheme,
    t: float,
    sol: NlpSolution,
    tau_act: float = 1e-8,
) -> MpvcMultipliers:
    """Map regularized-NLP multipliers at sol.x back to MPVC multipliers.

    With nu the multipliers of the -H_i <= 0 rows and delta those of the
    kernel rows, the transformations are:

    * GLOBAL     etaG_i = delta_i H_i on I_00 u I_+0 (else 0);
                 etaH_i = nu_i - delta_i G_i on I_0, nu_i on I_+
                 (the index sets banded with tau_act at sol.x)
    * LOCAL      etaG_i = delta_i alpha_i, etaH_i = nu_i - delta_i beta_i
                 with (alpha, beta) the kernel gradient coefficients
    * LSHAPED    on G + H >= t: etaG_i = delta_i (H_i - t),
                 etaH_i = nu_i - delta_i G_i; on G + H < t:
                 etaG_i = -delta_i G_i, etaH_i = nu_i + delta_i (H_i - t)
    * NONSMOOTH  etaG_i = delta_i (H_i - t), etaH_i = nu_i - delta_i G_i

    lam and mu pass through unchanged.
    """
    prov = sol.provenance
    if prov is None:
        raise PreconditionError("solution carries no row provenance")
    x = sol.x
    lam_g = sol.lam[prov.rows_g]
    nu = sol.lam[prov.rows_neg_H]
    delta = sol.lam[prov.rows_kernel]
    Gv, _ = problem.G(x)
    Hv, _ = problem.H(x)
    l = problem.l
    eta_G = np.zeros(l)
    eta_H = np.zeros(l)

    if scheme is Scheme.GLOBAL:
        ix = index_sets(problem, x, tau_act)
        for i in range(l):
            if i in ix.I_00 or i in ix.I_plus0:
                eta_G[i] = delta[i] * Hv[i]
            if i in ix.I_0:
                eta_H[i] = nu[i] - delta[i] * Gv[i]
            else:
                eta_H[i] = nu[i]
    elif scheme is Scheme.LOCAL:
        for i in range(l):
            _, alpha, beta = phi_su(Gv[i], Hv[i], t)
            eta_G[i] = delta[i] * alpha
            eta_H[i] = nu[i] - delta[i] * beta
    elif scheme is Scheme.LSHAPED:
        for i in range(l):
            if Gv[i] + Hv[i] >= t:
                eta_G[i] = delta[i] * (Hv[i] - t)
                eta_H[i] = nu[i] - delta[i] * Gv[i]
            else:
                eta_G[i] = -delta[i] * Gv[i]
                eta_H[i] = nu[i] + delta[i] * (Hv[i] - t)
    elif scheme is Scheme.NONSMOOTH:
        eta_G = delta * (Hv - t)
        eta_H = nu - delta * Gv
    else:  # pragma: no cover - closed enumeration
        raise ValueError(f"unknown scheme {scheme}")

    return MpvcMultipliers(lam=lam_g.copy(), mu=sol.mu.copy(), eta_H=eta_H, eta_G=eta_G)


def _gradient_equation_residual(
    problem: MpvcProblem, x: np.ndarray, mult: MpvcMultipliers
) -> np.ndarray:
    _, grad_f = problem.f(x)
    r = grad_f.copy()
    if problem.m:
        _, Jg = problem.g(x)
        r += Jg.T @ mult.lam
    if problem.p:
        _, Jh = problem.h(x)
        r += Jh.T @ mult.mu
    if problem.l:
        _, JH = problem.H(x)
        _, JG = problem.G(x)
        r -= JH.T @ mult.eta_H
        r += JG.T @ mult.eta_G
    return r


def classify(
    problem: MpvcProblem,
    x: np.ndarray,
    mult: MpvcMultipliers,
    tau: float = 1e-6,
) -> StationarityReport:
    """Grade (x, mult) as NotWeak / Weak / T / M / S.

    All conditions are checked against tau_eff = tau * (1 + ||grad f||_inf),
    which also bands the index sets; the grade is raised along the chain
    Weak -> T -> M -> S only while every lower check passes, so reports
    always respect the implication ordering.
    """
    if tau <= 0:
        raise PreconditionError("tau must be positive")
    x = problem.check_point(x)
    _, grad_f = problem.f(x)
    scale = float(np.max(np.abs(grad_f))) if grad_f.size else 0.0
    tau_eff = tau * (1.0 + scale)
    ix = index_sets(problem, x, tau_eff)

    resid = _gradient_equation_residual(problem, x, mult)
    stat = float(np.max(np.abs(resid))) if resid.size else 0.0

    support = 0.0
    for i in range(problem.m):
        if i not in ix.I_g:
            support = max(support, abs(mult.lam[i]))
    for i in ix.I_plus:
        support = max(support, abs(mult.eta_H[i]))
    for i in ix.I_plusminus | ix.I_0minus | ix.I_0plus:
        support = max(support, abs(mult.eta_G[i]))

    sign = 0.0
    for i in ix.I_g:
        sign = max(sign, -mult.lam[i])
    for i in ix.I_0minus:
        sign = max(sign, -mult.eta_H[i])
    for i in ix.I_plus0 | ix.I_00:
        sign = max(sign, -mult.eta_G[i])
    sign = max(0.0, sign)

    products = [float(mult.eta_G[i] * mult.eta_H[i]) for i in sorted(ix.I_00)]

    grade = Grade.NOT_WEAK
    if stat <= tau_eff and support <= tau_eff and sign <= tau_eff:
        grade = Grade.WEAK
        if all(p <= tau_eff for p in products):
            grade = Grade.T
            if all(abs(p) <= tau_eff for p in products):
                grade = Grade.M
                if all(
                    abs(mult.eta_G[i]) <= tau_eff and mult.eta_H[i] >= -tau_eff
                    for i in ix.I_00
                ):
                    grade = Grade.S
    return StationarityReport(
        grade=grade,
        stationarity_residual=stat,
        worst_sign_violation=sign,
        worst_support_violation=support,
        biactive_products=products,
        tau=tau_eff,
    )


def find_multipliers(
    problem: MpvcProblem,
    x: np.ndarray,
    tau_act: float = 1e-8,
) -> tuple[MpvcMultipliers, float]:
    """Fit weak-stationarity multipliers at x by least squares.

    Minimizes the 2-norm of the gradient equation residual over the
    weak-stationarity support subject to the weak-stationarity sign
    constraints; returns the fitted multipliers and the inf-norm of the
    remaining residual.  Requires x approximately feasible
    (full_violation <= 1e-4).
    """
    x = problem.check_point(x)
    if full_violation(problem, x) > 1e-4:
        raise PreconditionError("find_multipliers needs an approximately feasible point")
    _, grad_f = problem.f(x)
    ix = index_sets(problem, x, tau_act)

    cols = []
    signed = []
    tags = []
    if problem.m:
        _, Jg = problem.g(x)
        for i in sorted(ix.I_g):
            cols.append(Jg[i])
            signed.append(True)
            tags.append(("lam", i))
    if problem.p:
        _, Jh = problem.h(x)
        for i in range(problem.p):
            cols.append(Jh[i])
            signed.append(False)
            tags.append(("mu", i))
    if problem.l:
        _, JH = problem.H(x)
        _, JG = problem.G(x)
        for i in sorted(ix.I_0):
            cols.append(-JH[i])
            signed.append(i in ix.I_0minus)
            tags.append(("eta_H", i))
        for i in sorted(ix.I_plus0 | ix.I_00):
            cols.append(JG[i])
            signed.append(True)
            tags.append(("eta_G", i))

    mult = MpvcMultipliers(
        lam=np.zeros(problem.m),
        mu=np.zeros(problem.p),
        eta_H=np.zeros(problem.l),
        eta_G=np.zeros(problem.l),
    )
    if not cols:
        resid = float(np.max(np.abs(grad_f))) if grad_f.size else 0.0
        return mult, resid

    A = np.array(cols).T                      # n x k
    k = A.shape[1]
    Bq = A.T @ A + 1e-12 * (1.0 + np.trace(A.T @ A)) * np.eye(k)
    cq = A.T @ grad_f
    rows = [j for j in range(k) if signed[j]]
    A_in = np.zeros((len(rows), k))
    for r, j in enumerate(rows):
        A_in[r, j] = -1.0
    res = solve_qp(Bq, cq, np.zeros((0, k)), np.zeros(0), A_in, np.zeros(len(rows)),
                   x0=np.zeros(k))
    z = res.x
    for val, (kind, i) in zip(z, tags):
        getattr(mult, kind)[i] = val
    resid_vec = A @ z + grad_f
    return mult, float(np.max(np.abs(resid_vec)))
