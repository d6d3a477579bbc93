"""SQP solver for smooth NLPs and the eps-stationarity certificate check.

Setting the environment variable MPVC_SQP_DEBUG=1 prints one line per SQP
iteration (step norm, merit data, line-search result) for troubleshooting.

A point x with multipliers (lam, mu) is eps-stationary for

    min f(x) s.t. g(x) <= 0, h(x) = 0

when

    || grad f + sum lam_i grad g_i + sum mu_i grad h_i ||_inf <= eps,
    g_i(x) <= eps,  lam_i >= -eps,  |g_i(x) lam_i| <= eps,  |h_i(x)| <= eps.

``solve_nlp`` drives a damped-BFGS SQP with an l1-merit line search and a
primal active-set QP for the subproblems; inconsistent linearizations fall
back to an elastic (slack-penalized) QP.  ``epsilon_achieved`` is always
accounted in exactly the terms above, not from solver-internal norms, so a
Converged result is a certificate that ``check_eps_stationary`` accepts.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .qp import solve_qp, solve_qp_elastic
from .regularize import Nlp, RowProvenance

_DEBUG = bool(os.environ.get("MPVC_SQP_DEBUG"))


class SolveStatus(Enum):
    CONVERGED = "Converged"
    ITER_LIMIT = "IterLimit"
    LINESEARCH_FAIL = "LineSearchFail"


@dataclass
class SolverLimits:
    max_iter: int = 500
    ls_max: int = 40            # backtracking halvings; alpha_min ~ 1e-12
    divergence_bound: float = 1e10


@dataclass
class NlpSolution:
    x: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    kkt_residual: float
    comp_residual: float
    feas_residual: float
    epsilon_achieved: float
    status: SolveStatus
    iterations: int
    provenance: Optional[RowProvenance] = None
    # the final iterate of the run; equals x on Converged but may differ on
    # failures, where x holds the smallest-epsilon certificate while the
    # last point is the better continuation for a homotopy caller
    x_last: Optional[np.ndarray] = None
    total_iterations: int = 0

    def as_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "kkt_residual": self.kkt_residual,
            "comp_residual": self.comp_residual,
            "feas_residual": self.feas_residual,
            "epsilon_achieved": self.epsilon_achieved,
            "status": self.status.value,
            "iterations": self.iterations,
        }


def stationarity_breakdown(
    grad_f: np.ndarray,
    g_vals: np.ndarray,
    Jg: np.ndarray,
    h_vals: np.ndarray,
    Jh: np.ndarray,
    lam: np.ndarray,
    mu: np.ndarray,
) -> dict:
    """Raw residuals of the five eps-stationarity condition groups."""
    r = grad_f.copy()
    if lam.size:
        r += Jg.T @ lam
    if mu.size:
        r += Jh.T @ mu
    stat = float(np.max(np.abs(r))) if r.size else 0.0
    feas_in = float(max(0.0, np.max(g_vals))) if g_vals.size else 0.0
    feas_eq = float(np.max(np.abs(h_vals))) if h_vals.size else 0.0
    sign = float(max(0.0, -np.min(lam))) if lam.size else 0.0
    comp = float(np.max(np.abs(g_vals * lam))) if g_vals.size else 0.0
    return {
        "stationarity": stat,
        "feasibility_ineq": feas_in,
        "feasibility_eq": feas_eq,
        "multiplier_sign": sign,
        "complementarity": comp,
    }


def epsilon_from_breakdown(bd: dict) -> float:
    return max(
        bd["stationarity"],
        bd["feasibility_ineq"],
        bd["feasibility_eq"],
        bd["multiplier_sign"],
        bd["complementarity"],
    )


def check_eps_stationary(
    nlp: Nlp,
    x: np.ndarray,
    lam: np.ndarray,
    mu: np.ndarray,
    eps: float,
) -> tuple[bool, dict]:
    """Verify an eps-stationarity certificate; returns (ok, breakdown).

    Comparisons carry a relative slack of 1e-9 plus 1e-12 absolute so that
    certificates sitting exactly on the eps boundary are not rejected for
    floating-point round-off; the breakdown reports the raw residuals.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if lam.shape != (nlp.n_ineq,) or mu.shape != (nlp.n_eq,):
        raise PreconditionError(
            f"multiplier lengths {lam.shape}/{mu.shape} do not match "
            f"row counts ({nlp.n_ineq},)/({nlp.n_eq},)"
        )
    _, grad_f = nlp.objective(x)
    g_vals, Jg = nlp.ineq(x)
    h_vals, Jh = nlp.eq(x)
    bd = stationarity_breakdown(grad_f, g_vals, Jg, h_vals, Jh, lam, mu)
    slack = eps + 1e-9 * abs(eps) + 1e-12
    ok = all(v <= slack for v in bd.values())
    return ok, bd


def _l1_violation(g_vals: np.ndarray, h_vals: np.ndarray) -> float:
    v = 0.0
    if g_vals.size:
        v += float(np.sum(np.maximum(g_vals, 0.0)))
    if h_vals.size:
        v += float(np.sum(np.abs(h_vals)))
    return v


def solve_nlp(
    nlp: Nlp,
    x0: np.ndarray,
    eps_target: float = 1e-8,
    limits: Optional[SolverLimits] = None,
    lam0: Optional[np.ndarray] = None,
    mu0: Optional[np.ndarray] = None,
) -> NlpSolution:
    """Solve ``nlp`` to eps-stationarity from ``x0``.

    Parameters
    ----------
    nlp : Nlp
    x0 : array of length nlp.n
    eps_target : float
        Target eps in the stationarity accounting above.
    limits : SolverLimits
    lam0, mu0 : optional arrays
        Warm-start multipliers (used for the initial penalty and the
        initial QP working set when the row structure matches).

    Returns
    -------
    NlpSolution
        On Converged the certificate (x, lam, mu) passes
        ``check_eps_stationary`` at eps_target; on other statuses the best
        iterate seen (smallest epsilon_achieved) is returned.
    """
    if limits is None:
        limits = SolverLimits()
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (nlp.n,):
        raise PreconditionError(f"x0 has shape {x.shape}, expected ({nlp.n},)")

    f, grad_f = nlp.objective(x)
    g_vals, Jg = nlp.ineq(x)
    h_vals, Jh = nlp.eq(x)
    if not (
        np.isfinite(f)
        and np.all(np.isfinite(grad_f))
        and np.all(np.isfinite(g_vals))
        and np.all(np.isfinite(h_vals))
    ):
        raise PreconditionError("non-finite problem data at the initial point")

    n = nlp.n
    B = np.eye(n)
    scaled = False
    rho = 1.0
    if lam0 is not None and lam0.shape == (nlp.n_ineq,):
        rho = max(rho, 1.5 * float(np.max(np.abs(lam0))) if lam0.size else 1.0)
        W_warm: Optional[list] = [int(i) for i in np.flatnonzero(lam0 > 1e-10)]
    else:
        W_warm = None
    if mu0 is not None and mu0.size:
        rho = max(rho, 1.5 * float(np.max(np.abs(mu0))))

    best: Optional[NlpSolution] = None
    just_reset = False
    status = SolveStatus.ITER_LIMIT
    it = 0
    stall_count = 0
    viol_hist: list = []
    prev_viol = None
    prev_f = None
    elastic_mode = False

    while it < limits.max_iter:
        it += 1
        if not elastic_mode:
            qp = solve_qp(B, grad_f, Jh, -h_vals, Jg, -g_vals, W0=W_warm)
            if qp.status == "infeasible":
                # stay in elastic mode for the rest of the solve; with a
                # sufficient penalty it reproduces exact QP solutions, so
                # nothing is lost if the linearization turns consistent.
                # The penalty is frozen at entry: the relaxed rows'
                # multipliers saturate at the penalty value, and feeding
                # them back through the merit penalty would spiral.
                elastic_mode = True
                W_elastic = W_warm
                elastic_pen = 10.0 * (rho + 1.0)
        if elastic_mode:
            qp = solve_qp_elastic(
                B, grad_f, Jh, -h_vals, Jg, -g_vals, penalty=elastic_pen, W0=W_elastic
            )
            # keep the expanded working set (slack rows included): the
            # elastic geometry repeats across iterations and rediscovering
            # the active slacks dominates the cost otherwise
            W_elastic = qp.working_set
        d, lam, mu = qp.x, qp.lam, qp.mu
        W_warm = [i for i in qp.working_set if i < nlp.n_ineq]

        bd = stationarity_breakdown(grad_f, g_vals, Jg, h_vals, Jh, lam, mu)
        eps_ach = epsilon_from_breakdown(bd)
        mult_scale = 0.0
        if lam.size:
            mult_scale = max(mult_scale, float(np.max(np.abs(lam))))
        if mu.size:
            mult_scale = max(mult_scale, float(np.max(np.abs(mu))))
        # Multipliers beyond this bound make a certificate numerically
        # vacuous: near kernel switch loci the QP can produce multipliers
        # of order 1/eps_machine whose complementarity products are pure
        # round-off.  Such iterates are neither accepted as converged nor
        # tracked as best; the solver keeps iterating until a meaningful
        # certificate appears or the degenerate branch collapses to its
        # exact limit.
        sane = mult_scale <= 1e10 * (1.0 + float(np.max(np.abs(grad_f))))
        current = NlpSolution(
            x=x.copy(),
            lam=lam.copy(),
            mu=mu.copy(),
            kkt_residual=bd["stationarity"],
            comp_residual=bd["complementarity"],
            feas_residual=max(bd["feasibility_ineq"], bd["feasibility_eq"]),
            epsilon_achieved=eps_ach,
            status=SolveStatus.ITER_LIMIT,
            iterations=it,
            provenance=nlp.provenance,
        )
        if best is None or (sane and eps_ach < best.epsilon_achieved):
            best = current
        if eps_ach <= eps_target and sane:
            current.status = SolveStatus.CONVERGED
            current.x_last = current.x
            current.total_iterations = it
            return current

        # Max-multiplier penalty rule for the l1 merit function, with the
        # chase bounded: near degenerate loci the QP multipliers diverge
        # and following them freezes the line search.  Exact-penalty
        # descent is still guaranteed by the explicit check below, which
        # raises rho further when the direction calls for it.  The decay
        # branch recovers after drastic overshoot.
        rho_req = 1.01 * min(mult_scale, 1e6 * (1.0 + float(np.max(np.abs(grad_f))))) + 1e-6
        if rho < rho_req:
            rho = max(rho_req, 1.5 * rho)
        elif rho > 100.0 * rho_req:
            rho = max(rho_req, 0.1 * rho, 1.0)

        # Move limit: far from a solution the full QP step can leave the
        # linearization's region of validity by orders of magnitude, which
        # forces tiny line-search steps; scaling d preserves the l1-merit
        # descent property (the linearized violation is convex along d).
        move_cap = max(1.0, 0.2 * (1.0 + float(np.max(np.abs(x)))))
        d_norm = float(np.max(np.abs(d))) if d.size else 0.0
        if d_norm > move_cap:
            d = d * (move_cap / d_norm)

        viol0 = _l1_violation(g_vals, h_vals)
        viol_lin = _l1_violation(g_vals + Jg @ d, h_vals + Jh @ d)
        descent = float(grad_f @ d) - rho * (viol0 - viol_lin)
        if descent > -1e-14 * (1.0 + abs(f)):
            if viol0 - viol_lin > 1e-14 * (1.0 + viol0):
                rho *= 10.0
                descent = float(grad_f @ d) - rho * (viol0 - viol_lin)
            if descent > -1e-14 * (1.0 + abs(f)):
                if not just_reset:
                    B = np.eye(n)
                    scaled = False
                    just_reset = True
                    continue
                best.status = SolveStatus.LINESEARCH_FAIL
                best.x_last = x.copy()
                best.total_iterations = it
                return best

        phi0 = f + rho * viol0
        alpha = 1.0
        accepted = False
        soc_tried = False
        step_vec = d
        for _ in range(limits.ls_max):
            x_t = x + alpha * step_vec
            f_t, grad_t = nlp.objective(x_t)
            g_t, Jg_t = nlp.ineq(x_t)
            h_t, Jh_t = nlp.eq(x_t)
            ok = (
                np.isfinite(f_t)
                and np.all(np.isfinite(g_t))
                and np.all(np.isfinite(h_t))
            )
            if ok and f_t + rho * _l1_violation(g_t, h_t) <= phi0 + 1e-4 * alpha * descent:
                accepted = True
                break
            if alpha == 1.0 and not soc_tried:
                # Second-order correction: the full step often satisfies
                # the linearized constraints exactly yet re-violates the
                # nonlinear ones quadratically (Maratos effect); a
                # minimum-norm restoration step on the rows active in the
                # QP removes that quadratic term.
                soc_tried = True
                rows = [Jh] if nlp.n_eq else []
                rhs = [-h_t] if nlp.n_eq else []
                act = [i for i in W_warm if i < nlp.n_ineq]
                if act and ok:
                    rows.append(Jg[act])
                    rhs.append(-g_t[act])
                if rows and ok:
                    C = np.vstack(rows)
                    r = np.concatenate(rhs)
                    p = np.linalg.lstsq(C, r, rcond=None)[0]
                    if float(np.max(np.abs(p))) <= float(np.max(np.abs(d))):
                        step_vec = d + p
                        continue
            alpha *= 0.5
            step_vec = d
        if _DEBUG:
            print(
                f"    [sqp it={it}] |d|={float(np.max(np.abs(d))):.2e} eps={eps_ach:.2e} "
                f"f={f:.4g} viol={viol0:.2e} vlin={viol_lin:.2e} desc={descent:.2e} "
                f"rho={rho:.1e} acc={accepted} alpha={alpha:.1e} qp={qp.status}/{qp.iterations}"
            )
        if not accepted:
            if not just_reset:
                B = np.eye(n)
                scaled = False
                just_reset = True
                continue
            best.status = SolveStatus.LINESEARCH_FAIL
            best.x_last = x.copy()
            best.total_iterations = it
            return best
        just_reset = False

        # Bail out when neither feasibility nor the objective moves for
        # many accepted steps: the iterates sit at a stationary point of
        # the infeasibility (e.g. the linearizations are inconsistent and
        # elastic steps have stalled), and grinding to the iteration cap
        # would only burn time.
        viol_new = _l1_violation(g_t, h_t)
        viol_stuck = (
            viol_new > max(10.0 * eps_target, 1e-10)
            and prev_viol is not None
            and viol_new > prev_viol - 1e-8 * (1.0 + prev_viol)
        )
        if viol_stuck and f_t > prev_f - 1e-10 * (1.0 + abs(prev_f)):
            stall_count += 1
        else:
            stall_count = 0
        # inconsistent constraints: the objective may still creep along an
        # elastic valley, so also compare the violation over a window
        viol_hist.append(viol_new)
        windowed_stall = (
            elastic_mode
            and len(viol_hist) > 30
            and viol_new > max(10.0 * eps_target, 1e-10)
            and viol_new > 0.9 * viol_hist[-31]
        )
        prev_viol, prev_f = viol_new, f_t
        if stall_count >= 12 or windowed_stall:
            best.status = SolveStatus.LINESEARCH_FAIL
            best.x_last = x_t.copy()
            best.total_iterations = it
            return best

        # Damped BFGS on the Lagrangian; reset on lost curvature or
        # runaway entries.  Heavily truncated steps are skipped: with the
        # move limit above they are rare, and their multipliers carry no
        # usable curvature (one such pair can poison the metric).
        s = alpha * step_vec
        y = (grad_t - grad_f).copy()
        if lam.size:
            y += (Jg_t - Jg).T @ lam
        if mu.size:
            y += (Jh_t - Jh).T @ mu
        if alpha < 0.2:
            x, f, grad_f = x_t, f_t, grad_t
            g_vals, Jg = g_t, Jg_t
            h_vals, Jh = h_t, Jh_t
            if np.max(np.abs(x)) > limits.divergence_bound:
                break
            continue
        sBs = float(s @ (B @ s))
        sy = float(s @ y)
        if not scaled and sy > 1e-12:
            # size the initial metric from the curvature along s; the
            # yTy/sTy variant can blow up by the condition of the pair
            gamma = min(max(sy / float(s @ s), 1e-4), 1e4)
            if np.isfinite(gamma):
                B = gamma * np.eye(n)
                sBs = float(s @ (B @ s))
                scaled = True
        if sy < 0.2 * sBs:
            if sBs - sy > 1e-16:
                theta_d = 0.8 * sBs / (sBs - sy)
                y = theta_d * y + (1.0 - theta_d) * (B @ s)
                sy = float(s @ y)
        ns = float(np.linalg.norm(s))
        ny = float(np.linalg.norm(y))
        if sy > 1e-8 * max(1e-12, ns * ny) and sBs > 0:
            Bs = B @ s
            B = B - np.outer(Bs, Bs) / sBs + np.outer(y, y) / sy
            B = 0.5 * (B + B.T)
        if not np.all(np.isfinite(B)) or float(np.max(np.abs(B))) > 1e10:
            B = np.eye(n)
            scaled = False
        else:
            try:
                np.linalg.cholesky(B + 1e-12 * np.eye(n))
            except np.linalg.LinAlgError:
                B = np.eye(n)
                scaled = False

        x, f, grad_f = x_t, f_t, grad_t
        g_vals, Jg = g_t, Jg_t
        h_vals, Jh = h_t, Jh_t
        if np.max(np.abs(x)) > limits.divergence_bound:
            break

    best.status = status
    best.x_last = x.copy()
    best.total_iterations = it
    return best
