"""Outer regularization loop.

Starting from x0 with parameter t0, repeat while t_k >= t_min and
max_vio(x_k) > tol: solve the regularized problem R(t_k) warm-started at
x_k, take its solution as x_{k+1}, shrink t_{k+1} = sigma * t_k.  The final
iterate is returned whether or not it is feasible; the termination reason
records which loop condition ended the run.  An inner-solver failure keeps
the best inner iterate and continues with the smaller t (homotopy usually
self-heals); InnerFailure is reported only when every iteration from some
point on failed and the loop ran out of parameter range while infeasible.

One nuance: max_vio only measures the products G_i H_i, so it is
non-positive at every feasible point and at many infeasible ones (negative
coordinates satisfy the products trivially).  A literal pre-checked loop
would therefore never move from feasible starts at all.  The loop instead
exits before the first solve only when the start is feasible for the full
MPVC *and* already weakly stationary; otherwise at least one regularized
solve runs, and the stated while-condition governs every later iteration.

At the defaults (t0 = 1, sigma = 0.1, t_min = 1e-8, tol = 1e-6) the loop
body runs at most ceil(log(t_min / t0) / log sigma) + 1 = 9 times.

The inner tolerance defaults to max(1e-9, 1e-2 * t_k) for the GLOBAL
scheme, whose convergence guarantee tolerates eps_k of the order of t_k,
and to a fixed 1e-9 for the other schemes, whose inexact behavior degrades
to weak stationarity.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .errors import ParameterError
from .model import MpvcProblem, full_violation, max_vio
from .nlp import NlpSolution, SolverLimits, SolveStatus, solve_nlp
from .regularize import Scheme, regularize


class StopReason(Enum):
    FEASIBILITY = "FeasibilityReached"
    TMIN = "TminReached"
    INNER_FAILURE = "InnerFailure"


@dataclass
class DriverConfig:
    scheme: Scheme
    t0: float = 1.0
    sigma: float = 0.1
    t_min: float = 1e-8
    tol: float = 1e-6
    eps_inner: Union[None, float, Callable[[float], float]] = None
    tau_act: float = 1e-8
    limits: SolverLimits = field(default_factory=SolverLimits)

    def __post_init__(self):
        if not (0.0 < self.t_min < self.t0):
            raise ParameterError("need 0 < t_min < t0")
        if not (0.0 < self.sigma < 1.0):
            raise ParameterError("need sigma in (0, 1)")
        if self.tol <= 0.0:
            raise ParameterError("need tol > 0")

    def inner_eps(self, t: float) -> float:
        if callable(self.eps_inner):
            return float(self.eps_inner(t))
        if self.eps_inner is not None:
            return float(self.eps_inner)
        if self.scheme is Scheme.GLOBAL:
            return max(1e-9, 1e-2 * t)
        return 1e-9


@dataclass
class TraceRecord:
    k: int
    t: float
    x: np.ndarray
    f: float
    max_vio: float
    full_vio: float
    inner_status: SolveStatus
    inner_iterations: int
    eps_achieved: float


@dataclass
class DriverTrace:
    records: list = field(default_factory=list)
    reason: Optional[StopReason] = None

    @property
    def outer_iterations(self) -> int:
        return len(self.records)

    @property
    def total_inner_iterations(self) -> int:
        return sum(r.inner_iterations for r in self.records)

    def as_rows(self) -> list:
        return [
            {
                "k": r.k,
                "t": r.t,
                "f": r.f,
                "maxVio": r.max_vio,
                "fullVio": r.full_vio,
                "innerIters": r.inner_iterations,
                "eps": r.eps_achieved,
            }
            for r in self.records
        ]

    def to_csv(self, path) -> None:
        rows = self.as_rows()
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["k", "t", "f", "maxVio", "fullVio", "innerIters", "eps"]
            )
            writer.writeheader()
            writer.writerows(rows)

    def to_json(self) -> str:
        return json.dumps(
            {"reason": self.reason.value if self.reason else None, "records": self.as_rows()}
        )


@dataclass
class DriverResult:
    x: np.ndarray
    f: float
    trace: DriverTrace
    last_solution: Optional[NlpSolution] = None
    last_t: Optional[float] = None


def _start_is_stationary(problem: MpvcProblem, x: np.ndarray, tol: float) -> bool:
    """Feasible and weakly stationary: nothing for the loop to do."""
    from .stationarity import Grade, classify, find_multipliers

    if full_violation(problem, x) > tol:
        return False
    try:
        mult, _ = find_multipliers(problem, x)
    except Exception:
        return False
    return classify(problem, x, mult, tau=1e-6).grade >= Grade.WEAK


def solve_mpvc(problem: MpvcProblem, config: DriverConfig, x0: np.ndarray) -> DriverResult:
    """Run the regularization loop on ``problem`` from ``x0``."""
    x = problem.check_point(np.asarray(x0, dtype=float)).copy()
    trace = DriverTrace()
    t = config.t0
    k = 0
    lam_warm = None
    mu_warm = None
    last_sol: Optional[NlpSolution] = None
    last_t: Optional[float] = None
    skip_all = _start_is_stationary(problem, x, config.tol)
    last_failed = False

    # The feasibility exit applies to iterates the inner solver actually
    # certified; after an inner failure the policy is to keep the last
    # iterate, shrink t and continue, since the next regularized problem
    # usually frees a stuck iterate (degenerate loci move with t).
    while (
        not skip_all
        and t >= config.t_min
        and (k == 0 or last_failed or max_vio(problem, x) > config.tol)
    ):
        nlp = regularize(problem, config.scheme, t)
        sol = solve_nlp(
            nlp,
            x,
            eps_target=config.inner_eps(t),
            limits=config.limits,
            lam0=lam_warm,
            mu0=mu_warm,
        )
        # keep the last inner iterate (not the best-certificate one): a
        # failed solve usually still made progress worth warm-starting
        x = sol.x_last if sol.x_last is not None else sol.x
        f_val, _ = problem.f(x)
        trace.records.append(
            TraceRecord(
                k=k,
                t=t,
                x=x.copy(),
                f=float(f_val),
                max_vio=max_vio(problem, x),
                full_vio=full_violation(problem, x),
                inner_status=sol.status,
                inner_iterations=sol.total_iterations or sol.iterations,
                eps_achieved=sol.epsilon_achieved,
            )
        )
        lam_warm, mu_warm = sol.lam, sol.mu
        last_sol, last_t = sol, t
        last_failed = sol.status is not SolveStatus.CONVERGED
        t = t * config.sigma
        k += 1

    if max_vio(problem, x) <= config.tol:
        trace.reason = StopReason.FEASIBILITY
    else:
        # t fell below t_min while infeasible; blame the inner solver only
        # if the run never recovered after its last failure.
        statuses = [r.inner_status for r in trace.records]
        if statuses and statuses[-1] is not SolveStatus.CONVERGED:
            trace.reason = StopReason.INNER_FAILURE
        else:
            trace.reason = StopReason.TMIN

    f_val, _ = problem.f(x)
    return DriverResult(x=x, f=float(f_val), trace=trace, last_solution=last_sol, last_t=last_t)
