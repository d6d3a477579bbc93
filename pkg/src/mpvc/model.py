"""Problem representation for mathematical programs with vanishing constraints.

An MPVC is a smooth nonlinear program of the form

    min f(x)
    s.t. g_i(x) <= 0          (i = 1..m)
         h_i(x)  = 0          (i = 1..p)
         H_i(x) >= 0          (i = 1..l)
         G_i(x) H_i(x) <= 0   (i = 1..l)

where the implicit bound ``G_i <= 0`` switches off ("vanishes") wherever
``H_i = 0``.  This module holds the problem container, the activity-banded
index-set partition of the vanishing pairs, and the two violation measures
used by the outer regularization loop.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, ParameterError

# Evaluator conventions: scalar evaluators return (value, gradient) with the
# gradient of length n; vector evaluators return (values, jacobian) with one
# jacobian row per component.
ScalarFn = Callable[[np.ndarray], tuple[float, np.ndarray]]
VectorFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def empty_vector_fn(n: int) -> VectorFn:
    """Evaluator for an absent constraint block (zero rows)."""
    vals = np.zeros(0)
    jac = np.zeros((0, n))

    def fn(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return vals, jac

    return fn


@dataclass(frozen=True)
class MpvcProblem:
    """A smooth MPVC with analytic first derivatives.

    Problems are immutable after construction and carry no evaluation
    state, so one instance can be shared across concurrent solves.

    Attributes
    ----------
    name : str
        Identifier used by the CLI and in serialized results.
    n, m, p, l : int
        Dimension of the decision vector and the counts of inequality,
        equality and vanishing-constraint pairs.
    f : ScalarFn
        Objective, returning value and gradient.
    g, h, G, H : VectorFn
        Constraint blocks, returning values and Jacobians with m, p, l, l
        rows respectively.
    known_points : dict
        Optional labelled reference points (used by tests and for bucketing
        grid results).
    meta : dict
        Problem-specific extras (layouts, physical constants, unpackers).
    """

    name: str
    n: int
    m: int
    p: int
    l: int
    f: ScalarFn
    g: VectorFn
    h: VectorFn
    G: VectorFn
    H: VectorFn
    known_points: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def check_point(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(
                f"{self.name}: point has shape {x.shape}, expected ({self.n},)"
            )
        return x


@dataclass(frozen=True)
class IndexSets:
    """Activity partition of the vanishing pairs at a point.

    The first subscript encodes the sign class of H_i, the second the sign
    class of G_i; a value v is classed "0" iff |v| <= tau_act, "+" iff
    v > tau_act and "-" iff v < -tau_act.  Indices are 0-based.

    Combinations that cannot occur at a feasible point are folded onto the
    nearest feasible class so that the five sets always partition
    {0..l-1}: H below -tau_act counts as "0" (the bound is violated, the
    pair sits on the H-boundary for classification purposes) and G above
    tau_act with H above tau_act counts as "+0" (the product constraint is
    violated, i.e. active).
    """

    I_g: frozenset
    I_plus0: frozenset
    I_plusminus: frozenset
    I_0plus: frozenset
    I_00: frozenset
    I_0minus: frozenset
    tau_act: float

    @property
    def I_plus(self) -> frozenset:
        return self.I_plus0 | self.I_plusminus

    @property
    def I_0(self) -> frozenset:
        return self.I_0plus | self.I_00 | self.I_0minus

    def as_dict(self) -> dict:
        return {
            "I_g": sorted(self.I_g),
            "I_plus0": sorted(self.I_plus0),
            "I_plusminus": sorted(self.I_plusminus),
            "I_0plus": sorted(self.I_0plus),
            "I_00": sorted(self.I_00),
            "I_0minus": sorted(self.I_0minus),
            "tau_act": self.tau_act,
        }


def index_sets(problem: MpvcProblem, x: np.ndarray, tau_act: float = 1e-8) -> IndexSets:
    """Classify the vanishing pairs and active inequalities at ``x``.

    Parameters
    ----------
    problem : MpvcProblem
    x : array of length n
    tau_act : float
        Absolute activity tolerance; must be positive.
    """
    if tau_act <= 0.0:
        raise ParameterError("tau_act must be positive")
    x = problem.check_point(x)
    gv, _ = problem.g(x)
    Gv, _ = problem.G(x)
    Hv, _ = problem.H(x)

    I_g = frozenset(i for i in range(problem.m) if gv[i] >= -tau_act)
    plus0, plusminus, zplus, z00, zminus = set(), set(), set(), set(), set()
    for i in range(problem.l):
        if Hv[i] > tau_act:
            if Gv[i] < -tau_act:
                plusminus.add(i)
            else:
                # G in the zero band, or the (infeasible) G > tau_act case.
                plus0.add(i)
        else:
            if Gv[i] > tau_act:
                zplus.add(i)
            elif Gv[i] < -tau_act:
                zminus.add(i)
            else:
                z00.add(i)
    return IndexSets(
        I_g=I_g,
        I_plus0=frozenset(plus0),
        I_plusminus=frozenset(plusminus),
        I_0plus=frozenset(zplus),
        I_00=frozenset(z00),
        I_0minus=frozenset(zminus),
        tau_act=tau_act,
    )


def max_vio(problem: MpvcProblem, x: np.ndarray) -> float:
    """max_i G_i(x) H_i(x); the feasibility measure of the outer loop.

    May be negative when every product is.  Returns 0.0 for l = 0.
    """
    x = problem.check_point(x)
    if problem.l == 0:
        return 0.0
    Gv, _ = problem.G(x)
    Hv, _ = problem.H(x)
    return float(np.max(Gv * Hv))


def full_violation(problem: MpvcProblem, x: np.ndarray) -> float:
    """Worst violation over all constraint blocks.

    max(0, max_i g_i, max_i |h_i|, max_i -H_i, max_i G_i H_i); zero exactly
    for points feasible for the MPVC.
    """
    x = problem.check_point(x)
    worst = 0.0
    gv, _ = problem.g(x)
    if gv.size:
        worst = max(worst, float(np.max(gv)))
    hv, _ = problem.h(x)
    if hv.size:
        worst = max(worst, float(np.max(np.abs(hv))))
    if problem.l:
        Gv, _ = problem.G(x)
        Hv, _ = problem.H(x)
        worst = max(worst, float(np.max(-Hv)))
        worst = max(worst, float(np.max(Gv * Hv)))
    return worst


def is_feasible(problem: MpvcProblem, x: np.ndarray, tol: float = 0.0) -> bool:
    """Feasibility for the MPVC up to ``tol`` in full_violation."""
    return full_violation(problem, x) <= tol
