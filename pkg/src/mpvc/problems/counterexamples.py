"""Two-variable MPVC families with certified stationary points.

All three share the constraints H(x) = x2 >= 0, G(x) H(x) = x1 x2 <= 0 and
differ only in the (linear) objective.  Each comes with a parametrized
point x(t), multipliers (nu(t), delta(t)) and a certified eps(t) for which
(x(t), nu(t), delta(t)) is an eps(t)-stationary point of the named
regularized problem.  Their limits for t -> 0 are the origin, whose
stationarity grade is known, which makes the families useful as oracles:

* ``lshaped_weak``    f = x1 - x2, scheme LSHAPED, x(t) = (t^2, t - t^2),
  delta = 1/t^2, eps = t^2; the limit is feasible but not weakly stationary
  (the unique candidate multipliers are (etaG, etaH) = (-1, -1)).
* ``lshaped_tm``      f = -x1 + x2, scheme LSHAPED, x(t) = (-t^2, t + t^2),
  delta = 1/t^2, eps = t^2; the limit is weakly but not T-stationary
  ((etaG, etaH) = (1, 1)).
* ``nonsmooth_weak``  f = x1, scheme NONSMOOTH, x(t) = (0, t/2),
  delta = 2/t, eps = 0 (an exact KKT point); the limit is not weakly
  stationary ((etaG, etaH) = (-1, 0)).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..model import MpvcProblem, empty_vector_fn
from ..regularize import Scheme


@dataclass(frozen=True)
class CertifiedFamily:
    name: str
    problem: MpvcProblem
    scheme: Scheme
    x_of_t: Callable[[float], np.ndarray]
    nu_of_t: Callable[[float], float]
    delta_of_t: Callable[[float], float]
    eps_of_t: Callable[[float], float]
    limit_point: np.ndarray
    limit_eta_G: float
    limit_eta_H: float
    limit_grade: str      # expected classification at the limit point


def _vanishing_pair_problem(name: str, grad_f: np.ndarray) -> MpvcProblem:
    gf = np.asarray(grad_f, dtype=float)
    JG = np.array([[1.0, 0.0]])
    JH = np.array([[0.0, 1.0]])

    def f(x):
        return float(gf @ x), gf

    def G(x):
        return np.array([x[0]]), JG

    def H(x):
        return np.array([x[1]]), JH

    return MpvcProblem(
        name=name,
        n=2,
        m=0,
        p=0,
        l=1,
        f=f,
        g=empty_vector_fn(2),
        h=empty_vector_fn(2),
        G=G,
        H=H,
        known_points={"origin": np.zeros(2)},
    )


def counterexamples() -> list[CertifiedFamily]:
    fam1 = CertifiedFamily(
        name="lshaped_weak",
        problem=_vanishing_pair_problem("lshaped_weak", [1.0, -1.0]),
        scheme=Scheme.LSHAPED,
        x_of_t=lambda t: np.array([t * t, t - t * t]),
        nu_of_t=lambda t: 0.0,
        delta_of_t=lambda t: 1.0 / (t * t),
        eps_of_t=lambda t: t * t,
        limit_point=np.zeros(2),
        limit_eta_G=-1.0,
        limit_eta_H=-1.0,
        limit_grade="NotWeak",
    )
    fam2 = CertifiedFamily(
        name="lshaped_tm",
        problem=_vanishing_pair_problem("lshaped_tm", [-1.0, 1.0]),
        scheme=Scheme.LSHAPED,
        x_of_t=lambda t: np.array([-t * t, t + t * t]),
        nu_of_t=lambda t: 0.0,
        delta_of_t=lambda t: 1.0 / (t * t),
        eps_of_t=lambda t: t * t,
        limit_point=np.zeros(2),
        limit_eta_G=1.0,
        limit_eta_H=1.0,
        limit_grade="Weak",
    )
    fam3 = CertifiedFamily(
        name="nonsmooth_weak",
        problem=_vanishing_pair_problem("nonsmooth_weak", [1.0, 0.0]),
        scheme=Scheme.NONSMOOTH,
        x_of_t=lambda t: np.array([0.0, 0.5 * t]),
        nu_of_t=lambda t: 0.0,
        delta_of_t=lambda t: 2.0 / t,
        eps_of_t=lambda t: 0.0,
        limit_point=np.zeros(2),
        limit_eta_G=-1.0,
        limit_eta_H=0.0,
        limit_grade="NotWeak",
    )
    return [fam1, fam2, fam3]
