"""Two-variable academic truss-weight problem.

    min 4 x1 + 2 x2
    s.t. H(x) = (x1, x2) >= 0
         (5 sqrt(2) - x1 - x2) x1 <= 0
         (5 - x1 - x2) x2 <= 0

The feasible set is the polyhedron {x >= 0, x1 + x2 >= 5 sqrt(2)} together
with the segment {0} x [5, 5 sqrt(2)] and the isolated origin.  Reference
points: the global minimizer ``xo`` = (0, 0), the local minimizer
``xstar`` = (0, 5) and ``xplus`` = (0, 5 sqrt(2)), which is weakly
stationary but not a local minimizer.
"""
from __future__ import annotations

import math

import numpy as np

from ..model import MpvcProblem, empty_vector_fn


def academic() -> MpvcProblem:
    grad_f = np.array([4.0, 2.0])
    JH = np.eye(2)
    JG = np.array([[-1.0, -1.0], [-1.0, -1.0]])
    c1 = 5.0 * math.sqrt(2.0)

    def f(x):
        return 4.0 * x[0] + 2.0 * x[1], grad_f

    def H(x):
        return x.copy(), JH

    def G(x):
        s = x[0] + x[1]
        return np.array([c1 - s, 5.0 - s]), JG

    return MpvcProblem(
        name="academic",
        n=2,
        m=0,
        p=0,
        l=2,
        f=f,
        g=empty_vector_fn(2),
        h=empty_vector_fn(2),
        G=G,
        H=H,
        known_points={
            "xo": np.array([0.0, 0.0]),
            "xstar": np.array([0.0, 5.0]),
            "xplus": np.array([0.0, c1]),
        },
    )
