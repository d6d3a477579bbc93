"""Ten-bar truss topology design with vanishing stress constraints.

Decision variables are the ten cross-sectional areas a and the eight nodal
displacements u of the four free nodes (x and y per node):

    min  sum_i l_i a_i
    s.t. K(a) u = f                      (force equilibrium)
         f^T u <= c                      (compliance bound)
         a_i <= a_bar                    (area upper bound)
         H_i = a_i >= 0
         (sigma_i(a, u)^2 - sigma_bar^2) a_i <= 0

with global stiffness matrix K(a) = sum_i a_i (E / l_i) gamma_i gamma_i^T
and member stress sigma_i = E gamma_i^T u / l_i.  Multiplying the stress
bound by a_i switches it off for bars that leave the structure, which is
precisely the vanishing-constraint mechanism.

The ground structure (2 x 1 cantilever, six nodes, ten candidate bars, two
left nodes fixed, unit downward load at the bottom-right node) is loaded
from a JSON fixture so the validated member list stays frozen.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import PreconditionError
from ..model import MpvcProblem

_FIXTURE = Path(__file__).parent / "fixtures" / "ten_bar.json"


@dataclass(frozen=True)
class TenBarGeometry:
    nodes: np.ndarray          # (n_nodes, 2)
    fixed_nodes: tuple         # node indices clamped in both directions
    members: np.ndarray        # (n_members, 2) node index pairs
    load: np.ndarray           # length 2*n_free, ordered by free node
    E: float
    c: float
    a_bar: float
    sigma_bar: float

    @property
    def n_members(self) -> int:
        return self.members.shape[0]

    @property
    def free_nodes(self) -> list:
        return [i for i in range(self.nodes.shape[0]) if i not in self.fixed_nodes]

    @property
    def n_dof(self) -> int:
        return 2 * len(self.free_nodes)

    def lengths(self) -> np.ndarray:
        d = self.nodes[self.members[:, 1]] - self.nodes[self.members[:, 0]]
        return np.linalg.norm(d, axis=1)

    def gamma(self) -> np.ndarray:
        """Member direction vectors on the free degrees of freedom.

        gamma[i] carries -(cos, sin) at the start node's DOFs and
        +(cos, sin) at the end node's DOFs; fixed nodes contribute nothing.
        """
        free = self.free_nodes
        dof_of = {node: (2 * k, 2 * k + 1) for k, node in enumerate(free)}
        ls = self.lengths()
        out = np.zeros((self.n_members, self.n_dof))
        for i, (p, q) in enumerate(self.members):
            d = (self.nodes[q] - self.nodes[p]) / ls[i]
            if p in dof_of:
                jx, jy = dof_of[p]
                out[i, jx] -= d[0]
                out[i, jy] -= d[1]
            if q in dof_of:
                jx, jy = dof_of[q]
                out[i, jx] += d[0]
                out[i, jy] += d[1]
        return out


def load_geometry(path: Optional[Path] = None) -> TenBarGeometry:
    raw = json.loads(Path(path or _FIXTURE).read_text())
    nodes = np.asarray(raw["nodes"], dtype=float)
    free = [i for i in range(nodes.shape[0]) if i not in raw["fixed_nodes"]]
    load = np.zeros(2 * len(free))
    for entry in raw["loads"]:
        k = free.index(entry["node"])
        load[2 * k] = entry["fx"]
        load[2 * k + 1] = entry["fy"]
    return TenBarGeometry(
        nodes=nodes,
        fixed_nodes=tuple(raw["fixed_nodes"]),
        members=np.asarray(raw["members"], dtype=int),
        load=load,
        E=float(raw["E"]),
        c=float(raw["c"]),
        a_bar=float(raw["a_bar"]),
        sigma_bar=float(raw["sigma_bar"]),
    )


def assemble_stiffness(geometry: TenBarGeometry, a: np.ndarray) -> np.ndarray:
    """K(a) = sum_i a_i (E / l_i) gamma_i gamma_i^T on the free DOFs."""
    gam = geometry.gamma()
    ls = geometry.lengths()
    w = np.asarray(a, dtype=float) * geometry.E / ls
    return (gam.T * w) @ gam


def stress(geometry: TenBarGeometry, a: np.ndarray, u: np.ndarray, i: int) -> float:
    """Member stress sigma_i = E gamma_i^T u / l_i (independent of a)."""
    gam = geometry.gamma()
    return float(geometry.E * (gam[i] @ u) / geometry.lengths()[i])


def ten_bar(geometry: Optional[TenBarGeometry] = None) -> MpvcProblem:
    """Build the 18-variable truss MPVC; x = (a_1..a_10, u_1..u_8).

    The initial point a0 = (1, ..., 1), u0 = K(a0)^{-1} f is stored under
    known_points["x0"]; a singular K(a0) raises PreconditionError.
    """
    geo = geometry or load_geometry()
    nb = geo.n_members
    nd = geo.n_dof
    n = nb + nd
    gam = geo.gamma()
    ls = geo.lengths()
    E = geo.E
    f_load = geo.load
    w_rows = gam * (E / ls)[:, None]          # row i = (E / l_i) gamma_i

    grad_obj = np.concatenate([ls, np.zeros(nd)])

    def f(x):
        return float(ls @ x[:nb]), grad_obj

    Jg_static = np.zeros((1 + nb, n))
    Jg_static[0, nb:] = f_load
    Jg_static[1:, :nb] = np.eye(nb)

    def g(x):
        vals = np.empty(1 + nb)
        vals[0] = f_load @ x[nb:] - geo.c
        vals[1:] = x[:nb] - geo.a_bar
        return vals, Jg_static

    def h(x):
        a, u = x[:nb], x[nb:]
        K = (gam.T * (a * E / ls)) @ gam
        vals = K @ u - f_load
        jac = np.empty((nd, n))
        jac[:, :nb] = (w_rows * (gam @ u)[:, None]).T
        jac[:, nb:] = K
        return vals, jac

    JH = np.zeros((nb, n))
    JH[:, :nb] = np.eye(nb)

    def H(x):
        return x[:nb].copy(), JH

    def G(x):
        u = x[nb:]
        sig = E * (gam @ u) / ls
        vals = sig * sig - geo.sigma_bar**2
        jac = np.zeros((nb, n))
        jac[:, nb:] = 2.0 * sig[:, None] * w_rows
        return vals, jac

    a0 = np.ones(nb)
    K0 = assemble_stiffness(geo, a0)
    try:
        u0 = np.linalg.solve(K0, f_load)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("singular stiffness matrix at the unit-area start") from exc
    x0 = np.concatenate([a0, u0])

    return MpvcProblem(
        name="ten_bar",
        n=n,
        m=1 + nb,
        p=nd,
        l=nb,
        f=f,
        g=g,
        h=h,
        G=G,
        H=H,
        known_points={"x0": x0},
        meta={"geometry": geo, "n_bars": nb, "n_dof": nd},
    )
