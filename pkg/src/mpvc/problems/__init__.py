"""Benchmark problem library.

* ``academic()``        two-variable truss-weight toy problem whose feasible
                        set is a polyhedron plus a line segment and an
                        isolated point
* ``ten_bar()``         ten-bar truss topology design with FEM stiffness
                        assembly and vanishing stress constraints
* ``aerothermo(N)``     implicit-Euler transcription of a re-entry heat-load
                        optimal control problem with a cooling-activation
                        vanishing constraint
* ``counterexamples()`` two-variable families with certified
                        eps-stationary points of their regularized problems
"""
from .academic import academic
from .counterexamples import CertifiedFamily, counterexamples
from .truss import TenBarGeometry, assemble_stiffness, stress, ten_bar
from .aerothermo import aerothermo

__all__ = [
    "academic",
    "counterexamples",
    "CertifiedFamily",
    "ten_bar",
    "TenBarGeometry",
    "assemble_stiffness",
    "stress",
    "aerothermo",
]


def by_name(name: str, **kwargs):
    """Look up a problem builder by CLI name."""
    builders = {
        "academic": academic,
        "ten_bar": ten_bar,
        "aerothermo": aerothermo,
    }
    if name not in builders:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(builders)}")
    return builders[name](**kwargs)
