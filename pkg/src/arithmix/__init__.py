"""arithmix: exact arithmetic experiments on spheres, class groups, and L-factors.

Lattice points on spheres organized into class-group torsors, Weyl sums
against real spherical harmonics, sparse Hecke-eigenvalue sums, and exact
p-adic local integrals, all at desk scale with reproducible outputs.
"""

__version__ = "0.1.0"

__all__ = [
    "quadforms",
    "sphere",
    "class_action",
    "mixing",
    "eigenvalues",
    "local_factors",
    "cli",
]
