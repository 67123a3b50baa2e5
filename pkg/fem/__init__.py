"""P1 finite elements for steady conduction on a disk with a convective rim.

Serves as the independent reference for the heat benchmark: nested meshes,
closed-form element matrices, a Jacobi-preconditioned CG solve and the
inter-level convergence study.
"""


class ConvergenceError(ArithmeticError):
    """CG stopped without reaching the tolerance or met nonpositive curvature."""


class PointLocationError(ValueError):
    """A point could not be located in a mesh."""


from .mesh import TriMesh, build_mesh_hierarchy, coarse_disk_mesh, refine  # noqa: E402
from .assembly import (FemSolution, assemble, assemble_and_solve, assemble_mass, assemble_stiffness,  # noqa: E402
                       edge_robin, element_mass, element_stiffness, energy_balance)
from .cg import CGResult, conjugate_gradient  # noqa: E402
from .convergence import ConvergenceReport, convergence_study, interpolate, prolongate  # noqa: E402
