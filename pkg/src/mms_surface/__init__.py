"""Energy-optimal surfaces on rectangles by the method of matched sections."""
from .assembly import GlobalSystem, Solution, assemble, residual, solve, solve_problem
from .boundary import (
    BoundarySpec,
    CornerSupport,
    Free,
    PrescribedCurvature,
    PrescribedKinematic,
    boundary_rows,
    sample_boundary_data,
)
from .constraints import PointConstraint, kernel_weight
from .element import (
    Axis,
    ElementGeometry,
    coupling_coefficients,
    element_energy,
    evaluate_section,
    transfer_x,
    transfer_y,
)
from .fields import compare_to_reference, sample_line, sample_point, total_energy
from .mesh import BoundaryScaling, MeshSpec, Side, build_mesh
from .surfaces import surface

__version__ = "0.1.0"
