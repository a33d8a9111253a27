"""Constrained interpolation profile (CIP) schemes in one dimension.

Two-moment (value and slope) semi-Lagrangian solvers for variable-speed
advection and transport, an immersed-interface variant for piecewise
constant speed, and a 1D Maxwell solver for constant, discontinuous and
variable media.
"""

from .errors import (
    AmbiguousSideError,
    CFLError,
    CIPError,
    CoefficientError,
    InputError,
    NumericalError,
    OutOfCellError,
)
from .grid import (
    FieldState,
    Grid,
    PiecewiseConstantCoefficient,
    SmoothCoefficient,
    build_grid,
    central_difference,
    init_state,
)
from .hermite import HermiteCell, eval_profile, hermite_basis, hermite_eval
from .characteristics import FootPoint, backtrack_foot, locate_cell
from .cip import advance, constant_stencil, step_advection, step_constant, step_legacy, step_transport
from .stability import amplification, condition_scan, schur_margin
from .iim import (
    IIMProfile,
    JumpCondition,
    Side,
    advance_discontinuous,
    build_interface_polynomial,
    eval_interface_polynomial,
    exact_discontinuous_solution,
    step_discontinuous,
)
from .maxwell import (
    CellAveragedMedia,
    ConstantMedia,
    EMState,
    PiecewiseMedia,
    advance_maxwell,
    build_em_interface_polynomials,
    cell_average_media,
    step_maxwell_constant,
    step_maxwell_interface,
    step_maxwell_variable,
)
from .harness import ConvergenceTable, ErrorReport, convergence_study, error_norms, reference_problems, run_problem

__version__ = "0.1.0"
