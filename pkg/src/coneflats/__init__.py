"""Conformally flat n-immersions in S^(2n-2) built from loop-group dressing.

The package constructs flat lifts of conformally flat immersions into the
Lorentzian light-cone from solutions of a first-order integrable system,
implements dressing by simple rational loops (geometric Ribaucour
transforms), and certifies every identity numerically on rectangular grids.
"""

__version__ = "0.1.0"

from .lorentz import QuadraticForm, IsotropicLine, inner, group_residual, line_projector
from .cartan import CartanBasis, PPotential, make_basis
from .grids import GridBox, fd_tol
from .uksystem import SolutionGrid, lax_coefficient, uk_residual, flatness_residual, xi_from_metric
from .frames import ExtendedFrame, vacuum_frame, integrate_frame, split_at_zero, log_derivative
from .dressing import (
    SimpleElement,
    TransportedLine,
    RibaucourData,
    evaluate_simple,
    transport_line,
    dress_frame,
    dressed_solution,
    dressed_immersion,
    ribaucour_data,
    permutability_residual,
)
from .immersion import (
    ImmersionGrid,
    ChannelData,
    build_immersion,
    flat_lift,
    project_to_sphere,
    fundamental_data,
    curvature_identities,
    metric_flatness_residual,
    combescure_compare,
    channel_immersion,
)

__all__ = [
    "QuadraticForm", "IsotropicLine", "inner", "group_residual", "line_projector",
    "CartanBasis", "PPotential", "make_basis",
    "GridBox", "fd_tol",
    "SolutionGrid", "lax_coefficient", "uk_residual", "flatness_residual", "xi_from_metric",
    "ExtendedFrame", "vacuum_frame", "integrate_frame", "split_at_zero", "log_derivative",
    "SimpleElement", "TransportedLine", "RibaucourData", "evaluate_simple",
    "transport_line", "dress_frame", "dressed_solution", "dressed_immersion",
    "ribaucour_data", "permutability_residual",
    "ImmersionGrid", "ChannelData", "build_immersion", "flat_lift",
    "project_to_sphere", "fundamental_data", "curvature_identities",
    "metric_flatness_residual", "combescure_compare", "channel_immersion",
]
