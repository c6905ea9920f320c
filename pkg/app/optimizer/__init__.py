"""
Optimizer module: LOS-plane error projection, misalignment probability and the
outage-constrained benchmark solver.
"""

from .misalignment import (
    disk_tail,
    ellipse_tail,
    footprint_semi_axes,
    misalignment_probability,
    p_beam_cover,
    p_mis_approx,
    p_mis_total,
    per_side_target,
)
from .projection import (
    combined_los_cov,
    los_geometry,
    los_plane_side,
    nav_to_los_rotation,
    orientation_cov_to_los,
    project_position_cov,
    rotate_to_los,
)
from .solver import (
    circumscribing_beam,
    circumscribing_semi_axes,
    fit_footprint_scale,
    fit_principal_scale,
    optimize,
    required_ptx_worstcase,
)

__all__ = [
    "circumscribing_beam",
    "circumscribing_semi_axes",
    "combined_los_cov",
    "disk_tail",
    "ellipse_tail",
    "fit_footprint_scale",
    "fit_principal_scale",
    "footprint_semi_axes",
    "los_geometry",
    "los_plane_side",
    "misalignment_probability",
    "nav_to_los_rotation",
    "optimize",
    "orientation_cov_to_los",
    "p_beam_cover",
    "p_mis_approx",
    "p_mis_total",
    "per_side_target",
    "project_position_cov",
    "required_ptx_worstcase",
    "rotate_to_los",
]
