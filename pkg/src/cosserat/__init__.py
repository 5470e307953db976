"""Geometrically nonlinear Cosserat elasticity toolkit.

Tensor algebra and curvature-measure conversions, isotropic and chiral
energy densities with definiteness and coercivity diagnostics, and a
desk-scale direct minimizer of the total energy over coupled
deformation and rotation fields.
"""

from ._kernels import backend_name
from .curvature import (
    CurvatureMeasure,
    REPRESENTATIONS,
    convert,
    convert_array,
    nye_forward,
    nye_inverse,
)
from .fields import (
    BoundaryPartition,
    Grid,
    Mat3Field,
    RotationField,
    Ten3Field,
    VectorField,
    curl_matrix,
    grad_rotation,
    grad_vector,
    integrate_surface,
    integrate_volume,
    read_field,
    write_field,
)
from .functional import (
    LoadSet,
    Problem,
    energy_breakdown,
    enforce_admissible,
    potential_pi,
    total_energy,
)
from .kinematics import (
    CurvatureState,
    StrainState,
    curvature_dislocation,
    curvature_frak,
    curvature_gamma,
    curvature_ktilde,
    curvature_state,
    curvature_torsion,
    dislocation_direct,
    full_state,
    strain,
)
from .materials import (
    ChiralParams,
    CurvatureParams,
    DefinitenessReport,
    GammaCurvatureParams,
    IsotropicModuli,
    MaterialParams,
    b_quadratic,
    check_definiteness,
    coercivity_constants,
    coupling_geodesic,
    coupling_polar,
    dw_dE,
    dw_dK,
    negative_energy_witness,
    w_chiral,
    w_curv,
    w_curv_gamma,
    w_linearized,
    w_mp,
    w_total,
)
from .minimize import (
    MinimizeConfig,
    MinimizeResult,
    Status,
    fd_gradient_check,
    gradient,
    minimize,
)

__version__ = "0.1.0"
