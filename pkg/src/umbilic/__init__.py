"""Totally umbilical surfaces invariant under one-parameter isometry groups of
the warped products ``M(kappa)_f x I``: profile integration, curvature
formulas and finite-difference verification."""
from .errors import (
    AdmissibilityError, DegenerateTangentError, DomainError, ExprDomainError, ExprSyntaxError,
    SingularChartError, UmbilicError, UnknownIdentifierError,
)
from .geometry import (
    AmbientPoint, WarpedProduct, conformal_factor, conformal_geodesic_curvature,
    connection_apply, constant_umbilic_residual, curvature_op, metric_dot,
)
from .profile import (
    InvariantSurfaceSpec, IntegrationResult, IsometryClass, ProfileState, closed_form_profile,
    first_integral_target, integrate_geodesic, integrate_profile, profile_rhs,
)
from .surface import (
    CurvatureSample, SurfaceMesh, compatibility_residuals, curvature_line_check,
    cylinder_curvatures, frame_grid, generate_mesh, invariant_surface_curvatures,
    numeric_shape_operator, umbilicity_residual,
)
from .warp_expr import differentiate, eval_ast, parse_warp_expr, to_text
from .warps import WarpingFunction

__version__ = "0.1.0"
