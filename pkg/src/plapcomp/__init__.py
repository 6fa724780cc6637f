"""First p-Laplacian eigenvalues on model spaces and rotationally symmetric
manifolds, with numerical checks of integral-curvature comparison estimates."""

__version__ = "0.1.0"

from .comparison import (bochner_check, cheng_gap_check, explicit_pointwise_bound,
                         laplace_comparison_norm_check, lichnerowicz_empirical_check,
                         lichnerowicz_lower_bound, matei_baseline_bound, p_bochner_residual,
                         p_laplace_comparison_check, p_laplacian_expansion, p_laplacian_radial,
                         sobolev_ratio, sobolev_threshold, volume_doubling_check)
from .errors import (BracketError, ConvergenceError, DomainError, ProfileError, SolverError,
                     StiffnessError, VacuousBoundError)
from .functions import RadialFunction
from .model import ModelSpace, model_ball_volume, model_laplacian_of_r, sn_k, cn_k
from .radial import (EigenResult, RadialProblem, interval_problem, model_ball_problem, pi_p,
                     profile_ball_problem, p_rayleigh_quotient, rayleigh_minimize_grid,
                     solve_first_dirichlet, solve_first_dirichlet_model,
                     solve_first_dirichlet_profile, solve_first_neumann_radial)
from .rearrangement import (coarea_audit, decreasing_rearrangement, faber_krahn_check,
                            isoperimetric_check, obata_check, spherical_rearrangement)
from .reports import BoundReport
from .warped import (WarpedProfile, ball_volume, integral_curvature_norm, laplacian_excess_psi,
                     min_ricci_K, model_profile, parse_profile, perturbed_sphere_profile)
