"""Particle transport on constrained domains via mirror maps.

The package minimizes variational-form functionals (KL, JS, W1) over
probability distributions supported on the unit ball or the probability
simplex. Each outer iteration fits a shallow witness network to the
functional's variational maximizer, then pushes the particle set along
the witness gradient: plain Euclidean steps (``vt``), projected steps
(``projvt``), mirror-dual steps (``mirrorvt``), or a kernelized
score-based update (``svmd``).
"""

from .datagen import (
    DirichletMixtureSpec,
    GaussianMixtureSpec,
    InitSpec,
    dirichlet_mixture_dual_log_density,
    dirichlet_mixture_dual_score,
    init_particles,
    sample_dirichlet_mixture,
    sample_truncated_gaussian_mixture,
)
from .exceptions import BoundaryError, ConfigError, DegenerateError, DimensionError
from .functionals import TargetSampleSet, VariationalFunctional, conjugate_value, objective_estimate
from .geometry import (
    Domain,
    MirrorMap,
    ball_log_map,
    entropic_simplex_map,
    grad_phi,
    grad_phi_star,
    identity_map,
    inv_hessian_apply,
    project_ball,
    project_simplex,
)
from .metrics import Kernel, RunHistory, RunStatus, HistoryRow, median_heuristic, mmd2, should_stop
from .transport import (
    ParticleSet,
    StepSizeWarning,
    TransportConfig,
    mirrorvt_step,
    projvt_step,
    run,
    svmd_step,
    vt_step,
)
from .vfm import ShallowNet, VfmConfig, net_eval, net_grad_input, vfm_run

__version__ = "0.1.0"

__all__ = [
    "BoundaryError",
    "ConfigError",
    "DegenerateError",
    "DimensionError",
    "DirichletMixtureSpec",
    "Domain",
    "GaussianMixtureSpec",
    "HistoryRow",
    "InitSpec",
    "Kernel",
    "MirrorMap",
    "ParticleSet",
    "RunHistory",
    "RunStatus",
    "ShallowNet",
    "StepSizeWarning",
    "TargetSampleSet",
    "TransportConfig",
    "VariationalFunctional",
    "VfmConfig",
    "ball_log_map",
    "conjugate_value",
    "dirichlet_mixture_dual_log_density",
    "dirichlet_mixture_dual_score",
    "entropic_simplex_map",
    "grad_phi",
    "grad_phi_star",
    "identity_map",
    "init_particles",
    "inv_hessian_apply",
    "median_heuristic",
    "mirrorvt_step",
    "mmd2",
    "net_eval",
    "net_grad_input",
    "objective_estimate",
    "project_ball",
    "project_simplex",
    "projvt_step",
    "run",
    "sample_dirichlet_mixture",
    "sample_truncated_gaussian_mixture",
    "should_stop",
    "svmd_step",
    "vfm_run",
    "vt_step",
    "__version__",
]
