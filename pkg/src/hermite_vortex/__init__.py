"""Hermite-moment expansions for interacting viscous vortices in the plane.

Each vortex is a sum of Hermite functions about a moving centre with a
diffusing Gaussian core.  The package builds the interaction tensors by
truncated Taylor arithmetic, evolves the moments and centres, and compares
against point-vortex, Gaussian-pair and pseudo-spectral baselines.
"""

__version__ = "0.1.0"

from .hermite_basis import (
    CoreParams,
    HermiteIndex,
    basis_norm_sq,
    gaussian_phi00,
    hermite_function,
    hermite_indices,
    hermite_polynomial,
    lambda_of_t,
    projection_prefactor,
    velocity_moment,
    velocity_v00,
)
from .jets import TaylorJet, jet_variable
from .kernels import kernel_K_jet, kernel_K_multi_jet, separation
from .tensors import CoeffTensors, TensorCache, build_tensors, tensor_cache_get
from .dynamics import (
    DynamicsOptions,
    MomentSet,
    SystemState,
    Trajectory,
    VortexState,
    center_rhs,
    decompose_initial,
    integrate,
    moment_rhs,
)
from .integrate import NumericalAbort
from .fields import GridField, eval_velocity, eval_vorticity, project_moment, project_moments
from .reference import (
    PointVortexSystem,
    gaussian_pair_rhs,
    point_vortex_rhs,
    rotation_frequency_new,
    rotation_frequency_quadrupole,
    spectral_oracle,
)
from .diagnostics import Monitor, monitor, weighted_enstrophy
