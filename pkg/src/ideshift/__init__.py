"""Persistence analysis for populations governed by stochastic
integrodifference equations on a randomly shifting habitat."""

from ._accel import backend
from .environment import (EnvironmentModel, EnvironmentStream, butterfly_model,
                          mean_preserving_family, two_atom_model)
from .growth import GrowthFamily, GrowthMap
from .habitat import DiscretizedHabitat, Suitability, build_grid, centered_patch
from .kernels import DispersalKernel, KernelFamily, gaussian, laplace
from .operator import ShiftedKernelMatrix, build_matrix, step_linear, step_nonlinear
from .persistence import (CriticalSpeedResult, LambdaEstimate,
                          SpreadingSpeedResult, critical_speed_gaussian,
                          critical_speed_rootfind, estimate_lambda,
                          spreading_speed)
from .simulate import (ClassificationRules, StationarySample, TrajectoryRecord,
                       classify, run_trajectory, stationary_sample)
from .spectral import (EigenResult, dispersal_success_approx, eigen_for,
                       gaussian_shifted_eigenvalue,
                       modified_dispersal_success_approx, principal_eigen,
                       principal_eigen_dense)

__version__ = "0.1.0"

__all__ = [
    "backend",
    "EnvironmentModel", "EnvironmentStream", "butterfly_model",
    "mean_preserving_family", "two_atom_model",
    "GrowthFamily", "GrowthMap",
    "DiscretizedHabitat", "Suitability", "build_grid", "centered_patch",
    "DispersalKernel", "KernelFamily", "gaussian", "laplace",
    "ShiftedKernelMatrix", "build_matrix", "step_linear", "step_nonlinear",
    "CriticalSpeedResult", "LambdaEstimate", "SpreadingSpeedResult",
    "critical_speed_gaussian", "critical_speed_rootfind", "estimate_lambda",
    "spreading_speed",
    "ClassificationRules", "StationarySample", "TrajectoryRecord", "classify",
    "run_trajectory", "stationary_sample",
    "EigenResult", "dispersal_success_approx", "eigen_for",
    "gaussian_shifted_eigenvalue", "modified_dispersal_success_approx",
    "principal_eigen", "principal_eigen_dense",
]
