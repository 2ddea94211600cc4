"""Discretized action of the stochastic map and its linearization.

The shifted kernel matrix A[i, j] = w_j K(x_i - x_j + c) turns the integral
update into a matrix-vector product.  One dense matrix is built per
(kernel, speed, grid) and reused across generations and replicates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .growth import GrowthMap
from .habitat import DiscretizedHabitat
from .kernels import DispersalKernel


@dataclass(frozen=True)
class ShiftedKernelMatrix:
    kernel: DispersalKernel
    c: float
    matrix: np.ndarray  # (n, n), strictly positive

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def build_matrix(kernel: DispersalKernel, hab: DiscretizedHabitat,
                 c: float) -> ShiftedKernelMatrix:
    x = hab.nodes
    a = hab.h * kernel.density(x[:, None] - x[None, :] + c)
    return ShiftedKernelMatrix(kernel, float(c), np.ascontiguousarray(a))


def step_nonlinear(a: ShiftedKernelMatrix, growth: GrowthMap,
                   hab: DiscretizedHabitat, alpha, u: np.ndarray) -> np.ndarray:
    """One generation of the full dynamics: grow under (sigma, r), disperse.

    v(x_i) = sum_j A[i, j] g0(x_j - sigma) f_r(u(x_j))
    """
    sigma, r = alpha
    _check_grid(a, hab, u)
    return a.matrix @ (hab.g0_column(sigma) * growth.apply(r, u))


def step_linear(a: ShiftedKernelMatrix, hab: DiscretizedHabitat,
                alpha, u: np.ndarray) -> np.ndarray:
    """One generation of the dynamics linearized at zero: f_r(u) -> r u."""
    sigma, r = alpha
    _check_grid(a, hab, u)
    return a.matrix @ (hab.g0_column(sigma) * (r * u))


def _check_grid(a: ShiftedKernelMatrix, hab: DiscretizedHabitat, u: np.ndarray):
    if a.n != hab.n or u.shape != (hab.n,):
        raise ValueError(
            f"grid mismatch: matrix n={a.n}, habitat n={hab.n}, u shape {u.shape}")
