"""Principal eigenvalue of the shifted dispersal operator and its
dispersal-success approximations.

The eigenproblem  lambda phi(x) = int K(x - y + c) g0(y) phi(y) dy  is solved
by power iteration on the masked matrix A diag(g0).  The operator is strictly
positive on the support of g0, so the iteration converges to the unique
positive principal pair (Krein-Rutman) without deflation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .habitat import DiscretizedHabitat
from .kernels import DispersalKernel
from .operator import ShiftedKernelMatrix

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
_APPROX_QUAD_POINTS = 512


class PowerIterationError(RuntimeError):
    def __init__(self, iterations, residual):
        super().__init__(
            f"power iteration did not converge in {iterations} iterations "
            f"(last residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class EigenResult:
    value: float
    # eigenfunction on the grid, normalized to unit integral
    function: np.ndarray
    iterations: int
    residual: float


def principal_eigen(a: ShiftedKernelMatrix, g0_column: np.ndarray,
                    h: float, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> EigenResult:
    """Principal eigenpair of A diag(g0) by power iteration.

    Starts from the uniform positive vector; the eigenvalue is estimated by
    the mass ratio between successive iterates.  Converged when the
    eigenvalue stagnates and the sup-norm residual falls below tol.
    """
    m = a.matrix * g0_column[None, :]
    u = np.full(a.n, 1.0)
    u /= h * u.sum()
    lam = 0.0
    residual = math.inf
    for it in range(1, max_iter + 1):
        v = m @ u
        mass = h * v.sum()
        if mass <= 0.0:
            raise PowerIterationError(it, math.inf)
        lam_new = mass  # u had unit mass
        v /= mass
        residual = float(np.max(np.abs(m @ v - lam_new * v))) / lam_new
        stagnated = abs(lam_new - lam) <= tol * lam_new
        lam, u = lam_new, v
        if stagnated and residual <= tol:
            return EigenResult(float(lam), u, it, residual)
    raise PowerIterationError(max_iter, residual)


def principal_eigen_dense(a: ShiftedKernelMatrix,
                          g0_column: np.ndarray, h: float) -> EigenResult:
    """Brute-force oracle: full dense eigendecomposition of A diag(g0).

    Kept independent of the power-iteration path; used for verification.
    """
    m = a.matrix * g0_column[None, :]
    vals, vecs = np.linalg.eig(m)
    k = int(np.argmax(vals.real))
    lam = float(vals[k].real)
    phi = vecs[:, k].real
    if phi.sum() < 0:
        phi = -phi
    phi = phi / (h * phi.sum())
    residual = float(np.max(np.abs(m @ phi - lam * phi))) / lam
    return EigenResult(lam, phi, 0, residual)


def _patch_quadrature(omega0, n=_APPROX_QUAD_POINTS):
    a0, b0 = omega0
    h = (b0 - a0) / n
    return a0 + h * (np.arange(n) + 0.5), h


def dispersal_success_approx(kernel: DispersalKernel, omega0) -> float:
    """lambda0_bar: patch-average of the dispersal success s0(y).

    Assumes an indicator suitability profile on omega0.
    """
    y, h = _patch_quadrature(omega0)
    s = kernel.dispersal_success(omega0, y)
    return h * float(np.sum(s)) / (omega0[1] - omega0[0])


def modified_dispersal_success_approx(kernel: DispersalKernel, omega0) -> float:
    """lambda0_hat: dispersal success weighted by its own profile.

    lambda0_hat = (1/|Omega0|) int (s0/lambda0_bar) s0 dy >= lambda0_bar.
    """
    y, h = _patch_quadrature(omega0)
    s = kernel.dispersal_success(omega0, y)
    lam_bar = h * float(np.sum(s)) / (omega0[1] - omega0[0])
    return h * float(np.sum(s * s)) / lam_bar / (omega0[1] - omega0[0])


def gaussian_shifted_eigenvalue(lambda0: float, c: float, variance: float) -> float:
    """Eigenvalue of the c-shifted Gaussian operator: exp(-c^2/2v) lambda0."""
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return math.exp(-c * c / (2.0 * variance)) * lambda0


def eigen_for(kernel: DispersalKernel, hab: DiscretizedHabitat, c: float,
              sigma: float = 0.0, tol: float = DEFAULT_TOL) -> EigenResult:
    """Convenience wrapper: build the c-shifted matrix on hab and solve."""
    from .operator import build_matrix

    a = build_matrix(kernel, hab, c)
    return principal_eigen(a, hab.g0_column(sigma), hab.h, tol=tol)
