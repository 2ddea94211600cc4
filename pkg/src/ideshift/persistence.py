"""The persistence metric Lambda, critical shifting speeds, and the
stochastic spreading speed.

Lambda is the almost-sure limit of (integral of the linearized density)^(1/t);
the population persists iff Lambda > 1.  It is estimated by Monte Carlo over
replicate environment sequences, accumulating per-step log mass ratios with
the density renormalized to unit mass each generation, which reproduces the
unnormalized definition exactly while avoiding overflow (growth-rate products
overflow double precision near t ~ 700 for the case-study rates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .environment import EnvironmentModel
from .habitat import DiscretizedHabitat
from .kernels import DispersalKernel
from .operator import build_matrix
from .spectral import PowerIterationError, eigen_for

DEFAULT_HORIZON = 2000
DEFAULT_REPLICATES = 30
ROOTFIND_TOL = 1e-4


@dataclass(frozen=True)
class LambdaEstimate:
    horizon: int
    # per-replicate Lambda_T and its decomposition pieces
    lambdas: np.ndarray
    sum_log_ratios: np.ndarray  # T * ln Lambda_T per replicate
    sum_log_r: np.ndarray       # sum of ln r_t draws per replicate
    log_growth_mean: float      # E[ln r] of the environment (exact)

    @property
    def value(self) -> float:
        """Point estimate: median of the per-replicate values."""
        return float(np.median(self.lambdas))

    @property
    def log_std(self) -> float:
        """Standard deviation of ln Lambda_T across replicates.

        Infinite when any replicate's mass underflowed to 0 (Lambda_T = 0).
        """
        if len(self.lambdas) < 2:
            return 0.0
        if np.any(self.lambdas == 0.0):
            return math.inf
        return float(np.std(np.log(self.lambdas), ddof=1))

    @property
    def log_se(self) -> float:
        return self.log_std / math.sqrt(len(self.lambdas))

    @property
    def spread(self) -> tuple[float, float]:
        return float(self.lambdas.min()), float(self.lambdas.max())

    @property
    def geometric_mean_growth(self) -> float:
        return math.exp(self.log_growth_mean)

    def kappa_root(self, replicate: int) -> float:
        """Per-replicate estimate of lim kappa_t^(1/t): the Lambda_T factor
        left after removing the realized growth-rate product."""
        t = self.horizon
        return math.exp((self.sum_log_ratios[replicate]
                         - self.sum_log_r[replicate]) / t)

    def persists(self) -> bool:
        return self.value > 1.0


def estimate_lambda(kernel: DispersalKernel, hab: DiscretizedHabitat,
                    env: EnvironmentModel, horizon: int = DEFAULT_HORIZON,
                    replicates: int = DEFAULT_REPLICATES, base_seed: int = 0,
                    u0: np.ndarray | None = None) -> LambdaEstimate:
    """Monte Carlo estimate of Lambda over independent replicate streams.

    u0 defaults to the uniform density on Omega; the limit does not depend
    on it.  Replicate k uses the stream (base_seed, k), so estimates with
    equal seeds share environment sequences across parameter sweeps
    (common random numbers).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    a = build_matrix(kernel, hab, env.c)
    sigmas = env.sigmas
    rates = env.rates
    g0_cols = np.ascontiguousarray(
        np.array([hab.g0_column(s) for s in sigmas]))
    if u0 is None:
        u0 = np.full(hab.n, 1.0)
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (hab.n,) or not np.all(u0 >= 0) or u0.sum() == 0:
        raise ValueError("u0 must be a nontrivial nonnegative vector on the grid")

    atom_idx = np.empty((replicates, horizon), dtype=np.int64)
    for k in range(replicates):
        atom_idx[k] = env.stream(base_seed, k).sample_indices(horizon)

    log_ratios = _accel.linear_log_ratios(a.matrix, g0_cols, atom_idx,
                                          rates, u0, hab.h)
    sums = log_ratios.sum(axis=1)
    lambdas = np.exp(sums / horizon)
    sum_log_r = np.log(rates)[atom_idx].sum(axis=1)
    return LambdaEstimate(horizon, lambdas, sums, sum_log_r,
                          env.log_growth_mean())


@dataclass(frozen=True)
class CriticalSpeedResult:
    c_star: float
    method: str  # "closed-form-gaussian" | "root-find"
    bracket: tuple[float, float] | None = None
    residual: float | None = None


def critical_speed_gaussian(lambda0: float, variance: float,
                            env: EnvironmentModel) -> CriticalSpeedResult:
    """Closed-form critical speed for a Gaussian kernel, sigma identically 0.

    c* = sqrt(2 v (ln lambda0 + E[ln r])) when lambda0 R_bar > 1, else 0.
    """
    if not env.deterministic_shift:
        raise ValueError("closed-form critical speed needs sigma identically 0")
    log_gain = math.log(lambda0) + env.log_growth_mean()
    if log_gain <= 0.0:
        return CriticalSpeedResult(0.0, "closed-form-gaussian")
    return CriticalSpeedResult(math.sqrt(2.0 * variance * log_gain),
                               "closed-form-gaussian")


def critical_speed_rootfind(kernel: DispersalKernel, hab: DiscretizedHabitat,
                            env: EnvironmentModel, c_hi: float = 30.0,
                            tol: float = ROOTFIND_TOL) -> CriticalSpeedResult:
    """c* for any kernel by bisection on c -> R_bar * lambda_c(c) - 1.

    lambda_c comes from a per-c eigensolve; lambda_c decreasing in c makes
    the bracket valid.  Bisection (not a derivative method) because each
    evaluation is itself iterative.
    """
    if not env.deterministic_shift:
        raise ValueError("critical-speed root-find needs sigma identically 0")
    r_bar = env.geometric_mean_growth()

    def gain(c):
        try:
            lam = eigen_for(kernel, hab, c).value
        except PowerIterationError as exc:
            if math.isinf(exc.residual):
                # shifted matrix underflowed to zero: eigenvalue is 0
                lam = 0.0
            else:
                raise
        return r_bar * lam - 1.0

    g_lo = gain(0.0)
    if g_lo <= 0.0:
        return CriticalSpeedResult(0.0, "root-find", (0.0, 0.0), g_lo)
    g_hi = gain(c_hi)
    if g_hi > 0.0:
        raise ValueError(
            f"Lambda({c_hi}) = {g_hi + 1.0:.4f} > 1: enlarge the bracket c_hi")
    lo, hi = 0.0, c_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gain(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    c_star = 0.5 * (lo + hi)
    return CriticalSpeedResult(c_star, "root-find", (lo, hi), gain(c_star))


# ------------------------------------------------------- spreading speed ---

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section_min(func, lo, hi, tol=1e-10, max_iter=400):
    """Golden-section search for the minimum of a unimodal function."""
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1, f2 = func(x1), func(x2)
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo) + abs(hi)):
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = func(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = func(x2)
    x = 0.5 * (lo + hi)
    return x, func(x)


@dataclass(frozen=True)
class SpreadingSpeedResult:
    speed: float
    s_star: float


def spreading_speed(kernel: DispersalKernel,
                    env: EnvironmentModel) -> SpreadingSpeedResult:
    """Asymptotic stochastic-front speed in a homogeneous environment.

    c_bar* = inf_{s>0} (E[ln r] + ln M(s)) / s, with M the kernel MGF.
    The objective is quasiconvex for both families, so golden-section search
    on the (restricted) MGF domain finds the infimum.  With E[ln r] <= 0 the
    infimum is not positive and 0 is reported.
    """
    mu = env.log_growth_mean()
    if mu <= 0.0:
        return SpreadingSpeedResult(0.0, 0.0)

    def objective(s):
        m = kernel.mgf(s)
        if m is None:
            return math.inf
        return (mu + math.log(m)) / s

    s_sup = kernel.mgf_sup
    if math.isinf(s_sup):
        # Gaussian: h(s) = mu/s + v s / 2 grows past its minimum; bracket by
        # doubling until the objective is clearly increasing.
        hi = 1.0
        while objective(2.0 * hi) < objective(hi):
            hi *= 2.0
        hi *= 2.0
        eps = 1e-9 * hi
    else:
        eps = 1e-6 * s_sup
        hi = s_sup - eps
    s_star, value = _golden_section_min(objective, eps, hi)
    return SpreadingSpeedResult(value, s_star)
