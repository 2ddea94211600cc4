"""Hot trajectory loops: numba-compiled kernels with a pure-numpy fallback.

The long-horizon iterations (linearized growth-rate accumulation and full
nonlinear simulation) dominate runtime.  Both exist in two versions:

* numba @njit loops (default when numba is importable), and
* batched-numpy implementations leaning on BLAS.

Set IDESHIFT_DISABLE_NUMBA=1 to force the numpy path.  Both paths are kept
importable side by side so the benchmark and the agreement tests can compare
them directly.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("IDESHIFT_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

try:
    if _DISABLE:
        raise ImportError
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):  # no-op decorator fallback
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def backend() -> str:
    return "numba" if NUMBA_AVAILABLE else "numpy"


# ---------------------------------------------------------------- linear ---

def linear_log_ratios_numpy(a, g0_cols, atom_idx, atom_r, u0, h):
    """Per-step log mass ratios of the linearized dynamics, all replicates.

    a: (n, n) shifted kernel matrix.
    g0_cols: (k, n) suitability columns, one row per environment atom.
    atom_idx: (m, t) atom index drawn for each replicate and generation.
    atom_r: (k,) growth rate of each atom.
    u0: (n,) initial density, any positive mass.
    Returns (m, t) array of ln(mass_{s+1}/mass_s); each replicate's density
    is renormalized to unit mass after every step.
    """
    m_rep, t_hor = atom_idx.shape
    u = np.tile(u0 / (h * u0.sum()), (m_rep, 1)).T  # (n, m)
    out = np.empty((m_rep, t_hor))
    for t in range(t_hor):
        idx = atom_idx[:, t]
        w = g0_cols[idx].T * (atom_r[idx][None, :] * u)
        u = a @ w
        masses = h * u.sum(axis=0)
        # a replicate whose mass underflows to 0 is dead: log ratio -inf
        # from here on, density pinned at 0 (avoids 0/0 NaNs)
        with np.errstate(divide="ignore"):
            out[:, t] = np.log(masses)
        alive = masses > 0.0
        u[:, alive] /= masses[alive][None, :]
        u[:, ~alive] = 0.0
    return out


@njit(cache=True)
def _linear_log_ratios_jit(a, g0_cols, atom_idx, atom_r, u0, h):
    m_rep, t_hor = atom_idx.shape
    n = u0.shape[0]
    out = np.empty((m_rep, t_hor))
    w = np.empty(n)
    for m in range(m_rep):
        u = u0 / (h * u0.sum())
        for t in range(t_hor):
            k = atom_idx[m, t]
            g = g0_cols[k]
            r = atom_r[k]
            for i in range(n):
                w[i] = g[i] * r * u[i]
            u = a @ w
            mass = h * u.sum()
            if mass <= 0.0:
                # dead replicate: -inf ratios for every remaining step
                for s in range(t, t_hor):
                    out[m, s] = -np.inf
                break
            out[m, t] = np.log(mass)
            u = u / mass
    return out


def linear_log_ratios_numba(a, g0_cols, atom_idx, atom_r, u0, h):
    if not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend unavailable")
    return _linear_log_ratios_jit(a, g0_cols, atom_idx, atom_r, u0, float(h))


def linear_log_ratios(a, g0_cols, atom_idx, atom_r, u0, h):
    impl = linear_log_ratios_numba if NUMBA_AVAILABLE else linear_log_ratios_numpy
    return impl(a, g0_cols, atom_idx, atom_r, u0, h)


# ------------------------------------------------------------- nonlinear ---

# growth family codes shared with ideshift.growth.FAMILY_CODES
_BEVERTON_HOLT = 0
_RICKER = 1


def _grow_numpy(family, r, cap, u):
    u = np.maximum(u, 0.0)
    if family == _BEVERTON_HOLT:
        if r > 1.0:
            return r * u / (1.0 + ((r - 1.0) / cap) * u)
        return r * u / (1.0 + u / cap)
    return r * u * np.exp(-u / cap)


def nonlinear_trajectory_numpy(a, g0_cols, atom_idx, atom_sigma_r, u0, h,
                               family, cap, snap_times):
    """Masses, sup-densities and snapshots of the full nonlinear dynamics.

    atom_idx: (t,) atom index per generation (one replicate).
    atom_sigma_r: (k, 2) per-atom (sigma, r); only r is used here, the sigma
    dependence enters through g0_cols.
    snap_times: sorted generation indices at which to store the density.
    Returns (masses (t+1,), sups (t+1,), snaps (len(snap_times), n)).
    """
    t_hor = atom_idx.shape[0]
    u = u0.copy()
    masses = np.empty(t_hor + 1)
    sups = np.empty(t_hor + 1)
    snaps = np.empty((len(snap_times), u0.shape[0]))
    masses[0] = h * u.sum()
    sups[0] = u.max()
    pos = 0
    if pos < len(snap_times) and snap_times[pos] == 0:
        snaps[pos] = u
        pos += 1
    for t in range(t_hor):
        k = atom_idx[t]
        r = atom_sigma_r[k, 1]
        u = a @ (g0_cols[k] * _grow_numpy(family, r, cap, u))
        masses[t + 1] = h * u.sum()
        sups[t + 1] = u.max()
        if pos < len(snap_times) and snap_times[pos] == t + 1:
            snaps[pos] = u
            pos += 1
    return masses, sups, snaps


@njit(cache=True)
def _nonlinear_trajectory_jit(a, g0_cols, atom_idx, atom_sigma_r, u0, h,
                              family, cap, snap_times):
    t_hor = atom_idx.shape[0]
    n = u0.shape[0]
    u = u0.copy()
    masses = np.empty(t_hor + 1)
    sups = np.empty(t_hor + 1)
    snaps = np.empty((len(snap_times), n))
    masses[0] = h * u.sum()
    sups[0] = u.max()
    pos = 0
    if pos < len(snap_times) and snap_times[pos] == 0:
        snaps[pos] = u
        pos += 1
    w = np.empty(n)
    for t in range(t_hor):
        k = atom_idx[t]
        g = g0_cols[k]
        r = atom_sigma_r[k, 1]
        for i in range(n):
            ui = u[i] if u[i] > 0.0 else 0.0
            if family == _BEVERTON_HOLT:
                if r > 1.0:
                    fu = r * ui / (1.0 + ((r - 1.0) / cap) * ui)
                else:
                    fu = r * ui / (1.0 + ui / cap)
            else:
                fu = r * ui * np.exp(-ui / cap)
            w[i] = g[i] * fu
        u = a @ w
        masses[t + 1] = h * u.sum()
        sups[t + 1] = u.max()
        if pos < len(snap_times) and snap_times[pos] == t + 1:
            snaps[pos] = u
            pos += 1
    return masses, sups, snaps


def nonlinear_trajectory_numba(a, g0_cols, atom_idx, atom_sigma_r, u0, h,
                               family, cap, snap_times):
    if not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend unavailable")
    return _nonlinear_trajectory_jit(a, g0_cols, atom_idx, atom_sigma_r, u0,
                                     float(h), family, float(cap), snap_times)


def nonlinear_trajectory(a, g0_cols, atom_idx, atom_sigma_r, u0, h,
                         family, cap, snap_times):
    impl = (nonlinear_trajectory_numba if NUMBA_AVAILABLE
            else nonlinear_trajectory_numpy)
    return impl(a, g0_cols, atom_idx, atom_sigma_r, u0, h, family, cap, snap_times)
