import math

import numpy as np
import pytest

from ideshift.environment import (EnvironmentModel, butterfly_model,
                                  two_atom_model)
from ideshift.habitat import build_grid, centered_patch
from ideshift.kernels import gaussian, laplace
from ideshift.persistence import (critical_speed_gaussian,
                                  critical_speed_rootfind, estimate_lambda,
                                  spreading_speed)
from ideshift.spectral import eigen_for

PATCH = centered_patch(10.0)
STILL_R = EnvironmentModel(((0.0, 4.85, 0.5), (0.0, 2.07, 0.5)), c=3.25)


def test_deterministic_lambda_equals_r_times_eigenvalue():
    # sigma = 0, r fixed: Lambda = r * lambda_c exactly in the limit
    env = EnvironmentModel(((0.0, 2.0, 1.0),), c=3.25)
    hab = build_grid(PATCH, env, 128)
    lam_c = eigen_for(gaussian(25.0), hab, 3.25).value
    est = estimate_lambda(gaussian(25.0), hab, env, horizon=2000, replicates=2)
    assert est.value == pytest.approx(2.0 * lam_c, rel=1e-4)
    assert est.log_std < 1e-12  # no randomness left


def test_replicates_share_seeded_streams():
    hab = build_grid(PATCH, butterfly_model(), 64)
    a = estimate_lambda(gaussian(25.0), hab, butterfly_model(),
                        horizon=200, replicates=4, base_seed=11)
    b = estimate_lambda(gaussian(25.0), hab, butterfly_model(),
                        horizon=200, replicates=4, base_seed=11)
    assert np.array_equal(a.lambdas, b.lambdas)
    c = estimate_lambda(gaussian(25.0), hab, butterfly_model(),
                        horizon=200, replicates=4, base_seed=12)
    assert not np.array_equal(a.lambdas, c.lambdas)


def test_lambda_independent_of_initial_density():
    hab = build_grid(PATCH, butterfly_model(), 64)
    env = butterfly_model()
    shapes = [np.full(hab.n, 1.0),
              np.exp(-hab.nodes**2),
              np.where(hab.nodes > 0, 1.0, 0.0)]
    vals = [estimate_lambda(gaussian(25.0), hab, env, horizon=2000,
                            replicates=3, base_seed=5, u0=u0).value
            for u0 in shapes]
    assert max(vals) - min(vals) < 1e-3 * vals[0]


def test_lambda_decomposition_pieces():
    hab = build_grid(PATCH, butterfly_model(), 64)
    est = estimate_lambda(gaussian(25.0), hab, butterfly_model(),
                          horizon=500, replicates=3, base_seed=2)
    for k in range(3):
        recomposed = math.exp(est.sum_log_r[k] / 500) * est.kappa_root(k)
        assert recomposed == pytest.approx(est.lambdas[k], rel=1e-12)


def test_no_overflow_at_long_horizon():
    # growth-rate products overflow doubles near t ~ 700; the renormalized
    # accumulation must stay finite far beyond that
    hab = build_grid(PATCH, butterfly_model(), 64)
    est = estimate_lambda(gaussian(25.0), hab, butterfly_model(),
                          horizon=3000, replicates=2)
    assert np.all(np.isfinite(est.lambdas))
    assert np.all(est.lambdas > 0)


def test_invalid_estimate_arguments():
    hab = build_grid(PATCH, butterfly_model(), 64)
    env = butterfly_model()
    with pytest.raises(ValueError):
        estimate_lambda(gaussian(25.0), hab, env, horizon=0)
    with pytest.raises(ValueError):
        estimate_lambda(gaussian(25.0), hab, env, replicates=0)
    with pytest.raises(ValueError):
        estimate_lambda(gaussian(25.0), hab, env, u0=np.zeros(hab.n))
    with pytest.raises(ValueError):
        estimate_lambda(gaussian(25.0), hab, env, u0=-np.ones(hab.n))


def test_closed_form_critical_speed():
    env = STILL_R
    hab = build_grid(PATCH, env, 256)
    v = 25.0
    lam0 = eigen_for(gaussian(v), hab, 0.0).value
    res = critical_speed_gaussian(lam0, v, env)
    expected = math.sqrt(2.0 * v * (math.log(lam0) + env.log_growth_mean()))
    assert res.c_star == pytest.approx(expected, rel=1e-14)
    assert res.method == "closed-form-gaussian"
    # frozen during development at N=256
    assert res.c_star == pytest.approx(5.784173, abs=1e-5)


def test_critical_speed_zero_when_subcritical():
    env = EnvironmentModel(((0.0, 1.2, 1.0),), c=0.0)
    hab = build_grid(PATCH, env, 128)
    lam0 = eigen_for(gaussian(150.0), hab, 0.0).value
    assert lam0 * 1.2 < 1.0
    assert critical_speed_gaussian(lam0, 150.0, env).c_star == 0.0
    assert critical_speed_rootfind(gaussian(150.0), hab, env).c_star == 0.0


def test_rootfind_matches_closed_form():
    env = STILL_R
    hab = build_grid(PATCH, env, 256)
    closed = critical_speed_gaussian(
        eigen_for(gaussian(25.0), hab, 0.0).value, 25.0, env)
    root = critical_speed_rootfind(gaussian(25.0), hab, env, tol=1e-5)
    assert root.c_star == pytest.approx(closed.c_star, abs=1e-4)
    assert root.bracket[0] <= root.c_star <= root.bracket[1]


def test_critical_speed_requires_deterministic_shift():
    hab = build_grid(PATCH, butterfly_model(), 64)
    with pytest.raises(ValueError):
        critical_speed_gaussian(0.6, 25.0, butterfly_model())
    with pytest.raises(ValueError):
        critical_speed_rootfind(gaussian(25.0), hab, butterfly_model())


def test_rootfind_bracket_failure_signals():
    env = EnvironmentModel(((0.0, 50.0, 1.0),), c=0.0)
    hab = build_grid(PATCH, env, 64)
    with pytest.raises(ValueError):
        critical_speed_rootfind(gaussian(25.0), hab, env, c_hi=1.0)


def test_spreading_speed_gaussian_closed_form():
    # minimizing (E[ln r] + v s^2 / 2) / s gives sqrt(2 v E[ln r])
    env = EnvironmentModel(((0.0, math.e, 1.0),), c=0.0)
    res = spreading_speed(gaussian(25.0), env)
    assert res.speed == pytest.approx(math.sqrt(50.0), rel=1e-8)
    assert res.s_star == pytest.approx(math.sqrt(2.0 / 25.0), rel=1e-4)
    mixed = butterfly_model()
    expected = math.sqrt(2.0 * 25.0 * mixed.log_growth_mean())
    assert spreading_speed(gaussian(25.0), mixed).speed == pytest.approx(
        expected, rel=1e-8)


def test_spreading_speed_laplace_frozen():
    # frozen against a dense 1e6-point grid scan of the objective
    res = spreading_speed(laplace(25.0), butterfly_model())
    assert res.speed == pytest.approx(9.2215, abs=1e-3)
    assert 0.0 < res.s_star < laplace(25.0).mgf_sup


def test_spreading_speed_zero_without_mean_growth():
    flat = EnvironmentModel(((0.0, 1.0, 1.0),), c=0.0)
    assert spreading_speed(gaussian(25.0), flat).speed == 0.0
    shrinking = EnvironmentModel(((0.0, 0.5, 0.5), (0.0, 1.5, 0.5)), c=0.0)
    assert shrinking.log_growth_mean() < 0.0
    assert spreading_speed(gaussian(25.0), shrinking).speed == 0.0


def test_spreading_speed_grid_scan_oracle():
    kernel = laplace(9.0)
    env = two_atom_model((-1.0, 1.0), (3.0, 1.5))
    res = spreading_speed(kernel, env)
    s = np.linspace(1e-6, kernel.mgf_sup * (1 - 1e-6), 200_001)
    mu = env.log_growth_mean()
    vals = (mu + np.log([kernel.mgf(x) for x in s])) / s
    assert res.speed == pytest.approx(vals.min(), rel=1e-6)
