import numpy as np
import pytest

from ideshift.environment import EnvironmentModel, butterfly_model
from ideshift.habitat import Suitability, build_grid, centered_patch

STILL = EnvironmentModel(((0.0, 1.0, 1.0),))


def test_grid_nodes_and_weights():
    hab = build_grid(centered_patch(10.0), STILL, 16)
    assert hab.omega == (-5.0, 5.0)
    assert hab.h == pytest.approx(10.0 / 16)
    assert hab.nodes[0] == pytest.approx(-5.0 + hab.h / 2)
    assert hab.nodes[-1] == pytest.approx(5.0 - hab.h / 2)
    assert hab.weights.sum() == pytest.approx(10.0, rel=1e-14)


def test_omega_widens_with_sigma_range():
    hab = build_grid(centered_patch(10.0), butterfly_model(), 128)
    assert hab.omega == (-6.36, 6.36)
    assert hab.weights.sum() == pytest.approx(12.72, rel=1e-14)


def test_nodes_strictly_inside_omega():
    for n in (16, 17, 128):
        hab = build_grid(centered_patch(10.0), butterfly_model(), n)
        assert hab.nodes.min() > hab.omega[0]
        assert hab.nodes.max() < hab.omega[1]


def test_cached_columns_per_atom():
    hab = build_grid(centered_patch(10.0), butterfly_model(), 64)
    for sigma in (-1.36, 1.36):
        col = hab.g0_column(sigma)
        inside = (hab.nodes - sigma > -5.0) & (hab.nodes - sigma < 5.0)
        assert np.array_equal(col, inside.astype(float))
    with pytest.raises(KeyError):
        hab.g0_column(0.0)


def test_indicator_quadrature_error_bounded_by_cell_width():
    # midpoint rule on an indicator: only the two jump cells contribute,
    # so |error| <= 2h and the error vanishes as the grid refines
    suit = Suitability((-5.0, 5.0))
    env = butterfly_model()  # Omega wider than the patch, jumps interior
    errors = []
    for n in (128, 256, 512, 1024, 2048):
        hab = build_grid(suit, env, n)
        err = abs(hab.mass(suit(hab.nodes)) - 10.0)
        assert err <= 2.0 * hab.h
        errors.append(err)
    assert errors[-1] < 0.05 * errors[0]


def test_tabulated_profile_clipped_and_supported():
    suit = Suitability((-2.0, 2.0), profile=lambda x: 2.0 * np.exp(-x * x))
    x = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
    vals = suit(x)
    assert vals[0] == 0.0 and vals[-1] == 0.0  # outside support
    assert vals[2] == 1.0                       # clipped to 1
    assert 0.0 < vals[1] <= 1.0


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        Suitability((3.0, 3.0))
    with pytest.raises(ValueError):
        build_grid(centered_patch(10.0), STILL, 8)


def test_mass_is_midpoint_rule():
    hab = build_grid(centered_patch(4.0), STILL, 32)
    u = np.ones(hab.n)
    assert hab.mass(u) == pytest.approx(4.0)
