"""Suitability profile, computational domain and its midpoint-rule grid.

The computational domain is Omega = [a0 + min sigma, b0 + max sigma], where
[a0, b0] supports the suitability profile g0.  A midpoint rule is used so
grid nodes never land on the jump points of an indicator profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .environment import EnvironmentModel

MIN_GRID_POINTS = 16
DEFAULT_GRID_POINTS = 512


@dataclass(frozen=True)
class Suitability:
    """Profile g0 with values in [0, 1], compactly supported on [a0, b0].

    profile=None means the indicator of the support; otherwise a callable
    returning values in [0, 1] (treated as 0 outside the support).
    """

    support: tuple[float, float]
    profile: Callable | None = None

    def __post_init__(self):
        a0, b0 = self.support
        if not a0 < b0:
            raise ValueError(f"empty suitability support [{a0}, {b0}]")

    @property
    def width(self) -> float:
        return self.support[1] - self.support[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a0, b0 = self.support
        inside = (x > a0) & (x < b0)
        if self.profile is None:
            out = inside.astype(float)
        else:
            vals = np.clip(np.asarray(self.profile(x), dtype=float), 0.0, 1.0)
            out = np.where(inside, vals, 0.0)
        return out if out.ndim else float(out)


def centered_patch(width: float = 10.0) -> Suitability:
    """Indicator patch of the given width centered at the origin."""
    return Suitability((-0.5 * width, 0.5 * width))


@dataclass(frozen=True)
class DiscretizedHabitat:
    suitability: Suitability
    omega: tuple[float, float]
    nodes: np.ndarray
    h: float
    # suitability sampled at nodes - sigma, one column per environment atom
    g0_columns: dict = field(repr=False)

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, self.h)

    def mass(self, u) -> float:
        """Midpoint-rule integral of a density vector over Omega."""
        return self.h * float(np.sum(u))

    def g0_column(self, sigma: float) -> np.ndarray:
        try:
            return self.g0_columns[float(sigma)]
        except KeyError:
            raise KeyError(
                f"sigma={sigma} is not an atom of the environment this grid "
                "was built for") from None


def build_grid(suitability: Suitability, env: EnvironmentModel,
               n: int = DEFAULT_GRID_POINTS) -> DiscretizedHabitat:
    """Uniform midpoint grid over Omega with cached shifted g0 columns."""
    if n < MIN_GRID_POINTS:
        raise ValueError(f"grid needs at least {MIN_GRID_POINTS} points, got {n}")
    a0, b0 = suitability.support
    s_lo, s_hi = env.sigma_range
    a, b = a0 + s_lo, b0 + s_hi
    h = (b - a) / n
    nodes = a + h * (np.arange(n) + 0.5)
    cols = {float(s): suitability(nodes - s) for s in dict.fromkeys(env.sigmas)}
    return DiscretizedHabitat(suitability, (a, b), nodes, h, cols)
