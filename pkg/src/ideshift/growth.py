"""Stochastic per-generation growth maps.

Two concrete families with slope r at zero density:

* Beverton-Holt (compensatory, nondecreasing):
    f_r(u) = r u / (1 + ((r-1)/C) u)   for r > 1
    f_r(u) = r u / (1 + u/C)           for r <= 1  (no positive fixed point)
* Ricker (overcompensatory, humped):
    f_r(u) = r u exp(-u/C)

Both return 0 for u <= 0.  C sets the density scale; for Beverton-Holt with
r > 1 the positive fixed point sits at u = C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class GrowthFamily(Enum):
    BEVERTON_HOLT = "beverton_holt"
    RICKER = "ricker"


# integer codes shared with the accelerated trajectory kernels
FAMILY_CODES = {GrowthFamily.BEVERTON_HOLT: 0, GrowthFamily.RICKER: 1}


@dataclass(frozen=True)
class GrowthMap:
    family: GrowthFamily
    capacity: float = 1.0

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")

    def apply(self, r: float, u):
        """Evaluate f_r(u) elementwise; negative densities clamp to 0."""
        if not r > 0:
            raise ValueError(f"growth slope r must be positive, got {r}")
        u = np.maximum(np.asarray(u, dtype=float), 0.0)
        c = self.capacity
        if self.family is GrowthFamily.BEVERTON_HOLT:
            if r > 1.0:
                out = r * u / (1.0 + ((r - 1.0) / c) * u)
            else:
                out = r * u / (1.0 + u / c)
        else:
            out = r * u * np.exp(-u / c)
        return out if out.ndim else float(out)

    def supremum(self, r: float) -> float:
        """sup_{u>0} f_r(u), used for the density bound b of the dynamics."""
        c = self.capacity
        if self.family is GrowthFamily.BEVERTON_HOLT:
            # r>1 branch saturates at r c/(r-1); r<=1 branch at r c.
            return r * c / (r - 1.0) if r > 1.0 else r * c
        return r * c / math.e  # Ricker hump peak, at u = C

    def monotone_envelopes(self, r: float, b: float):
        """Nondecreasing lower/upper envelopes of f_r on (0, b).

        lower(u) = min_{u <= v <= b} f_r(v),  upper(u) = max_{0 <= v <= u} f_r(v).
        Both share the slope r at 0 and sandwich f_r pointwise on (0, b).
        Evaluation is exact, using the families' monotone/unimodal structure
        (Beverton-Holt is monotone; Ricker has its single peak at u = C).
        """
        if not b > 0:
            raise ValueError(f"density bound b must be positive, got {b}")
        if self.family is GrowthFamily.BEVERTON_HOLT:
            # already nondecreasing: both envelopes coincide with f_r
            def lower(u):
                return self.apply(r, u)

            def upper(u):
                return self.apply(r, u)

            return lower, upper

        u_peak = self.capacity
        f_b = self.apply(r, b)

        def lower(u):
            u = np.asarray(u, dtype=float)
            # min over [u, b]: endpoints only, since f rises then falls
            out = np.where(u >= min(u_peak, b), f_b,
                           np.minimum(self.apply(r, u), f_b))
            return out if out.ndim else float(out)

        def upper(u):
            u = np.asarray(u, dtype=float)
            out = np.asarray(self.apply(r, np.minimum(u, u_peak)))
            return out if out.ndim else float(out)

        return lower, upper
