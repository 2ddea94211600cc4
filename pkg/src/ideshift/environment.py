"""The i.i.d. random environment: yearly shift / growth-rate pairs.

Each generation draws an atom (sigma, r) from a finite discrete distribution.
sigma (km/generation) is the random deviation of the patch centre from its
asymptotic position; r is the geometric growth rate at zero density.  The
asymptotic shifting speed c is a fixed scenario parameter stored with the
model, never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_PROB_TOL = 1e-12

# Butterfly case-study values (km/year speeds, dimensionless growth rates).
BUTTERFLY_C = 3.25
BUTTERFLY_SIGMA = (-1.36, 1.36)
BUTTERFLY_R = (4.85, 2.07)


@dataclass(frozen=True)
class EnvironmentModel:
    """Finite-atom distribution of (sigma, r) with fixed asymptotic speed c.

    atoms: sequence of (sigma, r, probability) triples.
    """

    atoms: tuple
    c: float = 0.0

    def __post_init__(self):
        atoms = tuple((float(s), float(r), float(p)) for s, r, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("environment needs at least one atom")
        if self.c < 0:
            raise ValueError(f"asymptotic speed c must be >= 0, got {self.c}")
        total = sum(p for _, _, p in atoms)
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"atom probabilities sum to {total!r}, expected 1")
        if any(p < 0 for _, _, p in atoms):
            raise ValueError("atom probabilities must be nonnegative")
        if any(r <= 0 for _, r, _ in atoms):
            raise ValueError("growth rates must be positive")
        sigmas = [s for s, _, _ in atoms]
        if min(sigmas) > 0 or max(sigmas) < 0:
            raise ValueError("sigma atoms must satisfy min sigma <= 0 <= max sigma")

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([s for s, _, _ in self.atoms])

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for _, r, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, _, p in self.atoms])

    @property
    def sigma_range(self) -> tuple[float, float]:
        s = self.sigmas
        return float(s.min()), float(s.max())

    @property
    def deterministic_shift(self) -> bool:
        """True when sigma is identically zero (the sigma = 0 special case)."""
        return bool(np.all(self.sigmas == 0.0))

    def log_growth_mean(self) -> float:
        """E[ln r] over the atom distribution."""
        return float(np.sum(self.probs * np.log(self.rates)))

    def geometric_mean_growth(self) -> float:
        """R_bar = exp(E[ln r]), the asymptotic geometric-mean growth rate."""
        return math.exp(self.log_growth_mean())

    def stream(self, base_seed: int, replicate: int = 0) -> "EnvironmentStream":
        return EnvironmentStream(self, base_seed, replicate)


def two_atom_model(sigma_atoms, r_atoms, c: float = 0.0) -> EnvironmentModel:
    """Equal-probability two-atom model pairing sigma_atoms[i] with r_atoms[i].

    The good/bad coupling of the case study pairs the smallest sigma with the
    largest r, which is how the butterfly constructor below orders its atoms.
    """
    (s0, s1), (r0, r1) = sigma_atoms, r_atoms
    return EnvironmentModel(((s0, r0, 0.5), (s1, r1, 0.5)), c=c)


def butterfly_model(c: float = BUTTERFLY_C) -> EnvironmentModel:
    """Case-study environment: good (-1.36, 4.85) / bad (1.36, 2.07), p = 1/2."""
    return two_atom_model(BUTTERFLY_SIGMA, BUTTERFLY_R, c=c)


def mean_preserving_family(model: EnvironmentModel, which: str,
                           spread: float) -> EnvironmentModel:
    """Two-atom model with one variable moved to mean +/- spread.

    The other variable keeps its per-atom values, probabilities stay 1/2 each,
    and c is unchanged.  The variance of the spread variable is spread**2.
    """
    if which not in ("sigma", "r"):
        raise ValueError(f"which must be 'sigma' or 'r', got {which!r}")
    if spread < 0:
        raise ValueError(f"spread must be >= 0, got {spread}")
    if len(model.atoms) != 2 or not np.allclose(model.probs, 0.5):
        raise ValueError("mean-preserving spreads need a two-atom p=1/2 model")
    sig, rat = model.sigmas, model.rates
    if which == "sigma":
        mean = float(sig.mean())
        # keep the good atom (low sigma) first; break rate ties by sigma order
        order = np.lexsort((-rat, sig))
        new_sig = (mean - spread, mean + spread)
        new_rat = (float(rat[order[0]]), float(rat[order[1]]))
    else:
        mean = float(rat.mean())
        if mean - spread <= 0:
            raise ValueError(f"spread {spread} drives a growth rate below 0")
        # the larger r goes with the smaller sigma (good environment)
        order = np.lexsort((sig, -rat))
        new_rat = (mean + spread, mean - spread)
        new_sig = (float(sig[order[0]]), float(sig[order[1]]))
    return two_atom_model(new_sig, new_rat, c=model.c)


@dataclass
class EnvironmentStream:
    """Reproducible per-replicate sampling stream over a model's atoms.

    Streams with equal (base_seed, replicate) reproduce the same draws;
    distinct replicate indices give statistically independent sequences
    (numpy SeedSequence spawning keys).
    """

    model: EnvironmentModel
    base_seed: int
    replicate: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.replicate < 0:
            raise ValueError("replicate index must be >= 0")
        self._rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.base_seed,
                                   spawn_key=(self.replicate,)))

    def sample_indices(self, n: int) -> np.ndarray:
        """Draw n atom indices, advancing the stream."""
        return self._rng.choice(len(self.model.atoms), size=n, p=self.model.probs)

    def sample(self) -> tuple[float, float]:
        """Draw one (sigma, r) pair, advancing the stream."""
        i = int(self.sample_indices(1)[0])
        s, r, _ = self.model.atoms[i]
        return s, r
