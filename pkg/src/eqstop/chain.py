"""Total-variation metrics and first-entry (hitting) distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DimensionMismatch
from .model import MarkovModel


def tv_distance(mu, nu) -> float:
    """Total variation distance on the full L1 scale.

    Equals the supremum over test functions valued in [-1, 1] of the
    integral gap, i.e. ``sum(|mu - nu|)``; disjoint point masses are at
    distance 2. Halve for the [0, 1]-test-function scale.
    """
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    if mu.shape != nu.shape or mu.ndim != 1:
        raise DimensionMismatch(
            f"distributions have shapes {mu.shape} and {nu.shape}"
        )
    return float(np.abs(mu - nu).sum())


def kernel_tv_gap(Q1, Q2, states=None) -> float:
    """Worst per-row total variation distance over the given states.

    ``states`` defaults to all rows; passing a subset reports the
    locally-uniform gap on that subset.
    """
    Q1 = np.asarray(Q1, dtype=np.float64)
    Q2 = np.asarray(Q2, dtype=np.float64)
    if Q1.shape != Q2.shape or Q1.ndim != 2 or Q1.shape[0] != Q1.shape[1]:
        raise DimensionMismatch(f"kernel shapes {Q1.shape} and {Q2.shape} differ")
    rows = np.abs(Q1 - Q2).sum(axis=1)
    if states is None:
        idx = np.arange(Q1.shape[0])
    else:
        idx = np.asarray(sorted(states), dtype=np.intp)
        if idx.size == 0:
            raise DimensionMismatch("state subset must be nonempty")
        if idx.min() < 0 or idx.max() >= Q1.shape[0]:
            raise DimensionMismatch("state subset out of range")
    return float(rows[idx].max())


@dataclass(frozen=True)
class HittingDistribution:
    """Joint law of (first entry time, entry state) truncated at a horizon.

    mass[t-1, y] = P(first time >= 1 in the region is t and the state is y)
    for 1 <= t <= horizon; survival = P(no entry through the horizon).
    """

    source: int
    region: frozenset
    horizon: int
    mass: np.ndarray
    survival: float

    def stopped_probability(self) -> float:
        return float(self.mass.sum())

    def time_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=1)


def hitting_distribution(
    model: MarkovModel, region, x, T: int
) -> HittingDistribution:
    """Propagate the chain with the region absorbing to get the entry law.

    Mass never lands outside the region; together with the survival mass
    the rows sum to one. The empty region yields pure survival.
    """
    if T < 1:
        raise DimensionMismatch("horizon must be >= 1")
    region = model.region(region)
    xi = model.index(x) if not isinstance(x, (int, np.integer)) else int(x)
    mask = model.region_mask(region)
    mass, survival = backend.hitting_mass(model.kernel, mask, xi, int(T))
    return HittingDistribution(
        source=xi, region=region, horizon=int(T), mass=mass, survival=survival
    )
