"""Markov model container: state labels, kernel, reward, discount, numerics.

Everything is immutable after construction; operations across the package
are pure functions of a validated model.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .discount import DiscountFunction
from .errors import DimensionMismatch, ModelValidationError


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances steering the certified numerics.

    tol: target width for value enclosures.
    t_max: hard horizon cap for truncation refinement.
    eq_tol: one-sided slack when classifying the weak/strict inequalities.
    enum_cap: largest state count for which full subset sweeps are allowed.
    mass_tol: slack for probability identities (row sums, mass conservation).
    """

    tol: float = 1e-9
    t_max: int = 10_000
    eq_tol: float = 1e-9
    enum_cap: int = 22
    mass_tol: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ModelValidationError("tol must be positive")
        if self.eq_tol < 0.0:
            raise ModelValidationError("eq_tol must be >= 0")
        if self.t_max < 2:
            raise ModelValidationError("t_max must be >= 2")


@dataclass(frozen=True)
class MarkovModel:
    """Finite chain with bounded nonnegative rewards and a discount function."""

    labels: tuple
    kernel: np.ndarray
    reward: np.ndarray
    discount: DiscountFunction
    policy: NumericPolicy = field(default_factory=NumericPolicy)

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        kernel = np.ascontiguousarray(np.asarray(self.kernel, dtype=np.float64))
        reward = np.ascontiguousarray(np.asarray(self.reward, dtype=np.float64))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "reward", reward)
        n = len(labels)
        if len(set(labels)) != n:
            raise ModelValidationError("state labels must be unique")
        if kernel.shape != (n, n):
            raise ModelValidationError(
                f"kernel shape {kernel.shape} does not match {n} states"
            )
        if reward.shape != (n,):
            raise ModelValidationError("reward must be one value per state")
        if np.any(kernel < -self.policy.mass_tol):
            raise ModelValidationError("kernel entries must be >= 0")
        rowsums = kernel.sum(axis=1)
        bad = np.nonzero(np.abs(rowsums - 1.0) > 1e-9)[0]
        if bad.size:
            i = int(bad[0])
            raise ModelValidationError(
                f"kernel row {labels[i]!r} sums to {rowsums[i]!r}, expected 1"
            )
        if np.any(~np.isfinite(reward)) or np.any(reward < 0.0):
            raise ModelValidationError("rewards must be finite and >= 0")
        kernel.setflags(write=False)
        reward.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def max_reward(self) -> float:
        return float(self.reward.max()) if self.n else 0.0

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise DimensionMismatch(f"unknown state label {label!r}") from None

    def region(self, members) -> frozenset:
        """Normalize labels/indices into a region (frozenset of indices)."""
        out = set()
        for m in members:
            if isinstance(m, (int, np.integer)):
                i = int(m)
                if not 0 <= i < self.n:
                    raise DimensionMismatch(f"state index {i} out of range")
                out.add(i)
            else:
                out.add(self.index(m))
        return frozenset(out)

    def region_labels(self, region) -> tuple:
        return tuple(self.labels[i] for i in sorted(region))

    def region_mask(self, region) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.uint8)
        for i in region:
            mask[i] = 1
        return mask

    def all_states(self) -> frozenset:
        return frozenset(range(self.n))

    def with_reward(self, reward) -> "MarkovModel":
        return replace(self, reward=np.asarray(reward, dtype=np.float64))

    def with_policy(self, policy: NumericPolicy) -> "MarkovModel":
        return replace(self, policy=policy)

    def discount_weights(self, horizon: int) -> np.ndarray:
        return self.discount.weights(horizon)


def region_to_mask(region, n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=np.uint8)
    for i in region:
        mask[int(i)] = 1
    return mask


def mask_to_region(mask) -> frozenset:
    return frozenset(int(i) for i in np.nonzero(mask)[0])


def subset_masks(n: int, start: int, stop: int) -> np.ndarray:
    """Masks for subset indices [start, stop); bit i of the index = state i."""
    idx = np.arange(start, stop, dtype=np.uint64)
    bits = (idx[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & 1
    return bits.astype(np.uint8)
