"""Seeded random-instance generators shared by the property and
acceptance suites. Chains are rational with strictly positive rows so
first-entry laws mix geometrically and enclosures certify quickly."""

from __future__ import annotations

import numpy as np

from eqstop import DiscountFunction, MarkovModel, NumericPolicy

_HYP_BETAS = (0.5, 1.0, 2.0)
_EXP_BETAS = (0.5, 0.7, 0.9)
_PSEUDO = (
    {"w": 0.3, "beta1": 0.4, "beta2": 0.85},
    {"w": 0.6, "beta1": 0.25, "beta2": 0.7},
    {"w": 0.5, "beta1": 0.6, "beta2": 0.9},
)


def discount_for(index: int) -> DiscountFunction:
    kind = index % 3
    pick = (index // 3) % 3
    if kind == 0:
        return DiscountFunction("hyperbolic", {"beta": _HYP_BETAS[pick]})
    if kind == 1:
        return DiscountFunction("exponential", {"beta": _EXP_BETAS[pick]})
    return DiscountFunction("pseudo-exponential", dict(_PSEUDO[pick]))


def random_model(rng: np.random.Generator, index: int = 0, n=None) -> MarkovModel:
    n = int(n if n is not None else rng.integers(3, 7))
    weights = rng.integers(1, 10, size=(n, n)).astype(np.float64)
    kernel = weights / weights.sum(axis=1, keepdims=True)
    reward = rng.integers(1, 129, size=n).astype(np.float64) / 64.0
    return MarkovModel(
        labels=tuple(f"s{i}" for i in range(n)),
        kernel=kernel,
        reward=reward,
        discount=discount_for(index),
        policy=NumericPolicy(),
    )


def random_region(rng: np.random.Generator, n: int, nonempty=True, proper=True):
    while True:
        members = frozenset(int(i) for i in range(n) if rng.random() < 0.5)
        if nonempty and not members:
            continue
        if proper and len(members) == n:
            continue
        return members
