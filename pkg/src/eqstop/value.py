"""Certified enclosures for the stopping-value functionals.

Three quantities are computed, all as intervals whose width is driven to
the numeric policy's ``tol`` by doubling the truncation horizon:

- the payoff of committing to a stopping region (stop at first entry),
- the best deviation value: the supremum over stopping times that must
  act at or before first entry to a barrier region,
- the superset variant of the deviation value: the best committed region
  squeezed between a base region and the whole space minus the start.

Tail bounds only use that the discount weight is nonincreasing, plus a
reachability argument: alive mass that can never reach the region
contributes exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DimensionMismatch, EnumerationTooLarge, HorizonExhausted
from .model import MarkovModel, mask_to_region, subset_masks

SUPERSET_SWEEP_CAP = 1 << 20
_T_START = 32


@dataclass(frozen=True)
class ValueInterval:
    """Certified enclosure [lo, hi] produced at a truncation horizon."""

    lo: float
    hi: float
    horizon_used: int

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, v: float) -> bool:
        return self.lo - 1e-15 <= v <= self.hi + 1e-15

    @classmethod
    def exact(cls, v: float, horizon: int = 0) -> "ValueInterval":
        return cls(float(v), float(v), horizon)


def reach_weights(kernel: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Per region: 1.0 at states that can reach the region in >= 1 step.

    Alive mass sitting at a zero-weight state can never be stopped, so it
    drops out of every tail bound.
    """
    adj = kernel > 0.0
    masks = np.atleast_2d(masks)
    target = masks.astype(bool)
    reach = np.zeros_like(target)
    for _ in range(kernel.shape[0]):
        grown = (adj @ (target | reach).T).T
        if np.array_equal(grown, reach):
            break
        reach = grown
    return reach.astype(np.float64)


def entry_value_bounds(model: MarkovModel, masks, *, tol=None, t_max=None):
    """Batched enclosure of E[delta(entry time) * reward(entry state)].

    masks: (R, n) stack of stopping regions. Returns (lo, hi, horizon),
    arrays of shape (R, n) covering every start state. Values for starts
    inside a region still refer to the *next* entry (time >= 1); committed
    payoffs overlay the immediate reward separately.

    Refines by horizon doubling until every width is <= tol or the cap is
    reached; never raises on wide cells (callers decide what a wide cell
    means for them).
    """
    policy = model.policy
    tol = policy.tol if tol is None else tol
    t_max = policy.t_max if t_max is None else t_max
    masks = np.atleast_2d(np.asarray(masks, dtype=np.uint8))
    if masks.shape[1] != model.n:
        raise DimensionMismatch("region masks do not match the state count")
    R = masks.shape[0]
    M = model.max_reward
    reach = reach_weights(model.kernel, masks)

    lo = np.zeros((R, model.n))
    hi = np.zeros((R, model.n))
    final_T = 0
    active = np.arange(R)
    T = min(_T_START, t_max)
    while True:
        delta = model.discount_weights(T + 1)
        a_lo, a_hi, _ = backend.first_entry_bounds(
            model.kernel, masks[active], model.reward, delta, M, T,
            tail_weight=reach[active],
        )
        lo[active] = a_lo
        hi[active] = a_hi
        final_T = T
        widths = (a_hi - a_lo).max(axis=1)
        still = np.nonzero(widths > tol)[0]
        if still.size == 0 or T >= t_max:
            break
        active = active[still]
        T = min(2 * T, t_max)
    return lo, hi, final_T


def j_value(model: MarkovModel, region, x) -> ValueInterval:
    """Payoff of committing to a region, started at x.

    Inside the region the reward is taken immediately and the value is
    exact; outside, the enclosure integrates the first-entry law and
    brackets the post-horizon tail.
    """
    region = model.region(region)
    xi = x if isinstance(x, (int, np.integer)) else model.index(x)
    if xi in region:
        return ValueInterval.exact(model.reward[xi])
    lo, hi, T = entry_value_bounds(model, model.region_mask(region))
    out = ValueInterval(float(lo[0, xi]), float(hi[0, xi]), T)
    if out.width > model.policy.tol:
        raise HorizonExhausted(
            f"width {out.width:.3e} above tol at horizon cap", achieved=out
        )
    return out


def j_values(model: MarkovModel, region) -> dict:
    """Committed payoff for every start state (label-keyed intervals)."""
    region = model.region(region)
    lo, hi, T = entry_value_bounds(model, model.region_mask(region))
    out = {}
    for i, label in enumerate(model.labels):
        if i in region:
            out[label] = ValueInterval.exact(model.reward[i])
        else:
            out[label] = ValueInterval(float(lo[0, i]), float(hi[0, i]), T)
    return out


def constrained_sup_bounds_all(model: MarkovModel, barrier_masks, T: int):
    """Raw deviation-value bounds for a stack of barriers at horizon T."""
    delta = model.discount_weights(max(T, 1))
    return backend.constrained_sup_bounds(
        model.kernel,
        np.atleast_2d(np.asarray(barrier_masks, dtype=np.uint8)),
        model.reward,
        delta,
        model.max_reward,
        T,
    )


def constrained_sup_refine(model: MarkovModel, barrier, *, done):
    """Double the horizon until ``done(lo, hi)`` or the cap; return last bounds.

    ``done`` sees per-state bound rows and returns True to stop early, so
    membership tests can bail as soon as every comparison is decided.
    """
    policy = model.policy
    mask = model.region_mask(model.region(barrier))
    T = min(_T_START, policy.t_max)
    while True:
        lo, hi = constrained_sup_bounds_all(model, mask, T)
        if done(lo[0], hi[0]) or T >= policy.t_max:
            return lo[0], hi[0], T
        T = min(2 * T, policy.t_max)


def constrained_sup_value(model: MarkovModel, barrier, x) -> ValueInterval:
    """Best deviation value at x: sup over stop times in [1, entry(barrier)].

    Refined until the enclosure at x is narrower than tol; raises
    HorizonExhausted (carrying the achieved interval) otherwise.
    """
    xi = x if isinstance(x, (int, np.integer)) else model.index(x)
    tol = model.policy.tol

    def tight_enough(lo, hi):
        return hi[xi] - lo[xi] <= tol

    lo, hi, T = constrained_sup_refine(model, barrier, done=tight_enough)
    out = ValueInterval(float(lo[xi]), float(hi[xi]), T)
    if out.width > tol:
        raise HorizonExhausted(
            f"width {out.width:.3e} above tol at horizon cap", achieved=out
        )
    return out


def superset_sup_value(model: MarkovModel, base, x, *, sweep_cap=None):
    """Best committed payoff over regions squeezed between base and X minus x.

    Returns (interval, best_region). The sweep enumerates every admissible
    region, so it is guarded by a cap on 2**(free states).
    """
    base = model.region(base)
    xi = x if isinstance(x, (int, np.integer)) else model.index(x)
    if xi in base:
        raise DimensionMismatch("start state must lie outside the base region")
    cap = SUPERSET_SWEEP_CAP if sweep_cap is None else sweep_cap
    free = sorted(model.all_states() - base - {xi})
    if 1 << len(free) > cap:
        raise EnumerationTooLarge(
            f"2^{len(free)} candidate regions exceed the sweep cap {cap}"
        )
    base_mask = model.region_mask(base)
    patterns = subset_masks(len(free), 0, 1 << len(free)) if free else np.zeros(
        (1, 0), dtype=np.uint8
    )
    masks = np.tile(base_mask, (patterns.shape[0], 1))
    if free:
        masks[:, free] = patterns
    lo, hi, T = entry_value_bounds(model, masks)
    at_x_lo, at_x_hi = lo[:, xi], hi[:, xi]
    best = int(np.argmax(at_x_lo))
    interval = ValueInterval(float(at_x_lo.max()), float(at_x_hi.max()), T)
    return interval, mask_to_region(masks[best])
