"""Pure-NumPy kernels: the import-time fallback for the compiled core.

All functions are batched over a stack of regions (masks of shape (R, n))
and return values for every start state at once. Semantics must match
``eqstop._core`` bit-for-bit up to float reassociation; the backend test
suite compares the two.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "numpy"


def first_entry_bounds(Q, stop_masks, f, delta, M, T, tail_weight=None):
    """Enclose E[delta(first entry time) * reward(entry state)] per start.

    stop_masks: (R, n) uint8, 1 marks the stopping region.
    delta: weights for t = 0..T+1.
    tail_weight: optional (R, n) state weights for the survival recursion;
    passing an indicator of can-still-reach states sharpens the tail.
    Returns (lo, hi, survival), each (R, n). ``lo`` is the stopped mass
    accumulated through T; paths alive after T are worth at most
    delta(T+1)*M*survival, which is what ``hi`` adds.
    """
    if T < 1:
        raise ValueError("horizon must be >= 1")
    Q = np.asarray(Q, dtype=np.float64)
    masks = np.atleast_2d(np.asarray(stop_masks, dtype=np.float64))
    f = np.asarray(f, dtype=np.float64)
    keep = 1.0 - masks
    QT = Q.T.copy()
    w = np.ones_like(masks) if tail_weight is None else np.asarray(tail_weight)

    u = (masks * f) @ QT          # stop reward collected at t = 1
    s = (keep * w) @ QT           # (weighted) alive mass after the first step
    lo = delta[1] * u
    for t in range(2, T + 1):
        u = (keep * u) @ QT
        s = (keep * s) @ QT
        lo += delta[t] * u
    hi = lo + delta[T + 1] * M * s
    return lo, hi, s


def constrained_sup_bounds(Q, barrier_masks, f, delta, M, T):
    """Enclose sup over stopping times within [1, first entry to barrier].

    Backward induction over (state, time). At barrier states stopping is
    forced; elsewhere the recursion takes max(stop now, continue). The lower
    bound forces a stop at T, the upper bound credits alive paths with the
    best conceivable tail delta(T)*M.
    Returns (lo, hi) of shape (R, n) for every start state.
    """
    Q = np.asarray(Q, dtype=np.float64)
    barriers = np.atleast_2d(np.asarray(barrier_masks, dtype=np.float64))
    f = np.asarray(f, dtype=np.float64)
    QT = Q.T.copy()
    forced = barriers.astype(bool)

    stop = delta[T] * f
    v_lo = np.broadcast_to(stop, barriers.shape).copy()
    v_hi = np.where(forced, stop, delta[T] * M)
    for t in range(T - 1, 0, -1):
        stop = delta[t] * f
        cont_lo = v_lo @ QT
        cont_hi = v_hi @ QT
        v_lo = np.where(forced, stop, np.maximum(stop, cont_lo))
        v_hi = np.where(forced, stop, np.maximum(stop, cont_hi))
    return v_lo @ QT, v_hi @ QT


def hitting_mass(Q, stop_mask, x, T):
    """Joint mass of (first entry time, entry state) from a single start.

    Returns (mass, survival): mass[t - 1, y] is the probability that the
    first time >= 1 in the region is t with the chain then at y; survival
    is the mass still outside through T.
    """
    Q = np.asarray(Q, dtype=np.float64)
    mask = np.asarray(stop_mask, dtype=np.float64)
    keep = 1.0 - mask
    n = Q.shape[0]
    alive = np.zeros(n)
    alive[x] = 1.0
    mass = np.zeros((T, n))
    for t in range(1, T + 1):
        arrive = alive @ Q
        mass[t - 1] = arrive * mask
        alive = arrive * keep
    return mass, float(alive.sum())
