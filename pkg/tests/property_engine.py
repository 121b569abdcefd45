"""Randomized property suite: the structural laws the solver must satisfy
on small rational chains, checked instance by instance.

P1  smallest equilibrium equals the intersection of the exact catalog and
    of the pseudo catalog.
P2  the smallest equilibrium is itself in the exact catalog.
P3  it dominates every exact-catalog region in committed payoff, everywhere.
P4  the pseudo catalog is closed under pairwise intersection.
P5  enlarging a pseudo region never improves any committed payoff.
P6  exact catalogs embed in pseudo catalogs; V_eps <= W_eps.
P7  sandwich: pseudo(f) within pseudo((f-eps)+) within pseudo-eps(f)
    within pseudo((f - eps/(1-delta(1)))+).
P8  catalogs and relaxed values are monotone in eps.
P9  V over eps = 2^-k decreases to the unrelaxed value once catalogs
    stabilize.
P10 shifted-reward smallest equilibria grow back up to the original, with
    value convergence once they match.
P11 under exponential discounting the optimal values match classical
    value iteration.
P12 a unique positive reward maximizer belongs to every exact region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from eqstop import (
    IndeterminateMembership,
    exact,
    j_values,
    pseudo,
    shifted_model,
    smallest_equilibrium,
)
from eqstop.equilibrium import RegionSweep
from eqstop.model import mask_to_region, subset_masks
from generators import random_model
from oracles import snell_value_iteration

EPS_GRID = (0.0, 0.01, 0.05, 0.2)
SHIFT_GRID = (0.25, 0.125, 0.0625, 0.03125)
P9_DEPTH = 12
GRACE = 1e-8  # 10x the default tol, absorbing interval slack in comparisons


@dataclass
class Failure:
    instance: int
    prop: str
    detail: str


def generate_instances(count, seed=20250810, sizes=(3, 4, 5, 6)):
    """Seeded stream of solvable instances; undecidable draws are replaced
    (and counted) so the suite stays deterministic."""
    rng = np.random.default_rng(seed)
    instances = []
    skipped = 0
    draw = 0
    while len(instances) < count:
        if draw > count + 50:
            raise RuntimeError("generator could not reach the requested count")
        model = random_model(rng, index=draw, n=sizes[draw % len(sizes)])
        draw += 1
        try:
            smallest_equilibrium(model)
            sweep = RegionSweep(model)
            if sweep.catalog(exact(0.0)).indeterminate:
                raise IndeterminateMembership("catalog", None)
            if sweep.catalog(pseudo(0.0)).indeterminate:
                raise IndeterminateMembership("catalog", None)
        except IndeterminateMembership:
            skipped += 1
            continue
        instances.append(model)
    return instances, skipped


def _region_indices(model, catalog):
    out = set()
    for region in catalog.regions:
        idx = 0
        for i in region:
            idx |= 1 << i
        out.add(idx)
    return out


def check_instance(index, model):
    failures = []

    def fail(prop, detail):
        failures.append(Failure(index, prop, detail))

    n = model.n
    f = model.reward
    s_star, _ = smallest_equilibrium(model)
    sweep = RegionSweep(model)
    masks, lo, hi, _ = sweep.region_matrix()
    j_lo = np.where(masks.astype(bool), f, lo)
    j_hi = np.where(masks.astype(bool), f, hi)

    cat_e0 = sweep.catalog(exact(0.0))
    cat_p0 = sweep.catalog(pseudo(0.0))
    e0 = _region_indices(model, cat_e0)
    p0 = _region_indices(model, cat_p0)
    star_idx = sum(1 << i for i in s_star)

    # P1: construction equals both intersection oracles
    inter_e = _intersect_indices(e0, n)
    inter_p = _intersect_indices(p0, n)
    if star_idx != inter_e:
        fail("P1", f"iteration {star_idx:b} vs exact intersection {inter_e:b}")
    if star_idx != inter_p:
        fail("P1", f"iteration {star_idx:b} vs pseudo intersection {inter_p:b}")

    # P2: the construction is itself an exact region
    if star_idx not in e0:
        fail("P2", "smallest equilibrium missing from the exact catalog")

    # P3: it dominates every exact region everywhere
    for ridx in e0:
        if np.any(j_lo[star_idx] < j_hi[ridx] - GRACE):
            fail("P3", f"region {ridx:b} beats the smallest equilibrium")

    # P4: pseudo catalog closed under intersection
    p0_list = sorted(p0)
    for a in p0_list:
        for b in p0_list:
            if (a & b) not in p0:
                fail("P4", f"{a:b} & {b:b} left the pseudo catalog")
                break
        else:
            continue
        break

    # P5: superset monotonicity of committed payoffs on pseudo regions
    for sidx in p0_list:
        sups = [r for r in range(1 << n) if r & sidx == sidx]
        if np.any(j_lo[sidx][None, :] < j_hi[sups] - GRACE):
            fail("P5", f"a superset of {sidx:b} improves a payoff")

    # P6 / P8: nesting and monotonicity across the eps grid
    prev_e, prev_p = None, None
    prev_v, prev_w = None, None
    for eps in EPS_GRID:
        cat_e = sweep.catalog(exact(eps))
        cat_p = sweep.catalog(pseudo(eps))
        if cat_e.indeterminate or cat_p.indeterminate:
            continue
        ids_e = _region_indices(model, cat_e)
        ids_p = _region_indices(model, cat_p)
        if not ids_e <= ids_p:
            fail("P6", f"exact catalog not within pseudo at eps={eps}")
        v_vals, _, _ = sweep.best_payoffs(exact(eps))
        w_vals, _, _ = sweep.best_payoffs(pseudo(eps))
        for x in model.labels:
            if v_vals[x].midpoint > w_vals[x].midpoint + GRACE:
                fail("P6", f"V_eps > W_eps at {x}, eps={eps}")
        if prev_e is not None:
            if not (prev_e <= ids_e and prev_p <= ids_p):
                fail("P8", f"catalog shrank when eps grew to {eps}")
            for x in model.labels:
                if v_vals[x].midpoint < prev_v[x].midpoint - GRACE:
                    fail("P8", f"V_eps decreased in eps at {x}")
                if w_vals[x].midpoint < prev_w[x].midpoint - GRACE:
                    fail("P8", f"W_eps decreased in eps at {x}")
        prev_e, prev_p = ids_e, ids_p
        prev_v, prev_w = v_vals, w_vals

    # P7: sandwich between shifted-reward pseudo catalogs
    eps = 0.1
    d1 = model.discount(1)
    low_shift = RegionSweep(shifted_model(model, eps))
    high_shift = RegionSweep(shifted_model(model, eps / (1.0 - d1)))
    chain = [
        _region_indices(model, cat_p0),
        _region_indices(model, low_shift.catalog(pseudo(0.0))),
        _region_indices(model, sweep.catalog(pseudo(eps))),
        _region_indices(model, high_shift.catalog(pseudo(0.0))),
    ]
    for k, (a, b) in enumerate(zip(chain, chain[1:])):
        if not a <= b:
            fail("P7", f"sandwich link {k} broken (eps={eps})")

    # P9: dyadic eps limit of the relaxed values
    v_opt = j_values(model, s_star)
    prev = None
    stabilized = None
    for k in range(P9_DEPTH + 1):
        eps_k = 2.0**-k
        vals, _, und = sweep.best_payoffs(exact(eps_k))
        if und:
            continue
        for x in model.labels:
            if prev is not None and vals[x].midpoint > prev[x].midpoint + GRACE:
                fail("P9", f"V_eps rose as eps shrank at {x} (k={k})")
        prev = vals
        stabilized = _region_indices(model, sweep.catalog(exact(eps_k))) == e0
    if stabilized and prev is not None:
        for x in model.labels:
            if abs(prev[x].midpoint - v_opt[x].midpoint) > GRACE:
                fail("P9", f"stabilized catalog but V_eps != V at {x}")

    # P10: shifted-reward equilibria grow back to the original
    matched_eps = None
    for eps in SHIFT_GRID:
        try:
            s_shift, _ = smallest_equilibrium(shifted_model(model, eps))
        except IndeterminateMembership:
            continue
        if not s_shift <= s_star:
            fail("P10", f"shift eps={eps} produced a non-subset region")
        matched_eps = eps if s_shift == s_star else matched_eps
    if matched_eps is not None:
        shifted_vals = j_values(shifted_model(model, matched_eps), s_star)
        for x in model.labels:
            gap = abs(shifted_vals[x].midpoint - v_opt[x].midpoint)
            if gap > matched_eps + GRACE:
                fail("P10", f"value drifted {gap} > eps at {x}")

    # P11: exponential discounting reduces to classical value iteration
    if model.discount.family == "exponential":
        w = snell_value_iteration(model.kernel, f, model.discount.params["beta"])
        for i, x in enumerate(model.labels):
            if abs(v_opt[x].midpoint - w[i]) > 1e-8:
                fail(
                    "P11",
                    f"value {v_opt[x].midpoint!r} vs iteration {w[i]!r} at {x}",
                )

    # P12: a unique positive maximizer is forced into every exact region
    top = np.nonzero(f == f.max())[0]
    if len(top) == 1 and f[top[0]] > 0:
        bit = 1 << int(top[0])
        for ridx in e0:
            if not ridx & bit:
                fail("P12", f"region {ridx:b} omits the reward maximizer")
                break

    return failures


def _intersect_indices(indices, n):
    out = (1 << n) - 1
    for idx in indices:
        out &= idx
    return out


def run_suite(count, seed=20250810):
    instances, skipped = generate_instances(count, seed=seed)
    failures = []
    families = {"hyperbolic": 0, "exponential": 0, "pseudo-exponential": 0}
    for i, model in enumerate(instances):
        families[model.discount.family] += 1
        failures.extend(check_instance(i, model))
    return failures, {"skipped": skipped, "families": families}
