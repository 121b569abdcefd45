"""Equilibrium conditions, catalogs, the smallest equilibrium, and the
induced optimal values.

A region S is judged by one-shot deviation inequalities on the committed
payoff: outside S the immediate reward must not beat continuing to the
next entry (within an additive slack eps), inside S stopping must not be
beaten by continuing (again within eps). The "pseudo" variant only keeps
the outside condition.

All comparisons run through certified intervals; a weak inequality at an
exact boundary passes, and a comparison whose interval straddles the
threshold after full refinement is reported as indeterminate rather than
guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EnumerationTooLarge,
    IndeterminateCatalog,
    IndeterminateMembership,
)
from .model import MarkovModel, mask_to_region, subset_masks
from .value import ValueInterval, constrained_sup_refine, entry_value_bounds, j_values

EXACT = "exact"
PSEUDO = "pseudo"

HOLDS = "holds"
FAILS = "fails"
INDETERMINATE = "indeterminate"

_PASS, _FAIL, _UNDECIDED = 0, 1, 2

_T_FIRST = 32
_CHUNK = 4096
_CACHE_LIMIT = 1 << 16


@dataclass(frozen=True)
class EquilibriumKind:
    """Condition variant plus its additive slack eps >= 0."""

    variant: str
    eps: float = 0.0

    def __post_init__(self):
        if self.variant not in (EXACT, PSEUDO):
            raise ValueError(f"unknown equilibrium variant {self.variant!r}")
        if self.eps < 0.0:
            raise ValueError("eps must be >= 0")


def exact(eps: float = 0.0) -> EquilibriumKind:
    return EquilibriumKind(EXACT, eps)


def pseudo(eps: float = 0.0) -> EquilibriumKind:
    return EquilibriumKind(PSEUDO, eps)


@dataclass(frozen=True)
class Witness:
    state: str
    side: str  # "outside" or "inside"
    margin: ValueInterval  # positive margin = certified violation


@dataclass(frozen=True)
class Verdict:
    status: str
    witnesses: tuple = ()

    @property
    def holds(self) -> bool:
        return self.status == HOLDS


@dataclass(frozen=True)
class EquilibriumCatalog:
    kind: EquilibriumKind
    regions: tuple
    indeterminate: tuple = ()


@dataclass(frozen=True)
class IterationRound:
    barrier: tuple
    added: tuple
    bounds: dict = field(default_factory=dict)  # label -> (sup lo, sup hi)


@dataclass(frozen=True)
class IterationTrace:
    rounds: tuple


def _classify_states(model, mask, elo, ehi, kind):
    """Per-state condition codes for one region given expectation bounds."""
    f = model.reward
    slack = kind.eps + model.policy.eq_tol
    inside = mask.astype(bool)
    codes = np.full(model.n, _PASS, dtype=np.int8)

    out = ~inside
    codes[out & (f > ehi + slack)] = _FAIL
    codes[out & ~(f <= elo + slack) & ~(f > ehi + slack)] = _UNDECIDED
    if kind.variant == EXACT:
        codes[inside & (elo > f + slack)] = _FAIL
        codes[inside & ~(ehi <= f + slack) & ~(elo > f + slack)] = _UNDECIDED
    return codes


def _region_bounds_refined(model, mask, kind):
    """Expectation bounds refined until every condition is decided or capped."""
    policy = model.policy
    t = _T_FIRST
    while True:
        lo, hi, used = entry_value_bounds(
            model, mask[None, :], t_max=max(t, _T_FIRST)
        )
        codes = _classify_states(model, mask, lo[0], hi[0], kind)
        if not np.any(codes == _UNDECIDED) or used >= policy.t_max:
            return codes, lo[0], hi[0], used
        t = min(2 * used, policy.t_max)


def check_region(model: MarkovModel, region, kind: EquilibriumKind) -> Verdict:
    """Decide whether a region satisfies the equilibrium conditions.

    Exact kind checks both inequalities; pseudo kind only the outside one.
    The verdict carries witnesses (state, violated side, certified margin)
    when it fails or cannot be decided.
    """
    region = model.region(region)
    mask = model.region_mask(region)
    codes, elo, ehi, T = _region_bounds_refined(model, mask, kind)
    return _verdict_from_codes(model, mask, codes, elo, ehi, T, kind)


def _verdict_from_codes(model, mask, codes, elo, ehi, T, kind):
    f = model.reward
    eps = kind.eps
    witnesses = []
    for x in np.nonzero(codes != _PASS)[0]:
        if mask[x]:
            margin = ValueInterval(elo[x] - f[x] - eps, ehi[x] - f[x] - eps, T)
            side = "inside"
        else:
            margin = ValueInterval(f[x] - ehi[x] - eps, f[x] - elo[x] - eps, T)
            side = "outside"
        witnesses.append(Witness(model.labels[x], side, margin))
    if np.any(codes == _FAIL):
        keep = [
            w
            for w, x in zip(witnesses, np.nonzero(codes != _PASS)[0])
            if codes[x] == _FAIL
        ]
        return Verdict(FAILS, tuple(keep))
    if np.any(codes == _UNDECIDED):
        return Verdict(INDETERMINATE, tuple(witnesses))
    return Verdict(HOLDS)


class RegionSweep:
    """Shared full-subset sweep: one set of value matrices, many classifications.

    Computes (and for small spaces caches) expectation bounds for every
    subset of the state space, then classifies them for any number of
    (kind, eps) combinations without redoing the propagation.
    """

    def __init__(self, model: MarkovModel, chunk: int = _CHUNK):
        if model.n > model.policy.enum_cap:
            raise EnumerationTooLarge(
                f"{model.n} states exceed the enumeration cap "
                f"{model.policy.enum_cap}"
            )
        self.model = model
        self.count = 1 << model.n
        self.chunk = chunk
        self._cache = None
        if self.count <= _CACHE_LIMIT:
            self._cache = self._compute(0, self.count)

    def _compute(self, start, stop):
        masks = subset_masks(self.model.n, start, stop)
        lo, hi, T = entry_value_bounds(self.model, masks)
        return masks, lo, hi, T

    def _chunks(self):
        if self._cache is not None:
            yield (0,) + self._cache
            return
        for start in range(0, self.count, self.chunk):
            stop = min(start + self.chunk, self.count)
            yield (start,) + self._compute(start, stop)

    def region_matrix(self):
        """(masks, lo, hi, horizon) for every subset, subset-index order.

        Only available when the sweep fits in the cache; large sweeps are
        streamed chunk-wise and never materialized.
        """
        if self._cache is None:
            raise EnumerationTooLarge(
                "region matrix too large to materialize; iterate classify()"
            )
        return self._cache

    def classify(self, kind: EquilibriumKind):
        """Status codes for every subset, index-aligned with subset masks."""
        model = self.model
        f = model.reward
        slack = kind.eps + model.policy.eq_tol
        statuses = np.empty(self.count, dtype=np.int8)
        for start, masks, lo, hi, T in self._chunks():
            inside = masks.astype(bool)
            out_fail = ~inside & (f > hi + slack)
            out_und = ~inside & ~(f <= lo + slack) & ~out_fail
            if kind.variant == EXACT:
                in_fail = inside & (lo > f + slack)
                in_und = inside & ~(hi <= f + slack) & ~in_fail
            else:
                in_fail = np.zeros_like(out_fail)
                in_und = in_fail
            fails = (out_fail | in_fail).any(axis=1)
            und = (~fails) & (out_und | in_und).any(axis=1)
            chunk_status = np.full(masks.shape[0], _PASS, dtype=np.int8)
            chunk_status[fails] = _FAIL
            chunk_status[und] = _UNDECIDED
            statuses[start : start + masks.shape[0]] = chunk_status
        # rare: a region still undecided after the tol-driven refinement may
        # be decidable with a deeper horizon; retry those individually
        for idx in np.nonzero(statuses == _UNDECIDED)[0]:
            mask = subset_masks(self.model.n, int(idx), int(idx) + 1)[0]
            codes, _, _, _ = _region_bounds_refined(model, mask, kind)
            if np.any(codes == _FAIL):
                statuses[idx] = _FAIL
            elif not np.any(codes == _UNDECIDED):
                statuses[idx] = _PASS
        return statuses

    def catalog(self, kind: EquilibriumKind) -> EquilibriumCatalog:
        statuses = self.classify(kind)
        holds = [
            mask_to_region(subset_masks(self.model.n, int(i), int(i) + 1)[0])
            for i in np.nonzero(statuses == _PASS)[0]
        ]
        indet = [
            mask_to_region(subset_masks(self.model.n, int(i), int(i) + 1)[0])
            for i in np.nonzero(statuses == _UNDECIDED)[0]
        ]
        return EquilibriumCatalog(kind, tuple(holds), tuple(indet))

    def best_payoffs(self, kind: EquilibriumKind):
        """Per-state supremum of the committed payoff over the catalog.

        Returns (values, argmax, indeterminate_count): values maps label ->
        ValueInterval or None when the catalog is empty; argmax maps label ->
        maximizing region.
        """
        model = self.model
        statuses = self.classify(kind)
        best_lo = np.full(model.n, -np.inf)
        best_hi = np.full(model.n, -np.inf)
        best_region = [None] * model.n
        found = False
        horizon = 0
        for start, masks, lo, hi, T in self._chunks():
            sel = statuses[start : start + masks.shape[0]] == _PASS
            if not sel.any():
                continue
            found = True
            horizon = max(horizon, T)
            inside = masks[sel].astype(bool)
            j_lo = np.where(inside, model.reward, lo[sel])
            j_hi = np.where(inside, model.reward, hi[sel])
            local_best = j_lo.argmax(axis=0)
            improved = j_lo.max(axis=0) > best_lo
            best_hi = np.maximum(best_hi, j_hi.max(axis=0))
            sel_idx = np.nonzero(sel)[0]
            for x in np.nonzero(improved)[0]:
                best_lo[x] = j_lo[local_best[x], x]
                best_region[x] = mask_to_region(masks[sel][local_best[x]])
        if not found:
            none_map = {label: None for label in model.labels}
            return none_map, dict(none_map), int((statuses == _UNDECIDED).sum())
        values = {
            label: ValueInterval(float(best_lo[i]), float(best_hi[i]), horizon)
            for i, label in enumerate(model.labels)
        }
        argmax = {label: best_region[i] for i, label in enumerate(model.labels)}
        return values, argmax, int((statuses == _UNDECIDED).sum())


def enumerate_regions(model: MarkovModel, kind: EquilibriumKind) -> EquilibriumCatalog:
    """Classify every subset of the state space for the given kind."""
    return RegionSweep(model).catalog(kind)


def intersection_oracle(model: MarkovModel, kind: EquilibriumKind) -> frozenset:
    """Intersection of all regions that hold; errors if any are undecided."""
    cat = enumerate_regions(model, kind)
    if cat.indeterminate:
        raise IndeterminateCatalog(
            f"{len(cat.indeterminate)} regions undecided at the horizon cap"
        )
    members = model.all_states()
    for region in cat.regions:
        members &= region
    return frozenset(members)


def _expanding_fixpoint(model: MarkovModel, eps: float, *, abort_undecided: bool):
    """Grow a region by repeatedly adding states whose immediate reward
    certifiedly beats every admissible deviation value (plus eps).

    With eps = 0 and abort_undecided this is the smallest-equilibrium
    construction; with eps > 0 it certifies a subset of every pseudo
    eps-equilibrium (hence of every eps-equilibrium).
    """
    policy = model.policy
    f = model.reward
    current: frozenset = frozenset()
    rounds = []
    for _ in range(model.n + 1):
        outside = np.array(sorted(model.all_states() - current), dtype=np.intp)
        if outside.size == 0:
            break

        def decided(lo, hi):
            take = f[outside] > hi[outside] + eps + policy.eq_tol
            leave = f[outside] <= lo[outside] + eps + policy.eq_tol
            return bool(np.all(take | leave))

        lo, hi, T = constrained_sup_refine(model, current, done=decided)
        take = f[outside] > hi[outside] + eps + policy.eq_tol
        leave = f[outside] <= lo[outside] + eps + policy.eq_tol
        undecided = ~(take | leave)
        if abort_undecided and undecided.any():
            x = int(outside[np.nonzero(undecided)[0][0]])
            raise IndeterminateMembership(
                model.labels[x], ValueInterval(float(lo[x]), float(hi[x]), T)
            )
        added = frozenset(int(i) for i in outside[take])
        rounds.append(
            IterationRound(
                barrier=model.region_labels(current),
                added=model.region_labels(added),
                bounds={
                    model.labels[int(i)]: (float(lo[i]), float(hi[i]))
                    for i in outside
                },
            )
        )
        if not added:
            break
        current |= added
    return current, IterationTrace(tuple(rounds))


def smallest_equilibrium(model: MarkovModel):
    """Construct the smallest equilibrium by the expanding fixpoint.

    Starts from the empty region; each round simultaneously admits every
    outside state whose reward strictly (certifiedly) exceeds its best
    deviation value against the current barrier. Raises
    IndeterminateMembership when a comparison cannot be certified.
    Returns (region, trace).
    """
    return _expanding_fixpoint(model, 0.0, abort_undecided=True)


def forced_members(model: MarkovModel, eps: float):
    """Certified subset of every pseudo eps-equilibrium (and so of every
    eps-equilibrium). Undecided comparisons simply stop the growth; the
    result is always a sound under-approximation.

    Returns (region, trace).
    """
    return _expanding_fixpoint(model, float(eps), abort_undecided=False)


def optimal_values(model: MarkovModel) -> dict:
    """Committed payoff of the smallest equilibrium, for every start state.

    The smallest equilibrium attains the supremum over all equilibria
    simultaneously at every state, so this is the optimal-value map.
    """
    region, _ = smallest_equilibrium(model)
    return j_values(model, region)


@dataclass(frozen=True)
class RelaxedValues:
    eps: float
    v_eps: dict
    w_eps: dict
    v_argmax: dict
    w_argmax: dict
    v_undecided: int = 0
    w_undecided: int = 0


def relaxed_values(model: MarkovModel, eps: float) -> RelaxedValues:
    """Suprema of committed payoffs over the eps-relaxed catalogs.

    v_eps ranges over the two-sided (exact) catalog, w_eps over the
    outside-only (pseudo) catalog. Entries are None when a catalog came
    out empty (possible only through undecided regions).
    """
    sweep = RegionSweep(model)
    return relaxed_values_from_sweep(sweep, eps)


def relaxed_values_from_sweep(sweep: RegionSweep, eps: float) -> RelaxedValues:
    v_vals, v_arg, v_und = sweep.best_payoffs(exact(eps))
    w_vals, w_arg, w_und = sweep.best_payoffs(pseudo(eps))
    return RelaxedValues(
        eps=float(eps),
        v_eps=v_vals,
        w_eps=w_vals,
        v_argmax=v_arg,
        w_argmax=w_arg,
        v_undecided=v_und,
        w_undecided=w_und,
    )


def shifted_model(model: MarkovModel, eps: float) -> MarkovModel:
    """Same chain and discount with reward clamped to max(f - eps, 0)."""
    if eps < 0.0:
        raise ValueError("eps must be >= 0")
    return model.with_reward(np.maximum(model.reward - eps, 0.0))


def relaxed_value_cascade(model: MarkovModel, x, eps: float, variant: str):
    """Relaxed value at x certified without enumeration.

    If the forced-membership cascade proves x belongs to every region of
    the catalog, the supremum equals the immediate reward at x exactly,
    provided the catalog is nonempty: for the pseudo variant the full
    state space is always a member; for the exact variant a witness
    region must pass check_region. Returns (ValueInterval or None, info).
    """
    xi = x if isinstance(x, (int, np.integer)) else model.index(x)
    forced, _ = forced_members(model, eps)
    info = {
        "method": "forced-cascade",
        "forced": model.region_labels(forced),
        "witness": None,
    }
    if xi not in forced:
        return None, info
    if variant == PSEUDO:
        info["witness"] = model.region_labels(model.all_states())
        return ValueInterval.exact(model.reward[xi]), info
    for candidate in (forced, model.all_states()):
        if check_region(model, candidate, exact(eps)).holds:
            info["witness"] = model.region_labels(candidate)
            return ValueInterval.exact(model.reward[xi]), info
    return None, info
