import numpy as np
import pytest

from eqstop import (
    DiscountFunction,
    EnumerationTooLarge,
    IndeterminateMembership,
    MarkovModel,
    NumericPolicy,
    build_example,
    check_region,
    enumerate_regions,
    exact,
    forced_members,
    intersection_oracle,
    optimal_values,
    pseudo,
    relaxed_value_cascade,
    relaxed_values,
    shifted_model,
    smallest_equilibrium,
)
from eqstop.value import constrained_sup_bounds_all
from generators import random_model


@pytest.fixture(scope="module")
def ex33():
    return build_example("ex-3.3", n_grid=(2, 5, 10, 100, 1000))


def _zero_reward_model():
    rng = np.random.default_rng(5)
    model = random_model(rng, index=0, n=3)
    return model.with_reward(np.zeros(3))


class TestCheckRegion:
    def test_limit_singleton_holds(self, ex33):
        verdict = check_region(ex33.limit, ["a"], exact(0.0))
        assert verdict.holds
        assert verdict.witnesses == ()

    def test_full_space_pseudo_vacuous(self, ex33):
        m = ex33.member(10)
        assert check_region(m, m.labels, pseudo(0.0)).holds
        assert check_region(m, m.labels, pseudo(2.5)).holds

    def test_boundary_equality_passes_weak_inequality(self, ex33):
        # at finite n the outside condition at c holds with equality
        # (reward 0.5 against a one-step committed payoff 0.5)
        verdict = check_region(ex33.member(10), ["a", "b"], exact(0.0))
        assert verdict.holds

    def test_fails_with_outside_witness(self, ex33):
        m = ex33.member(10)
        verdict = check_region(m, ["a"], exact(0.0))
        assert verdict.status == "fails"
        (w,) = verdict.witnesses
        assert w.state == "b" and w.side == "outside"
        assert w.margin.lo > 0.0  # certified violation

    def test_fails_with_inside_witness(self, ex33):
        # {a, c} at the limit: from c the committed payoff 2/3 beats 0.5
        verdict = check_region(ex33.limit, ["a", "c"], exact(0.0))
        assert verdict.status == "fails"
        assert any(w.state == "c" and w.side == "inside" for w in verdict.witnesses)

    def test_pseudo_ignores_inside_condition(self, ex33):
        assert check_region(ex33.limit, ["a", "c"], pseudo(0.0)).holds

    def test_eps_relaxation_turns_fail_into_hold(self, ex33):
        m = ex33.member(1000)
        assert check_region(m, ["a"], exact(0.0)).status == "fails"
        assert check_region(m, ["a"], exact(0.01)).holds


class TestEnumerate:
    def test_limit_catalog(self, ex33):
        cat = enumerate_regions(ex33.limit, exact(0.0))
        regions = {tuple(ex33.limit.region_labels(r)) for r in cat.regions}
        assert regions == {("a",), ("a", "b"), ("a", "b", "c")}
        assert not cat.indeterminate

    def test_finite_n_catalog(self, ex33):
        m = ex33.member(5)
        cat = enumerate_regions(m, exact(0.0))
        regions = {tuple(m.region_labels(r)) for r in cat.regions}
        assert regions == {("a", "b"), ("a", "b", "c")}

    def test_zero_reward_everything_holds(self):
        model = _zero_reward_model()
        for kind in (exact(0.0), pseudo(0.0), exact(0.3), pseudo(0.3)):
            cat = enumerate_regions(model, kind)
            assert len(cat.regions) == 2**model.n

    def test_enumeration_cap(self):
        rng = np.random.default_rng(0)
        model = random_model(rng, index=0, n=4).with_policy(NumericPolicy(enum_cap=3))
        with pytest.raises(EnumerationTooLarge):
            enumerate_regions(model, exact(0.0))


class TestSmallestEquilibrium:
    def test_limit_iteration_trace(self, ex33):
        region, trace = smallest_equilibrium(ex33.limit)
        assert ex33.limit.region_labels(region) == ("a",)
        assert trace.rounds[0].added == ("a",)
        lo, hi = trace.rounds[0].bounds["a"]
        assert (lo, hi) == (1.0, 1.0)

    def test_finite_n_stops_at_boundary_equality(self, ex33):
        m = ex33.member(100)
        region, _ = smallest_equilibrium(m)
        assert m.region_labels(region) == ("a", "b")

    def test_zero_reward_empty(self):
        model = _zero_reward_model()
        region, _ = smallest_equilibrium(model)
        assert region == frozenset()

    def test_indeterminate_membership_reported(self):
        # reward placed in the middle of a deviation-value enclosure that
        # cannot tighten within a tiny horizon cap
        base = MarkovModel(
            labels=("u", "v"),
            kernel=[[0.5, 0.5], [0.5, 0.5]],
            reward=[2.0, 1.0],
            discount=DiscountFunction("hyperbolic", {"beta": 1.0}),
            policy=NumericPolicy(t_max=8),
        )
        lo, hi = constrained_sup_bounds_all(base, np.zeros(2, dtype=np.uint8), 8)
        mid = 0.5 * (lo[0, 1] + hi[0, 1])
        assert hi[0, 1] - lo[0, 1] > 2e-9
        model = base.with_reward([2.0, mid])
        with pytest.raises(IndeterminateMembership) as err:
            smallest_equilibrium(model)
        assert err.value.state_label == "v"
        assert err.value.interval.lo <= mid <= err.value.interval.hi

    def test_is_equilibrium_and_least(self, ex33):
        for n in (2, 10):
            m = ex33.member(n)
            region, _ = smallest_equilibrium(m)
            assert check_region(m, region, exact(0.0)).holds
            assert region == intersection_oracle(m, exact(0.0))


class TestIntersectionOracle:
    def test_limit_both_kinds(self, ex33):
        lim = ex33.limit
        assert lim.region_labels(intersection_oracle(lim, exact(0.0))) == ("a",)
        assert lim.region_labels(intersection_oracle(lim, pseudo(0.0))) == ("a",)

    def test_zero_reward_empty_intersection(self):
        model = _zero_reward_model()
        assert intersection_oracle(model, exact(0.0)) == frozenset()
        assert intersection_oracle(model, pseudo(0.0)) == frozenset()


class TestOptimalAndRelaxedValues:
    def test_optimal_values_match_committed_payoffs(self, ex33):
        lim = ex33.limit
        values = optimal_values(lim)
        assert values["c"].midpoint == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert values["a"].lo == values["a"].hi == 2.0
        m = ex33.member(10)
        assert optimal_values(m)["c"].midpoint == pytest.approx(0.5, abs=1e-9)

    def test_zero_eps_reduces_to_optimal(self, ex33):
        lim = ex33.limit
        rel = relaxed_values(lim, 0.0)
        opt = optimal_values(lim)
        for x in lim.labels:
            assert rel.v_eps[x].midpoint == pytest.approx(opt[x].midpoint, abs=1e-9)
            assert rel.w_eps[x].midpoint == pytest.approx(opt[x].midpoint, abs=1e-9)

    def test_monotone_in_eps(self, ex33):
        m = ex33.member(10)
        values = [relaxed_values(m, e).v_eps["c"].midpoint for e in (0.0, 0.05, 0.2)]
        assert values == sorted(values)

    def test_relaxed_recovers_limit_value_near_two_thirds(self, ex33):
        m = ex33.member(1000)
        rel = relaxed_values(m, 0.01)
        assert rel.v_eps["c"].midpoint == pytest.approx(2.0 / 3.0, abs=0.02)
        assert rel.w_eps["c"].midpoint == pytest.approx(2.0 / 3.0, abs=0.02)
        assert rel.v_argmax["c"] == m.region(["a"])


class TestShiftedModel:
    def test_identity_at_zero(self, ex33):
        m = shifted_model(ex33.limit, 0.0)
        assert np.array_equal(m.reward, ex33.limit.reward)

    def test_componentwise_clamp(self, ex33):
        m = shifted_model(ex33.limit, 0.6)
        assert np.allclose(m.reward, [1.4, 0.4, 0.0])

    def test_full_clamp(self, ex33):
        m = shifted_model(ex33.limit, 3.0)
        assert np.allclose(m.reward, 0.0)

    def test_negative_eps_rejected(self, ex33):
        with pytest.raises(ValueError):
            shifted_model(ex33.limit, -0.1)


class TestForcedCascade:
    def test_zero_eps_matches_smallest_equilibrium(self, ex33):
        for model in (ex33.limit, ex33.member(10)):
            forced, _ = forced_members(model, 0.0)
            region, _ = smallest_equilibrium(model)
            assert forced == region

    def test_ladder_cascade_forces_prefix(self):
        seq = build_example("ex-4.10", n_grid=(6,), N=12)
        model = seq.member(6)
        forced, _ = forced_members(model, 0.002)
        labels = set(model.region_labels(forced))
        assert labels == {f"x_{i}" for i in range(7)} | {"y"}

    def test_cascade_value_certificate(self):
        seq = build_example("ex-4.10", n_grid=(6,), N=12)
        model = seq.member(6)
        for variant in ("exact", "pseudo"):
            interval, info = relaxed_value_cascade(model, "x_0", 0.002, variant)
            assert interval is not None
            assert interval.lo == interval.hi == 1.0
            assert info["witness"] is not None

    def test_cascade_declines_uncovered_state(self):
        seq = build_example("ex-4.10", n_grid=(6,), N=12)
        model = seq.member(6)
        interval, info = relaxed_value_cascade(model, "x_10", 0.002, "exact")
        assert interval is None
        assert "x_10" not in info["forced"]

    def test_large_eps_forces_nothing(self, ex33):
        forced, _ = forced_members(ex33.limit, 10.0)
        assert forced == frozenset()
