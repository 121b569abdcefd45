import math

import numpy as np
import pytest

from eqstop import ModelValidationError, build_example, run_scenario_checks, validate_assumption
from eqstop.repro import EXAMPLE_IDS


@pytest.mark.parametrize("example", EXAMPLE_IDS)
def test_bundled_checks_pass(example):
    seq = build_example(example)
    results = run_scenario_checks(seq)
    bad = [c for c in results if not c.passed]
    assert not bad, [(c.name, c.computed, c.expected) for c in bad]


@pytest.mark.parametrize("example", EXAMPLE_IDS)
def test_members_validate(example):
    seq = build_example(example)
    assert validate_assumption(seq.limit.discount, 128).ok
    for n, model in seq.members.items():
        assert np.allclose(model.kernel.sum(axis=1), 1.0, atol=1e-12)
        assert model.reward.min() >= 0.0


@pytest.mark.parametrize("example", EXAMPLE_IDS)
def test_rebuild_is_bit_identical(example):
    a = build_example(example)
    b = build_example(example)
    assert a.metadata == b.metadata
    for n in a.members:
        assert (a.member(n).kernel == b.member(n).kernel).all()
        assert (a.member(n).reward == b.member(n).reward).all()


def test_unknown_example_rejected():
    with pytest.raises(ModelValidationError):
        build_example("ex-9.9")


def test_invalid_discount_override_rejected():
    with pytest.raises(ModelValidationError):
        build_example("ex-3.3", beta=-2.0)


def test_out_of_range_grid_rejected():
    with pytest.raises(ModelValidationError):
        build_example("ex-3.5", n_grid=(50,), N=40)


def test_ex33_pinned_numbers():
    seq = build_example("ex-3.3")
    lim = seq.limit
    assert lim.reward.tolist() == [2.0, 1.0, 0.5]
    assert lim.discount(1) == pytest.approx(0.5)
    assert lim.discount(2) == pytest.approx(1.0 / 3.0)
    m10 = seq.member(10)
    b = m10.index("b")
    assert m10.kernel[b, m10.index("a")] == pytest.approx(0.9)
    assert m10.kernel[b, b] == pytest.approx(0.1)
    assert math.inf in seq.members


def test_ex34_reward_drift():
    seq = build_example("ex-3.4")
    m = seq.member(10)
    assert m.reward[m.index("c")] == pytest.approx(0.5 + 1.5 / 10)
    assert m.reward[m.index("b")] == pytest.approx(1.1)
    # the kernel never changes along the sequence
    assert (m.kernel == seq.limit.kernel).all()


def test_ex35_geometry():
    seq = build_example("ex-3.5", N=10, n_grid=(3,))
    lim = seq.limit
    assert lim.reward[lim.index("y")] == pytest.approx(4.0)
    assert lim.reward[lim.index("x_inf")] == 1.0
    assert lim.reward[lim.index("x_1")] == pytest.approx(0.5)
    m3 = seq.member(3)
    assert m3.kernel[m3.index("x_1"), m3.index("x_3")] == 1.0
    assert m3.kernel[m3.index("x_3"), m3.index("y")] == 1.0
    assert m3.kernel[m3.index("x_inf"), m3.index("x_3")] == 1.0


def test_ex410_structure_and_tail_bound():
    seq = build_example("ex-4.10", N=12, n_grid=(6,))
    lim = seq.limit
    assert lim.reward[lim.index("y")] == pytest.approx(2.99)
    assert lim.kernel[lim.index("x_12"), lim.index("y")] == 1.0
    m6 = seq.member(6)
    assert m6.kernel[m6.index("x_6"), m6.index("x_6")] == 1.0
    assert m6.kernel[m6.index("x_9"), m6.index("y")] == 1.0
    assert m6.kernel[m6.index("x_2"), m6.index("x_3")] == 0.5
    bound = seq.metadata["truncation_tail_bound"]
    assert bound == pytest.approx(0.5**12 * (1 / 14) * 2.99)


def test_ex33_metadata_records_choices():
    seq = build_example("ex-3.3")
    defaults = seq.metadata["defaults"]
    assert "hyperbolic" in defaults["discount"]
    assert "absorbing" in defaults["row_a"]
    assert seq.metadata["known_discrepancies"]
