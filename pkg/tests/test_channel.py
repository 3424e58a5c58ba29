import numpy as np
import pytest
from hypothesis import given, strategies as st

from rrlab.capacity import input_joint
from rrlab.channel import (
    ChannelSpec,
    ZChannelSpec,
    degrade_channel,
    deterministic_channel,
    lift_z_channel,
    random_channel,
    random_z_channel,
    validate_channel,
    xor_z_channel,
)
from rrlab.errors import LengthMismatch, NegativeEntry, RowSumMismatch, ValidationError
from rrlab.info import cond_mutual_info


def test_validate_channel_reshapes_in_documented_order():
    cards = (2, 1, 1, 2, 1)
    # x1=0 -> y1=0, x1=1 -> y1=1
    ch = validate_channel(cards, [1, 0, 0, 1])
    assert ch.cards == cards
    assert ch.w[1, 0, 0, 1, 0] == 1.0
    assert ch.flat() == [1.0, 0.0, 0.0, 1.0]


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        validate_channel((2, 2, 2, 2, 2), [0.25] * 31)


def test_negative_entry():
    flat = [0.25] * 32
    flat[0], flat[1] = -0.25, 0.75
    with pytest.raises(NegativeEntry):
        validate_channel((2, 2, 2, 2, 2), flat)


def test_row_sum_mismatch_names_the_triple():
    flat = np.full((2, 2, 2, 2, 2), 0.25)
    flat[1, 0, 1, 0, 0] = 0.5
    with pytest.raises(RowSumMismatch) as ei:
        validate_channel((2, 2, 2, 2, 2), flat.ravel())
    assert ei.value.triple == (1, 0, 1)
    assert ei.value.to_dict()["triple"] == [1, 0, 1]


def test_bad_cardinalities():
    with pytest.raises(ValidationError):
        validate_channel((2, 0, 2, 2, 2), [])
    with pytest.raises(ValidationError):
        validate_channel((2, 2, 2, 2), [0.5] * 16)


def test_channel_is_immutable():
    ch = random_channel(np.random.default_rng(0))
    with pytest.raises(ValueError):
        ch.w[0, 0, 0, 0, 0] = 1.0


def test_xor_z_channel_outputs():
    ch = lift_z_channel(xor_z_channel())
    assert ch.degraded_z
    for x1 in range(2):
        for x2 in range(2):
            for x3 in range(2):
                assert ch.w[x1, x2, x3, x3, x1 ^ x2] == 1.0


def test_deterministic_channel():
    ch = deterministic_channel((2, 2, 2, 2, 2), lambda a, b, c: (a & c, b))
    assert ch.w[1, 0, 1, 1, 0] == 1.0
    assert ch.w.sum() == 8


def test_degrade_channel_pins_one_input():
    ch = random_channel(np.random.default_rng(1), (2, 3, 2, 2, 2))
    d = degrade_channel(ch, "relay")
    assert d.cards == (2, 1, 2, 2, 2)
    np.testing.assert_array_equal(d.w[:, 0], ch.w[:, 0])
    assert degrade_channel(ch, "cifc").card_x3 == 1
    assert degrade_channel(ch, "pcrbc").card_x1 == 1
    with pytest.raises(ValidationError):
        degrade_channel(ch, "other")


def test_z_channel_shape_checks():
    z = xor_z_channel()
    with pytest.raises(ValidationError):
        ZChannelSpec(z.w2, z.w1[:1])
    with pytest.raises(RowSumMismatch):
        ZChannelSpec(z.w2 * 0.5, z.w1)


@given(st.integers(0, 10_000), st.booleans())
def test_lifted_z_channel_is_degraded(seed, y1_dep):
    rng = np.random.default_rng(seed)
    z = random_z_channel(rng, (2, 2, 2, 2, 2), y1_depends_on_y2=y1_dep)
    ch = lift_z_channel(z)
    px = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
    p = input_joint(ch, px)
    assert cond_mutual_info(p, ["Y1"], ["X1", "X2"], ["Y2", "X3"]) < 1e-10
    if not y1_dep:
        assert cond_mutual_info(p, ["X2"], ["Y1"], ["X1", "X3"]) < 1e-10


@given(st.integers(0, 10_000), st.sampled_from([0.3, 1.0, 2.0]))
def test_random_channel_rows_sum_to_one(seed, alpha):
    ch = random_channel(np.random.default_rng(seed), (2, 3, 2, 2, 3), alpha)
    np.testing.assert_allclose(ch.w.sum(axis=(3, 4)), 1.0, atol=1e-12)


def test_channelspec_rejects_wrong_rank():
    with pytest.raises(ValidationError):
        ChannelSpec(np.ones((2, 2)))
