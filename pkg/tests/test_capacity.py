from math import comb

import numpy as np
import pytest

from rrlab.capacity import (
    corollary1_region,
    default_inputs,
    input_joint,
    outer_bound_region,
    product_grid,
    simplex_grid,
    verify_theorem3,
)
from rrlab.channel import lift_z_channel, random_channel, random_z_channel, xor_z_channel
from rrlab.errors import NotDegraded, ValidationError
from rrlab.region import polytope_contains


@pytest.mark.parametrize("k,den", [(2, 4), (3, 5), (4, 3)])
def test_simplex_grid_size_and_sums(k, den):
    g = simplex_grid(k, den)
    assert len(g) == comb(den + k - 1, k - 1)
    assert all(abs(p.sum() - 1) < 1e-12 and p.min() >= 0 for p in g)


def test_product_grid_shapes():
    g = product_grid((2, 3, 2), 2)
    assert len(g) == 3 * 6 * 3
    assert g[0].shape == (2, 3, 2)


def test_xor_z_channel_gives_the_unit_triangle():
    rep = verify_theorem3(xor_z_channel(), product_grid((2, 2, 2), 4))
    assert rep.verdict == "coincide"
    verts = sorted((round(x, 9), round(y, 9)) for x, y in rep.inner.vertices)
    assert verts == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]


@pytest.mark.parametrize("seed", range(3))
def test_random_degraded_z_channels_coincide(seed):
    rng = np.random.default_rng(seed)
    z = random_z_channel(rng)
    rep = verify_theorem3(z, default_inputs(lift_z_channel(z), seed, den=2, samples=20))
    assert rep.max_degraded_residual < 1e-8
    assert rep.max_distance < 1e-6


def test_plain_channel_is_refused_unless_forced():
    ch = random_channel(np.random.default_rng(0))
    with pytest.raises(NotDegraded):
        verify_theorem3(ch, product_grid((2, 2, 2), 2))
    rep = verify_theorem3(ch, product_grid((2, 2, 2), 2), force=True)
    assert rep.max_degraded_residual > 1e-6
    with pytest.raises(ValidationError):
        verify_theorem3("nope", [])


def test_z_structure_can_fail_while_degraded():
    z = random_z_channel(np.random.default_rng(5), y1_depends_on_y2=True)
    rep = verify_theorem3(z, product_grid((2, 2, 2), 2))
    assert rep.max_degraded_residual < 1e-8
    assert max(r.z_residual for r in rep.per_distribution) > 1e-6


def test_outer_bound_contains_the_simple_inner_region():
    ch = random_channel(np.random.default_rng(2))
    inputs = default_inputs(ch, 0, den=2, samples=10)
    assert polytope_contains(outer_bound_region(ch, inputs), corollary1_region(ch, inputs))


def test_input_validation():
    ch = random_channel(np.random.default_rng(2))
    with pytest.raises(ValidationError):
        input_joint(ch, np.full((2, 2), 0.25))
    with pytest.raises(ValidationError):
        outer_bound_region(ch, [])
    rep = verify_theorem3(xor_z_channel(), product_grid((2, 2, 2), 1))
    d = rep.to_dict()
    assert d["inputs"] == 8 and d["verdict"] == "coincide"
