import dataclasses
import math

import numpy as np
import pytest
from scipy.stats import multinomial

from rrlab.channel import random_channel
from rrlab.covering import (
    TypicalityConfig,
    binning_example,
    count_bounds,
    covering_experiment,
    covering_threshold,
    log_box_prob,
    success_prob,
    typicality_test,
)
from rrlab.distributions import assemble_joint
from rrlab.errors import IndexSpaceTooLarge, LengthMismatch, ValidationError
from rrlab.info import JointPmf
from oracles import h2

CH = random_channel(np.random.default_rng(0))


def test_typicality_test():
    p = JointPmf(("X", "Y"), [[0.4, 0.1], [0.0, 0.5]])
    cfg = TypicalityConfig(0.1, 20)
    x = [0] * 10 + [1] * 10
    y = [0] * 8 + [1] * 2 + [1] * 10
    assert typicality_test([x, y], p, cfg)
    y_bad = [0] * 6 + [1] * 4 + [1] * 10
    assert not typicality_test([x, y_bad], p, cfg)
    # a zero-probability pair must not appear at all
    y_zero = y[:-1] + [0]
    assert not typicality_test([x, y_zero], p, cfg)
    with pytest.raises(LengthMismatch):
        typicality_test([x, y[:-1]], p, cfg)
    with pytest.raises(LengthMismatch):
        typicality_test([x], p, cfg)
    with pytest.raises(ValidationError):
        typicality_test([x, [2] * 20], p, cfg)
    with pytest.raises(ValidationError):
        TypicalityConfig(0.0, 10)


def test_count_bounds():
    lo, hi = count_bounds(np.array([0.5, 0.25, 0.25, 0.0]), 100, 0.1)
    assert list(lo) == [45, 23, 23, 0] and list(hi) == [55, 27, 27, 0]


@pytest.mark.parametrize("N", [0, 1, 5, 9])
def test_box_probability_matches_enumeration(N):
    r = np.array([0.2, 0.5, 0.3])
    lo, hi = np.array([0, 1, 0]), np.array([3, 6, 2])
    ref = 0.0
    for a in range(N + 1):
        for b in range(N + 1 - a):
            c = N - a - b
            if all(lo[i] <= k <= hi[i] for i, k in enumerate((a, b, c))):
                ref += multinomial.pmf([a, b, c], N, r)
    got = log_box_prob(N, r, lo, hi)
    assert (ref == 0 and got == -math.inf) or abs(math.exp(got) - ref) < 1e-12


def test_box_probability_with_zero_mass_symbols():
    assert log_box_prob(4, np.array([1.0, 0.0]), np.array([4, 0]), np.array([4, 0])) == 0.0
    assert log_box_prob(4, np.array([1.0, 0.0]), np.array([3, 1]), np.array([3, 1])) == -math.inf


def test_success_probability():
    q = 0.01
    for bits in (0, 3, 10.5):
        M = math.ceil(2**bits)
        assert abs(success_prob(math.log(q), bits) - (1 - (1 - q) ** M)) < 1e-12
    assert success_prob(-math.inf, 100) == 0.0
    assert success_prob(math.log(1e-300), 2000) == 1.0


def test_thresholds_of_the_example():
    for mode in ("gp", "marton"):
        p = assemble_joint(binning_example(CH, mode, 0.18), CH)
        assert abs(covering_threshold(p, mode) - (1 - h2(0.18))) < 1e-12


def _constant_u2(fd):
    t = np.zeros((2,) * 7)
    t[..., 0, 0, 0] = 1.0
    factors = dict(fd.factors)
    factors["U2,V12,V2|U1p,U1,V1,U2p"] = t
    return dataclasses.replace(fd, factors=factors)


def test_single_candidate_succeeds_when_no_binning_is_needed():
    fd = _constant_u2(binning_example(CH, "gp"))
    assert covering_threshold(assemble_joint(fd, CH), "gp") == 0.0
    res = covering_experiment("gp", fd, CH, 1000, [0.0], 200, seed=1, cfg=TypicalityConfig(0.1, 1000))
    assert res[0].rate_used == 0.0
    assert res[0].success_rate >= 0.95


def test_success_is_monotone_in_rate_with_matched_streams():
    fd = binning_example(CH, "gp", 0.18)
    res = covering_experiment("gp", fd, CH, 400, [-0.1, -0.03, 0.0, 0.03, 0.1], 200, seed=3)
    rates = [r.success_rate for r in res]
    assert rates == sorted(rates)


def test_success_above_threshold_does_not_drop_with_n():
    fd = binning_example(CH, "gp", 0.18)
    lo = covering_experiment("gp", fd, CH, 400, [0.15], 200, seed=4)[0].success_rate
    hi = covering_experiment("gp", fd, CH, 1600, [0.15], 200, seed=4)[0].success_rate
    assert hi >= lo - 0.02


def test_engines_agree_at_small_n():
    fd = binning_example(CH, "gp", 0.18)
    cfg = TypicalityConfig(0.5, 16)
    a = covering_experiment("gp", fd, CH, 16, [-0.2, 0.0, 0.3], 300, 2, cfg, engine="analytic")
    e = covering_experiment("gp", fd, CH, 16, [-0.2, 0.0, 0.3], 300, 2, cfg, engine="exhaustive")
    for x, y in zip(a, e):
        # independent binomial estimates of the same probability
        assert abs(x.success_rate - y.success_rate) < 0.12


def test_analytic_single_candidate_probability_matches_sampling():
    # with rate 0 there is exactly one candidate, so the success rate is q itself
    fd = binning_example(CH, "gp", 0.3)
    cfg = TypicalityConfig(0.3, 30)
    a = covering_experiment("gp", fd, CH, 30, [-1.0], 2000, 5, cfg, engine="analytic")[0]
    e = covering_experiment("gp", fd, CH, 30, [-1.0], 2000, 5, cfg, engine="exhaustive")[0]
    sd = math.sqrt(max(a.success_rate * (1 - a.success_rate), 1e-4) / 2000)
    assert abs(a.success_rate - e.success_rate) < 5 * sd * math.sqrt(2)


def test_marton_with_null_v12_matches_relabelled_gp():
    m = covering_experiment("marton", binning_example(CH, "marton"), CH, 800, [-0.15, 0.0, 0.15], 200, 6)
    g = covering_experiment("gp", binning_example(CH, "gp"), CH, 800, [-0.15, 0.0, 0.15], 200, 6)
    for x, y in zip(m, g):
        assert abs(x.success_rate - y.success_rate) <= 0.05


def test_pair_search_runs():
    fd = binning_example(CH, "marton")
    cfg = TypicalityConfig(0.5, 12)
    res = covering_experiment("marton", fd, CH, 12, [-0.3, 0.4], 60, 1, cfg, r1b=0.2)
    assert res[0].engine == "exhaustive"
    assert res[0].success_rate <= res[1].success_rate


def test_determinism():
    fd = binning_example(CH, "gp")
    a = covering_experiment("gp", fd, CH, 200, [0.0, 0.1], 50, 11)
    b = covering_experiment("gp", fd, CH, 200, [0.0, 0.1], 50, 11)
    assert a == b


def test_index_space_and_argument_errors():
    fd = binning_example(CH, "gp")
    with pytest.raises(IndexSpaceTooLarge):
        covering_experiment("gp", fd, CH, 800, [0.1], 2, 0, engine="exhaustive")
    with pytest.raises(IndexSpaceTooLarge):
        covering_experiment("marton", binning_example(CH, "marton"), CH, 800, [0.1], 2, 0, r1b=0.1)
    with pytest.raises(ValidationError):
        covering_experiment("other", fd, CH, 10, [0.0], 2, 0)
    with pytest.raises(ValidationError):
        covering_experiment("gp", fd, CH, 10, [0.0], 0, 0)
    with pytest.raises(ValidationError):
        covering_experiment("gp", fd, CH, 10, [0.0], 2, 0, engine="fast")
    with pytest.raises(ValidationError):
        binning_example(CH, "gp", 1.5)
