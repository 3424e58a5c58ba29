import numpy as np
import pytest

from rrlab.channel import random_channel
from rrlab.corollaries import (
    check_compatible,
    check_inclusion,
    identity_suite,
    pcrbc_to_full,
    random_compatible_channel,
    rsub_to_full,
)
from rrlab.distributions import assemble_joint, default_cards, sample_factored, verify_factorization
from rrlab.errors import IncompatibleChannel, SchemeMismatch
from rrlab.info import add_copy, marginalize

CH = random_channel(np.random.default_rng(8))


def _joints(scheme, ch=CH, n=8, seed=0):
    cards = default_cards(scheme, ch)
    return [assemble_joint(fd, ch) for fd in sample_factored(scheme, cards, n, seed, indep_prob=0.5)]


@pytest.mark.parametrize("scheme", ["rsub", "chu", "pcrbc"])
def test_identities_hold_on_sampled_distributions(scheme):
    ch = random_compatible_channel(4, np.random.default_rng(1)) if scheme == "pcrbc" else CH
    for p in _joints(scheme, ch):
        rep = identity_suite(p, scheme)
        assert rep.passed, rep.flagged
        assert all(v < 1e-8 for v in rep.equalities.values())


def test_relay_gap_needs_the_tightened_condition():
    ch = random_compatible_channel(4, np.random.default_rng(1))
    reps = [identity_suite(p, "pcrbc") for p in _joints("pcrbc", ch, n=20)]
    for r in reps:
        if r.slacks["relay_gap"] is None:
            assert r.notes
        else:
            assert r.slacks["relay_gap"] >= -1e-8


def test_broken_quantiser_markov_chain_is_flagged():
    ch = random_compatible_channel(4, np.random.default_rng(1))
    p = _joints("pcrbc", ch, n=4)[3]
    # replace the quantiser output by a copy of Y1, which breaks Y1 - (.., Y2) - Y2h
    keep = [v for v in p.vars if v != "Y2h"]
    q = add_copy(marginalize(p, keep), "Y1", "Y2h")
    rep = identity_suite(q, "pcrbc")
    assert "quant_markov" in rep.flagged


def test_identity_suite_scheme_errors():
    p = _joints("rsub", n=1)[0]
    with pytest.raises(SchemeMismatch):
        identity_suite(p, "pcrbc")
    with pytest.raises(SchemeMismatch):
        identity_suite(p, "theorem1")


def test_mapped_distributions_respect_the_full_factorization():
    for p in _joints("rsub", n=4):
        assert verify_factorization(rsub_to_full(p), "theorem1").passed
    ch = random_compatible_channel(4, np.random.default_rng(2))
    for p in _joints("pcrbc", ch, n=4):
        assert verify_factorization(pcrbc_to_full(p), "theorem1").passed


@pytest.mark.parametrize("corollary", [2, 3, 4, 5, 6])
def test_inclusions_hold(corollary):
    rng = np.random.default_rng([corollary, 9])
    for i in range(2):
        ch = random_compatible_channel(corollary, rng)
        rep = check_inclusion(corollary, ch, 6, seed=i)
        assert rep.verdict == "holds", rep.to_dict()["violations"][:3]
        assert rep.checks > 0


def test_incompatible_channel_is_refused():
    with pytest.raises(IncompatibleChannel):
        check_compatible(3, CH)
    with pytest.raises(IncompatibleChannel):
        check_inclusion(6, CH, 2, 0)
