import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import rrlab.info as info
from rrlab.errors import JointTooLarge, NumericIntegrityError, OverlappingSets, UnknownVariable, ValidationError
from rrlab.info import (
    JointPmf,
    add_copy,
    cmi_partial,
    cond_mutual_info,
    entropy,
    expand,
    marginalize,
    rename,
    reorder,
)
from oracles import brute_cmi, h2

NAMES = ("A", "B", "C", "D")


@st.composite
def joint_and_sets(draw):
    k = draw(st.integers(2, 4))
    cards = tuple(draw(st.integers(1, 3)) for _ in range(k))
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    probs = rng.exponential(size=cards)
    if draw(st.booleans()):
        probs[probs < np.median(probs)] = 0.0  # sparse support
    probs /= probs.sum()
    names = NAMES[:k]
    roles = [draw(st.sampled_from("abc-")) for _ in names]
    a = [v for v, r in zip(names, roles) if r == "a"]
    b = [v for v, r in zip(names, roles) if r == "b"]
    c = [v for v, r in zip(names, roles) if r == "c"]
    return JointPmf(names, probs), a, b, c


@given(joint_and_sets())
def test_cmi_matches_brute_force(case):
    p, a, b, c = case
    if not a or not b:
        return
    assert abs(cond_mutual_info(p, a, b, c) - brute_cmi(p.probs, p.vars, a, b, c)) < 1e-9


@given(joint_and_sets())
def test_cmi_symmetry_and_chain_rule(case):
    p, a, b, c = case
    if not a or not b:
        return
    assert abs(cond_mutual_info(p, a, b, c) - cond_mutual_info(p, b, a, c)) < 1e-12
    if len(b) >= 2:
        b1, rest = b[:1], b[1:]
        lhs = cond_mutual_info(p, a, b, c)
        rhs = cond_mutual_info(p, a, b1, c) + cond_mutual_info(p, a, rest, c + b1)
        assert abs(lhs - rhs) < 1e-9


def test_bsc_mutual_information():
    eps = 0.11
    p = JointPmf(("X", "Y"), 0.5 * np.array([[1 - eps, eps], [eps, 1 - eps]]))
    assert abs(cond_mutual_info(p, "X", "Y") - (1 - h2(eps))) < 1e-12
    assert abs(entropy(p, ["X", "Y"]) - (1 + h2(eps))) < 1e-12


def test_independent_variables_have_zero_information():
    p = JointPmf(("X", "Y"), np.outer([0.3, 0.7], [0.2, 0.5, 0.3]))
    assert cond_mutual_info(p, "X", "Y") == 0.0


def test_errors():
    p = JointPmf(("X", "Y"), np.full((2, 2), 0.25))
    with pytest.raises(UnknownVariable):
        cond_mutual_info(p, "X", "Z")
    with pytest.raises(OverlappingSets):
        cond_mutual_info(p, "X", "X")
    with pytest.raises(ValidationError):
        JointPmf(("X",), [0.5, 0.6])
    with pytest.raises(ValidationError):
        JointPmf(("X", "X"), np.full((2, 2), 0.25))
    with pytest.raises(ValidationError):
        JointPmf(("X",), [1.5, -0.5])


def test_joint_too_large(monkeypatch):
    monkeypatch.setattr(info, "MAX_JOINT_SIZE", 8)
    with pytest.raises(JointTooLarge):
        JointPmf(("X", "Y"), np.full((4, 4), 1 / 16))


def test_negative_cmi_is_an_integrity_error():
    p = JointPmf(("X", "Y"), np.full((2, 2), 0.25))
    p._hcache[frozenset({"X", "Y"})] = 3.0  # corrupt the cache on purpose
    with pytest.raises(NumericIntegrityError):
        cond_mutual_info(p, "X", "Y")


def test_cmi_partial_treats_missing_as_constant():
    p = JointPmf(("X", "Y"), 0.5 * np.eye(2))
    assert abs(cmi_partial(p, ["X", "Q"], ["Y"], ["R"]) - 1.0) < 1e-12
    assert cmi_partial(p, ["Q"], ["Y"]) == 0.0


def test_reshaping_helpers():
    rng = np.random.default_rng(3)
    probs = rng.exponential(size=(2, 3, 2))
    p = JointPmf(("A", "B", "C"), probs / probs.sum())
    m = marginalize(p, ["C", "A"])
    assert m.vars == ("A", "C")
    r = reorder(p, ["C", "A", "B"])
    assert abs(cond_mutual_info(r, "A", "B", "C") - cond_mutual_info(p, "A", "B", "C")) < 1e-12
    e = expand(p, ["K"])
    assert e.card("K") == 1 and cond_mutual_info(e, "K", "A") == 0.0
    q = add_copy(p, "B", "B2")
    assert abs(cond_mutual_info(q, "B2", "A") - cond_mutual_info(p, "B", "A")) < 1e-12
    assert abs(entropy(q, ["B", "B2"]) - entropy(p, ["B"])) < 1e-12
    assert rename(p, {"A": "Z"}).vars == ("Z", "B", "C")
    with pytest.raises(ValidationError):
        reorder(p, ["A", "B"])


def test_entropy_is_memoised():
    p = JointPmf(("X",), [0.5, 0.5])
    assert entropy(p, ["X"]) == 1.0
    assert frozenset({"X"}) in p._hcache
    assert math.isclose(p.entropy_of([]), 0.0)
