"""Named-variable joint pmfs and exact information quantities (bits)."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import JointTooLarge, NumericIntegrityError, OverlappingSets, UnknownVariable, ValidationError

TOL_PMF = 1e-9
TOL_INFO = 1e-9
MAX_JOINT_SIZE = 2**24


def _as_names(vs) -> tuple[str, ...]:
    if isinstance(vs, str):
        return (vs,)
    return tuple(vs)


class JointPmf:
    """Dense joint pmf over named discrete variables.

    Marginal entropies are memoised per variable subset, so evaluating many
    conditional mutual informations on one pmf stays cheap.
    """

    __slots__ = ("vars", "probs", "_index", "_hcache")

    def __init__(self, vars: Sequence[str], probs, tol: float = TOL_PMF):
        vars = tuple(vars)
        probs = np.array(probs, dtype=float)
        if len(set(vars)) != len(vars):
            raise ValidationError(f"duplicate variable names in {vars}")
        if probs.ndim != len(vars):
            raise ValidationError(f"pmf has {probs.ndim} axes but {len(vars)} variable names")
        if probs.size > MAX_JOINT_SIZE:
            raise JointTooLarge(f"joint size {probs.size} exceeds cap {MAX_JOINT_SIZE}")
        if np.any(probs < -1e-15):
            raise ValidationError("pmf has negative entries")
        probs[probs < 0] = 0.0
        total = probs.sum()
        if abs(total - 1.0) > tol:
            raise ValidationError(f"pmf sums to {total:.12g}, expected 1")
        probs.setflags(write=False)
        self.vars = vars
        self.probs = probs
        self._index = {v: i for i, v in enumerate(vars)}
        self._hcache: dict[frozenset, float] = {}

    @property
    def cards(self) -> tuple[int, ...]:
        return self.probs.shape

    def card(self, var: str) -> int:
        return self.probs.shape[self._axis(var)]

    def _axis(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise UnknownVariable(f"unknown variable {var!r}; pmf has {self.vars}") from None

    def __contains__(self, var: str) -> bool:
        return var in self._index

    def __repr__(self) -> str:
        return f"JointPmf({dict(zip(self.vars, self.cards))})"

    def marginal_array(self, keep: Iterable[str]) -> np.ndarray:
        """Marginal tensor with axes in the order given by ``keep``."""
        keep = _as_names(keep)
        axes = [self._axis(v) for v in keep]
        drop = tuple(i for i in range(len(self.vars)) if i not in axes)
        m = self.probs.sum(axis=drop) if drop else self.probs
        kept_sorted = sorted(axes)
        return np.transpose(m, [kept_sorted.index(a) for a in axes])

    def entropy_of(self, vars: Iterable[str]) -> float:
        key = frozenset(_as_names(vars))
        h = self._hcache.get(key)
        if h is None:
            if not key:
                h = 0.0
            else:
                p = self.marginal_array(sorted(key, key=self._axis)).ravel()
                p = p[p > 0]
                h = float(-(p * np.log2(p)).sum())
            self._hcache[key] = h
        return h


def marginalize(p: JointPmf, keep: Iterable[str]) -> JointPmf:
    keep_set = set(_as_names(keep))
    for v in keep_set:
        p._axis(v)
    ordered = [v for v in p.vars if v in keep_set]
    return JointPmf(ordered, p.marginal_array(ordered))


def entropy(p: JointPmf, vars: Iterable[str]) -> float:
    vars = _as_names(vars)
    for v in vars:
        p._axis(v)
    return p.entropy_of(vars)


def cond_mutual_info_raw(p: JointPmf, a, b, c=()) -> float:
    """I(A;B|C) without clamping."""
    a, b, c = set(_as_names(a)), set(_as_names(b)), set(_as_names(c))
    for v in a | b | c:
        p._axis(v)
    if a & b or a & c or b & c:
        raise OverlappingSets(f"sets must be disjoint: {sorted(a)}, {sorted(b)}, {sorted(c)}")
    h = p.entropy_of
    return h(a | c) + h(b | c) - h(a | b | c) - h(c)


def cond_mutual_info(p: JointPmf, a, b, c=()) -> float:
    """I(A;B|C) in bits; tiny negative round-off is clamped to zero."""
    v = cond_mutual_info_raw(p, a, b, c)
    if v < 0:
        if v < -TOL_INFO:
            raise NumericIntegrityError(f"I({a};{b}|{c}) = {v:.3e} < -{TOL_INFO}")
        return 0.0
    return v


def cmi_partial(p: JointPmf, a, b, c=()) -> float:
    """Like :func:`cond_mutual_info` but variables missing from ``p`` are
    treated as constants (null auxiliaries), i.e. silently dropped."""
    a = [v for v in _as_names(a) if v in p]
    b = [v for v in _as_names(b) if v in p]
    c = [v for v in _as_names(c) if v in p]
    if not a or not b:
        return 0.0
    return cond_mutual_info(p, a, b, c)


def expand(p: JointPmf, new_vars: Sequence[str], order: Sequence[str] | None = None) -> JointPmf:
    """Append cardinality-1 (constant) variables, optionally reordering."""
    vars = p.vars + tuple(new_vars)
    probs = p.probs.reshape(p.cards + (1,) * len(new_vars))
    out = JointPmf(vars, probs)
    if order is not None:
        out = reorder(out, order)
    return out


def reorder(p: JointPmf, order: Sequence[str]) -> JointPmf:
    if set(order) != set(p.vars) or len(order) != len(p.vars):
        raise ValidationError(f"order {order} is not a permutation of {p.vars}")
    return JointPmf(order, np.transpose(p.probs, [p._axis(v) for v in order]))


def rename(p: JointPmf, mapping: dict[str, str]) -> JointPmf:
    return JointPmf([mapping.get(v, v) for v in p.vars], p.probs)


def add_copy(p: JointPmf, source: str, name: str) -> JointPmf:
    """Append a variable ``name`` that is an exact copy of ``source``."""
    k = p.card(source)
    ax = p._axis(source)
    eye = np.eye(k).reshape([k if i == ax else 1 for i in range(len(p.vars))] + [k])
    return JointPmf(p.vars + (name,), p.probs[..., None] * eye)
