"""Factored auxiliary-variable distributions.

Each scheme is an ordered list of conditional factors.  A factor tensor has
axes ``parents + children`` and is row-stochastic over the children.  The
channel is a fixed factor p(y1, y2 | x1, x2, x3) supplied separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .channel import ChannelSpec
from .errors import CardinalityMismatch, SignatureMismatch, UnknownScheme, ValidationError
from .info import JointPmf, cond_mutual_info

TOL_PMF = 1e-9
CI_TOL = 1e-8
CHANNEL_VARS = ("X1", "X2", "X3", "Y1", "Y2")


@dataclass(frozen=True)
class Factor:
    children: tuple[str, ...]
    parents: tuple[str, ...]
    kind: str = "free"  # free | det | channel

    @property
    def key(self) -> str:
        return ",".join(self.children) + "|" + ",".join(self.parents)


def _f(children, parents=(), kind="free") -> Factor:
    return Factor(tuple(children.split(",")), tuple(parents.split(",")) if parents else (), kind)


_CHANNEL = _f("Y1,Y2", "X1,X2,X3", "channel")

SCHEMES: dict[str, tuple[Factor, ...]] = {
    "theorem1": (
        _f("U1p"),
        _f("U1", "U1p"),
        _f("V1", "U1p,U1"),
        _f("U2p", "U1p"),
        _f("U2,V12,V2", "U1p,U1,V1,U2p"),
        _f("X1", "U1p,U1,V1"),
        _f("X2", "U1p,U1,V1,U2p,U2,V12,V2"),
        _f("X3", "U1p,U2p"),
        _CHANNEL,
        _f("Y2h", "U1p,U1,U2p,U2,X3,Y2"),
    ),
    "corollary1": (
        _f("X1,X2,X3"),
        _CHANNEL,
    ),
    "rsub": (
        _f("X3"),
        _f("U1", "X3"),
        _f("X1", "X3,U1"),
        _f("U2", "X3,U1,X1"),
        _f("V2", "X3,U1,X1"),
        _f("X2", "X3,U1,X1,U2,V2"),
        _CHANNEL,
    ),
    # Tp = (T, X3) and Sp = (S, X1); X3 and X1 are read off deterministically.
    "chu": (
        _f("Tp"),
        _f("V", "Tp"),
        _f("Sp", "V,Tp"),
        _f("W", "Sp,V,Tp"),
        _f("U", "Sp,V,Tp"),
        _f("X2", "U,W,Sp,V,Tp"),
        _f("X1", "Sp", "det"),
        _f("X3", "Tp", "det"),
        _CHANNEL,
    ),
    "pcrbc": (
        _f("U2p"),
        _f("U2,V12,V2", "U2p"),
        _f("X2", "U2p,U2,V12,V2"),
        _f("X1"),
        _f("X3", "U2p"),
        _CHANNEL,
        _f("Y2h", "U2p,U2,X3,Y2"),
    ),
}


def scheme_factors(scheme: str) -> tuple[Factor, ...]:
    try:
        return SCHEMES[scheme]
    except KeyError:
        raise UnknownScheme(f"unknown scheme {scheme!r}; expected one of {sorted(SCHEMES)}") from None


def scheme_vars(scheme: str) -> tuple[str, ...]:
    out: list[str] = []
    for f in scheme_factors(scheme):
        out.extend(c for c in f.children if c not in out)
    return tuple(out)


def default_cards(scheme: str, ch: ChannelSpec, overrides: Mapping[str, int] | None = None) -> dict[str, int]:
    """Binary auxiliaries by default; channel variables follow ``ch``.

    For the chu scheme ``Tp`` and ``Sp`` default to twice the X3 / X1
    alphabet (one extra bit of T and S).
    """
    cards = dict(zip(CHANNEL_VARS, ch.cards))
    for v in scheme_vars(scheme):
        if v in cards:
            continue
        if v == "Tp":
            cards[v] = 2 * ch.card_x3
        elif v == "Sp":
            cards[v] = 2 * ch.card_x1
        else:
            cards[v] = 2
    for k, c in (overrides or {}).items():
        if k in CHANNEL_VARS and cards[k] != c:
            raise CardinalityMismatch(f"override {k}={c} conflicts with channel cardinality {cards[k]}")
        cards[k] = int(c)
    return {v: cards[v] for v in scheme_vars(scheme)}


def _det_tensor(f: Factor, cards: Mapping[str, int]) -> np.ndarray:
    # child = parent mod |child|; used for X1 = f(Sp), X3 = g(Tp)
    (child,), (parent,) = f.children, f.parents
    kp, kc = cards[parent], cards[child]
    t = np.zeros((kp, kc))
    t[np.arange(kp), np.arange(kp) % kc] = 1.0
    return t


@dataclass(frozen=True)
class FactoredDistribution:
    """Factor tensors for one scheme (channel excluded).

    ``factors`` maps :attr:`Factor.key` to an array with axes
    ``parents + children``.
    """

    scheme: str
    cards: Mapping[str, int]
    factors: Mapping[str, np.ndarray]
    label: str = ""

    def __post_init__(self):
        specs = scheme_factors(self.scheme)
        want = {f.key for f in specs if f.kind != "channel"}
        got = set(self.factors)
        if want != got:
            raise SignatureMismatch(
                f"scheme {self.scheme}: factors {sorted(got)} do not match signature {sorted(want)}"
            )
        for v in scheme_vars(self.scheme):
            if v not in self.cards:
                raise CardinalityMismatch(f"missing cardinality for {v}")
        frozen = {}
        for f in specs:
            if f.kind == "channel":
                continue
            t = np.array(self.factors[f.key], dtype=float)
            shape = tuple(self.cards[v] for v in f.parents + f.children)
            if t.shape != shape:
                raise SignatureMismatch(f"factor {f.key}: shape {t.shape}, expected {shape}")
            if np.any(t < 0):
                raise ValidationError(f"factor {f.key} has negative entries")
            rows = t.reshape(int(np.prod(shape[: len(f.parents)], dtype=int)), -1).sum(-1)
            if np.any(np.abs(rows - 1) > TOL_PMF):
                raise ValidationError(f"factor {f.key} is not row-stochastic")
            t.setflags(write=False)
            frozen[f.key] = t
        object.__setattr__(self, "factors", frozen)
        object.__setattr__(self, "cards", dict(self.cards))

    def factor(self, key: str) -> np.ndarray:
        return self.factors[key]

    def with_factor(self, key: str, tensor) -> "FactoredDistribution":
        fs = dict(self.factors)
        if key not in fs:
            raise SignatureMismatch(f"scheme {self.scheme} has no factor {key!r}")
        fs[key] = np.asarray(tensor, dtype=float)
        return FactoredDistribution(self.scheme, self.cards, fs, self.label)


def assemble_joint(fd: FactoredDistribution, ch: ChannelSpec) -> JointPmf:
    """Multiply all factors and the channel into a dense joint pmf."""
    for v, c in zip(CHANNEL_VARS, ch.cards):
        if fd.cards[v] != c:
            raise CardinalityMismatch(f"{v}: distribution has {fd.cards[v]}, channel has {c}")
    order = scheme_vars(fd.scheme)
    pos = {v: i for i, v in enumerate(order)}
    shape = tuple(fd.cards[v] for v in order)
    joint = np.ones(shape)
    for f in scheme_factors(fd.scheme):
        if f.kind == "channel":
            t, axes = ch.w, ("X1", "X2", "X3", "Y1", "Y2")
        else:
            t, axes = fd.factors[f.key], f.parents + f.children
        perm = sorted(range(len(axes)), key=lambda i: pos[axes[i]])
        t = np.transpose(t, perm)
        present = sorted(pos[a] for a in axes)
        bshape = [1] * len(order)
        for ax in present:
            bshape[ax] = shape[ax]
        joint = joint * t.reshape(bshape)
    return JointPmf(order, joint)


def implied_independences(scheme: str) -> list[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]]:
    """Local Markov statements (children, non-parent predecessors, parents)."""
    out = []
    seen: list[str] = []
    for f in scheme_factors(scheme):
        rest = tuple(v for v in seen if v not in f.parents)
        if rest:
            out.append((f.children, rest, f.parents))
        seen.extend(f.children)
    return out


@dataclass
class FactorizationReport:
    scheme: str
    residuals: list[tuple[str, float]]
    tol: float = CI_TOL

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def verify_factorization(p: JointPmf, scheme: str, tol: float = CI_TOL) -> FactorizationReport:
    residuals = []
    for a, b, c in implied_independences(scheme):
        label = f"I({','.join(a)};{','.join(b)}|{','.join(c)})"
        residuals.append((label, cond_mutual_info(p, a, b, c)))
    return FactorizationReport(scheme, residuals, tol)


def _random_factor(rng: np.random.Generator, shape: tuple[int, ...], n_par: int, alpha: float = 1.0) -> np.ndarray:
    # normalised Gamma(alpha) draws give Dirichlet(alpha) rows
    raw = rng.exponential(size=shape) if alpha == 1.0 else rng.gamma(alpha, size=shape)
    raw = np.maximum(raw, 1e-300)
    rows = raw.reshape(shape[:n_par] + (-1,))
    return (rows / rows.sum(-1, keepdims=True)).reshape(shape)


def _product_factor(rng: np.random.Generator, shape: tuple[int, ...], n_par: int, alpha: float) -> np.ndarray:
    # children conditionally independent given the parents
    par = shape[:n_par]
    t = np.ones(par)
    for k, c in enumerate(shape[n_par:]):
        row = _random_factor(rng, par + (c,), n_par, alpha)
        t = t[..., None] * row.reshape(par + (1,) * k + (c,))
    return t


def _deterministic_factor(shape: tuple[int, ...], n_par: int) -> np.ndarray:
    # each child symbol = (sum of parent symbols) mod |child|
    t = np.zeros(shape)
    par_shape, ch_shape = shape[:n_par], shape[n_par:]
    for pidx in np.ndindex(*par_shape) if par_shape else [()]:
        s = sum(pidx)
        cidx = tuple(s % k for k in ch_shape)
        t[pidx + cidx] = 1.0
    return t


def sample_one(scheme: str, cards: Mapping[str, int], seed: int, index: int, kind: str = "random",
               alpha: float = 1.0, indep_prob: float = 0.0) -> FactoredDistribution:
    rng = np.random.default_rng([seed, index])
    factors = {}
    for f in scheme_factors(scheme):
        if f.kind == "channel":
            continue
        shape = tuple(cards[v] for v in f.parents + f.children)
        n_par = len(f.parents)
        if f.kind == "det":
            factors[f.key] = _det_tensor(f, cards)
        elif kind == "uniform":
            factors[f.key] = np.full(shape, 1.0 / np.prod(shape[n_par:]))
        elif kind == "deterministic":
            factors[f.key] = _deterministic_factor(shape, n_par)
        else:
            t = _random_factor(rng, shape, n_par, alpha)
            # the uniform draws are taken even when unused so streams stay aligned
            split, share = rng.random(), rng.random()
            if split < indep_prob and len(f.children) > 1:
                t = _product_factor(rng, shape, n_par, alpha)
            if share < indep_prob and n_par:
                t = np.broadcast_to(t[(0,) * n_par], shape).copy()
            factors[f.key] = t
    return FactoredDistribution(scheme, cards, factors, label=f"seed={seed},index={index},kind={kind}")


def sample_factored(scheme: str, cards: Mapping[str, int], count: int, seed: int,
                    alpha: float = 1.0, indep_prob: float = 0.0) -> list[FactoredDistribution]:
    """``count`` distributions, deterministic in ``seed``.

    Sample ``index`` depends only on ``(seed, index)``.  With ``count >= 3``
    index 0 is all-uniform and index 1 all-deterministic.  ``alpha`` is the
    symmetric Dirichlet concentration of random rows; values below 1 favour
    near-deterministic factors.  With probability ``indep_prob`` a random
    factor ignores its parents (one row shared by all parent values), which
    switches off the binning or quantisation cost that factor would create.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    if alpha <= 0:
        raise ValidationError("alpha must be positive")
    scheme_factors(scheme)
    out = []
    for i in range(count):
        kind = "random"
        if count >= 3 and i == 0:
            kind = "uniform"
        elif count >= 3 and i == 1:
            kind = "deterministic"
        out.append(sample_one(scheme, cards, seed, i, kind, alpha, indep_prob))
    return out
