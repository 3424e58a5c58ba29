"""Discrete memoryless two-user channels with a helping receiver.

A channel is the single-letter law ``w[x1, x2, x3, y1, y2] = p(y1, y2 | x1, x2, x3)``
stored densely with index order (x1, x2, x3, y1, y2).  Sender 1 emits X1,
sender 2 (which also knows message 1) emits X2, destination 2 transmits X3 to help destination 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, NegativeEntry, RowSumMismatch, ValidationError

TOL_PMF = 1e-9

DEGRADE_MODES = ("cifc", "pcrbc", "relay")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_cards(cards: Sequence[int]) -> tuple[int, ...]:
    cards = tuple(int(c) for c in cards)
    if any(c < 1 for c in cards):
        raise ValidationError(f"cardinalities must be >= 1, got {cards}")
    return cards


def _check_stochastic(w: np.ndarray, n_cond_axes: int, what: str, tol: float = TOL_PMF) -> None:
    if np.any(w < 0):
        idx = tuple(int(i) for i in np.argwhere(w < 0)[0])
        raise NegativeEntry(f"{what}: negative entry {w[idx]!r} at index {idx}")
    if np.any(w > 1 + tol):
        idx = tuple(int(i) for i in np.argwhere(w > 1 + tol)[0])
        raise ValidationError(f"{what}: entry {w[idx]!r} > 1 at index {idx}")
    sums = w.reshape(w.shape[:n_cond_axes] + (-1,)).sum(axis=-1)
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if len(bad):
        triple = tuple(int(i) for i in bad[0])
        raise RowSumMismatch(
            f"{what}: row {triple} sums to {sums[triple]:.12g}, expected 1", triple
        )


@dataclass(frozen=True)
class ChannelSpec:
    """Validated channel transition tensor.

    ``degraded_z`` records that the tensor was lifted from a
    :class:`ZChannelSpec`, i.e. (X1, X2) - (Y2, X3) - Y1 holds structurally.
    """

    w: np.ndarray
    degraded_z: bool = False
    name: str = ""

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 5:
            raise ValidationError(f"channel tensor must have 5 axes, got {w.ndim}")
        _check_cards(w.shape)
        _check_stochastic(w, 3, "channel")
        object.__setattr__(self, "w", _frozen(w))

    @property
    def cards(self) -> tuple[int, int, int, int, int]:
        return tuple(self.w.shape)  # type: ignore[return-value]

    card_x1 = property(lambda self: self.w.shape[0])
    card_x2 = property(lambda self: self.w.shape[1])
    card_x3 = property(lambda self: self.w.shape[2])
    card_y1 = property(lambda self: self.w.shape[3])
    card_y2 = property(lambda self: self.w.shape[4])

    def flat(self) -> list[float]:
        return [float(v) for v in self.w.ravel()]


@dataclass(frozen=True)
class ZChannelSpec:
    """Factored channel ``w2[x1, x2, x3, y2] * w1[y2, x3, y1]``.

    ``w2`` is p(y2 | x1, x2, x3), ``w1`` is p(y1 | y2, x3).
    """

    w2: np.ndarray
    w1: np.ndarray
    name: str = ""

    def __post_init__(self):
        w2 = np.asarray(self.w2, dtype=float)
        w1 = np.asarray(self.w1, dtype=float)
        if w2.ndim != 4 or w1.ndim != 3:
            raise ValidationError("w2 must have axes (x1,x2,x3,y2) and w1 axes (y2,x3,y1)")
        if w1.shape[0] != w2.shape[3] or w1.shape[1] != w2.shape[2]:
            raise ValidationError(
                f"w1 shape {w1.shape} inconsistent with w2 shape {w2.shape}"
            )
        _check_stochastic(w2, 3, "w2")
        _check_stochastic(w1, 2, "w1")
        object.__setattr__(self, "w2", _frozen(w2))
        object.__setattr__(self, "w1", _frozen(w1))

    @property
    def cards(self) -> tuple[int, int, int, int, int]:
        x1, x2, x3, y2 = self.w2.shape
        return (x1, x2, x3, self.w1.shape[2], y2)


def validate_channel(cards: Sequence[int], flat: Sequence[float], name: str = "") -> ChannelSpec:
    """Build a :class:`ChannelSpec` from alphabet sizes and a row-major flat array.

    Index order of ``flat`` is (x1, x2, x3, y1, y2).
    """
    cards = _check_cards(cards)
    if len(cards) != 5:
        raise ValidationError(f"expected 5 cardinalities, got {len(cards)}")
    arr = np.asarray(flat, dtype=float).ravel()
    expected = int(np.prod(cards))
    if arr.size != expected:
        raise LengthMismatch(f"flat array has {arr.size} entries, expected {expected}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("channel entries must be finite")
    return ChannelSpec(arr.reshape(cards), name=name)


def lift_z_channel(z: ZChannelSpec) -> ChannelSpec:
    w = np.einsum("abcy,ycz->abczy", z.w2, z.w1)
    return ChannelSpec(w, degraded_z=True, name=z.name)


def degrade_channel(ch: ChannelSpec, mode: str) -> ChannelSpec:
    """Pin one input to symbol 0 and drop it to cardinality 1.

    ``cifc`` silences destination 2 (X3), ``pcrbc`` silences sender 1 (X1),
    ``relay`` silences sender 2 (X2).
    """
    axis = {"cifc": 2, "pcrbc": 0, "relay": 1}.get(mode)
    if axis is None:
        raise ValidationError(f"unknown degrade mode {mode!r}; expected one of {DEGRADE_MODES}")
    w = np.take(ch.w, [0], axis=axis)
    return ChannelSpec(w, degraded_z=ch.degraded_z, name=ch.name)


def deterministic_channel(cards: Sequence[int], fn) -> ChannelSpec:
    """Channel with ``(y1, y2) = fn(x1, x2, x3)``."""
    cards = _check_cards(cards)
    w = np.zeros(cards)
    for x1 in range(cards[0]):
        for x2 in range(cards[1]):
            for x3 in range(cards[2]):
                y1, y2 = fn(x1, x2, x3)
                w[x1, x2, x3, y1, y2] = 1.0
    return ChannelSpec(w)


def random_channel(rng: np.random.Generator, cards: Sequence[int] = (2, 2, 2, 2, 2),
                   alpha: float = 1.0) -> ChannelSpec:
    """Rows drawn from a symmetric Dirichlet(alpha) over (y1, y2)."""
    cards = _check_cards(cards)
    raw = rng.exponential(size=cards) if alpha == 1.0 else np.maximum(rng.gamma(alpha, size=cards), 1e-300)
    w = raw / raw.reshape(cards[:3] + (-1,)).sum(-1)[..., None, None]
    return ChannelSpec(w)


def xor_z_channel() -> ZChannelSpec:
    """Binary Z channel with y2 = x1 XOR x2 and y1 = x3."""
    w2 = np.zeros((2, 2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            w2[x1, x2, :, x1 ^ x2] = 1.0
    w1 = np.zeros((2, 2, 2))
    for y2 in range(2):
        for x3 in range(2):
            w1[y2, x3, x3] = 1.0
    return ZChannelSpec(w2, w1, name="xor_z")


def random_z_channel(
    rng: np.random.Generator,
    cards: Sequence[int] = (2, 2, 2, 2, 2),
    y1_depends_on_y2: bool = False,
) -> ZChannelSpec:
    """Random degraded Z channel.

    With ``y1_depends_on_y2=False`` the rows ``w1[y2, x3, :]`` are shared
    across y2, so p(y1 | x1, x2, x3) depends on x3 only and the Z structure
    X2 - (X1, X3) - Y1 holds together with the degradedness chain.  Setting it
    to True draws a general ``w1`` that keeps degradedness but may break the
    Z structure.
    """
    x1, x2, x3, y1, y2 = _check_cards(cards)
    raw2 = rng.exponential(size=(x1, x2, x3, y2))
    w2 = raw2 / raw2.sum(-1, keepdims=True)
    if y1_depends_on_y2:
        raw1 = rng.exponential(size=(y2, x3, y1))
    else:
        raw1 = np.broadcast_to(rng.exponential(size=(1, x3, y1)), (y2, x3, y1))
    w1 = raw1 / raw1.sum(-1, keepdims=True)
    return ZChannelSpec(w2, w1)
