"""Outer bound, the simple inner region, and the degraded-Z capacity check."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channel import ChannelSpec, ZChannelSpec, lift_z_channel
from .errors import NotDegraded, ValidationError
from .info import JointPmf, cond_mutual_info
from .region import TOL_GEO, RatePolytope, build_rate_system, compute_mode_terms, hausdorff, region_polytope, union_hull

CHANNEL_ORDER = ("X1", "X2", "X3", "Y1", "Y2")


def simplex_grid(k: int, den: int) -> list[np.ndarray]:
    """All pmfs on ``k`` symbols with entries in multiples of ``1/den``."""
    out = []
    for cut in itertools.combinations(range(den + k - 1), k - 1):
        parts = np.diff((-1,) + cut + (den + k - 1,)) - 1
        out.append(parts / den)
    return out


def product_grid(cards: Sequence[int], den: int) -> list[np.ndarray]:
    """Product-form input pmfs p(x1)p(x2)p(x3) on a simplex grid."""
    grids = [simplex_grid(c, den) for c in cards]
    out = []
    for p1, p2, p3 in itertools.product(*grids):
        out.append(np.einsum("a,b,c->abc", p1, p2, p3))
    return out


def dirichlet_inputs(cards: Sequence[int], count: int, seed: int) -> list[np.ndarray]:
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        raw = rng.exponential(size=tuple(cards))
        out.append(raw / raw.sum())
    return out


def default_inputs(ch: ChannelSpec, seed: int = 0, den: int = 8, samples: int = 200) -> list[np.ndarray]:
    cards = (ch.card_x1, ch.card_x2, ch.card_x3)
    return product_grid(cards, den) + dirichlet_inputs(cards, samples, seed)


def input_joint(ch: ChannelSpec, px) -> JointPmf:
    px = np.asarray(px, dtype=float)
    if px.shape != (ch.card_x1, ch.card_x2, ch.card_x3):
        raise ValidationError(f"input pmf shape {px.shape} does not match channel inputs")
    return JointPmf(CHANNEL_ORDER, px[..., None, None] * ch.w)


def _region(ch: ChannelSpec, inputs: Iterable, mode: str) -> RatePolytope:
    polys = [region_polytope(build_rate_system(compute_mode_terms(input_joint(ch, px), mode), mode))
             for px in inputs]
    if not polys:
        raise ValidationError("need at least one input distribution")
    return union_hull(polys)


def outer_bound_region(ch: ChannelSpec, inputs: Iterable) -> RatePolytope:
    return _region(ch, inputs, "outer")


def corollary1_region(ch: ChannelSpec, inputs: Iterable) -> RatePolytope:
    return _region(ch, inputs, "corollary1")


@dataclass
class InputResult:
    index: int
    inner: RatePolytope
    outer: RatePolytope
    hausdorff: float
    degraded_residual: float  # I(Y1; X1,X2 | Y2,X3)
    z_residual: float  # I(X2; Y1 | X1,X3)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "inner": [list(v) for v in self.inner.vertices],
            "outer": [list(v) for v in self.outer.vertices],
            "hausdorff": self.hausdorff,
            "degraded_residual": self.degraded_residual,
            "z_residual": self.z_residual,
        }


@dataclass
class CapacityReport:
    per_distribution: list[InputResult]
    inner: RatePolytope
    outer: RatePolytope
    tol: float = TOL_GEO

    @property
    def max_distance(self) -> float:
        return max((r.hausdorff for r in self.per_distribution), default=0.0)

    @property
    def max_degraded_residual(self) -> float:
        return max((r.degraded_residual for r in self.per_distribution), default=0.0)

    @property
    def verdict(self) -> str:
        return "coincide" if self.max_distance < self.tol else "gap"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_hausdorff": self.max_distance,
            "max_degraded_residual": self.max_degraded_residual,
            "max_z_residual": max((r.z_residual for r in self.per_distribution), default=0.0),
            "inputs": len(self.per_distribution),
            "inner": [list(v) for v in self.inner.vertices],
            "outer": [list(v) for v in self.outer.vertices],
            "per_distribution": [r.to_dict() for r in self.per_distribution],
        }


def verify_theorem3(z, inputs: Iterable, tol: float = TOL_GEO, force: bool = False) -> CapacityReport:
    """Per input: degradedness residual, Z-structure residual, and the
    Hausdorff distance between the inner and outer per-input polygons.

    ``z`` is a :class:`ZChannelSpec` or a lifted :class:`ChannelSpec`.  A
    channel without the structural degradedness flag is refused unless
    ``force`` is set, in which case the residuals expose the violation.
    """
    if isinstance(z, ZChannelSpec):
        ch = lift_z_channel(z)
    elif isinstance(z, ChannelSpec):
        ch = z
        if not ch.degraded_z and not force:
            raise NotDegraded("channel is not a lifted degraded Z channel (pass force=True to evaluate anyway)")
    else:
        raise ValidationError(f"expected a ZChannelSpec or ChannelSpec, got {type(z).__name__}")
    results = []
    for i, px in enumerate(inputs):
        p = input_joint(ch, px)
        inner = region_polytope(build_rate_system(compute_mode_terms(p, "corollary1"), "corollary1"))
        outer = region_polytope(build_rate_system(compute_mode_terms(p, "outer"), "outer"))
        results.append(InputResult(
            i, inner, outer, hausdorff(inner, outer),
            cond_mutual_info(p, ["Y1"], ["X1", "X2"], ["Y2", "X3"]),
            cond_mutual_info(p, ["X2"], ["Y1"], ["X1", "X3"]),
        ))
    if not results:
        raise ValidationError("need at least one input distribution")
    return CapacityReport(
        results,
        union_hull([r.inner for r in results]),
        union_hull([r.outer for r in results]),
        tol,
    )
