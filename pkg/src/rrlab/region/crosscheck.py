"""Compare the eliminated full-scheme region with the one obtained by
projecting the system that still carries the quantisation rate."""

from __future__ import annotations

from dataclasses import dataclass, field

from .polytope import TOL_GEO, RatePolytope, containment_violations, hausdorff, polytope_contains, union_hull
from .systems import build_rate_system, project_variants
from .terms import InfoTermSet


@dataclass
class PathComparison:
    label: str
    direct: RatePolytope
    via_quant_rate: RatePolytope
    direct_contains: bool
    via_contains: bool
    distance: float
    # for each one-sided gap: (variant name, vertex outside the other region, excess)
    witnesses: list = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return self.direct_contains and self.via_contains

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "direct": [list(v) for v in self.direct.vertices],
            "via_quant_rate": [list(v) for v in self.via_quant_rate.vertices],
            "direct_contains_via": self.direct_contains,
            "via_contains_direct": self.via_contains,
            "hausdorff": self.distance,
            "witnesses": [
                {"variant": w[0], "vertex": list(w[1]), "excess": w[2]} for w in self.witnesses
            ],
        }


def compare_paths(terms: InfoTermSet, label: str = "", tol: float = TOL_GEO,
                  pre_elim_drop_rules: bool = False, separate_x3_rate: bool = False) -> PathComparison:
    """Project both systems and test mutual containment.

    When the directly stated region is larger, every vertex it has outside
    the other region is attributed to the system variant that produced it.
    """
    names = [s.name for s in build_rate_system(terms, "theorem1")]
    variants = project_variants(build_rate_system(terms, "theorem1"))
    direct = union_hull(variants)
    via = union_hull(project_variants(build_rate_system(
        terms, "pre_elim", drop_rules=pre_elim_drop_rules, separate_x3_rate=separate_x3_rate)))
    dc = polytope_contains(direct, via, tol)
    vc = polytope_contains(via, direct, tol)
    witnesses = []
    for name, poly in zip(names, variants):
        for v, _, excess in containment_violations(via, poly, tol):
            witnesses.append((name, v, excess))
    if not dc:
        for v, _, excess in containment_violations(direct, via, tol):
            witnesses.append(("pre_elim", v, excess))
    return PathComparison(label, direct, via, dc, vc, hausdorff(direct, via), witnesses)
