"""Rate systems, Fourier-Motzkin projection and 2-D rate polytopes."""

from .polytope import (
    TOL_GEO,
    RatePolytope,
    containment_violations,
    convex_hull,
    hausdorff,
    polygon_from_halfplanes,
    polytope_contains,
    union_hull,
)
from .system import InequalitySystem, eliminate_all, fme_eliminate, project_region, project_system
from .systems import (
    DEFAULT_PROJECTION,
    MODES,
    SystemSet,
    build_rate_system,
    project_variants,
    region_polytope,
)
from .terms import InfoTermSet, ModeTerms, compute_info_terms, compute_mode_terms

__all__ = [
    "TOL_GEO",
    "RatePolytope",
    "containment_violations",
    "convex_hull",
    "hausdorff",
    "polygon_from_halfplanes",
    "polytope_contains",
    "union_hull",
    "InequalitySystem",
    "eliminate_all",
    "fme_eliminate",
    "project_region",
    "project_system",
    "DEFAULT_PROJECTION",
    "MODES",
    "SystemSet",
    "build_rate_system",
    "project_variants",
    "region_polytope",
    "InfoTermSet",
    "ModeTerms",
    "compute_info_terms",
    "compute_mode_terms",
]
