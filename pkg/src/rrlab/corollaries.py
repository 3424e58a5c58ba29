"""Specialised regions: algebraic identity checks and inclusion harnesses.

Inclusion checks sample a distribution of the specialised scheme, compute
its region, map the same distribution into the full coding scheme (null
auxiliaries become constants, identified variables become copies) and test
that every specialised vertex lies in the full region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import ChannelSpec, degrade_channel, random_channel
from .distributions import assemble_joint, default_cards, sample_factored
from .errors import IncompatibleChannel, SchemeMismatch, ValidationError
from .info import JointPmf, add_copy, cond_mutual_info, cond_mutual_info_raw, entropy, expand, marginalize, rename, reorder
from .region import (
    TOL_GEO,
    RatePolytope,
    build_rate_system,
    compute_info_terms,
    compute_mode_terms,
    containment_violations,
    hausdorff,
    region_polytope,
)
from .region.terms import CHU_AS_RSUB, MODE_TERMS, eval_cmi, eval_expr

FULL_ORDER = ("U1p", "U1", "V1", "U2p", "U2", "V12", "V2", "X1", "X2", "X3", "Y1", "Y2", "Y2h")
TOL_ID = 1e-8


# -- identity suite -------------------------------------------------------

@dataclass
class IdentityReport:
    scheme: str
    equalities: dict[str, float]
    slacks: dict[str, float | None]
    notes: list[str] = field(default_factory=list)
    tol: float = TOL_ID

    @property
    def flagged(self) -> list[str]:
        bad = [k for k, v in self.equalities.items() if v >= self.tol]
        bad += [k for k, v in self.slacks.items() if v is not None and v < -self.tol]
        return bad

    @property
    def passed(self) -> bool:
        return not self.flagged

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "equalities": self.equalities, "slacks": self.slacks,
                "flagged": self.flagged, "notes": self.notes}


def _require(p: JointPmf, names, scheme):
    missing = [v for v in names if v not in p]
    if missing:
        raise SchemeMismatch(f"joint lacks {missing} required by scheme {scheme}")


def _rsub_identities(p: JointPmf, roles) -> IdentityReport:
    I = lambda t: eval_cmi(p, t, roles)  # noqa: E731
    eq = {
        # conditioning on U2 under U2 - (X3,U1,X1) - V2
        "private_cond_drop": abs(I("X1;V2|X3,U1,U2") - (I("X1;V2|X3,U1") - I("U2;V2|X3,U1"))),
        "pair_split": abs(I("X1;U2,V2|X3,U1") - (I("X1;U2|X3,U1") + I("X1;V2|X3,U1") - I("U2;V2|X3,U1"))),
    }
    for k in "abcdefg":
        eq[f"rewrite_{k}"] = abs(eval_expr(p, MODE_TERMS["rsub"][k], roles)
                                 - eval_expr(p, MODE_TERMS["rsub_rewritten"][k], roles))
    return IdentityReport("rsub", eq, {})


def _pcrbc_identities(p: JointPmf) -> IdentityReport:
    I = lambda t: eval_cmi(p, t)  # noqa: E731
    W = "U2p,U2,X3"
    quant = I(f"Y2;Y2h|{W}")
    eq = {
        "quant_markov": abs(quant - I(f"Y1,Y2;Y2h|{W}")),
        "quant_chain": abs(I(f"Y1,Y2;Y2h|{W}") - I(f"Y1;Y2h|{W}") - I(f"Y2;Y2h|{W},Y1")),
        "x3_entropy": abs(entropy(p, ["X3", "U2p", "U2", "V12"]) - entropy(p, ["U2p", "U2", "V12"])
                          - entropy(p, ["X3", "U2p", "U2"]) + entropy(p, ["U2p", "U2"])),
        "fwd_chain": abs(I(f"Y2h;V12,Y1|{W}") - I(f"Y2h;Y1|{W}") - I(f"Y2h;V12|{W},Y1")),
        "common_telescope": abs(
            I(f"Y2h;V12,Y1|{W}") - quant + I(f"Y1;{W},V12")
            - (I(f"Y1;{W},Y2h") - quant) - I(f"Y1,Y2h;V12|{W}")
        ),
        "relay_gap_identity": abs(
            I("Y1;V12,X3|U2p,U2") + I(f"Y2h;V12,Y1|{W}") - quant - I(f"Y1,Y2h;V12|{W}")
            - (I("X3;Y1|U2p,U2") - I(f"Y2;Y2h|{W},Y1"))
        ),
    }
    slack = {
        "x3_link_bound": I("Y1;X3|U2p,U2,V12") - I("Y1;X3|U2p,U2"),
        "fwd_bound": I(f"Y2h;V12,Y1|{W}") - I(f"Y2h;Y1|{W}"),
    }
    notes = []
    tighter = I(f"Y2;Y2h|{W},Y1") <= I("Y1;X3|U2p,U2") + TOL_ID
    if tighter:
        slack["relay_gap"] = (I("Y1;V12,X3|U2p,U2") + I(f"Y2h;V12,Y1|{W}") - quant
                              - I(f"Y1,Y2h;V12|{W}"))
    else:
        slack["relay_gap"] = None
        notes.append("tightened relay condition fails; relay_gap bound not applicable")
    return IdentityReport("pcrbc", eq, slack, notes)


def identity_suite(p: JointPmf, scheme: str) -> IdentityReport:
    """Residuals of the equalities and slacks of the inequalities behind
    the specialised-region rewrites.

    ``scheme`` is ``rsub``, ``chu`` (rsub identities with chu variables) or
    ``pcrbc``.  Violations are reported, never raised.
    """
    if scheme == "rsub":
        _require(p, ("X3", "U1", "X1", "U2", "V2", "Y1", "Y2"), scheme)
        return _rsub_identities(p, None)
    if scheme == "chu":
        _require(p, ("Tp", "V", "Sp", "W", "U", "Y1", "Y2"), scheme)
        rep = _rsub_identities(p, CHU_AS_RSUB)
        rep.scheme = "chu"
        return rep
    if scheme == "pcrbc":
        _require(p, ("U2p", "U2", "V12", "X3", "Y1", "Y2", "Y2h"), scheme)
        return _pcrbc_identities(p)
    raise SchemeMismatch(f"no identity suite for scheme {scheme!r}")


# -- mapping specialised distributions into the full scheme ---------------

def _to_full(p: JointPmf) -> JointPmf:
    missing = [v for v in FULL_ORDER if v not in p]
    return reorder(expand(p, missing), FULL_ORDER)


def chu_to_full(p: JointPmf) -> JointPmf:
    q = rename(p, {"Tp": "U1p", "V": "U1", "Sp": "V1", "W": "U2", "U": "V2"})
    return _to_full(q)


def rsub_to_full(p: JointPmf) -> JointPmf:
    q = add_copy(add_copy(p, "X3", "U1p"), "X1", "V1")
    return _to_full(q)


def pcrbc_to_full(p: JointPmf) -> JointPmf:
    return _to_full(p)


def drop_constants(p: JointPmf, names) -> JointPmf:
    """Remove cardinality-1 variables from ``p``."""
    for v in names:
        if p.card(v) != 1:
            raise ValidationError(f"{v} has cardinality {p.card(v)}, cannot drop it")
    return marginalize(p, [v for v in p.vars if v not in set(names)])


# -- inclusion harness ----------------------------------------------------

@dataclass
class Violation:
    distribution: str
    check: str
    vertex: tuple | None
    halfplane: tuple | None
    slack: float

    def to_dict(self) -> dict:
        return {"distribution": self.distribution, "check": self.check,
                "vertex": list(self.vertex) if self.vertex else None,
                "halfplane": list(self.halfplane) if self.halfplane else None, "slack": self.slack}


@dataclass
class InclusionReport:
    corollary: int
    samples: int
    violations: list[Violation] = field(default_factory=list)
    nonempty: int = 0
    checks: int = 0
    tol: float = TOL_GEO

    @property
    def verdict(self) -> str:
        return "holds" if not self.violations else "violated"

    def to_dict(self) -> dict:
        return {"corollary": self.corollary, "samples": self.samples, "checks": self.checks,
                "nonempty_specialised": self.nonempty, "verdict": self.verdict,
                "violations": [v.to_dict() for v in self.violations]}


def _contain(rep: InclusionReport, label: str, check: str, outer: RatePolytope, inner: RatePolytope):
    rep.checks += 1
    for v, h, ex in containment_violations(outer, inner, rep.tol):
        rep.violations.append(Violation(label, check, v, h, -ex))


def _equal(rep: InclusionReport, label: str, check: str, a: RatePolytope, b: RatePolytope):
    rep.checks += 1
    d = hausdorff(a, b)
    if d > rep.tol:
        rep.violations.append(Violation(label, check, None, None, -d))


def _theorem1(p: JointPmf, extra_rows=()) -> RatePolytope:
    ss = build_rate_system(compute_info_terms(p, strict=False), "theorem1")
    if extra_rows:
        from .region.systems import SystemSet
        ss = SystemSet(ss.mode, tuple(s.with_rows(extra_rows, name=s.name) for s in ss.systems))
    return region_polytope(ss)


def _mode(p: JointPmf, mode: str, scheme: str) -> RatePolytope:
    return region_polytope(build_rate_system(compute_mode_terms(p, mode, scheme), mode))


REQUIRED_DEGENERATION = {2: None, 3: "cifc", 4: "pcrbc", 5: "pcrbc", 6: "relay"}
_AXIS = {"cifc": "card_x3", "pcrbc": "card_x1", "relay": "card_x2"}


def check_compatible(corollary: int, ch: ChannelSpec) -> None:
    if corollary not in REQUIRED_DEGENERATION:
        raise ValidationError(f"corollary must be one of 2..6, got {corollary}")
    mode = REQUIRED_DEGENERATION[corollary]
    if mode and getattr(ch, _AXIS[mode]) != 1:
        raise IncompatibleChannel(f"corollary {corollary} needs a {mode}-degraded channel ({_AXIS[mode]} = 1)")


def check_inclusion(corollary: int, ch: ChannelSpec, samples: int, seed: int,
                    alpha: float = 1.0, indep_prob: float = 0.5, label: str = "") -> InclusionReport:
    """Run the inclusion harness for one corollary on one channel."""
    check_compatible(corollary, ch)
    rep = InclusionReport(corollary, samples)
    tag = f"{label}seed={seed}"

    if corollary == 2:
        cards = default_cards("chu", ch)
        for fd in sample_factored("chu", cards, samples, seed, alpha, indep_prob):
            p = assemble_joint(fd, ch)
            lab = f"{tag},chu:{fd.label}"
            chu = _mode(p, "chu", "chu")
            rs = _mode(p, "rsub", "chu")
            rw = _mode(p, "rsub_rewritten", "chu")
            full = _theorem1(chu_to_full(p))
            rep.nonempty += not chu.is_empty
            _equal(rep, lab, "rsub==rewritten", rs, rw)
            _contain(rep, lab, "chu<=rewritten", rw, chu)
            _contain(rep, lab, "chu<=theorem1", full, chu)
        cards = default_cards("rsub", ch)
        for fd in sample_factored("rsub", cards, samples, seed, alpha, indep_prob):
            p = assemble_joint(fd, ch)
            lab = f"{tag},rsub:{fd.label}"
            rs = _mode(p, "rsub", "rsub")
            rw = _mode(p, "rsub_rewritten", "rsub")
            full = _theorem1(rsub_to_full(p))
            _equal(rep, lab, "rsub==rewritten", rs, rw)
            _equal(rep, lab, "rsub==theorem1_base", rs, region_polytope(
                build_rate_system(compute_info_terms(rsub_to_full(p)), "theorem1", drop_rules=False)))
            _contain(rep, lab, "rsub<=theorem1", full, rs)
        return rep

    if corollary in (3, 6):
        nulls = ("U1p", "U2p", "X3", "Y2h") if corollary == 3 else ("U2p", "U2", "V12", "V2", "X2")
        zero = () if corollary == 3 else [({"R2P": 1}, "<=", 0.0, "zero_R2P"), ({"R22": 1}, "<=", 0.0, "zero_R22")]
        cards = default_cards("theorem1", ch, {v: 1 for v in nulls})
        for fd in sample_factored("theorem1", cards, samples, seed, alpha, indep_prob):
            full_p = assemble_joint(fd, ch)
            lab = f"{tag},theorem1:{fd.label}"
            special = _theorem1(drop_constants(full_p, nulls), zero)
            rep.nonempty += not special.is_empty
            _contain(rep, lab, "special<=theorem1", _theorem1(full_p), special)
        return rep

    cards = default_cards("pcrbc", ch)
    for fd in sample_factored("pcrbc", cards, samples, seed, alpha, indep_prob):
        p = assemble_joint(fd, ch)
        lab = f"{tag},pcrbc:{fd.label}"
        pc = _mode(p, "pcrbc", "pcrbc")
        full = _theorem1(pcrbc_to_full(p))
        rep.nonempty += not pc.is_empty
        _contain(rep, lab, "pcrbc<=theorem1", full, pc)
        if corollary == 5:
            br = _mode(p, "bross", "pcrbc")
            _contain(rep, lab, "bross<=pcrbc", pc, br)
            _contain(rep, lab, "bross<=theorem1", full, br)
    return rep


def random_compatible_channel(corollary: int, rng: np.random.Generator, cards=(2, 2, 2, 2, 2),
                              alpha: float = 1.0) -> ChannelSpec:
    ch = random_channel(rng, cards, alpha)
    mode = REQUIRED_DEGENERATION[corollary]
    return degrade_channel(ch, mode) if mode else ch
