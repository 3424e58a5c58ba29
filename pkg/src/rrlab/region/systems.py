"""Rate-inequality systems for every supported region, and their default
(R1, R2) projections."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import ModeSchemeMismatch
from .polytope import RatePolytope, union_hull
from .system import InequalitySystem, project_system
from .terms import InfoTermSet, ModeTerms

MODES = ("theorem1", "pre_elim", "outer", "corollary1", "rsub", "rsub_rewritten", "chu", "pcrbc", "bross")

FULL_VARS = ("R11", "R1P", "R1B", "R22", "R2P", "Rp1B", "Rp2P", "Rp22")

DEFAULT_PROJECTION: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "theorem1": (("R11", "R1P", "R1B"), ("R22", "R2P")),
    "pre_elim": (("R11", "R1P", "R1B"), ("R22", "R2P")),
    "outer": (("R1",), ("R2",)),
    "corollary1": (("R1",), ("R2",)),
    "rsub": (("R11", "R1P"), ("R2P", "R22")),
    "rsub_rewritten": (("R11", "R1P"), ("R2P", "R22")),
    "chu": (("R11", "R1P"), ("R2P", "R22")),
    "pcrbc": (("R1B",), ("R2P", "R22")),
    "bross": (("R1B",), ("R2P", "R22")),
}

# (row dropped, rates forced to zero) for each of the four relaxations
THEOREM1_DROPS = (
    ("dec1_1", ("R1P", "R11", "R1B", "Rp1B")),
    ("dec1_2", ("R11", "R1B", "Rp1B")),
    ("dec1_3", ("R1B", "Rp1B")),
    ("dec2_1", ("R2P", "Rp2P", "R22", "Rp22")),
)
PRE_ELIM_DROPS = (
    ("dec1_A", ("R1P", "R11", "R1B", "Rp1B")),
    ("dec1_B", ("R11", "R1B", "Rp1B")),
    ("dec1_E", ("R1B", "Rp1B")),
    ("dec2_1", ("R2P", "Rp2P", "R22", "Rp22")),
)


@dataclass(frozen=True)
class SystemSet:
    """A region given as the convex hull of the union of several systems."""

    mode: str
    systems: tuple[InequalitySystem, ...]

    @property
    def base(self) -> InequalitySystem:
        return self.systems[0]

    def __iter__(self):
        return iter(self.systems)

    def __len__(self):
        return len(self.systems)

    def scaled(self, lam: float) -> "SystemSet":
        return SystemSet(self.mode, tuple(s.scaled(lam) for s in self.systems))


def _L(kind: str) -> dict[str, float]:
    return {"1B": {"R1B": 1, "Rp1B": 1}, "2P": {"R2P": 1, "Rp2P": 1}, "22": {"R22": 1, "Rp22": 1}}[kind]


def _sum(*parts) -> dict[str, float]:
    out: dict[str, float] = {}
    for p in parts:
        if isinstance(p, str):
            p = {p: 1}
        for k, v in p.items():
            out[k] = out.get(k, 0) + v
    return out


def _binning_rows(t: InfoTermSet):
    return [
        ({"Rp2P": 1}, ">=", t.a, "gp"),
        ({"Rp22": 1}, ">=", t.marton_b, "marton_b"),
        ({"Rp1B": 1, "Rp22": 1}, ">=", t.marton_c, "marton_c"),
    ]


def _dec2_rows(t: InfoTermSet):
    return [
        (_sum("R1P", _L("2P"), _L("22")), "<=", t.k, "dec2_1"),
        (_sum(_L("2P"), _L("22")), "<=", t.l, "dec2_2"),
        (_L("22"), "<=", t.m, "dec2_3"),
    ]


def _with_drops(base: InequalitySystem, drops) -> list[InequalitySystem]:
    out = [base]
    for k, (label, zeros) in enumerate(drops, start=1):
        s = base.without_rows([label]).with_rows(
            [({v: 1}, "<=", 0.0, f"zero_{v}") for v in zeros], name=f"drop{k}"
        )
        out.append(s)
    return out


def theorem1_system(t: InfoTermSet, drop_rules: bool = True) -> SystemSet:
    a, b, c = t.a, t.b, t.c
    rows = _binning_rows(t) + [
        (_sum("R1P", "R11", _L("2P"), _L("1B")), "<=", a + b + t.d - c, "dec1_1"),
        (_sum("R11", _L("2P"), _L("1B")), "<=", a + b + t.e - c, "dec1_2"),
        (_sum(_L("2P"), _L("1B")), "<=", a + b + t.h - c, "dec1_3"),
        (_sum("R11", _L("1B")), "<=", a + b + t.f - c, "dec1_4a"),
        (_sum("R11", _L("1B")), "<=", a + t.g, "dec1_4b"),
        (_L("1B"), "<=", t.j, "dec1_5a"),
        (_L("1B"), "<=", b + t.i - c, "dec1_5b"),
    ] + _dec2_rows(t)
    base = InequalitySystem.build(FULL_VARS, rows, [("relay", c, t.n_term + b)], name="base")
    return SystemSet("theorem1", tuple(_with_drops(base, THEOREM1_DROPS) if drop_rules else [base]))


def pre_elim_system(t: InfoTermSet, drop_rules: bool = False, separate_x3_rate: bool = False) -> SystemSet:
    """System before the quantisation rate ``Rhat`` is eliminated.

    With ``separate_x3_rate`` the rate of the X3 codebook (``Rbar``) is a
    separate variable used by decoder 1, tied by ``Rbar >= Rhat``.
    """
    a, b = t.a, t.b
    x3 = "Rbar" if separate_x3_rate else "Rhat"
    vars = FULL_VARS + ("Rhat",) + (("Rbar",) if separate_x3_rate else ())
    rows = _binning_rows(t) + [
        ({"Rhat": 1}, ">=", t.c, "quant"),
        (_sum("R1P", "R11", _L("2P"), x3, _L("1B")), "<=", a + b + t.d, "dec1_A"),
        (_sum("R11", _L("2P"), x3, _L("1B")), "<=", a + b + t.e, "dec1_B"),
        (_sum("R11", x3, _L("1B")), "<=", a + b + t.f, "dec1_C"),
        (_sum("R11", _L("1B")), "<=", a + t.g, "dec1_D"),
        (_sum(_L("2P"), x3, _L("1B")), "<=", a + b + t.h, "dec1_E"),
        (_sum(x3, _L("1B")), "<=", b + t.i, "dec1_F"),
        ({x3: 1}, "<=", t.n_term + b, "dec1_G"),
        (_L("1B"), "<=", t.j, "dec1_H"),
    ] + _dec2_rows(t)
    if separate_x3_rate:
        rows.append(({"Rbar": 1, "Rhat": -1}, ">=", 0.0, "x3_index"))
    base = InequalitySystem.build(vars, rows, name="base")
    return SystemSet("pre_elim", tuple(_with_drops(base, PRE_ELIM_DROPS) if drop_rules else [base]))


def _two_rate(mode: str, t: ModeTerms) -> SystemSet:
    rows = [
        ({"R1": 1}, "<=", t["r1"], "r1"),
        ({"R2": 1}, "<=", t["r2"], "r2"),
        ({"R1": 1, "R2": 1}, "<=", t["sum"], "sum"),
    ]
    return SystemSet(mode, (InequalitySystem.build(("R1", "R2"), rows, name=mode),))


def _rsub(mode: str, t: ModeTerms) -> SystemSet:
    rows = [
        ({"R1P": 1, "R11": 1, "R2P": 1}, "<=", t["a"], "A"),
        ({"R11": 1, "R2P": 1}, "<=", t["b"], "B"),
        ({"R2P": 1}, "<=", t["c"], "C"),
        ({"R11": 1}, "<=", t["d"], "D"),
        ({"R1P": 1, "R2P": 1, "R22": 1}, "<=", t["e"], "E"),
        ({"R2P": 1, "R22": 1}, "<=", t["f"], "F"),
        ({"R22": 1}, "<=", t["g"], "G"),
    ]
    return SystemSet(mode, (InequalitySystem.build(("R11", "R1P", "R2P", "R22"), rows, name=mode),))


def _chu(t: ModeTerms) -> SystemSet:
    # R1P plays the role of the relayed-message rate
    pat = {
        "a": ("R1P", "R11", "R2P"), "b": ("R11", "R2P"), "c": ("R11",), "d": ("R2P",),
        "e": ("R1P", "R22", "R2P"), "f": ("R1P", "R22"), "g": ("R1P", "R2P"),
        "h": ("R22", "R2P"), "i": ("R1P",), "j": ("R22",), "k": ("R2P",),
    }
    rows = [({v: 1 for v in vs}, "<=", t[k], k.upper()) for k, vs in pat.items()]
    return SystemSet("chu", (InequalitySystem.build(("R11", "R1P", "R2P", "R22"), rows, name="chu"),))


def _pcrbc(t: ModeTerms, omit_direct_term: bool = False) -> SystemSet:
    l1b = {"R1B": 1, "Rp1B": 1}
    direct = 0.0 if omit_direct_term else t["direct"]
    rows = [
        ({"Rp1B": 1, "Rp22": 1}, ">=", t["marton"], "B"),
        (_sum("R2P", l1b), "<=", t["fwd"] - t["quant"] + direct, "C"),
        (l1b, "<=", t["bcast"], "D1"),
        (l1b, "<=", t["relay_bcast"] + t["fwd"] - t["quant"], "D2"),
        ({"R2P": 1, "R22": 1, "Rp22": 1}, "<=", t["dec2_sum"], "E"),
        ({"R22": 1, "Rp22": 1}, "<=", t["dec2_priv"], "F"),
    ]
    feas = [("G", t["quant"], t["relay_link"] + t["fwd"])]
    vars = ("R1B", "R22", "R2P", "Rp1B", "Rp22")
    return SystemSet("pcrbc", (InequalitySystem.build(vars, rows, feas, name="pcrbc"),))


def _bross(t: ModeTerms) -> SystemSet:
    rows = [
        ({"Rp1B": 1, "Rp22": 1}, ">=", t["marton"], "A"),
        ({"R2P": 1}, "<=", t["common"], "B"),
        ({"R1B": 1, "Rp1B": 1}, "<=", t["bcast"], "C"),
        ({"R2P": 1, "R22": 1, "Rp22": 1}, "<=", t["dec2_sum"], "D"),
        ({"R22": 1, "Rp22": 1}, "<=", t["dec2_priv"], "E"),
    ]
    feas = [("F", t["quant_resid"], t["relay_link"])]
    vars = ("R1B", "R22", "R2P", "Rp1B", "Rp22")
    return SystemSet("bross", (InequalitySystem.build(vars, rows, feas, name="bross"),))


def build_rate_system(terms, mode: str, **opts) -> SystemSet:
    """Assemble the rate system of ``mode`` from evaluated terms.

    ``theorem1`` returns the base system followed by the four relaxed
    variants (each with its zero-rate conditions); pass
    ``drop_rules=False`` for the base system alone.
    """
    if mode not in MODES:
        raise ModeSchemeMismatch(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode in ("theorem1", "pre_elim"):
        if not isinstance(terms, InfoTermSet):
            raise ModeSchemeMismatch(f"mode {mode} needs an InfoTermSet, got {type(terms).__name__}")
        return theorem1_system(terms, **opts) if mode == "theorem1" else pre_elim_system(terms, **opts)
    if not isinstance(terms, ModeTerms) or terms.mode != mode:
        got = getattr(terms, "mode", type(terms).__name__)
        raise ModeSchemeMismatch(f"mode {mode} cannot use terms computed for {got}")
    if mode in ("outer", "corollary1"):
        return _two_rate(mode, terms)
    if mode in ("rsub", "rsub_rewritten"):
        return _rsub(mode, terms)
    if mode == "chu":
        return _chu(terms)
    if mode == "pcrbc":
        return _pcrbc(terms, **opts)
    return _bross(terms)


def project_variants(ss: SystemSet, r1_def: Sequence[str] | None = None,
                     r2_def: Sequence[str] | None = None) -> list[RatePolytope]:
    d1, d2 = DEFAULT_PROJECTION[ss.mode]
    return [project_system(s, r1_def or d1, r2_def or d2) for s in ss.systems]


def region_polytope(ss: SystemSet, r1_def: Sequence[str] | None = None,
                    r2_def: Sequence[str] | None = None) -> RatePolytope:
    return union_hull(project_variants(ss, r1_def, r2_def))
