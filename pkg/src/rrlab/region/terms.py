"""Information terms feeding each rate system.

Terms are written as signed sums of conditional mutual informations in a
small text form, ``"Y1,V1;Y2h|U1p,X3"`` meaning I(Y1,V1; Y2h | U1p,X3).
Evaluation goes through :func:`rrlab.info.cmi_partial`, so variables absent
from the joint are treated as constants (null auxiliaries).  A ``roles``
map renames the symbols in an expression to the joint's variable names.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Mapping

from ..errors import ModeSchemeMismatch
from ..info import JointPmf, cmi_partial, cond_mutual_info

Expr = tuple[tuple[int, str], ...]


def parse_cmi(text: str) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    head, _, cond = text.partition("|")
    a, _, b = head.partition(";")

    def names(s):
        return tuple(x.strip() for x in s.split(",") if x.strip())

    return names(a), names(b), names(cond)


def eval_cmi(p: JointPmf, text: str, roles: Mapping[str, str] | None = None) -> float:
    a, b, c = parse_cmi(text)
    if roles:
        a, b, c = ([roles.get(v, v) for v in s] for s in (a, b, c))
    return cmi_partial(p, a, b, c)


def eval_expr(p: JointPmf, expr, roles: Mapping[str, str] | None = None) -> float:
    """``expr`` is a CMI string or a sequence of ``(sign, CMI string)``."""
    if isinstance(expr, str):
        return eval_cmi(p, expr, roles)
    return float(sum(s * eval_cmi(p, t, roles) for s, t in expr))


# -- full coding scheme ---------------------------------------------------

THEOREM1_TERMS: dict[str, str] = {
    "a": "V1;U2|U1p,U1,U2p",
    "b": "Y1,V1,V12;Y2h|U1p,U1,U2p,U2,X3",
    "c": "Y2;Y2h|U1p,U1,U2p,U2,X3",
    "d": "Y1;U1p,U1,V1,U2p,U2,V12,X3",
    "e": "Y1;V1,U2p,U2,V12,X3|U1p,U1",
    "f": "Y1;V1,V12,X3|U1p,U1,U2p,U2",
    "g": "Y1,Y2h;V1,V12|U1p,U1,U2p,U2,X3",
    "h": "Y1;U2p,U2,V12,X3|U1p,U1,V1",
    "i": "Y1;V12,X3|U1p,U1,V1,U2p,U2",
    "j": "Y1,Y2h;V12|U1p,U1,V1,U2p,U2,X3",
    "k": "Y2;U1,U2,V2|U1p,U2p,X3",
    "l": "Y2;U2,V2|U1p,U1,U2p,X3",
    "m": "Y2;V2|U1p,U1,U2p,U2,X3",
    "n_term": "Y1;X3|U1p,U1,V1,U2p,U2,V12",
    "marton_b": "V1;V2|U1p,U1,U2p,U2",
    "marton_c": "V1,V12;V2|U1p,U1,U2p,U2",
}


@dataclass(frozen=True)
class InfoTermSet:
    """Terms A..M of the full scheme plus the relay condition term and the
    two Marton binning thresholds (all in bits)."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    g: float
    h: float
    i: float
    j: float
    k: float
    l: float
    m: float
    n_term: float
    marton_b: float = 0.0
    marton_c: float = 0.0

    mode = "theorem1"

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def scaled(self, lam: float) -> "InfoTermSet":
        return InfoTermSet(**{k: lam * v for k, v in self.as_dict().items()})

    @classmethod
    def zeros(cls) -> "InfoTermSet":
        return cls(**{k: 0.0 for k in THEOREM1_TERMS})


def compute_info_terms(p: JointPmf, roles: Mapping[str, str] | None = None, strict: bool = True) -> InfoTermSet:
    """Evaluate every term on ``p``.

    With ``strict`` all thirteen variables must be present; otherwise
    missing ones are taken as null (constant) auxiliaries.
    """
    if strict:
        need = {roles.get(v, v) if roles else v for v in
                ("U1p", "U1", "V1", "U2p", "U2", "V12", "V2", "X1", "X2", "X3", "Y1", "Y2", "Y2h")}
        for v in sorted(need):
            p._axis(v)
    return InfoTermSet(**{k: eval_cmi(p, t, roles) for k, t in THEOREM1_TERMS.items()})


# -- specialised regions --------------------------------------------------

def _neg(*ts):
    return tuple((-1, t) for t in ts)


def _pos(*ts):
    return tuple((1, t) for t in ts)


MODE_TERMS: dict[str, dict[str, tuple]] = {
    "outer": {
        "r1": _pos("Y1;X1,X2,X3"),
        "r2": _pos("Y2;X2|X1,X3"),
        "sum": _pos("Y1,Y2;X1,X2|X3"),
    },
    "corollary1": {
        "r1": _pos("Y1;X1,X3"),
        "r2": _pos("Y2;X2|X1,X3"),
        "sum": _pos("Y2;X1,X2|X3"),
    },
    "rsub": {
        "a": _pos("Y1;X3,U1,X1,U2"),
        "b": _pos("Y1;X1,U2|X3,U1"),
        "c": _pos("Y1;U2|X3,U1,X1"),
        "d": _pos("Y1,U2;X1|X3,U1"),
        "e": _pos("Y2;U1,U2,V2|X3") + _neg("X1;U2,V2|X3,U1"),
        "f": _pos("Y2;U2,V2|X3,U1") + _neg("X1;U2,V2|X3,U1"),
        "g": _pos("Y2;V2|X3,U1,U2") + _neg("X1;V2|X3,U1,U2"),
    },
    "rsub_rewritten": {
        "a": _pos("Y1;X3,U1,X1,U2"),
        "b": _pos("Y1,U2;X1|X3,U1", "Y1;U2|X3", "U1;U2|X3,Y1") + _neg("U1,X1;U2|X3"),
        "c": _pos("Y1,U1,X1;U2|X3") + _neg("U1,X1;U2|X3"),
        "d": _pos("Y1,U2;X1|X3,U1"),
        "e": _pos("Y2;U1,U2,V2|X3", "U2;V2|X3", "U1;U2,V2|X3") + _neg("U1,X1;V2|X3", "U1,X1;U2|X3"),
        "f": _pos("Y2;U2,V2|X3,U1", "U2;V2|X3,U1") + _neg("X1;U2|X3,U1", "X1;V2|X3,U1"),
        "g": _pos("Y2,U1,U2;V2|X3") + _neg("U1,X1;V2|X3"),
    },
    "chu": {
        "a": _pos("Tp,W,V,Sp;Y1"),
        "b": _pos("Sp;W,Y1|V,Tp", "W;Y1|Tp") + _neg("V,Sp;W|Tp"),
        "c": _pos("Sp;W,Y1|V,Tp"),
        "d": _pos("W;Y1|Tp") + _neg("V,Sp;W|Tp"),
        "e": _pos("V,U,W;Y2|Tp", "V;U,W|Tp", "W;U|Tp") + _neg("V,Sp;U|Tp", "V,Sp;W|Tp"),
        "f": _pos("V,U;W,Y2|Tp", "U;V|Tp") + _neg("V,Sp;U|Tp"),
        "g": _pos("V,W;U,Y2|Tp", "W;V|Tp") + _neg("V,Sp;W|Tp"),
        "h": _pos("U,W;V,Y2|Tp", "U;W|Tp") + _neg("V,Sp;U|Tp", "V,Sp;W|Tp"),
        "i": _pos("V;U,W,Y2|Tp"),
        "j": _pos("U;V,W,Y2|Tp") + _neg("V,Sp;U|Tp"),
        "k": _pos("W;V,U,Y2|Tp") + _neg("V,Sp;W|Tp"),
    },
    "pcrbc": {
        "marton": _pos("V12;V2|U2p,U2"),
        "quant": _pos("Y2;Y2h|U2p,U2,X3"),
        "fwd": _pos("Y1,V12;Y2h|U2p,U2,X3"),
        "direct": _pos("Y1;U2p,U2,V12,X3"),
        "bcast": _pos("Y1,Y2h;V12|U2p,U2,X3"),
        "relay_bcast": _pos("Y1;V12,X3|U2p,U2"),
        "dec2_sum": _pos("Y2;U2,V2|U2p,X3"),
        "dec2_priv": _pos("Y2;V2|U2p,U2,X3"),
        "relay_link": _pos("Y1;X3|U2p,U2,V12"),
    },
    "bross": {
        "marton": _pos("V12;V2|U2p,U2"),
        "common": _pos("Y1;U2p,U2,X3,Y2h") + _neg("Y2;Y2h|U2p,U2,X3"),
        "bcast": _pos("Y1,Y2h;V12|U2p,U2,X3"),
        "dec2_sum": _pos("Y2;U2,V2|U2p,X3"),
        "dec2_priv": _pos("Y2;V2|U2p,U2,X3"),
        "quant_resid": _pos("Y2;Y2h|U2p,U2,X3,Y1"),
        "relay_link": _pos("Y1;X3|U2p,U2"),
    },
}

# symbols of the rsub formulas played by the chu-scheme variables
CHU_AS_RSUB = {"X3": "Tp", "U1": "V", "X1": "Sp", "U2": "W", "V2": "U"}

# which factored schemes a mode's terms may be evaluated on
MODE_SCHEMES = {
    "theorem1": ("theorem1",),
    "pre_elim": ("theorem1",),
    "outer": ("theorem1", "corollary1", "rsub", "chu", "pcrbc"),
    "corollary1": ("theorem1", "corollary1", "rsub", "chu", "pcrbc"),
    "rsub": ("rsub", "chu"),
    "rsub_rewritten": ("rsub", "chu"),
    "chu": ("chu",),
    "pcrbc": ("pcrbc",),
    "bross": ("pcrbc",),
}


@dataclass(frozen=True)
class ModeTerms:
    mode: str
    values: Mapping[str, float]

    def __getitem__(self, k: str) -> float:
        return self.values[k]

    def scaled(self, lam: float) -> "ModeTerms":
        return ModeTerms(self.mode, {k: lam * v for k, v in self.values.items()})


def compute_mode_terms(p: JointPmf, mode: str, scheme: str | None = None,
                       roles: Mapping[str, str] | None = None):
    """Terms for ``mode`` evaluated on ``p``.

    ``scheme`` (when known) is checked against the modes that accept it;
    rsub formulas on a chu-scheme joint use :data:`CHU_AS_RSUB`.
    """
    if mode not in MODE_SCHEMES:
        raise ModeSchemeMismatch(f"unknown mode {mode!r}")
    if scheme is not None and scheme not in MODE_SCHEMES[mode]:
        raise ModeSchemeMismatch(f"mode {mode} cannot use a {scheme}-scheme distribution")
    if mode in ("theorem1", "pre_elim"):
        return compute_info_terms(p, roles)
    if roles is None and scheme == "chu" and mode in ("rsub", "rsub_rewritten"):
        roles = CHU_AS_RSUB
    return ModeTerms(mode, {k: eval_expr(p, e, roles) for k, e in MODE_TERMS[mode].items()})
