"""Linear rate-inequality systems over nonnegative variables and their
projection by Fourier-Motzkin elimination."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from ..errors import UndeclaredVariableInDef, UnknownVariable, ValidationError
from .polytope import RatePolytope, polygon_from_halfplanes, union_hull

COEF_EPS = 1e-12
TOL_INFO = 1e-9
LP_THRESHOLD = 24


@dataclass(frozen=True)
class InequalitySystem:
    """``A @ x <= b`` over named variables, all implicitly ``>= 0``.

    ``feasibility`` holds constant-only conditions ``(label, lhs, rhs)``
    meaning ``lhs <= rhs``; if any fails the system describes the empty set.
    ``empty`` marks a system already known to be infeasible.
    """

    vars: tuple[str, ...]
    A: np.ndarray
    b: np.ndarray
    labels: tuple[str, ...] = ()
    feasibility: tuple[tuple[str, float, float], ...] = ()
    empty: bool = False
    name: str = ""

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float).reshape(-1, len(self.vars))
        b = np.asarray(self.b, dtype=float).ravel()
        if len(A) != len(b):
            raise ValidationError("row count mismatch between A and b")
        if not np.all(np.isfinite(b)) or not np.all(np.isfinite(A)):
            raise ValidationError("system constants must be finite")
        labels = tuple(self.labels) if self.labels else tuple(f"r{i}" for i in range(len(b)))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "feasibility", tuple(self.feasibility))

    @classmethod
    def build(cls, vars: Sequence[str], rows: Iterable, feasibility=(), name: str = "") -> "InequalitySystem":
        """Rows are ``(coeffs: dict, sense, const[, label])`` with sense
        ``"<="``, ``">="`` or ``"=="``."""
        vars = tuple(vars)
        idx = {v: i for i, v in enumerate(vars)}
        A, b, labels = [], [], []
        for k, row in enumerate(rows):
            coeffs, sense, const = row[:3]
            label = row[3] if len(row) > 3 else f"r{k}"
            a = np.zeros(len(vars))
            for v, c in coeffs.items():
                if v not in idx:
                    raise UnknownVariable(f"row {label!r} references undeclared variable {v!r}")
                a[idx[v]] += c
            if sense in ("<=", "=="):
                A.append(a)
                b.append(float(const))
                labels.append(label)
            if sense in (">=", "=="):
                A.append(-a)
                b.append(-float(const))
                labels.append(label if sense == ">=" else label + "'")
            if sense not in ("<=", ">=", "=="):
                raise ValidationError(f"unknown sense {sense!r}")
        return cls(vars, np.array(A).reshape(-1, len(vars)), np.array(b), tuple(labels),
                   tuple((l, float(x), float(y)) for l, x, y in feasibility), name=name)

    @property
    def rows(self) -> list[tuple[dict[str, float], str, float]]:
        return [
            ({v: float(c) for v, c in zip(self.vars, a) if c != 0}, "<=", float(bi))
            for a, bi in zip(self.A, self.b)
        ]

    def feasibility_ok(self, tol: float = TOL_INFO) -> bool:
        return not self.empty and all(lhs <= rhs + tol for _, lhs, rhs in self.feasibility)

    def with_rows(self, rows: Iterable, name: str | None = None) -> "InequalitySystem":
        extra = InequalitySystem.build(self.vars, rows)
        return InequalitySystem(
            self.vars,
            np.vstack([self.A, extra.A]),
            np.concatenate([self.b, extra.b]),
            self.labels + extra.labels,
            self.feasibility,
            self.empty,
            self.name if name is None else name,
        )

    def without_rows(self, labels: Iterable[str], name: str | None = None) -> "InequalitySystem":
        drop = set(labels)
        keep = [i for i, l in enumerate(self.labels) if l not in drop]
        return InequalitySystem(
            self.vars, self.A[keep], self.b[keep], tuple(self.labels[i] for i in keep),
            self.feasibility, self.empty, self.name if name is None else name,
        )

    def scaled(self, lam: float) -> "InequalitySystem":
        return InequalitySystem(
            self.vars, self.A, lam * self.b, self.labels,
            tuple((l, lam * x, lam * y) for l, x, y in self.feasibility), self.empty, self.name,
        )

    def satisfied_by(self, point: Mapping[str, float], tol: float = 1e-9) -> bool:
        x = np.array([point.get(v, 0.0) for v in self.vars])
        return bool(np.all(x >= -tol) and np.all(self.A @ x <= self.b + tol)) and self.feasibility_ok()


def _simplify(A: np.ndarray, b: np.ndarray, labels: list[str], tol: float = TOL_INFO):
    """Normalise, drop trivial/duplicate/dominated rows.

    Returns ``(A, b, labels, empty)``.
    """
    if len(A) == 0:
        return A, b, labels, False
    A = A.copy()
    A[np.abs(A) < COEF_EPS] = 0.0
    scale = np.abs(A).max(axis=1)
    zero = scale == 0
    if np.any(b[zero] < -tol):
        return A[:0], b[:0], [], True
    keep = ~zero
    A, b, scale = A[keep], b[keep], scale[keep]
    labels = [l for l, k in zip(labels, keep) if k]
    A = A / scale[:, None]
    b = b / scale
    # rows with no positive coefficient and b >= 0 follow from x >= 0
    implied = np.all(A <= 0, axis=1) & (b >= -tol)
    A, b = A[~implied], b[~implied]
    labels = [l for l, k in zip(labels, ~implied) if k]
    if len(A) == 0:
        return A, b, labels, False
    # duplicates: keep the tightest constant
    key = np.round(A, 10)
    order = np.lexsort(np.vstack([b, key.T[::-1]]))
    best: dict[bytes, int] = {}
    for i in order:
        k = key[i].tobytes()
        if k not in best:
            best[k] = i
    sel = sorted(best.values())
    A, b = A[sel], b[sel]
    labels = [labels[i] for i in sel]
    # dominance on the orthant: a' >= a and b' <= b make (a, b) redundant
    m = len(A)
    alive = np.ones(m, dtype=bool)
    for i in range(m):
        dom = np.all(A >= A[i] - COEF_EPS, axis=1) & (b <= b[i] + 1e-12) & alive
        dom[i] = False
        if dom.any():
            alive[i] = False
    A, b = A[alive], b[alive]
    labels = [l for l, k in zip(labels, alive) if k]
    return A, b, labels, False


def _lp_prune(A: np.ndarray, b: np.ndarray, labels: list[str]):
    """Remove rows implied by the others (and x >= 0) via linear programs."""
    keep = np.ones(len(A), dtype=bool)
    for i in range(len(A)):
        others = keep.copy()
        others[i] = False
        if not others.any():
            continue
        res = linprog(-A[i], A_ub=A[others], b_ub=b[others], bounds=(0, None), method="highs")
        if res.status == 0 and -res.fun <= b[i] + 1e-9:
            keep[i] = False
        elif res.status == 2:  # infeasible
            return A[:0], b[:0], [], True
    return A[keep], b[keep], [l for l, k in zip(labels, keep) if k], False


def fme_eliminate(sys: InequalitySystem, var: str, lp_threshold: int = LP_THRESHOLD) -> InequalitySystem:
    """Project ``var`` out of ``sys`` (its nonnegativity counts as a lower bound)."""
    if var not in sys.vars:
        raise UnknownVariable(f"cannot eliminate undeclared variable {var!r}")
    j = sys.vars.index(var)
    rest = [k for k in range(len(sys.vars)) if k != j]
    new_vars = tuple(sys.vars[k] for k in rest)
    if sys.empty:
        return InequalitySystem(new_vars, np.zeros((0, len(new_vars))), np.zeros(0), (), sys.feasibility, True, sys.name)
    A, b, labels = sys.A, sys.b, list(sys.labels)
    col = A[:, j]
    pos = np.where(col > COEF_EPS)[0]
    neg = np.where(col < -COEF_EPS)[0]
    zer = np.where(np.abs(col) <= COEF_EPS)[0]
    new_A = [A[zer][:, rest]]
    new_b = [b[zer]]
    new_l = [labels[i] for i in zer]
    for p in pos:
        # pairing with var >= 0: drop var from the upper row
        new_A.append(A[p, rest][None, :])
        new_b.append(b[p : p + 1])
        new_l.append(labels[p])
        for q in neg:
            wp, wq = -col[q], col[p]
            new_A.append((wp * A[p, rest] + wq * A[q, rest])[None, :])
            new_b.append(np.array([wp * b[p] + wq * b[q]]))
            new_l.append(f"{labels[p]}+{labels[q]}")
    A2 = np.vstack(new_A) if new_A else np.zeros((0, len(rest)))
    b2 = np.concatenate(new_b) if new_b else np.zeros(0)
    A2, b2, l2, empty = _simplify(A2, b2, new_l)
    if not empty and len(A2) > lp_threshold:
        A2, b2, l2, empty = _lp_prune(A2, b2, l2)
    return InequalitySystem(new_vars, A2, b2, tuple(l2), sys.feasibility, empty, sys.name)


def _elim_cost(sys: InequalitySystem, var: str) -> int:
    col = sys.A[:, sys.vars.index(var)]
    p = int(np.sum(col > COEF_EPS))
    n = int(np.sum(col < -COEF_EPS)) + 1
    return p * n


def eliminate_all(sys: InequalitySystem, keep: Sequence[str], lp_threshold: int = LP_THRESHOLD) -> InequalitySystem:
    """Eliminate every variable not in ``keep``, cheapest pairing first."""
    while True:
        todo = [v for v in sys.vars if v not in keep]
        if not todo:
            break
        v = min(todo, key=lambda v: (_elim_cost(sys, v), v))
        sys = fme_eliminate(sys, v, lp_threshold)
    order = [sys.vars.index(v) for v in keep]
    return InequalitySystem(tuple(keep), sys.A[:, order], sys.b, sys.labels, sys.feasibility, sys.empty, sys.name)


def substitute_total(sys: InequalitySystem, total: str, parts: Sequence[str]) -> InequalitySystem:
    """Introduce ``total = sum(parts)`` by replacing the last part.

    The pivot ``parts[-1]`` becomes ``total - sum(parts[:-1])``; its
    nonnegativity is added as an explicit row.
    """
    for v in parts:
        if v not in sys.vars:
            raise UndeclaredVariableInDef(f"{total} definition uses undeclared variable {v!r}")
    if len(set(parts)) != len(parts) or not parts:
        raise ValidationError(f"bad definition of {total}: {parts}")
    if total in sys.vars:
        raise ValidationError(f"{total} already declared")
    pivot = parts[-1]
    pj = sys.vars.index(pivot)
    others = [sys.vars.index(v) for v in parts[:-1]]
    vars2 = sys.vars[:pj] + (total,) + sys.vars[pj + 1 :]
    A = sys.A.copy()
    piv = A[:, pj].copy()
    for k in others:
        A[:, k] -= piv
    # column pj now holds the coefficient of total
    nonneg = np.zeros(len(vars2))
    nonneg[pj] = -1.0
    nonneg[others] = 1.0
    A = np.vstack([A, nonneg])
    b = np.concatenate([sys.b, [0.0]])
    return InequalitySystem(vars2, A, b, sys.labels + (f"{pivot}>=0",), sys.feasibility, sys.empty, sys.name)


def project_system(sys: InequalitySystem, r1_def: Sequence[str], r2_def: Sequence[str],
                   lp_threshold: int = LP_THRESHOLD) -> RatePolytope:
    """(R1, R2) polygon of one system; empty if it is infeasible."""
    for v in list(r1_def) + list(r2_def):
        if v not in sys.vars:
            raise UndeclaredVariableInDef(f"rate definition uses undeclared variable {v!r}")
    if set(r1_def) & set(r2_def):
        raise ValidationError("R1 and R2 definitions overlap")
    if not sys.feasibility_ok():
        return RatePolytope.empty()
    s = sys
    if tuple(r1_def) != ("R1",):
        s = substitute_total(s, "_R1", r1_def)
    if tuple(r2_def) != ("R2",):
        s = substitute_total(s, "_R2", r2_def)
    k1 = "R1" if tuple(r1_def) == ("R1",) else "_R1"
    k2 = "R2" if tuple(r2_def) == ("R2",) else "_R2"
    s = eliminate_all(s, (k1, k2), lp_threshold)
    if s.empty:
        return RatePolytope.empty()
    return polygon_from_halfplanes(s.A, s.b)


def project_region(systems, r1_def: Sequence[str], r2_def: Sequence[str]) -> RatePolytope:
    """Convex hull of the union of the projections of one or more systems."""
    if isinstance(systems, InequalitySystem):
        systems = [systems]
    polys = [project_system(s, r1_def, r2_def) for s in systems]
    return union_hull(polys)
