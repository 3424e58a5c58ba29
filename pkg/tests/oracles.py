"""Independent reference implementations used only by the tests.

They share no code with the package: CMI by an explicit sum over cells,
polytope projection by brute-force vertex enumeration, and a gift-wrapping
hull.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def brute_cmi(probs: np.ndarray, names, a, b, c=()) -> float:
    """I(A;B|C) in bits as sum p(abc) log p(abc)p(c) / (p(ac)p(bc))."""
    idx = {v: i for i, v in enumerate(names)}
    pac, pbc, pc, pabc = {}, {}, {}, {}
    for cell in itertools.product(*(range(k) for k in probs.shape)):
        pr = float(probs[cell])
        if pr == 0:
            continue
        ka = tuple(cell[idx[v]] for v in a)
        kb = tuple(cell[idx[v]] for v in b)
        kc = tuple(cell[idx[v]] for v in c)
        pabc[ka, kb, kc] = pabc.get((ka, kb, kc), 0.0) + pr
        pac[ka, kc] = pac.get((ka, kc), 0.0) + pr
        pbc[kb, kc] = pbc.get((kb, kc), 0.0) + pr
        pc[kc] = pc.get(kc, 0.0) + pr
    total = 0.0
    for (ka, kb, kc), pr in pabc.items():
        total += pr * math.log2(pr * pc[kc] / (pac[ka, kc] * pbc[kb, kc]))
    return total


def gift_wrap(points, tol: float = 1e-9):
    """Counter-clockwise hull vertices (exact Jarvis march), then vertices
    within ``tol`` of their neighbours' segment are dropped."""
    pts = []
    for p in points:
        p = (float(p[0]) + 0.0, float(p[1]) + 0.0)
        if not any(abs(p[0] - q[0]) <= 1e-10 and abs(p[1] - q[1]) <= 1e-10 for q in pts):
            pts.append(p)
    if len(pts) <= 2:
        return pts
    start = min(pts)
    hull = [start]
    cur = start
    while True:
        cand = None
        for q in pts:
            if q == cur:
                continue
            if cand is None:
                cand = q
                continue
            cr = (cand[0] - cur[0]) * (q[1] - cur[1]) - (cand[1] - cur[1]) * (q[0] - cur[0])
            if cr < 0 or (cr == 0 and math.dist(cur, q) > math.dist(cur, cand)):
                cand = q
        if cand == start:
            break
        hull.append(cand)
        cur = cand
        if len(hull) > len(pts):
            raise RuntimeError("gift wrapping did not close")
    i = 0
    while len(hull) > 2 and i < len(hull):
        a, b, c = hull[i - 1], hull[i], hull[(i + 1) % len(hull)]
        if _seg_dist(b, a, c) <= tol:
            del hull[i]
            i = 0
        else:
            i += 1
    return hull


def _seg_dist(p, a, b) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    L = dx * dx + dy * dy
    t = 0.0 if L == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L))
    return math.hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy)


def enumerate_projection(A, b, keep, tol: float = 1e-9):
    """Vertices of {x >= 0 : A x <= b} projected onto ``keep`` coordinates.

    Every basic feasible solution is found by solving each n-subset of the
    constraints (including nonnegativity) as equalities.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    G = np.vstack([A, -np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])
    out = []
    for rows in itertools.combinations(range(len(G)), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x <= h + tol):
            out.append(tuple(x[list(keep)]))
    return out


def support(points, directions) -> np.ndarray:
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    return (P @ np.asarray(directions).T).max(axis=0)


def directions(k: int = 64) -> np.ndarray:
    t = np.linspace(0, 2 * np.pi, k, endpoint=False)
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def random_system(rng: np.random.Generator, n_vars: int, n_rows: int):
    """Bounded random system with small integer coefficients."""
    A = rng.integers(-3, 4, size=(n_rows - 1, n_vars)).astype(float)
    b = rng.integers(-1, 8, size=n_rows - 1).astype(float)
    # a box row keeps the polytope bounded
    A = np.vstack([A, np.ones(n_vars)])
    b = np.concatenate([b, [float(rng.integers(1, 10))]])
    return A, b


def h2(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)
