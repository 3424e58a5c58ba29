"""Monte Carlo checks of the binning (covering) steps at finite blocklength.

A *context* sequence is drawn i.i.d. from the target joint marginal; then
``M = ceil(2**(n*R))`` candidate sequences are drawn i.i.d. from the
candidate's conditional law given its codebook parents.  A trial succeeds if
some candidate is jointly typical with the context.

Two engines are available.  ``exhaustive`` draws every candidate and tests
it.  ``analytic`` uses the fact that candidates are i.i.d. given the
context: with ``q`` the exact probability that one candidate is typical, the
success probability is ``1 - (1 - q)**M``; ``q`` is a product over context
symbols of multinomial box probabilities.  Both engines use the same context
stream for a given ``(seed, trial)``, and all rate offsets share it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import binom

from .channel import ChannelSpec
from .distributions import FactoredDistribution, assemble_joint
from .errors import IndexSpaceTooLarge, LengthMismatch, ValidationError
from .info import JointPmf, cond_mutual_info

MAX_INDEX_BITS = 24
_CHUNK = 4096


@dataclass(frozen=True)
class TypicalityConfig:
    epsilon: float = 0.1
    n: int = 1000

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if int(self.n) < 1:
            raise ValidationError("n must be >= 1")


@dataclass(frozen=True)
class CoveringResult:
    mode: str
    offset: float
    n: int
    trials: int
    successes: int
    rate_used: float
    threshold: float
    engine: str

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def to_row(self) -> dict:
        return {"offset": self.offset, "n": self.n, "trials": self.trials, "successes": self.successes,
                "success_rate": self.success_rate, "rate_used": self.rate_used,
                "threshold": self.threshold, "engine": self.engine}


# -- typicality -----------------------------------------------------------

def count_bounds(p_flat: np.ndarray, n: int, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive count bounds per cell: |k - n p| <= eps n p, zero cells 0."""
    mean = n * p_flat
    lo = np.ceil(mean * (1 - eps) - 1e-9).astype(np.int64)
    hi = np.floor(mean * (1 + eps) + 1e-9).astype(np.int64)
    lo = np.maximum(lo, 0)
    zero = p_flat <= 0
    lo[zero] = 0
    hi[zero] = 0
    return lo, hi


def typicality_test(seqs: Sequence[Sequence[int]], p: JointPmf, cfg: TypicalityConfig) -> bool:
    """Strong typicality with multiplicative slack.

    ``seqs`` holds one symbol sequence per variable of ``p`` (in ``p.vars``
    order).  True iff every joint cell satisfies
    ``|freq - p| <= epsilon * p``; cells with ``p = 0`` must not occur.
    """
    if len(seqs) != len(p.vars):
        raise LengthMismatch(f"got {len(seqs)} sequences for {len(p.vars)} variables")
    arrs = [np.asarray(s, dtype=np.int64) for s in seqs]
    n = len(arrs[0])
    if any(len(a) != n for a in arrs):
        raise LengthMismatch("sequences must share one length")
    for a, k, v in zip(arrs, p.cards, p.vars):
        if len(a) and (a.min() < 0 or a.max() >= k):
            raise ValidationError(f"symbols of {v} outside 0..{k - 1}")
    idx = np.ravel_multi_index(arrs, p.cards) if arrs else np.zeros(0, dtype=np.int64)
    counts = np.bincount(idx, minlength=p.probs.size)
    lo, hi = count_bounds(p.probs.ravel(), n, cfg.epsilon)
    return bool(np.all(counts >= lo) and np.all(counts <= hi))


# -- exact box probabilities ----------------------------------------------

def log_box_prob(N: int, r: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    """log P(multinomial(N, r) has every count k_u in [lo_u, hi_u])."""
    r = np.asarray(r, dtype=float)
    if len(r) == 1:
        return 0.0 if lo[0] <= N <= hi[0] else -math.inf
    kmin = max(int(lo[0]), N - int(hi[1:].sum()))
    kmax = min(int(hi[0]), N - int(lo[1:].sum()))
    if kmin > kmax:
        return -math.inf
    r0 = float(r[0])
    rest = 1.0 - r0
    ks = np.arange(kmin, kmax + 1)
    if r0 <= 0:
        ks = ks[ks == 0]
    if rest <= 1e-15:
        ks = ks[ks == N]
    if len(ks) == 0:
        return -math.inf
    head = binom.logpmf(ks, N, min(max(r0, 0.0), 1.0))
    if len(r) == 2:
        ok = (N - ks >= lo[1]) & (N - ks <= hi[1])
        if not ok.any():
            return -math.inf
        return float(logsumexp(head[ok]))
    tail_r = r[1:] / rest if rest > 0 else np.full(len(r) - 1, 1.0 / (len(r) - 1))
    tails = np.array([log_box_prob(N - int(k), tail_r, lo[1:], hi[1:]) for k in ks])
    tot = head + tails
    if np.all(np.isneginf(tot)):
        return -math.inf
    return float(logsumexp(tot))


def success_prob(log_q: float, n_bits: float) -> float:
    """1 - (1 - q)**M with M = ceil(2**n_bits), computed stably."""
    if log_q == -math.inf:
        return 0.0
    if log_q >= 0:
        return 1.0
    if n_bits <= 50:
        M = math.ceil(2.0 ** n_bits)
        return -math.expm1(M * math.log1p(-math.exp(log_q)))
    # M * (-log1p(-q)) = exp(log M + log(-log1p(-q)))
    y = n_bits * math.log(2) + math.log(-math.log1p(-math.exp(log_q)))
    return -math.expm1(-math.exp(min(y, 700.0)))


# -- generic single-candidate covering -------------------------------------

@dataclass
class _Problem:
    ctx_p: np.ndarray  # flat pmf of context cells
    ctx_card: int
    cand_card: int
    target: np.ndarray  # (ctx cells, candidate symbols)
    law: np.ndarray  # candidate law per context cell, rows sum to 1


def _problem(p: JointPmf, context: Sequence[str], candidate: str, parents: Sequence[str]) -> _Problem:
    target = p.marginal_array(list(context) + [candidate])
    kc = target.shape[-1]
    ctx_shape = target.shape[:-1]
    target = target.reshape(-1, kc)
    ctx_p = target.sum(axis=1)
    pa = p.marginal_array(list(parents) + [candidate])
    pa_rows = pa.reshape(-1, kc)
    mass = pa_rows.sum(axis=1, keepdims=True)
    cond = np.where(mass > 0, pa_rows / np.where(mass > 0, mass, 1), 1.0 / kc)
    cond = cond.reshape(pa.shape)
    # broadcast the parent-conditioned law onto every context cell
    law = np.empty(ctx_shape + (kc,))
    pos = [list(context).index(v) for v in parents]
    for cell in np.ndindex(*ctx_shape):
        law[cell] = cond[tuple(cell[i] for i in pos)]
    return _Problem(ctx_p, int(np.prod(ctx_shape)), kc, target, law.reshape(-1, kc))


def _draw_context(rng: np.random.Generator, prob: _Problem, n: int) -> np.ndarray:
    cdf = np.cumsum(prob.ctx_p)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), prob.ctx_card - 1)


def _log_q(prob: _Problem, ctx: np.ndarray, n: int, eps: float) -> float:
    counts = np.bincount(ctx, minlength=prob.ctx_card)
    lo, hi = count_bounds(prob.target.ravel(), n, eps)
    lo = lo.reshape(prob.target.shape)
    hi = hi.reshape(prob.target.shape)
    total = 0.0
    for c in range(prob.ctx_card):
        lq = log_box_prob(int(counts[c]), prob.law[c], lo[c], hi[c])
        if lq == -math.inf:
            return -math.inf
        total += lq
    return total


def _first_typical(prob: _Problem, ctx: np.ndarray, n: int, eps: float, limit: int,
                   rng: np.random.Generator) -> int:
    """Index of the first typical candidate among ``limit`` draws (or ``limit``)."""
    lo, hi = count_bounds(prob.target.ravel(), n, eps)
    cdf = np.cumsum(prob.law, axis=1)
    cdf[:, -1] = 1.0
    row_cdf = cdf[ctx]  # (n, kc)
    cells = prob.target.size
    base = ctx * prob.cand_card
    done = 0
    while done < limit:
        b = min(_CHUNK, limit - done)
        u = rng.random((b, n))
        sym = (u[:, :, None] >= row_cdf[None, :, :]).sum(axis=2)
        idx = base[None, :] + sym + (np.arange(b) * cells)[:, None]
        counts = np.bincount(idx.ravel(), minlength=b * cells).reshape(b, cells)
        ok = np.all((counts >= lo) & (counts <= hi), axis=1)
        if ok.any():
            return done + int(np.argmax(ok))
        done += b
    return limit


def _run(prob: _Problem, n: int, rates: Sequence[float], trials: int, seed: int, eps: float,
         engine: str) -> list[int]:
    succ = [0] * len(rates)
    bits = [n * r for r in rates]
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        ctx = _draw_context(rng, prob, n)
        u = rng.random()
        if engine == "analytic":
            lq = _log_q(prob, ctx, n, eps)
            for i, nb in enumerate(bits):
                succ[i] += u < success_prob(lq, nb)
        else:
            sizes = [math.ceil(2.0 ** nb) for nb in bits]
            first = _first_typical(prob, ctx, n, eps, max(sizes), np.random.default_rng([seed, t, 1]))
            for i, M in enumerate(sizes):
                succ[i] += first < M
    return succ


# -- pairwise search (two candidate lists) ---------------------------------

def _run_pairs(p: JointPmf, context, n, r1b, rates, trials, seed, eps) -> list[int]:
    """Exhaustive search over (v12, v2) candidate pairs."""
    ctx_prob = _problem(p, context, "V12", context)
    target = p.marginal_array(list(context) + ["V12", "V2"])
    k12, k2 = target.shape[-2:]
    flat = target.ravel()
    lo, hi = count_bounds(flat, n, eps)
    v2_prob = _problem(p, list(context) + ["V12"], "V2", ["U1p", "U1", "U2p", "U2"])
    v2_law = v2_prob.law.reshape(ctx_prob.ctx_card, k12, k2)[:, 0, :]
    K = math.ceil(2.0 ** (n * r1b))
    sizes = [math.ceil(2.0 ** (n * r)) for r in rates]
    L = max(sizes)
    ctx_marg = ctx_prob.ctx_p
    succ = [0] * len(rates)
    cells = flat.size
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        ctx = _draw_context(rng, _Problem(ctx_marg, ctx_prob.ctx_card, 1, ctx_marg[:, None], None), n)
        rng.random()
        crng = np.random.default_rng([seed, t, 1])
        c12 = np.cumsum(ctx_prob.law, axis=1)[ctx]
        c12[:, -1] = 1.0
        v12 = (crng.random((K, n))[:, :, None] >= c12[None]).sum(axis=2)
        c2 = np.cumsum(v2_law, axis=1)[ctx]
        c2[:, -1] = 1.0
        best = L
        done = 0
        drng = np.random.default_rng([seed, t, 2])
        while done < L and best == L:
            b = min(max(1, _CHUNK // max(K, 1)), L - done)
            v2 = (drng.random((b, n))[:, :, None] >= c2[None]).sum(axis=2)
            cell = ((ctx[None, None, :] * k12 + v12[:, None, :]) * k2 + v2[None, :, :])
            offs = (np.arange(K * b) * cells).reshape(K, b, 1)
            counts = np.bincount((cell + offs).ravel(), minlength=K * b * cells).reshape(K, b, cells)
            ok = np.all((counts >= lo) & (counts <= hi), axis=2).any(axis=0)
            if ok.any():
                best = done + int(np.argmax(ok))
            done += b
        for i, M in enumerate(sizes):
            succ[i] += best < M
    return succ


# -- public entry point ---------------------------------------------------

GP_CONTEXT = ("U1p", "U1", "V1", "U2p")
GP_PARENTS = ("U1p", "U1", "U2p")
MARTON_CONTEXT = ("U1p", "U1", "V1", "U2p", "U2")
MARTON_PARENTS = ("U1p", "U1", "U2p", "U2")


def covering_threshold(p: JointPmf, mode: str, r1b: float = 0.0) -> float:
    if mode == "gp":
        return cond_mutual_info(p, ["V1"], ["U2"], list(GP_PARENTS))
    if mode == "marton":
        b = cond_mutual_info(p, ["V1"], ["V2"], list(MARTON_PARENTS))
        c = cond_mutual_info(p, ["V1", "V12"], ["V2"], list(MARTON_PARENTS))
        return max(b, c - r1b, 0.0)
    raise ValidationError(f"unknown covering mode {mode!r}")


def covering_experiment(mode: str, fd, ch: ChannelSpec | None, n: int, rate_offsets: Sequence[float],
                        trials: int, seed: int, cfg: TypicalityConfig | None = None,
                        engine: str = "auto", r1b: float = 0.0) -> list[CoveringResult]:
    """Success rate of the bin search at ``threshold + offset`` per offset.

    ``gp`` searches ``2**(n R)`` candidates u2 against (u1p, u1, v1, u2p);
    ``marton`` searches pairs of ``2**(n r1b)`` candidates v12 and
    ``2**(n R)`` candidates v2 against (u1p, u1, v1, u2p, u2).  The rate
    offsets apply to R; the threshold is A for ``gp`` and
    ``max(I(V1;V2|.), I(V1,V12;V2|.) - r1b)`` for ``marton``.
    """
    if mode not in ("gp", "marton"):
        raise ValidationError(f"unknown covering mode {mode!r}")
    if engine not in ("auto", "exhaustive", "analytic"):
        raise ValidationError(f"unknown engine {engine!r}")
    if trials < 1 or n < 1:
        raise ValidationError("trials and n must be >= 1")
    if r1b < 0:
        raise ValidationError("r1b must be >= 0")
    eps = (cfg or TypicalityConfig(n=n)).epsilon
    p = fd if isinstance(fd, JointPmf) else assemble_joint(fd, ch)
    thr = covering_threshold(p, mode, r1b)
    rates = [max(thr + d, 0.0) for d in rate_offsets]
    bits = n * (max(rates) + (r1b if mode == "marton" else 0.0))
    fits = bits <= MAX_INDEX_BITS
    pairwise = mode == "marton" and r1b > 0
    if engine == "auto":
        engine = "exhaustive" if fits else "analytic"
    if engine == "exhaustive" and not fits:
        raise IndexSpaceTooLarge(f"{bits:.1f} index bits exceed the {MAX_INDEX_BITS}-bit cap")
    if engine == "analytic" and pairwise:
        raise IndexSpaceTooLarge("pair search with r1b > 0 needs the exhaustive engine")
    if pairwise:
        succ = _run_pairs(p, MARTON_CONTEXT, n, r1b, rates, trials, seed, eps)
    elif mode == "gp":
        succ = _run(_problem(p, GP_CONTEXT, "U2", GP_PARENTS), n, rates, trials, seed, eps, engine)
    else:
        # a single v12 codeword joins the context
        prob = _problem(p, MARTON_CONTEXT + ("V12",), "V2", MARTON_PARENTS)
        succ = _run(prob, n, rates, trials, seed, eps, engine)
    return [CoveringResult(mode, float(d), n, trials, s, r, thr, engine)
            for d, s, r in zip(rate_offsets, succ, rates)]


def binning_example(ch: ChannelSpec, mode: str = "gp", crossover: float = 0.18) -> FactoredDistribution:
    """Small theorem1 distribution with one active binning step.

    U1p, U1, U2p (and U2 for ``marton``) are constant and V1 is a uniform
    bit.  For ``gp``, U2 is V1 through a BSC(``crossover``); for ``marton``,
    V2 is, and V12 is constant.  The threshold is ``1 - h2(crossover)``.
    Other factors are uniform.
    """
    from .distributions import default_cards, scheme_factors

    if mode not in ("gp", "marton"):
        raise ValidationError(f"unknown covering mode {mode!r}")
    if not 0 <= crossover <= 1:
        raise ValidationError("crossover must lie in [0, 1]")
    cards = default_cards("theorem1", ch)
    bsc = np.array([[1 - crossover, crossover], [crossover, 1 - crossover]])
    point = np.array([1.0, 0.0])
    factors = {}
    for f in scheme_factors("theorem1"):
        if f.kind == "channel":
            continue
        shape = tuple(cards[v] for v in f.parents + f.children)
        factors[f.key] = np.full(shape, 1.0 / np.prod(shape[len(f.parents):]))
    factors["U1p|"] = point
    factors["U1|U1p"] = np.broadcast_to(point, (2, 2)).copy()
    factors["V1|U1p,U1"] = np.full((2, 2, 2), 0.5)
    factors["U2p|U1p"] = np.broadcast_to(point, (2, 2)).copy()
    # axes: U1p, U1, V1, U2p, U2, V12, V2
    t = np.zeros((2,) * 7)
    for v1 in range(2):
        for x in range(2):
            if mode == "gp":
                t[:, :, v1, :, x, 0, 0] = bsc[v1, x]
            else:
                t[:, :, v1, :, 0, 0, x] = bsc[v1, x]
    factors["U2,V12,V2|U1p,U1,V1,U2p"] = t
    return FactoredDistribution("theorem1", cards, factors, label=f"binning-{mode}-{crossover}")
