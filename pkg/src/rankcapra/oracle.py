"""Brute-force and sampling verifiers: support functions of norm balls and
of nonconvex sparse or low-rank spheres, and Von Neumann's trace inequality.

Every estimate here is a lower bound obtained from feasible points only, so
it can be compared against closed forms without trusting them.
"""

from dataclasses import dataclass
import itertools
import math
from typing import Any, Callable

import numpy as np

from . import matrix_norms as mn
from . import vector_norms as vn
from .errors import InputError
from .linalg import as_matrix, rng_from, singular_values, svd, trace_inner
from .vector_norms import INF, SymmetricGauge, as_vector

EXHAUSTIVE_MAX_DIM = 4


@dataclass(frozen=True)
class RankSphere:
    """Matrices of rank <= r on the unit sphere of a source norm."""

    source: mn.SourceNorm
    r: int


@dataclass(frozen=True)
class GaugeSparseSphere:
    """Vectors with at most r nonzeros on the unit sphere of a gauge."""

    gauge: SymmetricGauge
    r: int


@dataclass(frozen=True)
class NormBall:
    """Unit ball of a norm given as a callable on vectors or matrices."""

    norm: Callable[[Any], float]


@dataclass(frozen=True)
class SupportProblem:
    direction: Any
    feasible: Any
    budget: int = 2000
    seed: Any = 0

    def __post_init__(self):
        if self.budget < 1:
            raise InputError("budget must be >= 1")
        if not isinstance(self.feasible, (RankSphere, GaugeSparseSphere, NormBall)):
            raise InputError(f"unknown feasible set {self.feasible!r}")


def support_estimate(p):
    """Lower estimate of sup{<direction, y> : y in the feasible set}."""
    f = p.feasible
    if isinstance(f, NormBall):
        return _ball_support(f.norm, p.direction, p.budget, p.seed)
    if isinstance(f, GaugeSparseSphere):
        return _sparse_support(f.gauge, f.r, p.direction, p.budget, p.seed)
    return _rank_support(f.source, f.r, p.direction, p.budget, p.seed)


# ---------------------------------------------------------------------------
# norm balls


def _ball_support(norm, direction, budget, seed):
    x = np.asarray(direction, dtype=np.float64)
    shape = x.shape
    if x.ndim == 1:
        return vn.dual_norm_oracle(norm, x, budget, seed)

    def flat_norm(v):
        return norm(np.asarray(v).reshape(shape))

    return vn.dual_norm_oracle(flat_norm, x.ravel(), budget, seed)


# ---------------------------------------------------------------------------
# gauge sphere with at most r nonzeros


def _restricted_dual(g, xs):
    """sup{<xs, y> : g(y) <= 1} for y supported on the given coordinates."""
    if g.kind == "lp":
        # Hoelder extremal vector on the restricted coordinates
        return vn.lp_norm(xs, vn.conjugate_exponent(g.p))
    sub = g.restricted(xs.size)
    return vn.dual_norm_oracle(sub, xs, budget=500, seed=0)


def _sparse_support(g, r, direction, budget, seed):
    x = as_vector(direction)
    d = x.size
    if not 1 <= r <= d:
        raise InputError(f"r={r} outside [1, {d}]")
    if not np.any(x):
        return 0.0
    best = 0.0
    if d <= EXHAUSTIVE_MAX_DIM:
        for size in range(1, r + 1):
            for support in itertools.combinations(range(d), size):
                best = max(best, _restricted_dual(g, x[list(support)]))
    rng = rng_from(seed)
    for _ in range(budget):
        support = rng.choice(d, size=r, replace=False)
        y = np.zeros(d)
        y[support] = rng.standard_normal(r)
        val = g(y)
        if val > 0:
            best = max(best, float(x @ y) / val)
    # projected ascent: keep the r largest entries and renormalize
    y = np.zeros(d)
    for step in (1.0, 0.1, 0.01):
        for _ in range(50):
            z = y + step * x
            keep = np.argsort(-np.abs(z))[:r]
            y = np.zeros(d)
            y[keep] = z[keep]
            y /= g(y)
            best = max(best, float(x @ y))
    return float(best)


# ---------------------------------------------------------------------------
# rank-constrained sphere of a source norm


def _truncate(mat, r):
    u, s, v = svd(mat, full=False)
    return (u[:, :r] * s[:r]) @ v[:, :r].T


def _random_search(value, params, rng, steps):
    """Adaptive random-direction hill climbing on a tuple of arrays."""
    best = value(*params)
    h = 0.1
    for _ in range(steps):
        if h < 1e-10:
            break
        deltas = [rng.standard_normal(p.shape) for p in params]
        size = math.sqrt(sum(np.sum(p**2) for p in params))
        dsize = math.sqrt(sum(np.sum(dp**2) for dp in deltas))
        scale = h * size / dsize
        improved = False
        for sgn in (1.0, -1.0):
            trial = tuple(p + sgn * scale * dp for p, dp in zip(params, deltas))
            val = value(*trial)
            if val > best:
                params, best, improved = trial, val, True
                break
        h = min(h * 1.5, 1.0) if improved else h * 0.8
    return best


def _coefficient_candidates(g, w):
    # feasible coefficient vectors for a fixed frame: Hoelder extremal vector
    # (lp gauges), sign pattern, best single coordinate, w itself
    cands = [w, np.sign(w)]
    e = np.zeros_like(w)
    j = int(np.argmax(np.abs(w)))
    e[j] = np.sign(w[j]) or 1.0
    cands.append(e)
    if g is not None and g.kind == "lp" and 1.0 < g.p < INF:
        q = vn.conjugate_exponent(g.p)
        cands.append(np.sign(w) * np.abs(w) ** (q - 1.0))
    return [c for c in cands if np.any(c)]


def _rank_support(source, r, direction, budget, seed):
    n = as_matrix(direction)
    rows, cols = n.shape
    d = min(rows, cols)
    if not 1 <= r <= d:
        raise InputError(f"r={r} outside [1, {d}]")
    if not np.any(n):
        return 0.0
    g = source.gauge

    def score(mat):
        nv = mn.source_eval(source, mat)
        return trace_inner(mat, n) / nv if nv > 0 else -INF

    def factor_value(a, b):
        return score(a @ b.T)

    def frame_value(a, b):
        qa, _ = np.linalg.qr(a)
        qb, _ = np.linalg.qr(b)
        w = np.einsum("ij,ik,kj->j", qa, n, qb)
        return max(score((qa * c) @ qb.T) for c in _coefficient_candidates(g, w))

    entropy = _entropy(seed)
    draw_rng = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(0,)))
    best = score(_truncate(n, r))
    # projected ascent from the truncated direction
    mat = _truncate(n, r)
    mat /= mn.source_eval(source, mat)
    for step in (1.0, 0.3, 0.1, 0.03):
        for _ in range(30):
            z = _truncate(mat + step * n / np.linalg.norm(n), r)
            mat = z / mn.source_eval(source, z)
            best = max(best, score(mat))
    # random rank-r points; at each power-of-two count the three best draws
    # so far get a local search (frames for unitarily invariant sources).
    # Larger budgets only add draws and searches, so the estimate is
    # nondecreasing in the budget.
    local = frame_value if g is not None else factor_value
    draws = []
    searched = set()
    checkpoint = 1
    for i in range(budget):
        a = draw_rng.standard_normal((rows, r))
        b = draw_rng.standard_normal((cols, r))
        v = factor_value(a, b)
        draws.append((v, i, a, b))
        best = max(best, v)
        if i + 1 == checkpoint:
            checkpoint *= 2
            for _, j, a0, b0 in sorted(draws, key=lambda t: (-t[0], t[1]))[:3]:
                if j in searched:
                    continue
                searched.add(j)
                rng = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(1, j)))
                best = max(best, _random_search(local, (a0, b0), rng, max(200, (i + 1) // 2)))
    return float(best)


def _entropy(seed):
    return int(rng_from(seed).integers(2**63))


# ---------------------------------------------------------------------------
# Von Neumann trace inequality


def _random_orthogonal_batch(rng, count, size):
    z = rng.standard_normal((count, size, size))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r, axis1=1, axis2=2))
    signs[signs == 0] = 1.0
    return q * signs[:, None, :]


def vonneumann_extremal_check(m, n, samples=100, seed=0):
    """Compare Tr(U M V N^T) over sampled orthogonal U, V with <s(M), s(N)>."""
    m = as_matrix(m, "m")
    n = as_matrix(n, "n")
    if m.shape != n.shape:
        raise InputError(f"dimension mismatch: {m.shape} vs {n.shape}")
    if samples < 1:
        raise InputError("samples must be >= 1")
    rows, cols = m.shape
    rng = rng_from(seed)
    us = _random_orthogonal_batch(rng, samples, rows)
    vs = _random_orthogonal_batch(rng, samples, cols)
    vals = np.einsum("kij,jl,klp,ip->k", us, m, vs, n)
    um, sm, vm = svd(m)
    un, sn, vn_ = svd(n)
    u = un @ um.T
    v = vm @ vn_.T
    aligned = trace_inner(u @ m @ v, n)
    return {
        "max_sampled": float(vals.max()),
        "aligned_value": float(aligned),
        "inner_product": float(singular_values(m) @ singular_values(n)),
    }
