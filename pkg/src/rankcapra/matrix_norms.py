"""Source matrix norms and their generalized r-rank / dual r-rank norms.

Unitarily invariant sources are described by a symmetric gauge applied to
the singular values; their rank norms reduce to vector computations on
s(M). Arbitrary sources only get the numerical support-function path
(:func:`dual_rrank_generic`).
"""

from dataclasses import dataclass, field
import itertools
import math
from typing import Callable, Optional

import numpy as np

from . import vector_norms as vn
from .errors import InputError, UnsupportedSourceError
from .linalg import as_matrix, numerical_rank, singular_values, svd, trace_inner
from .vector_norms import INF, SymmetricGauge

# default effort of the oracle-backed evaluators
ORACLE_BUDGET = 2000
ORACLE_SEED = 0


@dataclass(frozen=True)
class SourceNorm:
    """A matrix norm used as the source of a rank-norm family.

    ``kind`` is ``"schatten"`` (uses ``p``), ``"kyfan"`` (uses ``k``),
    ``"gauge"`` (uses ``gauge``) or ``"generic"`` (uses ``func``).
    """

    kind: str
    p: float = 2.0
    k: int = 1
    gauge_desc: Optional[SymmetricGauge] = None
    func: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.kind == "schatten":
            object.__setattr__(self, "p", vn._check_p(self.p))
        elif self.kind == "kyfan":
            if not (isinstance(self.k, (int, np.integer)) and self.k >= 1):
                raise InputError(f"Ky Fan k must be a positive integer, got {self.k}")
        elif self.kind == "gauge":
            if not isinstance(self.gauge_desc, SymmetricGauge):
                raise InputError("gauge source needs a SymmetricGauge")
        elif self.kind == "generic":
            if not callable(self.func):
                raise InputError("generic source needs a callable")
        else:
            raise InputError(f"unknown source kind {self.kind!r}")

    @classmethod
    def schatten(cls, p):
        return cls("schatten", p=p)

    @classmethod
    def kyfan(cls, k):
        return cls("kyfan", k=int(k))

    @classmethod
    def from_gauge(cls, g):
        return cls("gauge", gauge_desc=g)

    @classmethod
    def generic(cls, func, name="generic"):
        return cls("generic", func=func, name=name)

    @property
    def gauge(self):
        """The symmetric gauge g with source = g(s(.)), or None."""
        if self.kind == "schatten":
            return SymmetricGauge.lp(self.p)
        if self.kind == "kyfan":
            return SymmetricGauge.top(1.0, self.k)
        if self.kind == "gauge":
            return self.gauge_desc
        return None

    @property
    def unitarily_invariant(self):
        return self.kind != "generic"

    @property
    def is_frobenius(self):
        g = self.gauge
        return g is not None and g.kind == "lp" and g.p == 2.0

    def __call__(self, m):
        return source_eval(self, m)

    def __str__(self):
        if self.kind == "schatten":
            return f"schatten:{vn._fmt_exp(self.p)}"
        if self.kind == "kyfan":
            return f"kyfan:{self.k}"
        if self.kind == "gauge":
            return f"gauge:{self.gauge_desc}"
        return self.name or "generic"


_ALIASES = {
    "nuclear": "schatten:1",
    "frobenius": "schatten:2",
    "spectral": "schatten:inf",
}


def parse_source(text):
    """Parse ``schatten:<p>``, ``kyfan:<k>`` or ``gauge:<gauge descriptor>``."""
    t = _ALIASES.get(text.strip().lower(), text.strip())
    kind, _, rest = t.partition(":")
    kind = kind.lower()
    if kind == "schatten":
        return SourceNorm.schatten(vn.parse_exponent(rest))
    if kind == "kyfan":
        try:
            return SourceNorm.kyfan(int(rest))
        except ValueError:
            raise InputError(f"bad Ky Fan descriptor {text!r}") from None
    if kind == "gauge":
        return SourceNorm.from_gauge(vn.parse_gauge(rest))
    raise InputError(f"unknown source descriptor {text!r}")


def source_eval(s, m):
    """Value of the source norm at m."""
    if s.kind == "generic":
        return float(s.func(as_matrix(m)))
    return float(s.gauge(singular_values(m)))


# ---------------------------------------------------------------------------
# vector profiles (functions of the singular values)


def _dim(n):
    return min(n.shape)


def dual_profile(s, sigma):
    """Dual r-rank values for r = 0..d from singular values (index = r).

    Raises UnsupportedSourceError when no exact formula is available.
    """
    g = s.gauge
    sigma = np.asarray(sigma, dtype=np.float64)
    d = sigma.size
    out = np.zeros(d + 1)
    if g is None:
        raise UnsupportedSourceError(f"no closed form for source {s}; use dual_rrank_generic")
    z = vn.sorted_magnitudes(sigma)
    if d == 0 or z[0] == 0.0:
        if g.kind == "lp" or (g.kind == "top" and g.q == 1.0):
            return out
    if g.kind == "lp":
        # top-(q, r) for every r at once from cumulative sums
        q = vn.conjugate_exponent(g.p)
        if q == INF:
            out[1:] = z[0]
        elif q == 1.0:
            out[1:] = np.cumsum(z)
        else:
            w = z / z[0]
            out[1:] = z[0] * np.cumsum(w**q) ** (1.0 / q)
        return out
    if g.kind == "top" and g.q == 1.0:
        out[1:] = np.maximum(z[0], np.cumsum(z) / g.r)
        return out
    raise UnsupportedSourceError(f"no closed form for the dual r-rank norms of {s}")


def _kyfan_rrank_vector(x, k, r):
    # dual norm of y -> max(|y|_inf, top_1r(y) / k) for r > k: minimum over a
    # clipping level t of sum (x_i - t)_+ + k max(t, sum min(x_i, t) / r)
    x = vn.sorted_magnitudes(x)
    d = x.size
    tails = np.concatenate([np.cumsum(x[::-1])[::-1], [0.0]])
    cands = [0.0] + list(x)
    for j in range(0, min(r, d + 1)):
        t = tails[j] / (r - j)
        if (j == 0 or t <= x[j - 1]) and (j >= d or t >= x[j]):
            cands.append(t)
    best = INF
    for t in cands:
        head = np.clip(x - t, 0.0, None).sum()
        clipped = np.minimum(x, t).sum()
        best = min(best, head + k * max(t, clipped / r))
    return float(best)


def primal_vector_norm(s, r, d):
    """Return (callable on R^d, norm_kind, exact) for the r-rank gauge.

    ``exact`` is False when the value comes from the dual-norm oracle.
    """
    g = s.gauge
    if g is None:
        raise UnsupportedSourceError(f"no r-rank evaluator for source {s}")
    if not 1 <= r <= d:
        raise InputError(f"r={r} outside [1, {d}]")
    if r == d:
        return g, f"source {g}", True
    if g.kind == "lp":
        if g.p == 1.0:
            return (lambda x: vn.lp_norm(x, 1.0)), "nuclear", True
        if g.p == 2.0:
            return (lambda x: vn.ksupport2_norm(x, r)), f"ksupport2(r={r})", True
        if g.p == INF:
            return (
                lambda x: max(vn.lp_norm(x, INF), vn.lp_norm(x, 1.0) / r)
            ), f"max(spectral, nuclear/{r})", True
    if g.kind == "top" and g.q == 1.0:
        if r <= g.r:
            return (lambda x: vn.lp_norm(x, 1.0)), "nuclear", True
        return (lambda x: _kyfan_rrank_vector(np.asarray(x, float), g.r, r)), (
            f"kyfan{g.r}-rrank(r={r})"
        ), True
    try:
        dual = dual_vector_norm(s, r)
    except UnsupportedSourceError:
        raise UnsupportedSourceError(f"no r-rank evaluator for source {s}") from None

    def oracle(x):
        return vn.dual_norm_oracle(dual, np.asarray(x, float), ORACLE_BUDGET, ORACLE_SEED)

    return oracle, f"oracle dual of dual-{r}-rank", False


def dual_vector_norm(s, r):
    """The dual r-rank norm as a function of the singular values."""
    g = s.gauge
    if g is not None and g.kind == "lp":
        return SymmetricGauge.top(vn.conjugate_exponent(g.p), r)
    if g is not None and g.kind == "top" and g.q == 1.0:
        return lambda y: vn.dual_coordinate_norm(g, r, y)
    raise UnsupportedSourceError(f"no dual r-rank evaluator for source {s}")


# ---------------------------------------------------------------------------
# matrix-level operations


def _check_rank_index(r, d, allow_zero=False):
    lo = 0 if allow_zero else 1
    if not (isinstance(r, (int, np.integer)) and lo <= r <= d):
        raise InputError(f"r={r} outside [{lo}, {d}]")
    return int(r)


def dual_rrank_norm(s, r, n):
    """Generalized dual r-rank norm of n (closed form, unitarily invariant sources).

    r = 0 returns 0 by convention.
    """
    n = as_matrix(n)
    d = _dim(n)
    r = _check_rank_index(r, d, allow_zero=True)
    if s.kind == "generic":
        raise UnsupportedSourceError("generic source: use dual_rrank_generic")
    if r == 0:
        return 0.0
    return float(dual_profile(s, singular_values(n))[r])


def rrank_norm(s, r, m):
    """Generalized r-rank norm of m (dual norm of the dual r-rank norm)."""
    m = as_matrix(m)
    d = _dim(m)
    r = _check_rank_index(r, d)
    f, _, _ = primal_vector_norm(s, r, d)
    return float(f(singular_values(m)))


def _orthonormal_columns(a):
    q, _ = np.linalg.qr(a)
    return q


def _gauge_dual_maximizer(g, y):
    """x >= 0 with g(x) = 1 maximizing <y, x>, for y >= 0 nonincreasing."""
    r = y.size
    gr = g.restricted(r)
    if not np.any(y):
        x = np.zeros(r)
        x[0] = 1.0
    elif gr.kind == "lp":
        q = vn.conjugate_exponent(gr.p)
        if q == INF:
            x = np.zeros(r)
            x[0] = 1.0
        elif q == 1.0:
            x = np.ones(r)
        else:
            x = (y / y[0]) ** (q - 1.0)
    elif gr.kind == "top" and gr.q == 1.0:
        kk = gr.r
        if kk * y[0] >= y.sum():
            x = np.zeros(r)
            x[0] = 1.0
        else:
            x = np.ones(r)
    else:
        return None
    return x / gr(x)


def _block_step(n_mat, fixed, g):
    """Best free factor F with F @ fixed.T on the source unit sphere.

    ``fixed`` has orthonormal columns, so the singular values of
    F @ fixed.T are those of F. Returns ``(u, x, v, value)`` with
    F = u @ diag(x) @ v.T and value = <F @ fixed.T, n_mat>.
    """
    r = fixed.shape[1]
    u, sv, v = svd(n_mat @ fixed, full=False)
    x = _gauge_dual_maximizer(g, sv[:r])
    return u[:, :r], x, v, float(sv[:r] @ x)


def _alternating_ascent(s, n, r, rng, iters, rtol):
    g = s.gauge
    b = _orthonormal_columns(rng.standard_normal((n.shape[1], r)))
    val = -INF
    for _ in range(iters):
        # M = ua @ (b @ va @ diag(xa)).T, then M = (ua @ vb @ diag(xb)) @ ub.T
        ua, _, _, _ = _block_step(n, b, g)
        ub, xb, vb, new = _block_step(n.T, ua, g)
        b = ub
        done = new - val <= rtol * abs(new)
        val = max(val, new)
        if done:
            break
    return ((ua @ vb) * xb) @ ub.T


def _powell_ascent(s, n, r, rng, iters):
    from scipy.optimize import minimize

    m_rows, n_cols = n.shape

    def unpack(z):
        return z[: m_rows * r].reshape(m_rows, r) @ z[m_rows * r :].reshape(n_cols, r).T

    def neg(z):
        mat = unpack(z)
        nv = source_eval(s, mat)
        if nv <= 0:
            return 0.0 if not np.any(mat) else INF
        return -trace_inner(mat, n) / nv

    z0 = rng.standard_normal((m_rows + n_cols) * r)
    res = minimize(neg, z0, method="Powell", options={"maxiter": iters * 50, "xtol": 1e-10, "ftol": 1e-13})
    return unpack(res.x)


def dual_rrank_generic(s, r, n, restarts=50, seed=0, iters=200, rtol=1e-10):
    """Lower estimate of the dual r-rank norm straight from its definition.

    Maximizes Tr(M N^T) / source(M) over M = A B^T with A: m x r and
    B: n x r, by multi-start alternating maximization. With B's columns
    orthonormal, the best A is the dual-norm maximizer of the source gauge on
    r coordinates (Hoelder extremal for Schatten sources); sources without
    such a maximizer fall back to Powell search over (A, B). Restart i uses
    an independent child stream of ``seed``, so the estimate is
    nondecreasing in ``restarts``.
    """
    n = as_matrix(n)
    d = _dim(n)
    r = _check_rank_index(r, d)
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    if not np.any(n):
        return 0.0
    structured = s.gauge is not None and _gauge_dual_maximizer(s.gauge, np.ones(r)) is not None
    best = -INF
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        if structured:
            mat = _alternating_ascent(s, n, r, rng, iters, rtol)
        else:
            mat = _powell_ascent(s, n, r, rng, iters)
        nv = source_eval(s, mat)
        if nv <= 0:
            if np.any(mat):
                raise InputError("source evaluates to 0 on a nonzero matrix: not a norm")
            continue
        best = max(best, trace_inner(mat, n) / nv)
    return max(best, 0.0)


def submatrix_top_l1(m, r):
    """sup of the entrywise l1 norm over 'submatrices' of rank <= r.

    A submatrix keeps the entries of m on a row set K x column set L and
    zeroes the rest. Exhaustive; only for m*n <= 16. This function is NOT a
    norm (it breaks the triangle inequality).
    """
    m = as_matrix(m)
    rows, cols = m.shape
    if rows * cols > 16:
        raise InputError("submatrix_top_l1 enumerates all patterns; need m*n <= 16")
    r = _check_rank_index(r, min(rows, cols))
    best = 0.0
    mag = np.abs(m)
    for kmask in itertools.product((False, True), repeat=rows):
        ks = [i for i in range(rows) if kmask[i]]
        if not ks:
            continue
        for lmask in itertools.product((False, True), repeat=cols):
            ls = [j for j in range(cols) if lmask[j]]
            if not ls:
                continue
            total = float(mag[np.ix_(ks, ls)].sum())
            if total <= best:
                continue
            # rank of a |K| x |L| block is at most min(|K|, |L|)
            if min(len(ks), len(ls)) <= r or numerical_rank(m[np.ix_(ks, ls)], 1e-9) <= r:
                best = total
    return best


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class RankNormFamily:
    """Dual r-rank and r-rank evaluators generated by one source norm."""

    source: SourceNorm

    def dual(self, r):
        """Evaluator of the dual r-rank norm (generic estimate for generic sources)."""
        if self.source.kind == "generic":
            return lambda n: dual_rrank_generic(self.source, r, n)
        return lambda n: dual_rrank_norm(self.source, r, n)

    def primal(self, r):
        return lambda m: rrank_norm(self.source, r, m)

    def duals(self, d):
        return [self.dual(r) for r in range(1, d + 1)]

    def primals(self, d):
        return [self.primal(r) for r in range(1, d + 1)]

    def dual_kind(self, r, d):
        """(description, closed_form) of the dual r-rank norm."""
        g = self.source.gauge
        if g is None:
            return "generic support-function estimate", False
        if g.kind == "lp":
            q = vn.conjugate_exponent(g.p)
            if q == INF:
                return "spectral", True
            return f"top(q={vn._fmt_exp(q)},r={r}) of s", True
        if g.kind == "top" and g.q == 1.0:
            if r <= g.r:
                return "spectral", True
            return f"max(spectral, kyfan{r}/{g.r})", False
        return "unsupported", False

    def primal_kind(self, r, d):
        g = self.source.gauge
        if g is None:
            return "unsupported", False
        try:
            _, kind, exact = primal_vector_norm(self.source, r, d)
        except UnsupportedSourceError:
            return "unsupported", False
        table_row = g.kind == "lp" and g.p in (1.0, 2.0, INF) or (
            g.kind == "top" and g.q == 1.0 and r <= g.r
        )
        return kind, bool(exact and (table_row or r == d))

    def rows(self, d):
        """JSON-ready description of the family on matrices with min(m, n) = d."""
        out = []
        for r in range(1, d + 1):
            kind, closed = self.dual_kind(r, d)
            out.append({"source": str(self.source), "r": r, "norm_kind": f"dual-rrank: {kind}", "closed_form": closed})
            kind, closed = self.primal_kind(r, d)
            out.append({"source": str(self.source), "r": r, "norm_kind": f"rrank: {kind}", "closed_form": closed})
        return out


def build_family(s):
    if not isinstance(s, SourceNorm):
        raise InputError("build_family expects a SourceNorm")
    return RankNormFamily(s)
