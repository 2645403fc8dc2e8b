"""Capra coupling, conjugate and biconjugate of phi(rank), and the
variational lower bound of the rank.

The ray and sandwich routines work on the singular spectrum of M with
values at or below ``tol * s_1`` set to zero, consistently with
:func:`rankcapra.linalg.numerical_rank`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math

import numpy as np
from scipy.optimize import linprog, minimize

from . import matrix_norms as mn
from . import vector_norms as vn
from .errors import InputError, UnsupportedSourceError
from .linalg import (
    RANK_TOL,
    as_matrix,
    clean_spectrum,
    numerical_rank,
    rng_from,
    singular_values,
    svd,
    trace_inner,
)
from .vector_norms import INF

LAMBDA_EXPONENTS = tuple(range(0, 9))
SIGMA_CAP = 1e5
EPS = np.finfo(np.float64).eps


# ---------------------------------------------------------------------------
# extended reals (Moreau additions)


def lower_add(a, b):
    """a + b with (+inf) + (-inf) = -inf."""
    if math.isinf(a) and math.isinf(b) and a != b:
        return -INF
    return a + b


def upper_add(a, b):
    """a + b with (+inf) + (-inf) = +inf."""
    if math.isinf(a) and math.isinf(b) and a != b:
        return INF
    return a + b


# ---------------------------------------------------------------------------
# phi


def identity_phi(d):
    return np.arange(d + 1, dtype=np.float64)


def as_phi(phi, d):
    """Validate phi as an array of d + 1 extended reals, phi[i] for i = 0..d."""
    arr = np.asarray(phi, dtype=np.float64)
    if arr.ndim != 1 or arr.size != d + 1:
        raise InputError(f"phi must have d + 1 = {d + 1} values, got shape {arr.shape}")
    if np.any(np.isnan(arr)):
        raise InputError("phi has NaN values")
    return arr


def biconjugate_admissible(phi):
    """phi(0) = 0 and every value finite and nonnegative."""
    phi = np.asarray(phi, dtype=np.float64)
    return bool(phi[0] == 0.0 and np.all(np.isfinite(phi)) and np.all(phi >= 0.0))


@dataclass
class BoundEstimate:
    lower: float
    upper: float
    meta: dict = field(default_factory=dict)


@dataclass
class SampledConjugate:
    value: float
    closed_form: float
    gap: float
    samples: int


@dataclass
class Decomposition:
    """Parts M^(1..d) of a matrix, one per rank index."""

    parts: list

    def check(self, source, m, atol=1e-9):
        """Raise InputError unless the sum and norm-budget constraints hold."""
        m = as_matrix(m)
        total = np.sum(self.parts, axis=0)
        scale = max(np.linalg.norm(m), 1.0)
        if np.linalg.norm(total - m) > 1e-10 * scale:
            raise InputError("parts do not sum to the matrix")
        budget = sum(
            mn.rrank_norm(source, r, p) for r, p in enumerate(self.parts, start=1) if np.any(p)
        )
        if budget > mn.source_eval(source, m) + atol:
            raise InputError("parts exceed the norm budget")
        return budget

    def objective(self, source, m, phi):
        m = as_matrix(m)
        total = sum(
            phi[r] * mn.rrank_norm(source, r, p)
            for r, p in enumerate(self.parts, start=1)
            if np.any(p)
        )
        return total / mn.source_eval(source, m)


# ---------------------------------------------------------------------------
# coupling and conjugate


def coupling(source, m, n):
    """Tr(M N^T) / source(M), and 0 when M = 0."""
    m = as_matrix(m, "m")
    n = as_matrix(n, "n")
    if m.shape != n.shape:
        raise InputError(f"dimension mismatch: {m.shape} vs {n.shape}")
    if not np.any(m):
        return 0.0
    return trace_inner(m, n) / mn.source_eval(source, m)


def _dual_values(source, n, restarts=50, seed=0):
    d = min(n.shape)
    if source.kind == "generic":
        return np.array(
            [0.0] + [mn.dual_rrank_generic(source, r, n, restarts, seed) for r in range(1, d + 1)]
        )
    return mn.dual_profile(source, singular_values(n))


def rank_conjugate(source, phi, n):
    """Capra conjugate of phi(rank) at n: max_i (dual_i(n) - phi(i)).

    The dual 0-rank norm is 0. Generic sources use the numerical dual
    r-rank estimates.
    """
    n = as_matrix(n)
    d = min(n.shape)
    phi = as_phi(phi, d)
    duals = _dual_values(source, n)
    return float(max(upper_add(float(duals[i]), -float(phi[i])) for i in range(d + 1)))


def _local_factor_ascent(source, n, a, b, rng, steps=300):
    def value(a_, b_):
        mat = a_ @ b_.T
        nv = mn.source_eval(source, mat)
        return trace_inner(mat, n) / nv if nv > 0 else -INF

    best = value(a, b)
    h = 0.1 * max(np.linalg.norm(a), 1e-12)
    for _ in range(steps):
        if h < 1e-12:
            break
        da = rng.standard_normal(a.shape)
        db = rng.standard_normal(b.shape)
        scale = h / math.sqrt(np.sum(da**2) + np.sum(db**2))
        improved = False
        for sgn in (1.0, -1.0):
            a2 = a + sgn * scale * da
            b2 = b + sgn * scale * db
            v = value(a2, b2)
            if v > best:
                a, b, best = a2, b2, v
                improved = True
                break
        h = h * 1.5 if improved else h * 0.7
    return best, a @ b.T


def conjugate_sampled(source, phi, n, budget=2000, seed=0, refine=True):
    """Direct sampling estimate of sup_M c(M, n) - phi(rank M).

    Draws ``budget`` random factorized matrices spread over ranks 1..d
    (plus M = 0), then hill-climbs from the best sample of each rank.
    Always a lower estimate of :func:`rank_conjugate`.
    """
    if budget < 1:
        raise InputError("budget must be >= 1")
    n = as_matrix(n)
    rows, cols = n.shape
    d = min(rows, cols)
    phi = as_phi(phi, d)
    rng = rng_from(seed)
    best = -float(phi[0])  # M = 0
    per_rank = max(1, budget // d)
    for j in range(1, d + 1):
        if not np.isfinite(phi[j]) and phi[j] > 0:
            continue
        a_all = rng.standard_normal((per_rank, rows, j))
        b_all = rng.standard_normal((per_rank, cols, j))
        vals = np.empty(per_rank)
        for t in range(per_rank):
            mat = a_all[t] @ b_all[t].T
            vals[t] = trace_inner(mat, n) / mn.source_eval(source, mat)
        t = int(np.argmax(vals))
        top = float(vals[t])
        mat = a_all[t] @ b_all[t].T
        if refine and np.any(n):
            top2, mat2 = _local_factor_ascent(source, n, a_all[t], b_all[t], rng)
            if top2 > top:
                top, mat = top2, mat2
        rank = numerical_rank(mat)
        best = max(best, lower_add(top, -float(phi[rank])))
    try:
        exact = rank_conjugate(source, phi, n)
    except UnsupportedSourceError:
        exact = math.nan
    return SampledConjugate(value=float(best), closed_form=exact, gap=exact - best, samples=per_rank * d + 1)


# ---------------------------------------------------------------------------
# rays N = lambda M


def _polyhedral_terms(g, sigma):
    # exact rational arithmetic on the float spectrum
    s = [Fraction(float(v)) for v in sigma]
    d = len(s)
    sq = sum(v * v for v in s)
    if g.kind == "lp" and g.p == 1.0:
        norm = sum(s)
        duals = [s[0]] * d
    elif g.kind == "lp" and g.p == INF:
        norm = s[0]
        duals = list(itertools.accumulate(s))
    else:  # Ky Fan
        k = g.r
        norm = sum(s[: min(k, d)])
        duals = [max(s[0], c / k) for c in itertools.accumulate(s)]
    c = sq / norm
    gaps = [-c] + [dv - c for dv in duals]
    return float(c), np.array([float(x) for x in gaps])


def _ray_terms(source, m, tol):
    """(c, gaps) with c = |M|_F^2 / |M| and gaps[i] = dual_i(M) - c."""
    m = as_matrix(m)
    if not np.any(m):
        raise InputError("M = 0 is excluded")
    g = source.gauge
    if g is None:
        c = trace_inner(m, m) / mn.source_eval(source, m)
        duals = _dual_values(source, m)
        return c, duals - c
    sigma = clean_spectrum(singular_values(m), tol)
    if source.is_frobenius:
        z = sigma / sigma[0]
        sq = z * z
        head = np.sqrt(np.cumsum(sq))
        tail = np.concatenate([np.cumsum(sq[::-1])[::-1][1:], [0.0]])
        c = float(head[-1])
        gaps = np.concatenate([[-c], -tail / (c + head)])
        return sigma[0] * c, sigma[0] * gaps
    if g.polyhedral and (g.kind == "lp" or g.q == 1.0):
        return _polyhedral_terms(g, sigma)
    z = sigma / sigma[0]
    c = float(z @ z) / float(g(z))
    duals = mn.dual_profile(source, z)
    # widen each gap by a rounding bound so rays stay lower estimates
    err = 16.0 * EPS * (z.size + 2) * max(c, float(duals[-1]))
    gaps = duals - c
    gaps[1:] += err
    gaps[0] = -c
    return sigma[0] * c, sigma[0] * gaps


def _ray_value(c_gaps, phi, lam):
    _, gaps = c_gaps
    # lambda c - max_i (lambda dual_i - phi_i) = min_i (phi_i - lambda gap_i)
    return float(np.min(phi - lam * gaps))


def phi_ray(source, m, lam, tol=RANK_TOL):
    """Value at N = lam M of the biconjugate objective for phi = identity.

    Tr(lam M M^T) / |M| - max_i (dual_i(lam M) - i), evaluated in the
    factored form min_i (i - lam (dual_i(M) - |M|_F^2 / |M|)).
    """
    if not lam > 0:
        raise InputError("lambda must be positive")
    m = as_matrix(m)
    d = min(m.shape)
    return _ray_value(_ray_terms(source, m, tol), identity_phi(d), lam)


# ---------------------------------------------------------------------------
# biconjugate sandwich


def _exact_aligned_value(source, sigma, phi, x):
    """Aligned objective in rational arithmetic (polyhedral sources)."""
    g = source.gauge
    z = sorted((Fraction(float(v)) for v in x), reverse=True)
    sig = [Fraction(float(v)) for v in sigma]
    prefix = list(itertools.accumulate(z))
    if g.kind == "lp" and g.p == 1.0:
        norm, duals = sum(sig), [z[0]] * len(z)
    elif g.kind == "lp":
        norm, duals = max(sig), prefix
    else:
        norm = sum(sig[: g.r])
        duals = [max(z[0], pre / g.r) for pre in prefix]
    coupling = sum(a * b for a, b in zip(sig, z)) / norm
    worst = max([-Fraction(float(phi[0]))] + [dv - Fraction(float(f)) for dv, f in zip(duals, phi[1:])])
    return float(coupling - worst)


def _aligned_objective(source, sigma, phi):
    """Lower-safe value of <sigma, x>/g(sigma) - max_i (dual_i(x) - phi_i)."""
    norm = float(source.gauge(sigma))
    g = source.gauge
    exact = g.polyhedral and (g.kind == "lp" or g.q == 1.0) and np.all(np.isfinite(phi))

    def value(x):
        x = np.minimum(np.abs(x), SIGMA_CAP)
        if not np.any(x):
            return float(np.min(phi))
        if exact:
            return _exact_aligned_value(source, sigma, phi, x)
        coupling = float(sigma @ x) / norm
        terms = mn.dual_profile(source, x) - phi
        err = 16.0 * EPS * (x.size + 2) * (abs(coupling) + float(np.max(np.abs(terms[np.isfinite(terms)]))))
        return coupling - float(np.max(terms)) - err

    return value


def _prefix_rows(source, d):
    """Rows a_i with dual_i(x) = max over rows of a_i @ x on the sorted cone."""
    g = source.gauge
    tri = np.tril(np.ones((d, d)))
    first = np.zeros((d, d))
    first[:, 0] = 1.0
    if g.kind == "lp" and g.p == 1.0:
        return [[row] for row in first]
    if g.kind == "lp" and g.p == INF:
        return [[row] for row in tri]
    return [[first[i], tri[i] / g.r] for i in range(d)]  # Ky Fan


def _aligned_lp(source, sigma, phi):
    """Exact aligned-basis maximization for polyhedral sources, as an LP.

    Variables (x_1..x_d, t): maximize <sigma, x>/g(sigma) - t subject to
    dual_i(x) - phi_i <= t and x_1 >= ... >= x_d >= 0.
    """
    d = sigma.size
    norm = float(source.gauge(sigma))
    rows, rhs = [], []
    rows.append(np.append(np.zeros(d), -1.0))  # i = 0: -phi_0 <= t
    rhs.append(phi[0])
    for i, pieces in enumerate(_prefix_rows(source, d), start=1):
        for a in pieces:
            rows.append(np.append(a, -1.0))
            rhs.append(phi[i])
    for j in range(d - 1):  # x_{j+1} - x_j <= 0
        row = np.zeros(d + 1)
        row[j + 1], row[j] = 1.0, -1.0
        rows.append(row)
        rhs.append(0.0)
    cost = np.append(-sigma / norm, 1.0)
    bounds = [(0.0, SIGMA_CAP)] * d + [(None, None)]
    res = linprog(cost, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return res.x[:d]


def _aligned_smooth(source, sigma, phi, start, restarts, rng):
    """Epigraph form solved by SLSQP for lp sources with 1 < p < inf."""
    d = sigma.size
    norm = float(source.gauge(sigma))
    q = vn.conjugate_exponent(source.gauge.p)

    if np.any(phi == -INF):
        return []
    # phi(i) = +inf removes rank i from the conjugate, so drop its constraint
    keep = np.isfinite(phi)

    def cons(z):
        x = z[:d]
        heads = np.concatenate([[0.0], np.cumsum(np.abs(x) ** q) ** (1.0 / q)])
        return np.concatenate([(z[d] - heads + phi)[keep], -np.diff(x)])

    def cost(z):
        return -(float(sigma @ z[:d]) / norm - z[d])

    found = []
    starts = [start] + [np.sort(np.abs(rng.standard_normal(d)))[::-1] * rng.uniform(0.5, 20.0)
                        for _ in range(max(0, restarts - 1))]
    for x0 in starts:
        z0 = np.append(x0, float(np.max((mn.dual_profile(source, x0) - phi)[keep])))
        res = minimize(cost, z0, method="SLSQP",
                       bounds=[(0.0, SIGMA_CAP)] * d + [(None, None)],
                       constraints=[{"type": "ineq", "fun": cons}],
                       options={"maxiter": 500, "ftol": 1e-14})
        found.append(res.x[:d])
    return found


def _aligned_search(source, sigma, phi, restarts, rng, start):
    """max over sigma' >= 0 of <sigma, sigma'>/g(sigma) - conj(diag(sigma')).

    Every candidate is rescored with the exact objective, so the result is
    a valid lower estimate whatever the solver returns.
    """
    value = _aligned_objective(source, sigma, phi)
    g = source.gauge
    cands = [start]
    if g.polyhedral and (g.kind == "lp" or g.q == 1.0):
        x = _aligned_lp(source, sigma, phi)
        if x is not None:
            cands.append(x)
    elif g.kind == "lp":
        cands.extend(_aligned_smooth(source, sigma, phi, start, max(1, restarts // 4), rng))
    else:
        def neg(z):
            return -value(z)
        for _ in range(restarts):
            z0 = start * rng.uniform(0.5, 2.0, size=start.size)
            res = minimize(neg, z0, method="Nelder-Mead", options={"maxfev": 300 * start.size})
            cands.append(res.x)
    return max(value(x) for x in cands)


def _split_candidates(d):
    # nondecreasing assignment of singular-value index -> rank slot
    return itertools.combinations_with_replacement(range(1, d + 1), d)


def _upper_search(source, sigma, phi, atol=1e-9, sweeps=20):
    """Best feasible decomposition U diag(x_r) V^T, as (value, slots matrix)."""
    d = sigma.size
    norm = float(source.gauge(sigma))
    gauges = [None] + [mn.primal_vector_norm(source, r, d)[0] for r in range(1, d + 1)]

    def evaluate(x):
        vals = np.array([float(gauges[r](x[r])) if np.any(x[r]) else 0.0 for r in range(1, d + 1)])
        return float(vals.sum()), float(phi[1:] @ vals)

    best = (INF, None)
    for slots in _split_candidates(d):
        x = np.zeros((d + 1, d))
        for j, r in enumerate(slots):
            x[r, j] = sigma[j]
        used, obj = evaluate(x)
        if used <= norm + atol and obj < best[0]:
            best = (obj, x)
    if best[1] is None:
        return best
    obj, x = best
    step = 0.5
    for _ in range(sweeps):
        moved = False
        for j in range(d):
            for a in range(1, d + 1):
                if x[a, j] <= 0:
                    continue
                for b in range(1, d + 1):
                    if a == b:
                        continue
                    y = x.copy()
                    delta = step * x[a, j]
                    y[a, j] -= delta
                    y[b, j] += delta
                    used, val = evaluate(y)
                    if used <= norm + atol and val < obj - 1e-15:
                        x, obj, moved = y, val, True
        if not moved:
            step *= 0.5
            if step < 1e-6:
                break
    return obj / norm, x


class _LinearProgram:
    """Tiny dense LP builder: named variable blocks, <= and == rows."""

    def __init__(self):
        self.size = 0
        self.bounds = []
        self.ub_rows, self.ub_rhs = [], []
        self.eq_rows, self.eq_rhs = [], []

    def block(self, count, lower=None, upper=None):
        idx = list(range(self.size, self.size + count))
        self.size += count
        self.bounds += [(lower, upper)] * count
        return idx

    def le(self, coeffs, rhs):
        self.ub_rows.append(coeffs)
        self.ub_rhs.append(rhs)

    def eq(self, coeffs, rhs):
        self.eq_rows.append(coeffs)
        self.eq_rhs.append(rhs)

    def _dense(self, rows):
        out = np.zeros((len(rows), self.size))
        for i, coeffs in enumerate(rows):
            for j, v in coeffs.items():
                out[i, j] += v
        return out

    def solve(self, cost):
        c = np.zeros(self.size)
        for j, v in cost.items():
            c[j] = v
        res = linprog(
            c,
            A_ub=self._dense(self.ub_rows) if self.ub_rows else None,
            b_ub=self.ub_rhs or None,
            A_eq=self._dense(self.eq_rows) if self.eq_rows else None,
            b_eq=self.eq_rhs or None,
            bounds=self.bounds,
            method="highs",
            options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
        )
        return res.x if res.status == 0 else None


def _abs_bound(lp, x):
    """Variables a with a >= |x| componentwise."""
    a = lp.block(len(x), lower=0.0)
    for xi, ai in zip(x, a):
        lp.le({xi: 1.0, ai: -1.0}, 0.0)
        lp.le({xi: -1.0, ai: -1.0}, 0.0)
    return a


def _max_linf_l1(lp, a, r, weight=1.0):
    """Variable m >= max(max a, sum a / r); returns m."""
    (m,) = lp.block(1, lower=0.0)
    for ai in a:
        lp.le({ai: 1.0, m: -1.0}, 0.0)
    row = {ai: 1.0 / r for ai in a}
    row[m] = -1.0
    lp.le(row, 0.0)
    return m


def _upper_lp(source, sigma, phi):
    """Best SVD-aligned decomposition for polyhedral sources, as an LP.

    Each r-rank gauge is LP representable: l1 (nuclear, and Ky Fan with
    r <= k), max(l_inf, l1 / r) (spectral) and, for Ky Fan with r > k, the
    infimal convolution min_{u + w = x} |u|_1 + k max(|w|_inf, |w|_1 / r).
    Returns the slot matrix (rows r = 1..d) or None.
    """
    g = source.gauge
    d = sigma.size
    lp = _LinearProgram()
    xs, taus = [], []
    for r in range(1, d + 1):
        x = lp.block(d)
        (tau,) = lp.block(1, lower=0.0)
        if g.kind == "lp" and g.p == 1.0 or g.kind == "top" and r <= g.r:
            a = _abs_bound(lp, x)
            row = {ai: 1.0 for ai in a}
            row[tau] = -1.0
            lp.le(row, 0.0)
        elif g.kind == "lp":
            m = _max_linf_l1(lp, _abs_bound(lp, x), r)
            lp.le({m: 1.0, tau: -1.0}, 0.0)
        else:
            u = lp.block(d)
            w = lp.block(d)
            for xi, ui, wi in zip(x, u, w):
                lp.eq({xi: 1.0, ui: -1.0, wi: -1.0}, 0.0)
            a = _abs_bound(lp, u)
            m = _max_linf_l1(lp, _abs_bound(lp, w), r)
            row = {ai: 1.0 for ai in a}
            row[m] = float(g.r)
            row[tau] = -1.0
            lp.le(row, 0.0)
        xs.append(x)
        taus.append(tau)
    for j in range(d):
        lp.eq({x[j]: 1.0 for x in xs}, float(sigma[j]))
    lp.le({t: 1.0 for t in taus}, float(g(sigma)))
    sol = lp.solve({t: float(phi[r]) for r, t in enumerate(taus, start=1)})
    if sol is None:
        return None
    slots = np.array([sol[x] for x in xs])
    # restore the sum constraint exactly on the last populated slot
    slots[-1] = sigma - slots[:-1].sum(axis=0)
    return slots


def _score_slots(source, sigma, phi, slots, atol=1e-9):
    """Objective of an aligned decomposition, or inf if it breaks the budget."""
    d = sigma.size
    norm = float(source.gauge(sigma))
    vals = [
        float(mn.primal_vector_norm(source, r, d)[0](slots[r - 1])) if np.any(slots[r - 1]) else 0.0
        for r in range(1, d + 1)
    ]
    if sum(vals) > norm + atol:
        return INF
    return float(np.dot(phi[1:], vals)) / norm


def rank_biconjugate(source, phi, m, budget=8, seed=0, tol=RANK_TOL,
                     lambda_exponents=LAMBDA_EXPONENTS):
    """Bracket the Capra biconjugate of phi(rank) at m.

    lower: best of the ray candidates N = 10^k M and, for unitarily
    invariant sources, a search over N sharing M's singular bases (an exact
    linear program for polyhedral sources, ``budget`` SLSQP starts
    otherwise). upper: best feasible decomposition found by a linear program
    over aligned splits (polyhedral sources) or by split enumeration and a
    mass-transfer descent; +inf when phi is not admissible or the source has
    no exact r-rank norms.
    """
    m = as_matrix(m)
    if not np.any(m):
        raise InputError("the biconjugate formula is stated for M != 0")
    d = min(m.shape)
    phi = as_phi(phi, d)
    rng = rng_from(seed)
    terms = _ray_terms(source, m, tol)
    grid = [10.0**e for e in lambda_exponents]
    rays = [_ray_value(terms, phi, lam) for lam in grid]
    # N = 0 contributes -conj(0) = min_i phi(i)
    lower = max(max(rays), float(np.min(phi)))
    meta = {"lambda_grid": grid, "ray_values": rays, "budget": budget, "seed": seed}
    if source.unitarily_invariant and budget > 0:
        sigma = clean_spectrum(singular_values(m), tol)
        best_lam = grid[int(np.argmax(rays))]
        aligned = _aligned_search(source, sigma, phi, budget, rng, best_lam * sigma)
        meta["aligned_value"] = aligned
        lower = max(lower, aligned)
    upper = INF
    if biconjugate_admissible(phi) and source.unitarily_invariant:
        sigma = clean_spectrum(singular_values(m), tol)
        exact = all(mn.primal_vector_norm(source, r, d)[2] for r in range(1, d + 1))
        if exact:
            g = source.gauge
            lp_slots = None
            if g.polyhedral and (g.kind == "lp" or g.q == 1.0):
                lp_slots = _upper_lp(source, sigma, phi)
            if lp_slots is not None:
                upper, slots = _score_slots(source, sigma, phi, lp_slots), lp_slots
            if lp_slots is None or not np.isfinite(upper):
                upper, slots = _upper_search(source, sigma, phi)
                slots = None if slots is None else slots[1:]
            meta["upper_slots"] = None if slots is None else slots.tolist()
    return BoundEstimate(lower=float(lower), upper=float(upper), meta=meta)


def decomposition_from_slots(m, slots, tol=RANK_TOL):
    """Matrices U diag(slots[r-1]) V^T for the singular bases of m."""
    u, s, v = svd(as_matrix(m))
    k = s.size
    return Decomposition([(u[:, :k] * np.asarray(row)) @ v[:, :k].T for row in slots])


def variational_bound(source, m, budget=8, seed=0, tol=RANK_TOL):
    """Variational lower bound of rank(M): the biconjugate with phi = identity."""
    m = as_matrix(m)
    if not np.any(m):
        raise InputError("the variational bound is stated for M != 0")
    d = min(m.shape)
    est = rank_biconjugate(source, identity_phi(d), m, budget, seed, tol)
    est.meta["rank"] = numerical_rank(m, tol)
    return est


def frobenius_equality_report(m, lambda_max_exp=8, tol=RANK_TOL):
    """Ray values phi(10^k), k = 0..lambda_max_exp, for the Frobenius source."""
    m = as_matrix(m)
    if not np.any(m):
        raise InputError("M = 0 is excluded")
    if lambda_max_exp < 0:
        raise InputError("lambda_max_exp must be >= 0")
    source = mn.SourceNorm.schatten(2)
    terms = _ray_terms(source, m, tol)
    d = min(m.shape)
    grid = [10.0**e for e in range(lambda_max_exp + 1)]
    values = [_ray_value(terms, identity_phi(d), lam) for lam in grid]
    rank = numerical_rank(m, tol)
    return {
        "rank": rank,
        "lambda_grid": grid,
        "ray_values": values,
        "converged": abs(values[-1] - rank) <= 1e-3,
    }
