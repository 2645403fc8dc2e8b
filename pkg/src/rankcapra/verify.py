"""Acceptance checks shared by ``rankcapra verify`` and the test-suite.

Each ``criterion_N(seed)`` returns a :class:`CriterionResult`. A criterion
passes when every numerical check holds at its tolerance and the wall time
is within the limit.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import itertools
import math
import os
import time
import warnings

import numpy as np
from scipy.optimize import linprog, minimize

from . import capra, oracle
from . import matrix_norms as mn
from . import vector_norms as vn
from .linalg import numerical_rank, random_rank_r
from .vector_norms import INF, SymmetricGauge


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    checks: int
    failures: list
    seconds: float
    limit: float

    @property
    def line(self):
        status = "PASS" if self.passed else "FAIL"
        out = f"[{status}] criterion {self.number:2d}: {self.title} ({self.checks} checks, {self.seconds:.3g}s / {self.limit:g}s)"
        if self.failures:
            out += f" first failure: {self.failures[0]}"
        return out


class _Tally:
    def __init__(self):
        self.checks = 0
        self.failures = []

    def check(self, ok, what):
        self.checks += 1
        if not ok:
            self.failures.append(what)


def _run(number, title, limit, body):
    tally = _Tally()
    t0 = time.perf_counter()
    body(tally)
    seconds = time.perf_counter() - t0
    failures = list(tally.failures)
    if seconds > limit:
        failures.append(f"runtime {seconds:.3g}s over the {limit:g}s limit")
    return CriterionResult(number, title, not failures, tally.checks, failures, seconds, limit)


def _sv(m):
    # reference singular values from LAPACK, independent of the Jacobi kernel
    return np.linalg.svd(m, compute_uv=False)


SOURCES = (
    mn.SourceNorm.schatten(1.0),
    mn.SourceNorm.schatten(2.0),
    mn.SourceNorm.schatten(INF),
    mn.SourceNorm.kyfan(2),
)


# ---------------------------------------------------------------------------
# 1. the submatrix l1 counterexample


def criterion_1(seed=0):
    def body(t):
        mats = (np.ones((2, 2)), np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
        elapsed = INF
        for _ in range(5):  # best of five, as timeit does
            start = time.perf_counter()
            whole, first, second = (mn.submatrix_top_l1(m, 1) for m in mats)
            elapsed = min(elapsed, time.perf_counter() - start)
        t.check(whole == 4.0, f"whole = {whole}")
        t.check(first == 1.0 and second == 1.0, f"pieces = {first}, {second}")
        t.check(whole > first + second, "triangle inequality not violated")
        t.check(elapsed < 1e-3, f"evaluation took {elapsed * 1e3:.3f} ms")

    return _run(1, "submatrix l1 counterexample 4 > 1 + 1", 1e-2, body)


# ---------------------------------------------------------------------------
# 2. norm axioms


def _vector_norms():
    out = []
    for p in (1.0, 1.5, 2.0, 3.0, INF):
        out.append((f"lp:{p}", lambda x, r, p=p: vn.lp_norm(x, p)))
    for q in (1.0, 2.0, INF):
        out.append((f"top:q={q}", lambda x, r, q=q: vn.top_norm(x, q, r)))
    out.append(("ksup2", lambda x, r: vn.ksupport2_norm(x, r)))
    for p in (1.0, 2.0, INF):
        g = SymmetricGauge.lp(p)
        out.append((f"dualcoord:lp{p}", lambda x, r, g=g: vn.dual_coordinate_norm(g, r, x)))
    g = SymmetricGauge.top(1.0, 2)
    out.append(("dualcoord:kyfan2", lambda x, r, g=g: vn.dual_coordinate_norm(g, r, x)))
    return out


def _matrix_norms():
    out = []
    for s in SOURCES + (mn.SourceNorm.schatten(3.0), mn.SourceNorm.kyfan(1)):
        out.append((f"source {s}", lambda m, r, s=s: mn.source_eval(s, m)))
    for s in SOURCES:
        out.append((f"dual-rrank {s}", lambda m, r, s=s: mn.dual_rrank_norm(s, r, m)))
        out.append((f"rrank {s}", lambda m, r, s=s: mn.rrank_norm(s, r, m)))
    return out


def _axioms(t, name, f, x, y, alpha, r):
    fx, fy = f(x, r), f(y, r)
    scaled = f(alpha * x, r)
    t.check(abs(scaled - abs(alpha) * fx) <= 1e-12 * max(1.0, abs(alpha) * fx), f"{name}: homogeneity")
    t.check(f(x + y, r) <= fx + fy + 1e-9, f"{name}: triangle")
    t.check(f(np.zeros_like(x), r) <= 1e-14 and fx > 1e-14, f"{name}: definiteness")


def criterion_2(seed=0, samples=500):
    def body(t):
        rng = np.random.default_rng(seed)
        for name, f in _vector_norms():
            for _ in range(samples):
                d = int(rng.integers(2, 6)) if name.endswith("kyfan2") else int(rng.integers(1, 6))
                r = int(rng.integers(1, d + 1))
                x, y = rng.standard_normal((2, d))
                _axioms(t, name, f, x, y, float(rng.uniform(-5, 5)), r)
        for name, f in _matrix_norms():
            for _ in range(samples):
                rows, cols = (int(v) for v in rng.integers(2, 6, size=2))
                r = int(rng.integers(1, min(rows, cols) + 1))
                x, y = rng.standard_normal((2, rows, cols))
                _axioms(t, name, f, x, y, float(rng.uniform(-5, 5)), r)

    return _run(2, "norm axioms on 500 random inputs per norm", 5.0, body)


# ---------------------------------------------------------------------------
# 3. monotone chains and endpoints


def _source_dual_reference(s, sv):
    g = s.gauge
    if g.kind == "lp":
        return vn.lp_norm(sv, vn.conjugate_exponent(g.p))
    return max(sv[0], sv.sum() / g.r)  # dual of Ky Fan k


def criterion_3(seed=0, count=200):
    def body(t):
        rng = np.random.default_rng(seed)
        for s in SOURCES:
            for _ in range(count):
                rows, cols = (int(v) for v in rng.integers(2, 6, size=2))
                m = rng.standard_normal((rows, cols))
                d = min(rows, cols)
                duals = [mn.dual_rrank_norm(s, r, m) for r in range(1, d + 1)]
                prims = [mn.rrank_norm(s, r, m) for r in range(1, d + 1)]
                scale = max(duals[-1], prims[0])
                t.check(all(b >= a - 1e-12 * scale for a, b in zip(duals, duals[1:])), f"{s}: duals not nondecreasing")
                t.check(all(b <= a + 1e-12 * scale for a, b in zip(prims, prims[1:])), f"{s}: primals not nonincreasing")
                sv = _sv(m)
                t.check(abs(duals[-1] - _source_dual_reference(s, sv)) <= 1e-9, f"{s}: dual endpoint")
                t.check(abs(prims[-1] - mn.source_eval(s, m)) <= 1e-9, f"{s}: primal endpoint")
                t.check(abs(prims[-1] - float(s.gauge(sv))) <= 1e-9, f"{s}: primal endpoint (reference)")

    return _run(3, "monotone chains and endpoints", 5.0, body)


# ---------------------------------------------------------------------------
# 4. Von Neumann trace inequality


def criterion_4(seed=0, pairs=200, samples=100):
    def body(t):
        rng = np.random.default_rng(seed)
        for k in range(pairs):
            m, n = rng.standard_normal((2, 4, 4))
            rec = oracle.vonneumann_extremal_check(m, n, samples, seed + k)
            t.check(rec["max_sampled"] <= rec["inner_product"] + 1e-9, f"pair {k}: sampled above bound")
            t.check(abs(rec["aligned_value"] - rec["inner_product"]) <= 1e-9, f"pair {k}: aligned value")

    return _run(4, "Von Neumann trace inequality and aligned equality", 10.0, body)


# ---------------------------------------------------------------------------
# 5. generic estimator against the closed form


def criterion_5(seed=0, count=20, restarts=50):
    def body(t):
        rng = np.random.default_rng(seed)
        for k in range(count):
            n = rng.standard_normal((3, 3))
            for p in (1.0, 2.0, INF):
                s = mn.SourceNorm.schatten(p)
                for r in (1, 2, 3):
                    exact = mn.dual_rrank_norm(s, r, n)
                    est = mn.dual_rrank_generic(s, r, n, restarts=restarts, seed=seed + k)
                    t.check(est <= exact + 1e-9, f"{s} r={r}: estimate above closed form")
                    t.check(abs(est - exact) <= 1e-3 * exact, f"{s} r={r}: {est} vs {exact}")

    return _run(5, "generic rank-constrained estimator matches top-(q,r)", 60.0, body)


# ---------------------------------------------------------------------------
# 6. rank-norm table rows


def ksupport_variational(x, r):
    """(2, r)-support norm from min{sum x_i^2 / theta_i : 0 <= theta <= 1, sum theta = r}."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    d = x.size
    if r >= d:
        return float(np.linalg.norm(x))
    scale = x.max()
    if scale == 0.0:
        return 0.0
    z = x / scale

    def clip(th):
        return np.clip(th, 1e-12, 1.0)

    with warnings.catch_warnings():
        # SLSQP may step slightly outside the bounds before clipping back
        warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
        res = minimize(
            lambda th: float(np.sum(z**2 / clip(th))),
            np.full(d, r / d),
            jac=lambda th: -(z**2) / clip(th) ** 2,
            method="SLSQP",
            bounds=[(1e-12, 1.0)] * d,
            constraints=[{"type": "eq", "fun": lambda th: th.sum() - r, "jac": lambda th: np.ones(d)}],
            options={"ftol": 1e-15, "maxiter": 500},
        )
    return float(scale * math.sqrt(res.fun))


def kyfan_dual_lp(x, r):
    """Dual of the Ky Fan r vector norm by linear programming."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    d = x.size
    rows = []
    for support in itertools.combinations(range(d), r):
        row = np.zeros(d)
        row[list(support)] = 1.0
        rows.append(row)
    res = linprog(-x, A_ub=np.array(rows), b_ub=np.ones(len(rows)), bounds=[(0, None)] * d, method="highs")
    return float(-res.fun)


def lp_top_dual_search(x, q, r, starts=6, seed=0):
    """Dual of top-(q, r) by multi-start Nelder-Mead on the ratio <x, y> / top(y)."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    rng = np.random.default_rng(seed)

    def neg(y):
        den = vn.top_norm(y, q, r)
        return -float(x @ y) / den if den > 0 else 0.0

    best = -neg(x)
    for k in range(starts):
        y0 = x if k == 0 else np.abs(rng.standard_normal(x.size))
        res = minimize(neg, y0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        best = max(best, -float(res.fun))
    return best


def table_rows():
    """(source, r-range test, dual reference, primal reference, primal is an oracle row)."""
    return [
        (mn.SourceNorm.schatten(1.0), lambda sv, r: sv[0], lambda sv, r: sv.sum(), False),
        (mn.SourceNorm.schatten(2.0), lambda sv, r: np.linalg.norm(sv[:r]), ksupport_variational, False),
        (mn.SourceNorm.schatten(INF), lambda sv, r: sv[:r].sum(), kyfan_dual_lp, False),
        (mn.SourceNorm.kyfan(2), lambda sv, r: sv[0], lambda sv, r: sv.sum(), False),
        (
            mn.SourceNorm.schatten(3.0),
            lambda sv, r: vn.lp_norm(sv[:r], 1.5),
            lambda sv, r: lp_top_dual_search(sv, 1.5, r),
            True,
        ),
    ]


def criterion_6(seed=0, count=20):
    def body(t):
        rng = np.random.default_rng(seed)
        mats = [np.diag([3.0, 2.0, 1.0])] + [rng.standard_normal((3, 3)) for _ in range(count)]
        for s, dual_ref, primal_ref, oracle_row in table_rows():
            rmax = s.k if s.kind == "kyfan" else 3
            for m in mats:
                sv = _sv(m)
                for r in range(1, rmax + 1):
                    dv, ref = mn.dual_rrank_norm(s, r, m), float(dual_ref(sv, r))
                    t.check(abs(dv - ref) <= 1e-6 * max(1.0, ref), f"{s} dual r={r}: {dv} vs {ref}")
                    pv = mn.rrank_norm(s, r, m)
                    if r == 3:
                        pref = float(s.gauge(sv))
                    else:
                        pref = float(primal_ref(sv, r))
                    tol = 1e-3 if oracle_row and r < 3 else 1e-6
                    t.check(abs(pv - pref) <= tol * max(1.0, pref), f"{s} primal r={r}: {pv} vs {pref}")

    return _run(6, "rank-norm table rows on diag(3,2,1) and random 3x3", 30.0, body)


# ---------------------------------------------------------------------------
# 7. conjugate closed form against direct sampling


def criterion_7(seed=0, instances=10, pairs=100, budget=5000):
    def body(t):
        rng = np.random.default_rng(seed)
        frob = mn.SourceNorm.schatten(2.0)
        for k in range(instances):
            n = rng.standard_normal((2, 2)) * rng.uniform(0.5, 3.0)
            res = capra.conjugate_sampled(frob, capra.identity_phi(2), n, budget, seed + k)
            t.check(res.value <= res.closed_form + 1e-9, f"instance {k}: sampled above closed form")
            t.check(res.gap <= 1e-2, f"instance {k}: gap {res.gap}")
        for s in SOURCES:
            for _ in range(pairs):
                rows, cols = (int(v) for v in rng.integers(2, 6, size=2))
                d = min(rows, cols)
                m = random_rank_r(rows, cols, int(rng.integers(1, d + 1)), rng)
                n = rng.standard_normal((rows, cols)) * rng.uniform(0.1, 10.0)
                phi = capra.identity_phi(d)
                lhs = capra.rank_conjugate(s, phi, n)
                rhs = capra.coupling(s, m, n) - phi[numerical_rank(m)]
                t.check(lhs >= rhs - 1e-9, f"{s}: conjugate below a sampled value")

    return _run(7, "closed-form conjugate dominates sampling; gap <= 1e-2", 30.0, body)


# ---------------------------------------------------------------------------
# 8 and 9. variational bound


def _random_instance(rng, k):
    rows, cols = (int(v) for v in rng.integers(1, 6, size=2))
    d = min(rows, cols)
    if k % 4 == 0:
        return rng.standard_normal((rows, cols))
    return random_rank_r(rows, cols, int(rng.integers(1, d + 1)), rng)


def criterion_8(seed=0, count=200):
    def body(t):
        rng = np.random.default_rng(seed)
        for k in range(count):
            m = _random_instance(rng, k)
            rank = numerical_rank(m)
            for s in SOURCES:
                if s.kind == "kyfan" and min(m.shape) < s.k:
                    s = mn.SourceNorm.kyfan(min(m.shape))
                est = capra.variational_bound(s, m, seed=seed + k)
                t.check(est.lower <= rank + 1e-9, f"{s}: lower {est.lower} above rank {rank}")
                t.check(est.lower <= est.upper + 1e-12, f"{s}: lower above upper")

    return _run(8, "variational bound never exceeds the rank", 60.0, body)


def criterion_9(seed=0, per_shape=2):
    def body(t):
        rng = np.random.default_rng(seed)
        frob = mn.SourceNorm.schatten(2.0)
        k = 0
        for rows, cols in itertools.product(range(1, 6), repeat=2):
            d = min(rows, cols)
            for rank in range(1, d + 1):
                for _ in range(per_shape):
                    k += 1
                    m = random_rank_r(rows, cols, rank, rng)
                    rep = capra.frobenius_equality_report(m, 8)
                    t.check(abs(rep["ray_values"][-1] - rank) <= 1e-3, f"{rows}x{cols} rank {rank}: ray {rep['ray_values'][-1]}")
                    est = capra.rank_biconjugate(frob, capra.identity_phi(d), m, seed=seed + k)
                    t.check(est.upper >= rank - 1e-3, f"{rows}x{cols} rank {rank}: upper {est.upper}")
                    t.check(abs(est.lower - rank) <= 1e-3, f"{rows}x{cols} rank {rank}: lower {est.lower}")

    return _run(9, "Frobenius source: the bound equals the rank", 60.0, body)


# ---------------------------------------------------------------------------
# 10. dual r-rank case split for the Frobenius source


def criterion_10(seed=0, count=100):
    def body(t):
        rng = np.random.default_rng(seed)
        frob = mn.SourceNorm.schatten(2.0)
        for _ in range(count):
            rows, cols = (int(v) for v in rng.integers(1, 6, size=2))
            d = min(rows, cols)
            rank = int(rng.integers(1, d + 1))
            m = random_rank_r(rows, cols, rank, rng)
            total = np.linalg.norm(m)
            for ell in range(1, d + 1):
                v = mn.dual_rrank_norm(frob, ell, m)
                if ell >= rank:
                    t.check(abs(v - total) <= 1e-9, f"l={ell} >= r={rank}: {v} vs {total}")
                else:
                    t.check(v <= total - 1e-6, f"l={ell} < r={rank}: {v} not below {total}")

    return _run(10, "Frobenius dual r-rank case split", 5.0, body)


# ---------------------------------------------------------------------------
# 11. k-support closed form against the dual-norm oracle


def criterion_11(seed=0, count=200):
    def body(t):
        rng = np.random.default_rng(seed)
        for k in range(count):
            d = int(rng.integers(1, 6))
            x = rng.standard_normal(d)
            for r in range(1, d + 1):
                closed = vn.ksupport2_norm(x, r)
                est = vn.dual_norm_oracle(SymmetricGauge.top(2.0, r), x, seed=seed + k)
                t.check(abs(closed - est) <= 1e-3 * max(1.0, closed), f"d={d} r={r}: {closed} vs {est}")

    return _run(11, "k-support closed form against the dual-norm oracle", 30.0, body)


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
)


def thread_limit():
    """Worker threads allowed by RANKCAPRA_THREADS (default 1)."""
    raw = os.environ.get("RANKCAPRA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_all(seed=0, threads=None):
    """Run every criterion; results come back in criterion order."""
    threads = thread_limit() if threads is None else max(1, int(threads))
    if threads == 1:
        return [c(seed) for c in CRITERIA]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: c(seed), CRITERIA))
