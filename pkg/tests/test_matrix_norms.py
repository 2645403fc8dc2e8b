import math

import numpy as np
import pytest

from rankcapra.errors import InputError, UnsupportedSourceError
from rankcapra.linalg import random_orthogonal, singular_values
from rankcapra.matrix_norms import (
    SourceNorm,
    build_family,
    dual_rrank_generic,
    dual_rrank_norm,
    parse_source,
    primal_vector_norm,
    rrank_norm,
    source_eval,
    submatrix_top_l1,
)
from rankcapra.vector_norms import INF, SymmetricGauge, dual_norm_oracle, ksupport2_norm

D321 = np.diag([3.0, 2.0, 1.0])
FROB = SourceNorm.schatten(2)
NUC = SourceNorm.schatten(1)
SPEC = SourceNorm.schatten(INF)


def test_source_eval_examples():
    assert source_eval(FROB, [[1, 1], [1, 1]]) == pytest.approx(2.0, abs=1e-14)
    assert source_eval(NUC, D321) == 6.0
    assert source_eval(SourceNorm.kyfan(2), D321) == 5.0
    assert source_eval(SourceNorm.generic(lambda m: np.abs(m).sum()), D321) == 6.0


def test_source_validation_and_parsing():
    with pytest.raises(InputError):
        SourceNorm.schatten(0.5)
    with pytest.raises(InputError):
        SourceNorm.kyfan(0)
    assert parse_source("frobenius") == FROB
    assert parse_source("spectral") == SPEC
    assert parse_source("kyfan:2") == SourceNorm.kyfan(2)
    assert parse_source("gauge:ksup2:r=2") == SourceNorm.from_gauge(SymmetricGauge.ksup2(2))
    for bad in ("schatten:x", "kyfan:two", "triangle:1"):
        with pytest.raises(InputError):
            parse_source(bad)
    for s in (FROB, NUC, SPEC, SourceNorm.kyfan(3), SourceNorm.schatten(3)):
        assert parse_source(str(s)) == s


def test_dual_rrank_examples():
    assert dual_rrank_norm(FROB, 2, D321) == pytest.approx(math.sqrt(13), abs=1e-14)
    assert dual_rrank_norm(SPEC, 2, D321) == pytest.approx(5.0, abs=1e-14)
    assert dual_rrank_norm(FROB, 1, D321) == pytest.approx(3.0, abs=1e-14)
    assert dual_rrank_norm(FROB, 0, D321) == 0.0
    for r in (1, 2, 3):
        assert dual_rrank_norm(NUC, r, D321) == pytest.approx(3.0, abs=1e-14)
    with pytest.raises(InputError):
        dual_rrank_norm(FROB, 4, D321)
    with pytest.raises(UnsupportedSourceError):
        dual_rrank_norm(SourceNorm.generic(np.linalg.norm), 1, D321)


def test_dual_at_full_rank_is_dual_source_norm(rng):
    for _ in range(20):
        n = rng.standard_normal((3, 4))
        s = singular_values(n)
        assert dual_rrank_norm(FROB, 3, n) == pytest.approx(np.linalg.norm(s), rel=1e-13)
        assert dual_rrank_norm(NUC, 3, n) == pytest.approx(s[0], rel=1e-13)
        assert dual_rrank_norm(SPEC, 3, n) == pytest.approx(s.sum(), rel=1e-13)
        kf = SourceNorm.kyfan(2)
        assert dual_rrank_norm(kf, 3, n) == pytest.approx(max(s[0], s.sum() / 2), rel=1e-13)


def test_dual_chain_nondecreasing(rng):
    for s in (FROB, NUC, SPEC, SourceNorm.schatten(3), SourceNorm.kyfan(2)):
        for _ in range(10):
            n = rng.standard_normal((4, 3))
            vals = [dual_rrank_norm(s, r, n) for r in range(4)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_primal_chain_nonincreasing_and_ends_at_source(rng):
    for s in (FROB, NUC, SPEC, SourceNorm.kyfan(2)):
        for _ in range(10):
            m = rng.standard_normal((3, 3))
            vals = [rrank_norm(s, r, m) for r in range(1, 4)]
            assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
            assert vals[-1] == pytest.approx(source_eval(s, m), rel=1e-12)


def test_dual_generic_examples():
    n = D321
    assert dual_rrank_generic(FROB, 3, n) == pytest.approx(math.sqrt(14), abs=1e-6)
    assert dual_rrank_generic(FROB, 1, n) == pytest.approx(3.0, abs=1e-6)
    assert dual_rrank_generic(FROB, 2, np.zeros((3, 3))) == 0.0
    with pytest.raises(InputError):
        dual_rrank_generic(FROB, 1, n, restarts=0)


def test_dual_generic_matches_closed_forms(rng):
    for s in (FROB, NUC, SPEC, SourceNorm.schatten(3), SourceNorm.kyfan(2)):
        n = rng.standard_normal((3, 3))
        for r in (1, 2, 3):
            closed = dual_rrank_norm(s, r, n)
            est = dual_rrank_generic(s, r, n, restarts=20, seed=1)
            assert est <= closed * (1 + 1e-9)
            assert est == pytest.approx(closed, rel=1e-3)


def test_dual_generic_on_non_invariant_source():
    # entrywise l1 as source: its dual norm max |n_ij| is already attained by
    # the rank-one matrices e_i e_j^T, so every dual r-rank norm equals it
    src = SourceNorm.generic(lambda m: float(np.abs(m).sum()), "entrywise-l1")
    n = np.array([[1.0, -2.0], [0.5, 3.0]])
    est = dual_rrank_generic(src, 1, n, restarts=10, seed=0)
    assert est == pytest.approx(3.0, abs=1e-4)


def test_dual_generic_monotone_in_restarts():
    n = np.random.default_rng(5).standard_normal((3, 3))
    vals = [dual_rrank_generic(SourceNorm.schatten(3), 2, n, restarts=k, seed=4) for k in (1, 3, 9)]
    assert vals[0] <= vals[1] <= vals[2]


def test_rrank_examples():
    for r in (1, 2, 3):
        assert rrank_norm(NUC, r, D321) == pytest.approx(6.0, abs=1e-14)
    assert rrank_norm(FROB, 3, D321) == pytest.approx(math.sqrt(14), abs=1e-14)
    assert rrank_norm(FROB, 2, D321) == pytest.approx(ksupport2_norm([3, 2, 1], 2), abs=1e-14)
    with pytest.raises(InputError):
        rrank_norm(FROB, 0, D321)


def test_spectral_rrank_row():
    # the r-rank norm of the spectral source is max(s_1, |s|_1 / r), the dual
    # of the top-(1, r) norm; the plain spectral norm s_1 is not correct
    assert rrank_norm(SPEC, 1, D321) == pytest.approx(6.0, abs=1e-14)
    assert rrank_norm(SPEC, 2, D321) == pytest.approx(3.0, abs=1e-14)
    assert rrank_norm(SPEC, 3, D321) == pytest.approx(3.0, abs=1e-14)


def test_spectral_row_cannot_be_the_plain_spectral_norm():
    # a norm whose unit ball lies inside the dual r-rank ball must dominate it
    # on the extreme points; s_1 at r = 1 gives <M, N> > s_1(M) dual_1(N)
    m = D321
    n = np.eye(3)
    inner = float(np.sum(m * n))
    assert inner > singular_values(m)[0] * dual_rrank_norm(SPEC, 1, n)
    assert inner <= rrank_norm(SPEC, 1, m) * dual_rrank_norm(SPEC, 1, n) + 1e-12


def test_holder_pairing(rng):
    for s in (FROB, NUC, SPEC, SourceNorm.kyfan(2), SourceNorm.schatten(3)):
        for _ in range(20):
            m = rng.standard_normal((3, 3))
            n = rng.standard_normal((3, 3))
            for r in (1, 2):
                lhs = float(np.sum(m * n))
                assert lhs <= rrank_norm(s, r, m) * dual_rrank_norm(s, r, n) * (1 + 1e-9) + 1e-12


def test_rrank_matches_oracle(rng):
    for s in (FROB, SPEC, SourceNorm.kyfan(2)):
        for _ in range(4):
            m = rng.standard_normal((3, 3))
            sv = singular_values(m)
            for r in (1, 2):
                closed = rrank_norm(s, r, m)
                fam = build_family(s)
                dual = lambda y, r=r: dual_rrank_norm(s, r, np.diag(y))
                est = dual_norm_oracle(dual, sv, budget=2000, seed=0)
                assert est == pytest.approx(closed, rel=1e-3)
                assert fam.primal(r)(m) == closed


def test_kyfan_beyond_k_matches_lp():
    rng = np.random.default_rng(11)
    kf = SourceNorm.kyfan(2)
    for _ in range(30):
        x = np.sort(rng.uniform(0, 3, size=4))[::-1]
        # dual of y -> max(|y|_inf, top_1_r(y) / 2) at r = 3, 4 via an LP
        for r in (3, 4):
            f, kind, exact = primal_vector_norm(kf, r, 4)
            assert exact
            assert f(x) == pytest.approx(_kf_lp(x, 2, r), rel=1e-9)


def _kf_lp(x, k, r):
    from scipy.optimize import linprog

    d = x.size
    # maximize <x, y> s.t. |y_i| <= 1 and top_1_r(|y|) <= k; y >= 0 suffices for x >= 0
    # top-r sum constraint: r t + sum u_i <= k, u_i >= y_i - t, u >= 0
    c = np.concatenate([-x, [0.0], np.zeros(d)])
    a = []
    b = []
    row = np.concatenate([np.zeros(d), [r], np.ones(d)])
    a.append(row)
    b.append(k)
    for i in range(d):
        row = np.zeros(2 * d + 1)
        row[i] = 1.0
        row[d] = -1.0
        row[d + 1 + i] = -1.0
        a.append(row)
        b.append(0.0)
    bounds = [(0, 1)] * d + [(None, None)] + [(0, None)] * d
    res = linprog(c, A_ub=np.array(a), b_ub=np.array(b), bounds=bounds, method="highs")
    return -res.fun


def test_unitary_invariance(rng):
    for s in (FROB, NUC, SPEC, SourceNorm.kyfan(2), SourceNorm.schatten(3)):
        m = rng.standard_normal((3, 4))
        u = random_orthogonal(3, rng)
        v = random_orthogonal(4, rng)
        for r in (1, 2, 3):
            assert dual_rrank_norm(s, r, u @ m @ v) == pytest.approx(dual_rrank_norm(s, r, m), rel=1e-12)
            assert rrank_norm(s, r, u @ m @ v) == pytest.approx(rrank_norm(s, r, m), rel=1e-10)


def test_submatrix_examples():
    assert submatrix_top_l1([[1, 1], [1, 1]], 1) == 4.0
    assert submatrix_top_l1([[1, 0], [0, 1]], 1) == 1.0
    assert submatrix_top_l1([[0, 1], [1, 0]], 1) == 1.0
    with pytest.raises(InputError):
        submatrix_top_l1(np.ones((5, 4)), 1)


def test_submatrix_is_not_a_norm():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    lhs = submatrix_top_l1(a + b, 1)
    rhs = submatrix_top_l1(a, 1) + submatrix_top_l1(b, 1)
    assert lhs == 4.0 and rhs == 2.0
    assert lhs > rhs


def test_family_rows():
    frob = build_family(FROB)
    assert frob.dual_kind(2, 3) == ("top(q=2,r=2) of s", True)
    assert frob.primal_kind(2, 3) == ("ksupport2(r=2)", True)
    nuc = build_family(NUC)
    assert all(nuc.dual_kind(r, 3) == ("spectral", True) for r in (1, 2, 3))
    kf = build_family(SourceNorm.kyfan(2))
    assert kf.primal_kind(1, 3) == ("nuclear", True)
    assert kf.primal_kind(2, 3) == ("nuclear", True)
    assert kf.dual_kind(3, 3)[1] is False
    rows = frob.rows(3)
    assert len(rows) == 6 and all(row["closed_form"] for row in rows)
    assert len(frob.duals(3)) == 3
    assert frob.duals(3)[1](D321) == pytest.approx(math.sqrt(13))
    with pytest.raises(InputError):
        build_family("frobenius")


def test_general_p_goes_through_oracle(rng):
    s = SourceNorm.schatten(3)
    f, kind, exact = primal_vector_norm(s, 2, 3)
    assert not exact
    m = rng.standard_normal((3, 3))
    v = rrank_norm(s, 2, m)
    assert source_eval(s, m) <= v * (1 + 1e-9)
    assert v <= rrank_norm(s, 1, m) * (1 + 1e-3)
