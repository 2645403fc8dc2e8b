import math

import numpy as np
import pytest

from rankcapra.errors import InputError
from rankcapra.matrix_norms import SourceNorm, dual_rrank_norm
from rankcapra.oracle import (
    GaugeSparseSphere,
    NormBall,
    RankSphere,
    SupportProblem,
    support_estimate,
    vonneumann_extremal_check,
)
from rankcapra.vector_norms import INF, SymmetricGauge, lp_norm, top_norm


def test_ball_examples(rng):
    for _ in range(5):
        x = rng.standard_normal(int(rng.integers(1, 5)))
        p = SupportProblem(x, NormBall(lambda y: lp_norm(y, 2)))
        assert support_estimate(p) == pytest.approx(lp_norm(x, 2), abs=1e-6)


def test_ball_of_a_matrix_norm():
    n = np.diag([3.0, 2.0, 1.0])
    nuc = SourceNorm.schatten(1)
    est = support_estimate(SupportProblem(n, NormBall(nuc)))
    assert est == pytest.approx(3.0, abs=1e-3)


def test_sparse_sphere_example():
    p = SupportProblem(np.array([3.0, 2.0, 1.0]), GaugeSparseSphere(SymmetricGauge.lp(2), 1))
    assert support_estimate(p) == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("pexp", [1.0, 1.5, 2.0, 3.0, INF])
def test_exhaustive_patterns_reproduce_top_norm(pexp, rng):
    g = SymmetricGauge.lp(pexp)
    q = 1.0 if pexp == INF else (INF if pexp == 1.0 else pexp / (pexp - 1.0))
    for _ in range(25):
        d = int(rng.integers(1, 5))
        x = rng.standard_normal(d)
        r = int(rng.integers(1, d + 1))
        est = support_estimate(SupportProblem(x, GaugeSparseSphere(g, r), budget=50))
        assert est == pytest.approx(top_norm(x, q, r), rel=1e-12, abs=1e-12)


def test_rank_sphere_full_rank_is_self_dual(rng):
    n = rng.standard_normal((3, 3))
    est = support_estimate(SupportProblem(n, RankSphere(SourceNorm.schatten(2), 3)))
    assert est == pytest.approx(np.linalg.norm(n), abs=1e-6)


def test_rank_sphere_matches_closed_form(rng):
    for source in (SourceNorm.schatten(2), SourceNorm.schatten(INF), SourceNorm.kyfan(2)):
        n = rng.standard_normal((3, 3))
        for r in (1, 2):
            closed = dual_rrank_norm(source, r, n)
            est = support_estimate(SupportProblem(n, RankSphere(source, r), budget=1000, seed=3))
            assert est <= closed * (1 + 1e-9) + 1e-9
            assert est == pytest.approx(closed, rel=1e-3)


def test_support_monotone_in_budget(rng):
    n = rng.standard_normal((3, 3))
    f = RankSphere(SourceNorm.schatten(INF), 2)
    vals = [support_estimate(SupportProblem(n, f, budget=b, seed=5)) for b in (1, 10, 100)]
    assert vals[0] <= vals[1] <= vals[2]


def test_support_problem_validation():
    with pytest.raises(InputError):
        SupportProblem(np.ones(2), NormBall(np.linalg.norm), budget=0)
    with pytest.raises(InputError):
        SupportProblem(np.ones(2), "l2 ball")


def test_vonneumann_examples():
    rep = vonneumann_extremal_check(np.eye(2), np.eye(2))
    assert rep["inner_product"] == pytest.approx(2.0, abs=1e-12)
    assert rep["aligned_value"] == pytest.approx(2.0, abs=1e-12)
    assert rep["max_sampled"] <= 2.0 + 1e-9
    rep = vonneumann_extremal_check(np.diag([2.0, 1.0]), np.diag([1.0, 2.0]))
    # sorted singular values (2, 1) and (2, 1) pair to 5; the plain trace is 4
    assert rep["inner_product"] == pytest.approx(5.0, abs=1e-12)
    assert rep["aligned_value"] == pytest.approx(5.0, abs=1e-12)
    assert float(np.trace(np.diag([2.0, 1.0]) @ np.diag([1.0, 2.0]))) == 4.0


def test_vonneumann_random_pairs(rng):
    for _ in range(20):
        shape = tuple(int(v) for v in rng.integers(1, 5, size=2))
        m = rng.standard_normal(shape)
        n = rng.standard_normal(shape)
        rep = vonneumann_extremal_check(m, n, samples=50, seed=int(rng.integers(1000)))
        assert rep["max_sampled"] <= rep["inner_product"] + 1e-9
        assert rep["aligned_value"] == pytest.approx(rep["inner_product"], abs=1e-9)
    with pytest.raises(InputError):
        vonneumann_extremal_check(np.eye(2), np.eye(3))


def test_vonneumann_is_deterministic():
    m = np.arange(6.0).reshape(2, 3)
    n = np.ones((2, 3))
    assert vonneumann_extremal_check(m, n, 30, 4) == vonneumann_extremal_check(m, n, 30, 4)
    assert not math.isnan(vonneumann_extremal_check(m, n, 30, 4)["max_sampled"])
