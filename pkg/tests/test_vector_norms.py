import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankcapra.errors import InputError
from rankcapra.vector_norms import (
    INF,
    SymmetricGauge,
    conjugate_exponent,
    dual_coordinate_norm,
    dual_norm_oracle,
    ksupport2_norm,
    l0,
    lp_norm,
    parse_exponent,
    parse_gauge,
    top_norm,
)
from rankcapra.verify import ksupport_variational

from conftest import vectors

X321 = np.array([3.0, 2.0, 1.0])


def test_lp_examples():
    assert lp_norm([3.0, 4.0], 2) == 5.0
    assert lp_norm(X321, 1) == 6.0
    assert lp_norm(X321, INF) == 3.0
    with pytest.raises(InputError):
        lp_norm(X321, 0.5)


def test_lp_no_overflow():
    assert lp_norm([1e200, 1e200], 2) == pytest.approx(math.sqrt(2) * 1e200)
    assert lp_norm([1e-200, 1e-200], 3) == pytest.approx(2 ** (1 / 3) * 1e-200)


def test_l0_examples():
    assert l0([0.0, 0.0, 0.0]) == 0
    assert l0([1.0, 0.0, 2.0]) == 2
    assert l0([1e-15, 1.0], 1e-12) == 1
    with pytest.raises(InputError):
        l0([1.0], -1.0)


def test_l0_is_not_homogeneous():
    x = np.array([1.0, 0.0, 2.0])
    assert l0(3 * x) != 3 * l0(x)


def test_top_examples():
    assert top_norm(X321, 1, 2) == 5.0
    assert top_norm(X321, 2, 3) == pytest.approx(math.sqrt(14), abs=1e-15)
    assert top_norm(np.ones(4), 2, 2) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert top_norm(X321, INF, 2) == 3.0
    with pytest.raises(InputError):
        top_norm(X321, 2, 4)
    with pytest.raises(InputError):
        top_norm(X321, 2, 0)


def test_top_matches_subset_brute_force(rng):
    import itertools

    for _ in range(100):
        d = int(rng.integers(1, 6))
        x = rng.standard_normal(d)
        r = int(rng.integers(1, d + 1))
        brute = max(lp_norm(x[list(c)], 1.0) for c in itertools.combinations(range(d), r))
        assert top_norm(x, 1, r) == pytest.approx(brute, abs=1e-12)


def test_ksupport_examples():
    assert ksupport2_norm([5.0, 0.0, 0.0], 2) == 5.0
    assert ksupport2_norm([1.0, 1.0], 2) == pytest.approx(math.sqrt(2), abs=1e-15)
    v = ksupport2_norm([1.0, 1.0], 1)
    assert math.sqrt(2) <= v <= 2
    assert v == pytest.approx(dual_norm_oracle(SymmetricGauge.top(2, 1), np.array([1.0, 1.0])), abs=1e-3)
    # frozen: the (2,1)-support norm is l1
    assert v == 2.0


def test_ksupport_frozen_values():
    # sorted thresholding values, computed once and frozen
    assert ksupport2_norm(X321, 1) == 6.0
    assert ksupport2_norm(X321, 2) == pytest.approx(math.sqrt(18.0), abs=1e-14)
    assert ksupport2_norm([4.0, 1.0, 1.0, 1.0], 2) == 5.0


def test_ksupport_against_variational_form(rng):
    for _ in range(150):
        d = int(rng.integers(1, 6))
        x = rng.standard_normal(d) * rng.uniform(0.1, 10)
        for r in range(1, d + 1):
            assert ksupport2_norm(x, r) == pytest.approx(ksupport_variational(x, r), rel=1e-7)


@given(vectors(1, 6), st.integers(1, 6))
def test_ksupport_is_l2_on_sparse_vectors(x, r):
    r = min(r, x.size)
    if np.count_nonzero(x) <= r:
        assert ksupport2_norm(x, r) == pytest.approx(lp_norm(x, 2), rel=1e-12, abs=1e-300)


@given(vectors(1, 6))
def test_ksupport_chain(x):
    d = x.size
    vals = [ksupport2_norm(x, r) for r in range(1, d + 1)]
    scale = max(vals[0], 1e-300)
    assert all(b <= a + 1e-12 * scale for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(lp_norm(x, 1), rel=1e-12, abs=1e-300)
    assert vals[-1] == pytest.approx(lp_norm(x, 2), rel=1e-12, abs=1e-300)


@given(vectors(1, 6), st.sampled_from([1.0, 1.5, 2.0, 3.0, INF]))
def test_top_monotone_in_r(x, q):
    vals = [top_norm(x, q, r) for r in range(1, x.size + 1)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(lp_norm(x, q), rel=1e-12, abs=1e-300)


GAUGES = [
    SymmetricGauge.lp(1),
    SymmetricGauge.lp(2),
    SymmetricGauge.lp(3.5),
    SymmetricGauge.lp(INF),
    SymmetricGauge.top(2, 2),
    SymmetricGauge.top(1, 3),
    SymmetricGauge.ksup2(2),
]


@pytest.mark.parametrize("g", GAUGES, ids=str)
def test_gauges_are_symmetric_and_absolute(g, rng):
    for _ in range(100):
        x = rng.standard_normal(int(rng.integers(1, 6)))
        y = rng.permutation(x) * rng.choice([-1.0, 1.0], size=x.size)
        assert g(y) == pytest.approx(g(x), rel=1e-12)


@pytest.mark.parametrize("g", GAUGES, ids=str)
@given(x=vectors(3, 3), y=vectors(3, 3), a=st.floats(-100, 100))
def test_gauge_axioms(g, x, y, a):
    gx = g(x)
    assert g(a * x) == pytest.approx(abs(a) * gx, rel=1e-12, abs=1e-300)
    assert g(x + y) <= gx + g(y) + 1e-9 * (1 + gx + g(y))
    assert (gx == 0) == (not np.any(x != 0))


def test_conjugate_exponent():
    assert conjugate_exponent(1) == INF
    assert conjugate_exponent(INF) == 1.0
    assert conjugate_exponent(2) == 2.0
    assert conjugate_exponent(3) == 1.5


def test_dual_coordinate_examples():
    assert dual_coordinate_norm(SymmetricGauge.lp(2), 1, X321) == 3.0
    x = np.array([0.5, -4.0, 2.0])
    for r in (1, 2, 3):
        assert dual_coordinate_norm(SymmetricGauge.lp(1), r, x) == lp_norm(x, INF)
    assert dual_coordinate_norm(SymmetricGauge.lp(INF), 2, X321) == 5.0
    with pytest.raises(InputError):
        dual_coordinate_norm(SymmetricGauge.ksup2(2), 1, X321)


def test_dual_coordinate_ky_fan():
    g = SymmetricGauge.top(1, 2)
    assert dual_coordinate_norm(g, 1, X321) == 3.0
    assert dual_coordinate_norm(g, 3, X321) == 3.0  # max(3, 6 / 2)
    assert dual_coordinate_norm(g, 3, [1.0, 1.0, 1.0]) == 1.5


def test_parse_gauge_round_trip():
    for text in ("lp:2", "lp:inf", "top:q=2,r=3", "ksup2:r=3", "lp:1.5"):
        g = parse_gauge(text)
        assert parse_gauge(str(g)) == g
    assert parse_gauge("lp:inf") == SymmetricGauge.lp(INF)
    assert parse_exponent("inf") == INF
    for bad in ("lp:0.5", "top:q=2", "foo:1", "ksup2:r=x", "lp:"):
        with pytest.raises(InputError):
            parse_gauge(bad)


def test_oracle_examples():
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.standard_normal(int(rng.integers(1, 5)))
        assert dual_norm_oracle(SymmetricGauge.lp(2), x, 2000, 0) == pytest.approx(lp_norm(x, 2), abs=1e-6)
    assert dual_norm_oracle(SymmetricGauge.lp(1), np.array([3.0, -2.0])) == pytest.approx(3.0, abs=1e-6)
    assert dual_norm_oracle(SymmetricGauge.lp(1), np.zeros(3)) == 0.0


def test_oracle_plain_callables_and_errors():
    assert dual_norm_oracle(lambda y: float(np.abs(y).max()), X321) == pytest.approx(6.0, abs=1e-9)
    with pytest.raises(InputError):
        dual_norm_oracle(lambda y: 0.0 * y[..., 0], X321)
    with pytest.raises(InputError):
        dual_norm_oracle(SymmetricGauge.lp(2), X321, budget=0)


def test_oracle_monotone_in_budget(rng):
    g = SymmetricGauge.top(2, 2)
    for k in range(10):
        x = rng.standard_normal(4)
        vals = [dual_norm_oracle(g, x, b, seed=k, polish=0) for b in (1, 10, 100, 1000)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_oracle_never_exceeds_closed_form(rng):
    for _ in range(40):
        d = int(rng.integers(1, 6))
        x = rng.standard_normal(d)
        r = int(rng.integers(1, d + 1))
        assert dual_norm_oracle(SymmetricGauge.top(2, r), x) <= ksupport2_norm(x, r) * (1 + 1e-12)


def test_biduality_sanity():
    rng = np.random.default_rng(8)
    for _ in range(3):
        x = rng.standard_normal(3)
        ksup = SymmetricGauge.ksup2(2)
        # the dual of the (2,2)-support norm is top-(2,2) again
        assert dual_norm_oracle(ksup, x, budget=300) == pytest.approx(top_norm(x, 2, 2), rel=1e-2)
