import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given

from rankcapra import _kernels_py
from rankcapra.errors import InputError
from rankcapra.linalg import (
    SVD_TOL,
    clean_spectrum,
    numerical_rank,
    random_orthogonal,
    random_rank_r,
    rng_from,
    singular_values,
    svd,
    trace_inner,
)

from conftest import matrices


def test_trace_inner_examples():
    assert trace_inner(np.eye(2), np.eye(2)) == 2.0
    assert trace_inner(np.ones((2, 3)), np.zeros((2, 3))) == 0.0
    assert trace_inner(np.ones((2, 2)), np.eye(2)) == 2.0


def test_trace_inner_dimension_mismatch():
    with pytest.raises(InputError):
        trace_inner(np.eye(2), np.eye(3))


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.diag([3.0, 2.0, 1.0]), [3.0, 2.0, 1.0]),
        (np.zeros((2, 3)), [0.0, 0.0]),
        (np.ones((2, 2)), [2.0, 0.0]),
        (np.diag([-2.0, 1.0]), [2.0, 1.0]),
        (np.eye(3), [1.0, 1.0, 1.0]),
        (np.array([[0.0, 1.0], [0.0, 0.0]]), [1.0, 0.0]),
    ],
)
def test_singular_value_examples(m, expected):
    np.testing.assert_allclose(singular_values(m), expected, atol=1e-14)
    np.testing.assert_allclose(svd(m).s, expected, atol=1e-14)


def _check_factors(m):
    u, s, v = svd(m)
    rows, cols = m.shape
    assert u.shape == (rows, rows) and v.shape == (cols, cols)
    assert np.max(np.abs(u.T @ u - np.eye(rows))) <= 1e-10
    assert np.max(np.abs(v.T @ v - np.eye(cols))) <= 1e-10
    k = s.size
    recon = (u[:, :k] * s) @ v[:, :k].T
    scale = max(np.linalg.norm(m), 1e-300)
    assert np.linalg.norm(recon - m) <= 1e-10 * scale
    assert np.all(np.diff(s) <= 0)


def test_svd_reconstruction_500_random(rng):
    for _ in range(500):
        rows, cols = rng.integers(1, 7, size=2)
        _check_factors(rng.standard_normal((rows, cols)))


def test_svd_matches_lapack(rng):
    for _ in range(200):
        m = rng.standard_normal(rng.integers(1, 7, size=2))
        np.testing.assert_allclose(singular_values(m), np.linalg.svd(m, compute_uv=False), rtol=0, atol=1e-12)


@given(matrices(6))
def test_svd_property(m):
    _check_factors(m)
    assert np.all(np.diff(singular_values(m)) <= 0)


def test_svd_extreme_scales(rng):
    for e in (-200, -100, 100, 200):
        m = rng.standard_normal((4, 3)) * 10.0**e
        ref = np.linalg.svd(m, compute_uv=False)
        np.testing.assert_allclose(singular_values(m), ref, rtol=1e-12)


def test_thin_svd_shapes(rng):
    m = rng.standard_normal((5, 3))
    u, s, v = svd(m, full=False)
    assert u.shape == (5, 3) and v.shape == (3, 3)
    np.testing.assert_allclose((u * s) @ v.T, m, atol=1e-12)


def test_unitary_invariance_of_singular_values(rng):
    for k in range(50):
        m = rng.standard_normal((4, 3))
        u = random_orthogonal(4, k)
        v = random_orthogonal(3, k + 1000)
        assert np.max(np.abs(singular_values(u @ m @ v) - singular_values(m))) <= 1e-9


def test_non_finite_rejected():
    with pytest.raises(InputError):
        singular_values(np.array([[1.0, np.nan]]))


def test_numerical_rank_examples(d321):
    assert numerical_rank(np.zeros((3, 2))) == 0
    assert numerical_rank(np.ones((2, 2)), 1e-9) == 1
    assert numerical_rank(d321, 1e-9) == 3
    assert numerical_rank(np.diag([1.0, 1e-10]), 1e-9) == 1
    with pytest.raises(InputError):
        numerical_rank(d321, 0.0)


def test_clean_spectrum():
    np.testing.assert_array_equal(clean_spectrum(np.array([2.0, 1e-12, 0.0])), [2.0, 0.0, 0.0])


def test_random_orthogonal():
    q1 = random_orthogonal(1, 5)
    assert q1.shape == (1, 1) and abs(q1[0, 0]) == 1.0
    q = random_orthogonal(3, 42)
    assert np.max(np.abs(q.T @ q - np.eye(3))) <= 1e-10
    np.testing.assert_array_equal(q, random_orthogonal(3, 42))
    with pytest.raises(InputError):
        random_orthogonal(0, 1)


def test_seed_is_required():
    with pytest.raises(InputError):
        rng_from(None)
    g = np.random.default_rng(1)
    assert rng_from(g) is g


def test_random_rank_r_contracts():
    m = random_rank_r(2, 2, 1, 7)
    s = singular_values(m)
    assert s[1] <= 1e-12 * s[0]
    assert numerical_rank(random_rank_r(3, 2, 2, 7)) == 2
    assert numerical_rank(random_rank_r(4, 4, 4, 7)) == 4
    for seed in range(30):
        s = singular_values(random_rank_r(5, 4, 3, seed))
        assert np.all((s[:3] >= 0.5 - 1e-12) & (s[:3] <= 2.0 + 1e-12))
    with pytest.raises(InputError):
        random_rank_r(2, 3, 3, 0)
    with pytest.raises(InputError):
        random_rank_r(2, 3, 0, 0)


def test_fallback_kernel_matches(rng):
    for _ in range(30):
        a = rng.standard_normal((rng.integers(1, 7), rng.integers(1, 5)))
        if a.shape[0] < a.shape[1]:
            a = a.T
        w, v, sweeps, off = _kernels_py.jacobi_tall(a, True, SVD_TOL, 300)
        assert off <= SVD_TOL
        np.testing.assert_allclose(np.sort(_kernels_py.column_norms(w))[::-1], np.linalg.svd(a, compute_uv=False), atol=1e-12)
        np.testing.assert_allclose(w @ v.T, a, atol=1e-12)


def test_pure_backend_selected_by_environment():
    code = "from rankcapra import BACKEND, singular_values; import numpy as np; print(BACKEND, singular_values(np.ones((2, 2)))[0])"
    env = dict(os.environ, RANKCAPRA_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, value = out.stdout.split()
    assert backend == "python"
    assert abs(float(value) - 2.0) < 1e-14
