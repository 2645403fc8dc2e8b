"""Dense matrix primitives: trace inner product, Jacobi SVD, numerical rank
and seeded generators for orthogonal and fixed-rank matrices.

Singular values are always returned in nonincreasing order.
"""

from typing import NamedTuple

import numpy as np

from ._backend import kernels
from .errors import InputError, NumericalError

SVD_TOL = 1e-14
RANK_TOL = 1e-9


class SvdFactors(NamedTuple):
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def as_matrix(m, name="matrix"):
    """Validate and convert to a 2-D float64 array."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InputError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} has non-finite entries")
    return a


def rng_from(seed):
    """Return a Generator for an int seed, or pass a Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise InputError("a seed is required; randomness is never implicit")
    return np.random.default_rng(int(seed))


def trace_inner(a, b):
    """Tr(a b^T), i.e. the entrywise sum of a * b."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.einsum("ij,ij->", a, b))


def _max_sweeps(d):
    return max(100 * d, 1)


def _jacobi(a, want_v):
    """Rotated columns and accumulated rotations of a (scaled by 1/max|a|)."""
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        return np.zeros_like(a), np.eye(a.shape[1]), 0.0
    w, v, sweeps, off = kernels.jacobi_tall(a / scale, want_v, SVD_TOL, _max_sweeps(a.shape[1]))
    if off > SVD_TOL:
        raise NumericalError(
            f"Jacobi SVD did not converge after {sweeps} sweeps "
            f"(max relative column cosine {off:.3e})",
            residual=off,
        )
    return w, v, scale


def _complete_basis(cols, size, count=None):
    """Extend orthonormal columns to ``count`` (default size) orthonormal columns."""
    count = size if count is None else count
    if cols.shape[1] >= count:
        return cols
    basis = [c for c in cols.T]
    for e in np.eye(size):
        if len(basis) == count:
            break
        x = e.copy()
        for _ in range(2):
            for b in basis:
                x -= (b @ x) * b
        nx = np.linalg.norm(x)
        if nx > 1e-8:
            basis.append(x / nx)
    return np.column_stack(basis) if basis else np.zeros((size, 0))


def _tall_svd(a, full):
    w, v, scale = _jacobi(a, True)
    s = kernels.column_norms(w)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    w = w[:, order]
    v = v[:, order]
    # columns at rounding level carry no direction; complete them instead
    keep = s > max(a.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
    u_part = w[:, keep] / s[keep]
    u = _complete_basis(u_part, a.shape[0], None if full else s.size)
    return u, s * scale, v


def svd(m, full=True):
    """Singular value decomposition m = u @ diag(s) @ v.T.

    With ``full`` (the default) ``u`` is m x m and ``v`` is n x n, both
    orthogonal; otherwise only the min(m, n) leading columns of the larger
    factor are formed. ``s`` has length min(m, n). Uses one-sided (Hestenes)
    Jacobi rotations.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if rows >= cols:
        u, s, v = _tall_svd(a, full)
        return SvdFactors(u, s, v)
    u_t, s, v_t = _tall_svd(a.T, full)
    return SvdFactors(v_t, s, u_t)


def singular_values(m):
    """Singular values in nonincreasing order (no factors accumulated)."""
    a = as_matrix(m)
    if a.shape[0] < a.shape[1]:
        a = a.T
    w, _, scale = _jacobi(a, False)
    s = kernels.column_norms(w)
    return -np.sort(-s) * scale


def numerical_rank(m, tol=RANK_TOL):
    """Number of singular values strictly above ``tol * s_1``."""
    if tol <= 0:
        raise InputError("tol must be positive")
    s = singular_values(m)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def clean_spectrum(s, tol=RANK_TOL):
    """Zero out singular values at or below ``tol * s_1``."""
    s = np.array(s, dtype=np.float64)
    if s.size and s[0] > 0:
        s[s <= tol * s[0]] = 0.0
    return s


def random_orthogonal(n, seed):
    """Haar-distributed orthogonal n x n matrix (QR of a Gaussian, sign-fixed)."""
    if n < 1:
        raise InputError("n must be >= 1")
    rng = rng_from(seed)
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def random_rank_r(m, n, r, seed):
    """Random m x n matrix of rank exactly r.

    U diag(sigma) V^T with Haar U, V and the r nonzero entries of sigma drawn
    uniformly from [0.5, 2.0].
    """
    if not 1 <= r <= min(m, n):
        raise InputError(f"rank r={r} outside [1, {min(m, n)}]")
    rng = rng_from(seed)
    u = random_orthogonal(m, rng)
    v = random_orthogonal(n, rng)
    sigma = np.zeros(min(m, n))
    sigma[:r] = rng.uniform(0.5, 2.0, size=r)
    return (u[:, : sigma.size] * sigma) @ v[:, : sigma.size].T
