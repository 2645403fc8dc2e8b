# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled one-sided Jacobi kernels.

Both entry points work on a tall matrix (rows >= cols) in place; the
Python wrapper in :mod:`rankcapra.linalg` handles transposition, sorting
and completion of the orthogonal factors.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, copysign

cnp.import_array()


cdef int _sweeps(double[:, ::1] w, double[:, ::1] v, bint want_v,
                 double tol, int max_sweeps, double *off_out) noexcept nogil:
    cdef Py_ssize_t m = w.shape[0], n = w.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double alpha, beta, gamma, zeta, t, c, s, wi, wj, off, rel
    cdef int sweep = 0
    off = 0.0
    while sweep < max_sweeps:
        sweep += 1
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for k in range(m):
                    alpha += w[k, i] * w[k, i]
                    beta += w[k, j] * w[k, j]
                    gamma += w[k, i] * w[k, j]
                if alpha < 1e-290 or beta < 1e-290:
                    continue
                rel = fabs(gamma) / (sqrt(alpha) * sqrt(beta))
                if rel > off:
                    off = rel
                if rel <= tol:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = copysign(1.0, zeta) / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    wi = w[k, i]
                    wj = w[k, j]
                    w[k, i] = c * wi - s * wj
                    w[k, j] = s * wi + c * wj
                if want_v:
                    for k in range(n):
                        wi = v[k, i]
                        wj = v[k, j]
                        v[k, i] = c * wi - s * wj
                        v[k, j] = s * wi + c * wj
        if off <= tol:
            break
    off_out[0] = off
    return sweep


def jacobi_tall(cnp.ndarray a, bint want_v, double tol, int max_sweeps):
    """Orthogonalize the columns of a tall matrix.

    Returns ``(w, v, sweeps, off)`` where ``a @ v == w`` and the columns of
    ``w`` are mutually orthogonal up to ``tol`` (relative cosine).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = w.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.eye(n, dtype=np.float64)
    cdef double off = 0.0
    cdef int sweeps
    cdef double[:, ::1] wv = w
    cdef double[:, ::1] vv = v
    with nogil:
        sweeps = _sweeps(wv, vv, want_v, tol, max_sweeps, &off)
    return w, v, sweeps, off


def column_norms(cnp.ndarray a):
    cdef double[:, ::1] w = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t m = w.shape[0], n = w.shape[1], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(m):
            acc += w[k, i] * w[k, i]
        out[i] = sqrt(acc)
    return out
