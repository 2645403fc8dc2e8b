"""Pure-Python fallback for the compiled Jacobi kernels.

Same algorithm and API as ``_kernels.pyx``; used when the extension
module was not built or ``RANKCAPRA_PURE=1`` is set.
"""

import math

import numpy as np


def jacobi_tall(a, want_v, tol, max_sweeps):
    w = np.array(a, dtype=np.float64, order="C", copy=True)
    n = w.shape[1]
    v = np.eye(n)
    off = 0.0
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                wi = w[:, i]
                wj = w[:, j]
                alpha = float(wi @ wi)
                beta = float(wj @ wj)
                gamma = float(wi @ wj)
                if alpha < 1e-290 or beta < 1e-290:
                    continue
                rel = abs(gamma) / (math.sqrt(alpha) * math.sqrt(beta))
                off = max(off, rel)
                if rel <= tol:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                wi_old = wi.copy()
                w[:, i] = c * wi_old - s * wj
                w[:, j] = s * wi_old + c * wj
                if want_v:
                    vi_old = v[:, i].copy()
                    v[:, i] = c * vi_old - s * v[:, j]
                    v[:, j] = s * vi_old + c * v[:, j]
        if off <= tol:
            break
    return w, v, sweeps, off


def column_norms(a):
    return np.sqrt(np.einsum("ij,ij->j", a, a))
