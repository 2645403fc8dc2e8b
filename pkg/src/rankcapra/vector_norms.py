"""Symmetric gauge functions on R^d.

All evaluators act along the last axis, so a 2-D array is treated as a
batch of row vectors; the public functions return a float for 1-D input.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .errors import InputError
from .linalg import rng_from

INF = math.inf


def as_vector(x, name="x"):
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.shape[-1] < 1:
        raise InputError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    return v


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _check_p(p, name="p"):
    p = float(p)
    if not (p >= 1.0):
        raise InputError(f"{name} must be >= 1 (or inf), got {p}")
    return p


def _check_r(r, d):
    if not (isinstance(r, (int, np.integer)) and 1 <= r <= d):
        raise InputError(f"r={r} outside [1, {d}]")
    return int(r)


def conjugate_exponent(p):
    """q with 1/p + 1/q = 1."""
    p = _check_p(p)
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _lp_sorted_abs(a, p):
    # a: nonnegative, any order, reduced along last axis
    if p == INF:
        return a.max(axis=-1)
    if p == 1.0:
        return a.sum(axis=-1)
    if p == 2.0:
        scale = a.max(axis=-1, keepdims=True)
        safe = np.where(scale > 0, scale, 1.0)
        return scale[..., 0] * np.sqrt(((a / safe) ** 2).sum(axis=-1))
    scale = a.max(axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    return scale[..., 0] * (((a / safe) ** p).sum(axis=-1)) ** (1.0 / p)


def lp_norm(x, p):
    """(sum |x_i|^p)^(1/p); max |x_i| for p = inf."""
    p = _check_p(p)
    return _out(_lp_sorted_abs(np.abs(as_vector(x)), p))


def l0(x, tol=0.0):
    """Number of entries with |x_i| > tol."""
    if tol < 0:
        raise InputError("tol must be >= 0")
    v = as_vector(x)
    return _out(np.count_nonzero(np.abs(v) > tol, axis=-1))


def sorted_magnitudes(x):
    """|x| sorted nonincreasing along the last axis."""
    return -np.sort(-np.abs(x), axis=-1)


def top_norm(x, q, r):
    """l_q norm of the r largest magnitudes of x.

    For q = inf this is max |x_i| whatever r is.
    """
    q = _check_p(q, "q")
    v = as_vector(x)
    r = _check_r(r, v.shape[-1])
    head = sorted_magnitudes(v)[..., :r]
    return _out(_lp_sorted_abs(head, q))


def _ksupport_sorted(z, r):
    # z: 1-D, nonnegative, nonincreasing.
    d = z.size
    if z[0] == 0.0:
        return 0.0
    if r >= d:
        return float(_lp_sorted_abs(z, 2.0))
    scale = z[0]
    z = z / scale
    tails = np.cumsum(z[::-1])[::-1]  # tails[i] = sum_{j >= i} z_j
    best = None
    for ell in range(r):
        h = r - ell - 1  # number of head entries kept as-is
        avg = tails[h] / (ell + 1)
        upper = INF if h == 0 else z[h - 1]
        violation = max(0.0, avg - upper) + max(0.0, z[h] - avg)
        value = math.sqrt(float(np.dot(z[:h], z[:h])) + tails[h] * tails[h] / (ell + 1))
        if violation == 0.0:
            return scale * value
        if best is None or violation < best[0]:
            best = (violation, value)
    return scale * best[1]


def ksupport2_norm(x, r):
    """The (2, r)-support norm, dual of ``top_norm(., 2, r)``.

    Sorted-thresholding closed form: the r-1 largest magnitudes minus a
    tail of ell+1 entries are kept quadratically, the tail is averaged; ell
    is the unique split compatible with the ordering.
    """
    v = as_vector(x)
    r = _check_r(r, v.shape[-1])
    z = sorted_magnitudes(v)
    if z.ndim == 1:
        return _ksupport_sorted(z, r)
    flat = z.reshape(-1, z.shape[-1])
    out = np.array([_ksupport_sorted(row, r) for row in flat])
    return out.reshape(z.shape[:-1])


@dataclass(frozen=True)
class SymmetricGauge:
    """Descriptor of a symmetric absolute norm on R^d.

    kind is one of ``"lp"`` (uses ``p``), ``"top"`` (uses ``q`` and ``r``)
    or ``"ksup2"`` (uses ``r``).
    """

    kind: str
    p: float = 2.0
    q: float = 2.0
    r: int = 1

    def __post_init__(self):
        if self.kind not in ("lp", "top", "ksup2"):
            raise InputError(f"unknown gauge kind {self.kind!r}")
        if self.kind == "lp":
            object.__setattr__(self, "p", _check_p(self.p))
        if self.kind == "top":
            object.__setattr__(self, "q", _check_p(self.q, "q"))
        if self.kind in ("top", "ksup2") and not (
            isinstance(self.r, (int, np.integer)) and self.r >= 1
        ):
            raise InputError(f"r must be a positive integer, got {self.r}")

    @classmethod
    def lp(cls, p):
        return cls("lp", p=p)

    @classmethod
    def top(cls, q, r):
        return cls("top", q=q, r=int(r))

    @classmethod
    def ksup2(cls, r):
        return cls("ksup2", r=int(r))

    def restricted(self, d):
        """The same gauge acting on the first d coordinates (rest zero)."""
        if self.kind == "lp":
            return self
        return SymmetricGauge(self.kind, p=self.p, q=self.q, r=min(self.r, d))

    def batch(self, rows):
        """Values on the rows of a finite 2-D array (no input checks)."""
        d = rows.shape[-1]
        if self.kind == "top" or (self.kind == "lp" and self.p not in (1.0, 2.0, INF)):
            mags = np.abs(rows)
            if self.kind == "top" and self.r < d:
                mags = -np.partition(-mags, self.r - 1, axis=-1)[..., : self.r]
            return _lp_sorted_abs(mags, self.q if self.kind == "top" else self.p)
        if self.kind == "lp":
            return np.asarray(lp_norm(rows, self.p), dtype=np.float64)
        return np.array([self(row) for row in rows], dtype=np.float64)

    def __call__(self, x):
        v = as_vector(x)
        d = v.shape[-1]
        if self.kind == "lp":
            return lp_norm(v, self.p)
        r = min(self.r, d)
        if self.kind == "top":
            return top_norm(v, self.q, r)
        return ksupport2_norm(v, r)

    @property
    def polyhedral(self):
        """True when the unit ball is a polytope (values are piecewise linear)."""
        if self.kind == "lp":
            return self.p in (1.0, INF)
        if self.kind == "top":
            return self.q in (1.0, INF)
        return False

    def __str__(self):
        if self.kind == "lp":
            return f"lp:{_fmt_exp(self.p)}"
        if self.kind == "top":
            return f"top:q={_fmt_exp(self.q)},r={self.r}"
        return f"ksup2:r={self.r}"


def _fmt_exp(p):
    if p == INF:
        return "inf"
    return f"{p:g}"


def parse_exponent(text):
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INF
    try:
        return float(t)
    except ValueError:
        raise InputError(f"bad exponent {text!r}") from None


def parse_gauge(text):
    """Parse ``lp:2``, ``lp:inf``, ``top:q=2,r=3`` or ``ksup2:r=3``."""
    kind, _, rest = text.strip().partition(":")
    kind = kind.lower()
    if kind == "lp":
        return SymmetricGauge.lp(parse_exponent(rest))
    fields = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise InputError(f"bad gauge field {item!r} in {text!r}")
        fields[key.strip().lower()] = value.strip()
    try:
        if kind == "top":
            return SymmetricGauge.top(parse_exponent(fields["q"]), int(fields["r"]))
        if kind == "ksup2":
            return SymmetricGauge.ksup2(int(fields["r"]))
    except (KeyError, ValueError):
        raise InputError(f"incomplete gauge descriptor {text!r}") from None
    raise InputError(f"unknown gauge descriptor {text!r}")


def dual_coordinate_norm(g, r, x):
    """Dual coordinate-r norm of the gauge g at x.

    For ``lp:p`` this is ``top_norm(x, q, r)`` with 1/p + 1/q = 1. The Ky Fan
    gauge ``top:q=1,r=k`` is also accepted: its value is
    ``max(max|x_i|, top_norm(x, 1, r) / k)``.
    """
    v = as_vector(x)
    r = _check_r(r, v.shape[-1])
    if g.kind == "lp":
        return top_norm(v, conjugate_exponent(g.p), r)
    if g.kind == "top" and g.q == 1.0:
        return _out(np.maximum(np.abs(v).max(axis=-1), top_norm(v, 1.0, r) / g.r))
    raise InputError(f"dual coordinate norm not available for gauge {g}")


def _direction_set(d):
    if d <= 6:
        dirs = np.array(
            [c for c in itertools.product((-1.0, 0.0, 1.0), repeat=d) if any(c)]
        )
    else:
        eye = np.eye(d)
        pairs = [eye[i] + s * eye[j] for i in range(d) for j in range(i + 1, d) for s in (1.0, -1.0)]
        dirs = np.vstack([eye, -eye, pairs, [-p for p in pairs]])
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def _batched(norm):
    if isinstance(norm, SymmetricGauge):
        return norm.batch

    def evaluate(y):
        try:
            out = np.asarray(norm(y), dtype=np.float64)
        except Exception:
            out = None
        if out is None or out.shape != y.shape[:-1]:
            out = np.array([float(norm(row)) for row in y])
        return out

    return evaluate


_RIDGE_SCALES = np.array([0.25, 0.5, 1.0, 2.0, 4.0])[:, None, None]


def _pattern_ascent(x, evaluate, y, dirs, step_tol=1e-12, max_iter=5000):
    """Maximize <x, y> / norm(y) by compass search over ``dirs``.

    Displacements between recent iterates are added as extra directions so
    that the search can follow ridges where magnitudes tie.
    """
    y = y / math.sqrt(float(y @ y))
    val = float(x @ y) / float(evaluate(y[None, :])[0])
    h = 0.5
    trail = [y]
    eps = 8 * np.finfo(float).eps
    for _ in range(max_iter):
        if h <= step_tol:
            break
        steps = dirs
        if len(trail) > 2:
            ridge = []
            for back in (2, 4, 8):
                if len(trail) > back:
                    delta = trail[-1] - trail[-1 - back]
                    nd = math.sqrt(float(delta @ delta))
                    if nd > 0:
                        ridge.append(delta / nd)
            if ridge:
                extra = (_RIDGE_SCALES * np.array(ridge)[None]).reshape(-1, y.size)
                steps = np.concatenate([dirs, extra])
        cand = y + h * steps
        nrm = evaluate(cand)
        vals = np.full(nrm.shape, -INF)
        np.divide(cand @ x, nrm, out=vals, where=nrm > 0)
        k = int(np.argmax(vals))
        # gains at rounding level would cycle forever
        if vals[k] > val + eps * abs(val):
            val = float(vals[k])
            c = cand[k]
            y = c / math.sqrt(float(c @ c))
            trail.append(y)
            del trail[:-9]
            h = min(2.0 * h, 0.5)
        else:
            h *= 0.5
    return val, y


def dual_norm_oracle(norm, x, budget=2000, seed=0, polish=2):
    """Lower estimate of sup{<x, y> : norm(y) <= 1}.

    ``budget`` random points on the unit sphere are scored; ``x`` itself,
    ``sign(x)`` and the first ``polish`` sampled points are then refined by
    compass search. The candidate set only grows with ``budget``, so the
    estimate is nondecreasing in it.
    """
    if budget < 1:
        raise InputError("budget must be >= 1")
    x = as_vector(x)
    if x.ndim != 1:
        raise InputError("x must be 1-D")
    d = x.size
    evaluate = _batched(norm)
    if not np.any(x):
        return 0.0
    rng = rng_from(seed)
    samples = rng.standard_normal((budget, d))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    nrm = evaluate(samples)
    if np.any(nrm <= 0):
        raise InputError("norm evaluates to 0 on a nonzero input: not a norm")
    vals = samples @ x / nrm
    best = float(vals.max())
    dirs = _direction_set(d)
    starts = [x, np.where(x != 0, np.sign(x), 0.0)] + list(samples[:polish])
    for y0 in starts:
        if not np.any(y0):
            continue
        val, _ = _pattern_ascent(x, evaluate, np.asarray(y0, dtype=np.float64), dirs)
        best = max(best, val)
    return best
