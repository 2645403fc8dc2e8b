"""CSV matrices and vectors, and number formatting for reports.

Matrices are stored one row per line, comma separated, with no header and
a '.' decimal point. A vector is a single-row CSV.
"""

import csv
import math

import numpy as np

from .errors import InputError

SIGNIFICANT_DIGITS = 12


def _parse_rows(lines, source):
    rows = []
    for lineno, row in enumerate(csv.reader(lines), start=1):
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise InputError(f"{source}: line {lineno}: not a number in {row!r}") from None
    if not rows:
        raise InputError(f"{source}: empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError(f"{source}: rows have different lengths")
    a = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise InputError(f"{source}: non-finite entries")
    return a


def read_matrix(path):
    """Load a CSV matrix file."""
    try:
        with open(path, newline="") as fh:
            return _parse_rows(fh, path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def parse_matrix(text, source="<string>"):
    return _parse_rows(text.splitlines(), source)


def read_vector(path):
    """Load a single-row (or single-column) CSV as a 1-D array."""
    a = read_matrix(path)
    if min(a.shape) != 1:
        raise InputError(f"{path}: expected a single row, got shape {a.shape}")
    return a.ravel()


def read_phi(path):
    """Load phi(0..d) from CSV; 'inf' and '-inf' are accepted."""
    try:
        with open(path, newline="") as fh:
            cells = [c.strip() for row in csv.reader(fh) for c in row if c.strip()]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        vals = np.array([float(c) for c in cells], dtype=np.float64)
    except ValueError:
        raise InputError(f"{path}: phi values must be numbers") from None
    if vals.size == 0 or np.any(np.isnan(vals)):
        raise InputError(f"{path}: phi must be a nonempty list of extended reals")
    return vals


def fmt(x):
    """Number with 12 significant digits; integers and infinities kept readable."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    out = f"{x:.{SIGNIFICANT_DIGITS}g}"
    return "0" if out == "-0" else out


def round_sig(x):
    """Float rounded to 12 significant digits (JSON-safe, inf kept as string)."""
    x = float(x)
    if not math.isfinite(x):
        return fmt(x)
    return float(fmt(x))


def format_matrix(a):
    return "\n".join(",".join(fmt(v) for v in row) for row in np.atleast_2d(a)) + "\n"


def write_matrix(path, a):
    with open(path, "w", newline="") as fh:
        fh.write(format_matrix(a))
