"""Command-line front end.

    rankcapra VERB [MATRIX.csv] [--source S] [--r R] ...

Exit status: 0 on success, 1 when a verification fails, 2 on bad input.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import capra, verify
from . import matrix_norms as mn
from . import vector_norms as vn
from .errors import InputError, RankCapraError
from .io import fmt, read_matrix, read_phi, round_sig
from .linalg import RANK_TOL, numerical_rank, singular_values

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2

DEFAULT_RESTARTS = 50
DEFAULT_SAMPLES = 2000
DEFAULT_BOUND_BUDGET = 8

VERBS = ("norm", "dualrank", "rrank", "conjugate", "bound", "ray", "verify", "table1")
NEEDS_MATRIX = {"norm", "dualrank", "rrank", "conjugate", "bound", "ray"}
NEEDS_R = {"dualrank", "rrank"}


def build_parser():
    p = argparse.ArgumentParser(prog="rankcapra", description="Rank-inducing norms and Capra bounds on the rank.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("matrix", nargs="?", help="CSV matrix file (one row per line, no header)")
    p.add_argument("--source", help="schatten:<p>, kyfan:<k>, gauge:<desc>, nuclear, frobenius or spectral")
    p.add_argument("--r", type=int, help="rank index r")
    p.add_argument("--k", type=int, help="Ky Fan index (shorthand for --source kyfan:<k>)")
    p.add_argument("--p", help="Schatten exponent (shorthand for --source schatten:<p>)")
    p.add_argument("--phi", help="CSV file with phi(0..d); default phi(i) = i")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help="restarts or samples (verb dependent)")
    p.add_argument("--tol", type=float, default=RANK_TOL, help="relative rank tolerance")
    p.add_argument("--lambda-max-exp", type=int, default=8, help="ray verb: largest exponent of the lambda grid")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    return p


def _source(args):
    given = [x for x in (args.source, args.k, args.p) if x is not None]
    if len(given) > 1:
        raise InputError("give only one of --source, --k and --p")
    if args.k is not None:
        return mn.SourceNorm.kyfan(args.k)
    if args.p is not None:
        return mn.SourceNorm.schatten(vn.parse_exponent(args.p))
    if args.source is not None:
        return mn.parse_source(args.source)
    return mn.SourceNorm.schatten(2.0)


def _check_source(source, m):
    if source.kind == "kyfan" and not 1 <= source.k <= min(m.shape):
        raise InputError(f"Ky Fan index k={source.k} outside [1, {min(m.shape)}]")


def _phi(args, d):
    if args.phi is None:
        return capra.identity_phi(d)
    phi = read_phi(args.phi)
    if phi.size != d + 1:
        raise InputError(f"--phi needs d + 1 = {d + 1} values, got {phi.size}")
    return phi


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return round_sig(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating, int, np.integer)):
        return fmt(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_csv_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def render(rows, fmt_name):
    """Serialize a record or a list of records; key order is preserved."""
    if fmt_name == "json":
        return json.dumps(_json_value(rows), indent=2) + "\n"
    records = rows if isinstance(rows, list) else [rows]
    if not records:
        return ""
    keys = list(records[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for rec in records:
        writer.writerow([_csv_cell(rec.get(k)) for k in keys])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# verbs


def _cmd_norm(args, m, source):
    return {"matrix_file": args.matrix, "source": str(source), "value": mn.source_eval(source, m)}, EXIT_OK


def _cmd_dualrank(args, m, source):
    d = min(m.shape)
    if not 1 <= args.r <= d:
        raise InputError(f"r={args.r} outside [1, {d}]")
    _, closed = mn.build_family(source).dual_kind(args.r, d)
    if closed:
        value = mn.dual_rrank_norm(source, args.r, m)
    else:
        restarts = args.budget or DEFAULT_RESTARTS
        value = mn.dual_rrank_generic(source, args.r, m, restarts=restarts, seed=args.seed)
    rec = {"matrix_file": args.matrix, "source": str(source), "r": args.r, "value": value, "estimate": not closed}
    return rec, EXIT_OK


def _cmd_rrank(args, m, source):
    d = min(m.shape)
    if not 1 <= args.r <= d:
        raise InputError(f"r={args.r} outside [1, {d}]")
    _, kind, exact = mn.primal_vector_norm(source, args.r, d)
    rec = {
        "matrix_file": args.matrix,
        "source": str(source),
        "r": args.r,
        "value": mn.rrank_norm(source, args.r, m),
        "norm_kind": kind,
        "estimate": not exact,
    }
    return rec, EXIT_OK


def _cmd_conjugate(args, m, source):
    phi = _phi(args, min(m.shape))
    rec = {
        "matrix_file": args.matrix,
        "source": str(source),
        "phi": list(phi),
        "value": capra.rank_conjugate(source, phi, m),
    }
    return rec, EXIT_OK


def _cmd_bound(args, m, source):
    budget = DEFAULT_BOUND_BUDGET if args.budget is None else args.budget
    d = min(m.shape)
    phi = _phi(args, d)
    est = capra.rank_biconjugate(source, phi, m, budget=budget, seed=args.seed, tol=args.tol)
    rank = numerical_rank(m, args.tol)
    rec = {
        "matrix_file": args.matrix,
        "source": str(source),
        "rank": rank,
        "lower": est.lower,
        "upper": est.upper,
        "lambda_grid": est.meta["lambda_grid"],
        "converged": bool(abs(est.lower - rank) <= 1e-3),
        "seed": args.seed,
        "budget": budget,
    }
    return rec, EXIT_OK


def _cmd_ray(args, m, source):
    if not source.is_frobenius:
        raise InputError("the ray report is defined for the Frobenius source (schatten:2)")
    rep = capra.frobenius_equality_report(m, args.lambda_max_exp, args.tol)
    rec = {
        "matrix_file": args.matrix,
        "source": str(source),
        "rank": rep["rank"],
        "lower": rep["ray_values"][-1],
        "upper": rep["rank"],
        "lambda_grid": rep["lambda_grid"],
        "converged": rep["converged"],
        "seed": args.seed,
        "budget": None,
        "ray_values": rep["ray_values"],
    }
    return rec, EXIT_OK


def _cmd_verify(args, m, source):
    results = verify.run_all(seed=args.seed)
    rows = [
        {
            "criterion": r.number,
            "title": r.title,
            "passed": r.passed,
            "checks": r.checks,
            "first_failure": r.failures[0] if r.failures else "",
        }
        for r in results
    ]
    for r in results:
        print(r.line, file=sys.stderr)
    return rows, EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def table1_rows(m, restarts=DEFAULT_RESTARTS, samples=DEFAULT_SAMPLES, seed=0, p_general=3.0):
    """Closed-form rank norms next to generic estimates on one matrix."""
    d = min(m.shape)
    sv = singular_values(m)
    sources = [mn.SourceNorm.schatten(1.0), mn.SourceNorm.schatten(2.0), mn.SourceNorm.schatten(vn.INF)]
    sources.append(mn.SourceNorm.schatten(p_general))
    if d >= 2:
        sources.append(mn.SourceNorm.kyfan(2))
    rows = []
    for s in sources:
        rmax = s.k if s.kind == "kyfan" else d
        fam = mn.build_family(s)
        for r in range(1, rmax + 1):
            dual = mn.dual_rrank_norm(s, r, m)
            dual_est = mn.dual_rrank_generic(s, r, m, restarts=restarts, seed=seed)
            primal = mn.rrank_norm(s, r, m)
            dual_vec = mn.dual_vector_norm(s, r)
            primal_est = vn.dual_norm_oracle(dual_vec, sv, budget=samples, seed=seed)
            ok = abs(dual - dual_est) <= 1e-3 * max(1.0, dual) and abs(primal - primal_est) <= 1e-3 * max(1.0, primal)
            rows.append(
                {
                    "source": str(s),
                    "r": r,
                    "dual_kind": fam.dual_kind(r, d)[0],
                    "dual": dual,
                    "dual_generic": dual_est,
                    "primal_kind": fam.primal_kind(r, d)[0],
                    "primal": primal,
                    "primal_oracle": primal_est,
                    "agree": bool(ok),
                }
            )
    return rows


def _cmd_table1(args, m, source):
    if m is None:
        rng = np.random.default_rng(args.seed)
        m = rng.standard_normal((3, 3))
    rows = table1_rows(
        m,
        restarts=args.budget or DEFAULT_RESTARTS,
        samples=DEFAULT_SAMPLES,
        seed=args.seed,
        p_general=vn.parse_exponent(args.p) if args.p is not None else 3.0,
    )
    return rows, EXIT_OK if all(r["agree"] for r in rows) else EXIT_VERIFY


HANDLERS = {
    "norm": _cmd_norm,
    "dualrank": _cmd_dualrank,
    "rrank": _cmd_rrank,
    "conjugate": _cmd_conjugate,
    "bound": _cmd_bound,
    "ray": _cmd_ray,
    "verify": _cmd_verify,
    "table1": _cmd_table1,
}


def parse_args(argv=None):
    return build_parser().parse_intermixed_args(argv)


def run(args):
    """Dispatch parsed arguments; returns (exit code, report text)."""
    if args.verb in NEEDS_MATRIX and args.matrix is None:
        raise InputError(f"{args.verb} needs a matrix file")
    if args.verb in NEEDS_R and args.r is None:
        raise InputError(f"{args.verb} needs --r")
    if args.budget is not None and args.budget < 0:
        raise InputError("--budget must be >= 0")
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    m = read_matrix(args.matrix) if args.matrix is not None else None
    source = None if args.verb == "table1" else _source(args)
    if m is not None and source is not None:
        _check_source(source, m)
    rows, code = HANDLERS[args.verb](args, m, source)
    return code, render(rows, args.format)


def main(argv=None):
    args = parse_args(argv)
    try:
        code, text = run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RankCapraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
