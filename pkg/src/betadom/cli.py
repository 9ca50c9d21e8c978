"""Command-line entry point.

Sampler subcommands write CSV (``replica`` first, 17 significant digits).
Test subcommands write a JSON report, or a one-row CSV with ``--format csv``,
and can dump per-replica values with ``--samples``.

Exit codes: 0 success/pass, 1 test verdict fail, 2 usage or parameter
error, 3 numerical failure. The default seed can be set with
``BETADOM_SEED``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import ensembles as ens
from . import lpp
from . import stochastic_operator as so
from .errors import NumericalError, ParameterError
from .montecarlo import COMPARISONS, IDENTITIES, SAMPLERS, run_replicas
from .stats import distributional_report, pathwise_report, two_sample_ks

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
SEED_ENV = "BETADOM_SEED"
REPORT_CSV_FIELDS = ("test", "n", "m", "statistic", "p_value", "verdict", "seed")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if math.isnan(v) else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def write_rows(path, columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replica", *columns])
    for r, row in enumerate(rows):
        w.writerow([r, *(_fmt(x) for x in row)])
    fh, close = _open_out(path)
    try:
        fh.write(buf.getvalue())
    finally:
        if close:
            fh.close()


def run_config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def emit_report(args, report: dict) -> int:
    report = _jsonable(report)
    fh, close = _open_out(args.out)
    try:
        if args.format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_CSV_FIELDS)
            w.writerow([_fmt(report.get(k)) for k in REPORT_CSV_FIELDS])
        else:
            fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK if report.get("verdict", "pass") == "pass" else EXIT_FAIL


def _replicas(args, sampler_id, params):
    rows = run_replicas(sampler_id, params, args.reps, args.seed, args.workers)
    if getattr(args, "samples", None):
        write_rows(args.samples, SAMPLERS[sampler_id].columns, rows)
    return rows


def _base_report(args, test, statistic, p_value, verdict, n, m, **extra):
    out = {
        "test": test,
        "params": run_config(args),
        "n": int(n),
        "m": int(m),
        "statistic": statistic,
        "p_value": p_value,
        "verdict": verdict,
        "seed": args.seed,
    }
    out.update(extra)
    return out


def _dominance_report(args, test, rows_hi, rows_lo, pathwise_tol=None, extra_ok=True, **extra):
    if pathwise_tol is not None:
        rep = pathwise_report(np.column_stack([rows_hi, rows_lo]), pathwise_tol)
    else:
        rep = distributional_report(rows_hi, rows_lo, args.alpha_level)
    verdict = "pass" if rep.verdict == "pass" and extra_ok else "fail"
    return _base_report(
        args, test, rep.d_plus, rep.p_value_one_sided, verdict, len(rows_hi), len(rows_lo),
        report=rep.as_dict(), **extra,
    )


# --- subcommands -----------------------------------------------------------


def cmd_hermite(args):
    rows = run_replicas("hermite", dict(n=args.n, beta=args.beta), args.reps, args.seed, args.workers)
    write_rows(args.out, SAMPLERS["hermite"].columns, rows)
    return EXIT_OK


def cmd_laguerre(args):
    params = dict(n=args.n, kappa=args.kappa, beta=args.beta)
    rows = run_replicas("laguerre", params, args.reps, args.seed, args.workers)
    write_rows(args.out, SAMPLERS["laguerre"].columns, rows)
    return EXIT_OK


def cmd_couple_hermite(args):
    spec = ens.HermiteCoupleSpec(args.m, args.n, args.beta1)
    params = dict(m=args.m, n=args.n, beta1=args.beta1)
    if args.mode == "pathwise":
        rows = _replicas(args, "couple_hermite", params)
        report = _dominance_report(
            args, "couple-hermite/pathwise", rows[:, 0], rows[:, 1], args.tol,
            spec=spec.as_dict(), scaling=ens.scaling_identity_check(spec),
        )
    else:
        rows = _replicas(args, "hermite_independent", params)
        report = _dominance_report(
            args, "couple-hermite/distributional", rows[:, 0], rows[:, 1], spec=spec.as_dict()
        )
    return emit_report(args, report)


def cmd_couple_laguerre(args):
    spec = ens.LaguerreCoupleSpec(args.m, args.n, args.kappa, args.beta1)
    params = dict(m=args.m, n=args.n, kappa=args.kappa, beta1=args.beta1)
    if args.mode == "pathwise":
        rows = _replicas(args, "couple_laguerre", params)
        equal = bool(np.all(rows[:, 2] == 0.0))
        report = _dominance_report(
            args, "couple-laguerre/pathwise", rows[:, 0], rows[:, 1], args.tol, extra_ok=equal,
            spec=spec.as_dict(), scaling=ens.scaling_identity_check(spec),
            first_diagonal_equal=equal,
        )
    else:
        rows = _replicas(args, "laguerre_independent", params)
        report = _dominance_report(
            args, "couple-laguerre/distributional", rows[:, 0], rows[:, 1], spec=spec.as_dict()
        )
    return emit_report(args, report)


def cmd_tw(args):
    params = dict(k=args.k, beta=args.beta, L=args.L, h=args.h)
    rows = run_replicas("tw", params, args.reps, args.seed, args.workers)
    write_rows(args.out, SAMPLERS["tw"].columns, rows)
    return EXIT_OK


def _operator_spec(args):
    if args.p is not None:
        return so.OperatorCouplingSpec(args.k, args.beta1, args.beta2, args.p)
    return so.OperatorCouplingSpec.from_s(args.k, args.beta1, args.beta2, args.s)


def cmd_tw_couple(args):
    spec = _operator_spec(args)
    grid = dict(L=args.L, h=args.h)
    if args.mode == "pathwise":
        params = dict(k=args.k, beta1=args.beta1, beta2=args.beta2, p=spec.p, **grid)
        rows = _replicas(args, "tw_couple", params)
        report = _dominance_report(
            args, "tw-couple/pathwise", rows[:, 1], rows[:, 0], args.tol, spec=spec.as_dict()
        )
    else:
        params = dict(k=args.k, beta1=args.beta1, beta2=args.beta2, alpha=spec.alpha, **grid)
        rows = _replicas(args, "tw_independent", params)
        report = _dominance_report(
            args, "tw-couple/distributional", rows[:, 0], rows[:, 1], spec=spec.as_dict()
        )
    return emit_report(args, report)


def cmd_tw_range(args):
    p_lo, p_hi = so.admissible_p_range(args.k, args.beta1, args.beta2)
    a_lo, a_hi = so.alpha_range(args.k, args.beta1, args.beta2)
    s_lo, s_hi = so.s_range(args.k)
    values = {"p_lo": p_lo, "p_hi": p_hi, "alpha_lo": a_lo, "alpha_hi": a_hi, "s_lo": s_lo, "s_hi": s_hi}
    fh, close = _open_out(args.out)
    try:
        if args.format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "beta1", "beta2", *values])
            w.writerow([args.k, _fmt(args.beta1), _fmt(args.beta2), *(_fmt(v) for v in values.values())])
        else:
            fh.write(json.dumps(_jsonable({"params": run_config(args), **values}), indent=2, sort_keys=True) + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_lpp(args):
    rows = run_replicas("lpp", dict(model=args.model, n=args.n), args.reps, args.seed, args.workers)
    write_rows(args.out, SAMPLERS["lpp"].columns, rows)
    return EXIT_OK


def cmd_identity_check(args):
    rows = _replicas(args, "identity", dict(which=args.which, n=args.n))
    d, p = two_sample_ks(rows[:, 0], rows[:, 1])
    verdict = "pass" if p > args.alpha_level else "fail"
    model, size, kappa, beta, factor = IDENTITIES[args.which](args.n)
    report = _base_report(
        args, f"identity-check/{args.which}", d, p, verdict, len(rows), len(rows),
        matrix={"n": size, "kappa": kappa, "beta": beta, "factor": factor}, lpp_model=model,
    )
    return emit_report(args, report)


def cmd_lpp_compare(args):
    rows = _replicas(args, "comparison", dict(which=args.which, n=args.n))
    hi, lo = COMPARISONS[args.which](args.n)
    report = _dominance_report(
        args, f"lpp-compare/{args.which}", rows[:, 0], rows[:, 1],
        dominating=dict(zip(("n", "kappa", "beta", "factor"), hi)),
        dominated=dict(zip(("n", "kappa", "beta", "factor"), lo)),
    )
    return emit_report(args, report)


def _read_column(path, column):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParameterError(f"{path}: empty CSV")
        name = column or next((c for c in reader.fieldnames if c != "replica"), None)
        if name not in reader.fieldnames:
            raise ParameterError(f"{path}: no column {name!r}")
        try:
            return np.array([float(row[name]) for row in reader])
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"{path}: non-numeric value in column {name!r}") from exc


def _affine(text):
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'scale,shift', got {text!r}") from exc
    return a, b


def cmd_dominance(args):
    x = _read_column(args.x, args.column_x)
    y = _read_column(args.y, args.column_y)
    x = args.affine_x[0] * x + args.affine_x[1]
    y = args.affine_y[0] * y + args.affine_y[1]
    rep = distributional_report(x, y, args.alpha_level)
    report = {
        "test": "dominance",
        "params": run_config(args),
        "n": x.size,
        "m": y.size,
        "statistic": rep.d_plus,
        "p_value": rep.p_value_one_sided,
        "verdict": rep.verdict,
        "seed": None,
        "report": rep.as_dict(),
    }
    return emit_report(args, report)


# --- parser ----------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betadom",
        description="Beta-ensemble samplers, dominance couplings and LPP identity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help, report=False):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--reps", type=_positive_int, default=1000)
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--workers", type=_positive_int, default=1)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if report:
            p.add_argument("--format", choices=("json", "csv"), default="json")
            p.add_argument("--samples", default=None, help="also write per-replica values as CSV")
            p.add_argument("--alpha-level", type=float, default=1e-3)
        else:
            p.set_defaults(format="csv")
        return p

    p = command("hermite", cmd_hermite, "sample Hermite largest eigenvalues")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--beta", type=float, required=True)

    p = command("laguerre", cmd_laguerre, "sample Laguerre largest eigenvalues")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)

    p = command("couple-hermite", cmd_couple_hermite, "Hermite dominance (beta2 = m*beta1/n)", True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--beta1", required=True, help="rational or decimal, e.g. 2 or 1/3")
    p.add_argument("--mode", choices=("pathwise", "distributional"), default="pathwise")
    p.add_argument("--tol", type=float, default=1e-10)

    p = command("couple-laguerre", cmd_couple_laguerre, "Laguerre dominance (beta2 = m*beta1/n)", True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--beta1", required=True)
    p.add_argument("--mode", choices=("pathwise", "distributional"), default="pathwise")
    p.add_argument("--tol", type=float, default=1e-10)

    def grid_args(p):
        p.add_argument("--k", type=int, default=0)
        p.add_argument("--L", type=float, default=20.0)
        p.add_argument("--h", type=float, default=0.02)

    p = command("tw", cmd_tw, "sample order-k Tracy-Widom from the discretized operator")
    grid_args(p)
    p.add_argument("--beta", type=float, required=True)

    p = command("tw-couple", cmd_tw_couple, "operator comparison between two betas", True)
    grid_args(p)
    p.add_argument("--beta1", type=float, required=True)
    p.add_argument("--beta2", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=float)
    g.add_argument("--s", type=float)
    p.add_argument("--mode", choices=("pathwise", "distributional"), default="pathwise")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("tw-range", help="admissible p, alpha and s ranges")
    p.set_defaults(func=cmd_tw_range)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--beta1", type=float, required=True)
    p.add_argument("--beta2", type=float, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    # Accepted for a uniform interface; ranges are deterministic.
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--workers", type=_positive_int, default=1)

    p = command("lpp", cmd_lpp, "sample last-passage times")
    p.add_argument("--model", choices=lpp.MODELS, default="point_to_point")
    p.add_argument("--n", type=_positive_int, required=True)

    p = command("identity-check", cmd_identity_check, "LPP vs Laguerre two-sample KS", True)
    p.add_argument("--which", choices=tuple(IDENTITIES), required=True)
    p.add_argument("--n", type=_positive_int, required=True)

    p = command("lpp-compare", cmd_lpp_compare, "Laguerre comparisons implied by LPP", True)
    p.add_argument("--which", choices=tuple(COMPARISONS), required=True)
    p.add_argument("--n", type=_positive_int, required=True)

    p = sub.add_parser("dominance", help="one-sided KS on two CSV sample files")
    p.set_defaults(func=cmd_dominance)
    p.add_argument("x", help="CSV of the sample expected to dominate")
    p.add_argument("y", help="CSV of the sample expected to be dominated")
    p.add_argument("--column-x", default=None)
    p.add_argument("--column-y", default=None)
    p.add_argument("--affine-x", type=_affine, default=(1.0, 0.0), help="scale,shift")
    p.add_argument("--affine-y", type=_affine, default=(1.0, 0.0), help="scale,shift")
    p.add_argument("--alpha-level", type=float, default=1e-3)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"betadom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"betadom: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"betadom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
