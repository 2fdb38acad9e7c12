"""Command line interface: EPPF tables, sampling and verification runs.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure.
"""
import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager

from .combinatorics import MAX_ENUMERATION_N, PartitionShape, SetPartition, integer_partitions, shape_multiplicity
from .eppf import (conditional_stable_model, dump_v_table, eppf_table, gg_v_weights,
                   gibbs_eppf, load_v_table, pd_v_weights)
from .errors import GibbsPKError, NumericalError, ParameterError, TableError
from .quadrature import QuadratureSpec
from .samplers import (RandomSource, crp_sample_labels, fisher_sample_labels, gibbs_predictive_labels,
                       shape_histogram)
from .verification import CheckReport, run_all, run_proposition2_suite, run_table_suite, run_theorem1_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

MODELS = ("pd", "gg", "conditional-stable", "fisher")
# parameters each model needs before any computation starts
REQUIRED = {
    "pd": ("alpha", "theta"),
    "gg": ("alpha", "delta", "zeta"),
    "conditional-stable": ("alpha", "delta", "t"),
    "fisher": ("alpha", "m"),
}


class UsageError(GibbsPKError):
    pass


def _add_model_args(p, table_out=True):
    p.add_argument("--model", choices=MODELS, help="partition model")
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--t", type=float, help="conditioning value of the total mass")
    p.add_argument("--m", type=int, help="number of atoms for the fisher model")
    p.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    p.add_argument("--abs-tol", type=float, help="quadrature absolute tolerance")
    p.add_argument("--table-in", help="read V weights from a JSON table instead of --model")
    if table_out:
        p.add_argument("--table-out", help="write the V weights used to a JSON table")


def _add_output_args(p, formats=("json", "csv")):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--output", "-o", help="output path (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gibbspk", description="Gibbs-type exchangeable partitions",
        epilog="Kernels are numba-compiled unless GIBBSPK_DISABLE_NUMBA=1 is set.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eppf", help="EPPF of every partition shape of [n]")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    _add_output_args(p)

    p = sub.add_parser("sample", help="draw random partitions of [n]")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sampler", choices=("auto", "crp", "predictive"), default="auto",
                   help="auto: Chinese restaurant for pd, atoms for fisher, predictive rule otherwise")
    p.add_argument("--histogram", action="store_true", help="emit shape counts instead of partitions")
    _add_output_args(p)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=("all", "proposition2", "theorem1"), default="all")
    p.add_argument("--table-in", help="verify an external V table instead of the built-in suites")
    p.add_argument("--n", type=int, default=6, help="largest n for the exhaustive checks")
    p.add_argument("--count", type=int, default=100_000, help="Monte Carlo sample size")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--abs-tol", type=float)
    _add_output_args(p, formats=("json", "text"))
    return parser


def _spec(args):
    if args.rel_tol is None and args.abs_tol is None:
        return None
    changes = {}
    if args.rel_tol is not None:
        changes["rel_tol"] = args.rel_tol
    changes["abs_tol"] = 0.0 if args.abs_tol is None else args.abs_tol
    return QuadratureSpec(**changes)


def _check_config(args):
    if args.n is not None and args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    if getattr(args, "count", 0) < 0:
        raise UsageError(f"--count must be >= 0, got {args.count}")
    if getattr(args, "table_in", None):
        return
    if args.model is None:
        raise UsageError("--model is required unless --table-in is given")
    missing = [name for name in REQUIRED[args.model] if getattr(args, name) is None]
    if missing:
        raise UsageError(f"model {args.model} needs " + ", ".join("--" + m for m in missing))
    if args.model == "fisher":
        if args.m < 1:
            raise UsageError(f"--m must be >= 1, got {args.m}")
        if not args.alpha < 0:
            raise UsageError(f"the fisher model needs --alpha < 0, got {args.alpha}")
    for name in ("alpha", "theta", "delta", "zeta", "t"):
        value = getattr(args, name, None)
        if value is not None and not math.isfinite(value):
            raise UsageError(f"--{name} must be finite")


def build_model(args, n):
    """GibbsModel covering EPPF values for n and one-step predictions up to n."""
    if getattr(args, "table_in", None):
        with open(args.table_in) as fp:
            return load_v_table(fp)
    spec = _spec(args)
    if args.model == "pd":
        return pd_v_weights(args.alpha, args.theta, n)
    if args.model == "fisher":
        return pd_v_weights(args.alpha, args.m * -args.alpha, n)
    if args.model == "gg":
        return gg_v_weights(args.alpha, args.delta, args.zeta, n, spec)
    return conditional_stable_model(args.alpha, args.delta, args.t, n, spec)


@contextmanager
def _open_output(path, newline=None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline=newline) as fp:
            yield fp


def _write_table_out(args, model):
    if getattr(args, "table_out", None):
        with open(args.table_out, "w") as fp:
            dump_v_table(model, fp)


# --------------------------------------------------------------------------
# eppf


def eppf_rows(model, n):
    if n > MAX_ENUMERATION_N:
        raise ParameterError(f"--n must be <= {MAX_ENUMERATION_N} for an exhaustive table")
    if n > model.n_max + 1:
        raise TableError(f"V table covers n <= {model.n_max + 1}, requested n={n}")
    return eppf_table(model, n)


def write_eppf(rows, model, n, fmt, fp):
    total = math.fsum(r.multiplicity * r.probability for r in rows)
    if fmt == "csv":
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["shape", "multiplicity", "probability", "log_probability"])
        for r in rows:
            w.writerow([str(r.shape), r.multiplicity, repr(r.probability), repr(r.log_probability)])
        return
    doc = {
        "model": model.label,
        "alpha": model.alpha,
        "params": {k: v for k, v in model.params.items() if isinstance(v, (int, float, str))},
        "n": n,
        "total": total,
        "rows": [{"shape": str(r.shape), "multiplicity": r.multiplicity, "probability": r.probability,
                  "log_probability": r.log_probability} for r in rows],
    }
    json.dump(doc, fp, indent=1)
    fp.write("\n")


def read_eppf(fp, fmt):
    """Parse a table written by :func:`write_eppf` into (shape, multiplicity, probability, log) tuples."""
    if fmt == "csv":
        reader = csv.DictReader(fp)
        return [(PartitionShape.parse(r["shape"]), int(r["multiplicity"]), float(r["probability"]),
                 float(r["log_probability"])) for r in reader]
    doc = json.load(fp)
    return [(PartitionShape.parse(r["shape"]), int(r["multiplicity"]), float(r["probability"]),
             float(r["log_probability"])) for r in doc["rows"]]


def cmd_eppf(args):
    _check_config(args)
    model = build_model(args, args.n)
    rows = eppf_rows(model, args.n)
    total = math.fsum(r.multiplicity * r.probability for r in rows)
    tol = 1e-10 if model.tolerances.get("exact") else 1e-6
    if not abs(total - 1.0) <= tol:
        raise NumericalError(f"EPPF table sums to {total!r}, outside 1 +/- {tol}")
    _write_table_out(args, model)
    with _open_output(args.output, newline="") as fp:
        write_eppf(rows, model, args.n, args.format, fp)
    return EXIT_OK


# --------------------------------------------------------------------------
# sample


def sample_labels(args, source):
    sampler = args.sampler
    if args.table_in or args.model in ("gg", "conditional-stable"):
        if sampler == "crp":
            raise UsageError("the Chinese restaurant sampler needs --model pd")
        sampler = "predictive"
    if sampler == "auto":
        sampler = "atoms" if args.model == "fisher" else "crp"
    if sampler == "atoms":
        return fisher_sample_labels(args.alpha, args.m, args.n, args.count, source)
    if sampler == "crp":
        theta = args.m * -args.alpha if args.model == "fisher" else args.theta
        return crp_sample_labels(args.alpha, theta, args.n, args.count, source)
    model = build_model(args, args.n)
    return gibbs_predictive_labels(model, args.n, args.count, source)


def _analytic_shape_probabilities(args):
    # best effort: only used to annotate histograms
    try:
        model = build_model(args, args.n)
        if args.n > MAX_ENUMERATION_N:
            return None
        return {s: gibbs_eppf(model, s) * shape_multiplicity(s) for s in integer_partitions(args.n)}
    except GibbsPKError:
        return None


def write_histogram(hist, count, expected, fmt, fp):
    shapes = sorted(set(hist) | set(expected or {}), key=tuple, reverse=True)
    rows = []
    for s in shapes:
        c = hist.get(s, 0)
        row = {"shape": str(s), "count": c, "frequency": c / count if count else math.nan}
        if expected is not None:
            p = expected.get(s, 0.0)
            se = math.sqrt(p * (1.0 - p) / count) if count else math.nan
            row["probability"] = p
            row["z"] = (row["frequency"] - p) / se if se > 0 else (0.0 if c == 0 else math.inf)
        rows.append(row)
    if fmt == "csv":
        fields = ["shape", "count", "frequency"] + (["probability", "z"] if expected is not None else [])
        w = csv.DictWriter(fp, fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return
    json.dump({"count": count, "rows": rows}, fp, indent=1)
    fp.write("\n")


def write_partitions(labels, fmt, fp):
    if fmt == "csv":
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["index", "partition", "shape"])
        for i, row in enumerate(labels.tolist()):
            part = SetPartition.from_labels(row)
            w.writerow([i, str(part), str(PartitionShape(len(b) for b in part))])
        return
    out = [[sorted(b) for b in SetPartition.from_labels(row)] for row in labels.tolist()]
    json.dump({"partitions": out}, fp)
    fp.write("\n")


def cmd_sample(args):
    _check_config(args)
    source = RandomSource(args.seed)
    labels = sample_labels(args, source)
    if args.table_out:
        _write_table_out(args, build_model(args, args.n))
    with _open_output(args.output, newline="") as fp:
        if args.histogram:
            write_histogram(shape_histogram(labels), args.count, _analytic_shape_probabilities(args),
                            args.format, fp)
        else:
            write_partitions(labels, args.format, fp)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def cmd_verify(args):
    if args.n < 2:
        raise UsageError(f"--n must be >= 2, got {args.n}")
    if args.table_in:
        try:
            with open(args.table_in) as fp:
                model = load_v_table(fp)
        except TableError as exc:
            # an unreadable table is a failed verification, not a crash
            report = CheckReport("table")
            report.run("table-load", "imported V table defines a valid Gibbs EPPF", {"path": args.table_in},
                       0.0, lambda err=exc: _raise(err))
        else:
            report = run_table_suite(model)
    elif args.suite == "proposition2":
        report = run_proposition2_suite(N=max(args.n, 8), spec=_spec(args))
    elif args.suite == "theorem1":
        report = run_theorem1_suite(N=args.n, mc_count=args.count, seed=args.seed)
    else:
        report = run_all(N=args.n, mc_count=args.count, seed=args.seed)
    with _open_output(args.output) as fp:
        fp.write(report.to_json() if args.format == "json" else report.to_text())
        fp.write("\n")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _raise(exc):
    raise exc


COMMANDS = {"eppf": cmd_eppf, "sample": cmd_sample, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on malformed flags
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"gibbspk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, TableError, ArithmeticError) as exc:
        print(f"gibbspk: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GibbsPKError as exc:
        print(f"gibbspk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gibbspk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
