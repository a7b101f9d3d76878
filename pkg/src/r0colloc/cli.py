"""Command-line interface.

Exit codes: 0 success, 2 bad arguments (including unwritable output
paths), 3 model or validation errors, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import age_immunity
from .assembly import build_pencil
from .eigen import DEFAULT_TOL, dominant_pair
from .errors import ModelError, NumericalError
from .grid2d import tensor_grid
from .harness import emit_csv, run_convergence
from .model import builtin, describe, model_names, validate

EXIT_OK, EXIT_ARGS, EXIT_MODEL, EXIT_NUMERIC = 0, 2, 3, 4
DEFAULT_SIZES = "4:40:4"

log = logging.getLogger("r0colloc")


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def parse_sizes(text):
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (int(p) for p in text.split(":"))
            if step < 1:
                raise ValueError
            sizes = list(range(start, stop + 1, step))
        else:
            sizes = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size range {text!r}; use start:stop:step")
    if not sizes or sizes != sorted(sizes) or sizes[0] < 2:
        raise argparse.ArgumentTypeError(f"sizes must be non-empty, ascending, >= 2: {text!r}")
    return sizes


def _grid_shape(text):
    try:
        r, c = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use RxC, e.g. 101x101")
    if r < 2 or c < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points per axis")
    return r, c


def build_parser():
    p = argparse.ArgumentParser(
        prog="r0colloc",
        description="R0 of two-structure epidemic models by bivariate collocation.",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("compute", help="approximate R0 on one grid")
    c.add_argument("--model", required=True)
    c.add_argument("--n", type=_positive_int, required=True, help="degree in x")
    c.add_argument("--m", type=_positive_int, required=True, help="degree in y")
    c.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    c.add_argument("--format", choices=("csv", "json"), default="csv")

    v = sub.add_parser("converge", help="convergence sweep over n = m, written as CSV")
    v.add_argument("--model", required=True)
    v.add_argument("--sizes", type=parse_sizes, default=parse_sizes(DEFAULT_SIZES))
    v.add_argument("--out", default="-", help="output path (default: stdout)")
    v.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    sub.add_parser("list-models", help="list built-in models")

    d = sub.add_parser("dfe", help="export the disease-free susceptible surface")
    d.add_argument("--model", required=True, choices=("ageimm-ex6", "ageimm-ex7"))
    d.add_argument("--grid", type=_grid_shape, default=(101, 101))
    d.add_argument("--out", default="-")
    return p


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _load(name):
    try:
        return builtin(name)
    except KeyError as exc:
        raise ModelError(exc.args[0]) from None


def cmd_compute(args, out):
    spec, _ = _load(args.model)
    grid = tensor_grid(args.n, args.m, spec.bounds)
    report = validate(spec, grid)
    for w in report.warnings:
        log.warning("%s: %s", args.model, w)
    if not report.ok:
        raise ModelError("; ".join(report.errors))
    res = dominant_pair(build_pencil(spec, args.n, args.m), tol=args.tol)
    if not res.converged:
        log.warning("residual %.2e is above --tol %.1e", res.residual, args.tol)
    row = {
        "model": args.model,
        "n": args.n,
        "m": args.m,
        "r0": res.r0,
        "residual": res.residual,
        "iterations": res.iterations,
    }
    if args.format == "json":
        out.write(json.dumps(row) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(row.keys())
        w.writerow(repr(v) if isinstance(v, float) else v for v in row.values())


def cmd_converge(args, out):
    _load(args.model)
    report = run_convergence(args.model, args.sizes, tol=args.tol)
    failed = [r for r in report.records if r.failure]
    emit_csv(report, out)
    log.info("order_r0=%s order_phi=%s", report.order_r0, report.order_phi)
    if failed and len(failed) == len(report.records):
        raise NumericalError(f"all sizes failed; first: {failed[0].failure}")


def cmd_list(args, out):
    for name in model_names():
        _, ref = builtin(name)
        r0 = "" if ref.r0_exact is None else repr(ref.r0_exact)
        out.write(f"{name}\t{r0}\t{describe(name)}\n")


def cmd_dfe(args, out):
    k = int(args.model.rsplit("ex", 1)[1])
    ai = age_immunity.example(k)
    prof = age_immunity.dfe(ai)
    rows, cols = args.grid
    a = np.linspace(0.0, ai.a_max, rows)
    w = np.linspace(0.0, 1.0, cols)
    A, W = np.meshgrid(a, w, indexing="ij")
    S = prof.s_bar(A, W)
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(("a", "w", "s_bar"))
    for av, wv, sv in zip(A.ravel(), W.ravel(), S.ravel()):
        wr.writerow((repr(float(av)), repr(float(wv)), repr(float(sv))))


COMMANDS = {
    "compute": cmd_compute,
    "converge": cmd_converge,
    "list-models": cmd_list,
    "dfe": cmd_dfe,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ARGS
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    handle = None
    try:
        out, close = _open_out(getattr(args, "out", "-"))
        handle = out if close else None
        COMMANDS[args.subcommand](args, out)
        out.flush()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        if handle is not None:
            handle.close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
