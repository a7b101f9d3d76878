"""Convergence sweeps over n = m and empirical order estimation."""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .assembly import build_pencil
from .eigen import DEFAULT_TOL, dominant_pair, match_exact
from .errors import R0Error
from .model import builtin

log = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "m", "r0", "err_r0", "err_phi", "residual", "wall_time_s")
PLATEAU_FLOOR = 1e-12
REFERENCE_SIZE = 100


@dataclass
class Record:
    n: int
    m: int
    r0: Optional[float] = None
    err_r0: Optional[float] = None
    err_phi: Optional[float] = None
    residual: Optional[float] = None
    wall_time_seconds: Optional[float] = None
    failure: Optional[str] = None


@dataclass
class ConvergenceReport:
    model: str
    records: list = field(default_factory=list)
    order_r0: Optional[float] = None
    order_phi: Optional[float] = None
    reference_r0: Optional[float] = None
    reference_note: str = ""


def estimate_order(records, attr="err_r0", floor=PLATEAU_FLOOR) -> Optional[float]:
    """Least-squares slope of ``-log10(error)`` against ``log10(n)``.

    `records` is a sequence of :class:`Record` (the `attr` error is used) or
    of ``(n, error[, residual])`` tuples.  Errors at or below `floor`, or
    within 10x of the eigen residual, are on the roundoff plateau and are
    skipped.  Returns None when fewer than three usable points remain.
    """
    pts = []
    for rec in records:
        if isinstance(rec, Record):
            n, err, res = rec.n, getattr(rec, attr), rec.residual
        else:
            n, err, *rest = rec
            res = rest[0] if rest else None
        if err is None or not np.isfinite(err) or err <= floor:
            continue
        if res is not None and err <= 10 * res:
            continue
        pts.append((n, err))
    if len(pts) < 3:
        return None
    n, err = np.array(pts, dtype=float).T
    slope = np.polyfit(np.log10(n), np.log10(err), 1)[0]
    return float(-slope)


def _solve(spec, n, m, tol):
    return dominant_pair(build_pencil(spec, n, m), tol=tol)


def run_convergence(
    model: str,
    sizes: Sequence[int],
    tol: float = DEFAULT_TOL,
    reference_size: int = REFERENCE_SIZE,
    timer=time.perf_counter,
) -> ConvergenceReport:
    """Run the collocation pipeline for each ``n = m = s`` in `sizes`.

    Errors are measured against the model's exact R0 and, when known, its
    exact eigenfunction (sup norm on a 101 x 101 uniform grid).  Models whose
    stored reference is itself a collocation value get a fresh
    self-reference at ``n = m = reference_size``.  A failure at one size is
    recorded on that row and the sweep continues.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes) or any(s < 2 for s in sizes):
        raise ValueError("sizes must be ascending and each >= 2")
    spec, ref = builtin(model)

    reference, note = ref.r0_exact, ref.r0_reference_note
    if ref.r0_exact is None or ref.reference_size is not None:
        res = _solve(spec, reference_size, reference_size, tol)
        reference = res.r0
        note = f"self-reference, n=m={reference_size}"
        log.info("%s: self-reference R0 = %r", model, reference)

    report = ConvergenceReport(model=model, reference_r0=reference, reference_note=note)
    for s in sizes:
        rec = Record(n=s, m=s)
        t0 = timer()
        try:
            res = _solve(spec, s, s, tol)
            rec.r0, rec.residual = res.r0, res.residual
            if reference is not None:
                rec.err_r0 = abs(res.r0 - reference)
            if ref.eigenfunction_exact is not None:
                rec.err_phi = match_exact(res.eigvec, ref.eigenfunction_exact)[1]
        except (R0Error, ArithmeticError, ValueError) as exc:
            rec.failure = f"{type(exc).__name__}: {exc}"
            log.warning("%s at n=m=%d failed: %s", model, s, rec.failure)
        rec.wall_time_seconds = timer() - t0
        report.records.append(rec)

    report.order_r0 = estimate_order(report.records, "err_r0")
    report.order_phi = estimate_order(report.records, "err_phi")
    return report


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_text(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.records:
        w.writerow(
            _fmt(v)
            for v in (r.n, r.m, r.r0, r.err_r0, r.err_phi, r.residual, r.wall_time_seconds)
        )
    return buf.getvalue()


def emit_csv(report: ConvergenceReport, destination) -> None:
    """Write the report as CSV to a path or a text stream."""
    text = csv_text(report)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {destination}: {exc.strerror or exc}") from exc
