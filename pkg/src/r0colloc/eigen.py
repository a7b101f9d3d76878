"""Dominant eigenpair of the pencil ``B phi = lambda M phi``."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .assembly import DiscretePencil
from .errors import ComplexDominantError, ConvergenceError, SingularPencilError
from .grid2d import GridFunction, interp2_on_grid

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 10_000
# dense fallback is skipped above this size (memory/time)
DENSE_FALLBACK_MAX = 4000
POLISH_STEPS = 5


@dataclass(frozen=True, eq=False)
class R0Result:
    r0: float
    eigvec: GridFunction
    residual: float
    iterations: int
    converged: bool
    method: str = "power"


def residual(pencil: DiscretePencil, lam: float, phi) -> float:
    """``||B phi - lam M phi||_inf / ||phi||_inf``."""
    v = phi.values if isinstance(phi, GridFunction) else np.asarray(phi, dtype=float)
    if v.shape != (pencil.size,):
        raise ValueError(f"vector of length {v.size} does not match pencil size {pencil.size}")
    scale = np.max(np.abs(v))
    if scale == 0:
        raise ValueError("residual of the zero vector is undefined")
    r = pencil.B @ v - lam * (pencil.M @ v)
    return float(np.max(np.abs(r)) / scale)


def _normalize(v):
    p = np.argmax(np.abs(v))
    return v / v[p]


def _factor(M):
    with warnings.catch_warnings():
        # singularity is reported below through the condition estimate
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu = sla.lu_factor(M, check_finite=False)
    anorm = np.linalg.norm(M, 1)
    rcond, info = sla.lapack.dgecon(lu[0], anorm, norm="1")
    if info != 0 or not rcond > np.finfo(float).eps:
        raise SingularPencilError(
            f"transition matrix is singular to working precision (rcond={rcond:.2e})"
        )
    return lu


def _stalled(changes, window=10):
    """No progress: recent changes no smaller than the ones before them."""
    if len(changes) < 5 * window:
        return False
    recent = np.median(changes[-window:])
    before = np.median(changes[-2 * window:-window])
    return recent >= 0.5 * before


def _dense_dominant(pencil, lu, tol):
    A = sla.lu_solve(lu, pencil.B, check_finite=False)
    vals, vecs = np.linalg.eig(A)
    p = np.argmax(np.abs(vals))
    lam = vals[p]
    if abs(lam.imag) > tol * abs(lam):
        raise ComplexDominantError(
            f"dominant eigenvalue {lam:.6g} is not real (|imag|/|lambda| = "
            f"{abs(lam.imag) / abs(lam):.2e})"
        )
    v = vecs[:, p]
    # eigenvectors of real eigenvalues may carry an arbitrary complex phase
    v = (v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))).real
    return float(lam.real), v


def dominant_pair(
    pencil: DiscretePencil,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> R0Result:
    """Eigenvalue of largest modulus of ``M^{-1} B`` and its eigenvector.

    M is LU-factorized once; power iteration then runs on
    ``v -> M^{-1} B v``.  Convergence requires both the relative change of
    the eigenvalue estimate and the sup-norm change of the normalized
    eigenvector to drop to `tol`.  If the iteration stagnates before that
    (roundoff floor, or a complex dominant pair), a dense eigendecomposition
    is used instead when the problem is small enough.  The result is
    flagged ``converged`` only if, in addition, the pencil residual of the
    returned pair is at most `tol`.

    Raises
    ------
    SingularPencilError
        M is numerically singular.
    ConvergenceError
        No convergence within `max_iter` and no dense fallback possible.
    ComplexDominantError
        The dominant eigenvalue has ``|imag| > tol * |lambda|``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    N = pencil.size
    lu = _factor(pencil.M)

    def apply(v):
        return sla.lu_solve(lu, pencil.B @ v, check_finite=False)

    v = np.ones(N)
    v[list(pencil.boundary_index_set)] = 0.0
    v = apply(v)
    if not np.any(v):
        # B annihilates the start vector; a zero operator has R0 = 0
        v = np.ones(N)
        return R0Result(0.0, GridFunction(pencil.grid, v), residual(pencil, 0.0, v), 1, True)
    v = _normalize(v)

    lam_old = np.nan
    changes = []
    converged = False
    method = "power"
    it = 0
    for it in range(1, max_iter + 1):
        y = apply(v)
        lam = float(v @ y / (v @ v))
        if lam == 0.0 or not np.isfinite(lam):
            break
        y_n = _normalize(y)
        dv = float(np.max(np.abs(y_n - v)))
        dl = abs(lam - lam_old) / abs(lam)
        v, lam_old = y_n, lam
        changes.append(max(dv, dl))
        if dl <= tol and dv <= tol:
            converged = True
            break
        if _stalled(changes):
            break

    if not converged:
        if N > DENSE_FALLBACK_MAX:
            raise ConvergenceError(
                f"power iteration did not converge after {it} iterations "
                f"(last change {changes[-1] if changes else float('nan'):.2e})"
            )
        log.info("power iteration stalled after %d iterations; using dense eig", it)
        lam, v = _dense_dominant(pencil, lu, tol)
        method = "dense"
        converged = True

    v = _normalize(v)
    if lam < 0:
        log.warning("dominant eigenvalue is negative (%g); reporting its modulus", lam)
    res = residual(pencil, lam, v)
    if method == "power":
        # a Cauchy difference below tol can leave a residual slightly above it
        # when the spectral gap is small; a few more steps close that gap
        for _ in range(POLISH_STEPS):
            if res <= tol:
                break
            y = apply(v)
            lam_new = float(v @ y / (v @ v))
            v_new = _normalize(y)
            res_new = residual(pencil, lam_new, v_new)
            if not res_new < res:
                break
            v, lam, res = v_new, lam_new, res_new
            it += 1
    if converged and res > tol:
        # the iteration settled but the pair misses the requested accuracy,
        # typically because tol is below the roundoff floor eps * ||lam M||
        log.info("residual %.2e exceeds tol %.1e; marking result unconverged", res, tol)
        converged = False
    return R0Result(
        r0=abs(lam),
        eigvec=GridFunction(pencil.grid, v),
        residual=res,
        iterations=it,
        converged=converged,
        method=method,
    )


def eval_grid(bounds, points: int = 101):
    """Uniform evaluation points used for eigenfunction errors."""
    x_lo, x_hi, y_lo, y_hi = bounds
    return np.linspace(x_lo, x_hi, points), np.linspace(y_lo, y_hi, points)


def match_exact(phi_num: GridFunction, phi_exact, points: int = 101):
    """Rescale `phi_num` to `phi_exact` and return ``(scaled, sup_error)``.

    The scale is fixed at the evaluation point where ``|phi_exact|`` is
    largest; the error is the maximum deviation over a uniform
    ``points x points`` grid on the domain rectangle.
    """
    xs, ys = eval_grid(phi_num.grid.bounds, points)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    with np.errstate(all="ignore"):
        exact = np.broadcast_to(np.asarray(phi_exact(X, Y), dtype=float), X.shape)
    if not np.all(np.isfinite(exact)):
        raise ValueError("exact eigenfunction is not finite on the evaluation grid")
    p = np.unravel_index(np.argmax(np.abs(exact)), exact.shape)
    if exact[p] == 0:
        raise ValueError("exact eigenfunction vanishes on the evaluation grid")
    approx = interp2_on_grid(phi_num, xs, ys)
    if approx[p] == 0:
        raise ValueError("numerical eigenfunction vanishes where the exact one peaks")
    s = exact[p] / approx[p]
    err = float(np.max(np.abs(s * approx - exact)))
    return GridFunction(phi_num.grid, s * phi_num.values), err
