"""Collocation matrices for the birth and transition operators.

Rows are indexed like the unknowns, ``k = i*(m+1) + j``.  Interior rows
collocate the operators at ``(x_i, y_j)``; the rows at the boundary index of
each axis carry the nonlocal boundary conditions (zero in B, condition in M).
All integrals are replaced by tensor Clenshaw-Curtis cubature on the
collocation nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .grid2d import TensorGrid, tensor_grid
from .model import BCSide, ModelSpec


@dataclass(frozen=True, eq=False)
class DiscretePencil:
    B: np.ndarray
    M: np.ndarray
    grid: TensorGrid
    boundary_index_set: frozenset

    @property
    def size(self):
        return self.grid.size


def boundary_indices(spec: ModelSpec, grid: TensorGrid):
    """``(i_b, j_b)``: node indices carrying the x- and y-boundary conditions."""
    i_b = 0 if spec.x_bc_side is BCSide.LOW else grid.n
    j_b = 0 if spec.y_bc_side is BCSide.LOW else grid.m
    return i_b, j_b


def _row_masks(spec, grid):
    """Boolean (n+1, m+1) masks: x-boundary, y-boundary, singular and interior rows."""
    i_b, j_b = boundary_indices(spec, grid)
    shape = grid.shape
    xb = np.zeros(shape, dtype=bool)
    xb[i_b, :] = True
    yb = np.zeros(shape, dtype=bool)
    yb[:, j_b] = True
    yb[i_b, j_b] = False  # corner takes the x-boundary (beta) condition
    X, Y = grid.mesh()
    sing = np.broadcast_to(
        np.asarray(spec.singular_dirichlet_nodes(X, Y), dtype=bool), shape
    )
    sing = sing & ~xb & ~yb
    interior = ~(xb | yb | sing)
    return xb, yb, sing, interior


def _eval(fn, *args):
    with np.errstate(all="ignore"):
        out = np.asarray(fn(*args), dtype=float)
    return np.broadcast_to(out, np.broadcast(*args).shape)


def _require_finite(label, values, mask=None):
    bad = ~np.isfinite(values)
    if mask is not None:
        bad = bad & mask
    if bad.any():
        raise ModelError(f"{label}: non-finite value(s) at {int(bad.sum())} required node(s)")


def assemble_B(spec: ModelSpec, grid: TensorGrid) -> np.ndarray:
    """Cubature-discretized birth matrix; boundary and singular rows are zero."""
    X, Y = grid.mesh()
    _, _, _, interior = _row_masks(spec, grid)
    n1, m1 = grid.shape
    K = _eval(
        spec.kernel_K,
        X[:, :, None, None], Y[:, :, None, None], X[None, None], Y[None, None],
    )
    B = np.array(K, dtype=float, order="C")  # copy: K may be a broadcast view
    B = B.reshape(grid.size, grid.size)
    rows = interior.ravel()
    B[~rows] = 0.0
    _require_finite("K", B[rows])
    B *= grid.cubature_weights()[None, :]
    return B


def assemble_M(spec: ModelSpec, grid: TensorGrid) -> np.ndarray:
    """Transition matrix: collocated advection-reaction plus boundary rows."""
    n1, m1 = grid.shape
    N = grid.size
    X, Y = grid.mesh()
    xb, yb, sing, interior = _row_masks(spec, grid)
    i_b, j_b = boundary_indices(spec, grid)
    Dx, Dy = grid.gx.diff, grid.gy.diff

    a = _eval(spec.coeff_a, X, Y)
    b = _eval(spec.coeff_b, X, Y)
    c = _eval(spec.coeff_c, X, Y)
    d = _eval(spec.coeff_d, X, Y)
    mu = _eval(spec.coeff_mu, X, Y)
    for label, v in (("a", a), ("c", c), ("mu", mu)):
        _require_finite(label, v, interior)
    # b and d enter through every column of an interior row
    rows_i = interior.any(axis=1)
    _require_finite("b", b, np.broadcast_to(interior.any(axis=0)[None, :], b.shape))
    _require_finite("d", d, np.broadcast_to(rows_i[:, None], d.shape))

    M4 = np.zeros((n1, m1, n1, m1))
    ii, jj = np.arange(n1), np.arange(m1)
    # x-advection: a(x_i,y_j) Dx[i,k] b(x_k,y_j) at column (k, j)
    Tx = a[:, :, None] * Dx[:, None, :] * b.T[None, :, :]  # (i, j, k)
    M4[:, jj, :, jj] = Tx.transpose(1, 0, 2)
    # y-advection: c(x_i,y_j) Dy[j,h] d(x_i,y_h) at column (i, h)
    Ty = c[:, :, None] * Dy[None, :, :] * d[:, None, :]  # (i, j, h)
    M4[ii, :, ii, :] += Ty
    M4[ii[:, None], jj[None, :], ii[:, None], jj[None, :]] += mu
    M = M4.reshape(N, N)
    M[~interior.ravel()] = 0.0

    W = grid.cubature_weights()
    XI, SIG = X[None], Y[None]
    # x-boundary rows (i_b, j): phi - int beta(y_j, .) phi, including the corner
    beta = _eval(spec.kernel_beta, grid.gy.nodes[:, None, None], XI, SIG).reshape(m1, N)
    _require_finite("beta", beta)
    rows = i_b * m1 + jj
    M[rows] = -beta * W
    M[rows, rows] += 1.0
    # y-boundary rows (i, j_b), i != i_b
    alpha = _eval(spec.kernel_alpha, grid.gx.nodes[:, None, None], XI, SIG).reshape(n1, N)
    _require_finite("alpha", alpha)
    others = ii[ii != i_b]
    rows = others * m1 + j_b
    M[rows] = -alpha[others] * W
    M[rows, rows] += 1.0
    # singular-coefficient nodes: Dirichlet rows
    srows = np.flatnonzero(sing.ravel())
    M[srows] = 0.0
    M[srows, srows] = 1.0
    return M


def assemble(spec: ModelSpec, grid: TensorGrid) -> DiscretePencil:
    xb, yb, sing, interior = _row_masks(spec, grid)
    return DiscretePencil(
        B=assemble_B(spec, grid),
        M=assemble_M(spec, grid),
        grid=grid,
        boundary_index_set=frozenset(np.flatnonzero(~interior.ravel()).tolist()),
    )


def build_pencil(spec: ModelSpec, n: int, m: int) -> DiscretePencil:
    """Convenience: Chebyshev grid of degree (n, m) on the model domain, then assemble."""
    return assemble(spec, tensor_grid(n, m, spec.bounds))
