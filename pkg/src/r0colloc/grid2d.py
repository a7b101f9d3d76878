"""Tensor-product grids and bivariate interpolation on them.

Samples are stored row-major in the first variable: the value at
``(x_i, y_j)`` lives at flat index ``k = i*(m+1) + j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral1d import Grid1D, cheb_grid


def vec_index(i: int, j: int, m: int, n: int | None = None) -> int:
    """Flat index of node ``(i, j)`` on a grid of degree `m` in y."""
    if m < 0 or not 0 <= j <= m or i < 0 or (n is not None and i > n):
        raise IndexError(f"node ({i}, {j}) out of range for m={m}, n={n}")
    return i * (m + 1) + j


def unvec_index(k: int, m: int) -> tuple[int, int]:
    """Inverse of :func:`vec_index`."""
    if k < 0 or m < 0:
        raise IndexError(f"flat index {k} out of range")
    return divmod(k, m + 1)


@dataclass(frozen=True, eq=False)
class TensorGrid:
    gx: Grid1D
    gy: Grid1D

    @property
    def n(self):
        return self.gx.n

    @property
    def m(self):
        return self.gy.n

    @property
    def shape(self):
        return (self.gx.n + 1, self.gy.n + 1)

    @property
    def size(self):
        return (self.gx.n + 1) * (self.gy.n + 1)

    @property
    def bounds(self):
        return (self.gx.lo, self.gx.hi, self.gy.lo, self.gy.hi)

    def mesh(self):
        """Node coordinates as two (n+1, m+1) arrays."""
        return np.meshgrid(self.gx.nodes, self.gy.nodes, indexing="ij")

    def cubature_weights(self):
        """Flat tensor-product Clenshaw-Curtis weights ``w_{x,k} w_{y,h}``."""
        return np.outer(self.gx.quad_weights, self.gy.quad_weights).ravel()

    def sample(self, f) -> GridFunction:
        """Sample a vectorized callable ``f(x, y)`` on the nodes."""
        X, Y = self.mesh()
        vals = np.broadcast_to(np.asarray(f(X, Y), dtype=float), self.shape)
        return GridFunction(self, vals.ravel().copy())


def tensor_grid(n: int, m: int, bounds) -> TensorGrid:
    """Chebyshev tensor grid of degree (n, m) on ``(x_lo, x_hi, y_lo, y_hi)``."""
    x_lo, x_hi, y_lo, y_hi = bounds
    return TensorGrid(cheb_grid(n, x_lo, x_hi), cheb_grid(m, y_lo, y_hi))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: TensorGrid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} values, got shape {self.values.shape}"
            )

    def as_array(self):
        """Samples reshaped to (n+1, m+1), ``[i, j]`` at ``(x_i, y_j)``."""
        return self.values.reshape(self.grid.shape)

    @classmethod
    def from_array(cls, grid, arr):
        arr = np.asarray(arr, dtype=float)
        if arr.shape != grid.shape:
            raise ValueError(f"expected shape {grid.shape}, got {arr.shape}")
        return cls(grid, arr.ravel().copy())

    def __call__(self, x, y):
        return interp2(self, x, y)


def _bary_basis(g: Grid1D, t):
    """Values of all Lagrange basis polynomials of `g` at the points `t`.

    Returns an array of shape ``t.shape + (n+1,)``.
    """
    t = np.asarray(t, dtype=float)
    tol = 1e-14 * (g.hi - g.lo)
    if np.any(t < g.lo - tol) or np.any(t > g.hi + tol):
        raise ValueError(f"evaluation point outside [{g.lo}, {g.hi}]; no extrapolation")
    diff = t[..., None] - g.nodes
    hit = np.abs(diff) <= tol
    on_node = hit.any(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = g.bary / np.where(hit, 1.0, diff)
        basis = terms / terms.sum(axis=-1, keepdims=True)
    # removable singularity at the nodes: use the Kronecker basis there
    kron = hit.astype(float)
    kron /= np.maximum(kron.sum(axis=-1, keepdims=True), 1.0)
    return np.where(on_node, kron, basis)


def interp_matrix(g: Grid1D, t) -> np.ndarray:
    """Matrix mapping the nodal samples of `g` to interpolant values at `t`."""
    return _bary_basis(g, np.atleast_1d(t))


def interp1(g: Grid1D, values, t):
    """Evaluate the univariate interpolant of `values` on `g` at `t`."""
    return _bary_basis(g, t) @ np.asarray(values, dtype=float)


def interp2(f: GridFunction, x, y):
    """Evaluate the collocation polynomial of `f` at ``(x, y)``.

    `x` and `y` broadcast against each other.  Evaluation collapses the
    x direction first, then y.  Points outside the rectangle raise
    ``ValueError``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    lx = _bary_basis(f.grid.gx, x)
    ly = _bary_basis(f.grid.gy, y)
    F = f.as_array()
    out = np.einsum("...i,ij,...j->...", lx, F, ly)
    return out[()] if out.ndim == 0 else out


def interp2_on_grid(f: GridFunction, xs, ys) -> np.ndarray:
    """Interpolant on the Cartesian product ``xs x ys`` (shape ``(len(xs), len(ys))``)."""
    Lx = interp_matrix(f.grid.gx, xs)
    Ly = interp_matrix(f.grid.gy, ys)
    return Lx @ f.as_array() @ Ly.T
