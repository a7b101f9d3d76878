"""Univariate Chebyshev machinery on an arbitrary interval [lo, hi].

Nodes are the Chebyshev extremal points in ascending order, so that index 0
is the left endpoint.  The differentiation matrix, Clenshaw-Curtis weights
and barycentric weights all follow that ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _check_interval(n, lo, hi):
    if int(n) != n or n < 1:
        raise ValueError(f"degree must be a positive integer, got {n!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"interval bounds must be finite, got [{lo}, {hi}]")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")


def _check_nodes(nodes):
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a 1-D sequence of at least two nodes")
    if not np.all(np.diff(x) > 0):
        raise ValueError("nodes must be strictly increasing (no duplicates)")
    return x


def cheb_nodes(n: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Chebyshev extremal points of degree `n` mapped onto [lo, hi].

    Returns n+1 ascending nodes with ``nodes[0] == lo`` and
    ``nodes[n] == hi`` exactly.

    >>> cheb_nodes(2, -1, 1)
    array([-1.,  0.,  1.])
    """
    _check_interval(n, lo, hi)
    # sin form of -cos(k pi / n): exactly antisymmetric, exact zero at the middle
    k = np.arange(n + 1)
    t = np.sin(np.pi * (2 * k - n) / (2 * n))
    x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t
    x[0], x[-1] = lo, hi
    return x


def bary_weights(nodes) -> np.ndarray:
    """Barycentric weights ``1 / prod_{j != i} (x_i - x_j)``, scaled to max |w| = 1.

    Differences are rescaled by the interval capacity first so the products
    neither overflow nor underflow for a few hundred nodes.
    """
    x = _check_nodes(nodes)
    scale = 4.0 / (x[-1] - x[0])
    diff = (x[:, None] - x[None, :]) * scale
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


def cheb_bary_weights(n: int) -> np.ndarray:
    """Closed-form barycentric weights for the extremal points, ascending order."""
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    # ascending order flips the sign pattern when n is odd; only ratios matter
    return w * (-1.0) ** n


def diff_matrix(nodes, weights=None) -> np.ndarray:
    """Spectral differentiation matrix for polynomial interpolation on `nodes`.

    Off-diagonal entries come from the barycentric weights,
    ``D[i, j] = (w_j / w_i) / (x_i - x_j)``; the diagonal is the negative row
    sum so that constants are differentiated to exactly zero.
    """
    x = _check_nodes(nodes)
    w = bary_weights(x) if weights is None else np.asarray(weights, dtype=float)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    D = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    D[np.diag_indices_from(D)] = -D.sum(axis=1)
    return D


def cc_weights(n: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Clenshaw-Curtis quadrature weights matching :func:`cheb_nodes`.

    Exact for polynomials of degree <= n.  Uses the explicit cosine-sum
    formula (Trefethen, *Spectral Methods in MATLAB*, ``clencurt``).
    """
    _check_interval(n, lo, hi)
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    inner = theta[1:-1]
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
        v -= np.cos(n * inner) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    # symmetric, so the descending-to-ascending flip is a no-op
    return w[::-1] * (0.5 * (hi - lo))


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Chebyshev extremal grid of degree `n` on [lo, hi] with its operators."""

    lo: float
    hi: float
    n: int
    nodes: np.ndarray
    quad_weights: np.ndarray
    diff: np.ndarray
    bary: np.ndarray

    def __post_init__(self):
        for arr in (self.nodes, self.quad_weights, self.diff, self.bary):
            arr.setflags(write=False)

    @property
    def size(self):
        return self.n + 1


def cheb_grid(n: int, lo: float = -1.0, hi: float = 1.0) -> Grid1D:
    """Build a :class:`Grid1D` on the Chebyshev extremal points."""
    nodes = cheb_nodes(n, lo, hi)
    bary = cheb_bary_weights(n)
    return Grid1D(
        lo=float(lo),
        hi=float(hi),
        n=int(n),
        nodes=nodes,
        quad_weights=cc_weights(n, lo, hi),
        diff=diff_matrix(nodes, bary),
        bary=bary,
    )
