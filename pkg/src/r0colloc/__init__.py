"""Basic reproduction number of two-structure epidemic models.

Bivariate Chebyshev collocation discretizes the birth and transition
operators of a linearized structured-population PDE into a matrix pencil
``(B, M)``; R0 is its dominant eigenvalue.

>>> from r0colloc import builtin, build_pencil, dominant_pair
>>> spec, ref = builtin("ex1")
>>> res = dominant_pair(build_pencil(spec, 16, 16))
>>> abs(res.r0 - ref.r0_exact) < 1e-11
True
"""

from .assembly import DiscretePencil, assemble, assemble_B, assemble_M, build_pencil
from .eigen import R0Result, dominant_pair, match_exact, residual
from .errors import (
    ComplexDominantError,
    ConvergenceError,
    ModelError,
    NumericalError,
    R0Error,
    SingularPencilError,
)
from .grid2d import GridFunction, TensorGrid, interp2, tensor_grid, vec_index
from .harness import ConvergenceReport, emit_csv, estimate_order, run_convergence
from .model import BCSide, ExactReference, ModelSpec, builtin, model_names, validate
from .spectral1d import Grid1D, bary_weights, cc_weights, cheb_grid, cheb_nodes, diff_matrix

__version__ = "0.1.0"
