"""Two-structure hyperbolic models with nonlocal boundary conditions.

A :class:`ModelSpec` describes the linearized problem

    a d/dx[b phi] + c d/dy[d phi] + mu phi          (transition operator M)
    int int K(x, y, xi, sigma) phi(xi, sigma)        (birth operator B)

on ``[x_lo, x_hi] x [y_lo, y_hi]``, with

    phi(x, y_b) = int int alpha(x, xi, sigma) phi     (y-boundary)
    phi(x_b, y) = int int beta(y, xi, sigma) phi      (x-boundary)

where ``x_b``/``y_b`` is the low or high end of each axis.

All coefficient and kernel callables must accept NumPy arrays and broadcast;
returning a Python scalar for a constant is fine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .grid2d import TensorGrid


class BCSide(enum.Enum):
    LOW = "low"
    HIGH = "high"


def _zero(*args):
    return 0.0


def _one(*args):
    return 1.0


def _never(x, y):
    return np.zeros(np.broadcast(x, y).shape, dtype=bool)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    coeff_a: Callable = _one
    coeff_b: Callable = _one
    coeff_c: Callable = _one
    coeff_d: Callable = _one
    coeff_mu: Callable = _zero
    kernel_K: Callable = _zero
    kernel_alpha: Callable = _zero
    kernel_beta: Callable = _zero
    x_bc_side: BCSide = BCSide.LOW
    y_bc_side: BCSide = BCSide.LOW
    singular_dirichlet_nodes: Callable = _never
    description: str = ""

    def __post_init__(self):
        for v in (self.x_lo, self.x_hi, self.y_lo, self.y_hi):
            if not math.isfinite(v):
                raise ValueError(f"{self.name}: domain bounds must be finite")
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError(
                f"{self.name}: degenerate domain "
                f"[{self.x_lo}, {self.x_hi}] x [{self.y_lo}, {self.y_hi}]"
            )

    @property
    def bounds(self):
        return (self.x_lo, self.x_hi, self.y_lo, self.y_hi)


@dataclass(frozen=True)
class ExactReference:
    r0_exact: Optional[float] = None
    eigenfunction_exact: Optional[Callable] = None
    r0_reference_note: str = ""
    # set when r0_exact is itself a collocation result at this n = m
    reference_size: Optional[int] = None

    def __post_init__(self):
        if self.r0_exact is not None and not self.r0_exact > 0:
            raise ValueError("reference R0 must be positive")


# -- built-in benchmarks ---------------------------------------------------

E = math.e
C_EX1 = 2.0 / ((E - 1.0) * (math.sqrt(3.0) - math.sqrt(2.0)))
C_EX3 = 9.0 * E / (2.0**5.5 * (E - 1.0))


def _ex1():
    spec = ModelSpec(
        name="ex1",
        x_lo=0.0, x_hi=1.0, y_lo=math.pi / 6, y_hi=math.pi / 4,
        coeff_a=lambda x, y: np.cos(y) / 3,
        coeff_b=_one,
        coeff_c=lambda x, y: np.sin(y) / 3,
        coeff_d=_one,
        coeff_mu=lambda x, y: np.cos(y) / 3,
        kernel_K=lambda x, y, xi, s: np.exp(x) * np.cos(y) * np.sin(y),
        kernel_alpha=lambda x, xi, s: C_EX1 * np.exp(x) / 2,
        kernel_beta=lambda y, xi, s: C_EX1 * np.sin(y),
        description="analytic eigenfunction e^x sin y, nonlocal boundaries on both axes",
    )
    ref = ExactReference(
        r0_exact=1.0 / C_EX1,
        eigenfunction_exact=lambda x, y: np.exp(x) * np.sin(y),
        r0_reference_note="closed form (e-1)(sqrt3-sqrt2)/2",
    )
    return spec, ref


def _ex2():
    spec = ModelSpec(
        name="ex2",
        x_lo=0.0, x_hi=1.0, y_lo=0.0, y_hi=1.0,
        coeff_a=lambda x, y: 2 * x / 15,
        coeff_b=_one,
        coeff_c=lambda x, y: y / 8,
        coeff_d=_one,
        coeff_mu=lambda x, y: np.full(np.broadcast(x, y).shape, 1 / 3),
        kernel_K=lambda x, y, xi, s: x**2.5 * y ** (8 / 3),
        kernel_alpha=_zero,
        kernel_beta=_zero,
        description="eigenfunction x^(5/2) y^(8/3), finite smoothness",
    )
    ref = ExactReference(
        r0_exact=6.0 / 77.0,
        eigenfunction_exact=lambda x, y: x**2.5 * y ** (8 / 3),
        r0_reference_note="closed form 6/77",
    )
    return spec, ref


def _ex3():
    spec = ModelSpec(
        name="ex3",
        x_lo=0.0, x_hi=1.0, y_lo=0.0, y_hi=2.0,
        coeff_a=_one,
        coeff_b=_one,
        coeff_c=lambda x, y: 2 * y / 7,
        coeff_d=_one,
        coeff_mu=_one,
        kernel_K=lambda x, y, xi, s: np.exp(-x) * y**3.5,
        kernel_alpha=_zero,
        kernel_beta=lambda y, xi, s: C_EX3 * y**3.5,
        description="eigenfunction e^(-x) y^(7/2), finite smoothness in y",
    )
    ref = ExactReference(
        r0_exact=1.0 / C_EX3,
        eigenfunction_exact=lambda x, y: np.exp(-x) * y**3.5,
        r0_reference_note="closed form 2^(11/2)(e-1)/(9e)",
    )
    return spec, ref


def _ageimm(example):
    from . import age_immunity

    ai = age_immunity.example(example)
    dfe = age_immunity.dfe(ai)
    spec = age_immunity.to_model_spec(ai, dfe, name=f"ageimm-ex{example}")
    return spec, age_immunity.reference(example)


_REGISTRY = {
    "ex1": _ex1,
    "ex2": _ex2,
    "ex3": _ex3,
    "ageimm-ex6": lambda: _ageimm(6),
    "ageimm-ex7": lambda: _ageimm(7),
}

_DESCRIPTIONS = {
    "ex1": "analytic eigenfunction, nonlocal boundary conditions",
    "ex2": "eigenfunction x^(5/2) y^(8/3), homogeneous boundaries",
    "ex3": "eigenfunction e^(-x) y^(7/2), nonlocal x-boundary",
    "ageimm-ex6": "age-immunity, affine waning, constant mortality",
    "ageimm-ex7": "age-immunity, linear waning, mortality 1/(a_max-a)^2",
}


def model_names():
    return list(_REGISTRY)


def describe(name):
    return _DESCRIPTIONS[name]


def builtin(name: str) -> tuple[ModelSpec, ExactReference]:
    """Return ``(spec, reference)`` for a registered benchmark model."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown model {name!r}; choose from {', '.join(_REGISTRY)}"
        ) from None
    return factory()


# -- validation --------------------------------------------------------------


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    singular_nodes: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.errors


def _eval(fn, *args):
    with np.errstate(all="ignore"):
        out = np.asarray(fn(*args), dtype=float)
    return np.broadcast_to(out, np.broadcast(*args).shape)


def validate(spec: ModelSpec, grid: TensorGrid, max_kernel_pairs: int = 20_000_000):
    """Check every coefficient and kernel on the grid nodes.

    Never raises for bad data: problems are collected in the returned
    :class:`ValidationReport`.  Non-finite values at nodes flagged by
    ``spec.singular_dirichlet_nodes`` are recorded as covered singularities,
    and negative values of mu, a, c, K, alpha, beta become warnings.  For
    large grids the kernel K is checked on an evenly strided subset of rows.
    """
    rep = ValidationReport()
    if not (spec.x_lo < spec.x_hi and spec.y_lo < spec.y_hi):
        rep.errors.append("degenerate domain")
        return rep
    gb = grid.bounds
    if not np.allclose(gb, spec.bounds, rtol=0, atol=1e-14 * max(1.0, *map(abs, gb))):
        rep.errors.append(f"grid bounds {gb} do not match model bounds {spec.bounds}")
        return rep

    X, Y = grid.mesh()
    try:
        singular = np.broadcast_to(
            np.asarray(spec.singular_dirichlet_nodes(X, Y), dtype=bool), grid.shape
        )
    except Exception as exc:  # user callables may fail arbitrarily
        rep.errors.append(f"singular_dirichlet_nodes failed: {exc}")
        return rep
    rep.singular_nodes = [tuple(map(int, ij)) for ij in np.argwhere(singular)]

    def check(label, values, mask=None, nonneg=True):
        bad = ~np.isfinite(values)
        if mask is not None:
            bad &= ~mask
        if bad.any():
            rep.errors.append(f"{label}: {int(bad.sum())} non-finite value(s)")
        if nonneg:
            with np.errstate(invalid="ignore"):
                neg = np.isfinite(values) & (values < 0)
            if neg.any():
                rep.warnings.append(f"{label}: negative values ({int(neg.sum())})")

    coeffs = [
        ("a", spec.coeff_a, True),
        ("b", spec.coeff_b, False),
        ("c", spec.coeff_c, True),
        ("d", spec.coeff_d, False),
        ("mu", spec.coeff_mu, True),
    ]
    for label, fn, nonneg in coeffs:
        try:
            vals = _eval(fn, X, Y)
        except Exception as exc:
            rep.errors.append(f"{label}: evaluation failed: {exc}")
            continue
        check(label, vals, mask=singular, nonneg=nonneg)

    xs, ys = grid.gx.nodes, grid.gy.nodes
    XI, SIG = X[None], Y[None]
    try:
        check("alpha", _eval(spec.kernel_alpha, xs[:, None, None], XI, SIG))
        check("beta", _eval(spec.kernel_beta, ys[:, None, None], XI, SIG))
    except Exception as exc:
        rep.errors.append(f"boundary kernel evaluation failed: {exc}")

    N = grid.size
    stride = max(1, int(math.ceil(N * N / max_kernel_pairs)))
    rows = np.arange(0, N, stride)
    Xr, Yr = X.ravel()[rows], Y.ravel()[rows]
    try:
        Kv = _eval(spec.kernel_K, Xr[:, None, None], Yr[:, None, None], XI, SIG)
        check("K", Kv, mask=singular.ravel()[rows][:, None, None])
    except Exception as exc:
        rep.errors.append(f"K: evaluation failed: {exc}")
    return rep
