"""Epidemic model structured by demographic age ``a`` and immunity level ``w``.

Susceptibles lose immunity along ``w' = -g(w)``; infection happens with
probability ``beta(w)`` and infectives (infectivity ``nu(w)``) recover at
rate ``gamma``.  At the disease-free equilibrium the susceptible density
``s_bar(a, w)`` solves

    d_a s_bar - d_w[g s_bar] = -mu(a) s_bar,   g(1) s_bar(a, 1) = 0,
    s_bar(0, w) = birth(w),

which is integrated along characteristics here.  The infected equation
gives the operators

    (B phi)(a, w) = beta(w) s_bar(a, w) int_0^1 nu(om) int_0^amax phi(xi, om) dxi dom
    (M phi)(a, w) = d_a phi + (mu(a) + gamma) phi,   phi(0, w) = phi(a, 1) = 0

whose next-generation operator has rank one, so R0 reduces to a triple
integral (:func:`oracle_r0`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .model import BCSide, ExactReference, ModelSpec

RK4_MAX_STEP = 1e-2  # local error ~ h^5 stays below 1e-10 for the O(1) rates used here


# -- waning rates ------------------------------------------------------------


class Waning:
    """Immunity waning rate ``g(w) > 0`` with derivative ``dg``.

    Subclasses with a closed-form flow override :meth:`flow` and set
    ``dg_const`` when ``g'`` is constant.
    """

    dg_const: Optional[float] = None

    def __init__(self, g: Callable, dg: Callable):
        self._g, self._dg = g, dg

    def __call__(self, w):
        return self._g(w)

    def derivative(self, w):
        return self._dg(w)

    def flow(self, w0, t):
        """Solution of ``w' = -g(w)`` after time `t` from `w0`, or None."""
        return None


class AffineWaning(Waning):
    """``g(w) = rate * (c - w)`` with ``c >= 1``."""

    def __init__(self, rate: float, c: float):
        self.rate, self.c = float(rate), float(c)
        self.dg_const = -self.rate

    def __call__(self, w):
        return self.rate * (self.c - np.asarray(w, dtype=float))

    def derivative(self, w):
        return np.full(np.shape(w), -self.rate)

    def flow(self, w0, t):
        return self.c + np.exp(self.rate * np.asarray(t, dtype=float)) * (w0 - self.c)


class LinearWaning(Waning):
    """``g(w) = rate * w``."""

    def __init__(self, rate: float = 1.0):
        self.rate = float(rate)
        self.dg_const = self.rate

    def __call__(self, w):
        return self.rate * np.asarray(w, dtype=float)

    def derivative(self, w):
        return np.full(np.shape(w), self.rate)

    def flow(self, w0, t):
        return w0 * np.exp(-self.rate * np.asarray(t, dtype=float))


# -- mortality ---------------------------------------------------------------


class Mortality:
    """Natural mortality ``mu(a)``; :meth:`integral` falls back to quadrature."""

    singular_at_max = False

    def __init__(self, fn: Callable, singular_at_max: bool = False):
        self._fn = fn
        self.singular_at_max = singular_at_max

    def __call__(self, a):
        return self._fn(a)

    def integral(self, lo, hi):
        """``int_lo^hi mu``, elementwise over broadcast arrays."""
        lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
        out = np.empty(lo.shape)
        for idx in np.ndindex(lo.shape):
            out[idx] = integrate.quad(
                lambda s: float(self._fn(s)), lo[idx], hi[idx],
                epsabs=1e-14, epsrel=1e-12, limit=200,
            )[0]
        return out[()] if out.ndim == 0 else out


class ConstantMortality(Mortality):
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, a):
        return np.full(np.shape(a), self.value)

    def integral(self, lo, hi):
        return self.value * (np.asarray(hi, float) - np.asarray(lo, float))


class InverseSquareMortality(Mortality):
    """``mu(a) = 1 / (a_max - a)^2``, infinite at ``a = a_max``."""

    singular_at_max = True

    def __init__(self, a_max: float):
        self.a_max = float(a_max)

    def __call__(self, a):
        with np.errstate(divide="ignore"):
            return 1.0 / (self.a_max - np.asarray(a, dtype=float)) ** 2

    def integral(self, lo, hi):
        with np.errstate(divide="ignore"):
            return 1.0 / (self.a_max - np.asarray(hi, float)) - 1.0 / (
                self.a_max - np.asarray(lo, float)
            )


# -- model data --------------------------------------------------------------


def _one_minus(w):
    return 1.0 - np.asarray(w, dtype=float)


def _one_minus_sq(w):
    return (1.0 - np.asarray(w, dtype=float)) ** 2


@dataclass(frozen=True, eq=False)
class AgeImmunitySpec:
    """Parameters of the age-immunity model.

    Only the infection probability ``beta_inf`` is stored; the boosting
    probability is ``1 - beta_inf`` and does not affect R0.
    """

    a_max: float
    gamma: float
    waning: Waning
    mortality: Mortality
    birth: Callable = _one_minus_sq
    beta_inf: Callable = _one_minus
    nu: Callable = _one_minus

    def __post_init__(self):
        if not self.a_max > 0:
            raise ValueError("a_max must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        # zeros at the ends are allowed: g = w fixes w = 0, g = c - w with c = 1 fixes w = 1
        ws = np.linspace(0.0, 1.0, 201)
        gw = np.asarray(self.waning(ws), dtype=float)
        if not (np.all(gw[1:-1] > 0) and gw[0] >= 0 and gw[-1] >= 0):
            raise ValueError("waning rate g must be positive on (0, 1)")


def example4(a_max=2.0, c=1.0, gamma=1.0, mu_bar=1.0) -> AgeImmunitySpec:
    """Affine waning ``g = gamma (c - w)``, constant mortality, birth ``(1-w)^2``."""
    return AgeImmunitySpec(
        a_max=a_max, gamma=gamma,
        waning=AffineWaning(gamma, c),
        mortality=ConstantMortality(mu_bar),
    )


def example5(a_max=2.0, gamma=1.0) -> AgeImmunitySpec:
    """Linear waning ``g = w`` and mortality ``1/(a_max - a)^2``."""
    return AgeImmunitySpec(
        a_max=a_max, gamma=gamma,
        waning=LinearWaning(1.0),
        mortality=InverseSquareMortality(a_max),
    )


def example(k: int) -> AgeImmunitySpec:
    """The two R0 benchmarks: 6 (from :func:`example4`) and 7 (from :func:`example5`)."""
    if k == 6:
        return example4(a_max=2.0, c=1.0, gamma=1.0, mu_bar=1.0)
    if k == 7:
        return example5(a_max=2.0, gamma=1.0)
    raise KeyError(f"no age-immunity benchmark {k}")


R0_EX6 = (0.5 * math.exp(-8.0) - math.exp(-4.0) + 0.5) / 20.0
R0_EX7_REF = 0.111258187908847


def _phi_ex6(a, w):
    a = np.asarray(a, dtype=float)
    return 0.5 * (1.0 - w) ** 3 * np.exp(-2 * a) * (1.0 - np.exp(-2 * a))


def reference(k: int) -> ExactReference:
    if k == 6:
        return ExactReference(
            r0_exact=R0_EX6,
            eigenfunction_exact=_phi_ex6,
            r0_reference_note="closed form (1/20)(e^-8/2 - e^-4 + 1/2)",
        )
    if k == 7:
        return ExactReference(
            r0_exact=R0_EX7_REF,
            r0_reference_note="published self-converged value (collocation, n=m=100)",
            reference_size=100,
        )
    raise KeyError(f"no age-immunity benchmark {k}")


# -- characteristics ---------------------------------------------------------


def _rk4(rhs, y, t0, t1, steps):
    """Classical RK4 from t0 to t1 (arrays allowed) in a fixed number of steps."""
    h = (np.asarray(t1, float) - np.asarray(t0, float)) / steps
    t = np.asarray(t0, float)
    for _ in range(steps):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, [yi + h / 2 * ki for yi, ki in zip(y, k1)])
        k3 = rhs(t + h / 2, [yi + h / 2 * ki for yi, ki in zip(y, k2)])
        k4 = rhs(t + h, [yi + h * ki for yi, ki in zip(y, k3)])
        y = [yi + h / 6 * (p + 2 * q + 2 * r + s) for yi, p, q, r, s in zip(y, k1, k2, k3, k4)]
        t = t + h
    return y


def _n_steps(span):
    return max(1, int(math.ceil(float(np.max(np.abs(span))) / RK4_MAX_STEP)))


def _flow_numeric(waning, w0, t):
    t = np.asarray(t, dtype=float)
    (w,) = _rk4(lambda s, y: [-waning(y[0])], [np.asarray(w0, float) + 0 * t], 0.0, t, _n_steps(t))
    return w


def characteristic(spec: AgeImmunitySpec, a0: float, w0: float, a: float, numeric=False):
    """Immunity level at age `a` on the characteristic through ``(a0, w0)``.

    Uses the closed-form flow of the waning rate when one exists (unless
    `numeric` is set), otherwise fixed-step RK4 with steps no longer than
    ``RK4_MAX_STEP``.
    """
    if not 0.0 <= w0 <= 1.0:
        raise ValueError(f"w0={w0} outside [0, 1]")
    if a < a0:
        raise ValueError(f"backward query: a={a} < a0={a0}")
    if not 0.0 <= a0 <= spec.a_max or a > spec.a_max:
        raise ValueError(f"ages must lie in [0, {spec.a_max}]")
    if not numeric:
        w = spec.waning.flow(w0, a - a0)
        if w is not None:
            return float(w)
    return float(_flow_numeric(spec.waning, w0, a - a0))


class Provenance(enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"


@dataclass(frozen=True, eq=False)
class DFEProfile:
    s_bar: Callable
    w_star: Callable
    provenance: Provenance


def _w_star_fn(spec, numeric):
    flow = None if numeric else spec.waning.flow

    def w_star(a):
        a = np.asarray(a, dtype=float)
        out = flow(1.0, a) if flow is not None else None
        if out is None:
            out = _flow_numeric(spec.waning, 1.0, a)
        return out

    return w_star


def dfe(spec: AgeImmunitySpec, numeric: bool = False) -> DFEProfile:
    """Disease-free susceptible density via the method of characteristics.

    Along a characteristic ``w(a)`` the density ``sigma(a) = s_bar(a, w(a))``
    obeys ``sigma' = (g'(w) - mu(a)) sigma``.  Points below the separating
    characteristic ``w_star`` (through ``(0, 1)``) trace back to
    ``(0, w0)`` and start from ``birth(w0)``; points above it trace back to
    ``w = 1`` where the density is zero.  On ``w = w_star`` the value from
    below is used.

    The closed form is used when the waning rate has an explicit flow with
    constant ``g'``; otherwise (or with ``numeric=True``) the backward
    characteristic and ``int g'(w(s)) ds`` are integrated by RK4.
    """
    w_star = _w_star_fn(spec, numeric)
    mort = spec.mortality
    closed = (
        not numeric
        and spec.waning.flow(0.5, 0.0) is not None
        and spec.waning.dg_const is not None
    )

    def survival_log(a):
        # log of exp(-int_0^a mu); -inf at a singular a_max
        if mort.singular_at_max:
            at_max = a >= spec.a_max
            safe = np.where(at_max, 0.0, a)
            return np.where(at_max, -np.inf, -mort.integral(0.0, safe))
        return -mort.integral(0.0, a)

    if closed:
        def s_bar(a, w):
            a, w = np.broadcast_arrays(np.asarray(a, float), np.asarray(w, float))
            with np.errstate(all="ignore"):
                w0 = spec.waning.flow(w, -a)
                val = spec.birth(w0) * np.exp(spec.waning.dg_const * a + survival_log(a))
            below = w <= w_star(a)
            out = np.where(below & np.isfinite(val), val, 0.0)
            return out[()] if out.ndim == 0 else out

        return DFEProfile(s_bar, w_star, Provenance.CLOSED_FORM)

    def s_bar(a, w):
        a, w = np.broadcast_arrays(np.asarray(a, float), np.asarray(w, float))
        a_f, w_f = a.ravel(), w.ravel()

        def rhs(s, y):
            # backward in age: d/dt of (w, G) with t = -s
            return [spec.waning(y[0]), -spec.waning.derivative(y[0])]

        w0, G = _rk4(rhs, [w_f.copy(), np.zeros_like(w_f)], 0.0, a_f, _n_steps(a_f))
        # rhs above runs in reversed age, so G = -int_0^a g'(w(s)) ds
        with np.errstate(all="ignore"):
            val = spec.birth(np.minimum(w0, 1.0)) * np.exp(-G + survival_log(a_f))
        below = w_f <= w_star(a_f)
        out = np.where(below & np.isfinite(val), val, 0.0).reshape(a.shape)
        return out[()] if out.ndim == 0 else out

    return DFEProfile(s_bar, w_star, Provenance.NUMERIC)


# -- next-generation operator --------------------------------------------------


def survival_T(spec: AgeImmunitySpec, xi: float, a: float) -> float:
    """Probability factor ``exp(-int_xi^a (mu + gamma))`` for infection at age `xi`."""
    if xi > a:
        raise ValueError(f"need xi <= a, got xi={xi}, a={a}")
    if xi == a:
        return 1.0
    if spec.mortality.singular_at_max and a >= spec.a_max:
        return 0.0
    return float(np.exp(-spec.mortality.integral(xi, a) - spec.gamma * (a - xi)))


def oracle_r0(spec: AgeImmunitySpec, profile: DFEProfile, tol: float = 1e-9) -> float:
    """R0 from the explicit rank-one next-generation operator, by quadrature.

    Computes ``int_0^1 nu(om) int_0^amax int_0^xi T(xi, b) beta(om) s_bar(b, om)
    db dxi dom`` with the order of integration rearranged to

        int_0^amax  G(b) * S(b)  db,
        G(b) = int_0^{w*(b)} nu beta s_bar(b, .)    (s_bar vanishes above w*)
        S(b) = int_b^amax T(xi, b) dxi

    so that every panel has a smooth integrand.  Independent of the
    collocation machinery.
    """
    amax = spec.a_max
    opts = dict(epsabs=tol * 1e-3, epsrel=1e-12, limit=200)

    def G(b):
        top = min(1.0, float(profile.w_star(b)))
        if top <= 0.0:
            return 0.0
        f = lambda om: float(spec.nu(om) * spec.beta_inf(om) * profile.s_bar(b, om))
        return integrate.quad(f, 0.0, top, **opts)[0]

    def S(b):
        return integrate.quad(lambda xi: survival_T(spec, b, xi), b, amax, **opts)[0]

    val, err = integrate.quad(lambda b: G(b) * S(b), 0.0, amax, **opts)
    if err > tol:
        raise ArithmeticError(f"oracle quadrature error estimate {err:.1e} exceeds {tol:.1e}")
    return float(val)


def to_model_spec(spec: AgeImmunitySpec, profile: DFEProfile, name: str = "ageimm") -> ModelSpec:
    """Express the infected equation as a two-structure :class:`ModelSpec`.

    ``x`` is age on ``[0, a_max]``, ``y`` is immunity on ``[0, 1]``.  The
    conditions ``phi(0, w) = 0`` and ``phi(a, 1) = 0`` become homogeneous
    boundary rows at the low x-end and the high y-end.  When mortality is
    singular at ``a_max``, those nodes get Dirichlet rows.
    """
    amax, gamma = spec.a_max, spec.gamma
    mort = spec.mortality

    def coeff_mu(a, w):
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore"):
            return np.broadcast_to(mort(a) + gamma, np.broadcast(a, w).shape)

    def kernel_K(a, w, xi, om):
        return spec.beta_inf(w) * profile.s_bar(a, w) * spec.nu(om)

    def zero(*args):
        return 0.0

    def singular(a, w):
        a, w = np.broadcast_arrays(np.asarray(a, float), np.asarray(w, float))
        if not mort.singular_at_max:
            return np.zeros(a.shape, dtype=bool)
        return a >= amax - 1e-14 * amax

    return ModelSpec(
        name=name,
        x_lo=0.0, x_hi=amax, y_lo=0.0, y_hi=1.0,
        coeff_a=lambda a, w: 1.0,
        coeff_b=lambda a, w: 1.0,
        coeff_c=lambda a, w: 0.0,
        coeff_d=lambda a, w: 1.0,
        coeff_mu=coeff_mu,
        kernel_K=kernel_K,
        kernel_alpha=zero,
        kernel_beta=zero,
        x_bc_side=BCSide.LOW,
        y_bc_side=BCSide.HIGH,
        singular_dirichlet_nodes=singular,
        description="age-immunity infected equation",
    )
