import math

import numpy as np
import pytest
from scipy import integrate

from r0colloc.age_immunity import (
    R0_EX6,
    AgeImmunitySpec,
    ConstantMortality,
    Provenance,
    Waning,
    characteristic,
    dfe,
    example,
    example4,
    example5,
    oracle_r0,
    survival_T,
    to_model_spec,
)
from r0colloc.assembly import build_pencil
from r0colloc.eigen import dominant_pair, match_exact
from r0colloc.model import builtin

R0_EX6_PUBLISHED = 0.024092604621261


def constant_waning(eps):
    return Waning(lambda w: eps + 0 * np.asarray(w, float), lambda w: 0 * np.asarray(w, float))


class TestCharacteristic:
    def test_example4(self):
        spec = example4(c=1.5, gamma=0.7)
        for w0, a in [(0.2, 0.5), (0.9, 1.3), (0.0, 2.0)]:
            want = 1.5 + math.exp(0.7 * a) * (w0 - 1.5)
            if want >= 0:
                assert characteristic(spec, 0.0, w0, a) == pytest.approx(want, abs=1e-14)

    def test_example5(self):
        spec = example5()
        assert characteristic(spec, 0.0, 0.8, 1.2) == pytest.approx(0.8 * math.exp(-1.2), abs=1e-15)

    def test_constant_rate(self):
        spec = AgeImmunitySpec(2.0, 1.0, constant_waning(0.05), ConstantMortality(1.0))
        assert characteristic(spec, 0.3, 0.7, 1.5) == pytest.approx(0.7 - 0.05 * 1.2, abs=1e-12)

    @pytest.mark.parametrize("k", [4, 5])
    def test_closed_matches_numeric(self, k):
        spec = example4(c=1.2) if k == 4 else example5()
        rng = np.random.default_rng(k)
        worst = 0.0
        for _ in range(100):
            a0 = rng.uniform(0, 2)
            a = rng.uniform(a0, 2)
            w0 = rng.uniform(0, 1)
            exact = characteristic(spec, a0, w0, a)
            if exact < 0:
                continue
            worst = max(worst, abs(exact - characteristic(spec, a0, w0, a, numeric=True)))
        assert worst <= 1e-8

    def test_monotone_nonincreasing(self):
        for spec in (example(6), example(7), example4(c=1.3)):
            ages = np.linspace(0, 2, 41)
            ws = [characteristic(spec, 0.0, 0.6, a, numeric=True) for a in ages]
            assert np.all(np.diff(ws) <= 1e-15)

    @pytest.mark.parametrize("args", [(0.0, 1.2, 1.0), (0.0, -0.1, 1.0), (1.0, 0.5, 0.5)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            characteristic(example(7), *args)


class TestDFE:
    def test_example5_at_age_zero(self):
        prof = dfe(example5())
        w = np.linspace(0, 1, 11)
        np.testing.assert_allclose(prof.s_bar(0.0, w), (1 - w) ** 2, atol=1e-15)

    def test_example5_closed_form(self):
        prof = dfe(example5())
        a, w = 0.8, 0.3
        want = (1 - w * math.exp(a)) ** 2 * math.exp(a) * math.exp(0.5) * math.exp(-1 / (2 - a))
        assert prof.s_bar(a, w) == pytest.approx(want, rel=1e-14)
        assert prof.s_bar(2.0, 0.1) == 0.0

    def test_example4_unit_c(self):
        prof = dfe(example(6))
        A, W = np.meshgrid(np.linspace(0, 2, 9), np.linspace(0, 1, 7), indexing="ij")
        np.testing.assert_allclose(prof.s_bar(A, W), (1 - W) ** 2 * np.exp(-4 * A), rtol=1e-13, atol=1e-16)
        np.testing.assert_allclose(prof.w_star(np.linspace(0, 2, 5)), 1.0)

    def test_example4_general(self):
        spec = example4(c=1.4, gamma=0.5, mu_bar=0.3)
        prof = dfe(spec)
        a, w = 0.6, 0.5
        w0 = 1.4 + math.exp(-0.5 * a) * (w - 1.4)
        assert prof.s_bar(a, w) == pytest.approx((1 - w0) ** 2 * math.exp(-0.8 * a), rel=1e-13)

    @pytest.mark.parametrize("spec", [example(7), example4(c=1.4)], ids=["ex5", "ex4"])
    def test_zero_above_separatrix(self, spec):
        prof = dfe(spec)
        for a in (0.3, 1.0, 1.7):
            ws = float(prof.w_star(a))
            above = np.linspace(ws, 1, 6)[1:]
            assert np.all(prof.s_bar(a, above) == 0.0)

    @pytest.mark.parametrize("spec", [example(7), example4(c=1.4, gamma=0.5, mu_bar=0.3)], ids=["ex5", "ex4"])
    def test_closed_matches_numeric(self, spec):
        pc, pn = dfe(spec), dfe(spec, numeric=True)
        assert pc.provenance is Provenance.CLOSED_FORM and pn.provenance is Provenance.NUMERIC
        rng = np.random.default_rng(3)
        a = rng.uniform(0, 1.9, 100)
        w = rng.uniform(0, 1, 100) * pc.w_star(a) * 0.98
        np.testing.assert_allclose(pn.s_bar(a, w), pc.s_bar(a, w), atol=1e-8)

    @pytest.mark.parametrize("spec", [example(6), example(7), example4(c=1.4, gamma=0.5, mu_bar=0.3)], ids=["ex6", "ex7", "ex4"])
    def test_transport_residual(self, spec):
        # d_a s - d_w(g s) + mu s = 0 away from the separating characteristic
        prof, g, h = dfe(spec), spec.waning, 1e-4
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(60):
            a = rng.uniform(0.05, 1.8)
            top = float(prof.w_star(a)) - 0.05
            if top <= 0.05:
                continue
            w = rng.uniform(0.05, top)
            s = prof.s_bar
            da = (s(a + h, w) - s(a - h, w)) / (2 * h)
            dw = (g(w + h) * s(a, w + h) - g(w - h) * s(a, w - h)) / (2 * h)
            worst = max(worst, abs(da - dw + float(spec.mortality(a)) * s(a, w)))
        assert worst <= 1e-4


class TestSurvival:
    def test_diagonal(self):
        assert survival_T(example(7), 0.7, 0.7) == 1.0

    def test_constant_mortality(self):
        spec = example4(mu_bar=0.4, gamma=1.3)
        assert survival_T(spec, 0.2, 1.1) == pytest.approx(math.exp(-1.7 * 0.9), rel=1e-14)

    @pytest.mark.parametrize("xi,a", [(0.0, 1.0), (0.5, 1.9), (1.2, 1.99)])
    def test_example7_against_quadrature(self, xi, a):
        spec = example(7)
        integral = integrate.quad(lambda s: 1 / (2 - s) ** 2, xi, a, epsabs=1e-13)[0]
        want = math.exp(-integral - (a - xi))
        assert survival_T(spec, xi, a) == pytest.approx(want, rel=1e-10)
        # sign of the antiderivative: -int mu = 1/(amax-xi) - 1/(amax-a)
        assert survival_T(spec, xi, a) == pytest.approx(
            math.exp(1 / (2 - xi) - 1 / (2 - a) - (a - xi)), rel=1e-12
        )

    def test_zero_at_singular_end(self):
        assert survival_T(example(7), 1.0, 2.0) == 0.0

    def test_rejects_reversed(self):
        with pytest.raises(ValueError):
            survival_T(example(6), 1.0, 0.5)


class TestOracle:
    def test_example6_closed_form(self):
        val = oracle_r0(example(6), dfe(example(6)))
        closed = (1 - 2 * math.exp(-4) + math.exp(-8)) / 40
        assert abs(val - closed) <= 1e-9
        assert abs(val - R0_EX6_PUBLISHED) <= 1e-9
        assert R0_EX6 == pytest.approx(closed, rel=1e-15)

    def test_example7_published(self):
        val = oracle_r0(example(7), dfe(example(7)))
        assert abs(val - 0.111258187908847) <= 1e-6
        # independent high-precision value of the same integral
        assert abs(val - 0.111258324726859) <= 1e-9

    def test_zero_transmission(self):
        spec = example(6)
        spec0 = AgeImmunitySpec(
            spec.a_max, spec.gamma, spec.waning, spec.mortality, nu=lambda w: 0 * np.asarray(w, float)
        )
        assert oracle_r0(spec0, dfe(spec0)) == 0.0


class TestModelSpecAdapter:
    def test_example6_kernel(self):
        spec, _ = builtin("ageimm-ex6")
        for a, w, xi, om in [(0.3, 0.2, 1.1, 0.6), (1.5, 0.9, 0.0, 0.1)]:
            want = (1 - w) ** 3 * (1 - om) * math.exp(-4 * a)
            assert float(spec.kernel_K(a, w, xi, om)) == pytest.approx(want, rel=1e-13)

    def test_structure(self):
        spec = to_model_spec(example(7), dfe(example(7)))
        assert spec.bounds == (0.0, 2.0, 0.0, 1.0)
        assert bool(spec.singular_dirichlet_nodes(2.0, 0.5))
        assert not bool(spec.singular_dirichlet_nodes(1.999, 0.5))
        assert float(spec.coeff_mu(1.0, 0.3)) == pytest.approx(2.0)

    def test_example6_pipeline(self):
        spec, ref = builtin("ageimm-ex6")
        res = dominant_pair(build_pencil(spec, 20, 20))
        assert abs(res.r0 - R0_EX6_PUBLISHED) <= 1e-10
        _, err = match_exact(res.eigvec, ref.eigenfunction_exact)
        assert err <= 1e-9

    def test_oracle_matches_collocation(self):
        s6, s7 = example(6), example(7)
        o6, o7 = oracle_r0(s6, dfe(s6)), oracle_r0(s7, dfe(s7))
        r6 = dominant_pair(build_pencil(builtin("ageimm-ex6")[0], 20, 20)).r0
        r7 = dominant_pair(build_pencil(builtin("ageimm-ex7")[0], 60, 60)).r0
        assert abs(r6 - o6) <= 1e-8
        assert abs(r7 - o7) <= 1e-4


def test_invalid_parameters():
    with pytest.raises(ValueError):
        example4(a_max=-1.0)
    with pytest.raises(ValueError):
        AgeImmunitySpec(2.0, 1.0, constant_waning(-0.1), ConstantMortality(1.0))
