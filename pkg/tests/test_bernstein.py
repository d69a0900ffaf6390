"""Bernstein-function families: values, derivatives, shifts, inverses,
hypothesis probing, and the structural inequalities every member satisfies."""

import json
import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

import levymoments.bernstein as bf
from levymoments import BernsteinSpec, DomainError, RangeError
from levymoments.bernstein import (
    analytic_bound,
    check_hypotheses,
    deriv,
    eval_phi,
    inverse,
    levy_density,
    shift,
    spec_from_json,
    spec_to_json,
)

FAMILY_KEYS = ["log1p", "power", "shifted_power", "loglog", "truncated_gamma", "linear"]


def a_quadrature(x):
    """Independent oracle for A(x) = int_0^x e^{-y-1}/(y+1) dy."""
    val, _ = scipy.integrate.quad(lambda y: math.exp(-y - 1.0) / (y + 1.0), 0.0, x, epsabs=1e-13, epsrel=1e-13)
    return val


class TestValues:
    def test_log1p_at_one(self):
        assert eval_phi(BernsteinSpec.log1p(), 1.0) == pytest.approx(math.log(2.0), abs=1e-15)

    def test_power_half_at_four(self):
        assert eval_phi(BernsteinSpec.power(0.5), 4.0) == pytest.approx(2.0, abs=1e-15)

    def test_truncated_gamma_matches_quadrature(self):
        spec = BernsteinSpec.truncated_gamma()
        for x in (0.3, 0.5, 1.0, 2.5, 7.0, 30.0):
            expected = math.log(x + 1.0) - a_quadrature(x)
            assert eval_phi(spec, x) == pytest.approx(expected, rel=1e-11)

    def test_truncated_gamma_frozen_values(self):
        # A(1) and A(0.5) frozen from the quadrature oracle
        assert a_quadrature(1.0) == pytest.approx(0.17048342368745915, rel=1e-12)
        spec = BernsteinSpec.truncated_gamma()
        assert eval_phi(spec, 1.0) == pytest.approx(math.log(2.0) - 0.17048342368745915, rel=1e-12)
        assert eval_phi(spec, 0.5) == pytest.approx(math.log(1.5) - 0.11936435198888762, rel=1e-12)

    def test_truncated_gamma_negative_axis(self):
        # phi_1 is entire; phi_1(-1) = -Ein(1)
        spec = BernsteinSpec.truncated_gamma()
        assert eval_phi(spec, -1.0) == pytest.approx(-0.7965995992970531, rel=1e-12)
        assert eval_phi(spec, -4.0) < eval_phi(spec, -1.0)

    def test_killing_shifts_value_at_zero(self, catalog):
        for name in FAMILY_KEYS:
            base = catalog[name]
            killed = BernsteinSpec(base.family, alpha=base.alpha, d=base.d or (1.0 if name == "linear" else 0.0), q=0.25)
            assert eval_phi(killed, 0.0) == pytest.approx(0.25, abs=1e-15)
            assert bf.phi_at_zero(killed) == 0.25

    def test_complex_matches_real_on_axis(self, catalog):
        for spec in catalog.values():
            zr = eval_phi(spec, 2.5)
            zc = eval_phi(spec, complex(2.5, 0.0))
            assert zc == pytest.approx(zr, rel=1e-14)
            assert isinstance(zr, float) and isinstance(zc, complex)


class TestDerivatives:
    def test_log1p_first(self):
        assert deriv(BernsteinSpec.log1p(), 1.0, 1) == pytest.approx(0.5, abs=1e-15)

    def test_loglog_first_at_zero(self):
        assert deriv(BernsteinSpec.loglog(), 0.0, 1) == pytest.approx(1.0 / math.e, abs=1e-15)

    def test_linear_second(self):
        assert deriv(BernsteinSpec.linear(1.0), 7.0, 2) == 0.0

    @pytest.mark.parametrize("name", FAMILY_KEYS)
    def test_finite_differences(self, name, catalog, rng):
        spec = catalog[name]
        for x in rng.uniform(0.5, 20.0, size=5):
            h = 1e-5 * max(1.0, x)
            fd1 = (eval_phi(spec, x + h) - eval_phi(spec, x - h)) / (2 * h)
            assert deriv(spec, x, 1) == pytest.approx(fd1, rel=2e-8)
            fd2 = (deriv(spec, x + h, 1) - deriv(spec, x - h, 1)) / (2 * h)
            assert deriv(spec, x, 2) == pytest.approx(fd2, rel=5e-6, abs=1e-12)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            deriv(BernsteinSpec.log1p(), 1.0, 3)


class TestStructuralInequalities:
    """phi > phi(0) >= 0, phi' > 0 >= phi'', x phi'(x) <= phi(x),
    2 phi(x/2) >= phi(x), all on 50 random points per family."""

    @pytest.mark.parametrize("name", FAMILY_KEYS)
    def test_pointwise(self, name, catalog, rng):
        spec = catalog[name]
        xs = rng.uniform(1e-3, 1e3, size=50)
        p = np.asarray(eval_phi(spec, xs))
        d1 = np.asarray(deriv(spec, xs, 1))
        d2 = np.asarray(deriv(spec, xs, 2))
        p0 = bf.phi_at_zero(spec)
        assert np.all(p > p0) and p0 >= 0
        assert np.all(d1 > 0)
        assert np.all(d2 <= 1e-300)
        assert np.all(xs * d1 <= p * (1 + 1e-12))
        assert np.all(2 * np.asarray(eval_phi(spec, xs / 2)) >= p * (1 - 1e-12))

    @pytest.mark.parametrize("name", FAMILY_KEYS)
    def test_mean_value_bounds(self, name, catalog, rng):
        # (x-y) phi'(x) <= phi(x) - phi(y) <= (x-y) phi'(y) for x > y > 0
        spec = catalog[name]
        for _ in range(50):
            y, x = np.sort(rng.uniform(1e-2, 100.0, size=2))
            if x == y:
                continue
            gap = eval_phi(spec, x) - eval_phi(spec, y)
            assert (x - y) * deriv(spec, x, 1) <= gap * (1 + 1e-10) + 1e-15
            assert gap <= (x - y) * deriv(spec, y, 1) * (1 + 1e-10) + 1e-15

    @given(x=st.floats(1e-3, 1e3), b=st.floats(-50.0, 50.0))
    @settings(max_examples=60, deadline=None)
    def test_complex_derivative_bound(self, x, b):
        # |phi'(x + ib)| <= phi'(x)
        for spec in (BernsteinSpec.log1p(), BernsteinSpec.truncated_gamma(), BernsteinSpec.power(0.3)):
            assert abs(deriv(spec, complex(x, b), 1)) <= deriv(spec, x, 1) * (1 + 1e-10)


class TestShift:
    def test_log1p_closed_form(self):
        shifted = shift(BernsteinSpec.log1p(), 1)
        assert eval_phi(shifted, 1.0) == pytest.approx(math.log(1.5), abs=1e-15)

    def test_linear_invariant(self):
        shifted = shift(BernsteinSpec.linear(1.0), 5)
        assert eval_phi(shifted, 2.0) == pytest.approx(2.0, abs=1e-15)
        assert shifted == BernsteinSpec.linear(1.0)

    def test_power_at_zero(self):
        assert eval_phi(shift(BernsteinSpec.power(0.5), 4), 0.0) == 0.0

    @pytest.mark.parametrize("name", FAMILY_KEYS)
    def test_consistency(self, name, catalog, rng):
        spec = catalog[name]
        for _ in range(10):
            k = int(rng.integers(1, 12))
            x = float(rng.uniform(0.1, 30.0))
            lhs = eval_phi(shift(spec, k), x)
            rhs = eval_phi(spec, x + k) - eval_phi(spec, float(k))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    def test_killing_cancels(self):
        killed = BernsteinSpec.log1p(q=0.7)
        assert eval_phi(shift(killed, 3), 0.0) == 0.0
        assert deriv(shift(killed, 3), 0.0, 1) == pytest.approx(deriv(killed, 3.0, 1), rel=1e-14)

    def test_requires_positive_integer(self):
        with pytest.raises(ValueError):
            shift(BernsteinSpec.log1p(), 0)


class TestInverse:
    def test_log1p(self):
        assert inverse(BernsteinSpec.log1p(), math.log(2.0)) == pytest.approx(1.0, abs=1e-11)

    def test_power(self):
        assert inverse(BernsteinSpec.power(0.5), 3.0) == pytest.approx(9.0, rel=1e-11)

    def test_loglog_round_trip(self):
        spec = BernsteinSpec.loglog()
        assert inverse(spec, eval_phi(spec, 10.0)) == pytest.approx(10.0, rel=1e-10)

    @pytest.mark.parametrize("name", FAMILY_KEYS)
    def test_round_trip_random(self, name, catalog, rng):
        spec = catalog[name]
        for x in rng.uniform(0.01, 500.0, size=10):
            assert abs(inverse(spec, eval_phi(spec, float(x))) - x) <= 1e-9 * max(1.0, x)

    def test_out_of_range(self):
        with pytest.raises(RangeError):
            inverse(BernsteinSpec.log1p(q=0.5), 0.2)


class TestAnalyticDomain:
    def test_bounds(self, catalog):
        assert analytic_bound(catalog["log1p"]) == -1.0
        assert analytic_bound(catalog["power"]) == 0.0
        assert analytic_bound(catalog["shifted_power"]) == -1.0
        assert analytic_bound(catalog["loglog"]) == pytest.approx(1.0 - math.e)
        assert analytic_bound(catalog["truncated_gamma"]) == -math.inf
        assert analytic_bound(catalog["linear"]) == -math.inf

    def test_shifted_bound_moves_left(self):
        assert analytic_bound(shift(BernsteinSpec.log1p(), 3)) == -4.0

    def test_domain_errors_on_real_cut(self):
        with pytest.raises(DomainError):
            eval_phi(BernsteinSpec.log1p(), -1.5)
        with pytest.raises(DomainError):
            eval_phi(BernsteinSpec.power(0.5), -0.1)
        with pytest.raises(DomainError):
            eval_phi(BernsteinSpec.loglog(), 1.0 - math.e)

    def test_complex_off_cut_allowed(self):
        v = eval_phi(BernsteinSpec.log1p(), complex(-1.5, 0.5))
        assert np.isfinite(v.real) and np.isfinite(v.imag)


class TestCheckHypotheses:
    def test_log1p_ratio_limit(self):
        # brute-force oracle: phi'(x)/phi'(2x) = (2x+1)/(x+1) -> 2
        rep = check_hypotheses(BernsteinSpec.log1p(), x_max=1e6, n_probes=64)
        assert rep.all_pass
        xs = np.geomspace(1.0, 1e6, 64)
        oracle = np.max((2 * xs + 1) / (xs + 1))
        assert rep.max_derivative_ratio == pytest.approx(float(oracle), rel=1e-9)
        assert rep.max_derivative_ratio < 2.0 + 1e-9

    def test_linear_ratio_one(self):
        rep = check_hypotheses(BernsteinSpec.linear(1.0), x_max=1e6, n_probes=64)
        assert rep.all_pass and rep.max_derivative_ratio == pytest.approx(1.0)

    def test_loglog_passes(self):
        assert check_hypotheses(BernsteinSpec.loglog(), x_max=1e6, n_probes=64).all_pass

    def test_constant_all_fail(self):
        rep = check_hypotheses(BernsteinSpec.linear(0.0, q=1.0), x_max=1e6, n_probes=64)
        assert not (rep.ratio_bounded or rep.quadratic_growth or rep.unbounded)

    def test_probe_validation(self):
        with pytest.raises(ValueError):
            check_hypotheses(BernsteinSpec.log1p(), x_max=0.5)


class TestCustomDensity:
    def test_gamma_density_matches_log1p(self):
        custom = BernsteinSpec.from_custom(density=lambda y: np.exp(-y) / y, analytic_bound=-1.0)
        base = BernsteinSpec.log1p()
        for x in (0.5, 1.0, 3.0):
            assert eval_phi(custom, x) == pytest.approx(eval_phi(base, x), rel=1e-9)
            assert deriv(custom, x, 1) == pytest.approx(deriv(base, x, 1), rel=1e-9)
            assert deriv(custom, x, 2) == pytest.approx(deriv(base, x, 2), rel=1e-8)

    def test_complex_evaluation(self):
        custom = BernsteinSpec.from_custom(density=lambda y: np.exp(-y) / y, analytic_bound=-1.0)
        z = complex(1.2, 0.8)
        assert eval_phi(custom, z) == pytest.approx(complex(np.log(1 + z)), rel=1e-9)

    def test_tabulated_loglog_linear(self):
        # remaining error is the interpolant's, O((dlog y)^2): 5e-6 at 1200 knots
        ys = np.geomspace(1e-4, 50.0, 1200)
        table = [(float(y), float(np.exp(-y) / y)) for y in ys]
        custom = BernsteinSpec.from_custom(table=table, analytic_bound=-1.0)
        assert eval_phi(custom, 1.0) == pytest.approx(math.log(2.0), rel=2e-5)

    def test_domain_guard(self):
        custom = BernsteinSpec.from_custom(density=lambda y: np.exp(-y) / y)
        with pytest.raises(DomainError):
            eval_phi(custom, -0.5)

    def test_levy_density_catalog(self):
        assert levy_density(BernsteinSpec.log1p(), 2.0) == pytest.approx(math.exp(-2.0) / 2.0)
        assert levy_density(BernsteinSpec.truncated_gamma(), 2.0) == 0.0
        assert levy_density(BernsteinSpec.loglog(), 1.0) is None


class TestJsonSchema:
    def test_round_trip_catalog(self, catalog):
        for name in ("log1p", "power", "linear"):
            spec = catalog[name]
            doc = json.loads(spec_to_json(spec))
            assert doc["family"] == spec.family
            assert spec_from_json(spec_to_json(spec)) == spec

    def test_custom_round_trip(self):
        spec = BernsteinSpec.from_custom(table=[(0.1, 1.0), (1.0, 0.1), (10.0, 0.001)], d=0.5, q=0.1)
        again = spec_from_json(spec_to_json(spec))
        assert again.custom.table == spec.custom.table
        assert again.d == 0.5 and again.q == 0.1

    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError):
            spec_from_json('{"family": "cauchy"}')


class TestExtendedPrecision:
    def test_matches_float64(self):
        spec = BernsteinSpec.truncated_gamma()
        hi = float(bf.eval_phi_mp(spec, 2.0, dps=40))
        assert eval_phi(spec, 2.0) == pytest.approx(hi, rel=1e-13)
