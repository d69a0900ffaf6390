"""Complex Gamma, gamma_phi and the Bernstein-Gamma product machinery."""

import cmath
import math

import numpy as np
import pytest
import scipy.special as sp

from levymoments import BernsteinSpec, DomainError, PoleError
from levymoments.bgamma import (
    complex_gamma,
    complex_loggamma,
    eval_W,
    eval_logW,
    gamma_phi,
    get_cache,
    mellin_infinity,
)

EULER = float(np.euler_gamma)
FAMILY_KEYS = ["log1p", "power", "shifted_power", "loglog", "truncated_gamma", "linear"]

# frozen from the high-precision corrected-partial-sum oracle
GAMMA_PHI_LOG1P = 0.7946786454528994
GAMMA_PHI_LOGLOG = 1.7464861134227228


class TestComplexGamma:
    def test_half(self):
        assert complex_gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_factorial(self):
        assert complex_gamma(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_reflection_product(self):
        v = complex_gamma(0.3) * complex_gamma(0.7)
        assert v == pytest.approx(math.pi / math.sin(0.3 * math.pi), rel=1e-13)

    def test_against_scipy_grid(self, rng):
        # |z| <= 50 accuracy contract, scipy as the independent oracle
        for _ in range(300):
            z = complex(rng.uniform(-49, 49), rng.uniform(-49, 49))
            if abs(z) > 50 or (z.imag == 0 and z.real <= 0):
                continue
            ref = complex(sp.gamma(z))
            if not (np.isfinite(ref.real) and np.isfinite(ref.imag)):
                continue
            assert complex_gamma(z) == pytest.approx(ref, rel=1e-13)

    def test_loggamma_against_scipy(self, rng):
        for _ in range(100):
            z = complex(rng.uniform(0.5, 40), rng.uniform(-30, 30))
            assert cmath.exp(complex_loggamma(z)) == pytest.approx(complex(sp.gamma(z)), rel=1e-12)

    def test_poles(self):
        for bad in (0.0, -1.0, -7.0):
            with pytest.raises(PoleError):
                complex_gamma(bad)


class TestGammaPhi:
    def test_linear_is_euler_mascheroni(self):
        assert gamma_phi(BernsteinSpec.linear(1.0)) == pytest.approx(EULER, abs=1e-12)

    def test_log1p_golden(self):
        assert gamma_phi(BernsteinSpec.log1p()) == pytest.approx(GAMMA_PHI_LOG1P, abs=1e-11)

    def test_loglog_golden(self):
        assert gamma_phi(BernsteinSpec.loglog()) == pytest.approx(GAMMA_PHI_LOGLOG, abs=1e-11)

    def test_power_alpha_scaling(self):
        # sum alpha k^{a-1}/k^a - ln k^a telescopes to alpha * (euler sum)
        for alpha in (0.3, 0.5, 0.8):
            assert gamma_phi(BernsteinSpec.power(alpha)) == pytest.approx(alpha * EULER, abs=1e-11)

    def test_constant_rejected(self):
        with pytest.raises(DomainError):
            gamma_phi(BernsteinSpec.linear(0.0, q=2.0))

    def test_cache_carries_terms(self):
        cache = get_cache(BernsteinSpec.log1p())
        assert cache.k0 >= 64
        assert np.all(np.diff(cache.phi_k) > 0)
        assert math.isfinite(cache.gamma_phi)


class TestEvalW:
    def test_linear_is_gamma_at_simple_points(self):
        spec = BernsteinSpec.linear(1.0)
        assert eval_W(spec, 1.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)

    def test_gamma_identity_random(self, rng):
        # phi(x) = x turns the product into Gamma itself
        spec = BernsteinSpec.linear(1.0)
        for _ in range(100):
            z = complex(rng.uniform(0.05, 18.0), rng.uniform(-8.0, 8.0))
            assert eval_W(spec, z) == pytest.approx(complex(sp.gamma(z)), rel=1e-10)

    def test_w_at_one_is_one(self, catalog):
        for name in FAMILY_KEYS:
            if name == "linear":
                continue
            assert eval_W(catalog[name], 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_log1p_w3(self):
        assert eval_W(BernsteinSpec.log1p(), 3.0) == pytest.approx(math.log(2) * math.log(3), rel=1e-12)

    @pytest.mark.parametrize("name", FAMILY_KEYS)
    def test_recurrence_residual(self, name, catalog, rng):
        spec = catalog[name]
        from levymoments.bernstein import eval_phi

        for _ in range(25):
            z = complex(rng.uniform(0.05, 6.0), rng.uniform(-6.0, 6.0))
            w1 = eval_W(spec, z)
            w2 = eval_W(spec, z + 1.0)
            assert abs(w2 - eval_phi(spec, z) * w1) <= 1e-10 * abs(w2)

    @pytest.mark.parametrize("name", FAMILY_KEYS)
    def test_positive_integer_products(self, name, catalog):
        from levymoments.bernstein import eval_phi

        spec = catalog[name]
        for n in range(2, 13):
            prod = float(np.prod([eval_phi(spec, float(k)) for k in range(1, n)]))
            assert eval_W(spec, float(n)) == pytest.approx(prod, rel=1e-12)

    def test_conjugate_symmetry(self, catalog):
        for spec in catalog.values():
            z = complex(0.8, 1.7)
            assert eval_W(spec, z.conjugate()) == pytest.approx(eval_W(spec, z).conjugate(), rel=1e-13)

    def test_positivity_on_real_axis(self, catalog, rng):
        for spec in catalog.values():
            for x in rng.uniform(0.05, 12.0, size=10):
                assert eval_W(spec, float(x)).real > 0

    def test_power_is_gamma_to_alpha(self, rng):
        # the product for phi(x) = x^alpha collapses to Gamma(z)^alpha
        spec = BernsteinSpec.power(0.5)
        for _ in range(20):
            z = complex(rng.uniform(0.2, 6.0), rng.uniform(-3.0, 3.0))
            expected = cmath.exp(0.5 * complex(sp.loggamma(z)))
            assert eval_W(spec, z) == pytest.approx(expected, rel=1e-11)

    def test_multiplicative_scaling_law(self):
        # W_{c phi}(z) = c^{z-1} W_phi(z)
        from levymoments.bernstein import BernsteinSpec as BS

        c = 3.7
        base = BS.log1p()
        scaled = BS.from_custom(density=lambda y: c * np.exp(-y) / y, analytic_bound=-1.0)
        z = complex(0.42, 1.1)
        lhs = eval_W(scaled, z, tol=1e-10)
        rhs = c ** (z - 1.0) * eval_W(base, z)
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_left_extension_via_recurrence(self):
        # W(z) = W(z+1)/phi(z) below the base strip
        spec = BernsteinSpec.log1p()
        from levymoments.bernstein import eval_phi

        z = -0.4
        assert eval_W(spec, z) == pytest.approx(eval_W(spec, z + 1) / eval_phi(spec, z), rel=1e-11)

    def test_pole_at_zero_unkilled(self):
        with pytest.raises(PoleError):
            eval_W(BernsteinSpec.log1p(), 0.0)

    def test_killed_has_no_pole_at_zero(self):
        spec = BernsteinSpec.log1p(q=0.5)
        assert eval_W(spec, 0.0) == pytest.approx(1.0 / 0.5, rel=1e-11)

    def test_domain_error_left_of_strip(self):
        with pytest.raises(DomainError):
            eval_W(BernsteinSpec.log1p(), -1.2)

    def test_constant_rejected(self):
        with pytest.raises(DomainError):
            eval_logW(BernsteinSpec.linear(0.0, q=1.0), 1.0)


class TestMellinInfinity:
    def test_linear_z2(self):
        assert mellin_infinity(BernsteinSpec.linear(1.0), 2.0) == pytest.approx(1.0, rel=1e-12)

    def test_log1p_z1(self):
        assert mellin_infinity(BernsteinSpec.log1p(), 1.0) == pytest.approx(1.0 / math.log(2.0), rel=1e-12)

    def test_log1p_z0(self):
        assert mellin_infinity(BernsteinSpec.log1p(), 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_strip_guard(self):
        with pytest.raises(DomainError):
            mellin_infinity(BernsteinSpec.log1p(), -2.5)
        with pytest.raises(DomainError):
            mellin_infinity(BernsteinSpec.log1p(q=1.0), -1.5)

    def test_negative_strip_linear(self):
        # for the drift-only spec the ratio is identically 1 on Re z > -1
        # and extends across the strip by the recurrence
        assert mellin_infinity(BernsteinSpec.linear(1.0), -0.5) == pytest.approx(1.0, rel=1e-11)
        assert mellin_infinity(BernsteinSpec.linear(1.0), -1.5) == pytest.approx(1.0, rel=1e-10)
