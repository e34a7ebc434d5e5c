import math

import numpy as np
import pytest

from hypflats import (
    Curvature,
    DomainError,
    QuadratureError,
    Tolerance,
    integrate_adaptive,
    integrate_iterated_2d,
    log_kernel,
)

TOL = Tolerance()


class TestTolerance:
    def test_defaults(self):
        assert TOL.rel_tol == 1e-9
        assert TOL.abs_tol == 1e-12
        assert TOL.max_subdivisions == 2000

    def test_target(self):
        assert TOL.target(2.0) == pytest.approx(2e-9)
        assert TOL.target(0.0) == 1e-12

    def test_validation(self):
        with pytest.raises(DomainError):
            Tolerance(rel_tol=0.0)
        with pytest.raises(DomainError):
            Tolerance(max_subdivisions=0)


class TestIntegrateAdaptive:
    def test_polynomial_exact(self):
        res = integrate_adaptive(lambda x: x**3, 0.0, 2.0, TOL)
        assert res.converged
        assert res.value == pytest.approx(4.0, rel=1e-13)

    def test_sine(self):
        res = integrate_adaptive(np.sin, 0.0, math.pi, TOL)
        assert res.value == pytest.approx(2.0, rel=1e-12)

    def test_oscillatory(self):
        res = integrate_adaptive(lambda x: np.sin(50 * x), 0.0, math.pi, TOL)
        exact = (1 - math.cos(50 * math.pi)) / 50
        assert res.value == pytest.approx(exact, rel=1e-9, abs=1e-12)

    def test_endpoint_singularity(self):
        # (1 - z^2)^(-1/2): integrable singularity at z = 1
        res = integrate_adaptive(
            lambda z: 1.0 / np.sqrt(1 - z * z), 0.0, 1.0, TOL
        )
        assert res.value == pytest.approx(math.pi / 2, rel=1e-9)

    def test_log_form_matches_direct(self):
        f = lambda x: np.exp(-(x**2))
        res_d = integrate_adaptive(f, 0.0, 3.0, TOL)
        res_l = integrate_adaptive(lambda x: -(x**2), 0.0, 3.0, TOL, log_form=True)
        assert res_l.value == pytest.approx(res_d.value, rel=1e-10)

    def test_log_form_underflow(self):
        # pointwise values ~ exp(-5000): direct form would be identically 0
        res = integrate_adaptive(
            lambda x: -5000.0 + np.log(np.maximum(x, 1e-300)),
            0.0, 1.0, TOL, log_form=True, log_offset=5000.0,
        )
        assert res.value == pytest.approx(0.5, rel=1e-9)

    def test_log_offset_scales(self):
        res = integrate_adaptive(
            lambda x: np.zeros_like(x), 0.0, 1.0, TOL,
            log_form=True, log_offset=math.log(7.0),
        )
        assert res.value == pytest.approx(7.0, rel=1e-12)

    def test_break_points_kink(self):
        res = integrate_adaptive(np.abs, -1.0, 1.0, TOL, break_points=(0.0,))
        assert res.value == pytest.approx(1.0, rel=1e-13)

    def test_error_estimate_honest(self):
        res = integrate_adaptive(lambda x: np.exp(x) * np.cos(3 * x), 0.0, 2.0, TOL)
        exact = (math.exp(2) * (math.cos(6) + 3 * math.sin(6)) - 1) / 10
        assert abs(res.value - exact) <= max(res.error_estimate, 1e-12)

    def test_budget_exhaustion_carries_partial(self):
        tight = Tolerance(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=8)
        with pytest.raises(QuadratureError) as exc:
            integrate_adaptive(
                lambda x: np.sqrt(np.abs(np.sin(40 * x))), 0.0, 3.0, tight
            )
        assert exc.value.partial is not None
        assert exc.value.partial.converged is False

    def test_invalid_interval(self):
        with pytest.raises(DomainError):
            integrate_adaptive(np.sin, 1.0, 0.0, TOL)

    def test_nonfinite_integrand_raises(self):
        with pytest.raises(QuadratureError):
            integrate_adaptive(lambda x: np.full(x.shape, np.nan), 0.0, 1.0, TOL)


class TestKnownIntegrals:
    def test_polynomials_degree_10_exact(self):
        rng = np.random.default_rng(9)
        coeffs = rng.uniform(-2, 2, 11)
        exact = sum(c / (k + 1) for k, c in enumerate(coeffs))
        res = integrate_adaptive(
            lambda x: sum(c * x**k for k, c in enumerate(coeffs)), 0.0, 1.0, TOL
        )
        assert res.value == pytest.approx(exact, rel=1e-13)

    def test_cosh_sinh_antiderivative(self):
        u = 1.3
        res = integrate_adaptive(lambda s: np.cosh(s) * np.sinh(s), 0.0, u, TOL)
        assert res.value == pytest.approx(math.sinh(u) ** 2 / 2, rel=1e-12)

    def test_splitting_invariance_on_kernel(self):
        # the radial-angular kernel at (d, q, K, u) = (5, 3, -1, 1)
        K = Curvature(-1.0)
        r = 0.5
        f = lambda z: np.exp(log_kernel(5, 3, K, r, np.minimum(z, 0.999999)))
        whole = integrate_adaptive(f, 0.0, 0.9, TOL)
        left = integrate_adaptive(f, 0.0, 0.37, TOL)
        right = integrate_adaptive(f, 0.37, 0.9, TOL)
        combined_err = whole.error_estimate + left.error_estimate + right.error_estimate
        assert abs(whole.value - (left.value + right.value)) <= combined_err + 1e-14

    def test_error_estimate_honesty_on_kernel(self):
        K = Curvature(-1.0)
        tight = Tolerance(rel_tol=1e-10, abs_tol=1e-13)
        for r in (0.2, 0.5, 0.8):
            f = lambda z: np.exp(log_kernel(5, 3, K, r, z))
            res = integrate_adaptive(f, 0.0, 0.95, TOL)
            ref = integrate_adaptive(f, 0.0, 0.95, tight)
            assert abs(res.value - ref.value) <= 10 * res.error_estimate + 1e-14


class TestIterated2D:
    def test_rectangle(self):
        # int_0^1 int_0^1 (r + z) dz dr = 1
        res = integrate_iterated_2d(
            lambda r, z: r + z, 0.0, 1.0, lambda r: 1.0, TOL
        )
        assert res.value == pytest.approx(1.0, rel=1e-10)

    def test_triangle(self):
        # int_0^1 int_0^r 1 dz dr = 1/2
        res = integrate_iterated_2d(
            lambda r, z: np.ones_like(z), 0.0, 1.0, lambda r: r, TOL
        )
        assert res.value == pytest.approx(0.5, rel=1e-10)

    def test_log_form(self):
        # int_0^1 int_0^1 e^(-r-z) dz dr = (1 - 1/e)^2
        res = integrate_iterated_2d(
            lambda r, z: -r - z, 0.0, 1.0, lambda r: 1.0, TOL, log_form=True
        )
        assert res.value == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-10)

    def test_kinked_inner_limit(self):
        # g = 1 with inner limit min(1, 0.5/r): 0.5 + 0.5 log 2
        res = integrate_iterated_2d(
            lambda r, z: np.ones_like(z), 0.0, 1.0,
            lambda r: min(1.0, 0.5 / r) if r > 0 else 1.0, TOL,
            outer_break_points=(0.5,),
        )
        assert res.value == pytest.approx(0.5 + 0.5 * math.log(2), rel=1e-9)

    def test_vanishing_inner_range(self):
        res = integrate_iterated_2d(
            lambda r, z: np.ones_like(z), 0.0, 1.0,
            lambda r: max(0.0, r - 0.5), TOL,
        )
        assert res.value == pytest.approx(0.125, rel=1e-9)


class TestLogKernelOp:
    def test_matches_direct_formula(self):
        K = Curvature(-1.0)
        z = np.array([0.1, 0.5, 0.9])
        d, q, r = 5, 3, 0.7
        expect = (q * np.log(z) + ((d - q) / 2 - 1) * np.log1p(-z * z)
                  - (d + 1) / 2 * np.log1p(K.K * r * r * z * z))
        got = log_kernel(d, q, K, r, z)
        np.testing.assert_allclose(got, expect, rtol=1e-13)

    def test_hand_computed_point(self):
        # (d=3, q=2, K=-1, r=0.5, z=0.5)
        K = Curvature(-1.0)
        expect = math.log(0.25) - 0.5 * math.log(0.75) - 2 * math.log(0.9375)
        assert log_kernel(3, 2, K, 0.5, 0.5) == pytest.approx(expect, rel=1e-13)

    def test_exp_matches_direct_small_d(self):
        K = Curvature(-0.5)
        rng = np.random.default_rng(13)
        for _ in range(50):
            d = int(rng.integers(3, 31))
            q = int(rng.integers(1, d))
            r = float(rng.uniform(0.0, 1.0))
            z = float(rng.uniform(0.01, 0.99))
            direct = (z**q * (1 - z * z) ** ((d - q) / 2 - 1)
                      * (1 + K.K * r * r * z * z) ** (-(d + 1) / 2))
            assert math.exp(log_kernel(d, q, K, r, z)) == pytest.approx(
                direct, rel=1e-12
            )

    def test_zero_maps_to_neg_inf(self):
        K = Curvature(-1.0)
        assert log_kernel(4, 2, K, 0.5, 0.0) == -math.inf

    def test_scalar_round_trip(self):
        K = Curvature(-1.0)
        v = log_kernel(4, 2, K, 0.5, 0.3)
        assert isinstance(v, float)

    def test_domain_checks(self):
        K = Curvature(-1.0)
        with pytest.raises(DomainError):
            log_kernel(4, 2, K, 0.5, 1.0)
        with pytest.raises(DomainError):
            log_kernel(4, 2, K, -0.1, 0.5)
        with pytest.raises(DomainError):
            log_kernel(4, 2, Curvature(-4.0), 0.9, 0.9)  # r z outside ball

    def test_large_dimension_finite(self):
        K = Curvature(-1.0)
        v = log_kernel(5000, 3, K, 0.9, 0.5)
        assert math.isfinite(v)


class TestBackendAgreement:
    def test_backends_match(self):
        import hypflats
        from hypflats import _backend

        if "cython" not in hypflats.available_backends():
            pytest.skip("compiled backend unavailable")
        z = np.linspace(0.0, 0.999, 57)
        theta = np.linspace(0.0, math.pi / 2 - 1e-9, 57)
        for d, q, r in [(3, 2, 0.5), (10, 4, 0.9), (300, 2, 0.01)]:
            ref_z = hypflats._kernels_py.log_kernel(d, q, -1.0, r, z)
            ref_t = hypflats._kernels_py.log_kernel_theta(d, q, -1.0, r, theta)
            cur = _backend.backend_name()
            try:
                _backend.set_backend("cython")
                got_z = _backend.log_kernel(float(d), float(q), -1.0, r, z)
                got_t = _backend.log_kernel_theta(float(d), float(q), -1.0, r, theta)
            finally:
                _backend.set_backend(cur)
            np.testing.assert_allclose(got_z, ref_z, rtol=1e-13, atol=1e-13)
            np.testing.assert_allclose(got_t, ref_t, rtol=1e-13, atol=1e-13)
