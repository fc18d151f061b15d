"""Ground-truth special functions, checked against mpmath oracles."""

import math

import mpmath
import numpy as np
import pytest

from renewlm import specfun
from renewlm.specfun import (
    ModelConstants,
    beta_fn,
    hurwitz_zeta,
    inverse_stable_moment,
    log_gamma,
    memory_param_y,
    nvm_constant,
    tilde_c_d,
    zeta,
)

mpmath.mp.dps = 30


class TestLogGamma:
    def test_exact_anchor_points(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-13)
        assert log_gamma(6.0) == pytest.approx(math.log(120.0), rel=1e-13)

    def test_against_mpmath_across_range(self):
        xs = np.concatenate([
            np.logspace(-3, 3, 400),
            np.linspace(0.05, 3.0, 211),
        ])
        ours = log_gamma(xs)
        exact = np.array([float(mpmath.loggamma(x)) for x in xs])
        rel = np.abs(ours - exact) / np.maximum(np.abs(exact), 1e-2)
        assert rel.max() < 1e-12

    def test_array_and_scalar_shapes(self):
        assert np.shape(log_gamma(np.array([1.0, 2.0]))) == (2,)
        assert isinstance(log_gamma(2.5), float)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(np.array([1.0, -2.0]))


class TestZeta:
    def test_classical_values(self):
        assert zeta(2.0) == pytest.approx(math.pi ** 2 / 6.0, rel=1e-12)
        assert zeta(4.0) == pytest.approx(math.pi ** 4 / 90.0, rel=1e-12)

    def test_value_with_independent_oracle(self):
        # independent Euler-Maclaurin setup: direct sum to 10^6 plus the
        # integral/midpoint tail, carried out with mpmath arithmetic
        n = 1_000_000
        s = mpmath.mpf("1.5")
        direct = mpmath.nsum(lambda k: k ** -s, [1, n])
        tail = n ** (1 - s) / (s - 1) - mpmath.mpf(0.5) * n ** -s
        oracle = float(direct + tail)
        assert zeta(1.5) == pytest.approx(oracle, rel=1e-9)
        assert zeta(1.5) == pytest.approx(2.6123753486854883, rel=1e-10)

    @pytest.mark.parametrize("s", [1.0001, 1.01, 1.3, 2.5, 7.0, 19.0])
    @pytest.mark.parametrize("a", [1.0, 1.5, 23.0, 3.75e5])
    def test_hurwitz_matches_mpmath(self, s, a):
        assert hurwitz_zeta(s, a) == pytest.approx(
            float(mpmath.zeta(s, a)), rel=1e-12
        )

    def test_domain_errors(self):
        for bad in (1.0, 0.3, -2.0):
            with pytest.raises(ValueError):
                zeta(bad)
        with pytest.raises(ValueError):
            hurwitz_zeta(2.0, 0.0)


class TestBeta:
    def test_known_value(self):
        # beta(0.25, 0.5) via the log-gamma oracle
        exact = float(mpmath.beta(mpmath.mpf("0.25"), mpmath.mpf("0.5")))
        assert beta_fn(0.25, 0.5) == pytest.approx(exact, rel=1e-12)

    def test_gamma_identity_on_random_grid(self):
        rng = np.random.default_rng(99)
        ab = rng.uniform(1e-3, 5.0, size=(100, 2))
        for a, b in ab:
            direct = beta_fn(a, b)
            via_gamma = float(mpmath.gamma(a) * mpmath.gamma(b) / mpmath.gamma(a + b))
            assert direct == pytest.approx(via_gamma, rel=1e-10)


class TestInverseStableMoment:
    def test_a_equal_alpha_closed_form(self):
        for alpha in (0.3, 0.5, 0.8):
            expect = 1.0 / math.exp(log_gamma(alpha + 1.0))
            assert inverse_stable_moment(alpha, alpha) == pytest.approx(expect, rel=1e-12)

    def test_spec_values(self):
        assert inverse_stable_moment(0.5, 0.5) == pytest.approx(
            2.0 / math.sqrt(math.pi), rel=1e-12
        )
        expect = float(mpmath.gamma(mpmath.mpf(3) / 7)
                       / (mpmath.mpf("0.7") * mpmath.gamma(mpmath.mpf("0.3"))))
        assert inverse_stable_moment(0.3, 0.7) == pytest.approx(expect, rel=1e-12)

    def test_increasing_in_a_beyond_alpha(self):
        for alpha in (0.4, 0.7, 0.9):
            grid = np.linspace(alpha, 6.0, 60)
            vals = [inverse_stable_moment(a, alpha) for a in grid]
            assert np.all(np.diff(vals) > 0.0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            inverse_stable_moment(0.5, 1.0)
        with pytest.raises(ValueError):
            inverse_stable_moment(-1.0, 0.5)


class TestModelConstants:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            ModelConstants(d=0.5, alpha=0.5)
        with pytest.raises(ValueError):
            ModelConstants(d=0.3, alpha=1.5)
        with pytest.raises(ValueError):
            ModelConstants(d=0.3, alpha=0.5, sigma_eps2=0.0)
        c = ModelConstants(d=0.2, alpha=0.9)
        assert 0.0 < c.r < 1.0

    def test_tilde_c_d_scalings(self):
        base = tilde_c_d(ModelConstants(d=0.25, alpha=0.5))
        assert base == pytest.approx(beta_fn(0.25, 0.5), rel=1e-12)
        doubled = tilde_c_d(ModelConstants(d=0.25, alpha=0.5, sigma_eps2=2.0))
        assert doubled == pytest.approx(2.0 * base, rel=1e-13)
        scaled = tilde_c_d(ModelConstants(d=0.25, alpha=0.5, c_d=3.0))
        assert scaled == pytest.approx(9.0 * base, rel=1e-13)


class TestNvmConstant:
    def test_alpha_one_closed_form(self):
        # the Gamma factors cancel at alpha = 1: C = d (2d + 1)
        assert nvm_constant(1.0, 0.25) == pytest.approx(0.375, rel=1e-13)
        assert nvm_constant(1.0, 0.4) == pytest.approx(0.4 * 1.8, rel=1e-13)

    def test_gamma_oracle_value(self):
        # (alpha+2d-1)(2alpha+2d-1) Gamma(1-2d) / (2 alpha Gamma((1-2d)/alpha))
        # at alpha=0.5, d=0.35: 0.2 * 0.7 * Gamma(0.3) / (1 * Gamma(0.6))
        expect = float(
            mpmath.mpf("0.2") * mpmath.mpf("0.7")
            * mpmath.gamma(mpmath.mpf("0.3")) / mpmath.gamma(mpmath.mpf("0.6"))
        )
        assert nvm_constant(0.5, 0.35) == pytest.approx(expect, rel=1e-12)

    def test_vanishes_at_left_boundary(self):
        d = 0.3
        vals = [nvm_constant(1.0 - 2.0 * d + eps, d) for eps in (1e-2, 1e-4, 1e-6)]
        assert vals[0] > vals[1] > vals[2] > 0.0
        assert vals[2] < 1e-5

    def test_domain_error_below_boundary(self):
        with pytest.raises(ValueError):
            nvm_constant(0.3, 0.35)  # alpha = 1-2d exactly degenerates
        with pytest.raises(ValueError):
            nvm_constant(1.1, 0.35)

    def test_reciprocal_of_expected_integral(self):
        # C * [2 E(L^{2d-1}) / ((1+(2d-1)/alpha)(2+(2d-1)/alpha))] = 1
        for alpha, d in [(0.5, 0.35), (0.7, 0.3), (0.9, 0.45), (0.45, 0.3)]:
            r = 1.0 - 2.0 * d
            expected_integral = (
                2.0 * inverse_stable_moment(r, alpha)
                / ((1.0 - r / alpha) * (2.0 - r / alpha))
            )
            assert nvm_constant(alpha, d) * expected_integral == pytest.approx(
                1.0, rel=1e-12
            )


class TestMemoryParam:
    def test_spec_values(self):
        assert memory_param_y(1.0, 0.3) == pytest.approx(0.3, abs=1e-15)
        assert memory_param_y(0.5, 0.35) == pytest.approx(0.2, abs=1e-15)
        assert memory_param_y(0.4, 0.25) == pytest.approx(-0.125, abs=1e-15)

    def test_negative_signals_memory_loss(self):
        assert memory_param_y(0.3, 0.1) < 0.0
