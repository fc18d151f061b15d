"""Linear-process generation against its closed-form covariance oracles."""

import math

import numpy as np
import pytest

from renewlm import longmem, specfun
from renewlm.longmem import (
    LinearProcessSpec,
    ResourceLimitError,
    acov_table,
    asymptotic_acov,
    coefficients,
    exact_acov,
    generate,
    truncated_acov_table,
    u_ratio,
)


@pytest.fixture(scope="module")
def spec03():
    return LinearProcessSpec(d=0.3)


class TestCoefficients:
    def test_farima_recursion_by_hand(self):
        # a_i = a_{i-1} (i-1+d)/i at d = 0.3: [1, 0.3, 0.195]
        a = coefficients(LinearProcessSpec(d=0.3), 3)
        assert a == pytest.approx([1.0, 0.3, 0.195], rel=1e-14)

    def test_powerlaw_direct(self):
        spec = LinearProcessSpec(d=0.25, family="powerlaw", c_d=1.0)
        a = coefficients(spec, 5)
        assert a[4] == pytest.approx(4.0 ** -0.75, rel=1e-14)
        assert a[0] == 1.0

    def test_white_noise_limit(self):
        a = coefficients(LinearProcessSpec(d=1e-9), 6)
        assert a[0] == 1.0
        assert np.all(np.abs(a[1:]) < 1e-8)

    def test_scale_matches_gamma(self):
        spec = LinearProcessSpec(d=0.3)
        c_d = spec.coefficient_scale()
        assert c_d == pytest.approx(1.0 / specfun.gamma_fn(0.3), rel=1e-13)
        # a_i / (C_d i^{d-1}) -> 1
        a = coefficients(spec, 1 << 15)
        i = np.array([1 << 10, 1 << 12, 1 << 14], dtype=float)
        ratio = a[i.astype(int)] / (c_d * i ** (spec.d - 1.0))
        assert np.all(np.abs(ratio - 1.0) < 2e-3)

    def test_square_summable_cauchy(self):
        a = coefficients(LinearProcessSpec(d=0.3), 1 << 16)
        tail_partials = np.cumsum(a[1 << 12:] ** 2)
        assert tail_partials[-1] - tail_partials[tail_partials.size // 2] < 1e-3

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            LinearProcessSpec(d=0.6)
        with pytest.raises(ValueError):
            coefficients(LinearProcessSpec(d=0.3), 0)


class TestExactAcov:
    def test_lag0_closed_form(self, spec03):
        expect = specfun.gamma_fn(0.4) / specfun.gamma_fn(0.7) ** 2
        assert exact_acov(0, spec03) == pytest.approx(expect, rel=1e-12)

    def test_ratio_recursion_table(self, spec03):
        tab = acov_table(spec03, 64)
        direct = np.array([exact_acov(h, spec03) for h in range(65)])
        assert np.allclose(tab, direct, rtol=1e-12)

    def test_asymptotic_ratio_tends_to_one(self, spec03):
        consts = spec03.constants()
        for h in (1 << 8, 1 << 12, 1 << 16):
            ratio = exact_acov(h, spec03) / asymptotic_acov(h, consts)
            assert abs(ratio - 1.0) < 0.02

    def test_white_noise_limit_lag1(self):
        spec = LinearProcessSpec(d=1e-7)
        assert exact_acov(1, spec) == pytest.approx(0.0, abs=1e-5)

    def test_u_ratio_bounded_and_convergent(self, spec03):
        hs = 2 ** np.arange(0, 17, dtype=np.float64)
        u = u_ratio(hs, spec03)
        assert np.all(np.isfinite(u)) and np.all(u > 0.0)
        assert np.max(u) < 3.0  # bounded by a constant K
        assert u[-1] == pytest.approx(specfun.tilde_c_d(spec03.constants()), rel=1e-3)

    def test_powerlaw_against_brute_sum(self):
        spec = LinearProcessSpec(d=0.3, family="powerlaw", c_d=0.8)
        n = 1 << 22
        i = np.arange(1, n, dtype=np.float64)
        a_i = spec.c_d * i ** (spec.d - 1.0)
        for h in (0, 1, 5):
            a_ih = spec.c_d * (i + h) ** (spec.d - 1.0)
            brute = float(np.dot(a_i, a_ih))
            # i = 0 term: a_0^2 at lag 0, a_0 a_h otherwise
            brute += 1.0 if h == 0 else spec.c_d * float(h) ** (spec.d - 1.0)
            # brute truncates at i = 2^22; remaining tail is ~0.2% relative
            assert exact_acov(h, spec) == pytest.approx(brute, rel=3e-3)

    def test_positive_semidefinite_toeplitz(self, spec03):
        from scipy.linalg import toeplitz

        tab = acov_table(spec03, 63)
        eigs = np.linalg.eigvalsh(toeplitz(tab))
        assert eigs.min() >= -1e-8

    def test_truncated_table_matches_direct(self, spec03):
        m_c = 512
        tab = truncated_acov_table(spec03, m_c)
        a = coefficients(spec03, m_c + 1)
        for h in (0, 1, 17, 512):
            direct = float(np.dot(a[: m_c + 1 - h], a[h:]))
            assert tab[h] == pytest.approx(direct, rel=1e-10, abs=1e-12)

    def test_truncation_bias_bounded(self, spec03):
        # |gamma(0) - sum_{i<=M_c} a_i^2| <= sigma^2 C M_c^{2d-1}
        g0 = exact_acov(0, spec03)
        c_d = spec03.coefficient_scale()
        for m_c in (1 << 12, 1 << 14, 1 << 16):
            partial = truncated_acov_table(spec03, m_c)[0]
            bound = c_d ** 2 * m_c ** (2 * spec03.d - 1.0) / (1.0 - 2.0 * spec03.d)
            assert 0.0 < g0 - partial <= bound * 1.05


class TestGenerate:
    def test_deterministic_bit_identical(self, spec03):
        x1 = generate(spec03, 512, seed=42)
        x2 = generate(spec03, 512, seed=42)
        assert np.array_equal(x1.values, x2.values)
        assert x1.spec_hash == x2.spec_hash

    def test_white_noise_lag1_autocov(self):
        spec = LinearProcessSpec(d=1e-9)
        reps, n = 200, 1024
        acc = []
        for r in range(reps):
            x = generate(spec, n, seed=1000 + r).values
            acc.append(np.mean(x[1:] * x[:-1]))
        se = np.std(acc) / math.sqrt(reps)
        assert abs(np.mean(acc)) < 3.0 * se + 1e-4

    def test_sample_autocovariances_match_oracle(self, spec03):
        # 200 replicates at n = 2^14: sample acov within 3 MC SE at dyadic lags
        reps, n = 200, 1 << 14
        lags = [0, 1, 4, 16, 64]
        est = np.empty((reps, len(lags)))
        for r in range(reps):
            x = generate(spec03, n, seed=7000 + r).values
            for j, h in enumerate(lags):
                est[r, j] = np.mean(x[h:] * x[: n - h])
        mean = est.mean(axis=0)
        se = est.std(axis=0, ddof=1) / math.sqrt(reps)
        exact = np.array([exact_acov(h, spec03) for h in lags])
        # the generated process is truncated at M_c = 4n: compare against its
        # own covariance, which the exact one approximates to O(M_c^{2d-1})
        trunc = truncated_acov_table(spec03, 4 * n, max_lag=64)
        target = np.array([trunc[h] for h in lags])
        dev = np.abs(mean - target) / se
        assert np.all(dev < 3.5), (mean, target, se)
        assert np.all(np.abs(exact - target) < 0.02 * exact[0])

    def test_variance_within_tolerance(self, spec03):
        reps, n = 200, 1 << 13
        vs = [np.var(generate(spec03, n, seed=50_000 + r).values) for r in range(reps)]
        assert abs(np.mean(vs) / exact_acov(0, spec03) - 1.0) < 0.05

    def test_innovation_families_accepted(self):
        for law in ("gaussian", "rademacher", "exponential"):
            spec = LinearProcessSpec(d=0.2, innovation_law=law)
            x = generate(spec, 64, seed=3).values
            assert np.all(np.isfinite(x))

    def test_resource_cap(self, spec03):
        with pytest.raises(ResourceLimitError):
            generate(spec03, 1 << 20, seed=0, buffer_cap=1 << 16)

    def test_csv_roundtrip(self, tmp_path, spec03):
        path = generate(spec03, 16, seed=5)
        out = tmp_path / "series.csv"
        path.to_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# spec_hash=")
        assert lines[1] == "x"
        vals = np.array([float(v) for v in lines[2:]])
        assert np.array_equal(vals, path.values)
