"""Backend equivalence: the compiled kernels must agree with the NumPy
reference on every contract, and the vectorized pow must track libm."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renewlm import kernels
from renewlm.kernels import reference

compiled = pytest.importorskip("renewlm.kernels._core") \
    if kernels.BACKEND == "compiled" else None

needs_compiled = pytest.mark.skipif(
    kernels.BACKEND != "compiled", reason="compiled backend not built"
)


def _increasing(rng, n, scale=1.0):
    return np.cumsum(rng.random(n) * scale + 1e-6)


@needs_compiled
class TestFastPow:
    def test_tracks_libm_over_wide_range(self):
        rng = np.random.default_rng(3)
        lx = rng.uniform(-35.0, 35.0, 200_000)
        w = rng.uniform(-1.5, 1.5, 200_000)
        worst = 0.0
        for xv, wv in zip(np.exp(lx), w):
            a = compiled.fastpow(xv, wv)
            b = math.pow(xv, wv)
            worst = max(worst, abs(a - b) / abs(b))
        assert worst < 5e-9

    def test_unit_cases(self):
        assert compiled.fastpow(1.0, -0.7) == pytest.approx(1.0, abs=1e-12)
        assert compiled.fastpow(2.0, -1.0) == pytest.approx(0.5, rel=1e-9)


@needs_compiled
class TestBackendEquivalence:
    @pytest.mark.parametrize("n,min_sep,w", [
        (3, 1, -0.5), (3, 2, -0.5), (50, 1, -0.999), (257, 2, -0.4),
        (1024, 2, -0.05), (129, 3, -0.7),
    ])
    def test_pairwise_pow_sum(self, n, min_sep, w):
        x = _increasing(np.random.default_rng(n), n)
        a = compiled.pairwise_pow_sum(x, w, min_sep)
        b = reference.pairwise_pow_sum(x, w, min_sep)
        assert a == pytest.approx(b, rel=1e-8)

    def test_pairwise_pow_sum_tiny_increments(self):
        x = _increasing(np.random.default_rng(0), 300, scale=1e-9)
        a = compiled.pairwise_pow_sum(x, -0.4, 2)
        b = reference.pairwise_pow_sum(x, -0.4, 2)
        assert a == pytest.approx(b, rel=1e-8)

    @pytest.mark.parametrize("coef", [0.0, 0.731])
    def test_pairwise_acov_sum(self, coef):
        rng = np.random.default_rng(17)
        t = np.cumsum(rng.integers(1, 200, 400)).astype(np.float64)
        table = rng.random(512) - 0.3
        a = compiled.pairwise_acov_sum(t, table, coef, -0.45)
        b = reference.pairwise_acov_sum(t, table, coef, -0.45)
        assert a == pytest.approx(b, rel=1e-8, abs=1e-10)

    def test_pairwise_acov_all_in_table(self):
        rng = np.random.default_rng(5)
        t = np.cumsum(rng.integers(1, 3, 200)).astype(np.float64)
        table = rng.random(1024)
        a = compiled.pairwise_acov_sum(t, table, 0.5, -0.4)
        b = reference.pairwise_acov_sum(t, table, 0.5, -0.4)
        # identical gather arithmetic: exact match expected
        assert a == pytest.approx(b, rel=1e-12)

    def test_scatter_add_matches(self):
        rng = np.random.default_rng(23)
        pos = np.cumsum(rng.integers(1, 9, 150)).astype(np.int64)
        a_rev = rng.standard_normal(33)
        base = int(pos[0]) - a_rev.size + 1
        size = int(pos[-1]) - base + 1
        out_a = np.zeros(size)
        out_b = np.zeros(size)
        compiled.scatter_add_reversed(out_a, pos, a_rev, base)
        reference.scatter_add_reversed(out_b, pos, a_rev, base)
        assert np.allclose(out_a, out_b, rtol=1e-13, atol=1e-13)

    def test_scatter_bounds_checked(self):
        out = np.zeros(10)
        pos = np.array([5], dtype=np.int64)
        with pytest.raises(ValueError):
            compiled.scatter_add_reversed(out, pos, np.ones(8), 3)

    @settings(max_examples=40, deadline=None)
    @given(
        gaps=st.lists(st.integers(min_value=1, max_value=30), min_size=2, max_size=60),
        w=st.floats(min_value=-0.95, max_value=-0.05),
    )
    def test_pow_sum_property(self, gaps, w):
        x = np.cumsum(np.asarray(gaps, dtype=np.float64))
        a = compiled.pairwise_pow_sum(x, w, 1)
        b = reference.pairwise_pow_sum(x, w, 1)
        assert a == pytest.approx(b, rel=1e-8)


class TestReferenceContracts:
    def test_empty_and_small(self):
        assert reference.pairwise_pow_sum(np.array([1.0]), -0.4, 1) == 0.0
        assert reference.pairwise_pow_sum(np.array([1.0, 2.0]), -0.4, 2) == 0.0
        assert reference.pairwise_acov_sum(np.array([3.0]), np.ones(4), 0.0, -0.4) == 0.0

    def test_pow_sum_brute_force(self):
        x = np.array([1.0, 2.5, 4.0, 8.0])
        w = -0.5
        brute = sum(
            (x[j] - x[i]) ** w
            for i in range(4) for j in range(i + 2, 4)
        )
        assert reference.pairwise_pow_sum(x, w, 2) == pytest.approx(brute, rel=1e-14)

    def test_acov_sum_brute_force(self):
        t = np.array([1.0, 3.0, 10.0])
        table = np.array([5.0, 4.0, 3.0, 2.0])  # gamma(h), h < 4
        coef, w = 2.0, -1.0
        # pairs: lags 2 (table), 7 (power), 9 (power)
        brute = table[2] + coef * 7.0 ** w + coef * 9.0 ** w
        got = reference.pairwise_acov_sum(t, table, coef, w)
        assert got == pytest.approx(brute, rel=1e-14)

    def test_repeat_call_bitwise_stable(self):
        x = _increasing(np.random.default_rng(8), 500)
        assert kernels.pairwise_pow_sum(x, -0.3, 2) == kernels.pairwise_pow_sum(x, -0.3, 2)
