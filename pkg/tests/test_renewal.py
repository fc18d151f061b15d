"""Gap laws: exact tails, sampling, quantile scale, slowly varying parts."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from renewlm import renewal, rng, specfun
from renewlm.renewal import (
    ContinuousPareto,
    Deterministic,
    DiscretePareto,
    Geometric,
    LogPerturbedPareto,
    ReciprocalUniform,
    law_from_config,
    sample_gap,
    sample_path,
)

ALL_LAWS = [
    DiscretePareto(0.6),
    ContinuousPareto(0.5),
    ReciprocalUniform(),
    LogPerturbedPareto(0.3, 2.0),
    Geometric(0.5),
    Deterministic(),
]


class TestTails:
    def test_continuous_pareto(self):
        law = ContinuousPareto(0.5)
        assert sample_gap(law, 0.25) == pytest.approx(16.0, rel=1e-14)
        assert law.tail_bar_f(9.0) == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_reciprocal_uniform(self):
        law = ReciprocalUniform()
        assert sample_gap(law, 0.1) == pytest.approx(10.0, rel=1e-14)
        assert law.tail_bar_f(50.0) == pytest.approx(0.02, rel=1e-14)

    def test_discrete_pareto_mass_at_one(self):
        law = DiscretePareto(1.0)
        p1 = 1.0 - law.tail_bar_f(2.0)
        assert p1 == pytest.approx(6.0 / math.pi ** 2, rel=1e-10)
        assert law.tail_bar_f(1.0) == 1.0

    def test_discrete_pareto_slowly_varying_limit(self):
        # ell(x) -> 1/(alpha zeta(1+alpha))
        law = DiscretePareto(0.6)
        target = 1.0 / (0.6 * specfun.zeta(1.6))
        assert float(law.ell(100.0)) == pytest.approx(target, rel=0.02)
        assert float(law.ell(1e6)) == pytest.approx(target, rel=1e-4)

    def test_geometric_and_deterministic(self):
        geo = Geometric(0.5)
        assert geo.tail_bar_f(3.0) == pytest.approx(0.25, rel=1e-14)
        assert geo.mean() == 2.0
        det = Deterministic()
        assert float(det.tail_bar_f(1.0)) == 1.0
        assert float(det.tail_bar_f(1.5)) == 0.0

    def test_log_perturbed_monotone_valid_tail(self):
        law = LogPerturbedPareto(0.3, 2.0)
        x = np.logspace(0, 9, 4000)
        t = law.tail_bar_f(x)
        assert t[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(t) <= 1e-15)
        assert np.all((t > 0) & (t <= 1.0))

    @pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: l.name)
    def test_empirical_tail_matches(self, law):
        n = 1 << 20
        u = rng.uniform_at(2024, ("tailtest", law.name), 0, n)
        draws = np.asarray(law.sample_from_uniform(u))
        for x in (2.0, 10.0, 100.0):
            p = float(law.tail_bar_f(x))
            emp = float(np.mean(draws >= x))
            se = math.sqrt(max(p * (1.0 - p), 1e-12) / n)
            assert abs(emp - p) <= 3.5 * se + 1e-9, (law.name, x, emp, p)


class TestQuantile:
    def test_closed_forms(self):
        assert ContinuousPareto(0.5).quantile_b(100) == pytest.approx(1e4, rel=1e-12)
        assert ReciprocalUniform().quantile_b(1000) == pytest.approx(1000.0)

    def test_discrete_pareto_alpha1_scale(self):
        # b_n ~ (6/pi^2) n for the alpha = 1 discrete Pareto
        law = DiscretePareto(1.0)
        n = 10_000
        assert law.quantile_b(n) == pytest.approx(6.0 / math.pi ** 2 * n, rel=0.05)

    def test_generalized_inverse_property(self):
        for law in (DiscretePareto(0.6), Geometric(0.3)):
            for n in (10, 100, 1000):
                b = law.quantile_b(n)
                assert law.tail_exceed(b) <= 1.0 / n
                if b > 1:
                    assert law.tail_exceed(b - 1) > 1.0 / n

    def test_nondecreasing_and_regular_variation(self):
        for law in (DiscretePareto(0.6), ContinuousPareto(0.7), LogPerturbedPareto(0.4, 2.0)):
            bs = [law.quantile_b(n) for n in (1, 2, 10, 100, 10_000)]
            assert all(b2 >= b1 for b1, b2 in zip(bs, bs[1:]))
            big = 1 << 22
            ratio = law.quantile_b(2 * big) / law.quantile_b(big)
            assert ratio == pytest.approx(2.0 ** (1.0 / law.alpha), rel=0.05)


class TestEllStar:
    def test_reciprocal_uniform_logarithm(self):
        law = ReciprocalUniform()
        for n in (2.0, 100.0, 1e6):
            assert law.ell_star(n) == pytest.approx(math.log(n), rel=1e-12)

    def test_unit_lower_end(self):
        for law in (DiscretePareto(0.6), ContinuousPareto(0.5)):
            assert law.ell_star(1.0) == 0.0

    def test_discrete_pareto_against_quadrature(self):
        law = DiscretePareto(0.6)
        for n in (7.5, 200.0, 5e4):
            oracle, _ = quad(
                lambda x: float(law.ell(x)) / x, 1.0, n, limit=800,
                points=None if n > 1000 else np.arange(1.0, min(n, 50.0)),
            )
            assert law.ell_star(n) == pytest.approx(oracle, rel=1e-4)

    def test_karamata_ratio_diverges(self):
        # ell*(n)/ell(n) -> infinity, monotonically beyond some point
        for law in (DiscretePareto(0.6), ReciprocalUniform(), LogPerturbedPareto(0.3, 2.0)):
            ratios = []
            for k in range(2, 31, 4):
                n = 2.0 ** k
                ratios.append(law.ell_star(n) / float(law.ell(n)))
            assert ratios[-1] > 10.0
            tail = ratios[3:]
            assert all(b > a for a, b in zip(tail, tail[1:]))

    def test_log_perturbed_bn_summability(self):
        # sum_n b_n^{-alpha} bounded: b_n^{-alpha} <= C / (n (ln(e-1+n))^2)
        law = LogPerturbedPareto(0.3, 2.0)
        ns = np.unique(np.logspace(0.5, 6, 60).astype(np.int64))
        terms = np.array([law.quantile_b(int(n)) ** -law.alpha for n in ns])
        envelope = 1.0 / (ns * np.log(math.e - 1.0 + ns) ** 2)
        assert np.all(terms <= (law.shift + 1.0) ** law.power * envelope * 1.5)


class TestPaths:
    def test_deterministic_path(self):
        p = sample_path(Deterministic(), 5, seed=0)
        assert np.array_equal(p.epochs, [1, 2, 3, 4, 5])

    @pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: l.name)
    def test_invariants(self, law):
        p = sample_path(law, 512, seed=3)
        assert p.epochs.size == 512
        assert np.all(np.diff(p.epochs) > 0.0)
        assert np.all(p.epochs >= np.arange(1, 513) - 1e-9)
        assert p.max_gap <= p.epochs[-1]
        assert np.all(p.running_max == np.maximum.accumulate(p.gaps))

    def test_prefix_consistency(self):
        # counter-based gaps: a longer path extends a shorter one
        law = DiscretePareto(0.7)
        a = sample_path(law, 100, seed=9).gaps
        b = sample_path(law, 300, seed=9).gaps
        assert np.array_equal(a, b[:100])

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(min_value=1, max_value=200),
           seed=st.integers(min_value=0, max_value=2 ** 32))
    def test_path_invariants_property(self, n, seed):
        p = sample_path(Geometric(0.4), n, seed=seed)
        assert p.epochs.size == n
        assert p.epochs[-1] >= n
        assert p.max_gap <= p.epochs[-1]

    def test_median_t_n_matches_subordinator(self):
        # T_n / b_n converges to the stable subordinator marginal; medians of
        # the two ensembles agree after the Gamma(1-alpha) scale calibration
        from renewlm import stable

        law = ContinuousPareto(0.5)
        n, reps = 10_000, 1000
        t_over_b = np.empty(reps)
        b_n = law.quantile_b(n)
        for r in range(reps):
            u = rng.uniform_at(77, ("fclt-med", r), 0, n)
            t_over_b[r] = np.sum(law.sample_from_uniform(u)) / b_n
        ell = stable.sample_standard_stable(stable.StableSpec(0.5), 20_000, seed=5)
        kappa = specfun.gamma_fn(1.0 - law.alpha)
        scaled = kappa ** (1.0 / law.alpha) * ell
        med_t = np.median(t_over_b)
        med_l = np.median(scaled)
        assert abs(med_t / med_l - 1.0) < 0.15

    def test_csv_roundtrip(self, tmp_path):
        p = sample_path(Geometric(0.5), 8, seed=21)
        out = tmp_path / "path.csv"
        p.to_csv(out)
        lines = out.read_text().splitlines()
        assert lines[1] == "k,gap,t"
        assert len(lines) == 10


class TestConfigRoundtrip:
    def test_law_from_config(self):
        for law in ALL_LAWS:
            import json

            blob = json.loads(law.to_json())
            rebuilt = law_from_config(blob.pop("name"), blob)
            assert rebuilt.name == law.name
            x = np.array([2.0, 10.0])
            assert np.allclose(rebuilt.tail_bar_f(x), law.tail_bar_f(x))

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown renewal law"):
            law_from_config("weibull", {})

    def test_sample_gap_domain(self):
        with pytest.raises(ValueError):
            sample_gap(ContinuousPareto(0.5), 0.0)
        with pytest.raises(ValueError):
            sample_gap(ContinuousPareto(0.5), 1.0)
