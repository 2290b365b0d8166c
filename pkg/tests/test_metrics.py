import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import slatelearn as sl
from conftest import mnl


class TestDistanceExact:
    def test_identical_models_are_at_zero(self):
        m = mnl(1.0, 2.0, 3.0)
        rep = sl.distance_exact(m, m)
        assert rep.d1 == 0.0 and rep.dinf == 0.0
        assert rep.exact and rep.slates_checked == 7

    def test_split_mass_counterexample(self):
        # two models agreeing on every superset of the heavy item but
        # differing sharply on the light-light slate
        eps = 0.2
        a = mnl(1 - eps, eps / 2, eps / 2)
        b = mnl(1 - eps, 3 * eps / 4, eps / 4)
        rep = sl.distance_exact(a, b)
        assert rep.dinf >= 0.25 - 1e-12
        probs_a = a.slate_distribution([1, 2])
        probs_b = b.slate_distribution([1, 2])
        assert np.abs(probs_a - probs_b).sum() == pytest.approx(0.5)

    def test_two_item_example(self):
        a = mnl(1.0, 2.0)
        b = mnl(1.0, 3.0)
        rep = sl.distance_exact(a, b)
        assert rep.d1 == pytest.approx(1.0 / 6.0)
        assert rep.argmax_slate == (0, 1)

    def test_symmetry_and_ordering(self):
        a = mnl(1.0, 2.0, 4.0, 8.0)
        b = mnl(1.0, 2.5, 3.5, 9.0)
        ab, ba = sl.distance_exact(a, b), sl.distance_exact(b, a)
        assert ab.d1 == pytest.approx(ba.d1, abs=1e-12)
        assert ab.dinf == pytest.approx(ba.dinf, abs=1e-12)
        assert 0 <= ab.dinf <= ab.d1 <= 2

    def test_pseudo_mnl_vs_mnl(self):
        pseudo = sl.MatchingPseudoMnl(np.array([0.7]), np.arange(2))
        m = mnl(0.3, 0.7)
        rep = sl.distance_exact(pseudo, m)
        assert rep.d1 == pytest.approx(0.0, abs=1e-12)

    def test_refuses_large_n(self):
        big = sl.LogWeightMnl(np.zeros(21))
        with pytest.raises(ValueError):
            sl.distance_exact(big, big)


class TestDistanceSampled:
    def test_identical_models(self):
        m = mnl(*range(1, 9))
        assert sl.distance_sampled(m, m, 50).d1 == 0.0

    def test_lower_bounds_exact(self):
        rng = np.random.default_rng(0)
        for t in range(20):
            lw = rng.normal(size=rng.integers(3, 13))
            a = sl.LogWeightMnl(lw)
            b = sl.LogWeightMnl(lw + rng.normal(scale=0.3, size=lw.size))
            exact = sl.distance_exact(a, b)
            sampled = sl.distance_sampled(a, b, 40, np.random.default_rng(t))
            assert sampled.d1 <= exact.d1 + 1e-12
            assert sampled.dinf <= exact.dinf + 1e-12

    def test_full_slate_always_included(self):
        # the separation fixture is only distinguishable on large slates
        a, b = sl.separation_fixture(16, 0.2)
        rep = sl.distance_sampled(a, b, 1)
        assert rep.dinf >= 0.2 / 9.0

    def test_respects_slate_budget(self):
        a = mnl(*range(1, 9))
        b = mnl(*range(2, 10))
        assert sl.distance_sampled(a, b, 5).slates_checked <= 5


class TestSeparationFixture:
    def test_pair_gaps_are_tiny_but_full_slate_differs(self):
        n, eps = 16, 0.2
        m1, m2 = sl.separation_fixture(n, eps)
        worst = max(abs(sl.pair_probability(m1, u, v)
                        - sl.pair_probability(m2, u, v))
                    for u in range(n) for v in range(n) if u != v)
        assert worst <= eps / n
        full = np.arange(n)
        gap = abs(m1.slate_distribution(full)[-1]
                  - m2.slate_distribution(full)[-1])
        assert gap >= eps / 9.0

    def test_closed_form_full_slate_gap(self):
        n, eps = 16, 0.2
        m1, m2 = sl.separation_fixture(n, eps)
        expected = n / (2 * n - 1) - n / ((2 + eps) * n - (1 + eps))
        full = np.arange(n)
        gap = m1.slate_distribution(full)[-1] - m2.slate_distribution(full)[-1]
        assert gap == pytest.approx(expected, abs=1e-12)

    @given(st.floats(min_value=1e-4, max_value=1e-2))
    @settings(max_examples=20, deadline=None)
    def test_gap_vanishes_with_eps(self, eps):
        m1, m2 = sl.separation_fixture(8, eps)
        full = np.arange(8)
        gap = abs(m1.slate_distribution(full)[-1]
                  - m2.slate_distribution(full)[-1])
        assert gap <= eps


class TestEstimatesOnAllSlates:
    def test_l1_error_within_budget(self):
        eps, delta, trials = 0.3, 0.1, 20
        model = sl.generate_instance(
            sl.InstanceSpec("power-law", n=8, seed=0, params={"gamma": 1.0}))
        ok = 0
        for t in range(trials):
            o = sl.LiveOracle(model, seed=t)
            est = sl.estimates_on_all_slates(o, eps, delta)
            worst = 0.0
            for slate, probs in est.items():
                truth = model.slate_distribution(list(slate))
                worst = max(worst, float(np.abs(probs - truth).sum()))
            ok += worst <= eps
        assert ok / trials >= 0.9


class TestLedgerReport:
    def test_empty(self):
        rep = sl.ledger_report(sl.QueryLedger())
        assert rep["total"] == 0 and rep["max_per_pair"] == 0

    def test_replay_table_accounting(self):
        o = sl.LiveOracle(mnl(1.0, 1.0, 1.0), seed=0)
        sl.build_replay_table(o, 2)
        rep = sl.ledger_report(o.ledger)
        assert rep["total"] == 6 and rep["max_per_pair"] == 2
        assert rep["per_size"] == {"2": 6}

    def test_learner_total_matches_independent_counter(self):
        # cross-check the ledger against a wrapper that counts calls itself
        truth = sl.generate_instance(
            sl.InstanceSpec("power-law", n=16, seed=1, params={"gamma": 1.0}))
        o = sl.LiveOracle(truth, seed=1)
        counted = {"total": 0}
        inner = o.pair_win_count

        def wrapper(u, v, count):
            counted["total"] += count
            return inner(u, v, count)

        o.pair_win_count = wrapper
        sl.learn_adaptive(o, 16, 0.3, 0.1, seed=1)
        assert o.ledger.total == counted["total"]
