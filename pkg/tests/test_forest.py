import math

import numpy as np
import pytest

import slatelearn as sl
from conftest import failure_bound, mnl
from slatelearn import forest as forest_mod
from slatelearn.forest import forest_to_dict


def build_adaptive(model, seed, alpha=0.5, eps=0.3, delta=0.1):
    o = sl.LiveOracle(model, seed=seed)
    return sl.build_estimation_forest(o, alpha, eps, delta,
                                      np.random.default_rng(seed)), o


def build_balanced(model, seed, alpha=0.5, eps=0.3, delta=0.1):
    o = sl.LiveOracle(model, seed=seed)
    return sl.build_balanced_estimation_forest(
        o, alpha, eps, delta, rng=np.random.default_rng(seed)), o


def assert_structure(forest, alpha=0.5):
    n = forest.n
    comps = forest.components()
    # a forest has exactly n - (number of components) edges
    assert len(forest.edge_log) == n - len(comps)
    # antisymmetry is bit-exact by construction
    for (u, v), lr in forest.edge_log.items():
        assert forest.log_ratio(v, u) == -lr
    # components cover unions of consecutive clusters
    gamma = forest.graph.gamma
    covered = set()
    for comp in comps:
        gs = sorted(set(int(gamma[x]) for x in comp))
        assert gs == list(range(gs[0], gs[-1] + 1))
        for g in gs:
            assert g not in covered
            assert set(forest.graph.clusters[g]) <= set(int(x) for x in comp)
            covered.add(g)
    # same cluster -> within two hops through the star
    dist = forest.hop_distances()
    for i, members in enumerate(forest.graph.clusters):
        for a in members:
            for b in members:
                assert 0 <= dist[a, b] <= 2
    # center-center edges are floored at alpha^{-(i-j)}
    centers = set(int(c) for c in forest.graph.centers)
    for (u, v), _ in forest.edge_log.items():
        if u in centers and v in centers and gamma[u] != gamma[v]:
            hi, lo = (u, v) if gamma[u] > gamma[v] else (v, u)
            floor = (gamma[hi] - gamma[lo]) * math.log(1.0 / alpha)
            assert forest.log_ratio(hi, lo) >= floor - 1e-12


class TestAdaptiveBuilder:
    def test_uniform_weights_star_only(self):
        model = mnl(*([1.0] * 8))
        f, _ = build_adaptive(model, seed=0)
        if f.graph.T == 1:
            centers = set(int(c) for c in f.graph.centers)
            for (u, v) in f.edge_log:
                assert u in centers or v in centers
            assert len(f.edge_log) == 7

    def test_geometric_chain_has_linear_edge_count(self):
        # every item lands in its own cluster and consecutive centers link up
        # (needs 1/(2 eps) above the cluster-break threshold of about 3)
        eps = 0.1
        n = 24
        model = sl.LogWeightMnl(np.arange(n) * math.log(2 * eps))
        counts = []
        for t in range(5):
            f, _ = build_adaptive(model, seed=t, eps=eps)
            centers = set(int(c) for c in f.graph.centers)
            cc = sum(1 for (u, v) in f.edge_log
                     if u in centers and v in centers
                     and f.graph.gamma[u] != f.graph.gamma[v])
            counts.append(cc)
        assert all(n / 2 <= c <= n for c in counts)

    def test_structural_invariants_on_random_instances(self):
        for t in range(100):
            model = sl.generate_instance(
                sl.InstanceSpec("power-law", n=64, seed=t, params={"gamma": 1.0}))
            f, _ = build_adaptive(model, seed=t)
            assert_structure(f)

    def test_potential_recurrence_and_sum(self):
        model = sl.generate_instance(
            sl.InstanceSpec("power-law", n=64, seed=1, params={"gamma": 1.0}))
        f, _ = build_adaptive(model, seed=1)
        Z = f.potential.Z
        sizes = [len(c) for c in f.graph.clusters]
        assert Z[0] == 0.0
        for i in range(1, len(Z)):
            assert Z[i] == pytest.approx(0.5 * Z[i - 1] + sizes[i - 1])
        assert Z.sum() <= 64 / (1 - 0.5) + 1e-9

    def test_at_most_two_ratio_calls_per_target(self):
        model = sl.generate_instance(
            sl.InstanceSpec("power-law", n=48, seed=2, params={"gamma": 1.5}))
        f, _ = build_adaptive(model, seed=2)
        assert np.all(f.stats["er_calls_per_target"] <= 2)

    def test_edges_never_duplicated(self):
        f, _ = build_adaptive(mnl(1.0, 8.0, 64.0), seed=3)
        with pytest.raises(AssertionError):
            u, v = next(iter(f.edge_log))
            f.add_edge(u, v, 0.0)


class TestBalancedBuilder:
    def test_uniform_weights_star_only(self):
        model = mnl(*([1.0] * 8))
        f, _ = build_balanced(model, seed=0)
        if f.graph.T == 1:
            assert len(f.edge_log) == 7

    def test_structural_invariants(self):
        for t in range(20):
            model = sl.generate_instance(
                sl.InstanceSpec("power-law", n=32, seed=t, params={"gamma": 1.0}))
            f, _ = build_balanced(model, seed=t)
            assert_structure(f)

    def test_scan_window_limits_calls_per_target(self):
        model = sl.generate_instance(
            sl.InstanceSpec("power-law", n=32, seed=5, params={"gamma": 2.0}))
        f, _ = build_balanced(model, seed=5)
        window = f.stats["scan_window"]
        per_target = {}
        for (i, j), c in f.stats["ber_calls"].items():
            per_target[j] = per_target.get(j, 0) + c
        assert all(c <= window + 1 for c in per_target.values())

    def test_per_pair_cap_within_theory_budget(self):
        # calibrated sampling sits far below the worst-case per-pair formula
        n, eps, delta, alpha, trials = 64, 0.3, 0.1, 0.5, 50
        model = sl.generate_instance(
            sl.InstanceSpec("power-law", n=n, seed=0, params={"gamma": 1.0}))
        qc_cap = math.ceil((20.0 * (alpha + 1) / (alpha * (eps / 3.0) ** 2))
                           * math.log(6.0 * n * n * 6.0 / delta))
        p = (1.0 / alpha) / (7.0 / alpha + 1.0 / alpha)
        geo_cap = 2e6 / p  # generous stand-in for the spread-estimate bound
        ok = 0
        for t in range(trials):
            f, o = build_balanced(model, seed=t, eps=eps, delta=delta)
            ok += o.ledger.max_per_pair <= qc_cap + geo_cap
        assert ok / trials >= 0.90

    def test_failure_branch_surfaces_typed_error(self, monkeypatch):
        # a big light cluster raises the far-scan threshold enough that the
        # heaviest center connects two clusters back, forcing a bridging call
        model = mnl(*([1.0] * 8 + [20.0, 400.0]))

        calls = {"count": 0}
        real = forest_mod.balanced_estimate_ratio

        def flaky(oracle, graph, i, j, eps, alpha, delta, params=None):
            calls["count"] += 1
            if calls["count"] > 1:
                return sl.RatioEstimate.infinite()  # poison the bridging call
            return real(oracle, graph, i, j, eps, alpha, delta, params)

        monkeypatch.setattr(forest_mod, "balanced_estimate_ratio", flaky)
        raised = False
        for t in range(10):
            o = sl.LiveOracle(model, seed=t)
            calls["count"] = 0
            try:
                sl.build_balanced_estimation_forest(
                    o, 0.5, 0.3, 0.1, rng=np.random.default_rng(t))
            except sl.ForestBuildFailure:
                raised = True
                break
        assert raised


class TestValidateForest:
    def make_exact_forest(self, log_w):
        """Hand-built star forest whose edges carry the true log-ratios."""
        n = len(log_w)
        gamma = np.zeros(n, dtype=np.int64)
        graph = sl.ClusterGraph(
            clusters=[np.arange(n)], centers=np.array([0]),
            star_log={u: float(log_w[u] - log_w[0]) for u in range(1, n)},
            gamma=gamma, a1=100.0, a2=2.0, eps=0.3)
        f = sl.EstimationForest(graph=graph, edge_log={}, eps=0.3)
        for u in range(1, n):
            f.add_edge(u, 0, float(log_w[u] - log_w[0]))
        return f

    def test_exact_forest_validates_clean(self):
        log_w = np.array([0.0, 0.3, -0.2, 0.1])
        rep = sl.validate_forest(self.make_exact_forest(log_w), log_w)
        assert rep.ok

    def test_corrupted_edge_is_cited_as_path_violation(self):
        log_w = np.array([0.0, 0.3, -0.2, 0.1])
        f = self.make_exact_forest(log_w)
        f.edge_log[(0, 1)] += math.log(1 + 3 * 0.3)
        rep = sl.validate_forest(f, log_w)
        assert not rep.ok
        assert any(cond == 1 for cond, _, _ in rep.violations)

    def test_adaptive_builder_output_validates(self):
        trials, clean = 100, 0
        for t in range(trials):
            model = sl.generate_instance(
                sl.InstanceSpec("power-law", n=32, seed=t, params={"gamma": 1.0}))
            f, _ = build_adaptive(model, seed=t)
            clean += sl.validate_forest(f, model.log_w).ok
        assert clean / trials >= 0.90


class TestSerialization:
    def test_forest_to_dict_round_trips_edges(self):
        f, _ = build_adaptive(mnl(1.0, 2.0, 50.0), seed=0)
        doc = forest_to_dict(f)
        assert doc["n"] == 3 and doc["t"] == 5
        assert len(doc["edges"]) == len(f.edge_log)
        for u, v, lr in doc["edges"]:
            assert f.edge_log[(u, v)] == lr
