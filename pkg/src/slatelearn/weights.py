"""Turning an estimation forest into model weights, and the end-to-end learners."""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT_BUDGET, QueryBudget
from .forest import (EstimationForest, build_balanced_estimation_forest,
                     build_estimation_forest)
from .models import LogWeightMnl
from .oracle import ReplayOracle, build_replay_table

ALGO_TAG = 0xA160


def _algo_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, ALGO_TAG)))


def generate_weights(forest: EstimationForest) -> LogWeightMnl:
    """Assign model weights from a forest's ratio estimates; zero queries.

    Components are processed from the one holding the heaviest center
    downward. Within a component, the center seeds weight 1 and a traversal
    propagates w_u = w_v * r(u, v) along the edges. Every component after
    the first is rescaled by (eps / (Upsilon * n^2)) * w_min, where Upsilon
    is the component's heaviest assigned weight and w_min the lightest
    weight assigned so far, making later components negligible without
    underflow (all arithmetic stays in log space). The n^2 keeps the summed
    mass of all later components below eps/n of any slate's total even when
    the forest was built at accuracy eps directly, at no query cost.
    """
    n = forest.n
    adj = forest.adjacency()
    log_w = np.full(n, np.nan)
    wmin_log = 0.0
    log_n = math.log(n)
    log_eps = math.log(forest.eps)
    first = True

    # centers from heaviest cluster down; each unassigned one roots a component
    for i in range(forest.graph.T - 1, -1, -1):
        root = int(forest.graph.centers[i])
        if not np.isnan(log_w[root]):
            continue
        comp = [root]
        log_w[root] = 0.0
        frontier = [root]
        while frontier:
            v = frontier.pop()
            for u in adj[v]:
                if np.isnan(log_w[u]):
                    log_w[u] = log_w[v] + forest.log_ratio(u, v)
                    comp.append(u)
                    frontier.append(u)
        comp = np.array(comp, dtype=np.int64)
        if not first:
            upsilon_log = float(log_w[comp].max())
            log_w[comp] += log_eps - upsilon_log - 2.0 * log_n + wmin_log
        # doubles hold the whole range comfortably; this guards the claim
        span = float(log_w[comp].max() - log_w[comp].min())
        assert span <= n * math.log(300.0 * n / forest.eps) + 1e-9
        wmin_log = min(wmin_log, float(log_w[comp].min()))
        first = False

    if np.any(np.isnan(log_w)):
        raise AssertionError("forest left items unassigned")
    return LogWeightMnl(log_w)


def learn_adaptive(oracle, n: int, eps: float, delta: float,
                   seed: int = 0) -> LogWeightMnl:
    """Learn an MNL to within d1 distance eps, adaptively.

    Builds an estimation forest at accuracy (eps/13)/9 with alpha = 1/2 and
    reads weights off it. Succeeds with probability 1 - delta; the expected
    query count grows as n log n times polynomial factors in 1/eps and
    log(1/delta). Individual pairs may be queried heavily.
    """
    _check_learn_args(n, eps, delta)
    if n == 1:
        return LogWeightMnl(np.zeros(1))
    eps_prime = eps / 13.0
    forest = build_estimation_forest(oracle, 0.5, eps_prime / 9.0, delta,
                                     _algo_rng(seed))
    return generate_weights(forest)


def learn_balanced(oracle, n: int, eps: float, delta: float,
                   budget: QueryBudget = DEFAULT_BUDGET,
                   seed: int = 0) -> LogWeightMnl:
    """Learn an MNL while keeping every pair's query load polylogarithmic.

    Uses the balanced forest builder. With the default calibrated budget
    the forest is built at accuracy eps directly; the theory budget applies
    the full (eps/13)/9 composition instead.
    """
    _check_learn_args(n, eps, delta)
    if n == 1:
        return LogWeightMnl(np.zeros(1))
    forest_eps = (eps / 13.0) / 9.0 if budget.compose_theory else eps
    forest = build_balanced_estimation_forest(oracle, 0.5, forest_eps, delta,
                                              budget, _algo_rng(seed))
    return generate_weights(forest)


def learn_nonadaptive(oracle, n: int, eps: float, delta: float, m: int,
                      budget: QueryBudget = DEFAULT_BUDGET,
                      seed: int = 0) -> tuple[LogWeightMnl, ReplayOracle]:
    """Learn from one non-adaptive batch of m queries per pair.

    Queries every pair exactly m times up front, then runs the balanced
    learner against the recorded answers without touching the live oracle
    again. Raises ``ReplayBudgetExhausted`` if some pair needs more than m
    answers. Returns the model and the replay oracle (whose ledger shows
    the simulated per-pair consumption).
    """
    table = build_replay_table(oracle, m)
    replay = ReplayOracle(table, n)
    model = learn_balanced(replay, n, eps, delta, budget, seed)
    return model, replay


def _check_learn_args(n: int, eps: float, delta: float) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
