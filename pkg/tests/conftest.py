"""Shared fixtures and helpers for the test suite."""

import math

import numpy as np
import pytest

import slatelearn as sl


def failure_bound(delta: float, trials: int) -> float:
    """Allowed empirical failure fraction for a 1 - delta guarantee."""
    return delta + 3.0 * math.sqrt(delta * (1.0 - delta) / trials)


class FixedOracle:
    """Oracle stub that always declares a designated item the winner."""

    def __init__(self, n: int, winner: int):
        self.n = n
        self.winner = winner
        self.ledger = sl.QueryLedger()

    def max_sample(self, slate):
        slate = np.asarray(slate)
        if slate.size == 2:
            return self.sample_pair(int(slate[0]), int(slate[1]))
        self.ledger.record_slate(slate.size)
        return self.winner

    def sample_pair(self, u, v):
        self.ledger.record_pair(u, v)
        return self.winner if self.winner in (u, v) else u

    def pair_win_count(self, u, v, count):
        self.ledger.record_pair(u, v, count)
        return count if u == self.winner else 0

    def sample_geometric(self, u, v):
        losses = 0
        while self.sample_pair(u, v) != u:
            losses += 1
        return losses

    def sample_geometric_block(self, u, v, count):
        return np.array([self.sample_geometric(u, v) for _ in range(count)],
                        dtype=np.int64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def mnl(*weights) -> sl.LogWeightMnl:
    """MNL from plain (not log) weights."""
    return sl.LogWeightMnl(np.log(np.asarray(weights, dtype=np.float64)))
