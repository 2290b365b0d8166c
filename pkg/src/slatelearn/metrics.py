"""Distances between choice models, fixtures, and query accounting reports.

The headline distance between two models is the worst slate:

    d1(A, B)   = max over slates S of the l1 distance between A_S and B_S
    dinf(A, B) = max over slates S and items i of |A_S(i) - B_S(i)|

Exhaustive evaluation enumerates all 2^n - 1 slates and is gated to n <= 20;
the sampled variant checks a structured subset of slates and is a lower
bound on the exact distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import LogWeightMnl, Model, slate_distribution


@dataclass(frozen=True)
class DistanceReport:
    d1: float
    dinf: float
    argmax_slate: tuple
    exact: bool
    slates_checked: int


def _slate_gap(a: Model, b: Model, slate: np.ndarray) -> tuple:
    pa = slate_distribution(a, slate)
    pb = slate_distribution(b, slate)
    diff = np.abs(pa - pb)
    return float(diff.sum()), float(diff.max())


def distance_exact(a: Model, b: Model) -> DistanceReport:
    """Exact d1 and dinf over every non-empty slate; requires n <= 20."""
    n = a.n
    if b.n != n:
        raise ValueError("models must agree on n")
    if n > 20:
        raise ValueError("exhaustive slate enumeration is gated to n <= 20")
    items = np.arange(n)
    best_d1, best_dinf, best_slate = -1.0, 0.0, ()
    for mask in range(1, 1 << n):
        slate = items[[(mask >> i) & 1 == 1 for i in range(n)]]
        tv, gap = _slate_gap(a, b, slate)
        best_dinf = max(best_dinf, gap)
        if tv > best_d1:
            best_d1, best_slate = tv, tuple(int(x) for x in slate)
    return DistanceReport(d1=best_d1, dinf=best_dinf, argmax_slate=best_slate,
                          exact=True, slates_checked=(1 << n) - 1)


def distance_sampled(a: Model, b: Model, k: int,
                     rng: np.random.Generator | None = None) -> DistanceReport:
    """Lower-bound d1 and dinf from at most k slates.

    Always includes the full slate and every prefix of a's items sorted
    heaviest first (when a is an MNL), then all pairs if the budget allows,
    then uniform random subsets until k slates have been checked.
    """
    n = a.n
    if b.n != n:
        raise ValueError("models must agree on n")
    if k < 1:
        raise ValueError("k must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0xC0FFEE)

    slates: list = [tuple(range(n))]
    seen = {slates[0]}
    if isinstance(a, LogWeightMnl):
        order = np.argsort(-a.log_w, kind="stable")
        for size in range(2, n):
            s = tuple(sorted(int(x) for x in order[:size]))
            if s not in seen:
                seen.add(s)
                slates.append(s)
    if len(slates) + n * (n - 1) // 2 <= k:
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in seen:
                    seen.add((u, v))
                    slates.append((u, v))
    attempts = 0
    while len(slates) < k and attempts < 50 * k:
        attempts += 1
        size = int(rng.integers(2, n + 1))
        s = tuple(sorted(int(x) for x in
                         rng.choice(n, size=size, replace=False)))
        if s not in seen:
            seen.add(s)
            slates.append(s)
    slates = slates[:k]

    best_d1, best_dinf, best_slate = -1.0, 0.0, ()
    for s in slates:
        tv, gap = _slate_gap(a, b, np.array(s, dtype=np.int64))
        best_dinf = max(best_dinf, gap)
        if tv > best_d1:
            best_d1, best_slate = tv, s
    return DistanceReport(d1=best_d1, dinf=best_dinf, argmax_slate=best_slate,
                          exact=False, slates_checked=len(slates))


def separation_fixture(n: int, eps: float) -> tuple:
    """Two MNLs that pair queries alone cannot tell apart.

    The first has n - 1 items of weight 1 and one item of weight n; the
    second inflates the light items to 1 + eps. Every pair distribution
    differs by at most eps / n, yet on the full slate the heavy item's win
    probability differs by at least eps / 9, so any learner below that
    accuracy must query larger slates or tolerate the gap.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    lw1 = np.zeros(n)
    lw1[-1] = math.log(n)
    lw2 = np.full(n, math.log1p(eps))
    lw2[-1] = math.log(n)
    return LogWeightMnl(lw1), LogWeightMnl(lw2)


def estimates_on_all_slates(oracle, eps: float, delta: float) -> dict:
    """Empirical winner distribution of every slate, each to l1 error eps.

    Queries each of the 2^n - 1 slates q = ceil((2/eps^2)(n ln 3 +
    ln(2/delta))) times; with probability 1 - delta every returned
    distribution is within total l1 distance eps of the truth. Returns a
    dict mapping each slate tuple to its empirical probability vector.
    """
    n = oracle.n
    q = math.ceil((2.0 / (eps * eps)) * (n * math.log(3.0)
                                         + math.log(2.0 / delta)))
    items = np.arange(n)
    out = {}
    for mask in range(1, 1 << n):
        slate = items[[(mask >> i) & 1 == 1 for i in range(n)]]
        if slate.size == 1:
            out[(int(slate[0]),)] = np.ones(1)
            continue
        if slate.size == 2:
            u, v = int(slate[0]), int(slate[1])
            wins = oracle.pair_win_count(u, v, q)
            counts = np.array([wins, q - wins], dtype=np.float64)
        else:
            counts = oracle.slate_win_counts(slate, q).astype(np.float64)
        out[tuple(int(x) for x in slate)] = counts / q
    return out


def ledger_report(ledger) -> dict:
    """Flatten a query ledger into a JSON-friendly summary."""
    return {
        "total": ledger.total,
        "max_per_pair": ledger.max_per_pair,
        "pairs_touched": len(ledger.per_pair),
        "per_size": {str(k): v for k, v in sorted(ledger.per_size.items())},
    }
