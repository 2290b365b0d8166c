"""Approximate weight orderings and cluster graphs over the items.

An ``eps_o``-ordering is a permutation s_1 .. s_n such that whenever i < j,
(1 - eps_o) * w_{s_i} <= w_{s_j}: lighter items come first, up to slack.

A cluster graph groups the ordering into contiguous clusters, each with a
designated center, such that (for parameters A1, A2, eps):

* every member u of cluster i satisfies 1/A1 <= w_u / w_{c_i} <= A1,
* centers of later clusters dominate earlier ones, w_{c_i} / w_{c_j} >= A2
  for i > j,
* every non-center member carries a star edge holding a (1 +- eps)-accurate
  estimate of w_u / w_{c_i}, stored in log space so the reverse direction
  is its bit-exact negation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .primitives import RatioEstimate, estimate_ratio


@dataclass(frozen=True)
class Ordering:
    sequence: np.ndarray   # item ids, lightest first
    eps_o: float

    def __post_init__(self):
        seq = np.asarray(self.sequence, dtype=np.int64)
        if not np.array_equal(np.sort(seq), np.arange(seq.size)):
            raise ValueError("sequence must be a permutation of range(n)")
        object.__setattr__(self, "sequence", seq)


def _majority_heavier(oracle, x: int, pivot: int, k: int) -> bool:
    """True when x beats the pivot in a k-query majority vote; ties go to the pivot."""
    wins_x = oracle.pair_win_count(x, pivot, k)
    return 2 * wins_x > k


def epsilon_ordering(oracle, n: int, eps_o: float, delta: float,
                     rng: np.random.Generator | None = None) -> Ordering:
    """Sort items by weight using noisy pairwise majority votes.

    Randomized quicksort where each item-vs-pivot comparison is decided by
    a majority over k = ceil((18 / eps_o^2) ln(4 n^2 / delta)) pair queries,
    which suffices to order any pair whose weights differ by more than a
    (1 - eps_o) factor; closer pairs may land either way, which is exactly
    the slack an eps_o-ordering allows. Ties favor the pivot, i.e. the item
    is placed on the lighter side.
    """
    if not (0.0 < eps_o < 1.0):
        raise ValueError("eps_o must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0xC0FFEE)
    if n == 1:
        return Ordering(np.zeros(1, dtype=np.int64), eps_o)
    k = math.ceil((18.0 / (eps_o * eps_o)) * math.log(4.0 * n * n / delta))
    out: list[int] = []
    stack: list = [("sort", list(range(n)))]
    while stack:
        op, payload = stack.pop()
        if op == "emit":
            out.append(payload)
            continue
        items = payload
        if len(items) <= 1:
            out.extend(items)
            continue
        pivot = items[int(rng.integers(len(items)))]
        light, heavy = [], []
        for x in items:
            if x == pivot:
                continue
            (heavy if _majority_heavier(oracle, x, pivot, k) else light).append(x)
        stack.append(("sort", heavy))
        stack.append(("emit", pivot))
        stack.append(("sort", light))
    return Ordering(np.array(out, dtype=np.int64), eps_o)


@dataclass
class ClusterGraph:
    """Clusters of comparable items with centers and star-edge ratio estimates."""

    clusters: list          # list of int64 arrays, members in ordering position
    centers: np.ndarray     # centers[i] is the center of clusters[i]
    star_log: dict          # non-center member u -> log estimate of w_u / w_center
    gamma: np.ndarray       # gamma[u] = cluster index of item u
    a1: float
    a2: float
    eps: float
    violations: list = field(default_factory=list)

    @property
    def T(self) -> int:
        return len(self.clusters)

    @property
    def n(self) -> int:
        return self.gamma.size

    def log_star_ratio(self, u: int, v: int) -> float:
        """Log of the star-edge estimate of w_u / w_v; one of u, v is the center."""
        g = self.gamma[u]
        if g != self.gamma[v]:
            raise ValueError("star edges connect members of one cluster")
        c = int(self.centers[g])
        if v == c:
            return 0.0 if u == c else self.star_log[u]
        if u == c:
            return -self.star_log[v]
        raise ValueError("neither endpoint is the cluster center")

    def check_structure(self) -> None:
        n = self.n
        seen = np.concatenate([np.asarray(c) for c in self.clusters])
        if not np.array_equal(np.sort(seen), np.arange(n)):
            raise AssertionError("clusters must partition the items")
        for i, members in enumerate(self.clusters):
            if self.centers[i] not in members:
                raise AssertionError("center must belong to its cluster")
            for u in members:
                if self.gamma[u] != i:
                    raise AssertionError("gamma inconsistent with clusters")
                if u != self.centers[i] and int(u) not in self.star_log:
                    raise AssertionError("missing star edge for item {}".format(u))


def cluster_sort(oracle, alpha: float, eps: float, delta: float,
                 rng: np.random.Generator | None = None) -> ClusterGraph:
    """Cluster an approximate ordering by walking it with ratio estimates.

    First computes a 1/3-ordering at confidence delta/2, then scans it: each
    item is compared to the current cluster center with a ratio estimate at
    cutoff 2 alpha / 3 and confidence delta/(2n). When the estimated ratio
    exceeds tau = 3 (1 + eps) / (2 alpha), the current cluster is closed and
    the item starts a new one; otherwise the estimate becomes the item's
    star edge. Yields a (2/alpha, 1/alpha, eps)-cluster graph with
    probability 1 - delta.

    Requires eps in (0, 1/7). A zero ratio estimate against the current
    center contradicts the ordering guarantee; it is recorded in the
    graph's ``violations`` list (and a fallback edge at ratio alpha is
    used) rather than raised.
    """
    if not (0.0 < eps < 1.0 / 7.0):
        raise ValueError("eps must lie in (0, 1/7)")
    if not (0.0 < alpha <= 0.5):
        raise ValueError("alpha must lie in (0, 1/2]")
    n = oracle.n
    ordering = epsilon_ordering(oracle, n, 1.0 / 3.0, delta / 2.0, rng)
    seq = ordering.sequence
    log_tau = math.log(3.0 * (1.0 + eps) / (2.0 * alpha))

    clusters: list = []
    centers: list = []
    star_log: dict = {}
    violations: list = []
    center = int(seq[0])
    start = 0
    pending: dict = {}   # member -> log ratio vs the current center
    for pos in range(1, n):
        item = int(seq[pos])
        r = estimate_ratio(oracle, item, center, 2.0 * alpha / 3.0, eps,
                           delta / (2.0 * n))
        if r.exceeds(log_tau):
            clusters.append(np.array(seq[start:pos], dtype=np.int64))
            centers.append(center)
            star_log.update(pending)
            pending = {}
            center = item
            start = pos
        else:
            if r.is_zero:
                violations.append(("zero-ratio", item, center))
                r = RatioEstimate.finite(math.log(alpha))
            pending[item] = r.log_ratio
    clusters.append(np.array(seq[start:], dtype=np.int64))
    centers.append(center)
    star_log.update(pending)

    gamma = np.empty(n, dtype=np.int64)
    for i, members in enumerate(clusters):
        gamma[members] = i
    graph = ClusterGraph(clusters=clusters, centers=np.array(centers, dtype=np.int64),
                         star_log=star_log, gamma=gamma,
                         a1=2.0 / alpha, a2=1.0 / alpha, eps=eps,
                         violations=violations)
    graph.check_structure()
    return graph


def quicksort_clustering(oracle, alpha: float, eps: float, delta: float,
                         rng: np.random.Generator | None = None) -> ClusterGraph:
    """Cluster items by recursive pivoting, querying each pair at most once.

    A random pivot is ratio-estimated against every other item in its group
    at confidence delta/n^2. Finite estimates join the pivot's cluster (the
    estimate becomes the star edge), zero estimates (item much heavier) are
    recursed into the following clusters, infinite ones into the preceding
    clusters. Yields a (7/alpha, 1/alpha, eps)-cluster graph with
    probability 1 - delta, using an explicit stack rather than recursion.
    """
    if not (0.0 < alpha <= 0.5):
        raise ValueError("alpha must lie in (0, 1/2]")
    if rng is None:
        rng = np.random.default_rng(0xC0FFEE)
    n = oracle.n
    per_call_delta = delta / (n * n)

    clusters: list = []
    centers: list = []
    star_log: dict = {}
    stack: list = [("split", list(range(n)))]
    while stack:
        op, payload = stack.pop()
        if op == "emit":
            members, center, edges = payload
            clusters.append(np.array(members, dtype=np.int64))
            centers.append(center)
            star_log.update(edges)
            continue
        items = payload
        if not items:
            continue
        if len(items) == 1:
            clusters.append(np.array(items, dtype=np.int64))
            centers.append(items[0])
            continue
        pivot = items[int(rng.integers(len(items)))]
        members, edges = [pivot], {}
        lighter, heavier = [], []
        for s in items:
            if s == pivot:
                continue
            r = estimate_ratio(oracle, pivot, s, alpha, eps, per_call_delta)
            if r.is_finite:
                members.append(s)
                edges[s] = -r.log_ratio   # store w_s / w_pivot
            elif r.is_zero:
                heavier.append(s)
            else:
                lighter.append(s)
        stack.append(("split", heavier))
        stack.append(("emit", (sorted(members), pivot, edges)))
        stack.append(("split", lighter))
    gamma = np.empty(n, dtype=np.int64)
    for i, members in enumerate(clusters):
        gamma[members] = i
    graph = ClusterGraph(clusters=clusters, centers=np.array(centers, dtype=np.int64),
                         star_log=star_log, gamma=gamma,
                         a1=7.0 / alpha, a2=1.0 / alpha, eps=eps)
    graph.check_structure()
    return graph
