"""Pairwise estimation primitives built on the sampling oracle.

All weight-ratio arithmetic is done in the log domain. A ratio estimate is
one of three things: a finite value carried as its natural log, an exact
``zero`` sentinel (the first item is vastly lighter), or an exact
``infinite`` sentinel (the first item is vastly heavier). Reciprocation is
log negation, so ``r(i, j)`` and ``r(j, i)`` are bit-exact inverses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ZERO = "zero"
FINITE = "finite"
INFINITE = "infinite"


@dataclass(frozen=True)
class RatioEstimate:
    """Estimate of a weight ratio w_i / w_j; finite values live in log space."""

    kind: str
    log_ratio: float = 0.0

    def __post_init__(self):
        if self.kind not in (ZERO, FINITE, INFINITE):
            raise ValueError("bad ratio kind {!r}".format(self.kind))
        if self.kind == FINITE and not math.isfinite(self.log_ratio):
            raise ValueError("finite estimates need a finite log ratio")

    @staticmethod
    def zero() -> "RatioEstimate":
        return RatioEstimate(ZERO)

    @staticmethod
    def infinite() -> "RatioEstimate":
        return RatioEstimate(INFINITE)

    @staticmethod
    def finite(log_ratio: float) -> "RatioEstimate":
        return RatioEstimate(FINITE, float(log_ratio))

    @property
    def is_zero(self) -> bool:
        return self.kind == ZERO

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def is_infinite(self) -> bool:
        return self.kind == INFINITE

    def reciprocal(self) -> "RatioEstimate":
        if self.kind == ZERO:
            return RatioEstimate(INFINITE)
        if self.kind == INFINITE:
            return RatioEstimate(ZERO)
        return RatioEstimate(FINITE, -self.log_ratio)

    def exceeds(self, log_threshold: float) -> bool:
        """True when the estimate is strictly above exp(log_threshold)."""
        if self.kind == INFINITE:
            return True
        if self.kind == ZERO:
            return False
        return self.log_ratio > log_threshold

    def value(self) -> float:
        """The estimate as a plain float (0.0 / inf for the sentinels)."""
        if self.kind == ZERO:
            return 0.0
        if self.kind == INFINITE:
            return math.inf
        return math.exp(self.log_ratio)


def compare_sample_size(c: float, eps: float, delta: float) -> int:
    return math.ceil((20.0 / (c * eps * eps)) * math.log(6.0 / delta))


def compare(oracle, i: int, j: int, c: float, eps: float, delta: float):
    """Estimate both pair-win probabilities of {i, j}, zeroing tiny ones.

    Queries the pair exactly ceil((20 / (c eps^2)) ln(6/delta)) times and
    returns empirical frequencies (p_hat_i, p_hat_j), where a frequency
    below c/2 is snapped to exactly 0. With probability 1 - delta: a true
    probability <= c/4 comes back 0, a true probability >= c comes back
    nonzero, and any nonzero return is within a (1 +- eps) factor of truth.
    """
    if not (0.0 < c < 1.0):
        raise ValueError("c must lie in (0, 1)")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    m = compare_sample_size(c, eps, delta)
    wins_i = oracle.pair_win_count(i, j, m)
    p_i = wins_i / m
    p_j = (m - wins_i) / m
    if p_i < c / 2.0:
        p_i = 0.0
    if p_j < c / 2.0:
        p_j = 0.0
    return p_i, p_j


def estimate_ratio(oracle, i: int, j: int, alpha: float, eps: float,
                   delta: float) -> RatioEstimate:
    """Estimate w_i / w_j from pair queries alone.

    Uses :func:`compare` at accuracy eps/3 with cutoff c = alpha/(alpha+1).
    With probability 1 - delta the result is zero when the true ratio is
    at most alpha/(3 alpha + 4), infinite when it is at least its inverse,
    and otherwise a (1 +- eps)-accurate finite value. Zero and infinite
    returns are exact sentinels, never rounded floats.
    """
    if not (0.0 < alpha <= 0.5):
        raise ValueError("alpha must lie in (0, 1/2]")
    c = alpha / (alpha + 1.0)
    p_i, p_j = compare(oracle, i, j, c, eps / 3.0, delta)
    if p_i == 0.0:
        return RatioEstimate.zero()
    if p_j == 0.0:
        return RatioEstimate.infinite()
    return RatioEstimate.finite(math.log(p_i) - math.log(p_j))


def get_geometric(oracle, u: int, v: int) -> int:
    """Number of times u loses to v before its first win.

    The return value plus one is exactly the number of pair queries charged
    to {u, v}. The wait is capped at 1e9 queries; exceeding the cap raises
    ``GeometricCapExceeded``.
    """
    return oracle.sample_geometric(u, v)


@dataclass(frozen=True)
class BalancedEstimateParams:
    """Sample-shape of one balanced ratio estimate.

    M groups of N values are averaged and the lower median of the group
    means is taken; the underlying geometric waits are spread over the
    lighter cluster, at most xi per member.
    """

    M: int
    N: int
    xi: int

    @staticmethod
    def from_formulas(A1: float, A2: float, eps: float, alpha: float,
                      delta: float, cluster_size: int) -> "BalancedEstimateParams":
        """Worst-case sample shape; requires eps < 1/5."""
        if not (0.0 < eps < 0.2):
            raise ValueError("balanced ratio estimation requires eps < 1/5")
        b1 = max(2.0 * eps / (1.0 - eps - 0.75),
                 6.0 / (1.0 - eps),
                 24.0 * eps / (23.0 - 4.0 * eps))
        n_ae = b1 * b1 / (alpha * eps * eps)
        M = math.ceil(8.0 * math.log(2.0 / delta))
        N = math.ceil(2.0 * A1 * (1.0 + A1 / A2) * n_ae)
        xi = math.ceil(M * N / cluster_size)
        return BalancedEstimateParams(M=M, N=N, xi=xi)

    @staticmethod
    def calibrated(eps: float, alpha: float, delta: float, cluster_size: int,
                   m_mult: float, n_mult: float) -> "BalancedEstimateParams":
        """Budgeted sample shape; same scaling in alpha and eps, smaller leads."""
        if not (0.0 < eps < 0.2):
            raise ValueError("balanced ratio estimation requires eps < 1/5")
        M = max(3, math.ceil(m_mult * math.log(2.0 / delta)))
        N = math.ceil(n_mult * (1.0 / alpha + 1.0 / (eps * eps)))
        xi = math.ceil(M * N / cluster_size)
        return BalancedEstimateParams(M=M, N=N, xi=xi)


def balanced_estimate_ratio(oracle, graph, i: int, j: int, eps: float,
                            alpha: float, delta: float,
                            params: BalancedEstimateParams | None = None,
                            ) -> RatioEstimate:
    """Estimate w_{c_i} / w_{c_j} (i > j) while spreading queries over C_j.

    For each member s of cluster j, the product of the member-to-center
    ratio r(c_j, s) and a geometric wait of c_i against s is an unbiased
    estimate of w_{c_j} / w_{c_i}. The first M * N such values, taken round
    robin across the cluster so no member answers more than xi of them, are
    grouped into M means; Y is the lower median of the means. A value of
    Y <= (3/4) alpha reports the ratio as infinite, otherwise the estimate
    is 1 / Y. This primitive never reports zero.

    With the worst-case parameters (requiring eps < 1/5): a true ratio at
    most 1/alpha is never reported infinite, one of at least 9/alpha always
    is, and finite reports are within a (1 +- 10 eps) factor.
    """
    if not i > j:
        raise ValueError("need i > j (heavier cluster first)")
    members = graph.clusters[j]
    if params is None:
        params = BalancedEstimateParams.from_formulas(
            graph.a1, graph.a2, eps, alpha, delta, len(members))
    total = params.M * params.N
    size = len(members)
    c_i = int(graph.centers[i])
    c_j = int(graph.centers[j])

    # round-robin quotas: the first (total mod size) members in cluster
    # order contribute one extra value; every quota is <= xi
    base, extra = divmod(total, size)
    values = np.empty(total, dtype=np.float64)
    for idx, s in enumerate(members):
        quota = base + (1 if idx < extra else 0)
        if quota == 0:
            continue
        s = int(s)
        log_r_cj_s = 0.0 if s == c_j else -graph.star_log[s]
        losses = oracle.sample_geometric_block(c_i, s, quota)
        # interleave so each group of N mixes all members evenly
        values[idx::size][:quota] = math.exp(log_r_cj_s) * losses
    group_means = values.reshape(params.M, params.N).mean(axis=1)
    y = float(np.sort(group_means)[(params.M - 1) // 2])
    if y <= 0.75 * alpha:
        return RatioEstimate.infinite()
    return RatioEstimate.finite(-math.log(y))
