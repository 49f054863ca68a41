"""Output-degree distributions for LT-style encoders.

Distributions are immutable and indexed by degree ``d = 1..k``; ``pmf[d - 1]``
is the probability of degree ``d``.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate


class InvalidDistributionParameters(ValueError):
    """Raised when distribution parameters do not describe a valid pmf."""


class DegenerateDistribution(ValueError):
    """Raised when a distribution puts no mass on degrees 1 and 2."""


class NoSolution(ValueError):
    """Raised when no memory order satisfies the coverage inequality."""


@dataclass(frozen=True)
class DegreeDistribution:
    k: int
    pmf: tuple[float, ...]
    cdf: tuple[float, ...]

    @classmethod
    def from_pmf(cls, pmf, tol: float = 1e-12) -> "DegreeDistribution":
        """Build a distribution over degrees ``1..len(pmf)``.

        The pmf must be non-negative and sum to one within ``tol``; it is
        renormalized so the final cdf entry is exactly 1.
        """
        pmf = [float(p) for p in pmf]
        if not pmf:
            raise InvalidDistributionParameters("empty pmf")
        if any(p < 0 or math.isnan(p) for p in pmf):
            raise InvalidDistributionParameters("pmf entries must be non-negative")
        total = math.fsum(pmf)
        if abs(total - 1.0) > tol:
            raise InvalidDistributionParameters(f"pmf sums to {total!r}, not 1")
        pmf = [p / total for p in pmf]
        cdf = list(accumulate(pmf))
        # float accumulation can leave the last entry a hair below 1
        cdf[-1] = 1.0
        return cls(len(pmf), tuple(pmf), tuple(cdf))

    def prob(self, d: int) -> float:
        if 1 <= d <= self.k:
            return self.pmf[d - 1]
        return 0.0


def ideal_soliton(k: int) -> DegreeDistribution:
    if k < 2:
        raise InvalidDistributionParameters(f"ideal soliton needs k >= 2, got {k}")
    pmf = [1.0 / k] + [1.0 / (d * (d - 1)) for d in range(2, k + 1)]
    return DegreeDistribution.from_pmf(pmf)


def robust_soliton(k: int, c: float, delta: float) -> DegreeDistribution:
    """Luby's robust soliton distribution.

    ``R = c ln(k/delta) sqrt(k)``; the extra mass ``tau`` is ``R/(d k)`` below
    the spike at ``ceil(k/R)`` and ``R ln(R/delta)/k`` at the spike.
    """
    if k < 2:
        raise InvalidDistributionParameters(f"robust soliton needs k >= 2, got {k}")
    if not c > 0:
        raise InvalidDistributionParameters(f"c must be positive, got {c}")
    if not 0 < delta < 1:
        raise InvalidDistributionParameters(f"delta must lie in (0, 1), got {delta}")

    R = c * math.log(k / delta) * math.sqrt(k)
    spike = math.ceil(k / R)
    if spike > k:
        raise InvalidDistributionParameters(
            f"spike index ceil(k/R) = {spike} exceeds k = {k} (c={c}, delta={delta})"
        )
    spike_mass = R * math.log(R / delta) / k
    if spike_mass < 0:
        raise InvalidDistributionParameters(
            f"R = {R:.4g} < delta gives negative spike mass (c={c}, delta={delta})"
        )

    weights = [1.0 / k] + [1.0 / (d * (d - 1)) for d in range(2, k + 1)]
    for d in range(1, spike):
        weights[d - 1] += R / (d * k)
    weights[spike - 1] += spike_mass
    beta = math.fsum(weights)
    return DegreeDistribution.from_pmf([w / beta for w in weights])


def sample_degree(dist: DegreeDistribution, rng: random.Random) -> int:
    """Inverse-cdf sample; consumes exactly one uniform draw."""
    u = rng.random()
    return min(bisect_right(dist.cdf, u) + 1, dist.k)


def first_stage_length(dist: DegreeDistribution) -> int:
    """Smallest ``N`` with ``N * (pmf(1) + pmf(2)) >= k``."""
    low = dist.prob(1) + dist.prob(2)
    if low <= 0:
        raise DegenerateDistribution("pmf(1) + pmf(2) is zero")
    n = math.ceil(dist.k / low)
    # guard against ceil landing one off due to rounding in the division
    while (n - 1) * low >= dist.k:
        n -= 1
    while n * low < dist.k:
        n += 1
    return n


def optimal_memory_order(dist: DegreeDistribution, n: int) -> int:
    """Smallest ``i`` with ``n * sum(pmf[1..i]) >= k``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    for i, mass in enumerate(dist.cdf, start=1):
        if n * mass >= dist.k:
            return i
    raise NoSolution(f"n = {n} < k = {dist.k}: no memory order satisfies the bound")
