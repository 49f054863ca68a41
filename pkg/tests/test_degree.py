import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratelessrelay.degree import (
    DegenerateDistribution,
    DegreeDistribution,
    InvalidDistributionParameters,
    NoSolution,
    first_stage_length,
    ideal_soliton,
    optimal_memory_order,
    robust_soliton,
    sample_degree,
)

from oracles import robust_soliton_mp

# frozen from robust_soliton_mp(256, 0.03, 0.5) at 40 digits
RSD256_P1 = 0.014451050272168018
RSD256_P2 = 0.46849901747933275
RSD256_N = 531


@pytest.fixture(scope="module")
def rsd256():
    return robust_soliton(256, 0.03, 0.5)


def test_ideal_soliton_values():
    assert ideal_soliton(2).pmf == pytest.approx((0.5, 0.5), abs=1e-15)
    assert ideal_soliton(4).prob(2) == pytest.approx(0.5, abs=1e-15)
    assert ideal_soliton(256).prob(1) == pytest.approx(0.00390625, abs=1e-15)
    d = ideal_soliton(10)
    for deg in range(2, 11):
        assert d.prob(deg) == pytest.approx(1 / (deg * (deg - 1)), rel=1e-12)


@pytest.mark.parametrize("k", [0, 1, -3])
def test_ideal_soliton_rejects_small_k(k):
    with pytest.raises(InvalidDistributionParameters):
        ideal_soliton(k)


def test_robust_soliton_matches_arbitrary_precision(rsd256):
    ref, R, beta = robust_soliton_mp(256, 0.03, 0.5)
    assert float(R) == pytest.approx(2.994, abs=1e-3)
    assert float(beta) == pytest.approx(1.0797, abs=1e-4)
    assert beta > 1
    for d in range(1, 257):
        assert rsd256.prob(d) == pytest.approx(float(ref[d]), rel=1e-12, abs=1e-16)
    assert rsd256.prob(1) == pytest.approx(RSD256_P1, rel=1e-12)
    assert rsd256.prob(2) == pytest.approx(RSD256_P2, rel=1e-12)
    assert rsd256.prob(2) == pytest.approx(0.4688, abs=0.001)
    assert rsd256.prob(1) + rsd256.prob(2) == pytest.approx(0.483, abs=0.002)
    assert math.fsum(rsd256.pmf) == pytest.approx(1.0, abs=1e-12)


def test_robust_soliton_spike_location(rsd256):
    # ceil(256 / 2.994) = 86 carries the spike
    assert rsd256.prob(86) > rsd256.prob(85) * 10
    assert rsd256.prob(87) < rsd256.prob(86) / 10


@pytest.mark.parametrize(
    "k, c, delta",
    [(1, 0.03, 0.5), (256, 0.0, 0.5), (256, -1, 0.5), (256, 0.03, 0.0), (256, 0.03, 1.0), (8, 0.03, 0.5)],
)
def test_robust_soliton_rejects_bad_parameters(k, c, delta):
    with pytest.raises(InvalidDistributionParameters):
        robust_soliton(k, c, delta)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(2, 600), c=st.floats(0.01, 1.0), delta=st.floats(0.01, 0.99))
def test_pmf_is_distribution(k, c, delta):
    try:
        dist = robust_soliton(k, c, delta)
    except InvalidDistributionParameters:
        return
    assert all(p >= 0 for p in dist.pmf)
    assert math.fsum(dist.pmf) == pytest.approx(1.0, abs=1e-12)
    assert all(a <= b for a, b in zip(dist.cdf, dist.cdf[1:]))
    assert dist.cdf[-1] == pytest.approx(1.0, abs=1e-12)


def test_from_pmf_validation():
    with pytest.raises(InvalidDistributionParameters):
        DegreeDistribution.from_pmf([0.5, 0.6])
    with pytest.raises(InvalidDistributionParameters):
        DegreeDistribution.from_pmf([1.5, -0.5])
    with pytest.raises(InvalidDistributionParameters):
        DegreeDistribution.from_pmf([])


def test_sample_point_mass(rng):
    dist = DegreeDistribution.from_pmf([0, 0, 1.0, 0])
    assert {sample_degree(dist, rng) for _ in range(1000)} == {3}


def test_sample_uses_one_draw_per_degree():
    dist = ideal_soliton(16)
    a, b = random.Random(7), random.Random(7)
    for _ in range(100):
        sample_degree(dist, a)
        b.random()
    assert a.random() == b.random()


def test_sample_ideal_soliton_k2(rng):
    n = 1_000_000
    ones = sum(sample_degree(ideal_soliton(2), rng) == 1 for _ in range(n))
    assert ones / n == pytest.approx(0.5, abs=0.003)


def test_sample_frequencies_match_rsd(rsd256, rng):
    n = 1_000_000
    counts = Counter(sample_degree(rsd256, rng) for _ in range(n))
    assert counts[2] / n == pytest.approx(0.469, abs=0.003)
    for d, p in enumerate(rsd256.pmf, start=1):
        if p > 0.01:
            assert abs(counts[d] / n - p) < 0.005, d


def test_sampling_reproducible(rsd256):
    ra, rb = random.Random(5), random.Random(5)
    assert [sample_degree(rsd256, ra) for _ in range(500)] == [sample_degree(rsd256, rb) for _ in range(500)]


def test_first_stage_length(rsd256):
    assert first_stage_length(rsd256) == RSD256_N
    assert first_stage_length(DegreeDistribution.from_pmf([1.0] + [0.0] * 99)) == 100
    assert first_stage_length(DegreeDistribution.from_pmf([0.25, 0.25, 0.5] + [0.0] * 97)) == 200


def test_first_stage_length_is_minimal(rsd256):
    low = rsd256.prob(1) + rsd256.prob(2)
    n = first_stage_length(rsd256)
    assert n * low >= 256
    assert (n - 1) * low < 256


def test_first_stage_length_degenerate():
    with pytest.raises(DegenerateDistribution):
        first_stage_length(DegreeDistribution.from_pmf([0.0, 0.0, 1.0]))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=40).filter(lambda w: sum(w[:2]) > 1e-3))
def test_first_stage_length_bounds_property(weights):
    total = math.fsum(weights)
    dist = DegreeDistribution.from_pmf([w / total for w in weights])
    low = dist.prob(1) + dist.prob(2)
    n = first_stage_length(dist)
    assert n * low >= dist.k
    assert (n - 1) * low < dist.k


def test_optimal_memory_order(rsd256):
    assert optimal_memory_order(rsd256, RSD256_N) == 2
    # 530 * 0.48295 = 255.96 < 256, so two degrees are not enough at n = 530
    assert optimal_memory_order(rsd256, 530) == 3
    assert optimal_memory_order(DegreeDistribution.from_pmf([1.0, 0.0, 0.0]), 3) == 1
    with pytest.raises(NoSolution):
        optimal_memory_order(rsd256, 255)
    with pytest.raises(NoSolution):
        optimal_memory_order(DegreeDistribution.from_pmf([0.0, 0.0, 1.0]), 2)
