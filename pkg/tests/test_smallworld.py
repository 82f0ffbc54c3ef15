import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from doublehelix.engine import GAConfig
from doublehelix.smallworld import (
    EnumerationCapError,
    Hypercube,
    average_pairwise_distance,
    ball_volume_bound,
    decode_subset,
    ga_cover,
    greedy_cover,
    hamming_distance,
    is_dominating,
    minimum_dominating_sets,
)


def v(bits):
    return int(bits, 2)


def brute_force_minimum(n):
    """Minimum 1-covers of the n-cube via string Hamming distances."""
    words = [format(i, f"0{n}b") for i in range(2**n)]

    def dist(a, b):
        return sum(x != y for x, y in zip(a, b))

    for size in range(1, 2**n + 1):
        found = [
            combo
            for combo in itertools.combinations(range(2**n), size)
            if all(any(dist(words[u], words[c]) <= 1 for c in combo) for u in range(2**n))
        ]
        if found:
            return size, found


# N = 4 minimum, computed once by brute_force_minimum and frozen
N4_MINIMUM_SIZE = 4
N4_MINIMUM_COUNT = 40


@pytest.mark.parametrize(
    "a, b, d", [("000", "111", 3), ("0110", "0110", 0), ("0110", "0101", 2)]
)
def test_hamming_examples(a, b, d):
    assert hamming_distance(v(a), v(b), Hypercube(len(a))) == d


def test_hamming_rejects_out_of_range():
    with pytest.raises(ValueError):
        hamming_distance(8, 0, Hypercube(3))
    with pytest.raises(ValueError):
        hamming_distance(-1, 0)


@given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
def test_hamming_metric_axioms(a, b, c):
    cube = Hypercube(16)
    assert hamming_distance(a, b, cube) == hamming_distance(b, a, cube)
    assert (hamming_distance(a, b, cube) == 0) == (a == b)
    assert hamming_distance(a, c, cube) <= hamming_distance(a, b, cube) + hamming_distance(b, c, cube)
    assert hamming_distance(a, b, cube) <= 16


def test_average_pairwise_examples():
    assert average_pairwise_distance([v("000"), v("111")], 3) == 3.0
    with pytest.raises(ValueError):
        average_pairwise_distance([5])


@given(st.lists(st.integers(0, 255), min_size=2, max_size=30))
def test_average_pairwise_matches_pair_enumeration(sample):
    pairs = list(itertools.combinations(sample, 2))
    expected = sum(bin(a ^ b).count("1") for a, b in pairs) / len(pairs)
    assert average_pairwise_distance(sample, 8) == pytest.approx(expected)
    assert average_pairwise_distance(sample, 8) <= 8


def test_average_pairwise_uniform_sample():
    n, dim = 10_000, 16
    sample = np.random.default_rng(0).integers(0, 2**dim, size=n)
    # per bit, c(n-c) with c ~ Bin(n, 1/2) has sd sqrt(2) * n / 4
    sigma = math.sqrt(dim) * math.sqrt(2) * (n / 4) / (n * (n - 1) / 2)
    assert abs(average_pairwise_distance(sample, dim) - dim / 2) <= 3 * sigma


def test_average_pairwise_never_exceeds_dimension():
    sample = np.random.default_rng(1).integers(0, 2**20, size=500)
    assert average_pairwise_distance(sample, 20) <= 20 == math.log2(2**20)


def test_is_dominating_examples():
    assert is_dominating([v("000"), v("111")], Hypercube(3))
    assert not is_dominating([v("000")], Hypercube(3))
    assert is_dominating([v("00"), v("11")], Hypercube(2))
    assert is_dominating([v("01"), v("10")], Hypercube(2))
    with pytest.raises(ValueError):
        is_dominating([], Hypercube(2))


@pytest.mark.parametrize("n, size", [(1, 1), (2, 2), (3, 2)])
def test_minimum_dominating_sets_small(n, size):
    cube = Hypercube(n)
    got_size, sets = minimum_dominating_sets(cube)
    oracle_size, oracle_sets = brute_force_minimum(n)
    assert got_size == oracle_size == size
    assert sets == oracle_sets
    assert all(is_dominating(s, cube) for s in sets)
    # nothing smaller works
    for smaller in range(1, size):
        assert not any(is_dominating(c, cube) for c in itertools.combinations(range(2**n), smaller))


def test_minimum_sets_contain_the_known_examples():
    _, n3 = minimum_dominating_sets(Hypercube(3))
    assert (v("000"), v("111")) in n3
    _, n2 = minimum_dominating_sets(Hypercube(2))
    assert {(0, 3), (1, 2)} <= set(n2)
    # adjacent pairs also cover the 2-cube
    assert (v("00"), v("01")) in n2
    assert len(n2) == 6


def test_minimum_dominating_sets_n4_frozen():
    size, sets = minimum_dominating_sets(Hypercube(4))
    assert size == N4_MINIMUM_SIZE
    assert len(sets) == N4_MINIMUM_COUNT
    assert all(is_dominating(s, Hypercube(4)) for s in sets)


def test_n4_frozen_value_matches_brute_force():
    assert brute_force_minimum(4)[0] == N4_MINIMUM_SIZE
    assert len(brute_force_minimum(4)[1]) == N4_MINIMUM_COUNT


def test_exhaustive_cap():
    with pytest.raises(EnumerationCapError, match="greedy_cover or ga_cover"):
        minimum_dominating_sets(Hypercube(5))
    size, _ = minimum_dominating_sets(Hypercube(5, exhaustive_cap=5))
    assert size >= ball_volume_bound(Hypercube(5))


@pytest.mark.parametrize("n", range(1, 11))
def test_greedy_cover_bounds(n):
    cube = Hypercube(n)
    result = greedy_cover(cube)
    assert result.is_cover and is_dominating(result.subset, cube)
    assert ball_volume_bound(cube) <= result.size <= cube.vertex_count
    if n <= cube.exhaustive_cap:
        assert result.size >= minimum_dominating_sets(cube)[0]


def test_greedy_small_cases():
    assert greedy_cover(Hypercube(1)).size == 1
    r3 = greedy_cover(Hypercube(3))
    assert r3.size >= 2 and r3.method == "greedy" and not r3.optimal


def test_greedy_tie_break_prefers_smaller_vertex():
    assert greedy_cover(Hypercube(3)).subset[0] == 0


def test_decode_subset():
    assert decode_subset(np.array([0, 0, 0, 1, 1, 1]), 2, 3) == [0, 7]


def test_ga_cover_cannot_cover_with_one_vertex():
    cube = Hypercube(3)
    for seed in range(5):
        result, report = ga_cover(cube, 1, seed=seed)
        assert not result.is_cover
        assert report.best_fitness <= cube.dimension + 1


def test_ga_cover_result_is_sound():
    cube = Hypercube(3)
    result, report = ga_cover(cube, 2, seed=3)
    assert result.method == "ga" and not result.optimal
    assert result.is_cover == is_dominating(result.subset, cube)
    assert report.best_fitness == 8 or not result.is_cover


def test_ga_cover_rejects_bad_k():
    with pytest.raises(ValueError):
        ga_cover(Hypercube(3), 0)
    with pytest.raises(ValueError):
        ga_cover(Hypercube(3), 9)


def test_ga_cover_n4_success_rate_reported(capsys):
    cube = Hypercube(4)
    cfg = GAConfig(population_size=30, mutation_rate=1 / 16)
    hits = sum(ga_cover(cube, N4_MINIMUM_SIZE, cfg, seed=s)[0].is_cover for s in range(10))
    with capsys.disabled():
        print(f"\n[info] ga_cover N=4 k={N4_MINIMUM_SIZE}: {hits}/10 runs found a full cover")
