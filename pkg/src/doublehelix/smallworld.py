"""Hamming-space diagnostics and 1-covering subsets of the hypercube.

Vertices of the ``N``-cube are the integers ``0 .. 2**N - 1``; bit ``N-1-i``
of a vertex is locus ``i`` of the matching strand, so ``format(v, '0Nb')``
prints it locus 0 first. A subset *covers* (dominates) the cube when every
vertex is within Hamming distance 1 of some member.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import engine


class EnumerationCapError(ValueError):
    """Raised when an exhaustive search is asked for a dimension above its cap."""


@dataclass(frozen=True)
class Hypercube:
    dimension: int
    exhaustive_cap: int = 4
    search_cap: int = 20

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("hypercube dimension must be at least 1")

    @property
    def vertex_count(self) -> int:
        return 1 << self.dimension

    def check_vertex(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.vertex_count:
            raise ValueError(f"vertex {v} outside the {self.dimension}-cube")
        return v

    def bits(self, v: int) -> str:
        return format(v, f"0{self.dimension}b")


@dataclass(frozen=True)
class CoverResult:
    subset: tuple[int, ...]
    dimension: int
    is_cover: bool
    method: str
    optimal: bool = False

    @property
    def size(self) -> int:
        return len(self.subset)


def hamming_distance(a: int, b: int, cube: Optional[Hypercube] = None) -> int:
    if cube is not None:
        a, b = cube.check_vertex(a), cube.check_vertex(b)
    elif a < 0 or b < 0:
        raise ValueError("vertices must be non-negative")
    return (int(a) ^ int(b)).bit_count()


def average_pairwise_distance(sample: Sequence[int], dimension: Optional[int] = None) -> float:
    """Mean Hamming distance over all unordered pairs of ``sample``.

    Counted per bit position: a position with ``c`` ones among ``n`` samples
    contributes ``c * (n - c)`` differing pairs.
    """
    arr = np.asarray(sample, dtype=np.int64)
    n = arr.size
    if n < 2:
        raise ValueError("need at least two vertices to average pairwise distances")
    if (arr < 0).any():
        raise ValueError("vertices must be non-negative")
    if dimension is None:
        dimension = max(int(arr.max()).bit_length(), 1)
    elif (arr >= (1 << dimension)).any():
        raise ValueError(f"sample holds vertices outside the {dimension}-cube")
    ones = np.array([np.count_nonzero((arr >> i) & 1) for i in range(dimension)], dtype=np.int64)
    differing = int(np.sum(ones * (n - ones)))
    return differing / (n * (n - 1) / 2)


def closed_neighbourhood_mask(v: int, dimension: int) -> int:
    """Bitmask over vertices of ``v`` and its ``dimension`` neighbours."""
    mask = 1 << v
    for i in range(dimension):
        mask |= 1 << (v ^ (1 << i))
    return mask


def covered_count(subset: Iterable[int], cube: Hypercube) -> int:
    mask = 0
    for v in subset:
        mask |= closed_neighbourhood_mask(cube.check_vertex(v), cube.dimension)
    return mask.bit_count()


def is_dominating(subset: Sequence[int], cube: Hypercube) -> bool:
    if len(subset) == 0:
        raise ValueError("subset must be non-empty")
    return covered_count(subset, cube) == cube.vertex_count


def ball_volume_bound(cube: Hypercube) -> int:
    """Lower bound ``ceil(2**N / (N+1))`` on any cover's size."""
    return math.ceil(cube.vertex_count / (cube.dimension + 1))


def minimum_dominating_sets(cube: Hypercube) -> tuple[int, list[tuple[int, ...]]]:
    """Exact minimum cover size and every cover of that size.

    Subsets are enumerated by increasing size in lexicographic order.
    """
    if cube.dimension > cube.exhaustive_cap:
        raise EnumerationCapError(
            f"exhaustive search is capped at N = {cube.exhaustive_cap} "
            f"(asked for N = {cube.dimension}); use greedy_cover or ga_cover"
        )
    full = (1 << cube.vertex_count) - 1
    balls = [closed_neighbourhood_mask(v, cube.dimension) for v in range(cube.vertex_count)]
    for size in range(1, cube.vertex_count + 1):
        found = []
        for combo in itertools.combinations(range(cube.vertex_count), size):
            mask = 0
            for v in combo:
                mask |= balls[v]
            if mask == full:
                found.append(combo)
        if found:
            return size, found
    raise AssertionError("the whole vertex set always dominates")


def exhaustive_cover(cube: Hypercube) -> list[CoverResult]:
    _, sets = minimum_dominating_sets(cube)
    return [CoverResult(s, cube.dimension, True, "exhaustive", optimal=True) for s in sets]


def greedy_cover(cube: Hypercube) -> CoverResult:
    """Pick the vertex covering most uncovered vertices until done; ties go to the smaller vertex."""
    if cube.dimension > cube.search_cap:
        raise EnumerationCapError(f"greedy search is capped at N = {cube.search_cap}")
    n = cube.dimension
    count = cube.vertex_count
    flips = [1 << i for i in range(n)]
    covered = bytearray(count)
    gain = [n + 1] * count
    # gains only decrease, so stale heap entries overestimate and get re-pushed
    heap = [(-(n + 1), v) for v in range(count)]
    remaining = count
    chosen = []
    while remaining:
        neg, v = heapq.heappop(heap)
        if -neg != gain[v]:
            heapq.heappush(heap, (-gain[v], v))
            continue
        chosen.append(v)
        for u in [v] + [v ^ f for f in flips]:
            if covered[u]:
                continue
            covered[u] = 1
            remaining -= 1
            gain[u] -= 1
            for f in flips:
                gain[u ^ f] -= 1
    return CoverResult(tuple(chosen), n, is_dominating(chosen, cube), "greedy")


def decode_subset(strand: np.ndarray, k: int, dimension: int) -> list[int]:
    """Read ``k`` consecutive ``dimension``-bit fields, most significant bit first."""
    fields = np.asarray(strand, dtype=np.int64).reshape(k, dimension)
    weights = 1 << np.arange(dimension - 1, -1, -1, dtype=np.int64)
    return [int(v) for v in fields @ weights]


def cover_fitness(cube: Hypercube, k: int) -> engine.FitnessFunction:
    return engine.FitnessFunction(
        decoder=lambda s: decode_subset(s, k, cube.dimension),
        score=lambda vs: covered_count(vs, cube),
        target_fitness=cube.vertex_count,
        name="cover",
        n_bits=k * cube.dimension,
    )


def ga_cover(
    cube: Hypercube,
    k: int,
    cfg: Optional[engine.GAConfig] = None,
    seed: Optional[int] = None,
) -> tuple[CoverResult, engine.AgingReport]:
    """Search for a ``k``-element cover with the GA.

    A candidate is ``k`` concatenated vertex fields; its fitness is the number
    of covered vertices, with full coverage as the target. Duplicate vertices
    are allowed and simply waste coverage. ``cfg`` defaults to 20 members with
    one expected flip per chromosome per epoch; its chromosome length is
    overridden to ``k * N``.
    """
    if cube.dimension > cube.search_cap:
        raise EnumerationCapError(f"GA search is capped at N = {cube.search_cap}")
    if not 1 <= k <= cube.vertex_count:
        raise ValueError(f"subset size k must lie in [1, {cube.vertex_count}], got {k}")
    length = k * cube.dimension
    if cfg is None:
        cfg = engine.GAConfig(population_size=20, mutation_rate=1.0 / length, crossover_points=1)
    cfg = replace(cfg, chromosome_length=length)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    report = engine.run(cfg, cover_fitness(cube, k))
    subset = tuple(sorted(set(decode_subset(report.best_strand, k, cube.dimension))))
    result = CoverResult(subset, cube.dimension, is_dominating(subset, cube), "ga")
    return result, report
