"""Double-strand chromosomes.

A chromosome carries a *visible* strand (decoded by the fitness function,
subject to mutation) and an *invisible* strand of the same length that starts
as the bitwise complement of the visible one. Mutation only ever touches the
visible strand; crossover swaps both strands at the same cut points. A locus
whose two strands agree has therefore been flipped an odd number of times,
which is what the aging counters below measure.

Strands are read-only 1-D ``uint8`` numpy arrays. Every operation returns new
values; nothing here mutates its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

StrandLike = Union[str, Sequence[int], np.ndarray]


def as_strand(bits: StrandLike) -> np.ndarray:
    """Coerce ``bits`` into a read-only ``uint8`` strand.

    Accepts a ``'0'/'1'`` string (locus 0 leftmost), a sequence of ints, or an
    array. Raises ``ValueError`` for empty input or anything other than 0/1.
    """
    if isinstance(bits, str):
        if not set(bits) <= {"0", "1"}:
            raise ValueError(f"strand string may only contain '0' and '1': {bits!r}")
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise ValueError(f"strand must be one-dimensional, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("strand elements must be 0 or 1")
        arr = arr.astype(np.uint8)
    if arr.size == 0:
        raise ValueError("strand must hold at least one bit")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def strand_to_str(strand: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in strand)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class DoubleHelixChromosome:
    visible: np.ndarray
    invisible: np.ndarray

    def __post_init__(self):
        if self.visible.shape != self.invisible.shape or self.visible.ndim != 1:
            raise ValueError("visible and invisible strands must have equal length")

    @property
    def length(self) -> int:
        return int(self.visible.shape[0])

    def __eq__(self, other):
        if not isinstance(other, DoubleHelixChromosome):
            return NotImplemented
        return bool(
            np.array_equal(self.visible, other.visible)
            and np.array_equal(self.invisible, other.invisible)
        )

    def __repr__(self):
        return (
            f"DoubleHelixChromosome(visible={strand_to_str(self.visible)!r}, "
            f"invisible={strand_to_str(self.invisible)!r})"
        )


def new_chromosome(visible: StrandLike) -> DoubleHelixChromosome:
    """Build a chromosome whose invisible strand is the complement of ``visible``."""
    vis = as_strand(visible)
    return DoubleHelixChromosome(vis, _frozen(1 - vis))


def mutate_locus(chrom: DoubleHelixChromosome, locus: int) -> DoubleHelixChromosome:
    if not 0 <= locus < chrom.length:
        raise IndexError(f"locus {locus} out of range for length {chrom.length}")
    vis = chrom.visible.copy()
    vis[locus] ^= 1
    return DoubleHelixChromosome(_frozen(vis), chrom.invisible)


def apply_flips(chrom: DoubleHelixChromosome, mask: np.ndarray) -> DoubleHelixChromosome:
    """Flip every visible locus where ``mask`` is true."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != chrom.visible.shape:
        raise ValueError("flip mask must match chromosome length")
    if not mask.any():
        return chrom
    return DoubleHelixChromosome(_frozen(chrom.visible ^ mask), chrom.invisible)


def mutate_bernoulli(
    chrom: DoubleHelixChromosome, p: float, rng: np.random.Generator
) -> DoubleHelixChromosome:
    """Flip each visible locus independently with probability ``p``.

    One uniform draw is consumed per locus regardless of ``p``, so the
    random stream stays aligned across different rates.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mutation probability must lie in [0, 1], got {p}")
    return apply_flips(chrom, rng.random(chrom.length) < p)


def _check_cut_points(cut_points: Sequence[int], length: int) -> list[int]:
    cuts = [int(c) for c in cut_points]
    for c in cuts:
        if not 1 <= c <= length - 1:
            raise ValueError(f"cut point {c} outside [1, {length - 1}]")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ValueError(f"cut points must be strictly increasing: {cuts}")
    return cuts


def crossover(
    a: DoubleHelixChromosome,
    b: DoubleHelixChromosome,
    cut_points: Sequence[int],
) -> tuple[DoubleHelixChromosome, DoubleHelixChromosome]:
    """Multi-point crossover applied identically to both strands.

    The first child takes ``a``'s segment before the first cut, ``b``'s up to
    the next cut, and so on; the second child takes the opposite segments.
    Each child locus therefore carries one parent's (visible, invisible) pair
    intact.
    """
    if a.length != b.length:
        raise ValueError(f"parent lengths differ: {a.length} != {b.length}")
    cuts = _check_cut_points(cut_points, a.length)
    # parity of the number of cuts at or before each locus
    swap = np.zeros(a.length, dtype=np.int64)
    swap[cuts] = 1
    from_b = (np.cumsum(swap) % 2).astype(bool)

    def pick(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return _frozen(np.where(from_b, y, x))

    child1 = DoubleHelixChromosome(pick(a.visible, b.visible), pick(a.invisible, b.invisible))
    child2 = DoubleHelixChromosome(pick(b.visible, a.visible), pick(b.invisible, a.invisible))
    return child1, child2


def effectively_mutated_count(chrom: DoubleHelixChromosome) -> int:
    """Number of loci at which the two strands agree."""
    return int(np.count_nonzero(chrom.visible == chrom.invisible))


@dataclass(frozen=True, eq=False)
class Population:
    """Fixed-size collection of equal-length chromosomes at a given epoch.

    Stored as two ``(M, N)`` matrices; ``members`` gives the per-chromosome
    view.
    """

    visible: np.ndarray
    invisible: np.ndarray
    epoch: int = 0

    def __post_init__(self):
        if self.visible.ndim != 2 or self.visible.shape != self.invisible.shape:
            raise ValueError("population strands must be equal-shape (M, N) matrices")
        if self.visible.shape[1] < 1:
            raise ValueError("chromosome length must be at least 1")
        if self.epoch < 0:
            raise ValueError("epoch must be non-negative")
        _frozen(self.visible)
        _frozen(self.invisible)

    @classmethod
    def from_members(cls, members: Iterable[DoubleHelixChromosome], epoch: int = 0) -> "Population":
        members = list(members)
        if not members:
            raise ValueError("cannot infer chromosome length from an empty member list")
        lengths = {m.length for m in members}
        if len(lengths) != 1:
            raise ValueError(f"members have differing lengths: {sorted(lengths)}")
        vis = np.stack([m.visible for m in members]).astype(np.uint8)
        inv = np.stack([m.invisible for m in members]).astype(np.uint8)
        return cls(vis, inv, epoch)

    @property
    def size(self) -> int:
        return int(self.visible.shape[0])

    @property
    def chromosome_length(self) -> int:
        return int(self.visible.shape[1])

    @property
    def n_bits(self) -> int:
        return self.size * self.chromosome_length

    @property
    def members(self) -> tuple[DoubleHelixChromosome, ...]:
        return tuple(
            DoubleHelixChromosome(_frozen(v.copy()), _frozen(i.copy()))
            for v, i in zip(self.visible, self.invisible)
        )

    def __getitem__(self, index: int) -> DoubleHelixChromosome:
        return DoubleHelixChromosome(
            _frozen(self.visible[index].copy()), _frozen(self.invisible[index].copy())
        )

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other):
        if not isinstance(other, Population):
            return NotImplemented
        return (
            self.epoch == other.epoch
            and np.array_equal(self.visible, other.visible)
            and np.array_equal(self.invisible, other.invisible)
        )


def population_mutated_fraction(pop: Population) -> float:
    """Share of all M*N loci whose strands agree."""
    if pop.size == 0:
        raise ValueError("mutated fraction is undefined for an empty population")
    return int(np.count_nonzero(pop.visible == pop.invisible)) / pop.n_bits
