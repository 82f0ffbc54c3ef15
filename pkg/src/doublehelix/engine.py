"""Generational GA loop over double-strand chromosomes.

The loop monitors the population's mutated fraction once per generation and
stops at the first of: target fitness reached, fraction >= threshold, the
``ceil(3/p)`` hard cap, or a caller-supplied epoch override.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional

import numpy as np

from . import dynamics
from .helix import (
    DoubleHelixChromosome,
    Population,
    as_strand,
    crossover,
    mutate_bernoulli,
    new_chromosome,
    population_mutated_fraction,
)

log = logging.getLogger(__name__)

SELECTION_POLICIES = ("tournament", "proportional")


class ConfigError(ValueError):
    """Invalid configuration value; ``key`` names the offending setting."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 30
    chromosome_length: int = 20
    mutation_rate: float = 0.03
    crossover_rate: float = 0.9
    crossover_points: int = 1
    selection: str = "tournament"
    tournament_size: int = 2
    elitism_count: int = 1
    seed: int = 0
    max_epochs_override: Optional[int] = None
    workers: int = 1

    @property
    def n_bits(self) -> int:
        return self.population_size * self.chromosome_length

    @property
    def low_mutation_warning(self) -> bool:
        return self.mutation_rate < dynamics.min_mutation_rate(self.n_bits)



def validate_config(cfg: GAConfig) -> tuple[GAConfig, list[str]]:
    """Check every bound on ``cfg``.

    Raises :class:`ConfigError` naming the first bad field as ``ga.<field>``.
    Returns the config together with non-fatal warnings; a mutation rate below
    ``1/(M*N)`` is the only one at present.
    """

    def bad(name, msg):
        raise ConfigError(f"ga.{name}", msg)

    def check_int(name, lo, hi=None):
        value = getattr(cfg, name)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            bad(name, f"expected an integer, got {value!r}")
        if value < lo or (hi is not None and value > hi):
            rng = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
            bad(name, f"must be {rng}, got {value}")

    def check_prob(name):
        value = getattr(cfg, name)
        if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
            bad(name, f"must lie in [0, 1], got {value!r}")

    check_int("population_size", 2)
    check_int("chromosome_length", 1)
    check_prob("mutation_rate")
    check_prob("crossover_rate")
    check_int("crossover_points", 1)
    if cfg.selection not in SELECTION_POLICIES:
        bad("selection", f"must be one of {SELECTION_POLICIES}, got {cfg.selection!r}")
    check_int("tournament_size", 1)
    check_int("elitism_count", 0, cfg.population_size - 1)
    check_int("seed", 0, 2**64 - 1)
    if cfg.max_epochs_override is not None:
        check_int("max_epochs_override", 0)
    check_int("workers", 1)

    warnings = []
    if cfg.low_mutation_warning:
        limit = dynamics.min_mutation_rate(cfg.n_bits)
        warnings.append(
            f"mutation_rate {cfg.mutation_rate:g} is below the sensible minimum "
            f"1/(M*N) = 1/{cfg.n_bits} = {limit:.6g}"
        )
    return cfg, warnings


@dataclass(frozen=True)
class FitnessFunction:
    """Maps a visible strand to a score, higher being better.

    Must be deterministic and side-effect free; evaluations may run on several
    threads.
    """

    decoder: Callable[[np.ndarray], Any]
    score: Callable[[Any], float]
    target_fitness: Optional[float] = None
    name: str = "custom"
    n_bits: Optional[int] = None

    def __call__(self, visible: np.ndarray) -> float:
        return float(self.score(self.decoder(visible)))


def _decode_unsigned(strand: np.ndarray, bits: int, n_vars: int) -> np.ndarray:
    fields_ = np.asarray(strand, dtype=np.int64).reshape(n_vars, bits)
    weights = 1 << np.arange(bits - 1, -1, -1, dtype=np.int64)
    return fields_ @ weights


def affine_decoder(bits_per_variable: int, n_variables: int, lower: float, upper: float):
    """Decoder reading ``n_variables`` unsigned fields (MSB first) onto ``[lower, upper]``."""
    if bits_per_variable < 1 or bits_per_variable > 62:
        raise ValueError("bits_per_variable must be in [1, 62]")
    if n_variables < 1:
        raise ValueError("n_variables must be at least 1")
    if not upper > lower:
        raise ValueError("upper bound must exceed lower bound")
    scale = (upper - lower) / ((1 << bits_per_variable) - 1)

    def decode(strand):
        return lower + scale * _decode_unsigned(strand, bits_per_variable, n_variables)

    return decode


def _sphere(x):
    return float(np.sum(x * x))


def _rastrigin(x):
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


BUILTIN_FITNESS = ("onemax", "binary-sphere", "binary-rastrigin", "flat")


def builtin_fitness(
    name: str,
    bits_per_variable: int = 10,
    n_variables: int = 2,
    lower: float = -5.12,
    upper: float = 5.12,
    target_fitness: Optional[float] = None,
) -> FitnessFunction:
    """Return one of the bundled fitness functions.

    ``onemax`` counts 1-bits and ``flat`` scores everything 0 (no selection
    pressure). The continuous ones decode the strand as ``n_variables`` fields
    of ``bits_per_variable`` bits and score ``-f(x)``; more bits per variable
    means a finer grid.
    """
    if name == "onemax":
        return FitnessFunction(
            decoder=lambda s: s, score=lambda s: int(np.count_nonzero(s)),
            target_fitness=target_fitness, name=name,
        )
    if name == "flat":
        return FitnessFunction(
            decoder=lambda s: s, score=lambda s: 0.0, target_fitness=target_fitness, name=name
        )
    if name in ("binary-sphere", "binary-rastrigin"):
        f = _sphere if name == "binary-sphere" else _rastrigin
        return FitnessFunction(
            decoder=affine_decoder(bits_per_variable, n_variables, lower, upper),
            score=lambda x: -f(x),
            target_fitness=target_fitness,
            name=name,
            n_bits=bits_per_variable * n_variables,
        )
    raise ValueError(f"unknown fitness function {name!r}; choose from {BUILTIN_FITNESS}")


class StopReason(str, enum.Enum):
    TARGET_FITNESS = "target-fitness"
    FRACTION_THRESHOLD = "fraction-threshold"
    HARD_CAP = "hard-cap"
    OVERRIDE = "override"


@dataclass(frozen=True)
class StoppingPolicy:
    fraction_threshold: float = 0.5
    maturity_epoch: Optional[int] = None
    hard_cap_epoch: Optional[int] = None
    target_fitness: Optional[float] = None
    override_epoch: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.fraction_threshold <= 1.0:
            raise ValueError("fraction_threshold must lie in (0, 1]")
        if (
            self.maturity_epoch is not None
            and self.hard_cap_epoch is not None
            and self.maturity_epoch > self.hard_cap_epoch
        ):
            raise ValueError("maturity epoch cannot exceed the hard cap")

    @classmethod
    def for_config(cls, cfg: GAConfig, target_fitness: Optional[float] = None,
                   fraction_threshold: float = 0.5) -> "StoppingPolicy":
        p = cfg.mutation_rate
        return cls(
            fraction_threshold=fraction_threshold,
            maturity_epoch=dynamics.maturity_epoch(p) if p > 0 else None,
            hard_cap_epoch=dynamics.old_age_epoch(p) if p > 0 else None,
            target_fitness=target_fitness,
            override_epoch=cfg.max_epochs_override,
        )

    @property
    def epoch_limit(self) -> Optional[int]:
        caps = [c for c in (self.hard_cap_epoch, self.override_epoch) if c is not None]
        return min(caps) if caps else None

    def check(self, epoch: int, fraction: float, best_fitness: float) -> Optional[StopReason]:
        if self.target_fitness is not None and best_fitness >= self.target_fitness:
            return StopReason.TARGET_FITNESS
        if fraction >= self.fraction_threshold:
            return StopReason.FRACTION_THRESHOLD
        if self.hard_cap_epoch is not None and epoch >= self.hard_cap_epoch:
            return StopReason.HARD_CAP
        if self.override_epoch is not None and epoch >= self.override_epoch:
            return StopReason.OVERRIDE
        return None


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    fraction: float
    best_fitness: float
    mean_fitness: float
    evaluations: int


@dataclass
class AgingReport:
    records: list[EpochRecord]
    stop_reason: StopReason
    first_passage_epoch: Optional[int]
    fitness_evaluations: int
    evaluations_per_generation: int
    maturity_epoch: Optional[int]
    hard_cap_epoch: Optional[int]
    best_strand: np.ndarray
    best_fitness: float
    warnings: list[str] = field(default_factory=list)

    @property
    def final_epoch(self) -> int:
        return self.records[-1].epoch

    @property
    def post_init_evaluations(self) -> int:
        """Evaluations excluding the initial population's."""
        return self.fitness_evaluations - self.evaluations_per_generation

    @property
    def fractions(self) -> np.ndarray:
        return np.array([r.fraction for r in self.records])


def initialize_population(cfg: GAConfig, rng: np.random.Generator) -> Population:
    visible = rng.integers(0, 2, size=(cfg.population_size, cfg.chromosome_length), dtype=np.uint8)
    return Population.from_members((new_chromosome(v) for v in visible), epoch=0)


def evaluate(pop: Population, fitness: FitnessFunction, workers: int = 1) -> np.ndarray:
    strands = [pop.visible[i] for i in range(pop.size)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(fitness, strands))
    else:
        scores = [fitness(s) for s in strands]
    return np.asarray(scores, dtype=float)


def _rank(scores: np.ndarray) -> np.ndarray:
    # best first, lower index wins ties
    return np.lexsort((np.arange(scores.size), -scores))


def _select(scores: np.ndarray, cfg: GAConfig, rng: np.random.Generator) -> int:
    if cfg.selection == "tournament":
        entrants = rng.integers(0, scores.size, size=cfg.tournament_size).tolist()
        best = entrants[0]
        for i in entrants[1:]:
            if scores[i] > scores[best] or (scores[i] == scores[best] and i < best):
                best = i
        return best
    weights = scores - scores.min()
    total = weights.sum()
    if total <= 0:
        return int(rng.integers(0, scores.size))
    return int(rng.choice(scores.size, p=weights / total))


def step_generation(
    pop: Population,
    cfg: GAConfig,
    fitness: FitnessFunction,
    rng: np.random.Generator,
    scores: Optional[np.ndarray] = None,
) -> Population:
    """Produce the next generation.

    Elites are copied unmutated; the rest are bred from selected pairs,
    crossed with probability ``crossover_rate`` and mutated. ``scores`` may
    carry the fitness of ``pop`` from the previous call to avoid re-evaluating.
    """
    if pop.size != cfg.population_size or pop.chromosome_length != cfg.chromosome_length:
        raise ValueError("population shape does not match the configuration")
    if scores is None:
        scores = evaluate(pop, fitness, cfg.workers)
    members = pop.members
    m, n = cfg.population_size, cfg.chromosome_length

    # elites keep their original order, so elitism_count == M is an identity step
    elites = np.sort(_rank(scores)[: cfg.elitism_count])
    next_members: list[DoubleHelixChromosome] = [members[i] for i in elites]
    n_cuts = min(cfg.crossover_points, n - 1)
    children: list[DoubleHelixChromosome] = []
    while len(children) < m - cfg.elitism_count:
        a = members[_select(scores, cfg, rng)]
        b = members[_select(scores, cfg, rng)]
        if n_cuts > 0 and rng.random() < cfg.crossover_rate:
            cuts = np.sort(rng.permutation(n - 1)[:n_cuts] + 1)
            a, b = crossover(a, b, cuts)
        children.extend((a, b))
    children = children[: m - cfg.elitism_count]
    next_members.extend(mutate_bernoulli(c, cfg.mutation_rate, rng) for c in children)
    return Population.from_members(next_members, epoch=pop.epoch + 1)


@dataclass(frozen=True)
class GenerationState:
    population: Population
    scores: np.ndarray
    fraction: float
    evaluations: int


def generations(cfg: GAConfig, fitness: FitnessFunction) -> Iterator[GenerationState]:
    """Yield the evaluated population at epoch 0, 1, 2, ... without stopping."""
    validate_config(cfg)
    if fitness.n_bits is not None and fitness.n_bits != cfg.chromosome_length:
        raise ConfigError(
            "ga.chromosome_length",
            f"fitness {fitness.name!r} needs {fitness.n_bits} bits, got {cfg.chromosome_length}",
        )
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    pop = initialize_population(cfg, rng)
    scores = evaluate(pop, fitness, cfg.workers)
    evaluations = pop.size
    while True:
        yield GenerationState(pop, scores, population_mutated_fraction(pop), evaluations)
        pop = step_generation(pop, cfg, fitness, rng, scores)
        scores = evaluate(pop, fitness, cfg.workers)
        evaluations += pop.size


def run(
    cfg: GAConfig,
    fitness: FitnessFunction,
    policy: Optional[StoppingPolicy] = None,
) -> AgingReport:
    """Evolve until the stopping policy fires and report the aging trajectory."""
    _, warnings = validate_config(cfg)
    for w in warnings:
        log.warning(w)
    if policy is None:
        policy = StoppingPolicy.for_config(cfg, target_fitness=fitness.target_fitness)
    if policy.epoch_limit is None and policy.target_fitness is None:
        raise ConfigError(
            "ga.max_epochs_override",
            "mutation_rate = 0 gives no hard cap; set an override or a target fitness",
        )

    records: list[EpochRecord] = []
    first_passage = None
    best_strand, best_fitness = None, -math.inf
    for state in generations(cfg, fitness):
        epoch = state.population.epoch
        top = int(_rank(state.scores)[0])
        if state.scores[top] > best_fitness:
            best_fitness = float(state.scores[top])
            best_strand = as_strand(state.population.visible[top])
        records.append(EpochRecord(
            epoch=epoch,
            fraction=state.fraction,
            best_fitness=float(state.scores[top]),
            mean_fitness=float(state.scores.mean()),
            evaluations=state.evaluations,
        ))
        if first_passage is None and state.fraction >= policy.fraction_threshold:
            first_passage = epoch
        reason = policy.check(epoch, state.fraction, float(state.scores[top]))
        if reason is not None:
            break

    return AgingReport(
        records=records,
        stop_reason=reason,
        first_passage_epoch=first_passage,
        fitness_evaluations=records[-1].evaluations,
        evaluations_per_generation=cfg.population_size,
        maturity_epoch=policy.maturity_epoch,
        hard_cap_epoch=policy.hard_cap_epoch,
        best_strand=best_strand,
        best_fitness=best_fitness,
        warnings=warnings,
    )
