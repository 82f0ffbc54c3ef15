"""Genetic algorithms on double-strand chromosomes with aging-based stopping."""

from .dynamics import (
    ConvergenceClass,
    DynamicsConfig,
    SimulationResult,
    Trajectory,
    approx_fraction,
    classify,
    iterate,
    limit_of,
    maturity_epoch,
    min_mutation_rate,
    old_age_epoch,
    recurrence_step,
    simulate_flip_fraction,
)
from .engine import (
    AgingReport,
    ConfigError,
    FitnessFunction,
    GAConfig,
    StoppingPolicy,
    StopReason,
    builtin_fitness,
    initialize_population,
    run,
    step_generation,
    validate_config,
)
from .helix import (
    DoubleHelixChromosome,
    Population,
    crossover,
    effectively_mutated_count,
    mutate_bernoulli,
    mutate_locus,
    new_chromosome,
    population_mutated_fraction,
)
from .smallworld import (
    CoverResult,
    Hypercube,
    average_pairwise_distance,
    ga_cover,
    greedy_cover,
    hamming_distance,
    is_dominating,
    minimum_dominating_sets,
)

__version__ = "0.1.0"
