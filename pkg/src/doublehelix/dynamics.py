"""Bit-flip dynamics under per-epoch mutation.

A single bit flipped with probability ``p`` each epoch is 1 after ``k+1``
epochs with probability::

    p_{k+1} = (1 - 2p) * p_k + p

Iterating this recurrence is the exact reference used throughout the
package; no closed form is hardcoded. The exponential curve in
:func:`approx_fraction` and the epoch thresholds derived from it are checked
against the iteration in the tests.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

# slack for float noise before ceiling, e.g. 3/0.03 -> 100.00000000000001
_CEIL_EPS = 1e-9


def _check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class DynamicsConfig:
    p: float
    p0: float = 0.0

    def __post_init__(self):
        _check_probability(self.p, "p")
        _check_probability(self.p0, "p0")


class ConvergenceClass(str, enum.Enum):
    CONSTANT = "constant"
    MONOTONE_TO_HALF = "monotone-to-half"
    CONSTANT_AT_HALF = "constant-at-half"
    OSCILLATORY_TO_HALF = "oscillatory-to-half"
    PERIOD_TWO = "period-two"


@dataclass(frozen=True)
class Trajectory:
    values: np.ndarray
    config: DynamicsConfig

    @property
    def epochs(self) -> int:
        return len(self.values) - 1


def recurrence_step(p_k: float, p: float) -> float:
    p_k = _check_probability(p_k, "p_k")
    p = _check_probability(p, "p")
    # clamp guards the last ulp only
    return min(1.0, max(0.0, (1.0 - 2.0 * p) * p_k + p))


def iterate(config: DynamicsConfig, epochs: int) -> Trajectory:
    """Return ``p_0 .. p_K`` by repeated application of :func:`recurrence_step`."""
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    values = np.empty(epochs + 1)
    values[0] = current = config.p0
    for k in range(1, epochs + 1):
        current = recurrence_step(current, config.p)
        values[k] = current
    return Trajectory(values, config)


def limit_of(config: DynamicsConfig) -> Optional[float]:
    """Limit of the sequence, or ``None`` when it does not converge."""
    if config.p == 0.0:
        return config.p0
    if config.p == 1.0:
        return 0.5 if config.p0 == 0.5 else None
    return 0.5


def classify(config: DynamicsConfig) -> ConvergenceClass:
    p = config.p
    if p == 0.0:
        return ConvergenceClass.CONSTANT
    if p < 0.5:
        return ConvergenceClass.MONOTONE_TO_HALF
    if p == 0.5:
        return ConvergenceClass.CONSTANT_AT_HALF
    if p < 1.0:
        return ConvergenceClass.OSCILLATORY_TO_HALF
    return ConvergenceClass.PERIOD_TWO


def approx_fraction(k: float, p: float) -> float:
    """Smooth approximation ``(1 - exp(-2kp)) / 2`` of the flipped fraction."""
    if k < 0:
        raise ValueError("k must be non-negative")
    _check_probability(p, "p")
    return 0.5 * (1.0 - math.exp(-2.0 * k * p))


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_EPS)


def maturity_epoch(p: float) -> int:
    """Epoch ``ceil(1/(2p))`` after which the population counts as mature."""
    _check_probability(p, "p")
    if p == 0.0:
        raise ValueError("a population never matures without mutation (p = 0)")
    return _ceil(1.0 / (2.0 * p))


def old_age_epoch(p: float) -> int:
    """Hard generation cap ``ceil(3/p)``."""
    _check_probability(p, "p")
    if p == 0.0:
        raise ValueError("old-age epoch is undefined without mutation (p = 0)")
    return _ceil(3.0 / p)


def min_mutation_rate(n_bits: int) -> float:
    """Rate giving one expected flip per epoch across ``n_bits`` bits."""
    if n_bits < 1:
        raise ValueError("n_bits must be at least 1")
    return 1.0 / n_bits


@dataclass(frozen=True)
class SimulationResult:
    """Monte-Carlo flip-fraction statistics.

    ``first_passage`` holds, per trial, the first epoch whose fraction reached
    the threshold, or -1 if it never did within ``epochs``.
    """

    n_bits: int
    p: float
    epochs: int
    trials: int
    mean_fraction: np.ndarray
    std_fraction: np.ndarray
    first_passage: np.ndarray
    threshold: float = 0.5

    @property
    def passed(self) -> np.ndarray:
        return self.first_passage[self.first_passage >= 0]

    def first_passage_quantiles(self, qs=(0.25, 0.5, 0.75)) -> Optional[tuple[float, ...]]:
        """Quantiles over trials, treating "never" as later than any epoch.

        Returns ``None`` if fewer than half of the trials ever passed.
        """
        if self.passed.size * 2 < self.trials:
            return None
        fp = np.where(self.first_passage >= 0, self.first_passage, np.iinfo(np.int64).max)
        out = tuple(float(np.quantile(fp, q, method="lower")) for q in qs)
        return out

    def tolerance_band(self, sigmas: float = 3.0) -> np.ndarray:
        """``sigmas`` binomial standard errors of the mean around the exact curve."""
        exact = iterate(DynamicsConfig(self.p), self.epochs).values
        return sigmas * np.sqrt(exact * (1.0 - exact) / (self.n_bits * self.trials))


def _one_trial(rng: np.random.Generator, n_bits: int, p: float, epochs: int, threshold: float):
    flips = rng.random((epochs, n_bits)) < p
    # parity of accumulated flips per bit
    state = np.logical_xor.accumulate(flips, axis=0)
    fraction = np.empty(epochs + 1)
    fraction[0] = 0.0
    fraction[1:] = state.sum(axis=1) / n_bits
    hits = np.flatnonzero(fraction >= threshold)
    return fraction, int(hits[0]) if hits.size else -1


def simulate_flip_fraction(
    n_bits: int,
    p: float,
    epochs: int,
    trials: int,
    rng: np.random.Generator,
    threshold: float = 0.5,
    workers: int = 1,
) -> SimulationResult:
    """Simulate ``trials`` independent bit pools under pure Bernoulli(p) flipping.

    Each trial gets its own child stream spawned from ``rng`` and results are
    reduced in trial order, so the outcome does not depend on ``workers``.
    """
    if n_bits < 1:
        raise ValueError("n_bits must be at least 1")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    p = _check_probability(p, "p")

    streams = rng.spawn(trials)
    job = lambda g: _one_trial(g, n_bits, p, epochs, threshold)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, streams))
    else:
        results = [job(g) for g in streams]

    fractions = np.stack([r[0] for r in results])
    first = np.array([r[1] for r in results], dtype=np.int64)
    return SimulationResult(
        n_bits=n_bits,
        p=p,
        epochs=epochs,
        trials=trials,
        mean_fraction=fractions.mean(axis=0),
        std_fraction=fractions.std(axis=0),
        first_passage=first,
        threshold=threshold,
    )
