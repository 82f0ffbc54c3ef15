"""Command-line front end.

Subcommands ``run``, ``dynamics``, ``simulate`` and ``cover`` each write CSV
files into ``--out`` and print one ``key=value`` summary line. Exit codes:
0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import dynamics, engine, reports, smallworld
from .config import SCENARIOS, Settings, load_settings, parse_assignment
from .engine import ConfigError

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

# subcommand-specific flags and the key each one sets
FLAG_KEYS = {
    "run": {"p": "ga.mutation_rate", "epochs": "ga.max_epochs_override"},
    "dynamics": {"p": "dynamics.p", "epochs": "dynamics.epochs"},
    "simulate": {"p": "simulate.p", "epochs": "simulate.epochs", "trials": "simulate.trials"},
    "cover": {
        "dimension": "cover.dimension",
        "method": "cover.method",
        "subset_size": "cover.subset_size",
    },
}


def _fmt_opt(value) -> str:
    return "none" if value is None else str(value)


def _require(cond: bool, key: str, message: str) -> None:
    if not cond:
        raise ConfigError(key, message)


def _probability(settings: Settings, key: str) -> float:
    value = settings[key]
    _require(0.0 <= value <= 1.0, key, f"must lie in [0, 1], got {value}")
    return value


def ga_config(settings: Settings) -> engine.GAConfig:
    chromosome_length = settings["ga.chromosome_length"]
    name = settings["fitness.name"]
    if name in ("binary-sphere", "binary-rastrigin") and "ga.chromosome_length" not in settings.explicit:
        chromosome_length = settings["fitness.bits_per_variable"] * settings["fitness.n_variables"]
    cfg = engine.GAConfig(
        population_size=settings["ga.population_size"],
        chromosome_length=chromosome_length,
        mutation_rate=settings["ga.mutation_rate"],
        crossover_rate=settings["ga.crossover_rate"],
        crossover_points=settings["ga.crossover_points"],
        selection=settings["ga.selection"],
        tournament_size=settings["ga.tournament_size"],
        elitism_count=settings["ga.elitism_count"],
        seed=settings["seed"],
        max_epochs_override=settings["ga.max_epochs_override"],
        workers=settings["ga.workers"],
    )
    cfg, _ = engine.validate_config(cfg)
    return cfg


def fitness_function(settings: Settings) -> engine.FitnessFunction:
    name = settings["fitness.name"]
    _require(name in engine.BUILTIN_FITNESS, "fitness.name",
             f"unknown fitness {name!r}; choose from {engine.BUILTIN_FITNESS}")
    try:
        return engine.builtin_fitness(
            name,
            bits_per_variable=settings["fitness.bits_per_variable"],
            n_variables=settings["fitness.n_variables"],
            lower=settings["fitness.lower"],
            upper=settings["fitness.upper"],
            target_fitness=settings["fitness.target"],
        )
    except ValueError as exc:
        raise ConfigError("fitness", str(exc)) from None


def cmd_run(settings: Settings, out: Path) -> str:
    cfg = ga_config(settings)
    fitness = fitness_function(settings)
    report = engine.run(cfg, fitness)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    reports.write_run(report, out)
    min_rate = dynamics.min_mutation_rate(cfg.n_bits)
    return (
        f"stop_reason={report.stop_reason.value} epochs={report.final_epoch} "
        f"first_passage={_fmt_opt(report.first_passage_epoch)} "
        f"maturity={_fmt_opt(report.maturity_epoch)} hard_cap={_fmt_opt(report.hard_cap_epoch)} "
        f"min_rate≈{min_rate:.2g} min_rate_exact={min_rate:.6g} "
        f"evaluations={report.fitness_evaluations} "
        f"post_init_evaluations={report.post_init_evaluations} "
        f"best_fitness={report.best_fitness:g}"
    )


def cmd_dynamics(settings: Settings, out: Path) -> str:
    p = _probability(settings, "dynamics.p")
    p0 = _probability(settings, "dynamics.p0")
    epochs = settings["dynamics.epochs"]
    _require(epochs >= 0, "dynamics.epochs", "must be non-negative")
    config = dynamics.DynamicsConfig(p, p0)
    trajectory = dynamics.iterate(config, epochs)
    reports.write_dynamics(trajectory, out)
    limit = dynamics.limit_of(config)
    maturity = dynamics.maturity_epoch(p) if p > 0 else None
    cap = dynamics.old_age_epoch(p) if p > 0 else None
    return (
        f"p={p:g} limit={'no-limit' if limit is None else f'{limit:g}'} "
        f"class={dynamics.classify(config).value} maturity={_fmt_opt(maturity)} "
        f"hard_cap={_fmt_opt(cap)} p_final={trajectory.values[-1]:.6g}"
    )


def first_passage_summary(result: dynamics.SimulationResult) -> str:
    quartiles = result.first_passage_quantiles()
    passed = f"passed={result.passed.size}/{result.trials}"
    if quartiles is None:
        return f"median_first_passage=none {passed}"
    q1, med, q3 = (int(q) if q < np.iinfo(np.int64).max else None for q in quartiles)
    text = f"median_first_passage={med} q1={q1} q3={_fmt_opt(q3)} {passed}"
    if result.p > 0:
        lo, hi = math.floor(5 / (2 * result.p)), math.ceil(6 / (2 * result.p))
        overlap = q3 is None or (q1 <= hi and q3 >= lo)
        text += f" maturity_x5_6={lo}-{hi} iqr_overlap={'yes' if overlap else 'no'}"
        if not overlap:
            text += " note=observed-first-passage-IQR-misses-5-6x-maturity-window"
    return text


def cmd_simulate(settings: Settings, out: Path) -> str:
    p = _probability(settings, "simulate.p")
    n_bits, epochs, trials = (settings[k] for k in ("simulate.n_bits", "simulate.epochs", "simulate.trials"))
    _require(n_bits >= 1, "simulate.n_bits", "must be at least 1")
    _require(epochs >= 0, "simulate.epochs", "must be non-negative")
    _require(trials >= 1, "simulate.trials", "must be at least 1")
    threshold = settings["simulate.threshold"]
    _require(0.0 < threshold <= 1.0, "simulate.threshold", "must lie in (0, 1]")
    _require(settings["simulate.workers"] >= 1, "simulate.workers", "must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence(settings["seed"]))
    result = dynamics.simulate_flip_fraction(
        n_bits, p, epochs, trials, rng, threshold=threshold, workers=settings["simulate.workers"]
    )
    reports.write_simulation(result, out)
    return f"n_bits={n_bits} p={p:g} epochs={epochs} trials={trials} " + first_passage_summary(result)


def cmd_cover(settings: Settings, out: Path) -> str:
    n = settings["cover.dimension"]
    method = settings["cover.method"]
    _require(n >= 1, "cover.dimension", "must be at least 1")
    _require(method in ("exhaustive", "greedy", "ga"), "cover.method",
             f"must be exhaustive, greedy or ga, got {method!r}")
    cube = smallworld.Hypercube(n, exhaustive_cap=settings["cover.exhaustive_cap"])
    if method == "exhaustive":
        results = smallworld.exhaustive_cover(cube)
    elif method == "greedy":
        results = [smallworld.greedy_cover(cube)]
    else:
        k = settings["cover.subset_size"]
        _require(1 <= k <= cube.vertex_count, "cover.subset_size",
                 f"must lie in [1, {cube.vertex_count}], got {k}")
        rate = settings["cover.mutation_rate"]
        cfg = engine.GAConfig(
            population_size=settings["cover.population_size"],
            chromosome_length=k * n,
            mutation_rate=1.0 / (k * n) if rate is None else rate,
            seed=settings["seed"],
            workers=settings["ga.workers"],
        )
        engine.validate_config(cfg)
        result, _ = smallworld.ga_cover(cube, k, cfg)
        results = [result]
    reports.write_covers(results, out)
    best = results[0]
    return (
        f"method={method} dimension={n} size={best.size} is_cover={str(best.is_cover).lower()} "
        f"optimal={str(best.optimal).lower()} sets={len(results)} "
        f"vertices={reports.format_vertices(best.subset, n)}"
    )


COMMANDS = {"run": cmd_run, "dynamics": cmd_dynamics, "simulate": cmd_simulate, "cover": cmd_cover}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    common.add_argument("--seed", type=int, help="master random seed")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one configuration key (repeatable)")
    common.add_argument("--scenario", choices=SCENARIOS, help="load a bundled scenario")

    parser = argparse.ArgumentParser(prog="doublehelix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="evolve a population and track its aging")
    run.add_argument("--p", type=float, help="mutation rate per bit per epoch")
    run.add_argument("--epochs", type=int, help="epoch override cap")
    dyn = sub.add_parser("dynamics", parents=[common], help="tabulate the flip recurrence")
    dyn.add_argument("--p", type=float)
    dyn.add_argument("--epochs", type=int)
    sim = sub.add_parser("simulate", parents=[common], help="Monte-Carlo flip-fraction trials")
    sim.add_argument("--p", type=float)
    sim.add_argument("--epochs", type=int)
    sim.add_argument("--trials", type=int)
    cov = sub.add_parser("cover", parents=[common], help="search 1-covering subsets of the hypercube")
    cov.add_argument("--dimension", type=int)
    cov.add_argument("--method", choices=("exhaustive", "greedy", "ga"))
    cov.add_argument("--subset-size", type=int)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = [parse_assignment(text) for text in args.overrides]
        if args.seed is not None:
            overrides.append(("seed", str(args.seed)))
        for flag, key in FLAG_KEYS[args.command].items():
            value = getattr(args, flag)
            if value is not None:
                overrides.append((key, str(value)))
        settings = load_settings(args.config, args.scenario, overrides)
        _require(0 <= settings["seed"] < 2**64, "seed", "must be an unsigned 64-bit integer")
        summary = COMMANDS[args.command](settings, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
