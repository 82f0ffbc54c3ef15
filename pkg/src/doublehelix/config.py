"""``key = value`` configuration files.

Grammar, one setting per line::

    # comment
    ga.population_size = 30
    ga.mutation_rate = 0.03   # trailing comments are allowed

Keys are dotted and must appear in :data:`SCHEMA`. Values are parsed with
the key's type; ``none`` clears an optional integer. Later sources override
earlier ones: defaults, then scenario, then config file, then flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from .engine import ConfigError


def _optional_int(text: str) -> Optional[int]:
    return None if text.lower() == "none" else int(text)


def _optional_float(text: str) -> Optional[float]:
    return None if text.lower() == "none" else float(text)


# key -> (parser, default)
SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "seed": (int, 0),
    "ga.population_size": (int, 30),
    "ga.chromosome_length": (int, 20),
    "ga.mutation_rate": (float, 0.03),
    "ga.crossover_rate": (float, 0.9),
    "ga.crossover_points": (int, 1),
    "ga.selection": (str, "tournament"),
    "ga.tournament_size": (int, 2),
    "ga.elitism_count": (int, 1),
    "ga.max_epochs_override": (_optional_int, None),
    "ga.workers": (int, 1),
    "fitness.name": (str, "onemax"),
    "fitness.bits_per_variable": (int, 10),
    "fitness.n_variables": (int, 2),
    "fitness.lower": (float, -5.12),
    "fitness.upper": (float, 5.12),
    "fitness.target": (_optional_float, None),
    "dynamics.p": (float, 0.03),
    "dynamics.p0": (float, 0.0),
    "dynamics.epochs": (int, 200),
    "simulate.n_bits": (int, 600),
    "simulate.p": (float, 0.03),
    "simulate.epochs": (int, 400),
    "simulate.trials": (int, 1000),
    "simulate.threshold": (float, 0.5),
    "simulate.workers": (int, 1),
    "cover.dimension": (int, 3),
    "cover.method": (str, "exhaustive"),
    "cover.subset_size": (int, 2),
    "cover.exhaustive_cap": (int, 4),
    "cover.population_size": (int, 20),
    "cover.mutation_rate": (_optional_float, None),
}

SCENARIOS = ("paper-example",)


@dataclass
class Settings:
    values: dict[str, Any] = field(default_factory=lambda: {k: d for k, (_, d) in SCHEMA.items()})
    explicit: set[str] = field(default_factory=set)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def set(self, key: str, raw: str) -> None:
        if key not in SCHEMA:
            raise ConfigError(key, "unknown configuration key")
        parser, _ = SCHEMA[key]
        try:
            self.values[key] = parser(raw.strip())
        except ValueError:
            raise ConfigError(key, f"cannot parse {raw.strip()!r}") from None
        self.explicit.add(key)

    def update(self, pairs: Iterable[tuple[str, str]]) -> None:
        for key, raw in pairs:
            self.set(key, raw)


def parse_lines(lines: Iterable[str], source: str = "<config>") -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(key or f"{source}:{lineno}", f"{source}:{lineno}: expected 'key = value'")
        pairs.append((key, value))
    return pairs


def parse_assignment(text: str) -> tuple[str, str]:
    """Split a ``--set key=value`` flag."""
    pairs = parse_lines([text], source="--set")
    if len(pairs) != 1:
        raise ConfigError(text or "--set", "expected key=value")
    return pairs[0]


def read_config_file(path: Path) -> list[tuple[str, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    return parse_lines(text.splitlines(), source=str(path))


def read_scenario(name: str) -> list[tuple[str, str]]:
    if name not in SCENARIOS:
        raise ConfigError("--scenario", f"unknown scenario {name!r}; choose from {SCENARIOS}")
    text = resources.files("doublehelix").joinpath("scenarios", f"{name}.conf").read_text("utf-8")
    return parse_lines(text.splitlines(), source=f"scenario {name}")


def load_settings(
    config_path: Optional[Path] = None,
    scenario: Optional[str] = None,
    overrides: Iterable[tuple[str, str]] = (),
) -> Settings:
    settings = Settings()
    if scenario is not None:
        settings.update(read_scenario(scenario))
    if config_path is not None:
        settings.update(read_config_file(config_path))
    settings.update(overrides)
    return settings
