"""CSV emitters for run, dynamics, simulation and cover results.

All files carry a header row, use ``.`` as decimal point and print floats with
``repr`` so they round-trip exactly. Missing values are written as ``none``.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .dynamics import SimulationResult, Trajectory, approx_fraction
from .engine import AgingReport
from .smallworld import CoverResult

RUN_COLUMNS = ("epoch", "fraction", "best_fitness", "mean_fitness", "evaluations")
RUN_SUMMARY_COLUMNS = (
    "stop_reason", "first_passage_epoch", "maturity_epoch", "hard_cap_epoch", "total_evaluations",
)
DYNAMICS_COLUMNS = ("epoch", "p_exact", "p_approx")
SIMULATION_COLUMNS = ("epoch", "mean_fraction", "std_fraction")
FIRST_PASSAGE_COLUMNS = ("trial", "first_passage_epoch")
COVER_COLUMNS = ("method", "dimension", "subset_size", "is_cover", "vertices")

NONE = "none"


def _fmt(value) -> str:
    if value is None:
        return NONE
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def read_csv(path: Path, expected: Sequence[str]) -> list[dict[str, str]]:
    """Read a CSV file and check its header is exactly ``expected``."""
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != tuple(expected):
            raise ValueError(f"{path}: header {reader.fieldnames} != {list(expected)}")
        return list(reader)


def parse_optional_int(text: str) -> Optional[int]:
    return None if text == NONE else int(text)


def write_run(report: AgingReport, out_dir: Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    epochs = _write(
        out_dir / "run_epochs.csv",
        RUN_COLUMNS,
        ((r.epoch, r.fraction, r.best_fitness, r.mean_fitness, r.evaluations) for r in report.records),
    )
    summary = _write(
        out_dir / "run_summary.csv",
        RUN_SUMMARY_COLUMNS,
        [(
            report.stop_reason.value,
            report.first_passage_epoch,
            report.maturity_epoch,
            report.hard_cap_epoch,
            report.fitness_evaluations,
        )],
    )
    return epochs, summary


def write_dynamics(trajectory: Trajectory, out_dir: Path) -> Path:
    p = trajectory.config.p
    return _write(
        Path(out_dir) / "dynamics.csv",
        DYNAMICS_COLUMNS,
        ((k, v, approx_fraction(k, p)) for k, v in enumerate(trajectory.values)),
    )


def write_simulation(result: SimulationResult, out_dir: Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    traj = _write(
        out_dir / "simulate_trajectory.csv",
        SIMULATION_COLUMNS,
        ((k, m, s) for k, (m, s) in enumerate(zip(result.mean_fraction, result.std_fraction))),
    )
    passage = _write(
        out_dir / "simulate_first_passage.csv",
        FIRST_PASSAGE_COLUMNS,
        ((t, int(fp) if fp >= 0 else None) for t, fp in enumerate(result.first_passage)),
    )
    return traj, passage


def format_vertices(subset: Sequence[int], dimension: int) -> str:
    return "|".join(format(v, f"0{dimension}b") for v in subset)


def parse_vertices(text: str) -> list[int]:
    return [int(bits, 2) for bits in text.split("|")] if text else []


def write_covers(results: Sequence[CoverResult], out_dir: Path) -> Path:
    return _write(
        Path(out_dir) / "cover.csv",
        COVER_COLUMNS,
        (
            (r.method, r.dimension, r.size, r.is_cover, format_vertices(r.subset, r.dimension))
            for r in results
        ),
    )
