"""Supervision-rate sweep harness.

Runs fit + evaluate over a grid of (supervision rate, seed) cells against
one dataset, recording topic coverage, matched similarity, resolved-topic
counts, and convergence statistics per cell.  Cells run independently and
a failing cell is recorded in its row without stopping the sweep.

Output files under the sweep directory:

    sweep.csv           one row per (rate, seed) cell, deterministic
    sweep_summary.csv   mean and stddev per rate over seeds
    sweep_timing.csv    wall time per cell (kept apart so sweep.csv is
                        byte-reproducible across runs)
    cells/rate_<r>/seed_<s>/   model and report artifacts per cell

All cell artifacts use the formats of the owning stages, so any cell can
be re-inspected with the evaluate and top-terms commands.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataio import Dataset, read_dataset
from .evaluation import TruthMatrix, score_report, write_report
from .factorization import FitConfig, fit, save_model
from .supervision import (
    build_error_weights,
    build_mask,
    sample_supervised_set,
    topic_coverage,
)

SWEEP_COLUMNS = (
    "rate",
    "seed",
    "status",
    "coverage",
    "mean_similarity",
    "resolved_count",
    "iterations",
    "final_loss",
)


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition plus fit and scoring parameters for one sweep."""

    data: str
    out: str
    rates: tuple[float, ...]
    seeds: tuple[int, ...]
    topics: int | None = None
    weighted: bool = False
    max_iter: int = 200
    rel_tol: float = 1e-4
    epsilon: float = 1e-9
    acol_q: int = 5
    threshold: float = 0.1

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seeds list must be non-empty")
        for r in self.rates:
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"supervision rate {r} outside [0, 1]")

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        raw = json.loads(Path(path).read_text())
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        for key in ("data", "out", "rates", "seeds"):
            if key not in raw:
                raise ValueError(f"sweep config missing required key {key!r}")
        if not Path(raw["data"]).is_dir():
            raise ValueError(f"sweep data directory not found: {raw['data']}")
        raw["rates"] = tuple(float(r) for r in raw["rates"])
        raw["seeds"] = tuple(int(s) for s in raw["seeds"])
        if raw.get("topics") is not None:
            raw["topics"] = int(raw["topics"])
        for key in ("max_iter", "acol_q"):
            if key in raw:
                raw[key] = int(raw[key])
        for key in ("rel_tol", "epsilon", "threshold"):
            if key in raw:
                raw[key] = float(raw[key])
        return cls(**raw)


@dataclass(frozen=True)
class SweepCell:
    """Result of one (rate, seed) cell; numeric fields are None on failure."""

    rate: float
    seed: int
    status: str
    coverage: float | None = None
    mean_similarity: float | None = None
    resolved_count: int | None = None
    iterations: int | None = None
    final_loss: float | None = None
    wall_time_s: float = 0.0


@dataclass(frozen=True)
class SweepResult:
    cells: tuple[SweepCell, ...]
    summary: dict = field(default_factory=dict)

    @property
    def all_failed(self) -> bool:
        return all(cell.status != "ok" for cell in self.cells)


def run_cell(
    dataset: Dataset,
    rate: float,
    seed: int,
    config: FitConfig,
    threshold: float,
    outdir=None,
) -> SweepCell:
    """Fit and score one supervision cell; optionally persist its artifacts."""
    start = time.perf_counter()
    n = dataset.n_docs
    table = dataset.label_table
    supervised = sample_supervised_set(n, rate, seed)
    # documents without labels cannot be supervised
    supervised = {i for i in supervised if table.doc_labels[i]}
    mask = build_mask(table, supervised, n, config.d)
    weights = build_error_weights(n, supervised).row_weight if config.weighted else None
    model, trace = fit(dataset.V, mask.matrix, config, row_weights=weights)
    coverage = topic_coverage(table, supervised)
    truth = TruthMatrix.from_label_table(table)
    report = score_report(model, truth, threshold=threshold, coverage=coverage)
    if outdir is not None:
        out = Path(outdir)
        save_model(out, model, trace, config)
        write_report(out, report, labels=table.labels)
        supervision_info = {
            "rate": rate,
            "seed": seed,
            "supervised_ids": sorted(dataset.doc_ids[i] for i in supervised),
        }
        (out / "supervision.json").write_text(
            json.dumps(supervision_info, indent=2, sort_keys=True) + "\n"
        )
    return SweepCell(
        rate=rate,
        seed=seed,
        status="ok",
        coverage=coverage,
        mean_similarity=report.mean_similarity,
        resolved_count=report.resolved_count,
        iterations=trace.iterations,
        final_loss=trace.final_loss,
        wall_time_s=time.perf_counter() - start,
    )


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Execute every (rate, seed) cell in order and write the sweep CSVs."""
    dataset = read_dataset(cfg.data)
    d = cfg.topics if cfg.topics is not None else dataset.label_table.n_labels
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    cells = []
    for rate in cfg.rates:
        for seed in cfg.seeds:
            cell_dir = out / "cells" / f"rate_{rate}" / f"seed_{seed}"
            config = FitConfig(
                d=d,
                max_iter=cfg.max_iter,
                rel_tol=cfg.rel_tol,
                epsilon=cfg.epsilon,
                seed=seed,
                weighted=cfg.weighted,
                acol_q=cfg.acol_q,
            )
            try:
                cell = run_cell(dataset, rate, seed, config, cfg.threshold, outdir=cell_dir)
            except Exception as exc:
                cell = SweepCell(rate=rate, seed=seed, status=f"error: {exc}")
            cells.append(cell)

    result = SweepResult(cells=tuple(cells), summary=_summarize(cells))
    _write_sweep_csv(out / "sweep.csv", cells)
    _write_summary_csv(out / "sweep_summary.csv", result.summary)
    _write_timing_csv(out / "sweep_timing.csv", cells)
    return result


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_sweep_csv(path, cells) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for c in cells:
            writer.writerow(
                _fmt(v)
                for v in (
                    c.rate,
                    c.seed,
                    c.status,
                    c.coverage,
                    c.mean_similarity,
                    c.resolved_count,
                    c.iterations,
                    c.final_loss,
                )
            )


def _summarize(cells) -> dict:
    """Per-rate mean and stddev (sample, ddof=1 when possible) over ok cells."""
    by_rate: dict[float, list[SweepCell]] = {}
    for c in cells:
        if c.status == "ok":
            by_rate.setdefault(c.rate, []).append(c)
    summary = {}
    for rate in sorted(by_rate):
        ok = by_rate[rate]
        sims = np.array([c.mean_similarity for c in ok])
        res = np.array([c.resolved_count for c in ok], dtype=np.float64)
        ddof = 1 if len(ok) > 1 else 0
        summary[rate] = {
            "n_ok": len(ok),
            "mean_similarity_mean": float(sims.mean()),
            "mean_similarity_std": float(sims.std(ddof=ddof)),
            "resolved_mean": float(res.mean()),
            "resolved_std": float(res.std(ddof=ddof)),
        }
    return summary


def _write_summary_csv(path, summary: dict) -> None:
    lines = [
        "rate,n_ok,mean_similarity_mean,mean_similarity_std,resolved_mean,resolved_std"
    ]
    for rate in sorted(summary):
        s = summary[rate]
        lines.append(
            ",".join(
                (
                    repr(rate),
                    str(s["n_ok"]),
                    repr(s["mean_similarity_mean"]),
                    repr(s["mean_similarity_std"]),
                    repr(s["resolved_mean"]),
                    repr(s["resolved_std"]),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def _write_timing_csv(path, cells) -> None:
    lines = ["rate,seed,wall_time_s"]
    for c in cells:
        lines.append(f"{c.rate!r},{c.seed},{c.wall_time_s!r}")
    Path(path).write_text("\n".join(lines) + "\n")
