"""Repeated searches over scenarios, seeding modes and probability settings."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..search.ga import REPRODUCED, STATUSES, SearchConfig
from ..seeding import SeedingConfig
from .bundle import load_bundle
from .pipeline import reproduce
from .stats import majority_outcome, reproduction_ratio, vargha_delaney_a12

COLUMNS = (
    "kind", "scenario", "frame", "mode", "pick_init", "pick_mut", "clone", "rep", "seed",
    "status", "evaluations", "fitness", "d_l", "d_e", "d_s",
    "runs", "reproduction_ratio", "majority_outcome", "mean_evaluations", "a12_vs_baseline",
)
A12_NOTE = (
    "a12_vs_baseline = P(evaluations of this mode > evaluations of the baseline mode) "
    "+ P(equal)/2; runs that did not reproduce count as the full budget; "
    "values below 0.5 mean this mode needed fewer evaluations"
)


@dataclass(frozen=True)
class ProbabilitySetting:
    pick_init: float = 0.8
    pick_mut: float = 0.3
    clone: float = 0.2


@dataclass
class ExperimentReport:
    runs: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)
    baseline: str = "none"

    def rows(self) -> list:
        return self.runs + self.aggregates

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {A12_NOTE}\n")
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow({k: _fmt(row.get(k)) for k in COLUMNS})
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"baseline": self.baseline, "a12": A12_NOTE, "runs": self.runs, "aggregates": self.aggregates}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


_BUNDLES: dict = {}


def _bundle(path: str):
    if path not in _BUNDLES:
        _BUNDLES[path] = load_bundle(path)
    return _BUNDLES[path]


def _run_cell(cell: tuple) -> dict:
    path, mode, setting, rep, seed, budget, population = cell
    bundle = _bundle(path)
    overrides = dict(bundle.overrides)
    config = SearchConfig(
        population=population if population is not None else overrides.get("population", 100),
        budget=budget if budget is not None else overrides.get("budget", 62_328),
        max_test_length=overrides.get("max_test_length", 40),
        seeding=mode,
        seed=seed,
        seeding_config=SeedingConfig(setting.pick_init, setting.pick_mut, setting.clone),
    )
    out = reproduce(bundle, config)
    b = out.breakdown
    return {
        "kind": "run",
        "scenario": bundle.name,
        "frame": bundle.crash.target_frame_level,
        "mode": mode,
        "pick_init": setting.pick_init,
        "pick_mut": setting.pick_mut,
        "clone": setting.clone,
        "rep": rep,
        "seed": seed,
        "status": out.status,
        "evaluations": out.evaluations,
        "fitness": b.total,
        "d_l": b.d_l,
        "d_e": b.d_e,
        "d_s": b.d_s,
        "budget": config.budget,
    }


def run_experiment(
    bundle_paths: Sequence,
    modes: Sequence[str] = ("none", "test", "model"),
    repetitions: int = 30,
    seed_base: int = 0,
    settings: Optional[Sequence[ProbabilitySetting]] = None,
    budget: Optional[int] = None,
    population: Optional[int] = None,
    jobs: int = 1,
) -> ExperimentReport:
    """Runs every scenario x mode x setting x repetition; repetition i uses seed ``seed_base + i``."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if not modes:
        raise ValueError("at least one seeding mode is required")
    if not bundle_paths:
        raise ValueError("no scenarios given")
    settings = list(settings or [ProbabilitySetting()])
    cells = [
        (str(p), mode, st, rep, seed_base + rep, budget, population)
        for p in bundle_paths
        for mode in modes
        for st in settings
        for rep in range(repetitions)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_cell, cells))
    else:
        runs = [_run_cell(c) for c in cells]
    report = ExperimentReport(runs=runs, baseline=modes[0])
    report.aggregates = _aggregate(runs, modes[0])
    for r in report.runs:
        r.pop("budget", None)
    return report


def _needed(row: dict) -> int:
    return row["evaluations"] if row["status"] == REPRODUCED else row["budget"]


def _aggregate(runs: list, baseline: str) -> list:
    groups: dict = {}
    for r in runs:
        key = (r["scenario"], r["mode"], r["pick_init"], r["pick_mut"], r["clone"])
        groups.setdefault(key, []).append(r)
    out = []
    for key, rows in groups.items():
        scenario, mode, pi, pm, cl = key
        base = [r for r in runs if r["scenario"] == scenario and r["mode"] == baseline]
        statuses = [r["status"] for r in rows]
        out.append({
            "kind": "aggregate",
            "scenario": scenario,
            "frame": rows[0]["frame"],
            "mode": mode,
            "pick_init": pi,
            "pick_mut": pm,
            "clone": cl,
            "runs": len(rows),
            "reproduction_ratio": reproduction_ratio(statuses),
            "majority_outcome": majority_outcome(statuses, STATUSES),
            "mean_evaluations": sum(r["evaluations"] for r in rows) / len(rows),
            "a12_vs_baseline": vargha_delaney_a12([_needed(r) for r in rows], [_needed(r) for r in base]),
        })
    return out
