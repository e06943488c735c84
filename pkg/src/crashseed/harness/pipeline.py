"""Analysis, model inference and search wired together, with on-disk artifacts."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

from ..analysis import collect_dynamic_sequences, collect_static_sequences, dump_sequences, merge
from ..behmodel import TransitionSystem, infer_models, model_stats
from ..search.ga import SearchConfig, SearchOutcome, run_search
from .bundle import ScenarioBundle

log = logging.getLogger(__name__)

MODEL_SUFFIX = ".model"
STATS_FILE = "model_stats.tsv"


def analyze(bundle: ScenarioBundle, step_limit: Optional[int] = None) -> dict:
    """Merged static and dynamic call sequences per class."""
    kwargs = {} if step_limit is None else {"step_limit": step_limit}
    static = collect_static_sequences(bundle.program)
    dynamic = collect_dynamic_sequences(bundle.program, bundle.tests, **kwargs)
    return merge(static, dynamic)


def infer_bundle_models(bundle: ScenarioBundle) -> dict:
    return infer_models(analyze(bundle))


def write_models(models: dict, out_dir) -> list:
    """One text file per class plus a stats table; returns the stats rows."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for cname in sorted(models):
        model = models[cname]
        (out / f"{cname}{MODEL_SUFFIX}").write_text(model.to_text(), encoding="utf-8")
        st = model_stats(model)
        rows.append((cname, st.states, st.transitions, st.bfs_height))
    table = "class\tstates\ttransitions\tbfs_height\n" + "".join(
        f"{c}\t{s}\t{t}\t{h}\n" for c, s, t, h in rows
    )
    (out / STATS_FILE).write_text(table, encoding="utf-8")
    return rows


def load_models(models_dir) -> dict:
    root = Path(models_dir)
    files = sorted(root.glob(f"*{MODEL_SUFFIX}"))
    if not files:
        raise FileNotFoundError(f"no model files in {root}")
    models = {}
    for p in files:
        m = TransitionSystem.from_text(p.read_text(encoding="utf-8"))
        models[m.class_name] = m
    return models


def reproduce(bundle: ScenarioBundle, config: SearchConfig, models: Optional[dict] = None) -> SearchOutcome:
    return run_search(bundle.program, bundle.tests, bundle.target, config, models)


def write_outcome(outcome: SearchOutcome, out_dir, scenario: str = "") -> dict:
    """Best test, search log, outcome JSON and a separate timing file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "outcome": out / "outcome.json",
        "log": out / "search.log",
        "timing": out / "timing.json",
    }
    payload = {"scenario": scenario, **outcome.to_dict()}
    paths["outcome"].write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["log"].write_text("gen\tbest\td_l\td_e\td_s\tevals\n" + outcome.log_text(), encoding="utf-8")
    paths["timing"].write_text(json.dumps({"wall_time_s": round(outcome.wall_time, 6)}) + "\n", encoding="utf-8")
    if outcome.best_test is not None:
        paths["best"] = out / "best.sut-test"
        test = outcome.best_test.copy()
        test.name = "reproduction" if outcome.reproduced else "best"
        paths["best"].write_text(test.to_text(), encoding="utf-8")
    return paths


def write_sequences(sequences: dict, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sequences.tsv"
    path.write_text(dump_sequences(sequences), encoding="utf-8")
    return path
