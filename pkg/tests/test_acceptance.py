"""Acceptance criteria 1-7, each recorded as one PASS/FAIL line in the summary."""

import itertools
import json
import random
import time

import pytest

from crashseed.behmodel import accepts, has_cycle, infer_model
from crashseed.harness import bundled_scenarios, load_bundle, run_experiment, vargha_delaney_a12
from crashseed.harness.cli import main
from crashseed.search import REPRODUCED, TestFactory
from crashseed.search.fitness import breakdown_for, trace_signature
from crashseed.seeding import jaccard_distance
from crashseed.behmodel import AbstractObjectBehavior
from crashseed.sutlang import Interpreter

RESULTS: dict = {}

SHOWCASES = ("test_proximity", "static_only")


def record(key, ok, detail):
    RESULTS[key] = (ok, detail)
    assert ok, detail


def test_criterion_1_fitness_contract():
    start = time.perf_counter()
    rng = random.Random(2024)
    total = violations = zeros = 0
    bundles = [load_bundle(p) for p in bundled_scenarios()]
    per_bundle = 1_100
    for b in bundles:
        target = b.target
        factory = TestFactory(b.program, target, rng, max_length=40, mutation_rate=0.2)
        interp = Interpreter(b.program)
        pool = []
        for i in range(per_bundle):
            if pool and i % 2:
                test = factory.mutate(rng.choice(pool))
            else:
                test = factory.initial_individual()
            if test is None:
                break  # target class cannot be built at all
            pool.append(test)
            pool = pool[-50:]
            res = interp.run(test)
            bd = breakdown_for(res, target)
            total += 1
            ok = 0.0 <= bd.total <= 6.0
            ok &= bd.d_l == 0 or bd.d_e == 1
            ok &= bd.d_e == 0 or bd.d_s == 1
            F = target.level
            emitted = (
                res.thrown is not None
                and trace_signature(res.thrown.exception_type, res.thrown.frames[:F])
                == trace_signature(target.exception_type, target.required_frames)
            )
            ok &= (bd.total == 0.0) == emitted
            zeros += bd.total == 0.0
            violations += not ok
    elapsed = time.perf_counter() - start
    record(1, total >= 10_000 and violations == 0 and elapsed < 60,
           f"{total} tests, {violations} violations, {zeros} reproducing, {elapsed:.1f}s")


def test_criterion_2_model_inference_oracle():
    rng = random.Random(7)
    failures = 0
    for _ in range(1000):
        corpus = [tuple(rng.choice("abcdefg") for _ in range(rng.randint(1, 8))) for _ in range(rng.randint(1, 10))]
        m = infer_model("C", corpus)
        failures += not all(accepts(m, s) for s in corpus)
        shuffled = corpus[:]
        rng.shuffle(shuffled)
        failures += infer_model("C", shuffled).to_text() != m.to_text()
    it = infer_model("It", [("hasNext", "next"), ("hasNext", "next", "hasNext", "next")])
    failures += not has_cycle(it)
    failures += not accepts(it, ("hasNext", "next") * 3)
    record(2, failures == 0, f"{failures} failures over 1000 corpora plus the iterator model")


def test_criterion_3_jaccard():
    rng = random.Random(3)

    def beh():
        return AbstractObjectBehavior("C", tuple(rng.choice("abcdefgh") for _ in range(rng.randint(1, 6))))

    bad = 0
    for _ in range(10_000):
        x, y, z = beh(), beh(), beh()
        d = jaccard_distance
        bad += d(x, y) != d(y, x)
        bad += d(x, x) != 0.0
        bad += d(x, z) > d(x, y) + d(y, z) + 1e-12
    B = lambda *a: AbstractObjectBehavior("C", a)  # noqa: E731
    worked = (
        jaccard_distance(B("m", "n"), B("m", "n")) == 0.0
        and jaccard_distance(B("m"), B("n")) == 1.0
        and jaccard_distance(B("a", "b"), B("b", "c")) == 1 - 1 / 3
    )
    record(3, bad == 0 and worked, f"{bad} property violations; worked values exact: {worked}")


def test_criterion_4_a12_oracle():
    rng = random.Random(5)
    worst = 0.0
    for _ in range(1000):
        a = [rng.randint(0, 30) for _ in range(rng.randint(1, 25))]
        b = [rng.randint(0, 30) for _ in range(rng.randint(1, 25))]
        brute = sum((x > y) + 0.5 * (x == y) for x, y in itertools.product(a, b)) / (len(a) * len(b))
        worst = max(worst, abs(vargha_delaney_a12(a, b) - brute),
                    abs(vargha_delaney_a12(a, b) + vargha_delaney_a12(b, a) - 1.0))
    record(4, worst <= 1e-12, f"max deviation {worst:.2e}")


def test_criterion_5_benchmark_differential():
    start = time.perf_counter()
    paths = bundled_scenarios()
    report = run_experiment(paths, ["none", "model"], 20, seed_base=0, budget=20_000, population=100)
    proximity = [p for p in paths if p.name == "test_proximity"]
    test_report = run_experiment(proximity, ["test"], 20, seed_base=0, budget=20_000, population=100)
    elapsed = time.perf_counter() - start

    agg = {(r["scenario"], r["mode"]): r for r in report.aggregates}
    names = sorted({s for s, _m in agg})
    count = {m: sum(agg[(s, m)]["majority_outcome"] == REPRODUCED for s in names) for m in ("none", "model")}
    showcase_ok = all(
        agg[(s, "model")]["reproduction_ratio"] >= 0.8 and agg[(s, "none")]["reproduction_ratio"] <= 0.2
        for s in SHOWCASES
    )
    not_started = [r["status"] for r in report.runs if r["scenario"] == "not_started" and r["mode"] == "none"]
    b_ok = len(not_started) == 20 and all(s == "not-started" for s in not_started)
    c_ratio = test_report.aggregates[0]["reproduction_ratio"]
    detail = (
        f"{len(names)} scenarios; reproduced (majority) none={count['none']} model={count['model']}; "
        + "; ".join(f"{s}: model {agg[(s, 'model')]['reproduction_ratio']:.2f} vs none "
                    f"{agg[(s, 'none')]['reproduction_ratio']:.2f}" for s in SHOWCASES)
        + f"; not-started {sum(s == 'not-started' for s in not_started)}/20; "
        f"test seeding on test_proximity {c_ratio:.2f}; {elapsed / 60:.1f} min"
    )
    ok = (
        len(names) >= 10
        and count["model"] >= count["none"]
        and showcase_ok
        and b_ok
        and c_ratio >= 0.8
        and elapsed < 30 * 60
    )
    record(5, ok, detail)


def test_criterion_6_determinism(tmp_path):
    path = [p for p in bundled_scenarios() if p.name == "null_depth2"][0]
    outs = []
    for d in ("r1", "r2"):
        main(["reproduce", str(path), "--seeding", "model", "--seed", "42", "--out", str(tmp_path / d)])
        outs.append((tmp_path / d / "outcome.json").read_bytes())
    csvs = []
    for d in ("e1", "e2"):
        main(["experiment", str(path), "--modes", "none,test,model", "--reps", "3", "--budget", "1000",
              "--seed", "42", "--out", str(tmp_path / d)])
        csvs.append((tmp_path / d / "report.csv").read_bytes())
    ok = outs[0] == outs[1] and csvs[0] == csvs[1]
    record(6, ok, f"outcome JSON identical: {outs[0] == outs[1]}; CSV identical: {csvs[0] == csvs[1]}")


def test_criterion_7_default_config(tmp_path):
    path = [p for p in bundled_scenarios() if p.name == "null_depth1"][0]
    main(["reproduce", str(path), "--out", str(tmp_path)])
    cfg = json.loads((tmp_path / "outcome.json").read_text())["config"]
    want = {"population": 100, "budget": 62_328, "pick_mut": 0.3, "concretizations": 1, "behavior_set_size": 100}
    got = {k: cfg[k] for k in want}
    record(7, got == want, f"echo {got}")
