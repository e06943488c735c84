"""The guided genetic algorithm and its outcome classification."""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from ..analysis import TEST_SEEDING_UNAVAILABLE, collect_dynamic_sequences, collect_static_sequences, merge
from ..behmodel import infer_models
from ..seeding import (
    ObjectPool,
    SeedingConfig,
    TestPool,
    build_carved_pool,
    build_object_pool,
    build_test_pool,
)
from ..sutlang.interpreter import DEFAULT_STEP_LIMIT
from ..sutlang.stacktrace import format_stack_trace
from .fitness import WORST, CrashTarget, FitnessBreakdown, FitnessFunction
from .operators import CannotBuild, TestFactory

log = logging.getLogger(__name__)

SEEDING_MODES = ("none", "test", "model")

NOT_STARTED = "not-started"
LINE_NOT_REACHED = "line-not-reached"
LINE_REACHED = "line-reached"
EXCEPTION_THROWN = "exception-thrown"
REPRODUCED = "reproduced"
STATUSES = (NOT_STARTED, LINE_NOT_REACHED, LINE_REACHED, EXCEPTION_THROWN, REPRODUCED)


@dataclass
class SearchConfig:
    population: int = 100
    budget: int = 62_328
    max_test_length: int = 40
    tournament_size: int = 2
    elitism: int = 1
    mutation_rate: Optional[float] = None  # None: 1 / test length
    crossover_probability: float = 0.75
    seeding: str = "none"
    seeding_config: SeedingConfig = field(default_factory=SeedingConfig)
    seed: int = 0
    step_limit: int = DEFAULT_STEP_LIMIT
    max_init_attempts: int = 50
    check_invariants: bool = False

    def __post_init__(self) -> None:
        for name in ("population", "budget", "max_test_length", "tournament_size", "elitism", "max_init_attempts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.elitism > self.population:
            raise ValueError("elitism cannot exceed the population size")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ValueError("crossover_probability must be in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.seeding not in SEEDING_MODES:
            raise ValueError(f"seeding must be one of {', '.join(SEEDING_MODES)}")

    @property
    def behavior_set_size(self) -> int:
        return self.seeding_config.behaviors_per_model or self.population

    def echo(self) -> dict:
        """Effective configuration, defaults resolved."""
        sc = self.seeding_config
        return {
            "population": self.population,
            "budget": self.budget,
            "max_test_length": self.max_test_length,
            "tournament_size": self.tournament_size,
            "elitism": self.elitism,
            "mutation_rate": "1/length" if self.mutation_rate is None else self.mutation_rate,
            "crossover_probability": self.crossover_probability,
            "seeding": self.seeding,
            "pick_init": sc.pick_init,
            "pick_mut": sc.pick_mut,
            "clone": sc.clone,
            "concretizations": sc.concretizations,
            "behavior_set_size": self.behavior_set_size,
            "seed": self.seed,
        }


@dataclass
class Seeds:
    object_pool: ObjectPool = field(default_factory=ObjectPool)
    test_pool: TestPool = field(default_factory=TestPool)
    pick_init: float = 0.0
    pick_mut: float = 0.0
    clone: float = 0.0
    warnings: list = field(default_factory=list)


@dataclass
class SearchOutcome:
    status: str
    best_test: object
    breakdown: FitnessBreakdown
    evaluations: int
    wall_time: float
    generations: int
    log_lines: list
    pool_stats: dict
    config: dict
    best_trace: Optional[str] = None
    warnings: list = field(default_factory=list)

    @property
    def reproduced(self) -> bool:
        return self.status == REPRODUCED

    def to_dict(self) -> dict:
        """Deterministic summary; wall time is kept out so reruns compare equal."""
        return {
            "status": self.status,
            "fitness": self.breakdown.as_dict(),
            "evaluations": self.evaluations,
            "generations": self.generations,
            "best_test": self.best_test.to_text() if self.best_test is not None else None,
            "best_trace": self.best_trace,
            "pools": dict(self.pool_stats),
            "warnings": list(self.warnings),
            "config": dict(self.config),
        }

    def log_text(self) -> str:
        return "".join(line + "\n" for line in self.log_lines)


def classify(breakdown: Optional[FitnessBreakdown]) -> str:
    if breakdown is None:
        return NOT_STARTED
    if breakdown.total == 0.0:
        return REPRODUCED
    if breakdown.d_l > 0:
        return LINE_NOT_REACHED
    if breakdown.d_e > 0:
        return LINE_REACHED
    return EXCEPTION_THROWN


def build_models(program, tests, step_limit: int = DEFAULT_STEP_LIMIT) -> dict:
    static = collect_static_sequences(program)
    dynamic = collect_dynamic_sequences(program, tests, step_limit=step_limit)
    return infer_models(merge(static, dynamic))


def prepare_seeds(program, tests, target: CrashTarget, config: SearchConfig, rng: random.Random, models=None) -> Seeds:
    sc = config.seeding_config
    if config.seeding == "none":
        return Seeds()
    if config.seeding == "test":
        tests = list(tests)
        if not tests:
            log.warning(TEST_SEEDING_UNAVAILABLE)
            return Seeds(warnings=[TEST_SEEDING_UNAVAILABLE])
        objects = build_carved_pool(program, tests, target.crash, config.step_limit)
        clones = build_test_pool(program, tests, target.target_class, config.step_limit)
        warnings = [] if objects.size() or clones else [TEST_SEEDING_UNAVAILABLE]
        # carved objects are drawn with the fixed object-pool probability in both phases
        return Seeds(objects, clones, sc.pick_mut, sc.pick_mut, sc.clone, warnings)
    if models is None:
        models = build_models(program, tests, config.step_limit)
    pool = build_object_pool(models, target.crash, program, sc, rng, config.behavior_set_size, config.step_limit)
    return Seeds(pool, TestPool(), sc.pick_init, sc.pick_mut, 0.0)


def _tournament(population: list, scores: list, size: int, rng: random.Random) -> int:
    best = None
    for _ in range(size):
        i = rng.randrange(len(population))
        if best is None or scores[i].total < scores[best].total:
            best = i
    return best


def _log_line(gen: int, b: FitnessBreakdown, evals: int) -> str:
    return f"{gen}\t{b.total:.6f}\t{b.d_l:.6f}\t{b.d_e:.0f}\t{b.d_s:.6f}\t{evals}"


def run_search(program, tests, target: CrashTarget, config: Optional[SearchConfig] = None, models=None) -> SearchOutcome:
    """Evolve a test reproducing ``target`` within ``config.budget`` fitness evaluations."""
    config = config or SearchConfig()
    start = time.perf_counter()
    rng = random.Random(config.seed)
    seeds = prepare_seeds(program, tests, target, config, rng, models)
    factory = TestFactory(
        program,
        target,
        rng,
        max_length=config.max_test_length,
        object_pool=seeds.object_pool,
        test_pool=seeds.test_pool,
        pick_init=seeds.pick_init,
        pick_mut=seeds.pick_mut,
        clone=seeds.clone,
        mutation_rate=config.mutation_rate,
    )
    fit = FitnessFunction(program, target, config.step_limit)

    population: list = []
    for _ in range(config.population):
        ind = factory.initial_individual(config.max_init_attempts)
        if ind is not None:
            population.append(ind)

    def finish(status, best_test, best, best_result, generations, lines):
        trace = None
        if best_result is not None and best_result.thrown is not None:
            trace = format_stack_trace(best_result.thrown.exception_type, None, best_result.thrown.frames)
        stats = {
            "object_pool_size": seeds.object_pool.size(),
            "object_pool_classes": seeds.object_pool.classes(),
            "test_pool_size": len(seeds.test_pool.tests),
            "init_pool_draws": factory.stats.init_pool_draws,
            "mut_pool_draws": factory.stats.mut_pool_draws,
            "receivers_from_pool": factory.stats.receivers_from_pool,
            "clones": factory.stats.clones,
        }
        return SearchOutcome(
            status, best_test, best, fit.evaluations, time.perf_counter() - start,
            generations, lines, stats, config.echo(), trace, list(seeds.warnings),
        )

    if not population:
        return finish(NOT_STARTED, None, WORST, None, 0, [])

    best_test, best, best_result = None, None, None
    scores: list = []
    kept: list = []
    for ind in population:
        if fit.evaluations >= config.budget:
            break
        b, res = fit.evaluate(ind)
        kept.append(ind)
        scores.append(b)
        if best is None or b.total < best.total:
            best_test, best, best_result = ind, b, res
        if b.total == 0.0:
            break
    population = kept
    lines = [_log_line(0, best, fit.evaluations)]
    gen = 0
    while best.total > 0.0 and fit.evaluations < config.budget:
        gen += 1
        order = sorted(range(len(population)), key=lambda i: scores[i].total)
        next_pop = [population[i] for i in order[: config.elitism]]
        next_scores = [scores[i] for i in order[: config.elitism]]
        done = False
        while len(next_pop) < config.population and not done:
            p1 = population[_tournament(population, scores, config.tournament_size, rng)]
            p2 = population[_tournament(population, scores, config.tournament_size, rng)]
            try:
                if rng.random() < config.crossover_probability:
                    c1, c2 = factory.crossover(p1, p2)
                else:
                    c1, c2 = p1.copy(), p2.copy()
                children = [factory.mutate(c1), factory.mutate(c2)]
            except CannotBuild:
                children = [p1.copy(), p2.copy()]
            for child in children:
                if len(next_pop) >= config.population:
                    break
                if fit.evaluations >= config.budget:
                    done = True
                    break
                b, res = fit.evaluate(child)
                next_pop.append(child)
                next_scores.append(b)
                if b.total < best.total:
                    best_test, best, best_result = child, b, res
                if b.total == 0.0:
                    done = True
                    break
        population, scores = next_pop, next_scores
        if config.check_invariants:
            for ind in population:
                assert factory.has_target_call(ind), "individual lost the target call"
                assert len(ind) <= config.max_test_length, "individual exceeds the length cap"
        lines.append(_log_line(gen, best, fit.evaluations))
    return finish(classify(best), best_test, best, best_result, gen, lines)


__all__ = [
    "SEEDING_MODES", "STATUSES", "NOT_STARTED", "LINE_NOT_REACHED", "LINE_REACHED", "EXCEPTION_THROWN",
    "REPRODUCED", "SearchConfig", "SearchOutcome", "Seeds", "build_models", "classify", "prepare_seeds",
    "run_search",
]
