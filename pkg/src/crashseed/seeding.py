"""Behavior selection, concretization and the object/test pools."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .analysis.dynamic import carve_objects, clone_tests
from .behmodel import (
    DEFAULT_MAX_LENGTH,
    AbstractObjectBehavior,
    TransitionSystem,
    random_path,
)
from .sutlang import syntax as s
from .sutlang.interpreter import DEFAULT_STEP_LIMIT, execute_test
from .sutlang.syntax import Lit, Program
from .sutlang.testcase import Construct, Fragment, Invoke, Ref

log = logging.getLogger(__name__)

INT_RANGE = (-100, 100)
STRING_POOL = (
    "", "a", "b", "abc", "hello", "world", "foo", "bar",
    "key=value", "x,y", "0", "42", "-1", " ", "null", "test",
)
MAX_OBJECT_DEPTH = 3
CONCRETIZE_ATTEMPTS = 5

MODEL = "model"
CARVED = "carved"


@dataclass
class SeedingConfig:
    pick_init: float = 0.8
    pick_mut: float = 0.3
    clone: float = 0.2
    behaviors_per_model: Optional[int] = None  # None: population size
    concretizations: int = 1
    candidate_multiplier: int = 10
    max_path_length: int = DEFAULT_MAX_LENGTH

    def __post_init__(self) -> None:
        for name in ("pick_init", "pick_mut", "clone"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.behaviors_per_model is not None and self.behaviors_per_model < 1:
            raise ValueError("behaviors_per_model must be >= 1")
        if self.concretizations < 1 or self.candidate_multiplier < 1 or self.max_path_length < 1:
            raise ValueError("concretizations, candidate_multiplier and max_path_length must be >= 1")


def random_literal(kind: str, rng: random.Random):
    if kind == "int":
        return rng.randint(*INT_RANGE)
    if kind == "bool":
        return rng.random() < 0.5
    if kind == "string":
        return STRING_POOL[rng.randrange(len(STRING_POOL))]
    raise ValueError(f"{kind} is not a primitive kind")


# -- dissimilarity selection -------------------------------------------------


def jaccard_distance(b1, b2) -> float:
    """1 - |A & B| / |A | B| over the sets of actions of two behaviors."""
    a = set(b1.actions if isinstance(b1, AbstractObjectBehavior) else b1)
    b = set(b2.actions if isinstance(b2, AbstractObjectBehavior) else b2)
    if not a or not b:
        raise ValueError("behaviors must be non-empty")
    return 1.0 - len(a & b) / len(a | b)


def _seed_key(b) -> tuple:
    return (-len(b.actions), b.actions)


def greedy_select(candidates: Iterable, k: int) -> list:
    """Farthest-point selection of up to ``k`` distinct behaviors.

    Starts from the longest candidate (lexicographically first on ties) and
    keeps adding the candidate whose minimum distance to the chosen set is
    largest.
    """
    distinct: list = []
    seen: set = set()
    for c in candidates:
        if c.actions not in seen:
            seen.add(c.actions)
            distinct.append(c)
    if k < 1 or not distinct:
        return []
    if len(distinct) <= k:
        return sorted(distinct, key=_seed_key)
    sets = [frozenset(c.actions) for c in distinct]
    first = min(range(len(distinct)), key=lambda i: _seed_key(distinct[i]))
    chosen = [first]
    remaining = set(range(len(distinct))) - {first}
    min_dist = {i: 1.0 - len(sets[i] & sets[first]) / len(sets[i] | sets[first]) for i in remaining}
    while len(chosen) < k and remaining:
        best = min(remaining, key=lambda i: (-min_dist[i], _seed_key(distinct[i])))
        chosen.append(best)
        remaining.discard(best)
        for i in remaining:
            d = 1.0 - len(sets[i] & sets[best]) / len(sets[i] | sets[best])
            if d < min_dist[i]:
                min_dist[i] = d
    return [distinct[i] for i in chosen]


def select_behaviors(
    model: TransitionSystem,
    k: int,
    max_length: int = DEFAULT_MAX_LENGTH,
    rng: Optional[random.Random] = None,
    multiplier: int = 10,
) -> list:
    if model.is_empty:
        log.warning("no behaviors selected for %s: empty model", model.class_name)
        return []
    rng = rng or random.Random()
    candidates = [random_path(model, max_length, rng) for _ in range(multiplier * k)]
    return greedy_select(candidates, k)


# -- concretization ----------------------------------------------------------


class _Unbuildable(Exception):
    pass


class _Concretizer:
    def __init__(self, program: Program, rng: random.Random):
        self.program = program
        self.rng = rng
        self.stmts: list = []
        self.n = 0

    def fresh(self) -> str:
        name = f"o{self.n}"
        self.n += 1
        return name

    def value(self, kind: str, depth: int):
        if kind in s.PRIMITIVE_KINDS:
            return Lit(random_literal(kind, self.rng))
        if depth >= MAX_OBJECT_DEPTH:
            return Lit(None)
        mark = len(self.stmts)
        try:
            return Ref(self.build(kind, (), depth + 1))
        except _Unbuildable:
            del self.stmts[mark:]
            return Lit(None)

    def build(self, class_name: str, actions: tuple, depth: int) -> str:
        cls = self.program[class_name]
        ctors = cls.public_constructors()
        if not ctors:
            raise _Unbuildable(class_name)
        rest = actions
        ctor = None
        if actions and s.is_constructor_action(actions[0]):
            ctor = cls.lookup(s.CONSTRUCTOR, s.constructor_arity(actions[0]))
            rest = actions[1:]
            if ctor is not None and ctor.private:
                ctor = None
        if ctor is None:
            ctor = ctors[self.rng.randrange(len(ctors))]
        args = tuple(self.value(p.kind, depth) for p in ctor.params)
        var = self.fresh()
        self.stmts.append(Construct(var, class_name, args))
        for action in rest:
            if s.is_constructor_action(action):
                continue
            options = [m for m in cls.methods_named(action) if not m.private]
            if not options:
                continue
            m = options[self.rng.randrange(len(options))]
            margs = tuple(self.value(p.kind, depth) for p in m.params)
            self.stmts.append(Invoke(None, var, class_name, m.name, margs))
        return var


def concretize(
    behavior: AbstractObjectBehavior,
    program: Program,
    rng: Optional[random.Random] = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    attempts: int = CONCRETIZE_ATTEMPTS,
) -> Optional[Fragment]:
    """Executable statements realizing ``behavior``, or None.

    Starts with the behavior's own constructor when it leads with one, else
    with a random public constructor; arguments are random. A fragment is
    only returned when it replays without raising.
    """
    if behavior.class_name not in program:
        raise ValueError(f"unknown class {behavior.class_name}")
    rng = rng or random.Random()
    for _ in range(attempts):
        c = _Concretizer(program, rng)
        try:
            var = c.build(behavior.class_name, behavior.actions, 0)
        except _Unbuildable:
            log.debug("%s has no public constructor", behavior.class_name)
            return None
        frag = Fragment(behavior.class_name, tuple(c.stmts), var, MODEL)
        if execute_test(program, frag.as_test(), step_limit).thrown is None:
            return frag
    log.debug("could not concretize %s %s", behavior.class_name, behavior.actions)
    return None


# -- pools -------------------------------------------------------------------


@dataclass
class ObjectPool:
    entries: dict = field(default_factory=dict)
    draws: int = 0

    def add(self, fragment: Fragment) -> None:
        self.entries.setdefault(fragment.class_name, []).append(fragment)

    def has(self, class_name: str) -> bool:
        return bool(self.entries.get(class_name))

    def classes(self) -> list:
        return sorted(c for c, v in self.entries.items() if v)

    def size(self) -> int:
        return sum(len(v) for v in self.entries.values())

    def sample(self, class_name: str, rng: random.Random) -> Fragment:
        options = self.entries[class_name]
        self.draws += 1
        return options[rng.randrange(len(options))]

    def dump(self) -> str:
        out = []
        for cname in self.classes():
            for i, frag in enumerate(self.entries[cname]):
                out.append(f"# {cname} #{i} ({frag.provenance})\n{frag.to_text()}")
        return "\n".join(out)


@dataclass
class TestPool:
    tests: list = field(default_factory=list)
    draws: int = 0

    __test__ = False

    def __bool__(self) -> bool:
        return bool(self.tests)

    def sample(self, rng: random.Random):
        self.draws += 1
        return self.tests[rng.randrange(len(self.tests))].copy()


def pool_classes(program: Program, crash=None) -> list:
    """Internal classes plus library classes named in the stack trace."""
    names = set(program.internal_classes())
    if crash is not None:
        names |= {f.class_name for f in crash.frames if f.class_name in program}
    return sorted(names)


def build_object_pool(
    models: dict,
    crash,
    program: Program,
    config: SeedingConfig,
    rng: random.Random,
    k: Optional[int] = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> ObjectPool:
    k = k or config.behaviors_per_model or 100
    pool = ObjectPool()
    if not models:
        log.warning("no models available: object pool is empty")
        return pool
    for cname in pool_classes(program, crash):
        model = models.get(cname)
        if model is None or model.is_empty:
            continue
        behaviors = select_behaviors(model, k, config.max_path_length, rng, config.candidate_multiplier)
        for b in behaviors:
            for _ in range(config.concretizations):
                frag = concretize(b, program, rng, step_limit)
                if frag is not None:
                    pool.add(frag)
    return pool


def build_carved_pool(program: Program, tests, crash, step_limit: int = DEFAULT_STEP_LIMIT) -> ObjectPool:
    pool = ObjectPool()
    for frag in carve_objects(program, tests, pool_classes(program, crash), step_limit):
        pool.add(frag)
    return pool


def build_test_pool(program: Program, tests, target_class: str, step_limit: int = DEFAULT_STEP_LIMIT) -> TestPool:
    return TestPool(clone_tests(program, tests, target_class, step_limit))
