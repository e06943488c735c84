"""Guided test construction, crossover and mutation.

Every operator hands back a test that still calls the target method; when an
edit removes the call it is injected again at the end.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from ..seeding import ObjectPool, TestPool, random_literal
from ..sutlang import syntax as s
from ..sutlang.syntax import Lit, Program
from ..sutlang.testcase import (
    Check,
    Construct,
    Declare,
    Invoke,
    Ref,
    TestCase,
    defined_var,
    is_target_call,
    rename,
    used_vars,
)
from .fitness import CrashTarget

MAX_ARG_DEPTH = 3
NULL_PROBABILITY = 0.05
REUSE_PROBABILITY = 0.5
NEW_OBJECT_PROBABILITY = 0.2


class CannotBuild(Exception):
    """No way to build an object of the requested class."""


@dataclass
class OperatorStats:
    receivers_from_pool: int = 0
    init_pool_draws: int = 0
    mut_pool_draws: int = 0
    clones: int = 0
    construction_failures: int = 0


def var_kinds(program: Program, statements) -> dict:
    kinds: dict = {}
    for st in statements:
        if isinstance(st, Declare):
            kinds[st.var] = _literal_kind(st.value)
        elif isinstance(st, Construct):
            kinds[st.var] = st.class_name
        elif isinstance(st, Invoke) and st.var is not None:
            kind = None
            if st.class_name in program:
                m = program[st.class_name].lookup(st.method, len(st.args))
                if m is not None and m.return_kind != s.VOID:
                    kind = m.return_kind
            kinds[st.var] = kind
    return kinds


def _literal_kind(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    return "string"


def test_cluster(program: Program, target_class: str) -> list:
    """Target class plus every class reachable through public parameter kinds."""
    seen: set = set()
    stack = [target_class]
    while stack:
        c = stack.pop()
        if c in seen or c not in program:
            continue
        seen.add(c)
        cls = program[c]
        for m in cls.public_constructors() + cls.public_methods():
            for p in m.params:
                if p.kind in program:
                    stack.append(p.kind)
            if m.return_kind in program:
                stack.append(m.return_kind)
    return sorted(seen)


class _Draft:
    """Statements under construction together with their variable kinds."""

    def __init__(self, program: Program, statements=(), taken=()):
        self.program = program
        self.stmts: list = list(statements)
        self.kinds = var_kinds(program, self.stmts)
        self.taken = set(taken) | set(self.kinds)

    def fresh(self) -> str:
        n = len(self.taken)
        while f"v{n}" in self.taken:
            n += 1
        name = f"v{n}"
        self.taken.add(name)
        return name

    def add(self, st) -> None:
        self.stmts.append(st)
        var = defined_var(st)
        if var is not None:
            self.taken.add(var)
            self.kinds.update(var_kinds(self.program, [st]))

    def objects_of(self, class_name: str) -> list:
        return sorted(v for v, k in self.kinds.items() if k == class_name)

    def object_vars(self, classes) -> list:
        return sorted(v for v, k in self.kinds.items() if k in classes)


class TestFactory:
    """Builds and edits tests for one crash target."""

    __test__ = False

    def __init__(
        self,
        program: Program,
        target: CrashTarget,
        rng: random.Random,
        max_length: int = 40,
        object_pool: Optional[ObjectPool] = None,
        test_pool: Optional[TestPool] = None,
        pick_init: float = 0.0,
        pick_mut: float = 0.0,
        clone: float = 0.0,
        mutation_rate: Optional[float] = None,
    ):
        self.program = program
        self.target = target
        self.rng = rng
        self.max_length = max_length
        self.object_pool = object_pool or ObjectPool()
        self.test_pool = test_pool or TestPool()
        self.pick_init = pick_init
        self.pick_mut = pick_mut
        self.clone = clone
        self.mutation_rate = mutation_rate
        self.cluster = test_cluster(program, target.target_class)
        self.stats = OperatorStats()

    # -- objects and arguments

    def _from_pool(self, draft: _Draft, class_name: str, prob: float, phase: str) -> Optional[str]:
        if prob <= 0 or not self.object_pool.has(class_name) or self.rng.random() >= prob:
            return None
        frag = self.object_pool.sample(class_name, self.rng)
        if phase == "init":
            self.stats.init_pool_draws += 1
        else:
            self.stats.mut_pool_draws += 1
        stmts, var = frag.instantiate(draft.taken)
        for st in stmts:
            draft.add(st)
        return var

    def make_object(self, draft: _Draft, class_name: str, prob: float, phase: str, depth: int = 0) -> str:
        var = self._from_pool(draft, class_name, prob, phase)
        if var is not None:
            return var
        cls = self.program[class_name]
        ctors = cls.public_constructors()
        if not ctors:
            raise CannotBuild(class_name)
        ctor = ctors[self.rng.randrange(len(ctors))]
        args = tuple(self.make_arg(draft, p.kind, prob, phase, depth + 1) for p in ctor.params)
        var = draft.fresh()
        draft.add(Construct(var, class_name, args))
        return var

    def make_arg(self, draft: _Draft, kind: str, prob: float, phase: str, depth: int = 0):
        rng = self.rng
        if kind in s.PRIMITIVE_KINDS:
            if kind == "string" and rng.random() < NULL_PROBABILITY:
                return Lit(None)
            return Lit(random_literal(kind, rng))
        if rng.random() < NULL_PROBABILITY:
            return Lit(None)
        existing = draft.objects_of(kind)
        if existing and rng.random() < REUSE_PROBABILITY:
            return Ref(existing[rng.randrange(len(existing))])
        if depth >= MAX_ARG_DEPTH:
            return Ref(existing[rng.randrange(len(existing))]) if existing else Lit(None)
        mark = len(draft.stmts)
        try:
            return Ref(self.make_object(draft, kind, prob, phase, depth))
        except CannotBuild:
            del draft.stmts[mark:]
            draft.kinds = var_kinds(self.program, draft.stmts)
            return Ref(existing[0]) if existing else Lit(None)

    def random_call(self, draft: _Draft, receiver: str, prob: float, phase: str) -> None:
        cls = self.program[draft.kinds[receiver]]
        methods = cls.public_methods()
        if not methods:
            return
        m = methods[self.rng.randrange(len(methods))]
        args = tuple(self.make_arg(draft, p.kind, prob, phase) for p in m.params)
        var = draft.fresh() if m.return_kind in self.program else None
        draft.add(Invoke(var, receiver, cls.name, m.name, args))

    def target_call(self, draft: _Draft, prob: float, phase: str, receiver: Optional[str] = None) -> None:
        t = self.target
        cls = self.program[t.target_class]
        if t.target_method == s.CONSTRUCTOR:
            ctors = cls.public_constructors()
            if not ctors:
                raise CannotBuild(t.target_class)
            ctor = ctors[self.rng.randrange(len(ctors))]
            args = tuple(self.make_arg(draft, p.kind, prob, phase) for p in ctor.params)
            draft.add(Construct(draft.fresh(), t.target_class, args))
            return
        methods = [m for m in cls.methods_named(t.target_method) if not m.private]
        if not methods:
            raise CannotBuild(f"{t.target_class}.{t.target_method}")
        if receiver is None:
            draws = self.stats.init_pool_draws + self.stats.mut_pool_draws
            receiver = self.make_object(draft, t.target_class, prob, phase)
            if self.stats.init_pool_draws + self.stats.mut_pool_draws > draws and phase == "init":
                self.stats.receivers_from_pool += 1
        m = methods[self.rng.randrange(len(methods))]
        args = tuple(self.make_arg(draft, p.kind, prob, phase) for p in m.params)
        draft.add(Invoke(None, receiver, t.target_class, m.name, args))

    # -- initialization

    def random_test(self) -> TestCase:
        draft = _Draft(self.program)
        receiver = None
        if self.target.target_method != s.CONSTRUCTOR:
            draws = self.stats.init_pool_draws
            receiver = self.make_object(draft, self.target.target_class, self.pick_init, "init")
            if self.stats.init_pool_draws > draws:
                self.stats.receivers_from_pool += 1
        for _ in range(self.rng.randint(1, max(1, self.max_length // 2))):
            self._random_statement(draft, self.pick_init, "init")
        self.target_call(draft, self.pick_init, "init", receiver)
        test = TestCase(draft.stmts)
        if len(test) > self.max_length:
            test = self.shrink(test)
        return test

    def _random_statement(self, draft: _Draft, prob: float, phase: str) -> None:
        objs = draft.object_vars(self.cluster)
        if not objs or self.rng.random() < NEW_OBJECT_PROBABILITY:
            cname = self.cluster[self.rng.randrange(len(self.cluster))]
            mark = len(draft.stmts)
            try:
                objs = [self.make_object(draft, cname, prob, phase)]
            except CannotBuild:
                del draft.stmts[mark:]
                draft.kinds = var_kinds(self.program, draft.stmts)
                return
        self.random_call(draft, objs[self.rng.randrange(len(objs))], prob, phase)

    def cloned_test(self) -> TestCase:
        test = self.test_pool.sample(self.rng)
        self.stats.clones += 1
        test = TestCase([st for st in test.statements if not isinstance(st, Check)], "generated")
        test = self.ensure_target_call(test, self.pick_init, "init")
        return self.mutate(test)

    def initial_individual(self, attempts: int = 50) -> Optional[TestCase]:
        for _ in range(attempts):
            try:
                if self.test_pool and self.rng.random() < self.clone:
                    test = self.cloned_test()
                else:
                    test = self.random_test()
            except CannotBuild:
                self.stats.construction_failures += 1
                continue
            if self.has_target_call(test) and len(test) <= self.max_length:
                return test
        return None

    # -- invariants and repair

    def has_target_call(self, test: TestCase) -> bool:
        return test.has_target_call(self.target.target_class, self.target.target_method)

    def ensure_target_call(self, test: TestCase, prob: float, phase: str) -> TestCase:
        if self.has_target_call(test):
            return test
        draft = _Draft(self.program, test.statements)
        receivers = draft.objects_of(self.target.target_class)
        receiver = receivers[self.rng.randrange(len(receivers))] if receivers else None
        self.target_call(draft, prob, phase, receiver)
        return TestCase(draft.stmts, test.name)

    def drop_dangling(self, statements) -> list:
        """Remove statements that use variables no earlier statement defines."""
        out, defined = [], set()
        for st in statements:
            if all(v in defined for v in used_vars(st)):
                out.append(st)
                var = defined_var(st)
                if var is not None:
                    defined.add(var)
        return out

    def shrink(self, test: TestCase) -> TestCase:
        """Drop statements the target call does not depend on until the test fits."""
        stmts = list(test.statements)
        while len(stmts) > self.max_length:
            idx = _last_target_index(stmts, self.target)
            if idx is None:
                break
            needed = _dependencies(stmts, idx)
            removable = [i for i in range(len(stmts)) if i not in needed and i != idx]
            if not removable:
                break
            del stmts[removable[0]]
            stmts = self.drop_dangling(stmts)
        return TestCase(stmts, test.name)

    def repair(self, statements, prob: float, phase: str) -> TestCase:
        """Declare undefined variables, re-inject the target call, enforce the length cap."""
        draft = _Draft(self.program, (), taken=_all_vars(statements))
        for st in statements:
            uses = used_vars(st)
            missing = [v for v in uses if v not in draft.kinds]
            for v in missing:
                kind = _expected_kind(self.program, st, v)
                if kind is None or not self._declare(draft, v, kind, prob, phase):
                    break
            if not missing or all(v in draft.kinds for v in uses):
                draft.add(st)
        test = self.ensure_target_call(TestCase(draft.stmts), prob, phase)
        if len(test) > self.max_length:
            test = self.shrink(test)
        return test

    def _declare(self, draft: _Draft, var: str, kind: str, prob: float, phase: str) -> bool:
        if kind in s.PRIMITIVE_KINDS:
            draft.add(Declare(var, random_literal(kind, self.rng)))
            return True
        if kind not in self.program:
            return False
        sub = _Draft(self.program, (), taken=draft.taken | {var})
        try:
            made = self.make_object(sub, kind, prob, phase)
        except CannotBuild:
            draft.add(Declare(var, None))
            draft.kinds[var] = kind
            return True
        for st in sub.stmts:
            draft.add(rename(st, {made: var}))
        return True

    # -- crossover

    def crossover(self, parent1: TestCase, parent2: TestCase) -> tuple:
        if parent1.statements == parent2.statements:
            return parent1.copy(), parent2.copy()
        alpha = self.rng.random()
        cut1 = int(round(alpha * len(parent1)))
        cut2 = int(round(alpha * len(parent2)))
        child1 = self._splice(parent1.statements[:cut1], parent2.statements[cut2:])
        child2 = self._splice(parent2.statements[:cut2], parent1.statements[cut1:])
        return child1, child2

    def _splice(self, head, tail) -> TestCase:
        head_vars = _all_vars(head)
        mapping: dict = {}
        taken = set(head_vars) | _all_vars(tail)
        n = 0
        for st in tail:
            v = defined_var(st)
            if v is not None and v in head_vars and v not in mapping:
                while f"v{n}" in taken:
                    n += 1
                mapping[v] = f"v{n}"
                taken.add(f"v{n}")
        # names the tail redefines refer to the tail's own objects from there on
        renamed = []
        active: dict = {}
        for st in tail:
            renamed.append(rename(st, active))
            v = defined_var(st)
            if v in mapping:
                active[v] = mapping[v]
                renamed[-1] = rename(st, active)
        return self.repair(list(head) + renamed, self.pick_mut, "mut")

    # -- mutation

    def mutate(self, test: TestCase) -> TestCase:
        stmts = list(test.statements)
        if not stmts:
            return self.ensure_target_call(test, self.pick_mut, "mut")
        rate = self.mutation_rate if self.mutation_rate is not None else 1.0 / len(stmts)
        if rate <= 0:
            return test.copy()
        changed = False
        for i in range(len(stmts) - 1, -1, -1):
            if i >= len(stmts) or self.rng.random() >= rate:
                continue
            op = self.rng.randrange(3)
            if op == 0:
                del stmts[i]
            elif op == 1:
                stmts = self._change(stmts, i)
            else:
                stmts = self._insert(stmts)
            changed = True
        if not changed:
            return test.copy()
        return self.repair(self.drop_dangling(stmts), self.pick_mut, "mut")

    def _change(self, stmts: list, i: int) -> list:
        st = stmts[i]
        rng = self.rng
        if isinstance(st, Declare):
            kind = _literal_kind(st.value)
            if kind in s.PRIMITIVE_KINDS:
                stmts[i] = Declare(st.var, _tweak(st.value, rng))
            return stmts
        if not isinstance(st, (Construct, Invoke)):
            return stmts
        if isinstance(st, Construct):
            m = self.program[st.class_name].lookup(s.CONSTRUCTOR, len(st.args)) if st.class_name in self.program else None
        else:
            m = self.program[st.class_name].lookup(st.method, len(st.args)) if st.class_name in self.program else None
        if m is None:
            return stmts
        positions = list(range(len(st.args)))
        if isinstance(st, Invoke):
            positions.append(-1)
        if not positions:
            return stmts
        pos = positions[rng.randrange(len(positions))]
        draft = _Draft(self.program, stmts[:i], taken=_all_vars(stmts))
        if pos == -1:
            existing = [v for v in draft.objects_of(st.class_name)]
            if existing and rng.random() < REUSE_PROBABILITY:
                new_recv = existing[rng.randrange(len(existing))]
            else:
                try:
                    new_recv = self.make_object(draft, st.class_name, self.pick_mut, "mut")
                except CannotBuild:
                    return stmts
            new = Invoke(st.var, new_recv, st.class_name, st.method, st.args)
        else:
            old = st.args[pos]
            kind = m.params[pos].kind
            if isinstance(old, Lit) and kind in s.PRIMITIVE_KINDS and old.value is not None:
                arg = Lit(_tweak(old.value, rng))
            else:
                arg = self.make_arg(draft, kind, self.pick_mut, "mut")
            args = st.args[:pos] + (arg,) + st.args[pos + 1:]
            new = Construct(st.var, st.class_name, args) if isinstance(st, Construct) else Invoke(
                st.var, st.receiver, st.class_name, st.method, args
            )
        return draft.stmts + [new] + stmts[i + 1:]

    def _insert(self, stmts: list) -> list:
        idx = _last_target_index(stmts, self.target)
        limit = idx if idx is not None else len(stmts)
        pos = self.rng.randint(0, limit)
        draft = _Draft(self.program, stmts[:pos], taken=_all_vars(stmts))
        self._random_statement(draft, self.pick_mut, "mut")
        return draft.stmts + stmts[pos:]


def _tweak(value, rng: random.Random):
    if isinstance(value, bool):
        return not value
    if isinstance(value, int):
        if rng.random() < 0.5:
            return value + rng.choice((-1, 1)) * rng.randint(1, 10)
        return random_literal("int", rng)
    if isinstance(value, str):
        return random_literal("string", rng)
    return value


def _all_vars(statements) -> set:
    out = set()
    for st in statements:
        v = defined_var(st)
        if v is not None:
            out.add(v)
        out.update(used_vars(st))
    return out


def _last_target_index(stmts, target: CrashTarget) -> Optional[int]:
    for i in range(len(stmts) - 1, -1, -1):
        if is_target_call(stmts[i], target.target_class, target.target_method):
            return i
    return None


def _dependencies(stmts, idx: int) -> set:
    needed_vars = set(used_vars(stmts[idx]))
    deps = set()
    for j in range(idx - 1, -1, -1):
        v = defined_var(stmts[j])
        if v is not None and v in needed_vars:
            deps.add(j)
            needed_vars.update(used_vars(stmts[j]))
    return deps


def _expected_kind(program: Program, st, var: str) -> Optional[str]:
    if isinstance(st, Invoke) and st.receiver == var:
        return st.class_name
    if isinstance(st, Construct):
        m = program[st.class_name].lookup(s.CONSTRUCTOR, len(st.args)) if st.class_name in program else None
    elif isinstance(st, Invoke) and st.class_name in program:
        m = program[st.class_name].lookup(st.method, len(st.args))
    else:
        return None
    if m is None:
        return None
    for p, a in zip(m.params, st.args):
        if isinstance(a, Ref) and a.name == var:
            return p.kind
    return None
