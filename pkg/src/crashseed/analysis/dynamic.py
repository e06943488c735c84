"""Execution-based analysis of existing tests: sequences, carving, cloning."""

from __future__ import annotations

import logging
from typing import Iterable, Optional

from ..sutlang import syntax as s
from ..sutlang.interpreter import (
    BUDGET_EXHAUSTED,
    DEFAULT_STEP_LIMIT,
    HARNESS_ERROR,
    ObjRef,
    execute_test,
)
from ..sutlang.syntax import Lit, Program
from ..sutlang.testcase import Construct, Fragment, Invoke, Ref, TestCase
from .sequences import DYNAMIC, CallSequence

log = logging.getLogger(__name__)

MAX_CARVE_DEPTH = 3
TEST_SEEDING_UNAVAILABLE = "test seeding unavailable"


def class_dependencies(program: Program) -> dict:
    """Class name -> classes its declarations or bodies mention."""
    deps: dict = {}
    for cname in program.class_names():
        cls = program[cname]
        found = {k for k in cls.fields.values() if k in program}
        for m in cls.constructors + cls.methods:
            found |= {p.kind for p in m.params if p.kind in program}
            if m.return_kind in program:
                found.add(m.return_kind)
            found |= _body_news(m.body)
        deps[cname] = found
    return deps


def _body_news(body) -> set:
    out: set = set()

    def expr(e):
        if isinstance(e, s.New):
            out.add(e.class_name)
            for a in e.args:
                expr(a)
        elif isinstance(e, s.CallExpr):
            expr(e.receiver)
            for a in e.args:
                expr(a)
        elif isinstance(e, s.BinOp):
            expr(e.left)
            expr(e.right)
        elif isinstance(e, s.UnOp):
            expr(e.operand)

    for st in body:
        for attr in ("expr", "cond", "message"):
            e = getattr(st, attr, None)
            if e is not None:
                expr(e)
        if isinstance(st, s.If):
            out |= _body_news(st.then) | _body_news(st.orelse)
        elif isinstance(st, s.While):
            out |= _body_news(st.body)
    return out


def referenced_classes(program: Program, test: TestCase, deps: Optional[dict] = None) -> set:
    """Classes a test names directly, closed under class dependencies."""
    deps = class_dependencies(program) if deps is None else deps
    direct = set()
    for st in test.statements:
        if isinstance(st, Construct):
            direct.add(st.class_name)
        elif isinstance(st, Invoke) and st.class_name is not None:
            direct.add(st.class_name)
    seen: set = set()
    stack = sorted(c for c in direct if c in program)
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        stack.extend(sorted(deps.get(c, ())))
    return seen


def _runnable(result, test: TestCase) -> bool:
    if result.thrown is not None and result.thrown.exception_type in (BUDGET_EXHAUSTED, HARNESS_ERROR):
        log.warning("test %s could not be executed: %s", test.name, result.thrown.message)
        return False
    return True


def collect_dynamic_sequences(
    program: Program,
    tests: Iterable,
    relevant_classes: Optional[Iterable] = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> dict:
    """Map class name -> set of CallSequences observed per object while running tests.

    Sequences are interprocedural: calls made by the program on an object count
    as well as the calls the test makes. Tests that touch none of the relevant
    classes are not executed.
    """
    relevant = set(program.class_names() if relevant_classes is None else relevant_classes)
    deps = class_dependencies(program)
    out: dict = {}
    for test in tests:
        if not referenced_classes(program, test, deps) & relevant:
            log.debug("skipping test %s: no relevant class", test.name)
            continue
        result = execute_test(program, test, step_limit)
        if not _runnable(result, test):
            continue
        for _oid, (cname, actions) in sorted(result.events_by_object().items()):
            if cname in relevant:
                out.setdefault(cname, set()).add(CallSequence(cname, tuple(actions), DYNAMIC))
    return out


# -- carving ------------------------------------------------------------------


class _Carver:
    def __init__(self, calls: list):
        self.calls = calls
        self.created = {}
        for i, rec in enumerate(calls):
            if s.is_constructor_action(rec.action) and rec.oid not in self.created:
                self.created[rec.oid] = i
        self.stmts: list = []
        self.n = 0

    def fresh(self) -> str:
        name = f"c{self.n}"
        self.n += 1
        return name

    def arg(self, value, upto: int, depth: int):
        if isinstance(value, ObjRef):
            return Ref(self.carve(value.oid, upto, depth + 1))
        return Lit(value)

    def carve(self, oid: int, upto: int, depth: int) -> str:
        if depth > MAX_CARVE_DEPTH or oid not in self.created:
            raise _Unreplayable()
        start = self.created[oid]
        rec = self.calls[start]
        args = tuple(self.arg(a, start, depth) for a in rec.args)
        var = self.fresh()
        self.stmts.append(Construct(var, rec.class_name, args))
        for j in range(start + 1, upto):
            r = self.calls[j]
            if r.oid != oid or not r.from_harness or s.is_constructor_action(r.action):
                continue
            cargs = tuple(self.arg(a, j, depth) for a in r.args)
            self.stmts.append(Invoke(None, var, r.class_name, r.action, cargs))
        return var


class _Unreplayable(Exception):
    pass


def _replays(program: Program, frag: Fragment, step_limit: int) -> bool:
    return execute_test(program, frag.as_test(), step_limit).thrown is None


def carve_objects(
    program: Program,
    tests: Iterable,
    target_classes: Iterable,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> list:
    """Fragments rebuilding each target-class object observed during the tests.

    Constructor and test-issued calls are replayed with the argument values seen
    at run time; object arguments are carved recursively. Fragments that do not
    replay cleanly are dropped.
    """
    targets = set(target_classes)
    out: list = []
    seen: set = set()
    for test in tests:
        result = execute_test(program, test, step_limit)
        if not _runnable(result, test):
            continue
        oids = sorted({rec.oid for rec in result.calls if rec.class_name in targets})
        for oid in oids:
            carver = _Carver(result.calls)
            try:
                var = carver.carve(oid, len(result.calls), 0)
            except _Unreplayable:
                log.debug("object %d in %s is not carvable", oid, test.name)
                continue
            cname = result.calls[carver.created[oid]].class_name
            frag = Fragment(cname, tuple(carver.stmts), var, "carved")
            key = frag.to_text()
            if key in seen:
                continue
            if not _replays(program, frag, step_limit):
                log.debug("dropping carved %s fragment from %s: replay failed", cname, test.name)
                continue
            seen.add(key)
            out.append(frag)
    return out


def clone_tests(
    program: Program,
    tests: Iterable,
    target_class: str,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> list:
    """Tests whose execution touches ``target_class``, assertions removed."""
    tests = list(tests)
    out = []
    executed = 0
    for test in tests:
        result = execute_test(program, test, step_limit)
        if not _runnable(result, test):
            continue
        executed += 1
        touched = any(c == target_class for _o, c, _a in result.call_events) or any(
            c == target_class for c, _m, _l in result.executed_lines
        )
        if touched:
            out.append(test.without_assertions())
    if tests and executed == 0:
        log.warning("%s: none of the %d tests could be executed", TEST_SEEDING_UNAVAILABLE, len(tests))
    return out
