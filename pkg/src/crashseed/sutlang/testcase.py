"""Flat, evolvable test representation shared by the interpreter and the search."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .syntax import CONSTRUCTOR, Lit


@dataclass(frozen=True)
class Ref:
    """Reference to a test variable."""

    name: str


Arg = Union[Ref, Lit]


@dataclass(frozen=True)
class Declare:
    var: str
    value: Union[int, bool, str, None]


@dataclass(frozen=True)
class Construct:
    var: str
    class_name: str
    args: tuple


@dataclass(frozen=True)
class Invoke:
    var: Optional[str]
    receiver: str
    class_name: Optional[str]
    method: str
    args: tuple


@dataclass(frozen=True)
class Check:
    """An ``assert`` carried over from a hand-written test."""

    expr: object
    source: str


Statement = Union[Declare, Construct, Invoke, Check]


@dataclass
class TestCase:
    statements: list = field(default_factory=list)
    name: str = "generated"

    # pytest would otherwise try to collect this class
    __test__ = False

    def __len__(self) -> int:
        return len(self.statements)

    def copy(self) -> "TestCase":
        return TestCase(list(self.statements), self.name)

    def without_assertions(self) -> "TestCase":
        return TestCase([s for s in self.statements if not isinstance(s, Check)], self.name)

    def target_call_index(self, class_name: str, method: str) -> Optional[int]:
        """Index of the last call to the target method, if any."""
        for i in range(len(self.statements) - 1, -1, -1):
            if is_target_call(self.statements[i], class_name, method):
                return i
        return None

    def has_target_call(self, class_name: str, method: str) -> bool:
        return self.target_call_index(class_name, method) is not None

    def defined_vars(self) -> list:
        return [v for v in (defined_var(s) for s in self.statements) if v is not None]

    def fresh_var(self, prefix: str = "v") -> str:
        used = set(self.defined_vars())
        best = -1
        for v in used:
            m = re.fullmatch(re.escape(prefix) + r"(\d+)", v)
            if m:
                best = max(best, int(m.group(1)))
        return f"{prefix}{best + 1}"

    def to_text(self) -> str:
        lines = [f"test {self.name} {{"]
        lines += ["    " + render_statement(s) for s in self.statements]
        lines.append("}")
        return "\n".join(lines) + "\n"


def is_target_call(stmt, class_name: str, method: str) -> bool:
    if method == CONSTRUCTOR:
        return isinstance(stmt, Construct) and stmt.class_name == class_name
    return isinstance(stmt, Invoke) and stmt.class_name == class_name and stmt.method == method


def defined_var(stmt) -> Optional[str]:
    if isinstance(stmt, (Declare, Construct)):
        return stmt.var
    if isinstance(stmt, Invoke):
        return stmt.var
    return None


def used_vars(stmt) -> list:
    if isinstance(stmt, Construct):
        return [a.name for a in stmt.args if isinstance(a, Ref)]
    if isinstance(stmt, Invoke):
        return [stmt.receiver] + [a.name for a in stmt.args if isinstance(a, Ref)]
    if isinstance(stmt, Check):
        return sorted(_expr_names(stmt.expr))
    return []


def _expr_names(expr) -> set:
    from . import syntax as s

    if isinstance(expr, s.Name):
        return {expr.id}
    out = set()
    if isinstance(expr, s.CallExpr):
        out |= _expr_names(expr.receiver)
        for a in expr.args:
            out |= _expr_names(a)
    elif isinstance(expr, s.New):
        for a in expr.args:
            out |= _expr_names(a)
    elif isinstance(expr, s.BinOp):
        out |= _expr_names(expr.left) | _expr_names(expr.right)
    elif isinstance(expr, s.UnOp):
        out |= _expr_names(expr.operand)
    return out


def render_literal(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def render_arg(arg) -> str:
    if isinstance(arg, Ref):
        return arg.name
    return render_literal(arg.value)


def render_statement(stmt) -> str:
    if isinstance(stmt, Declare):
        return f"var {stmt.var} = {render_literal(stmt.value)};"
    if isinstance(stmt, Construct):
        args = ", ".join(render_arg(a) for a in stmt.args)
        return f"var {stmt.var} = new {stmt.class_name}({args});"
    if isinstance(stmt, Invoke):
        args = ", ".join(render_arg(a) for a in stmt.args)
        call = f"{stmt.receiver}.{stmt.method}({args})"
        return f"var {stmt.var} = {call};" if stmt.var else f"{call};"
    if isinstance(stmt, Check):
        return f"assert {stmt.source};"
    raise TypeError(f"not a test statement: {stmt!r}")


@dataclass(frozen=True)
class Fragment:
    """Replayable statements building one object of ``class_name`` in ``var``."""

    class_name: str
    statements: tuple
    var: str
    provenance: str = "carved"

    def as_test(self, name: str = "fragment") -> TestCase:
        return TestCase(list(self.statements), name)

    def to_text(self) -> str:
        return "\n".join(render_statement(s) for s in self.statements) + "\n"

    def instantiate(self, taken) -> tuple:
        """Statements renamed to avoid ``taken`` names, plus the new object variable."""
        taken = set(taken)
        mapping: dict = {}
        n = 0
        for st in self.statements:
            old = defined_var(st)
            if old is None:
                continue
            while f"v{n}" in taken:
                n += 1
            mapping[old] = f"v{n}"
            taken.add(f"v{n}")
        return tuple(rename(st, mapping) for st in self.statements), mapping[self.var]


def rename(stmt, mapping: dict):
    def r(name):
        return mapping.get(name, name)

    def ra(args):
        return tuple(Ref(r(a.name)) if isinstance(a, Ref) else a for a in args)

    if isinstance(stmt, Declare):
        return Declare(r(stmt.var), stmt.value)
    if isinstance(stmt, Construct):
        return Construct(r(stmt.var), stmt.class_name, ra(stmt.args))
    if isinstance(stmt, Invoke):
        var = r(stmt.var) if stmt.var is not None else None
        return Invoke(var, r(stmt.receiver), stmt.class_name, stmt.method, ra(stmt.args))
    return stmt
