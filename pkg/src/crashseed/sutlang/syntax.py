"""AST node types for the SUT mini-language."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

PRIMITIVE_KINDS = ("int", "bool", "string")
VOID = "void"
CONSTRUCTOR = "<init>"


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: Union[int, bool, str, None]


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class This:
    pass


@dataclass(frozen=True)
class FieldGet:
    name: str


@dataclass(frozen=True)
class New:
    class_name: str
    args: tuple


@dataclass(frozen=True)
class CallExpr:
    receiver: "Expr"
    method: str
    args: tuple


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class UnOp:
    op: str
    operand: "Expr"


Expr = Union[Lit, Name, This, FieldGet, New, CallExpr, BinOp, UnOp]


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class VarDecl:
    line: int
    name: str
    expr: Expr


@dataclass(frozen=True)
class Assign:
    line: int
    name: str
    expr: Expr


@dataclass(frozen=True)
class FieldSet:
    line: int
    name: str
    expr: Expr


@dataclass(frozen=True)
class ExprStmt:
    line: int
    expr: Expr


@dataclass(frozen=True)
class If:
    line: int
    cond: Expr
    then: tuple
    orelse: tuple


@dataclass(frozen=True)
class While:
    line: int
    cond: Expr
    body: tuple


@dataclass(frozen=True)
class Return:
    line: int
    expr: Optional[Expr]


@dataclass(frozen=True)
class Throw:
    line: int
    exc_type: str
    message: Optional[Expr]


@dataclass(frozen=True)
class AssertStmt:
    line: int
    expr: Expr


Stmt = Union[VarDecl, Assign, FieldSet, ExprStmt, If, While, Return, Throw, AssertStmt]


# -- declarations ------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    kind: str
    name: str


@dataclass(frozen=True)
class MethodDef:
    name: str
    params: tuple
    return_kind: str
    body: tuple
    line: int
    private: bool = False

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def is_constructor(self) -> bool:
        return self.name == CONSTRUCTOR

    @property
    def action(self) -> str:
        """Action label used in call sequences and models."""
        if self.is_constructor:
            return constructor_action(self.arity)
        return self.name


@dataclass
class ClassDef:
    name: str
    fields: dict
    constructors: list
    methods: list
    source_file: str
    line: int = 1
    library: bool = False
    _by_sig: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for m in self.constructors + self.methods:
            self._by_sig[(m.name, m.arity)] = m

    def lookup(self, name: str, arity: int) -> Optional[MethodDef]:
        return self._by_sig.get((name, arity))

    def methods_named(self, name: str) -> list:
        return [m for m in self.methods if m.name == name]

    def public_constructors(self) -> list:
        return [c for c in self.constructors if not c.private]

    def public_methods(self) -> list:
        return [m for m in self.methods if not m.private]

    def lines(self) -> set:
        """All (method, line) pairs carrying a statement."""
        out = set()
        for m in self.constructors + self.methods:
            for line in statement_lines(m.body):
                out.add((m.name, line))
        return out


@dataclass
class Program:
    classes: dict

    def __contains__(self, class_name: str) -> bool:
        return class_name in self.classes

    def __getitem__(self, class_name: str) -> ClassDef:
        return self.classes[class_name]

    def class_names(self) -> list:
        return sorted(self.classes)

    def internal_classes(self) -> list:
        return sorted(n for n, c in self.classes.items() if not c.library)

    def has_line(self, class_name: str, method: str, line: int) -> bool:
        cls = self.classes.get(class_name)
        if cls is None:
            return False
        return any(
            m.name == method and line in statement_lines(m.body)
            for m in cls.constructors + cls.methods
        )

    def method_lines(self, class_name: str, method: str) -> set:
        cls = self.classes.get(class_name)
        if cls is None:
            return set()
        out = set()
        for m in cls.constructors + cls.methods:
            if m.name == method:
                out |= statement_lines(m.body)
        return out


def constructor_action(arity: int) -> str:
    return f"{CONSTRUCTOR}/{arity}"


def is_constructor_action(action: str) -> bool:
    return action.startswith(CONSTRUCTOR + "/")


def constructor_arity(action: str) -> int:
    return int(action.split("/", 1)[1])


def statement_lines(body) -> set:
    out = set()
    for st in body:
        out.add(st.line)
        if isinstance(st, If):
            out |= statement_lines(st.then)
            out |= statement_lines(st.orelse)
        elif isinstance(st, While):
            out |= statement_lines(st.body)
    return out


_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4, "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}


def render_expr(expr, prec: int = 0) -> str:
    """Source text for an expression; parenthesizes only where needed."""
    from .testcase import render_literal

    if isinstance(expr, Lit):
        return render_literal(expr.value)
    if isinstance(expr, Name):
        return expr.id
    if isinstance(expr, This):
        return "this"
    if isinstance(expr, FieldGet):
        return f"this.{expr.name}"
    if isinstance(expr, New):
        return f"new {expr.class_name}({', '.join(render_expr(a) for a in expr.args)})"
    if isinstance(expr, CallExpr):
        recv = render_expr(expr.receiver, 10)
        return f"{recv}.{expr.method}({', '.join(render_expr(a) for a in expr.args)})"
    if isinstance(expr, UnOp):
        return f"{expr.op}{render_expr(expr.operand, 9)}"
    if isinstance(expr, BinOp):
        p = _PREC[expr.op]
        text = f"{render_expr(expr.left, p)} {expr.op} {render_expr(expr.right, p + 1)}"
        return f"({text})" if p < prec else text
    raise TypeError(f"not an expression: {expr!r}")
