"""Recursive-descent parser for ``.sut`` programs and ``.sut-test`` suites."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from . import syntax as s
from .testcase import Check, Construct, Declare, Invoke, Ref, TestCase

HARNESS_CLASS = "TestHarness"

KEYWORDS = {
    "class", "library", "field", "init", "def", "private", "var", "if", "else", "while",
    "return", "throw", "assert", "new", "this", "true", "false", "null", "test",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||[{}();,.=<>+\-*/%!])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


class SutSyntaxError(ValueError):
    """Syntax or static-semantics error, tagged with file and line."""

    def __init__(self, message: str, file: str = "<input>", line: int = 0):
        self.file = file
        self.line = line
        super().__init__(f"{file}:{line}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int


def tokenize(text: str, file: str = "<input>") -> list:
    tokens = []
    pos, line = 0, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SutSyntaxError(f"unexpected character {text[pos]!r}", file, line)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line += 1
        elif kind in ("ws", "comment"):
            pass
        elif kind == "ident" and tok in KEYWORDS:
            tokens.append(Token(tok, tok, line))
        else:
            tokens.append(Token(kind, tok, line))
        pos = m.end()
    tokens.append(Token("eof", "", line))
    return tokens


def _unescape(literal: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), literal[1:-1])


class _Parser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0

    # -- token helpers

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Optional[Token] = None):
        raise SutSyntaxError(msg, self.file, (tok or self.cur).line)

    def at(self, *texts: str) -> bool:
        return self.cur.text in texts and self.cur.kind != "string"

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            tok = self.cur
            self.i += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            self.error(f"expected {text!r}, found {self.cur.text or 'end of input'!r}")
        return tok

    def ident(self) -> Token:
        if self.cur.kind != "ident":
            self.error(f"expected identifier, found {self.cur.text or 'end of input'!r}")
        tok = self.cur
        self.i += 1
        return tok

    # -- declarations

    def program(self) -> list:
        classes = []
        while self.cur.kind != "eof":
            classes.append(self.class_def())
        return classes

    def class_def(self) -> s.ClassDef:
        library = bool(self.accept("library"))
        start = self.expect("class")
        name = self.ident().text
        if name == HARNESS_CLASS:
            self.error(f"class name {HARNESS_CLASS} is reserved", start)
        self.expect("{")
        fields, ctors, methods = {}, [], []
        while not self.accept("}"):
            if self.cur.kind == "eof":
                self.error("unterminated class body")
            if self.accept("field"):
                kind = self.kind()
                ftok = self.ident()
                if ftok.text in fields:
                    self.error(f"duplicate field {ftok.text}", ftok)
                fields[ftok.text] = kind
                self.expect(";")
                continue
            private = bool(self.accept("private"))
            if self.at("init"):
                tok = self.expect("init")
                params = self.params()
                ctors.append(s.MethodDef(s.CONSTRUCTOR, params, s.VOID, self.block(), tok.line, private))
            elif self.at("def"):
                tok = self.expect("def")
                ret = self.kind(allow_void=True)
                mname = self.ident().text
                params = self.params()
                methods.append(s.MethodDef(mname, params, ret, self.block(), tok.line, private))
            else:
                self.error(f"expected member declaration, found {self.cur.text!r}")
        if not ctors:
            ctors.append(s.MethodDef(s.CONSTRUCTOR, (), s.VOID, (), start.line, False))
        seen = set()
        for m in ctors + methods:
            sig = (m.name, m.arity)
            if sig in seen:
                self.error(f"duplicate signature {m.name}/{m.arity} in class {name}", Token("", "", m.line))
            seen.add(sig)
        return s.ClassDef(name, fields, ctors, methods, self.file, start.line, library)

    def kind(self, allow_void: bool = False) -> str:
        tok = self.ident()
        if tok.text == s.VOID and not allow_void:
            self.error("void is only a return kind", tok)
        return tok.text

    def params(self) -> tuple:
        self.expect("(")
        out = []
        if not self.accept(")"):
            while True:
                kind = self.kind()
                out.append(s.Param(kind, self.ident().text))
                if self.accept(")"):
                    break
                self.expect(",")
        names = [p.name for p in out]
        if len(set(names)) != len(names):
            self.error("duplicate parameter name")
        return tuple(out)

    def block(self) -> tuple:
        self.expect("{")
        out = []
        while not self.accept("}"):
            if self.cur.kind == "eof":
                self.error("unterminated block")
            out.append(self.statement())
        return tuple(out)

    # -- statements

    def statement(self):
        tok = self.cur
        line = tok.line
        if self.accept("var"):
            name = self.ident().text
            self.expect("=")
            expr = self.expr()
            self.expect(";")
            return s.VarDecl(line, name, expr)
        if self.accept("if"):
            return self._if_rest(line)
        if self.accept("while"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return s.While(line, cond, self.block())
        if self.accept("return"):
            expr = None if self.at(";") else self.expr()
            self.expect(";")
            return s.Return(line, expr)
        if self.accept("throw"):
            exc = self.ident().text
            self.expect("(")
            msg = None if self.at(")") else self.expr()
            self.expect(")")
            self.expect(";")
            return s.Throw(line, exc, msg)
        if self.accept("assert"):
            expr = self.expr()
            self.expect(";")
            return s.AssertStmt(line, expr)
        if tok.kind == "ident" and self.peek().text == "=":
            self.i += 2
            expr = self.expr()
            self.expect(";")
            return s.Assign(line, tok.text, expr)
        if self.at("this") and self.peek().text == "." and self.peek(3).text == "=":
            self.i += 2
            fname = self.ident().text
            self.expect("=")
            expr = self.expr()
            self.expect(";")
            return s.FieldSet(line, fname, expr)
        expr = self.expr()
        if not isinstance(expr, (s.CallExpr, s.New)):
            self.error("expression statement must be a call", tok)
        self.expect(";")
        return s.ExprStmt(line, expr)

    def _if_rest(self, line: int) -> s.If:
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse: tuple = ()
        if self.accept("else"):
            if self.at("if"):
                nested_line = self.expect("if").line
                orelse = (self._if_rest(nested_line),)
            else:
                orelse = self.block()
        return s.If(line, cond, then, orelse)

    # -- expressions (precedence climbing)

    _LEVELS = (("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/", "%"))

    def expr(self, level: int = 0):
        if level == len(self._LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        while self.cur.kind == "op" and self.cur.text in self._LEVELS[level]:
            op = self.cur.text
            self.i += 1
            left = s.BinOp(op, left, self.expr(level + 1))
        return left

    def unary(self):
        if self.cur.kind == "op" and self.cur.text in ("!", "-"):
            op = self.cur.text
            self.i += 1
            operand = self.unary()
            if op == "-" and isinstance(operand, s.Lit) and type(operand.value) is int:
                return s.Lit(-operand.value)
            return s.UnOp(op, operand)
        return self.postfix()

    def postfix(self):
        expr = self.primary()
        while self.at("."):
            self.i += 1
            name = self.ident()
            if self.at("("):
                expr = s.CallExpr(expr, name.text, self.args())
            elif isinstance(expr, s.This):
                expr = s.FieldGet(name.text)
            else:
                self.error("field access is only allowed on this", name)
        return expr

    def args(self) -> tuple:
        self.expect("(")
        out = []
        if not self.accept(")"):
            while True:
                out.append(self.expr())
                if self.accept(")"):
                    break
                self.expect(",")
        return tuple(out)

    def primary(self):
        tok = self.cur
        if tok.kind == "int":
            self.i += 1
            return s.Lit(int(tok.text))
        if tok.kind == "string":
            self.i += 1
            return s.Lit(_unescape(tok.text))
        if tok.kind == "ident":
            self.i += 1
            return s.Name(tok.text)
        if self.accept("true"):
            return s.Lit(True)
        if self.accept("false"):
            return s.Lit(False)
        if self.accept("null"):
            return s.Lit(None)
        if self.accept("this"):
            return s.This()
        if self.accept("new"):
            cname = self.ident().text
            return s.New(cname, self.args())
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        self.error(f"unexpected token {tok.text or 'end of input'!r}")

    # -- test suites

    def test_suite(self) -> list:
        out = []
        while self.cur.kind != "eof":
            self.expect("test")
            name = self.ident()
            out.append((name.text, name.line, self.block()))
        return out


# -- static checks ------------------------------------------------------------


def _check_program(program: s.Program) -> None:
    for cls in program.classes.values():
        kinds = set(s.PRIMITIVE_KINDS) | set(program.classes)
        for fname, kind in cls.fields.items():
            if kind not in kinds:
                raise SutSyntaxError(f"unknown kind {kind} for field {cls.name}.{fname}", cls.source_file, cls.line)
        for m in cls.constructors + cls.methods:
            for p in m.params:
                if p.kind not in kinds:
                    raise SutSyntaxError(f"unknown kind {p.kind}", cls.source_file, m.line)
            if m.return_kind not in kinds | {s.VOID}:
                raise SutSyntaxError(f"unknown kind {m.return_kind}", cls.source_file, m.line)
            _check_body(program, cls, m.body, {p.name for p in m.params}, cls.source_file)


def _check_body(program, cls, body, scope: set, file: str) -> set:
    scope = set(scope)
    for st in body:
        if isinstance(st, s.AssertStmt):
            raise SutSyntaxError("assert is only allowed in tests", file, st.line)
        for e in _stmt_exprs(st):
            _check_expr(program, cls, e, scope, file, st.line)
        if isinstance(st, s.VarDecl):
            scope.add(st.name)
        elif isinstance(st, s.Assign) and st.name not in scope:
            raise SutSyntaxError(f"undeclared identifier {st.name}", file, st.line)
        elif isinstance(st, s.FieldSet) and st.name not in cls.fields:
            raise SutSyntaxError(f"undeclared field {cls.name}.{st.name}", file, st.line)
        elif isinstance(st, s.If):
            _check_body(program, cls, st.then, scope, file)
            _check_body(program, cls, st.orelse, scope, file)
        elif isinstance(st, s.While):
            _check_body(program, cls, st.body, scope, file)
    return scope


def _stmt_exprs(st) -> list:
    if isinstance(st, (s.VarDecl, s.Assign, s.FieldSet, s.ExprStmt, s.AssertStmt)):
        return [st.expr]
    if isinstance(st, (s.If, s.While)):
        return [st.cond]
    if isinstance(st, s.Return):
        return [st.expr] if st.expr is not None else []
    if isinstance(st, s.Throw):
        return [st.message] if st.message is not None else []
    return []


def _check_expr(program, cls, e, scope, file, line) -> None:
    if isinstance(e, s.Name):
        if e.id not in scope:
            raise SutSyntaxError(f"undeclared identifier {e.id}", file, line)
    elif isinstance(e, s.FieldGet):
        if e.name not in cls.fields:
            raise SutSyntaxError(f"undeclared field {cls.name}.{e.name}", file, line)
    elif isinstance(e, s.New):
        if e.class_name not in program.classes:
            raise SutSyntaxError(f"unknown class {e.class_name}", file, line)
        if program.classes[e.class_name].lookup(s.CONSTRUCTOR, len(e.args)) is None:
            raise SutSyntaxError(f"no constructor {e.class_name}/{len(e.args)}", file, line)
        for a in e.args:
            _check_expr(program, cls, a, scope, file, line)
    elif isinstance(e, s.CallExpr):
        _check_expr(program, cls, e.receiver, scope, file, line)
        if isinstance(e.receiver, s.This) and cls.lookup(e.method, len(e.args)) is None:
            raise SutSyntaxError(f"no method {cls.name}.{e.method}/{len(e.args)}", file, line)
        for a in e.args:
            _check_expr(program, cls, a, scope, file, line)
    elif isinstance(e, s.BinOp):
        _check_expr(program, cls, e.left, scope, file, line)
        _check_expr(program, cls, e.right, scope, file, line)
    elif isinstance(e, s.UnOp):
        _check_expr(program, cls, e.operand, scope, file, line)


# -- public API ---------------------------------------------------------------


def parse_program(sources: Iterable, files: Optional[Iterable] = None) -> s.Program:
    """Parse one or more source texts into a single checked Program.

    ``sources`` may hold plain texts or ``(file_name, text)`` pairs.
    """
    items = []
    names = list(files) if files is not None else None
    for idx, src in enumerate(sources):
        if isinstance(src, tuple):
            items.append(src)
        else:
            fname = names[idx] if names is not None else f"Source{idx}.sut"
            items.append((fname, src))
    if not items:
        raise SutSyntaxError("no classes")
    classes = {}
    for fname, text in items:
        for cls in _Parser(text, fname).program():
            if cls.name in classes:
                raise SutSyntaxError(f"duplicate class {cls.name}", fname, cls.line)
            classes[cls.name] = cls
    if not classes:
        raise SutSyntaxError("no classes")
    program = s.Program(classes)
    _check_program(program)
    return program


class _Flattener:
    """Turns a parsed test body into flat TestCase statements."""

    def __init__(self, program: s.Program, file: str):
        self.program = program
        self.file = file
        self.kinds: dict = {}
        self.out: list = []
        self.tmp = 0

    def fresh(self) -> str:
        while f"_t{self.tmp}" in self.kinds:
            self.tmp += 1
        name = f"_t{self.tmp}"
        self.tmp += 1
        return name

    def arg(self, e, line):
        if isinstance(e, s.Lit):
            return e
        if isinstance(e, s.Name):
            if e.id not in self.kinds:
                raise SutSyntaxError(f"undeclared identifier {e.id}", self.file, line)
            return Ref(e.id)
        var = self.fresh()
        self.bind(var, e, line)
        return Ref(var)

    def bind(self, var: str, e, line) -> None:
        if isinstance(e, s.Lit):
            self.out.append(Declare(var, e.value))
            self.kinds[var] = _literal_kind(e.value)
        elif isinstance(e, s.Name):
            if e.id not in self.kinds:
                raise SutSyntaxError(f"undeclared identifier {e.id}", self.file, line)
            raise SutSyntaxError("variable aliasing is not supported in tests", self.file, line)
        elif isinstance(e, s.New):
            if e.class_name not in self.program:
                raise SutSyntaxError(f"unknown class {e.class_name}", self.file, line)
            args = tuple(self.arg(a, line) for a in e.args)
            self.out.append(Construct(var, e.class_name, args))
            self.kinds[var] = e.class_name
        elif isinstance(e, s.CallExpr):
            self.out.append(self.invoke(var, e, line))
        else:
            raise SutSyntaxError("unsupported expression in test", self.file, line)

    def invoke(self, var, e: s.CallExpr, line) -> Invoke:
        recv = self.arg(e.receiver, line)
        if not isinstance(recv, Ref):
            recv_var = self.fresh()
            self.out.append(Declare(recv_var, recv.value))
            self.kinds[recv_var] = _literal_kind(recv.value)
            recv = Ref(recv_var)
        args = tuple(self.arg(a, line) for a in e.args)
        cls_name = self.kinds.get(recv.name)
        if cls_name not in self.program:
            cls_name = None
        if var is not None:
            kind = None
            if cls_name is not None:
                m = self.program[cls_name].lookup(e.method, len(args))
                kind = m.return_kind if m is not None else None
            self.kinds[var] = kind
        return Invoke(var, recv.name, cls_name, e.method, args)

    def statement(self, st) -> None:
        if isinstance(st, s.VarDecl):
            if st.name in self.kinds:
                raise SutSyntaxError(f"variable {st.name} declared twice", self.file, st.line)
            self.bind(st.name, st.expr, st.line)
        elif isinstance(st, s.ExprStmt) and isinstance(st.expr, s.CallExpr):
            self.out.append(self.invoke(None, st.expr, st.line))
        elif isinstance(st, s.ExprStmt) and isinstance(st.expr, s.New):
            self.bind(self.fresh(), st.expr, st.line)
        elif isinstance(st, s.AssertStmt):
            from .testcase import _expr_names

            for n in _expr_names(st.expr):
                if n not in self.kinds:
                    raise SutSyntaxError(f"undeclared identifier {n}", self.file, st.line)
            self.out.append(Check(st.expr, s.render_expr(st.expr)))
        else:
            raise SutSyntaxError("unsupported statement in test", self.file, st.line)


def _literal_kind(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    return "string"


def parse_tests(text: str, program: s.Program, file: str = "<tests>") -> list:
    """Parse a ``.sut-test`` suite into TestCase objects."""
    out = []
    for name, _line, body in _Parser(text, file).test_suite():
        flat = _Flattener(program, file)
        for st in body:
            flat.statement(st)
        out.append(TestCase(flat.out, name))
    return out
