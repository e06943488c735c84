"""Deterministic tree-walking interpreter with execution tracing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import syntax as s
from .parser import HARNESS_CLASS
from .stacktrace import Frame, format_stack_trace
from .testcase import Check, Construct, Declare, Invoke, Ref, TestCase

DEFAULT_STEP_LIMIT = 100_000

HARNESS_METHOD = "run"
HARNESS_FILE = "harness"

NULL_DEREFERENCE = "NullDereference"
DIVIDE_BY_ZERO = "DivideByZero"
BUDGET_EXHAUSTED = "BudgetExhausted"
HARNESS_ERROR = "HarnessError"
TYPE_MISMATCH = "TypeMismatch"
NO_SUCH_METHOD = "NoSuchMethod"
INDEX_OUT_OF_BOUNDS = "IndexOutOfBounds"
ASSERTION_FAILED = "AssertionFailed"
ILLEGAL_ACCESS = "IllegalAccess"

BUILTIN_EXCEPTIONS = (NULL_DEREFERENCE, DIVIDE_BY_ZERO, BUDGET_EXHAUSTED, HARNESS_ERROR)


class SutObject:
    __slots__ = ("class_name", "oid", "fields")

    def __init__(self, class_name: str, oid: int, fields: dict):
        self.class_name = class_name
        self.oid = oid
        self.fields = fields

    def __repr__(self) -> str:
        return f"{self.class_name}@{self.oid}"


@dataclass(frozen=True)
class ObjRef:
    """Snapshot of an object argument inside a call record."""

    oid: int
    class_name: str


@dataclass(frozen=True)
class CallRecord:
    oid: int
    class_name: str
    action: str
    args: tuple
    from_harness: bool
    statement: int


@dataclass(frozen=True)
class Thrown:
    exception_type: str
    message: Optional[str]
    frames: tuple

    @property
    def innermost(self) -> Frame:
        return self.frames[0]

    def to_text(self) -> str:
        return format_stack_trace(self.exception_type, self.message, self.frames)


@dataclass
class ExecutionResult:
    executed_lines: list = field(default_factory=list)
    call_events: list = field(default_factory=list)
    thrown: Optional[Thrown] = None
    steps: int = 0
    evaluations: int = 1
    calls: list = field(default_factory=list)
    var_objects: dict = field(default_factory=dict)

    def to_json(self) -> str:
        thrown = None
        if self.thrown is not None:
            thrown = {
                "type": self.thrown.exception_type,
                "message": self.thrown.message,
                "frames": [[f.class_name, f.method, f.line, f.file] for f in self.thrown.frames],
            }
        return json.dumps(
            {
                "executed_lines": [list(x) for x in self.executed_lines],
                "call_events": [list(x) for x in self.call_events],
                "thrown": thrown,
                "steps": self.steps,
                "evaluations": self.evaluations,
            },
            sort_keys=True,
        )

    def events_by_object(self) -> dict:
        out: dict = {}
        for oid, cls, action in self.call_events:
            out.setdefault(oid, (cls, []))[1].append(action)
        return out


class SutRaise(Exception):
    def __init__(self, exc_type: str, message: Optional[str], frames: tuple):
        super().__init__(exc_type)
        self.exc_type = exc_type
        self.message = message
        self.frames = frames


class _HarnessFault(Exception):
    pass


class _BudgetExceeded(Exception):
    pass


class _Ret:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


def _kind_of(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, str):
        return "string"
    return value.class_name


def value_text(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, str)):
        return str(value)
    return repr(value)


def conforms(value, kind: str) -> bool:
    """Whether a value may be bound to a parameter of the given kind."""
    if kind == "int":
        return type(value) is int
    if kind == "bool":
        return type(value) is bool
    if value is None:
        return True
    if kind == "string":
        return type(value) is str
    return isinstance(value, SutObject) and value.class_name == kind


class Interpreter:
    """Runs TestCases against an immutable Program; one instance per thread."""

    def __init__(self, program: s.Program, step_limit: int = DEFAULT_STEP_LIMIT):
        if step_limit <= 0:
            raise ValueError("step limit must be positive")
        self.program = program
        self.step_limit = step_limit

    # -- entry point

    def run(self, test: TestCase) -> ExecutionResult:
        self.result = ExecutionResult()
        self.frames = [[HARNESS_CLASS, HARNESS_METHOD, 0, HARNESS_FILE]]
        self.next_oid = 1
        self.steps = 0
        self.stmt_index = 0
        env: dict = {}
        res = self.result
        try:
            for idx, st in enumerate(test.statements):
                self.stmt_index = idx
                self.frames[0][2] = idx + 1
                self._tick()
                self._run_test_statement(st, env)
        except SutRaise as exc:
            res.thrown = Thrown(exc.exc_type, exc.message, exc.frames)
        except _BudgetExceeded:
            res.thrown = Thrown(BUDGET_EXHAUSTED, f"step limit {self.step_limit} exceeded", (self._harness_frame(),))
        except _HarnessFault as exc:
            res.thrown = Thrown(HARNESS_ERROR, str(exc), (self._harness_frame(),))
        except RecursionError:
            res.thrown = Thrown(BUDGET_EXHAUSTED, "call depth exceeded", (self._harness_frame(),))
        res.steps = self.steps
        res.var_objects = {k: v.oid for k, v in env.items() if isinstance(v, SutObject)}
        return res

    def _harness_frame(self) -> Frame:
        f = self.frames[0]
        return Frame(f[0], f[1], f[2], f[3])

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise _BudgetExceeded()

    def _raise(self, exc_type: str, message: Optional[str] = None):
        frames = tuple(Frame(f[0], f[1], f[2], f[3]) for f in reversed(self.frames))
        raise SutRaise(exc_type, message, frames)

    # -- harness-level statements

    def _arg_value(self, arg, env):
        if isinstance(arg, Ref):
            if arg.name not in env:
                raise _HarnessFault(f"undefined variable {arg.name}")
            return env[arg.name]
        return arg.value

    def _run_test_statement(self, st, env: dict) -> None:
        if isinstance(st, Declare):
            env[st.var] = st.value
        elif isinstance(st, Construct):
            cls = self.program.classes.get(st.class_name)
            if cls is None:
                raise _HarnessFault(f"unknown class {st.class_name}")
            args = [self._arg_value(a, env) for a in st.args]
            ctor = cls.lookup(s.CONSTRUCTOR, len(args))
            if ctor is None or ctor.private:
                raise _HarnessFault(f"no accessible constructor {st.class_name}/{len(args)}")
            self._check_args(ctor, args)
            env[st.var] = self._construct(cls, ctor, args)
        elif isinstance(st, Invoke):
            if st.receiver not in env:
                raise _HarnessFault(f"undefined variable {st.receiver}")
            recv = env[st.receiver]
            args = [self._arg_value(a, env) for a in st.args]
            if isinstance(recv, SutObject):
                cls = self.program.classes[recv.class_name]
                m = cls.lookup(st.method, len(args))
                if m is None or m.private:
                    raise _HarnessFault(f"no accessible method {recv.class_name}.{st.method}/{len(args)}")
                self._check_args(m, args)
            value = self._call(recv, st.method, args)
            if st.var is not None:
                env[st.var] = value
        elif isinstance(st, Check):
            ok = self._eval(st.expr, env, None, None)
            if ok is not True:
                self._raise(ASSERTION_FAILED, st.source)
        else:
            raise _HarnessFault(f"unsupported statement {st!r}")

    def _check_args(self, m: s.MethodDef, args) -> None:
        for p, v in zip(m.params, args):
            if not conforms(v, p.kind):
                raise _HarnessFault(f"argument {p.name} expects {p.kind}, got {_kind_of(v)}")

    # -- calls

    def _record(self, obj: SutObject, action: str, args) -> None:
        res = self.result
        res.call_events.append((obj.oid, obj.class_name, action))
        snap = tuple(ObjRef(a.oid, a.class_name) if isinstance(a, SutObject) else a for a in args)
        res.calls.append(CallRecord(obj.oid, obj.class_name, action, snap, len(self.frames) == 1, self.stmt_index))

    def _construct(self, cls: s.ClassDef, ctor: s.MethodDef, args) -> SutObject:
        fields = {}
        for fname, kind in cls.fields.items():
            fields[fname] = 0 if kind == "int" else (False if kind == "bool" else None)
        obj = SutObject(cls.name, self.next_oid, fields)
        self.next_oid += 1
        self._record(obj, ctor.action, args)
        self._invoke_body(cls, ctor, obj, args)
        return obj

    def _call(self, recv, method: str, args):
        if recv is None:
            self._raise(NULL_DEREFERENCE, f"cannot invoke {method}() on null")
        if isinstance(recv, str):
            return self._string_method(recv, method, args)
        if not isinstance(recv, SutObject):
            self._raise(TYPE_MISMATCH, f"cannot invoke {method}() on {_kind_of(recv)}")
        cls = self.program.classes[recv.class_name]
        m = cls.lookup(method, len(args))
        if m is None:
            self._raise(NO_SUCH_METHOD, f"{recv.class_name}.{method}/{len(args)}")
        if m.private and self.frames[-1][0] != cls.name:
            self._raise(ILLEGAL_ACCESS, f"{recv.class_name}.{method} is private")
        self._record(recv, m.action, args)
        return self._invoke_body(cls, m, recv, args)

    def _invoke_body(self, cls: s.ClassDef, m: s.MethodDef, this: SutObject, args):
        env = {p.name: v for p, v in zip(m.params, args)}
        self.frames.append([cls.name, m.name, m.line, cls.source_file])
        ret = self._exec_block(m.body, env, cls, this)
        self.frames.pop()
        return ret.value if ret is not None else None

    def _string_method(self, recv: str, method: str, args):
        n = len(args)
        if method == "length" and n == 0:
            return len(recv)
        if method == "isEmpty" and n == 0:
            return len(recv) == 0
        if method == "charAt" and n == 1:
            i = args[0]
            if type(i) is not int:
                self._raise(TYPE_MISMATCH, "charAt expects int")
            if not 0 <= i < len(recv):
                self._raise(INDEX_OUT_OF_BOUNDS, f"index {i} out of range for length {len(recv)}")
            return recv[i]
        if method in ("equals", "startsWith", "contains", "indexOf") and n == 1:
            other = args[0]
            if method == "equals":
                return type(other) is str and other == recv
            if other is None:
                self._raise(NULL_DEREFERENCE, f"null argument to {method}")
            if type(other) is not str:
                self._raise(TYPE_MISMATCH, f"{method} expects string")
            if method == "startsWith":
                return recv.startswith(other)
            if method == "contains":
                return other in recv
            return recv.find(other)
        self._raise(NO_SUCH_METHOD, f"string.{method}/{n}")

    # -- statements

    def _exec_block(self, body, env: dict, cls, this) -> Optional[_Ret]:
        frame = self.frames[-1]
        lines = self.result.executed_lines
        for st in body:
            frame[2] = st.line
            lines.append((frame[0], frame[1], st.line))
            self._tick()
            t = type(st)
            if t is s.ExprStmt:
                self._eval(st.expr, env, cls, this)
            elif t is s.VarDecl or t is s.Assign:
                env[st.name] = self._eval(st.expr, env, cls, this)
            elif t is s.FieldSet:
                this.fields[st.name] = self._eval(st.expr, env, cls, this)
            elif t is s.If:
                branch = st.then if self._cond(st.cond, env, cls, this) else st.orelse
                ret = self._exec_block(branch, env, cls, this)
                if ret is not None:
                    return ret
            elif t is s.While:
                while self._cond(st.cond, env, cls, this):
                    ret = self._exec_block(st.body, env, cls, this)
                    if ret is not None:
                        return ret
                    frame[2] = st.line
                    self._tick()
            elif t is s.Return:
                return _Ret(None if st.expr is None else self._eval(st.expr, env, cls, this))
            elif t is s.Throw:
                msg = None
                if st.message is not None:
                    msg = value_text(self._eval(st.message, env, cls, this))
                self._raise(st.exc_type, msg)
            else:
                self._raise(TYPE_MISMATCH, f"unsupported statement {t.__name__}")
        return None

    def _cond(self, expr, env, cls, this) -> bool:
        v = self._eval(expr, env, cls, this)
        if type(v) is not bool:
            self._raise(TYPE_MISMATCH, f"condition is {_kind_of(v)}, expected bool")
        return v

    # -- expressions

    def _eval(self, e, env, cls, this):
        t = type(e)
        if t is s.Lit:
            return e.value
        if t is s.Name:
            try:
                return env[e.id]
            except KeyError:
                if len(self.frames) == 1:
                    raise _HarnessFault(f"undefined variable {e.id}") from None
                self._raise(TYPE_MISMATCH, f"unbound local {e.id}")
        if t is s.FieldGet:
            return this.fields[e.name]
        if t is s.This:
            return this
        if t is s.CallExpr:
            recv = self._eval(e.receiver, env, cls, this)
            args = [self._eval(a, env, cls, this) for a in e.args]
            return self._call(recv, e.method, args)
        if t is s.New:
            target = self.program.classes[e.class_name]
            args = [self._eval(a, env, cls, this) for a in e.args]
            ctor = target.lookup(s.CONSTRUCTOR, len(args))
            if ctor.private and (cls is None or cls.name != target.name):
                self._raise(ILLEGAL_ACCESS, f"constructor of {target.name} is private")
            return self._construct(target, ctor, args)
        if t is s.BinOp:
            return self._binop(e, env, cls, this)
        if t is s.UnOp:
            v = self._eval(e.operand, env, cls, this)
            if e.op == "!":
                if type(v) is not bool:
                    self._raise(TYPE_MISMATCH, "operand of ! must be bool")
                return not v
            if type(v) is not int:
                self._raise(TYPE_MISMATCH, "operand of unary - must be int")
            return -v
        self._raise(TYPE_MISMATCH, f"unsupported expression {t.__name__}")

    def _binop(self, e, env, cls, this):
        op = e.op
        if op == "&&" or op == "||":
            left = self._eval(e.left, env, cls, this)
            if type(left) is not bool:
                self._raise(TYPE_MISMATCH, f"operand of {op} must be bool")
            if (op == "&&" and not left) or (op == "||" and left):
                return left
            right = self._eval(e.right, env, cls, this)
            if type(right) is not bool:
                self._raise(TYPE_MISMATCH, f"operand of {op} must be bool")
            return right
        a = self._eval(e.left, env, cls, this)
        b = self._eval(e.right, env, cls, this)
        if op == "==" or op == "!=":
            if isinstance(a, SutObject) or isinstance(b, SutObject):
                same = a is b
            else:
                same = type(a) is type(b) and a == b
            return same if op == "==" else not same
        if op == "+" and (type(a) is str or type(b) is str):
            return value_text(a) + value_text(b)
        if type(a) is not int or type(b) is not int:
            self._raise(TYPE_MISMATCH, f"operands of {op} must be int")
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/" or op == "%":
            if b == 0:
                self._raise(DIVIDE_BY_ZERO, "/ by zero")
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            return q if op == "/" else a - b * q
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        self._raise(TYPE_MISMATCH, f"unknown operator {op}")


def execute_test(program: s.Program, test: TestCase, step_limit: int = DEFAULT_STEP_LIMIT) -> ExecutionResult:
    return Interpreter(program, step_limit).run(test)
