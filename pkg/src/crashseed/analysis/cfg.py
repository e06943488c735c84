"""Per-method control-flow graphs whose nodes carry object-call events."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from ..sutlang import syntax as s

log = logging.getLogger(__name__)

MAX_PATHS = 256


@dataclass
class Node:
    id: int
    kind: str  # entry | exit | stmt | branch | loop
    line: int = 0
    events: tuple = ()
    succ: list = field(default_factory=list)


class CFG:
    """Graph for one method body. Loop heads have successors ``[body, exit]``."""

    def __init__(self) -> None:
        self.nodes: list = []
        self.entry = self._new("entry")
        self.exit = self._new("exit")

    def _new(self, kind: str, line: int = 0, events: tuple = ()) -> Node:
        node = Node(len(self.nodes), kind, line, events)
        self.nodes.append(node)
        return node

    def edges(self) -> list:
        return [(n.id, m) for n in self.nodes for m in n.succ]


class _Builder:
    def __init__(self, program: s.Program, cls: s.ClassDef, method: s.MethodDef):
        self.program = program
        self.cls = cls
        self.cfg = CFG()
        # object tracks: variable name -> class name (None when not an object)
        self.kinds: dict = {"this": cls.name}
        for p in method.params:
            self.kinds[p.name] = p.kind if p.kind in program.classes else None
        for fname, kind in cls.fields.items():
            self.kinds["this." + fname] = kind if kind in program.classes else None

    def build(self, body) -> CFG:
        tails = self.block(body, [self.cfg.entry])
        for t in tails:
            t.succ.append(self.cfg.exit.id)
        return self.cfg

    def _link(self, preds, node: Node) -> None:
        for p in preds:
            p.succ.append(node.id)

    def block(self, body, preds: list) -> list:
        for st in body:
            preds = self.statement(st, preds)
        return preds

    def statement(self, st, preds: list) -> list:
        cfg = self.cfg
        if isinstance(st, s.If):
            head = cfg._new("branch", st.line, self.events(st.cond))
            self._link(preds, head)
            then_tails = self.block(st.then, [_Edge(head, 0)])
            else_tails = self.block(st.orelse, [_Edge(head, 1)])
            if not st.orelse:
                else_tails = [_Edge(head, 1)]
            return then_tails + else_tails
        if isinstance(st, s.While):
            head = cfg._new("loop", st.line, self.events(st.cond))
            self._link(preds, head)
            body_tails = self.block(st.body, [_Edge(head, 0)])
            for t in body_tails:
                t.succ.append(head.id)
            return [_Edge(head, 1)]
        events = tuple(self.stmt_events(st))
        node = cfg._new("stmt", st.line, events)
        self._link(preds, node)
        if isinstance(st, (s.Return, s.Throw)):
            node.succ.append(cfg.exit.id)
            return []
        if isinstance(st, s.VarDecl):
            self.kinds.setdefault(st.name, self.expr_class(st.expr))
        return [node]

    # -- event extraction

    def stmt_events(self, st) -> list:
        if isinstance(st, (s.VarDecl, s.Assign)):
            out = self.events(st.expr, top_new_target=st.name)
            return out
        if isinstance(st, s.FieldSet):
            return self.events(st.expr, top_new_target="this." + st.name)
        if isinstance(st, s.ExprStmt):
            return self.events(st.expr)
        if isinstance(st, s.Return):
            return self.events(st.expr) if st.expr is not None else []
        if isinstance(st, s.Throw):
            return self.events(st.message) if st.message is not None else []
        return []

    def track_of(self, e) -> Optional[str]:
        if isinstance(e, s.Name):
            return e.id
        if isinstance(e, s.This):
            return "this"
        if isinstance(e, s.FieldGet):
            return "this." + e.name
        return None

    def expr_class(self, e) -> Optional[str]:
        if isinstance(e, s.New):
            return e.class_name
        track = self.track_of(e)
        if track is not None:
            return self.kinds.get(track)
        if isinstance(e, s.CallExpr):
            rc = self.expr_class(e.receiver)
            if rc in self.program.classes:
                m = self.program[rc].lookup(e.method, len(e.args))
                if m is not None and m.return_kind in self.program.classes:
                    return m.return_kind
        return None

    def events(self, e, top_new_target: Optional[str] = None) -> list:
        """(track, class, action) triples in evaluation order."""
        out: list = []
        if e is None:
            return out
        if isinstance(e, s.New):
            for a in e.args:
                out += self.events(a)
            if top_new_target is not None:
                self.kinds.setdefault(top_new_target, e.class_name)
                if self.kinds.get(top_new_target) == e.class_name:
                    out.append((top_new_target, e.class_name, s.constructor_action(len(e.args))))
        elif isinstance(e, s.CallExpr):
            out += self.events(e.receiver)
            for a in e.args:
                out += self.events(a)
            track = self.track_of(e.receiver)
            cls = self.kinds.get(track) if track is not None else None
            if cls is not None:
                out.append((track, cls, e.method))
        elif isinstance(e, s.BinOp):
            out += self.events(e.left) + self.events(e.right)
        elif isinstance(e, s.UnOp):
            out += self.events(e.operand)
        return out


class _Edge:
    """Dangling edge from a branch/loop head: slot 0 = true, 1 = false."""

    def __init__(self, head: Node, slot: int):
        self.head = head
        self.slot = slot

    @property
    def succ(self):
        return _SlotList(self.head, self.slot)


class _SlotList:
    def __init__(self, head: Node, slot: int):
        self.head = head
        self.slot = slot

    def append(self, target: int) -> None:
        while len(self.head.succ) <= self.slot:
            self.head.succ.append(None)
        if self.head.succ[self.slot] is None:
            self.head.succ[self.slot] = target
        else:
            # several tails funnel through the same slot only via empty blocks
            raise AssertionError("branch slot linked twice")


def build_cfg(program: s.Program, cls: s.ClassDef, method: s.MethodDef) -> CFG:
    return _Builder(program, cls, method).build(method.body)


def enumerate_paths(cfg: CFG, max_paths: int = MAX_PATHS) -> tuple:
    """Acyclic entry-to-exit paths; each loop body is taken at most once.

    On the second arrival at a loop head only its exit edge is followed.
    Returns ``(paths, truncated)``; paths are lists of node ids, explored
    depth-first with true branches before false ones.
    """
    paths: list = []
    truncated = False
    nodes = cfg.nodes
    visits: dict = {}
    path: list = []

    def walk(nid: int) -> None:
        nonlocal truncated
        if len(paths) >= max_paths:
            # every node reaches exit, so any pending prefix is a dropped path
            truncated = True
            return
        path.append(nid)
        node = nodes[nid]
        if nid == cfg.exit.id:
            paths.append(list(path))
        elif node.kind == "loop":
            count = visits.get(nid, 0)
            visits[nid] = count + 1
            for nxt in node.succ if count == 0 else node.succ[1:]:
                walk(nxt)
            visits[nid] = count
        else:
            for nxt in node.succ:
                walk(nxt)
        path.pop()

    walk(cfg.entry.id)
    return paths, truncated
