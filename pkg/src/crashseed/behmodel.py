"""2-gram transition systems inferred from call sequences.

A state stands for the last action executed (plus the initial state), so the
next action only depends on the previous one. Observed sequence ends mark
terminal states, which are the legal ends of a generated path.
"""

from __future__ import annotations

import functools
import logging
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from .analysis.sequences import CallSequence

log = logging.getLogger(__name__)

INITIAL = "<s0>"
STOP_PROBABILITY = 0.5
DEFAULT_MAX_LENGTH = 20


class EmptyModelError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionSystem:
    class_name: str
    transitions: frozenset
    terminals: frozenset
    n: int = 2

    @property
    def states(self) -> frozenset:
        return frozenset({INITIAL} | {t[2] for t in self.transitions} | {t[0] for t in self.transitions})

    @property
    def is_empty(self) -> bool:
        return not self.transitions

    def outgoing(self, state: str) -> list:
        """Sorted (action, to-state) pairs leaving ``state``."""
        return sorted((a, dst) for src, a, dst in self.transitions if src == state)

    def step(self, state: str, action: str) -> Optional[str]:
        for src, a, dst in self.transitions:
            if src == state and a == action:
                return dst
        return None

    def actions(self) -> list:
        return sorted({a for _s, a, _d in self.transitions})

    def to_text(self) -> str:
        lines = [f"class\t{self.class_name}", "terminals\t" + ",".join(sorted(self.terminals))]
        lines += [f"{src}\t{a}\t{dst}" for src, a, dst in sorted(self.transitions)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TransitionSystem":
        lines = text.splitlines()
        if len(lines) < 2 or not lines[0].startswith("class\t") or not lines[1].startswith("terminals\t"):
            raise ValueError("malformed model header")
        name = lines[0].split("\t", 1)[1]
        term = lines[1].split("\t", 1)[1]
        terminals = frozenset(term.split(",")) if term else frozenset()
        transitions = set()
        for line in lines[2:]:
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"malformed transition {line!r}")
            transitions.add(tuple(parts))
        return cls(name, frozenset(transitions), terminals)


@dataclass(frozen=True)
class AbstractObjectBehavior:
    """One path through a class model, prior to concretization."""

    class_name: str
    actions: tuple

    def __post_init__(self) -> None:
        if not self.actions:
            raise ValueError("abstract object behavior must be non-empty")

    def __len__(self) -> int:
        return len(self.actions)


class ModelStats(NamedTuple):
    states: int
    transitions: int
    bfs_height: int


def infer_model(class_name: str, sequences: Iterable) -> TransitionSystem:
    transitions = set()
    terminals = set()
    for seq in sequences:
        actions = seq.actions if isinstance(seq, CallSequence) else tuple(seq)
        if isinstance(seq, CallSequence) and seq.class_name != class_name:
            raise ValueError(f"sequence of {seq.class_name} given to model of {class_name}")
        if not actions:
            continue
        prev = INITIAL
        for a in actions:
            transitions.add((prev, a, a))
            prev = a
        terminals.add(prev)
    if not transitions:
        log.warning("empty model for %s", class_name)
    return TransitionSystem(class_name, frozenset(transitions), frozenset(terminals))


def infer_models(sequences: dict) -> dict:
    return {c: infer_model(c, seqs) for c, seqs in sorted(sequences.items())}


def accepts(model: TransitionSystem, sequence: Iterable) -> bool:
    """True when the actions trace a path from the initial state."""
    state = INITIAL
    for a in sequence:
        state = model.step(state, a)
        if state is None:
            return False
    return True


def bfs_depths(model: TransitionSystem) -> dict:
    depth = {INITIAL: 0}
    queue = deque([INITIAL])
    while queue:
        cur = queue.popleft()
        for _a, dst in model.outgoing(cur):
            if dst not in depth:
                depth[dst] = depth[cur] + 1
                queue.append(dst)
    return depth


def model_stats(model: TransitionSystem) -> ModelStats:
    return ModelStats(len(model.states), len(model.transitions), max(bfs_depths(model).values()))


def has_cycle(model: TransitionSystem) -> bool:
    adj: dict = {}
    for src, _a, dst in model.transitions:
        adj.setdefault(src, []).append(dst)
    color: dict = {}

    def visit(u) -> bool:
        color[u] = 1
        for v in adj.get(u, ()):
            c = color.get(v, 0)
            if c == 1 or (c == 0 and visit(v)):
                return True
        color[u] = 2
        return False

    return any(color.get(u, 0) == 0 and visit(u) for u in sorted(adj))


@functools.lru_cache(maxsize=256)
def _adjacency(model: TransitionSystem) -> dict:
    adj: dict = {}
    for src, a, dst in sorted(model.transitions):
        adj.setdefault(src, []).append((a, dst))
    return adj


def random_path(
    model: TransitionSystem, max_length: int = DEFAULT_MAX_LENGTH, rng: Optional[random.Random] = None
) -> AbstractObjectBehavior:
    """Uniform random walk from the initial state.

    At a terminal state the walk stops with probability one half; it always
    stops at ``max_length`` actions or when no transition leaves the state.
    """
    if max_length < 1:
        raise ValueError("max length must be at least 1")
    if model.is_empty:
        raise EmptyModelError("empty model")
    rng = rng or random.Random()
    adj = _adjacency(model)
    state = INITIAL
    path: list = []
    while len(path) < max_length:
        if path and state in model.terminals and rng.random() < STOP_PROBABILITY:
            break
        options = adj.get(state)
        if not options:
            break
        action, state = options[rng.randrange(len(options))]
        path.append(action)
    return AbstractObjectBehavior(model.class_name, tuple(path))
