"""Intraprocedural call-sequence collection from method bodies."""

from __future__ import annotations

import logging

from ..sutlang.syntax import Program
from .cfg import MAX_PATHS, build_cfg, enumerate_paths
from .sequences import STATIC, CallSequence

log = logging.getLogger(__name__)


def method_sequences(program: Program, cls, method, max_paths: int = MAX_PATHS) -> set:
    cfg = build_cfg(program, cls, method)
    paths, truncated = enumerate_paths(cfg, max_paths)
    if truncated:
        log.warning(
            "path cap %d reached in %s.%s/%d; remaining branch combinations dropped",
            max_paths, cls.name, method.name, method.arity,
        )
    out = set()
    for path in paths:
        per_track: dict = {}
        for nid in path:
            for track, cname, action in cfg.nodes[nid].events:
                per_track.setdefault((track, cname), []).append(action)
        for (_track, cname), actions in per_track.items():
            out.add(CallSequence(cname, tuple(actions), STATIC))
    return out


def collect_static_sequences(program: Program, max_paths: int = MAX_PATHS) -> dict:
    """Map class name -> set of statically observed CallSequences.

    Every method and constructor of every class is analysed on its own;
    calls made inside callees never show up in the caller's sequences.
    """
    out: dict = {}
    for cname in program.class_names():
        cls = program[cname]
        for m in cls.constructors + cls.methods:
            for seq in method_sequences(program, cls, m, max_paths):
                out.setdefault(seq.class_name, set()).add(seq)
    return out
