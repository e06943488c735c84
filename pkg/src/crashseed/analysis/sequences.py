from __future__ import annotations

from dataclasses import dataclass

STATIC = "static"
DYNAMIC = "dynamic"


@dataclass(frozen=True, order=True)
class CallSequence:
    """Ordered actions observed on one object of one class."""

    class_name: str
    actions: tuple
    origin: str = STATIC

    def __post_init__(self) -> None:
        if not self.actions:
            raise ValueError("call sequence must be non-empty")
        if self.origin not in (STATIC, DYNAMIC):
            raise ValueError(f"unknown origin {self.origin!r}")


def merge(*maps: dict) -> dict:
    out: dict = {}
    for m in maps:
        for cls, seqs in m.items():
            out.setdefault(cls, set()).update(seqs)
    return out


def dump_sequences(sequences: dict) -> str:
    """One ``class<TAB>origin<TAB>a1,a2,...`` line per sequence, sorted."""
    rows = sorted(seq for seqs in sequences.values() for seq in seqs)
    return "".join(f"{q.class_name}\t{q.origin}\t{','.join(q.actions)}\n" for q in rows)


def load_sequences(text: str) -> dict:
    out: dict = {}
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not parts[2]:
            raise ValueError(f"malformed sequence line {n}: {line!r}")
        seq = CallSequence(parts[0], tuple(parts[2].split(",")), parts[1])
        out.setdefault(seq.class_name, set()).add(seq)
    return out
