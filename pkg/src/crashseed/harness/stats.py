"""Summary statistics for experiment reports."""

from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np
from scipy.stats import rankdata


def vargha_delaney_a12(a: Sequence[float], b: Sequence[float]) -> float:
    """Vargha-Delaney A12 from the rank sum of ``a`` (midranks for ties).

    The value is P(x > y) + P(x = y) / 2 for x drawn from ``a`` and y from
    ``b``. With evaluation counts as the samples, a value below 0.5 means the
    runs in ``a`` needed fewer evaluations than those in ``b``.
    """
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        raise ValueError("both samples must be non-empty")
    ranks = rankdata(np.concatenate([np.asarray(a, dtype=float), np.asarray(b, dtype=float)]))
    r_a = float(ranks[:m].sum())
    return (r_a / m - (m + 1) / 2.0) / n


def majority_outcome(statuses: Sequence[str], order: Sequence[str]) -> str:
    """Most frequent status; ties go to the status listed last in ``order``."""
    if not statuses:
        raise ValueError("no outcomes")
    counts = Counter(statuses)
    return max(counts, key=lambda s: (counts[s], order.index(s)))


def reproduction_ratio(statuses: Sequence[str], reproduced: str = "reproduced") -> float:
    if not statuses:
        raise ValueError("no outcomes")
    return sum(1 for s in statuses if s == reproduced) / len(statuses)
