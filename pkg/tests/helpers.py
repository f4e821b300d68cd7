"""Shared independent oracles for the test suite.

Everything here is deliberately naive (loops, enumeration) so it cannot
share a bug with the vectorized implementations it checks.
"""

from __future__ import annotations

import numpy as np


def brute_masked_sq_distance(x, observed, code) -> float:
    """Explicit loop over observed components, ascending index order."""
    total = 0.0
    for k in range(len(x)):
        if observed[k]:
            d = x[k] - code[k]
            total += d * d
    return total


def brute_winner(x, observed, codes) -> int:
    """Argmin of the loop-based distance, lowest index on ties."""
    best, best_u = None, None
    for u in range(codes.shape[0]):
        d = brute_masked_sq_distance(x, observed, codes[u])
        if best is None or d < best:
            best, best_u = d, u
    return best_u


def set_partitions(items):
    """All partitions of ``items`` into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def within_class_ss(points, blocks) -> float:
    """Total within-class sum of squares of a partition."""
    total = 0.0
    for b in blocks:
        pts = points[list(b)]
        mu = pts.mean(axis=0)
        total += float(((pts - mu) ** 2).sum())
    return total


def best_partition_at_k(points, k):
    """Globally optimal k-partition by enumeration, plus the optimality margin.

    Returns (partition as set of frozensets, margin to the second-best ESS);
    margin is None when only one k-partition exists.
    """
    n = points.shape[0]
    best, second, best_part = None, None, None
    for part in set_partitions(range(n)):
        if len(part) != k:
            continue
        e = within_class_ss(points, part)
        if best is None or e < best:
            second = best
            best, best_part = e, part
        elif second is None or e < second:
            second = e
    margin = None if second is None else second - best
    return {frozenset(b) for b in best_part}, margin


def labels_to_partition(labels) -> set[frozenset]:
    labels = np.asarray(labels)
    return {
        frozenset(np.flatnonzero(labels == lab).tolist())
        for lab in np.unique(labels)
    }


def naive_pearson(x, y) -> float:
    """Textbook Pearson correlation, plain Python accumulation."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    dx = sum((a - mx) ** 2 for a in x)
    dy = sum((b - my) ** 2 for b in y)
    return num / (dx * dy) ** 0.5
