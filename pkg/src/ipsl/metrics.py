"""Shared statistical primitives: rank correlation, Gini dispersion, summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedResultError


def _average_ranks(values: np.ndarray) -> np.ndarray:
    # Ties share the mean of the rank positions they occupy.
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    sorted_vals = values[order]
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation with average-rank tie handling.

    Raises UndefinedResultError for fewer than 3 observations or when either
    argument has zero rank variance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise UndefinedResultError("spearman needs two equal-length 1-d vectors")
    if len(x) < 3:
        raise UndefinedResultError("spearman needs at least 3 observations")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = float(np.dot(dx, dx))
    vy = float(np.dot(dy, dy))
    if vx == 0.0 or vy == 0.0:
        raise UndefinedResultError("spearman undefined: zero rank variance")
    return float(np.dot(dx, dy) / np.sqrt(vx * vy))


def gini(values) -> float:
    """Gini coefficient of a non-negative vector with positive sum.

    Uses the sorted-index form sum((2i - n - 1) * x_(i)) / (n * sum(x)) with
    1-based i over ascending-sorted values; bounded by 1 - 1/n.
    """
    xs = np.asarray(values, dtype=float)
    if xs.ndim != 1 or len(xs) == 0:
        raise UndefinedResultError("gini needs a non-empty 1-d vector")
    if np.any(xs < 0):
        raise UndefinedResultError("gini is defined for non-negative values only")
    total = float(xs.sum())
    if total <= 0.0:
        raise UndefinedResultError("gini undefined: zero total")
    xs = np.sort(xs)
    n = len(xs)
    idx = np.arange(1, n + 1, dtype=float)
    return float(np.dot(2.0 * idx - n - 1.0, xs) / (n * total))


@dataclass(frozen=True)
class SeriesSummary:
    mean: float
    sd: float
    min: float
    max: float
    count: int


def summarize(series) -> SeriesSummary:
    """Mean, sample standard deviation, min, max, count of a non-empty series."""
    xs = np.asarray(series, dtype=float)
    if xs.ndim != 1 or len(xs) == 0:
        raise UndefinedResultError("summarize needs a non-empty 1-d vector")
    n = len(xs)
    sd = float(xs.std(ddof=1)) if n > 1 else 0.0
    return SeriesSummary(
        mean=float(xs.mean()), sd=sd, min=float(xs.min()), max=float(xs.max()), count=n
    )
