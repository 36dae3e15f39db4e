"""Clustering quality scores, invariant to renaming of the predicted labels."""

from __future__ import annotations

import math

import numpy as np

from .numerics import min_cost_assignment


def _compact(labels) -> np.ndarray:
    """Map arbitrary label values to 0..k-1."""
    y = np.asarray(labels).ravel()
    if y.size == 0:
        raise ValueError("labelings must be non-empty")
    _, compact = np.unique(y, return_inverse=True)
    return compact


def confusion_matrix(predicted, truth) -> np.ndarray:
    """Square count matrix C[t, p] over compacted truth/predicted labels."""
    p = _compact(predicted)
    t = _compact(truth)
    if p.shape != t.shape:
        raise ValueError("label vectors must have equal length")
    k = int(max(p.max(), t.max())) + 1
    counts = np.zeros((k, k), dtype=int)
    np.add.at(counts, (t, p), 1)
    return counts


def clustering_error(predicted, truth) -> float:
    """Fraction of misclustered observations under the best label bijection.

    The best bijection is a minimum-cost assignment on the negated confusion
    matrix, so the score is invariant to how either labeling names clusters.
    """
    counts = confusion_matrix(predicted, truth)
    n = counts.sum()
    perm = min_cost_assignment(-counts.astype(float))
    matched = int(counts[np.arange(counts.shape[0]), perm].sum())
    return 1.0 - matched / n


def confusion_entropy(predicted, truth) -> float:
    """Normalized weighted entropy of the per-true-cluster label distributions.

    Each true cluster contributes the Shannon entropy of its predicted-label
    histogram, weighted by cluster size and normalized by log of the number
    of clusters, so the score lies in [0, 1]. A single cluster scores 0 by
    convention; exact recovery scores 0.
    """
    counts = confusion_matrix(predicted, truth).astype(float)
    n = counts.sum()
    k = counts.shape[0]
    if k <= 1:
        return 0.0
    score = 0.0
    for row in counts:
        total = row.sum()
        if total == 0.0:
            continue
        probs = row[row > 0.0] / total
        entropy = float(-(probs * np.log(probs)).sum())
        score += (total / n) * entropy / math.log(k)
    return score
