"""L1 distance between PSD estimates and the pairwise distance matrix.

The distance is half the grid average of the absolute PSD difference, a
Riemann sum for (1/2) integral over one period. For unit-power spectra it
lies in [0, 1], with 1 reached by disjoint supports.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .spectra import PsdEstimate


def l1_distance(first: PsdEstimate, second: PsdEstimate) -> float:
    """Half the grid-averaged absolute difference between two PSD estimates."""
    if first.grid_size != second.grid_size:
        raise ValueError("PSD estimates must share one frequency grid")
    return 0.5 * float(np.mean(np.abs(first.values - second.values)))


def distance_matrix(psds: Sequence[PsdEstimate]) -> np.ndarray:
    """Symmetric matrix of pairwise L1 PSD distances with a zero diagonal."""
    if len(psds) == 0:
        raise ValueError("need at least one PSD estimate")
    sizes = {p.grid_size for p in psds}
    if len(sizes) != 1:
        raise ValueError("PSD estimates must share one frequency grid")
    stacked = np.stack([p.values for p in psds])
    n = stacked.shape[0]
    out = np.zeros((n, n))
    for i in range(n - 1):
        out[i, i + 1:] = 0.5 * np.mean(np.abs(stacked[i + 1:] - stacked[i]), axis=1)
    return out + out.T


def validate_distance_matrix(dist) -> np.ndarray:
    """Check that `dist` is a finite, nonnegative, symmetric, zero-diagonal matrix."""
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.all(np.isfinite(d)):
        raise ValueError("distance matrix entries must be finite")
    if d.size and float(d.min()) < -1e-12:
        raise ValueError("distance matrix entries must be nonnegative")
    if not np.allclose(d, d.T, rtol=1e-9, atol=1e-12):
        raise ValueError("distance matrix must be symmetric")
    if float(np.abs(np.diagonal(d)).max(initial=0.0)) > 1e-12:
        raise ValueError("distance matrix diagonal must be zero")
    return d
