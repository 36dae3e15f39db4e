"""Single-pass k-means over the PSD distance with farthest-point seeding.

Fully deterministic: the first center is observation 0, each further center
is the observation farthest from the ones picked so far, and every
observation then joins its nearest center. There is no iteration.
"""

from __future__ import annotations

import numpy as np

from .distances import distance_matrix, validate_distance_matrix
from .spectra import WindowSpec, estimate_dataset_psds


def farthest_point_centers(dist, n_clusters: int) -> np.ndarray:
    """Greedy center indices; ties go to the lower observation index."""
    d = validate_distance_matrix(dist)
    n = d.shape[0]
    if not 1 <= n_clusters <= n:
        raise ValueError(f"n_clusters must be in 1..{n}, got {n_clusters}")
    centers = np.empty(n_clusters, dtype=int)
    centers[0] = 0
    nearest = d[:, 0].copy()
    for p in range(1, n_clusters):
        centers[p] = int(np.argmax(nearest))
        nearest = np.minimum(nearest, d[:, centers[p]])
    return centers


def assign_to_centers(dist, centers) -> np.ndarray:
    """Label each observation by its nearest center (ties to the lower center position)."""
    d = validate_distance_matrix(dist)
    c = np.asarray(centers, dtype=int)
    if c.ndim != 1 or c.size == 0 or c.min() < 0 or c.max() >= d.shape[0]:
        raise ValueError("center indices must be a non-empty vector of valid row indices")
    return np.argmin(d[:, c], axis=1)


def cluster_from_distances(dist, n_clusters: int) -> np.ndarray:
    """Farthest-point seeding plus one assignment pass on a distance matrix."""
    return assign_to_centers(dist, farthest_point_centers(dist, n_clusters))


def km_cluster(
    observations,
    n_clusters: int,
    *,
    window: WindowSpec | None = None,
    grid_size: int | None = None,
    unit_power: bool = False,
) -> np.ndarray:
    """End-to-end deterministic clustering: PSDs, distances, one assignment pass."""
    psds = estimate_dataset_psds(observations, window=window, grid_size=grid_size, unit_power=unit_power)
    return cluster_from_distances(distance_matrix(psds), n_clusters)
