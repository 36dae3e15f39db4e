"""Nearest-neighbor graph clustering of PSD estimates.

Each observation keeps its q nearest neighbors under the L1 PSD distance;
edges are weighted by exp(-2 d) and symmetrized, and the resulting graph is
partitioned with normalized spectral clustering. The cluster count can be
given or estimated from the largest eigengap of the normalized Laplacian.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .distances import distance_matrix, validate_distance_matrix
from .numerics import RngStream, eig_symmetric, kmeans
from .spectra import WindowSpec, estimate_dataset_psds

KMEANS_RESTARTS = 10


@dataclass(frozen=True)
class NnpcResult:
    """Cluster labels plus the cluster count that was used (given or estimated)."""

    labels: np.ndarray
    n_clusters: int


def nearest_neighbor_sets(dist, n_neighbors: int) -> np.ndarray:
    """Indices of the q nearest observations per row, self excluded.

    Row i holds T_i ordered by increasing distance; ties break toward the
    lower index, so the output is deterministic.
    """
    d = validate_distance_matrix(dist)
    n = d.shape[0]
    if not 1 <= n_neighbors <= n - 1:
        raise ValueError(f"n_neighbors must be in 1..{n - 1}, got {n_neighbors}")
    work = d.copy()
    np.fill_diagonal(work, np.inf)
    order = np.argsort(work, axis=1, kind="stable")
    return order[:, :n_neighbors]


def build_adjacency(dist, neighbor_sets) -> np.ndarray:
    """Weighted q-NN adjacency A = Z + Z^T, Z[i, j] = exp(-2 d(i, j)) for j in T_i.

    Entries are 0 (no edge), exp(-2 d) (one-sided neighbor), or 2 exp(-2 d)
    (mutual neighbors).
    """
    d = validate_distance_matrix(dist)
    t = np.asarray(neighbor_sets, dtype=int)
    n = d.shape[0]
    if t.ndim != 2 or t.shape[0] != n or t.min(initial=0) < 0 or t.max(initial=0) >= n:
        raise ValueError("neighbor sets do not match the distance matrix")
    z = np.zeros((n, n))
    rows = np.arange(n)[:, None]
    z[rows, t] = np.exp(-2.0 * d[rows, t])
    return z + z.T


def _validate_adjacency(adjacency) -> np.ndarray:
    a = np.asarray(adjacency, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValueError("adjacency entries must be finite")
    if a.size and float(a.min()) < 0.0:
        raise ValueError("adjacency entries must be nonnegative")
    if not np.allclose(a, a.T, rtol=1e-9, atol=1e-12):
        raise ValueError("adjacency matrix must be symmetric")
    return a


def normalized_laplacian(adjacency) -> np.ndarray:
    """Symmetric normalized Laplacian I - D^{-1/2} A D^{-1/2}.

    Zero-degree nodes get an all-zero row and column. That keeps each of them
    a connected component of its own, so the multiplicity of the eigenvalue 0
    still counts components.
    """
    a = _validate_adjacency(adjacency)
    deg = a.sum(axis=1)
    pos = deg > 0
    inv_sqrt = np.zeros_like(deg)
    inv_sqrt[pos] = deg[pos] ** -0.5
    lap = -(inv_sqrt[:, None] * a * inv_sqrt[None, :])
    idx = np.diag_indices_from(lap)
    lap[idx] += pos.astype(float)
    return lap


def _sign_canonicalize(columns: np.ndarray) -> np.ndarray:
    """Fix each column's sign by a permutation-invariant odd statistic."""
    out = columns.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        stat = float((col**3).sum())
        if stat == 0.0:
            stat = float(col.sum())
        if stat < 0.0:
            out[:, j] = -col
    return out


def _embed_and_kmeans(a: np.ndarray, n_clusters: int, rng: RngStream) -> np.ndarray:
    """Spectral embedding of a graph without isolated nodes, then k-means."""
    decomposition = eig_symmetric(normalized_laplacian(a))
    emb = _sign_canonicalize(decomposition.eigenvectors[:, :n_clusters])
    norms = np.linalg.norm(emb, axis=1)
    scale = norms > 0
    emb[scale] = emb[scale] / norms[scale, None]
    return kmeans(emb, n_clusters, restarts=KMEANS_RESTARTS, rng=rng)


def spectral_cluster(adjacency, n_clusters: int, rng: RngStream | None = None, dist=None) -> np.ndarray:
    """Normalized spectral clustering of a nonnegative symmetric adjacency.

    The graph is embedded by the eigenvectors of the `n_clusters` smallest
    Laplacian eigenvalues, rows are normalized to unit length, and k-means
    (10 restarts) partitions the embedded points.

    Isolated (zero-degree) nodes cannot be placed by the embedding. Each gets
    a label of its own while the cluster budget allows; any further ones are
    attached to the cluster of their nearest neighbor under `dist`, which is
    required in that case. A warning is emitted whenever isolated nodes occur.
    """
    a = _validate_adjacency(adjacency)
    n = a.shape[0]
    if not 1 <= n_clusters <= n:
        raise ValueError(f"n_clusters must be in 1..{n}, got {n_clusters}")
    if rng is None:
        rng = RngStream(0)

    deg = a.sum(axis=1)
    isolated = np.flatnonzero(deg == 0)
    if isolated.size == 0:
        return _embed_and_kmeans(a, n_clusters, rng)

    warnings.warn(
        f"{isolated.size} isolated node(s) in the neighborhood graph",
        RuntimeWarning,
        stacklevel=2,
    )
    core = np.flatnonzero(deg > 0)
    labels = np.full(n, -1, dtype=int)
    if isolated.size < n_clusters:
        # spend one label on each isolated node, the rest on the connected part
        core_clusters = n_clusters - isolated.size
        labels[core] = _embed_and_kmeans(a[np.ix_(core, core)], core_clusters, rng)
        labels[isolated] = core_clusters + np.arange(isolated.size)
        return labels

    if dist is None:
        raise ValueError("a distance matrix is needed to place isolated nodes once they exceed the cluster budget")
    d = validate_distance_matrix(dist)
    if d.shape[0] != n:
        raise ValueError("distance matrix does not match the adjacency")
    if core.size:
        labels[core] = _embed_and_kmeans(a[np.ix_(core, core)], n_clusters, rng)
    else:
        labels[isolated[:n_clusters]] = np.arange(n_clusters)
    for i in isolated:
        if labels[i] >= 0:
            continue
        placed = np.flatnonzero(labels >= 0)
        labels[i] = labels[placed[np.argmin(d[i, placed])]]
    return labels


def estimate_cluster_count(adjacency, max_clusters: int) -> int:
    """Eigengap heuristic for the cluster count.

    Returns the k <= max_clusters maximizing the gap between consecutive
    ascending eigenvalues of the normalized Laplacian; ties go to smaller k.
    """
    a = _validate_adjacency(adjacency)
    n = a.shape[0]
    if not 1 <= max_clusters <= n:
        raise ValueError(f"max_clusters must be in 1..{n}, got {max_clusters}")
    if n == 1:
        return 1
    eigenvalues = eig_symmetric(normalized_laplacian(a)).eigenvalues
    gaps = np.diff(eigenvalues)
    upper = min(max_clusters, n - 1)
    return int(np.argmax(gaps[:upper])) + 1


def cluster_from_distances(
    dist,
    n_neighbors: int,
    n_clusters: int | None = None,
    rng: RngStream | None = None,
    max_clusters: int = 10,
) -> NnpcResult:
    """Neighbor graph plus spectral clustering, starting from a distance matrix."""
    d = validate_distance_matrix(dist)
    neighbor_sets = nearest_neighbor_sets(d, n_neighbors)
    adjacency = build_adjacency(d, neighbor_sets)
    if n_clusters is None:
        n_clusters = estimate_cluster_count(adjacency, min(max_clusters, d.shape[0]))
    labels = spectral_cluster(adjacency, n_clusters, rng=rng, dist=d)
    return NnpcResult(labels=labels, n_clusters=int(n_clusters))


def nnpc_cluster(
    observations,
    n_neighbors: int,
    n_clusters: int | None = None,
    *,
    window: WindowSpec | None = None,
    grid_size: int | None = None,
    unit_power: bool = False,
    rng: RngStream | None = None,
    max_clusters: int = 10,
) -> NnpcResult:
    """Full pipeline: PSD estimates, L1 distances, q-NN graph, spectral clustering.

    With n_clusters=None the count is estimated by the eigengap heuristic,
    capped at max_clusters.
    """
    psds = estimate_dataset_psds(observations, window=window, grid_size=grid_size, unit_power=unit_power)
    return cluster_from_distances(
        distance_matrix(psds), n_neighbors, n_clusters, rng=rng, max_clusters=max_clusters
    )
