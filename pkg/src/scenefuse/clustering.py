"""Seeded Lloyd's K-Means plus the scaled-distance confidence score.

One engine serves every caller: acoustic feature vectors, palette vectors,
and raw pixel triples.  Everything is deterministic given the seed — the
k-means++ draw, the lowest-index tie-break on assignment, and the repair
rule that hands an empty cluster the single worst-represented point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooFewPoints, ZeroK


@dataclass(frozen=True)
class KMeansParams:
    """Knobs for one fit.  `scale` feeds the confidence score downstream.

    A fit restarts `n_init` times from fresh k-means++ draws of one seeded
    stream and keeps the lowest-inertia run, so results stay deterministic
    while single-start local minima get smoothed out.
    """

    k: int
    max_iters: int = 300
    tol: float = 1e-6
    seed: int = 0
    scale: float = 10000.0
    n_init: int = 10

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ZeroK(f"k must be at least 1, got {self.k}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol < 0.0:
            raise ValueError("tol cannot be negative")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.n_init < 1:
            raise ValueError("n_init must be at least 1")


@dataclass(frozen=True, eq=False)
class KMeansModel:
    """Fitted centroids plus the objective trace that produced them.

    inertia_history holds the within-cluster sum of squared distances
    measured after every assignment pass, final pass included; it never
    increases, and its last entry equals `inertia`.
    """

    centroids: np.ndarray  # shape (k, dim)
    dim: int
    params: KMeansParams
    inertia: float
    inertia_history: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.inertia < 0.0:
            raise ValueError("inertia cannot be negative")


@dataclass(frozen=True)
class ClusterAssignment:
    label: int
    distance: float


def _as_matrix(points) -> np.ndarray:
    rows = [np.asarray(p, dtype=np.float64) for p in points]
    if not rows:
        raise TooFewPoints("no points at all")
    dim = rows[0].size
    for r in rows:
        if r.ndim != 1 or r.size != dim:
            raise DimensionMismatch("points do not all share one dimension")
    return np.vstack(rows)


def _sq_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from every point to every centroid."""
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _assign(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-centroid labels (ties to the lowest index) plus all sq-dists."""
    sq = _sq_distances(points, centroids)
    return sq.argmin(axis=1), sq


def _init_pp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++: each next centroid drawn proportional to squared distance."""
    n = points.shape[0]
    chosen = np.empty((k, points.shape[1]), dtype=np.float64)
    idx = int(rng.integers(n))
    chosen[0] = points[idx]
    closest_sq = ((points - chosen[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(closest_sq.sum())
        if total > 0.0:
            # inverse-CDF draw keeps the stream deterministic per seed
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest_sq), r, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        chosen[j] = points[idx]
        closest_sq = np.minimum(closest_sq, ((points - chosen[j]) ** 2).sum(axis=1))
    return chosen


def _repair_empties(
    points: np.ndarray,
    centroids: np.ndarray,
    labels: np.ndarray,
    sq: np.ndarray,
) -> bool:
    """Give every empty cluster the point farthest from its current centroid.

    Empty clusters are visited in ascending index order; each seizes the
    worst-represented point whose own cluster still has another member
    (ties broken by the lowest point index).  Returns True when anything
    moved.  Inertia can only drop: the seized point's distance becomes 0.
    """
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    changed = False
    for empty in np.flatnonzero(counts == 0):
        point_sq = sq[np.arange(points.shape[0]), labels]
        donors = counts[labels] > 1
        candidates = np.flatnonzero(donors)
        if candidates.size == 0:  # unreachable while n >= k, kept defensive
            continue
        victim = int(candidates[np.argmax(point_sq[candidates])])
        counts[labels[victim]] -= 1
        labels[victim] = empty
        counts[empty] = 1
        centroids[empty] = points[victim]
        sq[:, empty] = ((points - centroids[empty]) ** 2).sum(axis=1)
        changed = True
    return changed


def _lloyd_run(
    matrix: np.ndarray, params: KMeansParams, rng: np.random.Generator
) -> tuple[np.ndarray, list[float]]:
    n = matrix.shape[0]
    centroids = _init_pp(matrix, params.k, rng)
    history: list[float] = []

    for _ in range(params.max_iters):
        labels, sq = _assign(matrix, centroids)
        _repair_empties(matrix, centroids, labels, sq)
        history.append(float(sq[np.arange(n), labels].sum()))

        updated = centroids.copy()
        for c in range(params.k):
            members = matrix[labels == c]
            if members.shape[0] > 0:
                updated[c] = members.mean(axis=0)
        shift = float(np.max(np.abs(updated - centroids)))
        centroids = updated
        if shift <= params.tol:
            break

    # one closing assignment against the final centroids, repaired so that
    # every cluster owns at least one point
    labels, sq = _assign(matrix, centroids)
    _repair_empties(matrix, centroids, labels, sq)
    history.append(float(sq[np.arange(n), labels].sum()))
    return centroids, history


def fit(points, params: KMeansParams) -> KMeansModel:
    """Run Lloyd's algorithm from seeded k-means++ starts, keeping the best.

    Deterministic: identical points and params give bit-identical centroids.
    Within each run, convergence is declared when no centroid coordinate
    moved more than params.tol (infinity norm) in one update; across runs,
    the lowest final inertia wins, earliest run on a tie.

    Raises:
        TooFewPoints: fewer points than clusters.
        DimensionMismatch: points of mixed lengths.
    """
    matrix = _as_matrix(points)
    n = matrix.shape[0]
    if n < params.k:
        raise TooFewPoints(f"{n} points cannot fill {params.k} clusters")

    rng = np.random.default_rng(params.seed)
    best: tuple[np.ndarray, list[float]] | None = None
    for _ in range(params.n_init):
        centroids, history = _lloyd_run(matrix, params, rng)
        if best is None or history[-1] < best[1][-1]:
            best = (centroids, history)
    centroids, history = best

    return KMeansModel(
        centroids=centroids,
        dim=int(matrix.shape[1]),
        params=params,
        inertia=history[-1],
        inertia_history=tuple(history),
    )


def predict(model: KMeansModel, point) -> ClusterAssignment:
    """Nearest centroid for one vector; ties go to the lowest label."""
    vec = np.asarray(point, dtype=np.float64)
    if vec.ndim != 1 or vec.size != model.dim:
        raise DimensionMismatch(
            f"point has {vec.size} dims, model expects {model.dim}"
        )
    sq = ((model.centroids - vec[None, :]) ** 2).sum(axis=1)
    label = int(sq.argmin())
    return ClusterAssignment(label=label, distance=float(np.sqrt(sq[label])))


def confidence(distance: float, scale: float = 10000.0) -> float:
    """Scaled-distance confidence: 100 - distance/scale, clamped to [0, 100].

    Zero distance scores a perfect 100; anything at or past 100*scale floors
    at 0 rather than going negative.
    """
    if distance < 0.0:
        raise ValueError("distance cannot be negative")
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    return min(100.0, max(0.0, 100.0 - distance / scale))
