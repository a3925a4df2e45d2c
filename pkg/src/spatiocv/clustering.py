"""Seeded k-means (Lloyd's algorithm, k-means++ start) and column standardization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class KMeansResult:
    """Outcome of :func:`kmeans`.

    ``assignment`` holds 1-based labels; ``sse_trace`` the within-cluster sum
    of squares after every assignment step of the winning restart.
    """

    assignment: np.ndarray
    centers: np.ndarray
    sse: float
    iterations: int
    converged: bool
    sse_trace: tuple[float, ...] = field(default=(), repr=False)
    restart_traces: tuple[tuple[float, ...], ...] = field(default=(), repr=False)


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _sse(points: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    d = points - centers[labels]
    return float(np.einsum("ij,ij->", d, d))


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = _sq_dists(points, centers[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        # total > 0 is guaranteed by the distinct-points precondition
        i = int(rng.choice(n, p=closest / total))
        centers[j] = points[i]
        closest = np.minimum(closest, _sq_dists(points, centers[j : j + 1])[:, 0])
    return centers


def _repair_empty(points: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int) -> None:
    """Reseed each empty cluster with the point farthest from its own center."""
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        d = np.einsum("ij,ij->i", points - centers[labels], points - centers[labels])
        d[counts[labels] <= 1] = -1.0
        i = int(np.argmax(d))
        counts[labels[i]] -= 1
        labels[i] = j
        counts[j] = 1
        centers[j] = points[i]


def _lloyd(points, k, rng, max_iter, tol):
    centers = _kmeanspp(points, k, rng)
    trace: list[float] = []
    labels = np.zeros(len(points), dtype=np.int64)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        labels = np.argmin(_sq_dists(points, centers), axis=1)
        _repair_empty(points, labels, centers, k)
        trace.append(_sse(points, labels, centers))
        new = np.empty_like(centers)
        for j in range(k):
            new[j] = points[labels == j].mean(axis=0)
        shift = float(np.sqrt(np.max(np.sum((new - centers) ** 2, axis=1))))
        centers = new
        if shift < tol:
            converged = True
            break
    sse = _sse(points, labels, centers)
    trace.append(sse)
    return labels, centers, sse, it, converged, trace


def kmeans(
    points,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-8,
    restarts: int = 10,
) -> KMeansResult:
    """Best-of-``restarts`` k-means by total within-cluster SSE.

    Restart ``r`` draws from a generator seeded with ``(seed, r)`` so results do
    not depend on execution order. Ties between restarts go to the lowest index.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise ValueError("points must be an n x d array with d >= 1")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if k < 1 or restarts < 1 or max_iter < 1:
        raise ValueError("k, restarts and max_iter must be >= 1")
    n_distinct = len(np.unique(pts, axis=0))
    if k > n_distinct:
        raise ValueError(f"k={k} exceeds the number of distinct points ({n_distinct})")

    best = None
    traces = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        res = _lloyd(pts, k, rng, max_iter, tol)
        traces.append(tuple(res[5]))
        if best is None or res[2] < best[2]:
            best = res
    labels, centers, sse, it, converged, trace = best
    labels = labels + 1
    labels.setflags(write=False)
    return KMeansResult(
        assignment=labels,
        centers=centers,
        sse=sse,
        iterations=it,
        converged=converged,
        sse_trace=tuple(trace),
        restart_traces=tuple(traces),
    )


def standardize(features, names: Optional[Sequence[str]] = None):
    """Center columns and scale by the sample (n - 1) standard deviation.

    Returns ``(standardized, means, sds)``. A constant column raises
    ``ValueError`` naming the column.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if len(x) < 2:
        raise ValueError("standardize needs at least 2 rows")
    means = x.mean(axis=0)
    centered = x - means
    sds = centered.std(axis=0, ddof=1)
    for j, sd in enumerate(sds):
        if not sd > 0:
            label = names[j] if names is not None else f"column {j}"
            raise ValueError(f"{label} is constant and cannot be standardized")
    z = centered / sds
    # a second centering pass removes rounding drift in the mean
    z -= z.mean(axis=0)
    return z, means, sds
