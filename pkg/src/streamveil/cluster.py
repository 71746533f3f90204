"""Tumbling windows and seeded k-means (k-means++ seeding + Lloyd iterations)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import ValidationError
from .schema import Instance, Schema

DEFAULT_K = 5
DEFAULT_WINDOW = 3000
DEFAULT_MAX_ITER = 100
DEFAULT_TOL = 1e-6
DEFAULT_N_INIT = 10


@dataclass(frozen=True)
class Window:
    index: int
    instances: tuple[Instance, ...]

    def __len__(self):
        return len(self.instances)


def iter_windows(stream: Iterable[Instance], w: int) -> Iterator[Window]:
    """Lazy tumbling windows; only one window is held at a time."""
    if isinstance(w, bool) or not isinstance(w, int) or w < 1:
        raise ValidationError(f"window size must be a positive integer, got {w!r}")
    buf = []
    index = 0
    for inst in stream:
        buf.append(inst)
        if len(buf) == w:
            yield Window(index, tuple(buf))
            buf = []
            index += 1
    if buf:
        yield Window(index, tuple(buf))


def window_partition(stream: Sequence[Instance], w: int) -> list[Window]:
    return list(iter_windows(stream, w))


def feature_matrix(window: Window | Sequence[Instance], schema: Schema) -> np.ndarray:
    """Numeric-feature columns of the window, in schema order."""
    instances = window.instances if isinstance(window, Window) else window
    if len(instances) == 0:
        raise ValidationError("cannot build a feature matrix from an empty window")
    idx = schema.numeric_indices
    return np.array([[inst.values[i] for i in idx] for inst in instances], dtype=float)


@dataclass(frozen=True, eq=False)
class KMeansModel:
    k: int
    centroids: np.ndarray
    seed: int
    iterations: int
    sse: float
    # Final membership of the training points; equals kmeans_assign on them.
    labels: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, KMeansModel):
            return NotImplemented
        return (
            self.k == other.k
            and self.seed == other.seed
            and self.iterations == other.iterations
            and self.sse == other.sse
            and np.array_equal(self.centroids, other.centroids)
            and np.array_equal(self.labels, other.labels)
        )


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # Explicit differences, not the |x|^2 - 2xc + |c|^2 expansion: exact zeros
    # and ties must survive so the lowest-index tie-break is honoured.
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _nearest(points, centroids):
    d = _sq_dists(points, centroids)
    labels = np.argmin(d, axis=1)
    mins = d[np.arange(len(points)), labels]
    return labels, mins


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++: each new center is the best of several D^2 draws."""
    n = len(points)
    trials = 2 + int(np.log(k))
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = np.square(points - centers[0]).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            cand = rng.choice(n, size=trials, p=closest / total)
        else:
            cand = rng.integers(n, size=trials)
        d = np.square(points[cand][:, None, :] - points[None, :, :]).sum(axis=2)
        pots = np.minimum(closest[None, :], d)
        best = int(np.argmin(pots.sum(axis=1)))
        centers[j] = points[cand[best]]
        closest = pots[best]
    return centers


def _update_centroids(points, labels, mins, centroids):
    k = len(centroids)
    new = np.empty_like(centroids)
    empty = []
    for j in range(k):
        members = points[labels == j]
        if len(members):
            new[j] = members.mean(axis=0)
        else:
            empty.append(j)
    if empty:
        # Re-seed empty clusters at the points worst served by their centroid.
        order = np.argsort(-mins, kind="stable")
        for j, i in zip(empty, order):
            new[j] = points[i]
    return new


def _lloyd(points, k, rng, max_iter, tol, on_iteration):
    centroids = _kmeanspp(points, k, rng)
    iterations = 0
    labels, mins = _nearest(points, centroids)
    for iterations in range(1, max_iter + 1):
        if on_iteration is not None:
            on_iteration(iterations, float(mins.sum()))
        new = _update_centroids(points, labels, mins, centroids)
        shift = float(np.sqrt(np.square(new - centroids).sum(axis=1)).max())
        centroids = new
        labels, mins = _nearest(points, centroids)
        if shift <= tol:
            break
    return centroids, labels, float(mins.sum()), iterations


def kmeans_fit(
    points,
    k: int = DEFAULT_K,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    n_init: int = DEFAULT_N_INIT,
    on_iteration: Callable[[int, float], None] | None = None,
) -> KMeansModel:
    """Fit k-means on ``points`` (n x d).

    Runs ``n_init`` seeded k-means++ restarts drawn from one generator and
    keeps the lowest-SSE run (first one wins ties). ``on_iteration`` is
    called as ``(iteration, sse)`` with the SSE of the assignment entering
    each Lloyd step, which is non-increasing.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 2:
        raise ValidationError(f"points must be a 2-d matrix, got shape {x.shape}")
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    if max_iter < 1 or n_init < 1:
        raise ValidationError("max_iter and n_init must be positive")
    if tol < 0:
        raise ValidationError(f"tol must be non-negative, got {tol}")
    if len(x) < k:
        raise ValidationError(f"need at least k={k} points, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("points contain non-finite values")

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        run = _lloyd(x, k, rng, max_iter, tol, on_iteration)
        if best is None or run[2] < best[2]:
            best = run
    centroids, labels, sse, iterations = best
    return KMeansModel(k, centroids, seed, iterations, sse, labels)


def kmeans_assign(points, model: KMeansModel) -> np.ndarray:
    """Nearest-centroid cluster ids; ties go to the lowest cluster index."""
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.centroids.shape[1]:
        raise ValidationError(
            f"points have shape {x.shape}, model expects {model.centroids.shape[1]} columns"
        )
    labels, _ = _nearest(x, model.centroids)
    return labels


def sse(points, centroids, labels) -> float:
    x = np.asarray(points, dtype=float)
    return float(np.square(x - np.asarray(centroids)[labels]).sum())
