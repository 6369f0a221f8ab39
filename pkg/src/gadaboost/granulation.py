"""Granular-ball generation for ensemble learning.

The dataset is split top-down into pure, size-bounded granules. Impure
granules are split around their per-class centroids. Pure granules above
capacity are split in two around their closest and farthest members.
Granules of a single sample are discarded as probable noise or outliers.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .data import Dataset

log = logging.getLogger(__name__)


class EmptyGranulation(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class InfoGranule:
    indices: np.ndarray  # sorted ascending
    centroid: np.ndarray
    purity: float
    majority_label: int

    @property
    def size(self) -> int:
        return self.indices.size


@dataclass(frozen=True, eq=False)
class GranularBall:
    indices: np.ndarray
    center: np.ndarray
    radial: np.ndarray  # distance of each member to the center, aligned with indices
    majority_label: int

    @property
    def radius(self) -> float:
        return float(self.radial.max())

    @property
    def mean_radius(self) -> float:
        return float(self.radial.mean())

    @property
    def size(self) -> int:
        return self.indices.size


@dataclass(frozen=True, eq=False)
class Granulation:
    balls: list[GranularBall]
    ball_of: np.ndarray  # ball id per sample, -1 where not retained
    discarded: np.ndarray
    capacity: int
    n_samples: int

    @property
    def retained(self) -> np.ndarray:
        return np.flatnonzero(self.ball_of >= 0)

    def sizes(self) -> np.ndarray:
        return np.array([b.size for b in self.balls], dtype=np.int64)


def capacity(N: int, K: int) -> int:
    """Largest pure granule kept whole: floor(sqrt(N) / (K - 1)), at least 2."""
    if N < 1 or K < 2:
        raise ValueError("capacity needs N >= 1 and K >= 2")
    # nested floors: floor(floor(sqrt N) / (K-1)) == floor(sqrt(N) / (K-1))
    raw = math.isqrt(N) // (K - 1)
    if raw < 2:
        log.info("capacity clamped from %d to 2 (N=%d, K=%d)", raw, N, K)
        return 2
    return raw


def centroid(ds: Dataset, indices) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("centroid of an empty index set")
    return ds.features[idx].mean(axis=0)


def purity_and_label(ds: Dataset, indices) -> tuple[float, int]:
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("purity of an empty index set")
    counts = np.bincount(ds.labels[idx], minlength=ds.n_classes)
    label = int(np.argmax(counts))
    return counts[label] / idx.size, label


def make_granule(ds: Dataset, indices) -> InfoGranule:
    idx = np.asarray(indices, dtype=np.int64)
    p, lab = purity_and_label(ds, idx)
    return InfoGranule(idx, centroid(ds, idx), float(p), lab)


def _sqdist(X: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = X - c
    return np.einsum("ij,ij->i", d, d)


def _class_assign(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Index of the nearest per-class centroid (classes in ascending id order)."""
    present = np.unique(y)
    centers = np.stack([X[y == k].mean(axis=0) for k in present])
    d = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
    return np.argmin(d, axis=1)  # first minimum = lowest centroid index


def _near_mask(X: np.ndarray, c: np.ndarray) -> np.ndarray | None:
    """Members closer to the closest-to-``c`` member than to the farthest one.

    None when every member coincides.
    """
    d = _sqdist(X, c)
    near = int(np.argmin(d))
    far = int(np.argmax(d))
    if d[near] == d[far]:
        # all equidistant: take the first member not coincident with `near`
        differs = np.flatnonzero(np.any(X != X[near], axis=1))
        if not differs.size:
            return None
        far = int(differs[0])
    a, b = X[near], X[far]
    # |x-a|^2 <= |x-b|^2  <=>  2 x.(b-a) <= |b|^2 - |a|^2 ; exact ties go to `near`
    lhs = 2.0 * (X @ (b - a))
    rhs = b @ b - a @ a
    mask = lhs <= rhs
    mask[near], mask[far] = True, False
    return mask


def class_split(ds: Dataset, g: InfoGranule) -> tuple[list[InfoGranule], np.ndarray]:
    """Split ``g`` around its per-class centroids.

    Returns the nonempty child granules and the indices purged when all
    members fall to a single centroid (non-majority members are dropped).
    """
    X = ds.features[g.indices]
    y = ds.labels[g.indices]
    assign = _class_assign(X, y)
    used = np.unique(assign)
    if used.size > 1:
        return [make_granule(ds, g.indices[assign == a]) for a in used], np.empty(0, dtype=np.int64)
    keep = y == g.majority_label
    return [make_granule(ds, g.indices[keep])], g.indices[~keep]


def binary_split(ds: Dataset, g: InfoGranule) -> tuple[InfoGranule, InfoGranule]:
    """Split ``g`` around its closest and farthest members from the centroid."""
    if g.size < 2:
        raise ValueError("binary split needs at least 2 members")
    mask = _near_mask(ds.features[g.indices], g.centroid)
    if mask is None:
        log.warning("binary split of %d coincident samples; halving by index", g.size)
        half = g.size // 2
        return make_granule(ds, g.indices[:half]), make_granule(ds, g.indices[half:])
    return make_granule(ds, g.indices[mask]), make_granule(ds, g.indices[~mask])


def make_ball(ds: Dataset, g: InfoGranule) -> GranularBall:
    X = ds.features[g.indices]
    radial = np.sqrt(_sqdist(X, g.centroid))
    return GranularBall(g.indices, g.centroid, radial, g.majority_label)


class _Work:
    """Worklist entry: an InfoGranule plus its cached feature rows and labels."""

    __slots__ = ("idx", "X", "y", "pure")

    def __init__(self, idx, X, y, pure=None):
        self.idx, self.X, self.y = idx, X, y
        self.pure = bool(np.all(y == y[0])) if pure is None else pure

    def take(self, mask, pure=None):
        return _Work(self.idx[mask], self.X[mask], self.y[mask], pure)


def granulate(ds: Dataset, capacity_override: int | None = None) -> Granulation:
    """Partition ``ds`` into pure granular balls of size 2..capacity.

    FIFO worklist, fully deterministic. Samples that end up alone in a granule,
    or are purged as minority members of an unsplittable granule, are
    recorded in ``discarded``. Produces the same granules as repeatedly
    applying ``class_split`` / ``binary_split``, without re-gathering rows.
    """
    N = ds.n_samples
    if N < 2:
        raise EmptyGranulation("granulation needs at least 2 samples")
    cap = capacity_override if capacity_override is not None else capacity(N, ds.n_classes)
    if cap < 2:
        raise ValueError("capacity must be >= 2")

    balls: list[GranularBall] = []
    discarded: list[np.ndarray] = []
    work = deque([_Work(np.arange(N), ds.features, ds.labels)])
    while work:
        w = work.popleft()
        n = w.idx.size
        if n <= 1:
            discarded.append(w.idx)
            continue
        if not w.pure:
            assign = _class_assign(w.X, w.y)
            used = np.unique(assign)
            if used.size > 1:
                children = [w.take(assign == a) for a in used]
            else:
                counts = np.bincount(w.y)
                keep = w.y == np.argmax(counts)
                discarded.append(w.idx[~keep])
                children = [w.take(keep, pure=True)]
            assert all(c.idx.size < n for c in children), "granulation made no progress"
            work.extend(children)
            continue
        c = w.X.mean(axis=0)
        if n > cap:
            mask = _near_mask(w.X, c)
            if mask is None:
                log.warning("binary split of %d coincident samples; halving by index", n)
                mask = np.arange(n) < n // 2
            work.append(w.take(mask, pure=True))
            work.append(w.take(~mask, pure=True))
        else:
            balls.append(GranularBall(w.idx, c, np.sqrt(_sqdist(w.X, c)), int(w.y[0])))

    if not balls:
        raise EmptyGranulation(f"no granular ball survived on {N} samples")
    ball_of = np.full(N, -1, dtype=np.int64)
    for b_id, b in enumerate(balls):
        ball_of[b.indices] = b_id
    disc = np.sort(np.concatenate(discarded)) if discarded else np.empty(0, dtype=np.int64)
    return Granulation(balls, ball_of, disc, cap, N)


def ball_boundary_order(gb: GranularBall) -> np.ndarray:
    """Member indices, farthest from the center first; ties by lower sample index."""
    return gb.indices[np.lexsort((gb.indices, -gb.radial))]


def report(gran: Granulation, ds: Dataset | None = None) -> dict:
    sizes = gran.sizes()
    hist = np.bincount(sizes)
    out = {
        "n_samples": gran.n_samples,
        "capacity": gran.capacity,
        "n_balls": len(gran.balls),
        "n_retained": int(sizes.sum()),
        "n_discarded": int(gran.discarded.size),
        "size_histogram": {int(s): int(c) for s, c in enumerate(hist) if c},
        "mean_radius": float(np.mean([b.radius for b in gran.balls])),
        "max_radius": float(max(b.radius for b in gran.balls)),
        # radius taken as the mean member distance instead of the max
        "mean_avg_distance": float(np.mean([b.mean_radius for b in gran.balls])),
    }
    if ds is not None:
        impure = sum(purity_and_label(ds, b.indices)[0] < 1.0 for b in gran.balls)
        out["impure_balls"] = int(impure)
    return out


def membership_rows(gran: Granulation) -> list[tuple[int, int, float]]:
    return [(b_id, int(i), float(r))
            for b_id, b in enumerate(gran.balls)
            for i, r in zip(b.indices, b.radial)]
