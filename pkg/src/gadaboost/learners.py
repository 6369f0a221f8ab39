"""Weighted CART classification trees used as boosting base learners."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class LearnerSpec:
    kind: str = "tree"
    max_depth: int = 5
    min_leaf: int = 1

    def __post_init__(self):
        if self.kind not in ("tree", "stump"):
            raise ValueError(f"unknown learner kind {self.kind!r}")
        if self.kind == "stump":
            object.__setattr__(self, "max_depth", 1)
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Array-encoded binary tree. ``feature[i] == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (n_nodes, K) weighted class histogram
    n_features: int

    @property
    def n_classes(self) -> int:
        return self.value.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def leaf_class(self) -> np.ndarray:
        return np.argmax(self.value, axis=1)

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):  # children always follow parents
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def same_as(self, other: "FittedModel") -> bool:
        return (self.n_features == other.n_features
                and all(np.array_equal(getattr(self, f), getattr(other, f))
                        for f in ("feature", "threshold", "left", "right", "value")))

    def dump(self, names=None) -> str:
        lines = []

        def walk(i, indent):
            hist = " ".join(f"{v:.4g}" for v in self.value[i])
            if self.feature[i] < 0:
                lines.append(f"{'  ' * indent}leaf -> {self.leaf_class[i]} [{hist}]")
                return
            f = self.feature[i]
            fname = names[f] if names else f"x{f}"
            lines.append(f"{'  ' * indent}{fname} <= {self.threshold[i]:.6g} [{hist}]")
            walk(self.left[i], indent + 1)
            walk(self.right[i], indent + 1)

        walk(0, 0)
        return "\n".join(lines)


_REL_TIE = 1e-12


def _best_split(Xs, Ys, Ws, n_classes, min_leaf):
    """Best (feature, position) over presorted columns, or None.

    ``Xs``/``Ys``/``Ws`` are (q, n) arrays: feature values, labels and weights in
    per-feature sorted order. A split at position i sends sorted entries 0..i left.
    """
    q, n = Xs.shape
    C = np.zeros((q, n, n_classes))
    C[np.arange(q)[:, None], np.arange(n)[None, :], Ys] = Ws
    left = np.cumsum(C, axis=1)[:, :-1, :]
    total = left[0, -1] + C[0, -1]
    right = total - left
    wl = left.sum(-1)
    wr = right.sum(-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sl = np.where(wl > 0, (left ** 2).sum(-1) / wl, 0.0)
        sr = np.where(wr > 0, (right ** 2).sum(-1) / wr, 0.0)
    # weighted child Gini times total weight, up to the constant W
    score = -(sl + sr)
    pos = np.arange(n - 1)
    valid = (Xs[:, 1:] > Xs[:, :-1]) & (pos + 1 >= min_leaf) & (n - pos - 1 >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, np.inf)
    best = score.min()
    tol = _REL_TIE * max(abs(best), 1.0)
    # first in (feature, threshold) order among near-minimal scores
    flat = np.flatnonzero((score <= best + tol).ravel())[0]
    f, i = divmod(int(flat), n - 1)
    return f, i


def fit_arrays(spec: LearnerSpec, X: np.ndarray, y: np.ndarray, n_classes: int,
               weights: np.ndarray | None = None) -> FittedModel:
    n, q = X.shape
    if n == 0:
        raise ValueError("cannot fit on an empty index set")
    if weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (n,):
            raise ValueError("weights must match the number of samples")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        if w.sum() <= 0:
            raise ValueError("all-zero weights")
        if np.all(w == w[0]):
            w = np.ones(n)

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(hist):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(hist)
        return len(feature) - 1

    order0 = np.argsort(X, axis=0, kind="stable").T  # (q, n) row indices
    rows = np.arange(q)[:, None]
    side = np.zeros(n, dtype=bool)
    stack = [(order0, new_node(np.bincount(y, weights=w, minlength=n_classes)), 0)]
    while stack:
        order, node, depth = stack.pop()
        hist = value[node]
        m = order.shape[1]
        if depth >= spec.max_depth or m < 2 * spec.min_leaf or np.count_nonzero(hist > 0) <= 1:
            continue
        Xs = X[order, rows]
        found = _best_split(Xs, y[order], w[order], n_classes, spec.min_leaf)
        if found is None:
            continue
        f, i = found
        thr = 0.5 * (Xs[f, i] + Xs[f, i + 1])
        if not Xs[f, i] < thr:  # adjacent floats: midpoint rounds up onto the upper value
            thr = Xs[f, i]
        side[order[f]] = Xs[f] <= thr
        goes_left = side[order]
        nl = int(goes_left[0].sum())
        # boolean masking keeps each row's sorted order
        lo = order[goes_left].reshape(q, nl)
        ro = order[~goes_left].reshape(q, m - nl)
        li = lo[0]
        ri = ro[0]
        feature[node] = f
        threshold[node] = float(thr)
        ln = new_node(np.bincount(y[li], weights=w[li], minlength=n_classes))
        rn = new_node(np.bincount(y[ri], weights=w[ri], minlength=n_classes))
        left[node], right[node] = ln, rn
        stack.append((ro, rn, depth + 1))
        stack.append((lo, ln, depth + 1))

    return FittedModel(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
        n_features=q,
    )


def predict_arrays(model: FittedModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got shape {X.shape}")
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    active = model.feature[node] >= 0
    while active.any():
        a = rows[active]
        nd = node[a]
        go_left = X[a, model.feature[nd]] <= model.threshold[nd]
        node[a] = np.where(go_left, model.left[nd], model.right[nd])
        active[a] = model.feature[node[a]] >= 0
    return model.leaf_class[node]


def fit(spec: LearnerSpec, ds: Dataset, indices=None, weights=None) -> FittedModel:
    """Grow a weighted-Gini tree on ``ds`` restricted to ``indices``."""
    idx = np.arange(ds.n_samples) if indices is None else np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("cannot fit on an empty index set")
    return fit_arrays(spec, ds.features[idx], ds.labels[idx], ds.n_classes, weights)


def predict(model: FittedModel, ds: Dataset, indices=None) -> np.ndarray:
    X = ds.features if indices is None else ds.features[np.asarray(indices, dtype=np.int64)]
    return predict_arrays(model, X)
