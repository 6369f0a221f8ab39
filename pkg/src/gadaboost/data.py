"""Dataset container, delimited-text loading, splitting, scaling and label noise."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class DataError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    feature_names: tuple[str, ...] | None = None
    class_names: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.labels)
        if y.size and not np.issubdtype(y.dtype, np.integer):
            if not np.all(np.equal(np.mod(y, 1), 0)):
                raise DataError("labels must be integer class ids")
        y = y.astype(np.int64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"features must be a nonempty N x q matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError("labels must have one entry per row")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or Inf")
        if self.n_classes < 2:
            raise DataError(f"need at least 2 classes, got {self.n_classes}")
        if y.min() < 0 or y.max() >= self.n_classes:
            raise DataError("labels must lie in 0..n_classes-1")
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise DataError("feature_names length does not match feature count")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.n_classes,
                       self.feature_names, self.class_names)

    def with_labels(self, labels) -> "Dataset":
        return Dataset(self.features, labels, self.n_classes, self.feature_names, self.class_names)

    def with_features(self, features) -> "Dataset":
        return Dataset(features, self.labels, self.n_classes, self.feature_names, self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)


@dataclass(frozen=True)
class NoiseRecord:
    flipped_indices: np.ndarray
    original_labels: dict[int, int]
    new_labels: dict[int, int]
    rate: float
    seed: int | None

    def restore(self, ds: Dataset) -> Dataset:
        y = ds.labels.copy()
        for i, lab in self.original_labels.items():
            y[i] = lab
        return ds.with_labels(y)


# ---------------------------------------------------------------- loading

def _split_row(line: str) -> list[str]:
    if "," in line:
        return [c.strip() for c in line.split(",")]
    return line.split()


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _label_sort_key(values: list[str]):
    if all(_is_float(v) for v in values):
        return lambda v: (float(v), v)
    return lambda v: v


@dataclass
class _Parsed:
    lines: list[str]
    row_lines: list[int]  # line index of each data row
    rows: list[list[str]]
    names: list[str] | None
    label_col: int


def _parse(path, label_column) -> _Parsed:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e

    lines = text.splitlines()
    attr_names: list[str] = []
    rows: list[list[str]] = []
    row_lines: list[int] = []
    for i, raw in enumerate(lines):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("@"):
            parts = line.split()
            if parts[0].lower() == "@attribute" and len(parts) > 1:
                # "@attribute class{a,b}" style
                attr_names.append(parts[1].split("{")[0])
            continue
        rows.append(_split_row(line))
        row_lines.append(i)
    if not rows:
        raise DataError(f"{path}: no data rows")

    width = len(rows[0])
    for r, i in zip(rows, row_lines):
        if len(r) != width:
            raise DataError(f"{path}:{i + 1}: ragged row, expected {width} cells, got {len(r)}")
    if width < 2:
        raise DataError("need at least one feature column besides the label")

    lc = label_column
    if isinstance(lc, str) and lc.lstrip("-").isdigit():
        lc = int(lc)
    header = None
    first = rows[0]
    probe = lc % width if isinstance(lc, int) and -width <= lc < width else None
    if not all(_is_float(c) for j, c in enumerate(first) if j != probe):
        header = first
        rows, row_lines = rows[1:], row_lines[1:]
        if not rows:
            raise DataError(f"{path}: header only, no data rows")
    names = header or (attr_names if len(attr_names) == width else None)

    if isinstance(lc, str):
        if names is None or lc not in names:
            raise DataError(f"label column {lc!r} not found")
        lc = list(names).index(lc)
    if not -width <= lc < width:
        raise DataError(f"label column {lc} out of range for {width} columns")
    return _Parsed(lines, row_lines, rows, names, lc % width)


def load_csv(path, label_column: int | str = -1) -> Dataset:
    """Read comma- or whitespace-delimited numeric text.

    KEEL ``@`` directive lines are skipped (``@attribute`` names are used as
    column names when no header row is present). A first row that does not
    parse as numbers in its feature cells is taken as a header. Labels are
    re-encoded to 0..K-1 in sorted order of their text, numerically when all
    of them look numeric.
    """
    p = _parse(path, label_column)
    lc = p.label_col
    raw_labels = [r[lc] for r in p.rows]
    X = np.empty((len(p.rows), len(p.rows[0]) - 1))
    for i, r in enumerate(p.rows):
        try:
            X[i] = [float(c) for c in r[:lc] + r[lc + 1:]]
        except ValueError as e:
            raise DataError(f"{path}:{p.row_lines[i] + 1}: non-numeric feature cell ({e})") from e

    classes = sorted(set(raw_labels), key=_label_sort_key(raw_labels))
    if len(classes) < 2:
        raise DataError(f"{path}: single-class file ({classes[0]!r}) cannot be boosted")
    code = {c: k for k, c in enumerate(classes)}
    y = np.array([code[v] for v in raw_labels], dtype=np.int64)
    fnames = None if p.names is None else tuple(n for j, n in enumerate(p.names) if j != lc)
    return Dataset(X, y, len(classes), fnames, tuple(classes))


def relabel_text(path, label_column, new_labels: dict[int, str]) -> str:
    """Source text of ``path`` with the label cell of the given data rows replaced.

    Every other byte of the file is preserved.
    """
    p = _parse(path, label_column)
    lines = list(p.lines)
    for row, lab in new_labels.items():
        i = p.row_lines[row]
        line = lines[i]
        if "," in line:
            cells = line.split(",")
            cell = cells[p.label_col]
            lead = cell[: len(cell) - len(cell.lstrip())]
            trail = cell[len(cell.rstrip()):]
            cells[p.label_col] = lead + lab + trail
            lines[i] = ",".join(cells)
        else:
            parts = re.split(r"(\s+)", line)
            # even positions are cells (a leading separator yields an empty first cell)
            cell_pos = [j for j in range(0, len(parts), 2) if parts[j] != ""]
            parts[cell_pos[p.label_col]] = lab
            lines[i] = "".join(parts)
    text = Path(path).read_text()
    return "\n".join(lines) + ("\n" if text.endswith("\n") else "")


def save_csv(ds: Dataset, path, class_names: bool = True) -> None:
    """Write ``ds`` as comma-delimited text, label last, with a header row."""
    names = ds.feature_names or tuple(f"x{j}" for j in range(ds.n_features))
    lines = [",".join(list(names) + ["class"])]
    labels = ds.labels
    if class_names and ds.class_names is not None:
        labels = [ds.class_names[k] for k in ds.labels]
    for row, lab in zip(ds.features, labels):
        lines.append(",".join(repr(float(v)) for v in row) + f",{lab}")
    atomic_write(path, "\n".join(lines) + "\n")


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


# ---------------------------------------------------------------- noise, split, scaling

def _count(rate: float, n: int) -> int:
    # guards against 0.29 * 100 == 28.999999999999996
    return int(math.floor(rate * n + 1e-9))


def inject_label_noise(ds: Dataset, rate: float, seed: int | None = None) -> tuple[Dataset, NoiseRecord]:
    if not 0.0 <= rate <= 1.0:
        raise DataError(f"noise rate must be in [0, 1], got {rate}")
    rng = np.random.default_rng(seed)
    n = ds.n_samples
    m = _count(rate, n)
    flipped = np.sort(rng.choice(n, size=m, replace=False)) if m else np.empty(0, dtype=np.int64)
    y = ds.labels.copy()
    # uniform over the K-1 wrong classes
    shift = rng.integers(1, ds.n_classes, size=m)
    y[flipped] = (y[flipped] + shift) % ds.n_classes
    record = NoiseRecord(
        flipped_indices=_frozen(flipped.astype(np.int64)),
        original_labels={int(i): int(ds.labels[i]) for i in flipped},
        new_labels={int(i): int(y[i]) for i in flipped},
        rate=float(rate),
        seed=seed,
    )
    return ds.with_labels(y), record


def train_test_split(ds: Dataset, test_fraction: float = 0.2, seed: int | None = None) -> tuple[Dataset, Dataset]:
    tr, te = split_indices(ds, test_fraction, seed)
    return ds.subset(tr), ds.subset(te)


def split_indices(ds: Dataset, test_fraction: float = 0.2, seed: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 < test_fraction < 1.0:
        raise DataError(f"test fraction must be in (0, 1), got {test_fraction}")
    n = ds.n_samples
    n_test = _count(test_fraction, n)
    perm = np.random.default_rng(seed).permutation(n)
    test, train = np.sort(perm[:n_test]), np.sort(perm[n_test:])
    if train.size == 0 or np.unique(ds.labels[train]).size < 2:
        raise DataError("degenerate split: training part has fewer than 2 classes")
    return train, test


@dataclass(frozen=True)
class MinMax:
    low: np.ndarray
    span: np.ndarray

    @classmethod
    def fit(cls, ds: Dataset) -> "MinMax":
        lo = ds.features.min(axis=0)
        span = ds.features.max(axis=0) - lo
        return cls(_frozen(lo), _frozen(span))

    def transform(self, X: np.ndarray) -> np.ndarray:
        # constant training columns map to 0 on train, shift-only elsewhere
        safe = np.where(self.span > 0, self.span, 1.0)
        return (X - self.low) / safe


def min_max_normalize(ds: Dataset, params: MinMax | None = None) -> Dataset:
    """Map each feature affinely onto [0, 1] using ``params`` (fit on ``ds`` if absent).

    Values of a split that fall outside the fitted range are not clamped.
    """
    params = params if params is not None else MinMax.fit(ds)
    return ds.with_features(params.transform(ds.features))


# ---------------------------------------------------------------- synthetic

def synth_blobs(n: int, q: int, K: int, spread: float = 0.1, seed: int | None = None,
                box: float = 1.0, max_tries: int = 1000) -> Dataset:
    """K isotropic Gaussian classes with centers in ``[0, box]^q``.

    Centers are redrawn until all pairs are at least ``4 * spread`` apart.
    Class sizes differ by at most one.
    """
    if n < K or q < 1 or K < 2:
        raise DataError("need n >= K >= 2 and q >= 1")
    if spread <= 0:
        raise DataError("spread must be positive")
    rng = np.random.default_rng(seed)
    min_gap = 4.0 * spread
    for _ in range(max_tries):
        centers = rng.uniform(0.0, box, size=(K, q))
        d = np.sqrt(((centers[:, None, :] - centers[None, :, :]) ** 2).sum(-1))
        if np.all(d[np.triu_indices(K, 1)] >= min_gap):
            break
    else:
        raise DataError(f"could not place {K} centers {min_gap:g} apart in [0, {box}]^{q}")
    counts = np.full(K, n // K)
    counts[: n % K] += 1
    y = np.repeat(np.arange(K), counts)
    X = centers[y] + spread * rng.standard_normal((n, q))
    perm = rng.permutation(n)
    return Dataset(X[perm], y[perm], K)
