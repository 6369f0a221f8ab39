import numpy as np
import pytest
from hypothesis import given, strategies as st

from gadaboost.data import (DataError, Dataset, MinMax, inject_label_noise, load_csv,
                            min_max_normalize, relabel_text, synth_blobs, train_test_split)
from gadaboost import learners
from gadaboost.learners import LearnerSpec

from conftest import make_ds


def test_dataset_rejects_bad_input():
    with pytest.raises(DataError):
        Dataset(np.array([[np.nan]]), [0], 2)
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 1)), [0, 2], 2)
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 1)), [0, 0], 1)


def test_dataset_is_read_only():
    ds = make_ds([[0.0], [1.0]], [0, 1])
    with pytest.raises(ValueError):
        ds.features[0, 0] = 5


def test_load_relabels_contiguously(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n")
    ds = load_csv(p)
    assert ds.n_classes == 2
    assert ds.labels.tolist() == [0, 1, 0]
    assert ds.class_names == ("a", "b")
    assert ds.features.shape == (3, 2)


def test_load_numeric_labels_sort_numerically(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("0.5 10\n0.1 2\n0.3 2\n")
    ds = load_csv(p)
    assert ds.class_names == ("2", "10")
    assert ds.labels.tolist() == [1, 0, 0]


def test_load_header_and_named_label(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("cls,f1,f2\nx,1,2\ny,3,4\n")
    ds = load_csv(p, "cls")
    assert ds.feature_names == ("f1", "f2")
    assert ds.features.tolist() == [[1, 2], [3, 4]]
    assert load_csv(p, 0).labels.tolist() == [0, 1]


def test_load_balance_keel(balance_path):
    ds = load_csv(balance_path)
    assert (ds.n_samples, ds.n_features, ds.n_classes) == (625, 4, 3)
    assert ds.feature_names == ("Left-weight", "Left-distance", "Right-weight", "Right-distance")
    assert ds.class_names == ("B", "L", "R")
    assert ds.class_counts().tolist() == [49, 288, 288]


def test_load_ragged_row(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1,2,3,4,a\n1,2,a\n1,2,3,4,b\n")
    with pytest.raises(DataError, match="ragged"):
        load_csv(p)


def test_load_errors(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "missing.csv")
    p = tmp_path / "one.csv"
    p.write_text("1,a\n2,a\n")
    with pytest.raises(DataError, match="single-class"):
        load_csv(p)
    p.write_text("1,a\nfoo,b\n2,a\n")
    with pytest.raises(DataError, match="non-numeric"):
        load_csv(p)


def test_relabel_preserves_other_bytes(balance_path):
    text = balance_path.read_text()
    out = relabel_text(balance_path, -1, {0: "L", 2: "B"})
    a, b = text.splitlines(), out.splitlines()
    diff = [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
    assert len(a) == len(b) and len(diff) == 2
    assert b[diff[0]] == "1.0, 1.0, 1.0, 1.0, L"
    assert b[diff[1]].endswith(", B")


def test_relabel_whitespace(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("  1  2\ta\n3 4 b\n")
    assert relabel_text(p, 2, {0: "b"}) == "  1  2\tb\n3 4 b\n"


# ---------------------------------------------------------------- noise

def test_zero_noise_is_identity():
    ds = synth_blobs(50, 2, 3, seed=0)
    noisy, rec = inject_label_noise(ds, 0.0, seed=1)
    assert np.array_equal(noisy.labels, ds.labels)
    assert rec.flipped_indices.size == 0 and rec.original_labels == {}


def test_noise_count_and_flip():
    ds = synth_blobs(100, 2, 3, seed=0)
    noisy, rec = inject_label_noise(ds, 0.3, seed=7)
    assert rec.flipped_indices.size == 30
    assert np.unique(rec.flipped_indices).size == 30
    assert np.all(noisy.labels[rec.flipped_indices] != ds.labels[rec.flipped_indices])


def test_noise_rate_floor_is_robust():
    ds = synth_blobs(100, 1, 2, seed=0)
    _, rec = inject_label_noise(ds, 0.29, seed=0)
    assert rec.flipped_indices.size == 29


def test_noise_deterministic():
    ds = synth_blobs(80, 2, 4, seed=0)
    a, ra = inject_label_noise(ds, 0.2, seed=3)
    b, rb = inject_label_noise(ds, 0.2, seed=3)
    assert a.labels.tobytes() == b.labels.tobytes()
    assert ra.flipped_indices.tobytes() == rb.flipped_indices.tobytes()


def test_noise_rate_out_of_range():
    ds = synth_blobs(10, 1, 2, seed=0)
    with pytest.raises(DataError):
        inject_label_noise(ds, 1.5)


def test_noise_replacement_is_uniform_over_wrong_classes():
    ds = Dataset(np.zeros((20000, 1)), np.zeros(20000, dtype=int), 4)
    noisy, _ = inject_label_noise(ds, 1.0, seed=0)
    counts = np.bincount(noisy.labels, minlength=4)
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] / 20000 - 1 / 3) < 0.02)


@given(n=st.integers(2, 300), K=st.integers(2, 6), rate=st.floats(0, 1), seed=st.integers(0, 2**31))
def test_noise_properties(n, K, rate, seed):
    rng = np.random.default_rng(seed)
    ds = Dataset(rng.normal(size=(n, 2)), rng.integers(0, K, n), K)
    noisy, rec = inject_label_noise(ds, rate, seed)
    assert noisy.features.tobytes() == ds.features.tobytes()
    assert noisy.n_classes == K and noisy.n_samples == n
    changed = np.flatnonzero(noisy.labels != ds.labels)
    assert changed.tolist() == rec.flipped_indices.tolist()
    assert np.array_equal(rec.restore(noisy).labels, ds.labels)


# ---------------------------------------------------------------- split

def test_split_sizes_and_disjoint():
    ds = make_ds(np.arange(10.0), [0, 1] * 5)
    from gadaboost.data import split_indices
    tr, te = split_indices(ds, 0.2, seed=0)
    assert tr.size == 8 and te.size == 2
    assert not set(tr) & set(te) and set(tr) | set(te) == set(range(10))
    train, test = train_test_split(ds, 0.2, seed=0)
    assert train.n_samples == 8 and test.n_samples == 2


def test_split_deterministic():
    ds = synth_blobs(60, 2, 3, seed=0)
    a = train_test_split(ds, 0.2, seed=4)
    b = train_test_split(ds, 0.2, seed=4)
    assert a[0].features.tobytes() == b[0].features.tobytes()
    assert a[1].labels.tobytes() == b[1].labels.tobytes()


def test_split_degenerate():
    ds = make_ds(np.arange(4.0), [0, 0, 0, 1])
    with pytest.raises(DataError):
        # with 3 test samples at most one remains for training
        train_test_split(ds, 0.75, seed=0)
    with pytest.raises(DataError):
        train_test_split(ds, 1.0)


# ---------------------------------------------------------------- scaling

def test_minmax_basic():
    ds = make_ds([[2.0, 5.0], [4.0, 5.0], [6.0, 5.0]], [0, 1, 0])
    out = min_max_normalize(ds)
    assert out.features[:, 0].tolist() == [0.0, 0.5, 1.0]
    assert out.features[:, 1].tolist() == [0.0, 0.0, 0.0]


def test_minmax_train_params_extend_to_test():
    train = make_ds([[0.0], [10.0]], [0, 1])
    test = make_ds([[-5.0], [20.0]], [0, 1])
    params = MinMax.fit(train)
    assert min_max_normalize(test, params).features[:, 0].tolist() == [-0.5, 2.0]


# ---------------------------------------------------------------- synthetic

def test_blobs_balanced():
    ds = synth_blobs(9, 2, 3, seed=0)
    assert ds.class_counts().tolist() == [3, 3, 3]


def test_blobs_deterministic():
    assert synth_blobs(50, 3, 2, seed=5).features.tobytes() == synth_blobs(50, 3, 2, seed=5).features.tobytes()


def test_blobs_infeasible():
    with pytest.raises(DataError):
        synth_blobs(20, 1, 5, spread=1.0, max_tries=20)


def test_blobs_tiny_spread_separable_by_shallow_tree():
    ds = synth_blobs(300, 4, 3, spread=1e-6, seed=2)
    depth = int(np.ceil(np.log2(3)))
    model = learners.fit(LearnerSpec(max_depth=depth), ds)
    assert np.array_equal(learners.predict(model, ds), ds.labels)
