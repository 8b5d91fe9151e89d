import numpy as np
import pytest

from stradaboost import (
    Dataset,
    FoldAssignment,
    TransferSplit,
    correlation_split,
    kfold,
    load_csv,
    pearson_correlation,
    standardize,
)

from conftest import make_linear_dataset, write_csv_dataset


def test_dataset_basic_properties():
    ds = Dataset([[1.0, 2.0], [3.0, 4.0]], [5.0, 6.0], ("a", "b"), "y")
    assert ds.n == 2
    assert ds.d == 2
    assert ds.features.dtype == float
    sub = ds.take([1])
    assert sub.n == 1
    assert sub.targets[0] == 6.0
    assert sub.feature_names == ("a", "b")


def test_dataset_validation_errors():
    with pytest.raises(ValueError):
        Dataset([1.0, 2.0], [1.0, 2.0], ("a",), "y")  # 1-D features
    with pytest.raises(ValueError):
        Dataset([[1.0], [2.0]], [1.0], ("a",), "y")  # length mismatch
    with pytest.raises(ValueError):
        Dataset([[1.0]], [1.0], ("a", "b"), "y")  # name count mismatch
    with pytest.raises(ValueError):
        Dataset([[np.nan]], [1.0], ("a",), "y")
    with pytest.raises(ValueError):
        Dataset([[1.0]], [np.inf], ("a",), "y")
    with pytest.raises(ValueError):
        Dataset(np.empty((0, 1)), np.empty(0), ("a",), "y")


def test_load_csv_round_trip(tmp_path, linear_csv):
    ds = load_csv(linear_csv, "y")
    assert ds.n == 90
    assert ds.d == 2
    assert ds.feature_names == ("x0", "x1")
    # writing the parsed dataset back out reproduces the file byte for byte
    again = write_csv_dataset(tmp_path / "again.csv", ds)
    assert open(again, "rb").read() == open(linear_csv, "rb").read()


def test_load_csv_target_column_selection(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b,c\n1,2,3\n4,5,6\n")
    ds = load_csv(str(p), "b")
    assert ds.feature_names == ("a", "c")
    assert ds.targets.tolist() == [2.0, 5.0]
    assert ds.features.tolist() == [[1.0, 3.0], [4.0, 6.0]]


def test_load_csv_error_reporting(tmp_path):
    def write(text):
        p = tmp_path / "bad.csv"
        p.write_text(text)
        return str(p)

    with pytest.raises(FileNotFoundError):
        load_csv(str(tmp_path / "missing.csv"), "y")
    with pytest.raises(ValueError, match="empty file"):
        load_csv(write(""), "y")
    with pytest.raises(ValueError, match="duplicate column"):
        load_csv(write("a,a,y\n1,2,3\n"), "y")
    with pytest.raises(ValueError, match="target column 'z'"):
        load_csv(write("a,y\n1,2\n"), "z")
    with pytest.raises(ValueError, match="row 3 has 1 cells"):
        load_csv(write("a,y\n1,2\n7\n"), "y")
    with pytest.raises(ValueError, match="row 2, column 'a': missing value"):
        load_csv(write("a,y\n,2\n"), "y")
    with pytest.raises(ValueError, match="row 3, column 'y': non-numeric"):
        load_csv(write("a,y\n1,2\n3,oops\n"), "y")
    with pytest.raises(ValueError, match="non-finite"):
        load_csv(write("a,y\n1,inf\n"), "y")
    with pytest.raises(ValueError, match="no data rows"):
        load_csv(write("a,y\n"), "y")


def test_standardize_oracle():
    # mean 2, population std sqrt(2/3); z = (x - 2) / sqrt(2/3)
    ds = Dataset([[1.0], [2.0], [3.0]], [0.0, 0.0, 0.0], ("a",), "y")
    z, stats = standardize(ds)
    expect = np.array([-1.224744871391589, 0.0, 1.224744871391589])
    assert np.allclose(z.features[:, 0], expect, atol=1e-12)
    assert stats["a"]["mean"] == pytest.approx(2.0)
    assert stats["a"]["std"] == pytest.approx(np.sqrt(2.0 / 3.0))


def test_standardize_constant_column_maps_to_zero():
    ds = Dataset([[7.0, 1.0], [7.0, 2.0]], [0.0, 1.0], ("c", "v"), "y")
    z, _ = standardize(ds)
    assert np.all(z.features[:, 0] == 0.0)
    assert not np.all(z.features[:, 1] == 0.0)


def test_standardize_with_training_stats():
    train = make_linear_dataset(50, seed=1)
    test = make_linear_dataset(20, seed=2)
    _, stats = standardize(train)
    z_test, stats2 = standardize(test, stats)
    assert stats2 is stats
    means = np.array([stats[n]["mean"] for n in test.feature_names])
    stds = np.array([stats[n]["std"] for n in test.feature_names])
    assert np.allclose(z_test.features, (test.features - means) / stds)
    with pytest.raises(ValueError, match="stats do not match"):
        standardize(test, {"wrong": {"mean": 0.0, "std": 1.0}})


def test_pearson_correlation_exact_cases():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    assert pearson_correlation(x, 3.0 * x + 1.0) == pytest.approx(1.0)
    assert pearson_correlation(x, -2.0 * x) == pytest.approx(-1.0)
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=200), rng.normal(size=200)
    r = pearson_correlation(a, b)
    assert abs(r - float(np.corrcoef(a, b)[0, 1])) < 1e-12
    with pytest.raises(ValueError, match="zero variance"):
        pearson_correlation(np.ones(5), np.arange(5.0))
    with pytest.raises(ValueError):
        pearson_correlation(x[:1], x[:1])


def test_correlation_split_sizes_and_membership():
    # 10 rows, 3 bins: sizes 3/3/4 with the remainder pushed to later bins
    vals = np.array([5.0, 1.0, 9.0, 3.0, 7.0, 2.0, 8.0, 4.0, 6.0, 0.0])
    ds = Dataset(vals.reshape(-1, 1), np.arange(10.0), ("f",), "y")
    split = correlation_split(ds, split_feature="f", bins=3)
    assert split.target.n == 3
    assert split.source.n == 7
    assert sorted(split.target.features[:, 0]) == [0.0, 1.0, 2.0]
    assert sorted(split.source.features[:, 0]) == [3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]
    assert split.split_feature == "f"
    assert len(split.bin_edges) == 4
    assert split.bin_edges[0] == 0.0 and split.bin_edges[-1] == 9.0
    # source always at least as large as target
    assert split.source.n >= split.target.n


def test_correlation_split_auto_feature_prefers_mid_correlation():
    rng = np.random.default_rng(11)
    n = 400
    y = rng.normal(size=n)
    x_strong = y.copy()  # |r| near 1
    # engineer |r(x_mid, y)| near 0.5
    x_mid = 0.5 * (y - y.mean()) / y.std() + np.sqrt(1 - 0.25) * rng.normal(size=n)
    ds = Dataset(np.column_stack([x_strong, x_mid]), y, ("strong", "mid"), "y")
    split = correlation_split(ds, bins=4)
    assert split.split_feature == "mid"


def test_correlation_split_skips_constant_columns():
    y = np.arange(12.0)
    feats = np.column_stack([np.ones(12), y + 0.0])
    ds = Dataset(feats, y, ("const", "lin"), "y")
    split = correlation_split(ds, bins=3)
    assert split.split_feature == "lin"
    const_ds = Dataset(np.ones((6, 1)), np.arange(6.0), ("c",), "y")
    with pytest.raises(ValueError, match="constant"):
        correlation_split(const_ds, bins=2)
    with pytest.raises(ValueError, match="split feature 'nope'"):
        correlation_split(ds, split_feature="nope", bins=3)
    with pytest.raises(ValueError):
        correlation_split(ds, bins=1)
    with pytest.raises(ValueError):
        correlation_split(ds, bins=13)


def test_kfold_partition_properties():
    for seed in range(5):
        fa = kfold(23, 4, seed)
        assert isinstance(fa, FoldAssignment)
        counts = np.bincount(fa.fold_of, minlength=4)
        assert counts.sum() == 23
        assert counts.max() - counts.min() <= 1
        # remainder goes to the earliest folds
        assert counts.tolist() == [6, 6, 6, 5]
        seen = np.concatenate([fa.test_indices(f) for f in range(4)])
        assert sorted(seen.tolist()) == list(range(23))
        for f in range(4):
            tr, te = fa.train_indices(f), fa.test_indices(f)
            assert np.intersect1d(tr, te).size == 0
            assert tr.size + te.size == 23


def test_kfold_determinism_and_errors():
    a = kfold(40, 5, 123).fold_of
    b = kfold(40, 5, 123).fold_of
    c = kfold(40, 5, 124).fold_of
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(ValueError):
        kfold(3, 4, 0)
    with pytest.raises(ValueError):
        kfold(10, 1, 0)


def test_fold_assignment_validation():
    with pytest.raises(ValueError):
        FoldAssignment(np.array([0, 0, 0, 1]), 3)  # fold 2 empty
    with pytest.raises(ValueError):
        FoldAssignment(np.array([0, 0, 0, 1, 2]), 3)  # sizes differ by 2
    with pytest.raises(ValueError):
        FoldAssignment(np.array([0, 1, 3]), 3)  # out of range


def test_transfer_split_validation():
    src = make_linear_dataset(10, seed=0)
    tgt = make_linear_dataset(4, seed=1)
    TransferSplit(src, tgt, "x0", np.array([0.0, 1.0]))
    with pytest.raises(ValueError, match="at least as many"):
        TransferSplit(tgt, src, "x0", np.array([0.0, 1.0]))
    other = Dataset(tgt.features, tgt.targets, ("a", "b"), "y")
    with pytest.raises(ValueError, match="share feature names"):
        TransferSplit(src, other, "x0", np.array([0.0, 1.0]))
