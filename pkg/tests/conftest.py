import csv
import os

import numpy as np
import pytest

from stradaboost import Dataset

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA_DIR = os.path.join(REPO_ROOT, "data")


def data_path(name):
    return os.path.join(DATA_DIR, name)


def make_linear_dataset(n, d=2, noise=0.1, seed=0, name="y"):
    """y = 2*x0 - x1 + ... + noise, a shared synthetic task."""
    rng = np.random.default_rng(seed)
    X = rng.normal(0.0, 1.0, (n, d))
    coefs = np.array([2.0, -1.0] + [0.5] * (d - 2))[:d]
    y = X @ coefs + rng.normal(0.0, noise, n)
    return Dataset(X, y, tuple("x%d" % j for j in range(d)), name)


def write_csv_dataset(path, ds):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(ds.feature_names) + [ds.target_name])
        for row, t in zip(ds.features, ds.targets):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(t))])
    return str(path)


@pytest.fixture
def linear_csv(tmp_path):
    ds = make_linear_dataset(90, d=2, noise=0.2, seed=5)
    return write_csv_dataset(tmp_path / "linear.csv", ds)
