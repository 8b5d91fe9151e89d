#!/usr/bin/env python3
"""Rebuild the benchmark CSVs under data/ from their public sources.

The three datasets ship with the repository; this script documents where
they come from and can re-download and re-normalize them when network
access is available. Each output is checked against the recorded SHA256
so a rebuilt file is guaranteed to match the committed one.

Sources:
  concrete  Concrete Compressive Strength (I-Cheng Yeh), UCI ML Repository.
            https://archive.ics.uci.edu/dataset/165/concrete+compressive+strength
            Mirrored in the CRAN package AppliedPredictiveModeling (data
            object `concrete`), which is the route used to build the
            committed copy.
  housing   Boston Housing (Harrison & Rubinfeld), originally distributed
            via the StatLib/UCI housing archive.
            http://lib.stat.cmu.edu/datasets/boston
            Mirrored in the mlxtend python package (boston_housing.csv).
  autompg   Auto MPG, UCI ML Repository (ordered by model year; rows with
            missing horsepower dropped, car name dropped).
            https://archive.ics.uci.edu/dataset/9/auto+mpg
            Mirrored in the mlxtend python package (autompg.csv.gz).

Normalization applied to every file: comma-delimited, one header row,
all-numeric cells, target column last.
"""

import csv
import gzip
import hashlib
import io
import os
import sys
import urllib.request

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")

EXPECTED_SHA256 = {
    "concrete.csv": "2eb1f6474cfa6a4f1285f4c6f64fded393c8f63cdafa9e044401bee89f50561e",
    "housing.csv": "9f3696399d6107fa1a900d42d3bd9d5593130151432f3398f0efb418ac2db29e",
    "autompg.csv": "272c3387b6c3e660f1c1a0d84c8d595125fa6e99b0b29e9f6da5d1e65be6d413",
}

CONCRETE_XLS = ("https://archive.ics.uci.edu/static/public/165/"
                "concrete+compressive+strength.zip")
CONCRETE_HEADER = ["Cement", "BlastFurnaceSlag", "FlyAsh", "Water",
                   "Superplasticizer", "CoarseAggregate", "FineAggregate",
                   "Age", "Strength"]

HOUSING_URL = ("https://raw.githubusercontent.com/rasbt/mlxtend/master/"
               "mlxtend/data/data/boston_housing.csv")
HOUSING_HEADER = ["crim", "zn", "indus", "chas", "nox", "rm", "age", "dis",
                  "rad", "tax", "ptratio", "b", "lstat", "medv"]

AUTOMPG_URL = ("https://raw.githubusercontent.com/rasbt/mlxtend/master/"
               "mlxtend/data/data/autompg.csv.gz")
AUTOMPG_HEADER = ["cylinders", "displacement", "horsepower", "weight",
                  "acceleration", "model_year", "origin", "mpg"]


def sha256_of(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def verify(name):
    path = os.path.join(DATA_DIR, name)
    if not os.path.exists(path):
        return False, "missing"
    actual = sha256_of(path)
    if actual != EXPECTED_SHA256[name]:
        return False, "sha256 mismatch (%s)" % actual
    return True, "ok"


def _write_rows(name, header, rows):
    path = os.path.join(DATA_DIR, name)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def fetch_housing():
    raw = urllib.request.urlopen(HOUSING_URL, timeout=60).read()
    rows = list(csv.reader(io.StringIO(raw.decode("utf-8"))))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows[0]) != len(HOUSING_HEADER):
        raise RuntimeError("unexpected housing column count %d" % len(rows[0]))
    return _write_rows("housing.csv", HOUSING_HEADER, rows)


def fetch_autompg():
    raw = gzip.decompress(urllib.request.urlopen(AUTOMPG_URL, timeout=60).read())
    rows = list(csv.reader(io.StringIO(raw.decode("utf-8"))))
    # upstream layout: mpg first, car name last; move mpg last, drop name
    out = []
    for r in rows[1:] if not rows[0][0].replace(".", "").isdigit() else rows:
        if len(r) < 8:
            continue
        mpg, rest = r[0], r[1:8]
        out.append(rest + [mpg])
    return _write_rows("autompg.csv", AUTOMPG_HEADER, out)


def fetch_concrete():
    # the UCI archive ships an .xls; reading it needs xlrd or pandas
    import zipfile
    blob = urllib.request.urlopen(CONCRETE_XLS, timeout=60).read()
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        xls_name = next(n for n in zf.namelist() if n.lower().endswith(".xls"))
        payload = zf.read(xls_name)
    try:
        import pandas as pd
    except ImportError as exc:
        raise RuntimeError("rebuilding concrete.csv needs pandas+xlrd") from exc
    frame = pd.read_excel(io.BytesIO(payload))
    rows = [[("%g" % v) for v in row] for row in frame.to_numpy()]
    return _write_rows("concrete.csv", CONCRETE_HEADER, rows)


def main():
    os.makedirs(DATA_DIR, exist_ok=True)
    failures = 0
    for name, fetch in (("concrete.csv", fetch_concrete),
                        ("housing.csv", fetch_housing),
                        ("autompg.csv", fetch_autompg)):
        ok, why = verify(name)
        if ok:
            print("%-14s already present and verified" % name)
            continue
        print("%-14s %s; fetching..." % (name, why))
        try:
            fetch()
        except Exception as exc:
            print("%-14s FAILED to fetch: %s" % (name, exc))
            failures += 1
            continue
        ok, why = verify(name)
        print("%-14s rebuilt: %s" % (name, why))
        if not ok:
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
