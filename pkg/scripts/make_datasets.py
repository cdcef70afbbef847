"""Regenerate the CSV files bundled in src/cmstar/datasets/.

iris, wine and breast_cancer are copied from scikit-learn's offline copies
of the UCI datasets (scikit-learn is needed only to run this script).
blobs is a seeded synthetic three-class set with overlapping classes.
"""
import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "cmstar" / "datasets"


def write(name, header, rows):
    with (OUT / f"{name}.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def from_sklearn(name, loader):
    bunch = loader()
    names = [n.replace(" ", "_").replace("(", "").replace(")", "") for n in bunch.feature_names]
    labels = [bunch.target_names[t] for t in bunch.target]
    rows = [[repr(float(v)) for v in x] + [str(lab)] for x, lab in zip(bunch.data, labels)]
    write(name, names + ["class"], rows)


def blobs(n_per_class=100, seed=20240501):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [2.5, 0.5], [1.0, 2.5]])
    rows = []
    for c, center in enumerate(centers):
        pts = rng.normal(center, 1.1, size=(n_per_class, 2))
        rows += [[f"{x:.6f}", f"{y:.6f}", f"c{c}"] for x, y in pts]
    write("blobs", ["x1", "x2", "class"], rows)


def worked_example():
    labels = ["A", "A", "A", "B", "B", "C"]
    q = [
        [0.9, 0.1, 0.0],
        [0.8, 0.0, 0.2],
        [0.6, 0.1, 0.3],
        [0.4, 0.3, 0.3],
        [0.1, 0.8, 0.1],
        [0.0, 0.9, 0.1],
    ]
    write("worked_example_truth", ["label"], [[lab] for lab in labels])
    write("worked_example_pred", ["A", "B", "C"], q)


if __name__ == "__main__":
    from sklearn import datasets

    from_sklearn("iris", datasets.load_iris)
    from_sklearn("wine", datasets.load_wine)
    from_sklearn("breast_cancer", datasets.load_breast_cancer)
    blobs()
    worked_example()
