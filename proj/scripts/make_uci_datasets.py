"""Build the bundled UCI-style benchmark CSVs under data/uci/.

Sources are copies of public UCI datasets shipped with common Python
packages (scikit-learn, and the R MASS data bundled by pydataset).
Features are z-scored per column; labels are written as +1 / -1.

    pip download pydataset --no-deps -d /tmp/pyd && tar ... (see README)
    python3 scripts/make_uci_datasets.py --mass-dir <.../rdata/csv/MASS>
"""
import argparse
import csv
import os

import numpy as np
import sklearn
from sklearn.datasets import load_breast_cancer, load_wine


def zscore(x):
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    sd[sd == 0] = 1.0
    return (x - mu) / sd


def write(path, x, y):
    x = zscore(np.asarray(x, dtype=float))
    with open(path, "w", newline="\n") as f:
        for row, label in zip(x, y):
            f.write(",".join(f"{v:.10g}" for v in row) + f",{int(label)}\n")
    print(f"{path}: n={len(y)} m={x.shape[1]} n_pos={int((np.asarray(y) == 1).sum())}")


def read_r_csv(path):
    with open(path) as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mass-dir", required=True)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "uci"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    # Pima Indians diabetes (complete cases, MASS Pima.tr + Pima.te).
    xs, ys = [], []
    for name in ("Pima.tr.csv", "Pima.te.csv"):
        _, rows = read_r_csv(os.path.join(args.mass_dir, name))
        for r in rows:
            xs.append([float(v) for v in r[1:8]])
            ys.append(1 if r[8] == "Yes" else -1)
    write(os.path.join(args.out, "diabetes.csv"), xs, ys)

    # Wisconsin breast cancer (original, 9 cytology features, complete cases).
    _, rows = read_r_csv(os.path.join(args.mass_dir, "biopsy.csv"))
    xs, ys = [], []
    for r in rows:
        if "NA" in r[2:11]:
            continue
        xs.append([float(v) for v in r[2:11]])
        ys.append(1 if r[11] == "malignant" else -1)
    write(os.path.join(args.out, "breast-cancer.csv"), xs, ys)

    # Wisconsin diagnostic breast cancer.
    d = load_breast_cancer()
    write(os.path.join(args.out, "wdbc.csv"), d.data, np.where(d.target == 0, 1, -1))

    # Wine recognition, cultivar 1 versus the rest.
    d = load_wine()
    write(os.path.join(args.out, "wine.csv"), d.data, np.where(d.target == 0, 1, -1))


if __name__ == "__main__":
    main()
