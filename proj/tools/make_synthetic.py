"""Regenerate data/synthetic3.csv: three adjusted-price series driven by a VAR(1) in returns."""
import csv
import pathlib

import numpy as np

rng = np.random.default_rng(20230310)
T = 750
A = np.array([[0.10, 0.25, 0.00], [0.05, 0.15, 0.10], [0.00, 0.20, 0.05]])
L = np.linalg.cholesky(np.array([[1.0, 0.4, 0.2], [0.4, 1.0, 0.3], [0.2, 0.3, 1.0]]))
r = np.zeros((T, 3))
for t in range(1, T):
    r[t] = A @ r[t - 1] + 0.01 * (L @ rng.standard_normal(3))
prices = 100.0 * np.exp(np.cumsum(r, axis=0))
dates = np.busday_offset("2021-01-04", np.arange(T), roll="forward")

out = pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic3.csv"
with out.open("w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["date", "ALPHA", "BETA", "GAMMA"])
    for d, row in zip(dates, prices):
        w.writerow([str(d)] + [f"{v:.4f}" for v in row])
