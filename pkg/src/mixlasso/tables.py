"""CSV writers for every artifact the toolkit emits.

Floats are written with ``repr`` (shortest round-trip form), so rereading a
file reproduces the exact values and identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def bic_csv(table, display) -> str:
    return to_csv(
        ["K", "loglik", "n_params", "bic", "display"],
        [(r.K, r.loglik, r.n_params, r.bic, z) for r, z in zip(table.rows, display)],
    )


def path_csv(path) -> str:
    rows = (
        (lam, name, coef)
        for lam, coefs in zip(path.lambdas, path.coefs)
        for name, coef in zip(path.feature_names, coefs)
    )
    return to_csv(["lambda", "feature", "coefficient"], rows)


def ranking_csv(ranking) -> str:
    return to_csv(
        ["rank", "feature", "entry_lambda", "sign", "final_coef"],
        [(i + 1, f.name, f.entry_lambda, f.sign, f.final_coef) for i, f in enumerate(ranking)],
    )


def assignments_csv(ids, clusters, map_prob) -> str:
    return to_csv(["id", "cluster", "map_prob"], zip(ids, clusters, map_prob))


def scores_csv(scores, ids=None) -> str:
    k = scores.shape[1]
    ids = range(scores.shape[0]) if ids is None else ids
    return to_csv(["row_id", *(f"pc{i + 1}" for i in range(k))], ([i, *row] for i, row in zip(ids, scores)))


def read_path_csv(text):
    """Parse a long-format path CSV back into ``(lambdas, names, coefs)``."""
    rows = list(csv.reader(io.StringIO(text)))
    lambdas, names, values = [], [], {}
    for lam_s, name, coef_s in rows[1:]:
        lam = float(lam_s)
        if not lambdas or lambdas[-1] != lam:
            lambdas.append(lam)
        if name not in names:
            names.append(name)
        values[(lam, name)] = float(coef_s)
    coefs = np.array([[values[(lam, nm)] for nm in names] for lam in lambdas])
    return np.array(lambdas), names, coefs
