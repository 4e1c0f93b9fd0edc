"""Dense PCA projection with a deterministic sign convention.

Columns are mean-centered (not standardized) and the rows are projected
onto the top right singular directions of the centered matrix. Each
component's sign is fixed by making its largest-magnitude coordinate
positive (ties broken by lower row index), so repeated runs are
bit-identical even though PCA orientation is arbitrary.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParseError
from .formats import fmt_float


@dataclass(frozen=True)
class Projection2D:
    codes: tuple
    coords: np.ndarray           # (N, dims)
    explained_variance: tuple    # fraction of total variance per component


def pca_project(rows, ids, dims=2) -> Projection2D:
    """Project N x D rows to the top `dims` principal components.

    Degenerate input (all rows identical) yields all-zero coordinates and
    zero explained variance rather than an error.
    """
    X = np.asarray(rows, dtype=float)
    if X.ndim != 2:
        raise DataError("input must be a 2D matrix")
    n, d = X.shape
    ids = tuple(ids)
    if len(ids) != n:
        raise DataError(f"got {len(ids)} ids for {n} rows")
    if n < 2:
        raise DataError("PCA needs at least 2 rows")
    if d < dims:
        raise DataError(f"cannot extract {dims} components from {d} columns")
    if not np.isfinite(X).all():
        raise DataError("input contains non-finite values")

    centered = X - X.mean(axis=0)
    if not centered.any():
        return Projection2D(ids, np.zeros((n, dims)), (0.0,) * dims)

    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    coords = centered @ vt[:dims].T
    total = float((s ** 2).sum())
    explained = tuple(float(v) for v in (s[:dims] ** 2) / total)

    for c in range(dims):
        col = coords[:, c]
        peak = int(np.argmax(np.abs(col)))  # first index on ties
        if col[peak] < 0:
            coords[:, c] = -col
    return Projection2D(ids, coords, explained)


def write_coords_csv(proj: Projection2D, path, families=None):
    """Export `id,x,y,ev1,ev2` rows, plus a family column when given."""
    header = "id,x,y,ev1,ev2"
    if families is not None:
        header += ",family"
    ev = [fmt_float(v) for v in proj.explained_variance[:2]]
    lines = [header]
    for code, (x, y) in zip(proj.codes, proj.coords):
        row = [code, fmt_float(x), fmt_float(y), ev[0], ev[1]]
        if families is not None:
            row.append(families.get(code, ""))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_coords_csv(path):
    """Read (codes, coords array) back from a coordinates CSV."""
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0][:3] != ["id", "x", "y"]:
        raise ParseError("expected header starting with id,x,y", path, 1)
    codes = []
    points = []
    for line_no, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 3:
            raise ParseError("expected at least id,x,y fields", path, line_no)
        codes.append(row[0].strip())
        try:
            points.append((float(row[1]), float(row[2])))
        except ValueError:
            raise ParseError("non-numeric coordinate", path, line_no) from None
    return tuple(codes), np.array(points, dtype=float)
