"""Exact double description: extreme rays of a pointed polyhedral cone.

Converts the H-representation ``{w : A w >= 0}`` (integer rows) into the
V-representation, inserting one constraint at a time while maintaining the
extreme-ray set. All arithmetic is integer; rays are kept gcd-reduced, so the
output is exact. Adjacency of rays is decided by the combinatorial test (no
third ray's tight set contains the common tight set), vectorized over numpy
bool matrices since candidate pair counts dominate the cost.

Sized for the small communication polytopes in this package: dimensions below
about 20 and a few hundred constraints.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# Combination coefficients are bounded by (dim * max|ray|), so entries stay
# exact in int64 as long as max|ray| stays below this guard.
_OVERFLOW_GUARD = 2**28


class ConeError(Exception):
    pass


def _reduce_rows(rays: np.ndarray) -> np.ndarray:
    """Divide each row by the gcd of its entries."""
    g = np.gcd.reduce(np.abs(rays), axis=1)
    g[g == 0] = 1
    return rays // g[:, None]


def _initial_basis(constraints: np.ndarray) -> list[int]:
    """Indices of the first rows forming a full-rank square system."""
    dim = constraints.shape[1]
    chosen: list[int] = []
    rows: list[list[Fraction]] = []  # row-echelon workspace
    pivots: list[int] = []
    for idx, raw in enumerate(constraints):
        row = [Fraction(int(v)) for v in raw]
        for prow, pcol in zip(rows, pivots):
            if row[pcol]:
                f = row[pcol] / prow[pcol]
                row = [a - f * b for a, b in zip(row, prow)]
        pcol = next((j for j, v in enumerate(row) if v), None)
        if pcol is None:
            continue
        rows.append(row)
        pivots.append(pcol)
        chosen.append(idx)
        if len(chosen) == dim:
            return chosen
    raise ConeError("constraint matrix is rank-deficient: cone is not pointed")


def _simplicial_rays(basis: np.ndarray) -> np.ndarray:
    """Integer rays of the simplicial cone {w : basis @ w >= 0}.

    Column j of the result is a positive multiple of the j-th column of
    basis^{-1}, cleared to integers.
    """
    dim = basis.shape[0]
    mat = [[Fraction(int(v)) for v in row] + [Fraction(int(i == k)) for i in range(dim)]
           for k, row in enumerate(basis)]
    # Gauss-Jordan over Fractions on [basis | I].
    for col in range(dim):
        piv = next(r for r in range(col, dim) if mat[r][col])
        mat[col], mat[piv] = mat[piv], mat[col]
        pv = mat[col][col]
        mat[col] = [v / pv for v in mat[col]]
        for r in range(dim):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    rays = []
    for j in range(dim):
        col = [mat[i][dim + j] for i in range(dim)]
        denom = 1
        for v in col:
            denom = denom * v.denominator // np.gcd(denom, v.denominator)
        rays.append([int(v * denom) for v in col])
    return _reduce_rows(np.array(rays, dtype=np.int64))


def extreme_rays(constraints: np.ndarray, chunk: int = 8192) -> np.ndarray:
    """All extreme rays of the pointed cone {w : constraints @ w >= 0}.

    ``constraints`` must be an integer matrix with full column rank. Rows are
    inserted in the order given.
    """
    A = np.asarray(constraints, dtype=np.int64)
    n, dim = A.shape
    basis_idx = _initial_basis(A)
    rays = _simplicial_rays(A[basis_idx])
    processed = list(basis_idx)
    order = [i for i in range(n) if i not in set(basis_idx)]

    for idx in order:
        row = A[idx]
        s = rays @ row
        if np.abs(rays).max(initial=0) > _OVERFLOW_GUARD:
            raise ConeError("ray coefficients exceeded the int64 safety guard")
        neg = np.where(s < 0)[0]
        processed.append(idx)
        if neg.size == 0:
            continue
        pos = np.where(s > 0)[0]
        keep = rays[s >= 0]
        new_rays = []
        if pos.size and neg.size:
            M = A[processed]
            tight = (rays @ M.T) == 0  # rays x processed constraints
            tp = tight[pos].astype(np.float32)
            tn = tight[neg].astype(np.float32)
            # Rank condition: adjacent rays share at least dim-2 tight constraints.
            counts = tp @ tn.T
            cand_i, cand_j = np.where(counts >= dim - 2)
            not_tight_all = (~tight).astype(np.float32)
            for start in range(0, cand_i.size, chunk):
                ci = cand_i[start : start + chunk]
                cj = cand_j[start : start + chunk]
                common = np.logical_and(tight[pos[ci]], tight[neg[cj]]).astype(np.float32)
                # A pair spans a 2-face iff only its own two rays contain the
                # common tight set.
                containing = (common @ not_tight_all.T) == 0
                adjacent = containing.sum(axis=1) == 2
                for k in np.where(adjacent)[0]:
                    i, j = pos[ci[k]], neg[cj[k]]
                    new_rays.append(int(s[i]) * rays[j] - int(s[j]) * rays[i])
        if new_rays:
            rays = np.vstack([keep, _reduce_rows(np.array(new_rays, dtype=np.int64))])
        else:
            rays = keep
    return rays
