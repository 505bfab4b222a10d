"""Exact determinants and minors of small polynomial matrices."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .poly import HermitianPolynomial


def det(rows: Sequence[Sequence[HermitianPolynomial]], n: int) -> HermitianPolynomial:
    """Determinant by cofactor expansion along the first row."""
    k = len(rows)
    if k == 0:
        return HermitianPolynomial.constant(n, 1)
    if k == 1:
        return rows[0][0]
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = HermitianPolynomial.zero(n)
    for j, a in enumerate(rows[0]):
        if a.is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = a * det(sub, n)
        total = total + term if j % 2 == 0 else total - term
    return total


def submatrix(rows, row_idx, col_idx):
    return [[rows[r][c] for c in col_idx] for r in row_idx]


def minor_index_sets(nrows: int, ncols: int, k: int):
    """(row subset, column subset) pairs in lexicographic order."""
    for ri in combinations(range(nrows), k):
        for ci in combinations(range(ncols), k):
            yield ri, ci
