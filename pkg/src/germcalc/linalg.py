"""Exact linear algebra over Q(i) for the small matrices the geometry needs."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .ring import ONE, ZERO, Scalar

Matrix = List[List[Scalar]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Scalar.coerce(x) for x in row] for row in rows]


def row_echelon(rows: Sequence[Sequence]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = [list(r) for r in as_matrix(rows)]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(m)) if m[k][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c]:
                f = m[k][c]
                m[k] = [a - f * b for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not len(rows[0]):
        return 0
    return len(row_echelon(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    """Basis of ``{v : rows @ v = 0}``."""
    if not rows:
        n = ncols or 0
        return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    ech, piv = row_echelon(rows)
    n = len(rows[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for r, p in enumerate(piv):
            v[p] = -ech[r][f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Optional[List[Scalar]]:
    """One solution of ``rows @ x = rhs`` or None when inconsistent."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(as_matrix(rows), as_matrix([rhs])[0])]
    ech, piv = row_echelon(aug)
    if n in piv:
        return None
    x = [ZERO] * n
    for r, p in enumerate(piv):
        x[p] = ech[r][n]
    return x


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    a = as_matrix(a)
    b = as_matrix(b)
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        out.append([sum((row[k] * b[k][j] for k in range(inner)), ZERO) for j in range(cols)])
    return out


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]
