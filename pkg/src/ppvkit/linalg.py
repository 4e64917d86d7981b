"""Exact linear algebra over the rational function field.

Plain Gaussian elimination with division; pivots are chosen to keep the
intermediate expressions small.  Every routine is reentrant and leaves its
inputs untouched.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .fieldcore import FieldContext, Rat


def _size(r: Rat) -> int:
    return len(r.fe.numer) + len(r.fe.denom)


def _echelon(ctx: FieldContext, rows: list[list[Rat]]):
    """Row-reduce in place; returns list of pivot column indices."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero():
                if best is None or _size(rows[i][c]) < _size(rows[best][c]):
                    best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        inv = ctx.one / rows[r][c]
        rows[r] = [e * inv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def solve_linear(
    ctx: FieldContext, rows: Sequence[Sequence[Rat]], rhs: Sequence[Rat]
) -> Optional[list[Rat]]:
    """One solution of rows * u = rhs with free variables set to zero.

    Returns None when the system is inconsistent.
    """
    if not rows:
        return []
    n = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    pivots = _echelon(ctx, aug)
    if n in pivots:
        return None
    sol = [ctx.zero] * n
    r = 0
    for c in pivots:
        sol[c] = aug[r][n]
        r += 1
    return sol


def nullspace(ctx: FieldContext, rows: Sequence[Sequence[Rat]], ncols: int) -> list[list[Rat]]:
    """Basis of the kernel of the matrix given by ``rows`` (ncols columns)."""
    work = [list(row) for row in rows]
    pivots = _echelon(ctx, work)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ctx.zero] * ncols
        vec[fc] = ctx.one
        for r, pc in enumerate(pivots):
            vec[pc] = -work[r][fc]
        basis.append(vec)
    return basis


def rank(ctx: FieldContext, rows: Sequence[Sequence[Rat]]) -> int:
    work = [list(row) for row in rows]
    return len(_echelon(ctx, work))


def det(ctx: FieldContext, matrix: Sequence[Sequence[Rat]]) -> Rat:
    """Determinant by fraction elimination (square matrices)."""
    n = len(matrix)
    if n == 0:
        return ctx.one
    work = [list(row) for row in matrix]
    result = ctx.one
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not work[i][c].is_zero():
                piv = i
                break
        if piv is None:
            return ctx.zero
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            result = -result
        result = result * work[c][c]
        inv = ctx.one / work[c][c]
        for i in range(c + 1, n):
            if not work[i][c].is_zero():
                factor = work[i][c] * inv
                work[i] = [a - factor * b for a, b in zip(work[i], work[c])]
    return result
