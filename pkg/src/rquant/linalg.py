"""Dense linear algebra over GF(p) on lists of ints.

Matrices are row lists.  Everything here is exact; sizes in this package
stay in the low hundreds of columns.
"""

from __future__ import annotations


def rref(rows, p, ncols=None):
    """Reduced row echelon form. Returns (matrix, pivot_columns)."""
    m = [[v % p for v in row] for row in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        row_r = [(v * inv) % p for v in m[r]]
        m[r] = row_r
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                mi = m[i]
                m[i] = [(a - f * b) % p for a, b in zip(mi, row_r)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows, p, ncols=None):
    return len(rref(rows, p, ncols)[1])


def solve(rows, rhs, p):
    """Solve ``A x = rhs``; return one solution (free variables zero) or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    m, pivots = rref(aug, p, ncols + 1)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][ncols]
    return x


def nullspace(rows, p, ncols):
    """Basis of ``{x : A x = 0}``."""
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows, p, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-m[i][f]) % p
        basis.append(v)
    return basis


def matvec(rows, x, p):
    return [sum(a * b for a, b in zip(row, x)) % p for row in rows]
