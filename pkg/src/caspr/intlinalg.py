"""Integer lattice routines: Hermite and Smith normal forms on Python ints.

Matrices are plain lists of rows.  Nothing here uses fixed-width integers;
entries of iterated substitution matrices outgrow int64 quickly.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

IntMatrix = list[list[int]]


def copy_matrix(a: Sequence[Sequence[int]]) -> IntMatrix:
    return [list(r) for r in a]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    if not a:
        return []
    bt = list(zip(*b)) if b else []
    if not bt:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(c) for c in zip(*a)]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def hnf(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows only: pivots strictly move right, pivots are
    positive and entries above a pivot lie in [0, pivot).
    """
    a = [list(r) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    out: IntMatrix = []
    pivot_cols: list[int] = []
    col = 0
    while a and col < ncols:
        nz = [r for r in a if r[col] != 0]
        if not nz:
            col += 1
            continue
        zero = [r for r in a if r[col] == 0]
        # Euclid on the column entries
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                if r[col] != 0:
                    rest.append(r)
                elif any(r):
                    zero.append(r)
            nz = [p] + rest
        p = nz[0]
        if p[col] < 0:
            p = [-x for x in p]
        out.append(p)
        pivot_cols.append(col)
        a = zero
        col += 1
    # reduce above pivots
    for i in range(len(out)):
        c = pivot_cols[i]
        for j in range(i):
            q = out[j][c] // out[i][c]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], out[i])]
    return out


def lattice_det(basis: Sequence[Sequence[int]]) -> int:
    """Absolute determinant of a square basis (full-rank lattice index in Z^n)."""
    h = hnf(basis)
    n = len(basis[0]) if basis else 0
    if len(h) != n:
        return 0
    d = 1
    for i, r in enumerate(h):
        d *= r[i]
    return abs(d)


def solve_integer(basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[Fraction] | None:
    """Rational coefficients c with c @ basis == v, or None if v is not in the span."""
    n = len(basis)
    m = len(v)
    # augmented system basis^T c = v via fraction Gaussian elimination
    aug = [[Fraction(basis[j][i]) for j in range(n)] + [Fraction(v[i])] for i in range(m)]
    piv = []
    r = 0
    for c in range(n):
        k = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if k is None:
            continue
        aug[r], aug[k] = aug[k], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv.append(c)
        r += 1
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(piv):
        sol[c] = aug[i][n]
    return sol


def smith_normal_form(a: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors (nonzero diagonal of the Smith form) of an integer matrix.

    The factors are positive and each divides the next.
    """
    m = [list(r) for r in a]
    if not m or not m[0]:
        return []
    rows, cols = len(m), len(m[0])
    diag: list[int] = []
    t = 0
    while t < min(rows, cols):
        # pick the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
                    if abs(m[i][j]) == 1:
                        break
            if best and abs(m[best[0]][best[1]]) == 1:
                break
        if best is None:
            break
        i, j = best
        m[t], m[i] = m[i], m[t]
        for r in m:
            r[t], r[j] = r[j], r[t]
        while True:
            p = m[t][t]
            done = True
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // p
                    if q:
                        m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                    if m[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // p
                    if q:
                        for r in m:
                            r[j] -= q * r[t]
                    if m[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block
                bad = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if m[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                m[t] = [x + y for x, y in zip(m[t], m[bad])]
                continue
            # move the smallest nonzero entry of row/column t to the pivot
            cand = [(abs(m[i][t]), i, t) for i in range(t, rows) if m[i][t]]
            cand += [(abs(m[t][j]), t, j) for j in range(t, cols) if m[t][j]]
            _, i, j = min(cand)
            m[t], m[i] = m[i], m[t]
            for r in m:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(m[t][t]))
        t += 1
    return diag


def rank_over_q(a: Sequence[Sequence[int]]) -> int:
    return len(hnf(a))


def left_kernel_integer(a: Sequence[Sequence[int]]) -> IntMatrix:
    """A Z-basis of {x integer row vector : x @ a == 0}."""
    n = len(a)
    if n == 0:
        return []
    k = len(a[0]) if a[0] else 0
    aug = [list(a[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    # HNF restricted to the first k columns then read off zero rows
    work = [r[:] for r in aug]
    basis: IntMatrix = []
    col = 0
    active = work
    while active and col < k:
        nz = [r for r in active if r[col] != 0]
        zero = [r for r in active if r[col] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                (rest if r[col] != 0 else zero).append(r)
            nz = [p] + rest
        active = zero
        col += 1
    for r in active:
        basis.append(r[k:])
    return hnf(basis)


def gcd_list(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, int(x))
    return g
