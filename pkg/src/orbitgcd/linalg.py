"""Small exact linear algebra helpers: Fraction Gaussian elimination and
row reduction / kernels over GF(p)."""

from __future__ import annotations

import math
from fractions import Fraction


def solve_fraction(matrix, rhs):
    """Solve A x = b over the rationals; returns None if singular/inconsistent."""
    n = len(matrix)
    m = len(matrix[0])
    a = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    piv_rows = []
    r = 0
    for c in range(m):
        pr = next((i for i in range(r, n) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = a[r][c]
        a[r] = [v / inv for v in a[r]]
        for i in range(n):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        piv_rows.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if a[i][m] != 0:
            return None
    x = [Fraction(0)] * m
    for row, c in enumerate(piv_rows):
        x[c] = a[row][m]
    if any(sum(Fraction(matrix[i][j]) * x[j] for j in range(m)) != Fraction(rhs[i])
           for i in range(n)):
        return None
    return x


def det_fraction(matrix):
    """Determinant of a square matrix over the rationals."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            a[c], a[pr] = a[pr], a[c]
            det = -det
        det *= a[c][c]
        inv = a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / inv
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[c])]
    return det


def rref_modp(rows, p):
    """Reduced row echelon form mod p; returns (rref_rows, pivot_columns)."""
    a = [[v % p for v in row] for row in rows]
    n = len(a)
    m = len(a[0]) if n else 0
    pivots = []
    r = 0
    for c in range(m):
        pr = next((i for i in range(r, n) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [v * inv % p for v in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(vi - f * vr) % p for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return a[:r], pivots


def kernel_modp(rows, p):
    """Canonical kernel basis mod p (one vector per free column of RREF)."""
    if not rows:
        return []
    m = len(rows[0])
    rref, pivots = rref_modp(rows, p)
    pivot_set = set(pivots)
    free = [c for c in range(m) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [0] * m
        vec[fc] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = (-rref[r][fc]) % p
        basis.append(vec)
    return basis


def rational_reconstruct(a, p):
    """Lift a mod-p residue to n/d with |n|, d <= sqrt(p/2); None if impossible."""
    a %= p
    if a == 0:
        return Fraction(0)
    bound = math.isqrt(p // 2)
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if abs(s1) > bound or s1 == 0:
        return None
    num, den = r1, s1
    if den < 0:
        num, den = -num, -den
    if (num - den * a) % p != 0:
        return None
    return Fraction(num, den)
