"""Exact linear algebra over F_p, Z/p^k and Z.

Matrices are lists of lists of Python ints unless stated otherwise.
"""

from __future__ import annotations

import numpy as np


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def row_reduce_mod_p(rows, p):
    """Reduced row echelon form over F_p; returns (rref_rows, pivot_columns)."""
    A = [[x % p for x in r] for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                t = A[i][c]
                A[i] = [(x - t * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank_mod_p(rows, p) -> int:
    if not rows:
        return 0
    if len(rows) * len(rows[0]) > 4096 and p < 2**31:
        return _rank_mod_p_np(np.array(rows, dtype=object) % p, p)
    return len(row_reduce_mod_p(rows, p)[1])


def _rank_mod_p_np(A, p) -> int:
    A = np.array(A, dtype=np.int64) % p
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            A[mask] = (A[mask] - np.outer(col[mask], A[r])) % p
        r += 1
        if r == nrows:
            break
    return r


def nullspace_mod_p(M, p):
    """Basis of {v : M v = 0} over F_p (column-vector convention)."""
    if not M:
        return []
    ncols = len(M[0])
    R, pivots = row_reduce_mod_p(M, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-R[i][f]) % p
        basis.append(v)
    return basis


def det_mod_p(M, p) -> int:
    A = [[x % p for x in r] for r in M]
    n = len(A)
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c] % p
        inv = pow(A[c][c], -1, p)
        for i in range(c + 1, n):
            if A[i][c]:
                t = A[i][c] * inv % p
                A[i] = [(x - t * y) % p for x, y in zip(A[i], A[c])]
    return det % p


def det_int(M) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def det_fraction(M):
    """Exact determinant of a matrix of Fractions (or ints) by elimination."""
    from fractions import Fraction

    A = [[Fraction(x) for x in r] for r in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                t = A[i][c] / A[c][c]
                A[i] = [x - t * y for x, y in zip(A[i], A[c])]
    return det


def matmul_mod(A, B, mod):
    return [[sum(a * b for a, b in zip(row, col)) % mod for col in zip(*B)] for row in A]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def local_snf(rows, p, k):
    """Smith form of an integer matrix over Z/p^k.

    Returns ``(vals, Vinv)`` where ``vals[i]`` is the valuation of the i-th
    invariant factor (``k`` for a missing pivot) and ``Vinv`` maps the
    original coordinates to the diagonal ones: the cokernel of ``rows`` is
    the direct sum of Z/p^vals[i], generated by the vectors ``Vinv[i]``.
    """
    mod = p**k
    A = [[x % mod for x in r] for r in rows]
    ncols = len(A[0]) if A else 0
    Vinv = identity(ncols)
    vals = []
    nrows = len(A)
    for t in range(ncols):
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if A[i][j]:
                    v = vp(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            vals.extend([k] * (ncols - t))
            break
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        if j != t:
            for r in A:
                r[t], r[j] = r[j], r[t]
            Vinv[t], Vinv[j] = Vinv[j], Vinv[t]
        u = A[t][t] // p**v
        uinv = pow(u, -1, mod)
        A[t] = [x * uinv % mod for x in A[t]]
        pv = p**v
        for i2 in range(nrows):
            if i2 != t and A[i2][t]:
                c = A[i2][t] // pv
                A[i2] = [(x - c * y) % mod for x, y in zip(A[i2], A[t])]
        for j2 in range(t + 1, ncols):
            if A[t][j2]:
                c = A[t][j2] // pv
                # col_j2 -= c * col_t  <=>  Vinv row_t += c * row_j2
                for r in A:
                    r[j2] = (r[j2] - c * r[t]) % mod
                Vinv[t] = [(x + c * y) % mod for x, y in zip(Vinv[t], Vinv[j2])]
        vals.append(v)
    return vals, Vinv


def local_snf_valuations(A, p, k):
    """Invariant-factor valuations (capped at k) of an integer matrix over Z_p.

    Vectorised with numpy; entries are kept below p^k, so p^(2k) must fit
    in int64.
    """
    mod = p**k
    if mod * mod >= 2**62:
        rows = A.tolist() if isinstance(A, np.ndarray) else A
        return local_snf(rows, p, k)[0]
    A = np.array(A, dtype=np.int64) % mod
    nrows, ncols = A.shape
    vals = []
    powers = [p**i for i in range(k + 1)]
    for t in range(min(nrows, ncols)):
        sub = A[t:, t:]
        found = None
        for v in range(k):
            hits = np.argwhere((sub % powers[v + 1]) != 0)
            if hits.size:
                found = (v, t + hits[0][0], t + hits[0][1])
                break
        if found is None:
            break
        v, i, j = found
        if i != t:
            A[[t, i]] = A[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
        u = int(A[t, t]) // powers[v]
        A[t] = (A[t] * pow(u, -1, mod)) % mod
        col = A[:, t] // powers[v]
        col[t] = 0
        nz = col != 0
        if nz.any():
            A[nz] = (A[nz] - np.outer(col[nz], A[t])) % mod
        A[t, t + 1:] = 0
        vals.append(v)
    vals.extend([k] * (ncols - len(vals)))
    return vals
