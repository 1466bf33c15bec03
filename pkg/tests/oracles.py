"""Independent reference computations used to pin expected values.

Nothing here imports the package's elimination or enumeration code.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np


def fraction_rank(rows) -> int:
    """Plain Gauss-Jordan over Fraction."""
    a = [[Fraction(v) for v in r] for r in rows]
    if not a:
        return 0
    r = 0
    for c in range(len(a[0])):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r


def m0_rows(n: int) -> list[list[int]]:
    """M_0 written out from the line definitions, cell by cell."""
    rows = []
    for i in range(n):
        rows.append([1 if a == i else 0 for a in range(n) for b in range(n)])
    for j in range(n - 1):
        rows.append([1 if b == j else 0 for a in range(n) for b in range(n)])
    rows.append([1 if a == b else 0 for a in range(n) for b in range(n)])
    rows.append([1 if a + b == n - 1 else 0 for a in range(n) for b in range(n)])
    return rows


def all_grids(n: int, X: int) -> np.ndarray:
    vals = np.arange(1, X + 1, dtype=np.int64)
    mesh = np.meshgrid(*([vals] * (n * n)), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def brute_counts(n: int, d: int, X: int, mu: int) -> tuple[int, int]:
    """(N_0, N) by testing every grid in [1, X]^(n^2) on all 2n+2 lines."""
    g = all_grids(n, X) ** d
    sq = g.reshape(-1, n, n)
    ok = np.ones(len(g), dtype=bool)
    for i in range(n):
        ok &= sq[:, i, :].sum(axis=1) == mu
        ok &= sq[:, :, i].sum(axis=1) == mu
    ok &= np.trace(sq, axis1=1, axis2=2) == mu
    ok &= sq[:, ::-1, :].trace(axis1=1, axis2=2) == mu
    hits = all_grids(n, X)[ok]
    distinct = sum(1 for h in hits if len(set(h.tolist())) == n * n)
    return int(ok.sum()), distinct


def brute_nu(n: int, d: int, q: int, mu: int) -> int:
    """Count x mod q solving the 2n+1 equations, by full enumeration."""
    m = np.array(m0_rows(n), dtype=np.int64)
    total = 0
    for first in range(q):
        rest = np.array(list(product(range(q), repeat=n * n - 1)), dtype=np.int64)
        x = np.concatenate([np.full((len(rest), 1), first), rest], axis=1)
        f = ((x**d) % q) @ m.T % q
        total += int((f == mu % q).all(axis=1).sum())
    return total


def mp_n0(d: int, dps: int = 60) -> int:
    """4 * ceil(d (log d + 4.20032)) + 20 evaluated with mpmath."""
    import mpmath

    with mpmath.workdps(dps):
        x = mpmath.mpf(d) * (mpmath.log(d) + mpmath.mpf("4.20032"))
        return 4 * int(mpmath.ceil(x)) + 20


def brute_psi(rows) -> int:
    """Max number of disjoint full-rank column sets, by trying every labelling."""
    r = fraction_rank(rows)
    m = len(rows[0])
    if r == 0:
        return 0
    best = 0
    for k in range(1, m // r + 1):
        found = False
        for labels in product(range(k + 1), repeat=m):
            groups = [[c for c in range(m) if labels[c] == s] for s in range(1, k + 1)]
            if all(len(g) == r for g in groups) and all(
                fraction_rank([[row[c] for c in g] for row in rows]) == r for g in groups
            ):
                found = True
                break
        if not found:
            break
        best = k
    return best
