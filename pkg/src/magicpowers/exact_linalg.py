"""Exact rank, independence and nullspace over the rationals.

Everything here is integer arithmetic: rational inputs are scaled row by row
to integers first, and elimination uses integer row combinations followed by
exact division (by the previous pivot for Bareiss, by the row content for the
sparse echelon).  No tolerance exists anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Hashable, Iterable, Mapping, Sequence

__all__ = [
    "ExactMatrix",
    "IncrementalBasis",
    "as_integer_rows",
    "bareiss_rank",
    "is_independent_columns",
    "lemma_first_system",
    "nullspace",
    "nullspace_dim",
    "rank",
]


@dataclass(frozen=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        ints = as_integer_rows(rows)
        if not ints or not ints[0]:
            raise ValueError("matrix dimensions must be positive")
        return cls(len(ints), len(ints[0]), tuple(tuple(r) for r in ints))


def _rows_of(m) -> Sequence[Sequence]:
    return m.entries if hasattr(m, "entries") else m


def as_integer_rows(m) -> list[list[int]]:
    """Rows of ``m`` as Python ints; rational rows are scaled by their lcm."""
    out = []
    width = None
    for row in _rows_of(m):
        row = list(row)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError("ragged matrix")
        if all(isinstance(v, int) for v in row):
            out.append([int(v) for v in row])
            continue
        fr = [Fraction(v) for v in row]
        den = lcm(*(f.denominator for f in fr)) if fr else 1
        out.append([int(f * den) for f in fr])
    return out


def _content(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
        if g == 1:
            break
    return g


class IncrementalBasis:
    """Sparse integer echelon basis, grown one vector at a time.

    Each stored vector has a distinct leading index (its pivot).  When
    ``track=True`` every stored vector also remembers its expansion in the
    inserted vectors, so a dependent vector can be written exactly as a
    rational combination of the members (its fundamental circuit).
    """

    def __init__(self, track: bool = False):
        self.track = track
        self._pivots: dict[int, tuple[dict[int, int], dict[Hashable, int]]] = {}
        self.members: list[Hashable] = []

    def __len__(self) -> int:
        return len(self._pivots)

    def _reduce(self, vec: Mapping[int, int]):
        cur = {k: v for k, v in vec.items() if v}
        comb: dict[Hashable, int] = {}
        scale = 1
        track = self.track
        while cur:
            p = min(cur)
            entry = self._pivots.get(p)
            if entry is None:
                return cur, comb, scale
            bvec, bcomb = entry
            bp, cp = bvec[p], cur[p]
            g = gcd(bp, cp)
            bp //= g
            cp //= g
            if bp != 1:
                cur = {k: bp * v for k, v in cur.items()}
            for k, v in bvec.items():
                nv = cur.get(k, 0) - cp * v
                if nv:
                    cur[k] = nv
                else:
                    cur.pop(k, None)
            if track:
                if bp != 1:
                    comb = {k: bp * v for k, v in comb.items()}
                    scale *= bp
                for k, v in bcomb.items():
                    nv = comb.get(k, 0) + cp * v
                    if nv:
                        comb[k] = nv
                    else:
                        comb.pop(k, None)
            c = _content(list(cur.values()) + (list(comb.values()) + [scale] if track else []))
            if c > 1:
                cur = {k: v // c for k, v in cur.items()}
                if track:
                    comb = {k: v // c for k, v in comb.items()}
                    scale //= c
        return cur, comb, scale

    def add(self, vec: Mapping[int, int], label: Hashable = None) -> bool:
        """Insert ``vec``; return False (and store nothing) if it is dependent."""
        cur, comb, scale = self._reduce(vec)
        if not cur:
            return False
        if label is None:
            label = len(self.members)
        bcomb = {}
        if self.track:
            bcomb = {k: -v for k, v in comb.items()}
            bcomb[label] = bcomb.get(label, 0) + scale
        self._pivots[min(cur)] = (cur, bcomb)
        self.members.append(label)
        return True

    def in_span(self, vec: Mapping[int, int]) -> bool:
        cur, _, _ = self._reduce(vec)
        return not cur

    def express(self, vec: Mapping[int, int]) -> dict[Hashable, Fraction] | None:
        """Coefficients of ``vec`` over the members, or None if not in the span."""
        if not self.track:
            raise ValueError("express() needs a basis built with track=True")
        cur, comb, scale = self._reduce(vec)
        if cur:
            return None
        return {k: Fraction(v, scale) for k, v in comb.items() if v}

    def copy(self) -> "IncrementalBasis":
        other = IncrementalBasis(self.track)
        other._pivots = dict(self._pivots)
        other.members = list(self.members)
        return other


def _sparse(vec: Sequence[int]) -> dict[int, int]:
    return {k: v for k, v in enumerate(vec) if v}


def bareiss_rank(m) -> int:
    """Rank by dense fraction-free (Bareiss) row echelon."""
    a = as_integer_rows(m)
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        prow = a[r]
        for i in range(r + 1, nrows):
            row = a[i]
            f = row[c]
            for j in range(c + 1, ncols):
                row[j] = (p * row[j] - f * prow[j]) // prev
            row[c] = 0
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def rank(m, method: str = "sparse") -> int:
    """Exact rank over Q.

    ``method="sparse"`` inserts rows into an :class:`IncrementalBasis`
    (fast on the 0/1 matrices used here); ``"bareiss"`` runs dense
    fraction-free elimination.  Both use first-nonzero pivoting.
    """
    if method == "bareiss":
        return bareiss_rank(m)
    if method != "sparse":
        raise ValueError(f"unknown rank method {method!r}")
    rows = as_integer_rows(m)
    if not rows:
        return 0
    basis = IncrementalBasis()
    width = len(rows[0])
    for row in rows:
        basis.add(_sparse(row))
        if len(basis) == width:
            break
    return len(basis)


def _column_indices(m, cols) -> list[int]:
    cols = list(cols)
    if cols and hasattr(cols[0], "index") and hasattr(m, "n"):
        idx = [c.index(m.n) for c in cols]
    else:
        idx = [int(c) for c in cols]
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate column in independence query")
    return idx


def is_independent_columns(m, cols) -> bool:
    """True iff the selected columns are linearly independent.

    ``cols`` holds :class:`~magicpowers.core_matrix.ColumnRef` values when
    ``m`` is a MagicMatrix, otherwise 0-based column positions.
    """
    rows = as_integer_rows(m)
    idx = _column_indices(m, cols)
    basis = IncrementalBasis()
    for k in idx:
        if not basis.add({r: row[k] for r, row in enumerate(rows) if row[k]}):
            return False
    return True


def nullspace_dim(m) -> int:
    rows = as_integer_rows(m)
    return len(rows[0]) - rank(rows)


def nullspace(m) -> list[list[Fraction]]:
    """Basis of the right nullspace, from the reduced row echelon form."""
    a = [[Fraction(v) for v in row] for row in as_integer_rows(m)]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for row_i, pc in enumerate(pivots):
            v[pc] = -a[row_i][fcol]
        basis.append(v)
    return basis


def lemma_first_system(n: int, i1: int, m: int, i2: int) -> list[list[int]]:
    """Coefficient matrix of the 2n-equation system L_n(i1; m; i2).

    Unknowns are ordered (x_1..x_n, y_1..y_n).  Subscripts wrap modulo n
    (x_{n+1} = x_1, y_0 = y_n).
    """
    if not 1 <= i1 < m < m + 1 < i2 <= n:
        raise ValueError(f"need 1 <= i1 < m < m+1 < i2 <= n, got {(i1, m, i2)} with n={n}")

    def wrap(k: int) -> int:
        return (k - 1) % n + 1

    skipped = {wrap(i1 - 1), i1, i2 - 1, i2, m}
    if len(skipped) != 5:
        raise ValueError("i1 - 1 and i2 coincide modulo n; the system is degenerate")

    def eq(xi: int, yi: int) -> list[int]:
        row = [0] * (2 * n)
        if xi:
            row[wrap(xi) - 1] += 1
        row[n + wrap(yi) - 1] += 1
        return row

    rows = [eq(i, i) for i in range(1, n + 1)]
    rows += [eq(i + 1, i) for i in range(1, n + 1) if i not in skipped]
    rows += [eq(i2, i1 - 1), eq(i2 + 1, i1), eq(i1, i2 - 1), eq(i1 + 1, i2)]
    rows.append(eq(0, m))
    return rows
