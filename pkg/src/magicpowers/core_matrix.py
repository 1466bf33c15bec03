"""Coefficient matrix of the magic-square system and its contractions.

Rows are ordered: the n row constraints, the first n-1 column constraints,
the main diagonal, the antidiagonal (the n-th column constraint is implied by
the others and omitted).  Columns are ordered c_{1,1}, ..., c_{1,n},
c_{2,1}, ..., c_{n,n}; column c_{i,j} carries the variable x_{i,j}.

Indices i, j in the public API are 1-based as in the usual grid notation;
row and column *positions* inside ``entries`` are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "ColumnRef",
    "MagicMatrix",
    "Sigma",
    "build_magic_matrix",
    "column",
    "column_support",
    "contract_sigma",
    "jacobian_scale_check",
    "matrix_from_json",
    "matrix_to_json",
    "matrix_to_text",
    "row_labels",
    "sigma_singular_witness",
]


@dataclass(frozen=True, order=True)
class ColumnRef:
    """Column c_{i,j}; ``j`` is always stored in [1, n].

    Use :meth:`of` to build one from an arbitrary integer ``j``.
    """

    i: int
    j: int

    @classmethod
    def of(cls, n: int, i: int, j: int) -> "ColumnRef":
        if not 1 <= i <= n:
            raise ValueError(f"block index i={i} outside [1, {n}]")
        return cls(i, (j - 1) % n + 1)

    def index(self, n: int) -> int:
        """0-based position of this column in M_0."""
        return (self.i - 1) * n + (self.j - 1)

    def as_list(self) -> list[int]:
        return [self.i, self.j]


@dataclass(frozen=True)
class Sigma:
    """Identification x_{i2,j2} := x_{i1,j1}.  ``None`` plays the role of 0."""

    i1: int
    j1: int
    i2: int
    j2: int

    def validate(self, n: int) -> None:
        for v in (self.i1, self.j1, self.i2, self.j2):
            if not 1 <= v <= n:
                raise ValueError(f"sigma coordinate {v} outside [1, {n}]")
        if (self.i1, self.j1) == (self.i2, self.j2):
            raise ValueError("sigma must identify two distinct cells")

    @property
    def target(self) -> ColumnRef:
        return ColumnRef(self.i1, self.j1)

    @property
    def removed(self) -> ColumnRef:
        return ColumnRef(self.i2, self.j2)

    @classmethod
    def parse(cls, text: str) -> "Sigma":
        parts = [int(p) for p in text.replace(";", ",").split(",")]
        if len(parts) != 4:
            raise ValueError(f"sigma needs 4 integers, got {text!r}")
        return cls(*parts)


def column_support(n: int, i: int, j: int) -> list[int]:
    """0-based row positions where c_{i,j} has a 1 (j normalized mod n)."""
    if not 1 <= i <= n:
        raise ValueError(f"block index i={i} outside [1, {n}]")
    j = (j - 1) % n + 1
    rows = [i - 1]
    if j <= n - 1:
        rows.append(n + j - 1)
    if i == j:
        rows.append(2 * n - 1)
    if i + j == n + 1:
        rows.append(2 * n)
    return rows


def row_labels(n: int) -> list[str]:
    return (
        [f"row {i}" for i in range(1, n + 1)]
        + [f"col {j}" for j in range(1, n)]
        + ["diag", "antidiag"]
    )


@dataclass(frozen=True)
class MagicMatrix:
    """The (2n+1) x n^2 0/1 matrix M_0."""

    n: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def row_labels(self) -> list[str]:
        return row_labels(self.n)

    def column(self, ref: ColumnRef) -> tuple[int, ...]:
        k = ref.index(self.n)
        return tuple(r[k] for r in self.entries)

    def column_vectors(self) -> list[tuple[int, ...]]:
        return [tuple(col) for col in zip(*self.entries)]

    def refs(self) -> list[ColumnRef]:
        n = self.n
        return [ColumnRef(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]

    def submatrix(self, refs: Iterable[ColumnRef]) -> list[list[int]]:
        idx = [r.index(self.n) for r in refs]
        return [[row[k] for k in idx] for row in self.entries]


def build_magic_matrix(n: int) -> MagicMatrix:
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    rows = [[0] * (n * n) for _ in range(2 * n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            k = (i - 1) * n + (j - 1)
            for r in column_support(n, i, j):
                rows[r][k] = 1
    return MagicMatrix(n, tuple(tuple(r) for r in rows))


def column(matrix: MagicMatrix, i: int, j: int) -> tuple[int, ...]:
    return matrix.column(ColumnRef.of(matrix.n, i, j))


def contract_sigma(matrix: MagicMatrix, sigma: Sigma | None) -> list[list[int]]:
    """Coefficient matrix after substituting x_{i2,j2} = x_{i1,j1}.

    Column (i2,j2) is added into column (i1,j1) and then deleted, so the
    result has n^2 - 1 columns in the original order minus the deleted one.
    """
    if sigma is None:
        raise ValueError("sigma = 0 is the uncontracted matrix; nothing to contract")
    n = matrix.n
    sigma.validate(n)
    keep = sigma.target.index(n)
    drop = sigma.removed.index(n)
    out = []
    for row in matrix.entries:
        new = list(row)
        new[keep] += new[drop]
        del new[drop]
        out.append(new)
    return out


def contracted_column_index(n: int, sigma: Sigma, ref: ColumnRef) -> int | None:
    """Position of ``ref`` inside M_sigma, or None for the deleted column."""
    k = ref.index(n)
    drop = sigma.removed.index(n)
    if k == drop:
        return None
    return k - 1 if k > drop else k


def jacobian_scale_check(n: int, d: int, z) -> bool:
    """Jacobian of F_0 at (z, ..., z) is d z^(d-1) M_0 and has full rank.

    The Jacobian is obtained by symbolic differentiation of the diagonal
    forms, evaluated exactly at the rational point.
    """
    import sympy

    from magicpowers.exact_linalg import rank

    z = Fraction(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    if d < 1:
        raise ValueError("d must be at least 1")
    m0 = build_magic_matrix(n)
    xs = sympy.symbols(f"x0:{n * n}")
    forms = [sum(c * x**d for c, x in zip(row, xs) if c) for row in m0.entries]
    jac = sympy.Matrix(forms).jacobian(xs)
    zval = sympy.Rational(z.numerator, z.denominator)
    point = {x: zval for x in xs}
    scale = d * z ** (d - 1)
    evaluated = []
    for r in range(m0.rows):
        row = []
        for c in range(m0.cols):
            v = jac[r, c].subs(point) if jac[r, c] != 0 else sympy.Integer(0)
            q = Fraction(int(v.p), int(v.q))
            if q != scale * m0.entries[r][c]:
                return False
            row.append(q)
        evaluated.append(row)
    return rank(evaluated) == 2 * n + 1


def sigma_singular_witness(n: int) -> tuple[list[Fraction], int]:
    """beta = e_1 and the number of columns of M_0 orthogonal to it.

    For x with x_{1,j} = 0 for all j the pencil gradient beta . grad F_0
    vanishes, giving an (n^2 - n)-dimensional singular locus.
    """
    m0 = build_magic_matrix(n)
    beta = [Fraction(0)] * m0.rows
    beta[0] = Fraction(1)
    count = sum(
        1 for col in m0.column_vectors() if sum(b * c for b, c in zip(beta, col)) == 0
    )
    return beta, count


def matrix_to_json(entries: Sequence[Sequence[int]], n: int) -> dict:
    rows = [list(map(int, r)) for r in entries]
    return {"n": n, "rows": len(rows), "cols": len(rows[0]) if rows else 0, "entries": rows}


def matrix_from_json(obj: dict | str) -> tuple[int, list[list[int]]]:
    if isinstance(obj, str):
        obj = json.loads(obj)
    rows = [list(map(int, r)) for r in obj["entries"]]
    if len(rows) != obj["rows"] or any(len(r) != obj["cols"] for r in rows):
        raise ValueError("matrix JSON dimensions do not match entries")
    return int(obj["n"]), rows


def matrix_to_text(entries: Sequence[Sequence[int]]) -> str:
    return "\n".join(" ".join(str(v) for v in r) for r in entries) + "\n"


def matrix_from_text(text: str) -> list[list[int]]:
    rows = [[int(t) for t in line.split()] for line in text.splitlines() if line.strip()]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged dense matrix text")
    return rows
