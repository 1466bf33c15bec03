"""Explicit family of disjoint independent (2n+1)-column sets of M_0.

The stepped diagonals B~_l pick, in every block i, the two positions
i + 2l and i + 2l + 1 (mod n), with one column c_{n-2l-1, n} left out.
Exactly two members of B~_l touch the diagonal rows; B_l swaps the position
pairs of blocks i1(l) and i2(l) to push them off both diagonals, and
D_l = B_l + {a_l, b_l} re-attaches one main-diagonal and one antidiagonal
column.  Every claim is re-certified with exact rank computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, Decimal, localcontext
from itertools import combinations

from magicpowers.core_matrix import ColumnRef, MagicMatrix, build_magic_matrix
from magicpowers.errors import CertificationError
from magicpowers.exact_linalg import is_independent_columns

__all__ = [
    "ConstructionParams",
    "Partition",
    "PartitionSet",
    "VerificationReport",
    "assemble_partition",
    "badvec_intersection",
    "block_view",
    "build_b",
    "build_btilde",
    "diagonal_sets",
    "i1_of",
    "i2_of",
    "n0_of_d",
    "params",
    "verify_partition",
    "z_set",
]


@dataclass(frozen=True)
class ConstructionParams:
    n: int
    eps: int
    N: int
    zmax: int


def params(n: int) -> ConstructionParams:
    if n < 8:
        raise ValueError(f"the explicit partition needs n >= 8, got n={n}")
    eps = 1 if n % 2 == 0 else 0
    N = (n - 1 + eps) // 2 - 2
    zmax = n // 4 - 1
    assert (n - 1 + eps) % 2 == 0
    assert N >= zmax >= 1, (N, zmax)
    return ConstructionParams(n, eps, N, zmax)


def i1_of(n: int, ell: int) -> int:
    eps = 1 if n % 2 == 0 else 0
    return (n + 1 - eps) // 2 - ell


def i2_of(n: int, ell: int) -> int:
    return n - ell


def block_view(cols, i: int) -> set[int]:
    """Positions j with c_{i,j} in ``cols``."""
    return {c.j for c in cols if c.i == i}


def build_btilde(n: int, ell: int) -> frozenset[ColumnRef]:
    p = params(n)
    if not 0 <= ell <= p.N:
        raise ValueError(f"ell={ell} outside [0, {p.N}]")
    first = {ColumnRef.of(n, i, i + 2 * ell) for i in range(1, n + 1)}
    second = {ColumnRef.of(n, i, i + 2 * ell + 1) for i in range(1, n + 1)}
    second.discard(ColumnRef.of(n, n - 2 * ell - 1, n))
    return frozenset(first | second)


def diagonal_sets(n: int) -> tuple[frozenset[ColumnRef], frozenset[ColumnRef]]:
    if n < 3:
        raise ValueError("n must be at least 3")
    s1 = frozenset(ColumnRef(i, i) for i in range(1, n + 1))
    s2 = frozenset(ColumnRef(i, n + 1 - i) for i in range(1, n + 1)) - s1
    return s1, s2


def badvec_intersection(n: int, ell: int) -> tuple[ColumnRef, ColumnRef]:
    """The two members of B~_l lying on a diagonal, in closed form."""
    p = params(n)
    if not 1 <= ell <= p.N:
        raise ValueError(f"ell={ell} outside [1, {p.N}]")
    h = (n + 1 - p.eps) // 2
    return ColumnRef.of(n, h - ell, h + p.eps + ell), ColumnRef.of(n, n - ell, ell + 1)


def z_set(n: int) -> list[int]:
    """{1, ..., floor(n/4) - 1}, checked against the separation congruence."""
    p = params(n)
    zs = list(range(1, n // 4))
    h = (n + 1 - p.eps) // 2
    for m in zs:
        for ell in zs:
            for delta in (-1, 0, 1):
                if (h - (2 * (m - ell) + delta)) % n == 0:
                    raise CertificationError(
                        f"index set fails separation at n={n}, m={m}, l={ell}, delta={delta}"
                    )
    return zs


@dataclass(frozen=True)
class Swap:
    removed: tuple[ColumnRef, ...]
    added: tuple[ColumnRef, ...]


def _swap(n: int, ell: int) -> Swap:
    a, b = i1_of(n, ell), i2_of(n, ell)
    t = 2 * ell
    removed = tuple(
        ColumnRef.of(n, i, j)
        for i, j in ((a, a + t), (a, a + t + 1), (b, b + t), (b, b + t + 1))
    )
    added = tuple(
        ColumnRef.of(n, i, j)
        for i, j in ((a, b + t), (a, b + t + 1), (b, a + t), (b, a + t + 1))
    )
    return Swap(removed, added)


def build_b(n: int, ell: int) -> frozenset[ColumnRef]:
    p = params(n)
    if ell in (n // 4, n // 4 + 1):
        raise ValueError(f"ell={ell} is excluded (floor(n/4) or floor(n/4)+1)")
    if ell not in z_set(n):
        raise ValueError(f"ell={ell} not in the index set 1..{p.zmax}")
    a, b = i1_of(n, ell), i2_of(n, ell)
    if not 1 < a < n - 2 * ell - 1 < n - 2 * ell < b < n:
        raise CertificationError(f"ordering of i1, i2 fails at n={n}, l={ell}")
    bt = build_btilde(n, ell)
    sw = _swap(n, ell)
    if not set(sw.removed) <= bt:
        raise CertificationError(f"swap removes columns absent from B~_{ell}", sw.removed)
    out = (bt - set(sw.removed)) | set(sw.added)
    if len(out) != 2 * n - 1:
        raise CertificationError(f"B_{ell} has {len(out)} columns, expected {2 * n - 1}", out)
    return frozenset(out)


@dataclass
class PartitionSet:
    ell: int
    columns: tuple[ColumnRef, ...]
    removed: tuple[ColumnRef, ...] = ()
    added: tuple[ColumnRef, ...] = ()
    a: ColumnRef | None = None
    b: ColumnRef | None = None

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "columns": [c.as_list() for c in self.columns],
            "removed": [c.as_list() for c in self.removed],
            "added": [c.as_list() for c in self.added],
            "a": self.a.as_list() if self.a else None,
            "b": self.b.as_list() if self.b else None,
        }


@dataclass
class Partition:
    n: int
    sets: list[PartitionSet]
    certified: bool = False

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "sets": [s.to_json() for s in self.sets],
            "certified": self.certified,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Partition":
        n = obj["n"]
        sets = []
        for s in obj["sets"]:
            sets.append(
                PartitionSet(
                    ell=s.get("ell", 0),
                    columns=tuple(ColumnRef.of(n, i, j) for i, j in s["columns"]),
                    removed=tuple(ColumnRef.of(n, i, j) for i, j in s.get("removed", [])),
                    added=tuple(ColumnRef.of(n, i, j) for i, j in s.get("added", [])),
                    a=ColumnRef.of(n, *s["a"]) if s.get("a") else None,
                    b=ColumnRef.of(n, *s["b"]) if s.get("b") else None,
                )
            )
        return cls(n, sets, bool(obj.get("certified", False)))


@dataclass
class VerificationReport:
    n: int
    set_size: int
    sizes: list[int]
    sizes_ok: list[bool]
    independent: list[bool]
    overlaps: list[tuple[int, int]] = field(default_factory=list)
    # sets kept greedily in order: valid and disjoint from every earlier kept set
    implied_bound: int = 0

    @property
    def disjoint(self) -> bool:
        return not self.overlaps

    @property
    def ok(self) -> bool:
        return all(self.sizes_ok) and all(self.independent) and self.disjoint

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "set_size": self.set_size,
            "sizes": self.sizes,
            "sizes_ok": self.sizes_ok,
            "independent": self.independent,
            "disjoint": self.disjoint,
            "overlaps": [list(p) for p in self.overlaps],
            "ok": self.ok,
            "implied_psi_lower_bound": self.implied_bound,
        }


def certify_family(rows, families: list[list[int]], set_size: int, n: int = 0) -> VerificationReport:
    """Check sizes, independence and pairwise disjointness of column families
    given as 0-based column positions of ``rows``."""
    sizes = [len(f) for f in families]
    independent = []
    for f in families:
        try:
            independent.append(is_independent_columns(rows, f))
        except ValueError:
            independent.append(False)
    overlaps = [
        (a, b)
        for a, b in combinations(range(len(families)), 2)
        if set(families[a]) & set(families[b])
    ]
    used: set[int] = set()
    kept = 0
    for k, f in enumerate(families):
        if sizes[k] == set_size and independent[k] and used.isdisjoint(f):
            used.update(f)
            kept += 1
    return VerificationReport(
        n=n,
        set_size=set_size,
        sizes=sizes,
        sizes_ok=[s == set_size for s in sizes],
        independent=independent,
        overlaps=overlaps,
        implied_bound=kept,
    )


def verify_partition(matrix: MagicMatrix, p: Partition) -> VerificationReport:
    n = matrix.n
    families = [[c.index(n) for c in s.columns] for s in p.sets]
    return certify_family(matrix.entries, families, 2 * n + 1, n=n)


def assemble_partition(n: int, matrix: MagicMatrix | None = None) -> Partition:
    """floor(n/4) - 1 disjoint independent sets D_l, certified exactly."""
    params(n)
    matrix = matrix or build_magic_matrix(n)
    s1, s2 = diagonal_sets(n)
    sets = []
    for ell in z_set(n):
        b_ell = build_b(n, ell)
        sw = _swap(n, ell)
        a_col = ColumnRef.of(n, ell, ell)
        b_col = ColumnRef.of(n, ell, n + 1 - ell)
        if a_col not in s1 or b_col not in s2:
            raise CertificationError(f"diagonal completion for l={ell} left S1 x S2")
        cols = tuple(sorted(b_ell | {a_col, b_col}))
        sets.append(PartitionSet(ell, cols, sw.removed, sw.added, a_col, b_col))
    partition = Partition(n, sets)
    report = verify_partition(matrix, partition)
    if not report.ok:
        raise CertificationError(f"partition for n={n} failed certification", report.to_json())
    partition.certified = True
    return partition


_LOG_SHIFT = Decimal("4.20032")


def n0_of_d(d: int) -> int:
    if d < 2:
        raise ValueError("d must be at least 2")
    if d <= 4:
        return 4 * min(2**d, d * (d + 1)) + 20
    x = d * (math.log(d) + 4.20032)
    c = math.ceil(x)
    if abs(x - round(x)) < 1e-6:
        # too close to an integer for double precision; redo in 50 digits
        with localcontext() as ctx:
            ctx.prec = 50
            xd = Decimal(d) * (Decimal(d).ln() + _LOG_SHIFT)
            c = int(xd.to_integral_value(rounding=ROUND_CEILING))
    return 4 * c + 20
