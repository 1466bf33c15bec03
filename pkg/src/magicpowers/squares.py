"""Concrete magic squares of d-th powers: verification, I/O and toy counts.

Grids store the bases x_{i,j}; every line check is on sums of x_{i,j}^d.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path

from magicpowers.errors import BudgetExceeded

__all__ = [
    "CountResult",
    "SquareGrid",
    "VerifyResult",
    "count_breakdown",
    "count_solutions",
    "emit_grid",
    "line_sums",
    "load_fixture",
    "parse_grid",
    "sample_line_constrained_grids",
    "verify_square",
]

FIXTURES = Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class SquareGrid:
    n: int
    d: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise ValueError(f"grid is not {self.n}x{self.n}")
        if self.d < 1:
            raise ValueError("d must be at least 1")
        for i, row in enumerate(self.entries, 1):
            for j, v in enumerate(row, 1):
                if v < 1:
                    raise ValueError(f"entry ({i},{j}) = {v} is not positive")

    @classmethod
    def of(cls, rows, d: int) -> "SquareGrid":
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        return cls(len(rows), d, rows)

    def powers(self) -> list[list[int]]:
        return [[v**self.d for v in r] for r in self.entries]

    def flat(self) -> list[int]:
        return [v for r in self.entries for v in r]


def line_sums(grid: SquareGrid) -> dict[str, int]:
    """Power sums over all 2n+2 lines, keyed 'row i', 'col j', 'diag', 'antidiag'."""
    n = grid.n
    p = grid.powers()
    out = {f"row {i + 1}": sum(p[i]) for i in range(n)}
    out.update({f"col {j + 1}": sum(p[i][j] for i in range(n)) for j in range(n)})
    out["diag"] = sum(p[i][i] for i in range(n))
    out["antidiag"] = sum(p[i][n - 1 - i] for i in range(n))
    return out


@dataclass
class VerifyResult:
    ok: bool
    mu: int
    failures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "mu": self.mu, "failures": self.failures}


def verify_square(grid: SquareGrid) -> VerifyResult:
    """All lines share one power sum and all n^2 bases are distinct.

    The reference sum is the most common line sum (row 1 on ties), so a
    single bad cell shows up as exactly the lines through it.
    """
    sums = line_sums(grid)
    counts = Counter(sums.values())
    top = max(counts.values())
    mu = next(v for v in sums.values() if counts[v] == top)
    failures = [f"{name}: {s} != {mu}" for name, s in sums.items() if s != mu]
    seen: dict[int, tuple[int, int]] = {}
    for i, row in enumerate(grid.entries, 1):
        for j, v in enumerate(row, 1):
            if v in seen:
                failures.append(f"distinct: base {v} repeated at {seen[v]} and {(i, j)}")
            else:
                seen[v] = (i, j)
    return VerifyResult(not failures, mu, failures)


def parse_grid(text: str) -> SquareGrid:
    """Parse 'n d' followed by n lines of n positive bases ('#' starts a comment)."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise ValueError("empty grid text")
    lineno, head = lines[0]
    try:
        n, d = (int(t) for t in head.split())
    except ValueError:
        raise ValueError(f"line {lineno}: expected 'n d', got {head!r}") from None
    body = lines[1:]
    if len(body) != n:
        raise ValueError(f"expected {n} grid rows, found {len(body)}")
    rows = []
    for lineno, line in body:
        try:
            vals = [int(t) for t in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer entry in {line!r}") from None
        if len(vals) != n:
            raise ValueError(f"line {lineno}: expected {n} entries, got {len(vals)}")
        if any(v < 1 for v in vals):
            raise ValueError(f"line {lineno}: entries must be positive")
        rows.append(vals)
    return SquareGrid.of(rows, d)


def emit_grid(grid: SquareGrid) -> str:
    width = max(len(str(v)) for v in grid.flat())
    body = "\n".join(" ".join(str(v).rjust(width) for v in r) for r in grid.entries)
    return f"{grid.n} {grid.d}\n{body}\n"


def load_fixture(name: str) -> SquareGrid:
    return parse_grid((FIXTURES / name).read_text())


def _rows_with_sum(n: int, d: int, X: int, mu: int) -> list[tuple[int, ...]]:
    pw = [x**d for x in range(X + 1)]
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], left: int) -> None:
        k = len(prefix)
        if k == n:
            if left == 0:
                out.append(tuple(prefix))
            return
        slots = n - k - 1
        for x in range(1, X + 1):
            rest = left - pw[x]
            if rest < slots:
                break
            if rest > slots * pw[X]:
                continue
            prefix.append(x)
            rec(prefix, rest)
            prefix.pop()

    rec([], mu)
    return out


def _solutions(n: int, d: int, X: int, mu: int, budget: int):
    """Yield every grid with bases in [1, X] whose 2n+2 power sums equal mu.

    Rows are drawn from the precomputed rows of power sum mu; partial column
    and diagonal sums are pruned against mu (all terms are positive).
    """
    rows = _rows_with_sum(n, d, X, mu)
    prow = [[x**d for x in r] for r in rows]
    nodes = 0
    chosen: list[int] = []
    cols = [0] * n
    diag = [0, 0]

    def rec(i: int):
        nonlocal nodes
        if i == n:
            if all(c == mu for c in cols) and diag[0] == mu and diag[1] == mu:
                yield tuple(rows[k] for k in chosen)
            return
        for k, p in enumerate(prow):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"enumeration budget {budget} exhausted")
            if any(cols[j] + p[j] > mu for j in range(n)):
                continue
            if diag[0] + p[i] > mu or diag[1] + p[n - 1 - i] > mu:
                continue
            for j in range(n):
                cols[j] += p[j]
            diag[0] += p[i]
            diag[1] += p[n - 1 - i]
            chosen.append(k)
            yield from rec(i + 1)
            chosen.pop()
            for j in range(n):
                cols[j] -= p[j]
            diag[0] -= p[i]
            diag[1] -= p[n - 1 - i]

    yield from rec(0)


@dataclass
class CountResult:
    n: int
    d: int
    X: int
    mu: int
    total: int
    distinct: int
    degenerate: int
    sigma_counts: dict[tuple[int, int, int, int], int]

    @property
    def consistent(self) -> bool:
        return self.distinct + self.degenerate == self.total

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "X": self.X,
            "mu": self.mu,
            "N0": self.total,
            "N": self.distinct,
            "degenerate": self.degenerate,
            "consistent": self.consistent,
            "sigma_total": sum(self.sigma_counts.values()),
        }


def count_breakdown(n: int, d: int, X: int, mu: int, budget: int = 10**7) -> CountResult:
    """N_0, N (distinct bases), the degenerate remainder, and N_sigma for each
    unordered pair of cells (grids with x_{i2,j2} = x_{i1,j1})."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    pairs = list(combinations(cells, 2))
    sigma = {(a[0] + 1, a[1] + 1, b[0] + 1, b[1] + 1): 0 for a, b in pairs}
    total = distinct = 0
    for grid in _solutions(n, d, X, mu, budget):
        total += 1
        flat = [v for r in grid for v in r]
        if len(set(flat)) == len(flat):
            distinct += 1
            continue
        for a, b in pairs:
            if grid[a[0]][a[1]] == grid[b[0]][b[1]]:
                sigma[(a[0] + 1, a[1] + 1, b[0] + 1, b[1] + 1)] += 1
    return CountResult(n, d, X, mu, total, distinct, total - distinct, sigma)


def count_solutions(n: int, d: int, X: int, mu: int, distinct: bool, budget: int = 10**7) -> int:
    res = count_breakdown(n, d, X, mu, budget)
    return res.distinct if distinct else res.total


def sample_line_constrained_grids(
    n: int, d: int, count: int, seed: int = 0, X: int = 12, max_tries: int = 10**6
) -> list[tuple[SquareGrid, int]]:
    """Random grids whose n rows and first n-1 columns share a power sum.

    Rows 1..n-2 are drawn at random from the rows of sum mu, row n-1 is
    scanned, and row n is solved from the column constraints plus its own
    row sum.  Column n is never looked at.
    """
    rng = random.Random(seed)
    by_sum: dict[int, list[tuple[int, ...]]] = {}
    pw = [x**d for x in range(X + 1)]
    for row in product(range(1, X + 1), repeat=n):
        by_sum.setdefault(sum(pw[x] for x in row), []).append(row)
    rich = sorted(m for m, rows in by_sum.items() if len(rows) >= 2 * n)
    roots = {x**d: x for x in range(1, 10 * X + 1)}
    out: list[tuple[SquareGrid, int]] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise BudgetExceeded(f"found {len(out)} of {count} grids in {max_tries} tries")
        mu = rng.choice(rich)
        reps = by_sum[mu]
        top = [rng.choice(reps) for _ in range(n - 2)]
        partial = [sum(r[j] ** d for r in top) for j in range(n)]
        cand = list(reps)
        rng.shuffle(cand)
        for r in cand:
            need = [mu - partial[j] - r[j] ** d for j in range(n - 1)]
            if any(v not in roots for v in need):
                continue
            last = [roots[v] for v in need]
            tail = mu - sum(x**d for x in last)
            if tail not in roots:
                continue
            last.append(roots[tail])
            out.append((SquareGrid.of(top + [r, last], d), mu))
            break
    return out
