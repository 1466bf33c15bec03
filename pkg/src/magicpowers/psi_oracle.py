"""Maximum number of disjoint bases of the column matroid.

``psi_exact`` packs bases with the matroid partition algorithm: k copies of
the linear matroid are grown together, and a column that fits nowhere is
routed in along a shortest exchange path.  Exchange edges come from
fundamental circuits, read off an exact integer basis with tracked
coefficients.  ``exhaustive_disjoint_bases`` is a plain backtracking search
that shares nothing with the partition code except the rank primitive.
"""

from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import dataclass, field

from magicpowers.construction import assemble_partition, certify_family
from magicpowers.core_matrix import (
    ColumnRef,
    MagicMatrix,
    Sigma,
    build_magic_matrix,
    contract_sigma,
    contracted_column_index,
)
from magicpowers.errors import BudgetExceeded, CertificationError
from magicpowers.exact_linalg import IncrementalBasis, as_integer_rows, rank

__all__ = [
    "PsiResult",
    "contracted_bound_report",
    "exhaustive_disjoint_bases",
    "pack_bases",
    "psi_exact",
    "psi_greedy",
    "psi_upper_bound",
    "verify_contracted_bound",
]


@dataclass
class Budget:
    nodes: int | None = 10**7
    seconds: float | None = None
    used: int = 0
    started: float = field(default_factory=time.perf_counter)

    def tick(self, k: int = 1) -> None:
        self.used += k
        if self.nodes is not None and self.used > self.nodes:
            raise BudgetExceeded(f"node budget {self.nodes} exhausted")
        if self.seconds is not None and time.perf_counter() - self.started > self.seconds:
            raise BudgetExceeded(f"time budget {self.seconds}s exhausted")

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.started


@dataclass
class PsiResult:
    n: int
    lower: int
    upper: int
    exact: int | None = None
    witness: list[list[int]] | None = None
    nodes: int = 0
    elapsed: float = 0.0
    note: str = ""

    def to_json(self, timing: bool = False) -> dict:
        out = {"n": self.n, "lower": self.lower, "upper": self.upper}
        if self.exact is not None:
            out["exact"] = self.exact
        if self.witness is not None:
            out["witness"] = witness_json(self.n, self.witness)
        budget = {"nodes": self.nodes}
        if timing:
            budget["elapsed"] = round(self.elapsed, 3)
        out["budget"] = budget
        if self.note:
            out["note"] = self.note
        return out


def witness_json(n: int, families: list[list[int]]) -> dict:
    sets = []
    for k, fam in enumerate(families):
        if n and n >= 3:
            cols = [[c // n + 1, c % n + 1] for c in sorted(fam)]
        else:
            cols = sorted(fam)
        sets.append({"ell": k, "columns": cols})
    return {"n": n, "sets": sets, "certified": True}


def _setup(matrix):
    rows = as_integer_rows(matrix)
    n = matrix.n if isinstance(matrix, MagicMatrix) else 0
    cols = [
        {r: row[k] for r, row in enumerate(rows) if row[k]} for k in range(len(rows[0]))
    ]
    return n, rows, cols


def psi_upper_bound(matrix) -> int:
    rows = as_integer_rows(matrix)
    return len(rows[0]) // len(rows)


def _recertify(rows, families, size, what: str) -> None:
    report = certify_family(rows, families, size)
    if not report.ok:
        raise CertificationError(f"{what} witness failed re-certification", report.to_json())


def pack_bases(cols, r: int, k: int, budget: Budget, order=None) -> list[list[int]] | None:
    """Try to find k disjoint independent r-sets among ``cols``.

    Returns the k sets, or None once the union of k copies provably has
    rank below k*r.
    """
    m = len(cols)
    order = list(range(m)) if order is None else list(order)
    sets: list[list[int]] = [[] for _ in range(k)]
    where: list[int | None] = [None] * m
    bases: list[IncrementalBasis | None] = [None] * k
    target = k * r
    placed = 0

    def basis(s: int) -> IncrementalBasis:
        b = bases[s]
        if b is None:
            b = IncrementalBasis(track=True)
            for e in sets[s]:
                if not b.add(cols[e], e):
                    raise CertificationError(f"set {s} became dependent after an exchange")
            bases[s] = b
        return b

    for pos, x in enumerate(order):
        if placed == target:
            break
        if placed + (m - pos) < target:
            return None
        parent: dict[int, tuple[int, int]] = {}
        seen = {x}
        queue = deque([x])
        sink = None
        while queue and sink is None:
            y = queue.popleft()
            for s in range(k):
                if where[y] == s:
                    continue
                budget.tick()
                coeffs = basis(s).express(cols[y])
                if coeffs is None:
                    sink = (y, s)
                    break
                # y may replace any member of its fundamental circuit in set s
                for z in sorted(coeffs):
                    if z not in seen:
                        seen.add(z)
                        parent[z] = (y, s)
                        queue.append(z)
        if sink is None:
            continue
        y, s = sink
        while True:
            old = where[y]
            if old is not None:
                sets[old].remove(y)
                bases[old] = None
            sets[s].append(y)
            where[y] = s
            bases[s] = None
            if y == x:
                break
            y, s = parent[y]
        placed += 1
    if placed < target:
        return None
    return [sorted(s) for s in sets]


def psi_greedy(matrix, order=None, seed_sets=None, rng_seed: int | None = None) -> PsiResult:
    """Lower bound: peel off independent r-sets by a greedy rank scan."""
    start = time.perf_counter()
    n, rows, cols = _setup(matrix)
    r = rank(rows)
    m = len(cols)
    families = [sorted(f) for f in (seed_sets or [])]
    if families:
        _recertify(rows, families, r, "seed")
    used = {c for f in families for c in f}
    remaining = [c for c in (range(m) if order is None else order) if c not in used]
    if rng_seed is not None:
        random.Random(rng_seed).shuffle(remaining)
    while len(remaining) >= r > 0:
        b = IncrementalBasis()
        chosen = []
        for c in remaining:
            if b.add(cols[c]):
                chosen.append(c)
                if len(chosen) == r:
                    break
        if len(chosen) < r:
            break
        families.append(sorted(chosen))
        taken = set(chosen)
        remaining = [c for c in remaining if c not in taken]
    _recertify(rows, families, r, "greedy")
    return PsiResult(
        n=n,
        lower=len(families),
        upper=m // r if r else 0,
        witness=families,
        elapsed=time.perf_counter() - start,
    )


def psi_exact(
    matrix,
    budget_nodes: int | None = 10**7,
    budget_seconds: float | None = None,
    seed_lower: bool = True,
) -> PsiResult:
    """Exact maximum number of disjoint bases, or bounds if the budget runs out.

    With ``seed_lower`` the explicit partition and a greedy scan supply a
    starting lower bound; without it every k is decided by base packing.
    """
    n, rows, cols = _setup(matrix)
    r = rank(rows)
    if r != len(rows):
        raise ValueError(f"matrix must have full row rank; rank {r} < {len(rows)} rows")
    budget = Budget(budget_nodes, budget_seconds)
    upper = len(cols) // r
    lower, best = 0, []
    if seed_lower:
        seeds = None
        if isinstance(matrix, MagicMatrix) and matrix.n >= 8:
            part = assemble_partition(matrix.n, matrix)
            seeds = [[c.index(matrix.n) for c in s.columns] for s in part.sets]
        greedy = psi_greedy(matrix, seed_sets=seeds)
        lower, best = greedy.lower, greedy.witness
    try:
        k = upper
        while k > lower:
            found = pack_bases(cols, r, k, budget)
            if found is not None:
                lower, best = k, found
                break
            upper = k - 1
            k -= 1
    except BudgetExceeded as exc:
        _recertify(rows, best, r, "lower-bound")
        return PsiResult(n, lower, upper, None, best, budget.used, budget.elapsed, note=str(exc))
    _recertify(rows, best, r, "exact")
    return PsiResult(n, lower, lower, lower, best, budget.used, budget.elapsed)


def exhaustive_disjoint_bases(matrix, k: int, budget_nodes: int | None = 10**7) -> list[list[int]] | None:
    """Backtracking search for k disjoint independent r-sets.

    Each column is placed into one of the k sets or skipped; empty sets are
    interchangeable so only the first empty one is tried, and a branch dies
    as soon as some open set can no longer reach full rank from the columns
    still unplaced.  Complete: a None return means no such family exists.
    """
    n, rows, cols = _setup(matrix)
    r = rank(rows)
    m = len(cols)
    budget = Budget(budget_nodes)
    if k == 0:
        return []
    if k * r > m:
        return None
    members: list[list[int]] = [[] for _ in range(k)]

    def completable(b: IncrementalBasis, pos: int) -> bool:
        if len(b) == r:
            return True
        probe = b.copy()
        for q in range(pos, m):
            probe.add(cols[q])
            if len(probe) == r:
                return True
        return False

    def go(pos: int, bases: list[IncrementalBasis]) -> bool:
        budget.tick()
        missing = sum(r - len(b) for b in bases)
        if missing == 0:
            return True
        if m - pos < missing:
            return False
        if not all(completable(b, pos) for b in bases):
            return False
        v = cols[pos]
        tried_empty = False
        for s in range(k):
            if len(bases[s]) == r:
                continue
            if len(bases[s]) == 0:
                if tried_empty:
                    continue
                tried_empty = True
            nb = bases[s].copy()
            if nb.add(v):
                members[s].append(pos)
                if go(pos + 1, bases[:s] + [nb] + bases[s + 1 :]):
                    return True
                members[s].pop()
        if m - pos - 1 >= missing:
            return go(pos + 1, bases)
        return False

    if not go(0, [IncrementalBasis() for _ in range(k)]):
        return None
    families = [sorted(f) for f in members]
    _recertify(rows, families, r, "exhaustive")
    return families


def contracted_bound_report(n: int, sigma: Sigma, greedy: bool = True) -> dict:
    """Carry the explicit partition over to M_sigma.

    Sets holding the deleted column (i2, j2) are dropped.  A set holding the
    kept column (i1, j1) keeps it, now carrying the merged variable, and is
    re-certified like every other survivor.
    """
    if sigma is None:
        raise ValueError("sigma must be nonzero")
    sigma.validate(n)
    m0 = build_magic_matrix(n)
    part = assemble_partition(n, m0)
    rows = contract_sigma(m0, sigma)
    survivors, dropped = [], []
    for s in part.sets:
        if sigma.removed in s.columns:
            dropped.append(s.ell)
            continue
        survivors.append((s.ell, [contracted_column_index(n, sigma, c) for c in s.columns]))
    report = certify_family(rows, [f for _, f in survivors], 2 * n + 1, n=n)
    needed = n // 4 - 3
    out = {
        "n": n,
        "sigma": [sigma.i1, sigma.j1, sigma.i2, sigma.j2],
        "t0_sets": len(part.sets),
        "dropped": dropped,
        "survivor_ells": [ell for ell, _ in survivors],
        "survivors_certified": report.implied_bound,
        "survivor_report": report.to_json(),
        "required": needed,
        "ok": report.implied_bound >= needed,
    }
    if greedy:
        fresh = psi_greedy(rows)
        out["fresh_greedy"] = fresh.lower
    return out


def verify_contracted_bound(n: int, sigma: Sigma) -> bool:
    if n < 8:
        raise ValueError("contracted bound needs n >= 8")
    return contracted_bound_report(n, sigma, greedy=False)["ok"]
