"""Acceptance gate: one test and one PASS/FAIL line per criterion."""

from __future__ import annotations

import cmath
import math
import random
import time

from conftest import ACCEPTANCE
from magicpowers.analytic import (
    AnalyticParams,
    a_q,
    nu_count,
    singular_integral_1d,
)
from magicpowers.construction import (
    assemble_partition,
    badvec_intersection,
    build_btilde,
    n0_of_d,
    params,
)
from magicpowers.core_matrix import Sigma, build_magic_matrix, sigma_singular_witness
from magicpowers.exact_linalg import lemma_first_system, nullspace_dim, rank
from magicpowers.psi_oracle import (
    exhaustive_disjoint_bases,
    psi_exact,
    verify_contracted_bound,
)
from magicpowers.squares import (
    count_breakdown,
    line_sums,
    load_fixture,
    sample_line_constrained_grids,
    verify_square,
)
from oracles import mp_n0

# (X, mu) -> (N0, N) at n = 3, d = 1, frozen from the exhaustive numpy oracle
COUNT_ORACLE = {
    (3, 3): (1, 0), (3, 6): (5, 0), (3, 9): (1, 0),
    (4, 3): (1, 0), (4, 6): (5, 0), (4, 9): (5, 0), (4, 12): (1, 0),
    (5, 3): (1, 0), (5, 6): (5, 0), (5, 9): (13, 0), (5, 12): (5, 0), (5, 15): (1, 0),
}


def record(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((name, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_partition_rank_8_to_64():
    start = time.perf_counter()
    bad = []
    for n in range(8, 65):
        part = assemble_partition(n)
        idx = [[c.index(n) for c in s.columns] for s in part.sets]
        flat = [k for s in idx for k in s]
        if not (
            part.certified
            and len(idx) == n // 4 - 1
            and all(len(s) == 2 * n + 1 for s in idx)
            and len(flat) == len(set(flat))
        ):
            bad.append(n)
    secs = time.perf_counter() - start
    record("explicit partition n=8..64", not bad and secs < 120, f"failures={bad}, {secs:.1f}s")


def test_matrix_rank_3_to_64():
    start = time.perf_counter()
    bad = [n for n in range(3, 65) if rank(build_magic_matrix(n)) != 2 * n + 1]
    secs = time.perf_counter() - start
    record("rank M0 = 2n+1, n=3..64", not bad and secs < 60, f"failures={bad}, {secs:.1f}s")


def test_diagonal_hits_closed_form():
    bad = []
    for n in range(8, 25):
        for ell in range(1, params(n).N + 1):
            hits = {c for c in build_btilde(n, ell) if c.i == c.j or c.i + c.j == n + 1}
            if hits != set(badvec_intersection(n, ell)):
                bad.append((n, ell))
    record("diagonal hits of stepped sets, n=8..24", not bad, f"failures={bad}")


def test_pairing_system_trivial_nullspace():
    checked, bad = 0, []
    for n in range(8, 13):
        for i1 in range(2, n):
            for m in range(i1 + 1, n):
                for i2 in range(m + 2, n):
                    checked += 1
                    if nullspace_dim(lemma_first_system(n, i1, m, i2)) != 0:
                        bad.append((n, i1, m, i2))
    record("2n x 2n system trivial kernel, n=8..12", not bad and checked > 0,
           f"{checked} triples, failures={bad}")


def test_psi_consistency():
    start = time.perf_counter()
    values, bad = {}, []
    for n in range(8, 13):
        res = psi_exact(build_magic_matrix(n), seed_lower=False)
        values[n] = res.exact
        if res.exact is None or not n // 4 - 1 <= res.exact <= n * n // (2 * n + 1):
            bad.append(n)
    m8 = build_magic_matrix(8)
    cross = {k: exhaustive_disjoint_bases(m8, k) is not None for k in (1, 2, 3)}
    agree = all(cross[k] == (k <= values[8]) for k in cross)
    secs = time.perf_counter() - start
    record("Psi bounds n=8..12 and exhaustive cross-check at n=8",
           not bad and agree and secs < 1800,
           f"Psi={values}, exhaustive k<=3 found={cross}, {secs:.1f}s")


def test_contracted_bound():
    rng = random.Random(20240601)
    bad, total = [], 0
    for n in (16, 20):
        cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
        for _ in range(50):
            a, b = rng.sample(cells, 2)
            total += 1
            if not verify_contracted_bound(n, Sigma(*a, *b)):
                bad.append((n, a, b))
    record("contracted bound, n in {16,20}, 50 sigma each", not bad, f"{total} checked, failures={bad}")


def test_euler_fixture():
    res = verify_square(load_fixture("euler.txt"))
    record("Euler square", res.ok and res.mu == 8515, f"ok={res.ok}, mu={res.mu}")


def test_redundancy_property():
    total, bad = 0, 0
    for n in (3, 4):
        for d in (1, 2):
            for grid, mu in sample_line_constrained_grids(n, d, 250, seed=100 * n + d):
                total += 1
                bad += line_sums(grid)[f"col {n}"] != mu
    record("2n-1 lines imply the last column", total == 1000 and bad == 0,
           f"{total} grids, {bad} violations")


def test_sigma_witness():
    bad = [n for n in range(3, 65) if sigma_singular_witness(n)[1] != n * n - n]
    record("singular witness count n^2-n, n=3..64", not bad, f"failures={bad}")


def test_analytic_a1():
    vals = {(n, d): a_q(AnalyticParams(n, d, n), 1) for n in (3, 4) for d in (1, 2, 3)}
    record("A(1) = 1", all(v == 1.0 for v in vals.values()), f"{vals}")


def test_analytic_imag_residual():
    p = AnalyticParams(4, 2, 4)
    res = {q: a_q(p, q, detail=True) for q in (2, 3, 4, 5)}
    worst = max(r.imag_residual for r in res.values())
    record("Im A(q) relative residual, n=4, q<=5", worst < 1e-9, f"max={worst:.2e}")


def test_analytic_decay_envelope():
    # T0 is the computed Psi(M0(4)); the constant is fixed by q = 2
    n, d = 4, 2
    t0 = psi_exact(build_magic_matrix(n)).exact
    expo = -(2 * n + 1) * (t0 / d - 1)
    p = AnalyticParams(n, d, 4)
    vals = {q: abs(a_q(p, q)) for q in (2, 3, 4, 5)}
    c = vals[2] / 2**expo
    over = {q: (round(v, 4), round(c * q**expo, 4)) for q, v in vals.items() if v > c * q**expo * (1 + 1e-12)}
    record("decay envelope n=4, d=2", not over,
           f"T0={t0}, exponent={expo}, C={c:.4g}, exceed (|A|, bound)={over}")


def test_analytic_integral():
    i0 = singular_integral_1d(0.0, 2)
    worst = 0.0
    for beta in (0.1, 0.5, 1.0, 2.75, -3.3, 10.0, 25.5):
        w = 2j * math.pi * beta
        worst = max(worst, abs(singular_integral_1d(beta, 1) - (cmath.exp(w) - 1) / w))
    record("I(0)=1 and linear closed form", i0 == 1 and worst < 1e-8, f"I(0)={i0}, max err={worst:.2e}")


def test_analytic_nu_invariance():
    bad, checked = [], 0
    for d in (1, 2, 3):
        base = AnalyticParams(3, d, 3)
        for p, m in ((2, 1), (3, 1), (2, 2)):
            ref = nu_count(base, p, m)
            for p0 in (5, 7):
                checked += 1
                got = nu_count(AnalyticParams.specialized(3, d, p0), p, m)
                if got != ref:
                    bad.append((d, p**m, p0, got, ref))
    record("nu invariance under mu = n p0^d, n=3", not bad, f"{checked} cases, failures={bad}")


def test_counting_decomposition():
    bad = []
    for (X, mu), expected in COUNT_ORACLE.items():
        r = count_breakdown(3, 1, X, mu)
        if (r.total, r.distinct) != expected or r.distinct + r.degenerate != r.total:
            bad.append((X, mu))
    record("N + degenerate = N0, n=3, d=1, X<=5", not bad, f"{len(COUNT_ORACLE)} cases, failures={bad}")


def test_n0_table():
    small = (n0_of_d(2), n0_of_d(3))
    bad = [d for d in range(5, 21) if n0_of_d(d) != mp_n0(d)]
    record("n0 table", small == (36, 52) and not bad, f"d=2,3 -> {small}, mismatches={bad}")
