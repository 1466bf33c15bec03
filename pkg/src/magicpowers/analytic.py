"""Local densities of the magic-square system at desk scale.

All modular work (x^d mod q, a.c mod q, congruence counts) is exact integer
arithmetic; only the final roots of unity and integrals are floating point,
and those are accumulated with ``math.fsum``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from magicpowers.core_matrix import build_magic_matrix
from magicpowers.errors import BudgetExceeded

__all__ = [
    "AnalyticParams",
    "a_q",
    "chi_p_partial",
    "gauss_sum",
    "nu_count",
    "phi_window",
    "singular_integral_1d",
    "singular_integral_phi_estimate",
]

DEFAULT_BUDGET = 5 * 10**7


@dataclass(frozen=True)
class AnalyticParams:
    n: int
    d: int
    mu: int
    p0: int | None = None
    zeta: float | None = None

    def __post_init__(self):
        if self.n < 3 or self.d < 1 or self.mu < 1:
            raise ValueError(f"need n >= 3, d >= 1, mu >= 1; got {self}")
        if self.p0 is not None:
            if not _is_prime(self.p0):
                raise ValueError(f"p0={self.p0} is not prime")
            if self.mu != self.n * self.p0**self.d:
                raise ValueError(f"mu={self.mu} is not n * p0^d = {self.n * self.p0**self.d}")

    @classmethod
    def specialized(cls, n: int, d: int, p0: int) -> "AnalyticParams":
        return cls(n, d, n * p0**d, p0=p0)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, math.isqrt(p) + 1))


def _prime_factors(q: int) -> list[int]:
    out, k = [], 2
    while k * k <= q:
        if q % k == 0:
            out.append(k)
            while q % k == 0:
                q //= k
        k += 1
    if q > 1:
        out.append(q)
    return out


def _e(num: int, q: int) -> complex:
    """exp(2 pi i num / q) with num reduced mod q first; exact on quarter turns."""
    r = num % q
    if 4 * r % q == 0:
        return (1, 1j, -1, -1j)[4 * r // q]
    t = 2.0 * math.pi * r / q
    return complex(math.cos(t), math.sin(t))


@lru_cache(maxsize=4096)
def _gauss_sum(q: int, a: int, d: int) -> complex:
    terms = [_e(a * pow(x, d, q), q) for x in range(1, q + 1)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def gauss_sum(q: int, a: int, d: int) -> complex:
    """S(q, a) = sum_{x=1}^{q} e_q(a x^d)."""
    if q < 1:
        raise ValueError("q must be positive")
    return _gauss_sum(q, a % q, d)


@dataclass
class AqResult:
    value: float
    imag: float
    tuples: int
    mass: float = 0.0  # q^{-n^2} sum of |term|, the scale of rounding error

    @property
    def imag_residual(self) -> float:
        """|Im A(q)| relative to |A(q)|, or to ``mass`` when A(q) vanishes."""
        size = abs(complex(self.value, self.imag))
        denom = size if size > 1e-9 * self.mass else self.mass
        return abs(self.imag) / denom if denom else 0.0


def a_q(params: AnalyticParams, q: int, budget: int = DEFAULT_BUDGET, detail: bool = False):
    """A(q) = q^{-n^2} sum_{a mod q, gcd(q, a_1..a_R) = 1} prod_c S(q, a.c) e_q(-mu sum a).

    The imaginary part cancels under a -> -a; it is computed and reported
    rather than dropped.
    """
    n, d = params.n, params.d
    m0 = np.array(build_magic_matrix(n).entries, dtype=np.int64)
    R = m0.shape[0]
    if q == 1:
        res = AqResult(1.0, 0.0, 1, 1.0)
        return res if detail else res.value
    total = q**R
    if total > budget:
        raise BudgetExceeded(f"A({q}) needs {total} tuples, budget {budget}")
    table = np.array([gauss_sum(q, b, d) for b in range(q)], dtype=np.complex128)
    twist = np.array([_e(-params.mu * s, q) for s in range(q)], dtype=np.complex128)
    primes = _prime_factors(q)
    pw = q ** np.arange(R - 1, -1, -1, dtype=np.int64)
    re_parts: list[float] = []
    im_parts: list[float] = []
    abs_parts: list[float] = []
    chunk = 1 << 17
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // pw[None, :]) % q
        keep = np.zeros(len(idx), dtype=bool)
        for p in primes:
            keep |= (digits % p != 0).any(axis=1)
        digits = digits[keep]
        if not len(digits):
            continue
        residues = (digits @ m0) % q
        vals = table[residues].prod(axis=1) * twist[digits.sum(axis=1) % q]
        re_parts.append(math.fsum(vals.real))
        im_parts.append(math.fsum(vals.imag))
        abs_parts.append(math.fsum(np.abs(vals)))
    scale = float(q) ** (-(n * n))
    res = AqResult(
        math.fsum(re_parts) * scale,
        math.fsum(im_parts) * scale,
        total,
        math.fsum(abs_parts) * scale,
    )
    return res if detail else res.value


@dataclass
class ChiResult:
    value: float
    terms: list[float]

    @property
    def last_term(self) -> float:
        return abs(self.terms[-1]) if self.terms else 0.0


def chi_p_partial(params: AnalyticParams, p: int, K: int, budget: int = DEFAULT_BUDGET) -> ChiResult:
    """1 + sum_{k=1}^{K} A(p^k); the last term's size indicates truncation error."""
    if not _is_prime(p):
        raise ValueError(f"p={p} is not prime")
    terms = [a_q(params, p**k, budget) for k in range(1, K + 1)]
    return ChiResult(1.0 + math.fsum(terms), terms)


def nu_count(params: AnalyticParams, p: int, m: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of x mod p^m with F_0(x) = mu (mod p^m) in all 2n+1 equations.

    Rows are processed one at a time: each admissible row (power sum = mu)
    shifts the running residues of the first n-1 column sums and the two
    diagonal sums, so the state space is q^(n+1) instead of q^(n^2).
    """
    n, d = params.n, params.d
    q = p**m
    mu = params.mu % q
    row_count = q**n
    if row_count * q ** (n + 1) > budget:
        raise BudgetExceeded(f"nu({q}) for n={n} exceeds budget {budget}")
    pows = [pow(x, d, q) for x in range(q)]
    dtype = np.int64 if n * n * math.log2(q) < 62 else object
    state = np.zeros((q,) * (n + 1), dtype=dtype)
    state[(0,) * (n + 1)] = 1
    for i in range(n):
        shifts: dict[tuple[int, ...], int] = {}
        for row in product(range(q), repeat=n):
            pr = [pows[x] for x in row]
            if sum(pr) % q != mu:
                continue
            key = tuple(pr[:-1]) + (pr[i], pr[n - 1 - i])
            shifts[key] = shifts.get(key, 0) + 1
        new = np.zeros_like(state)
        for key, mult in shifts.items():
            new += mult * np.roll(state, shift=key, axis=tuple(range(n + 1)))
        state = new
    return int(state[(mu,) * (n + 1)])


def singular_integral_1d(beta: float, d: int, tol: float = 1e-10) -> complex:
    """I(beta) = int_0^1 exp(2 pi i beta xi^d) d xi by adaptive quadrature."""
    from scipy.integrate import quad

    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    if beta == 0:
        return complex(1.0, 0.0)
    limit = max(200, int(abs(beta)) * 50)
    w = 2.0 * math.pi * beta
    re, _ = quad(lambda x: math.cos(w * x**d), 0.0, 1.0, epsabs=tol, epsrel=0.0, limit=limit)
    im, _ = quad(lambda x: math.sin(w * x**d), 0.0, 1.0, epsabs=tol, epsrel=0.0, limit=limit)
    return complex(re, im)


def phi_window(eta, L: float):
    """Tent kernel L(1 - L|eta|) on |eta| <= 1/L, zero outside."""
    eta = np.abs(eta)
    return np.where(eta <= 1.0 / L, L * (1.0 - L * eta), 0.0)


@dataclass
class PhiEstimate:
    value: float
    stderr: float
    samples: int
    L: float
    approximate: bool = True


def singular_integral_phi_estimate(
    params: AnalyticParams,
    L: float,
    samples: int,
    X: float = 1.0,
    seed: int = 0,
    eps0: float = 0.05,
    batch: int = 1 << 16,
) -> PhiEstimate:
    """Monte Carlo estimate of int_{[0,1]^{n^2}} prod_i Phi_L(F_{0,i}(x) - mu X^{-d}) dx.

    The target mu X^{-d} must equal n zeta^d with zeta in [eps0, 1 - eps0].
    The result is a sample mean, not a rigorous value.
    """
    n, d = params.n, params.d
    target = params.mu / X**d
    zeta = (target / n) ** (1.0 / d)
    if not eps0 <= zeta <= 1.0 - eps0:
        raise ValueError(f"zeta={zeta:.6g} outside [{eps0}, {1 - eps0}]")
    m0 = np.array(build_magic_matrix(n).entries, dtype=np.float64)
    rng = np.random.default_rng(seed)
    sums: list[float] = []
    sq: list[float] = []
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        x = rng.random((b, n * n))
        forms = (x**d) @ m0.T
        w = phi_window(forms - target, L).prod(axis=1)
        sums.append(math.fsum(w))
        sq.append(math.fsum(w * w))
        done += b
    mean = math.fsum(sums) / samples
    var = max(math.fsum(sq) / samples - mean * mean, 0.0)
    stderr = math.sqrt(var / max(samples - 1, 1))
    return PhiEstimate(mean, stderr, samples, L)
