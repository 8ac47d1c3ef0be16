"""Multiplicative arithmetic functions with brute-force enumeration oracles.

The closed-form counters (euler_phi, tau, omega, u_d, r_d) operate on an
explicit prime factorization so the multiplicative structure is visible.
The brute_* functions recount the same quantities by exhaustive enumeration
over a residue system; they are deliberately independent of the closed forms
and exist as oracles for the test suite and the `verify` command.

All densities are exact `fractions.Fraction` values, never floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "ORACLE_CUTOFF",
    "Factorization",
    "GrowthRow",
    "brute_r_d",
    "brute_u_d",
    "euler_phi",
    "factor",
    "growth_scan",
    "is_prime",
    "omega",
    "primes_up_to",
    "r_d",
    "s_d",
    "tau",
    "trend_threshold",
    "u_d",
]

# Brute-force enumerations refuse moduli above this unless the caller raises
# the limit explicitly; keeps accidental O(n) scans out of large sweeps.
ORACLE_CUTOFF = 10**6

# Deterministic Miller-Rabin witness set, exact for all n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 10_000


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact below 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by a byte sieve."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start : n + 1 : p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def _rho_split(n: int) -> int:
    """Nontrivial factor of an odd composite n via Pollard's rho.

    The polynomial constants are walked in a fixed order so that repeated
    runs factor identically.
    """
    for c in range(1, 64):
        x = y = 2
        g = 1
        while g == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            g = math.gcd(abs(x - y), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho cycle failed to split {n}")


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition n = prod(p**e) with primes strictly increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"modulus must be >= 1, got {self.n}")
        prod, last = 1, 1
        for p, e in self.factors:
            if e < 1:
                raise ValueError(f"exponent {e} < 1 for prime {p}")
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    def __iter__(self):
        return iter(self.factors)


@lru_cache(maxsize=1 << 16)
def factor(n: int) -> Factorization:
    """Factor n >= 1: trial division to 10^4, then rho on the cofactor.

    Targets n up to about 10^12; rejects n = 0 and negatives.
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3, 5):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    p = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p <= _TRIAL_LIMIT and p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += wheel[i]
        i = (i + 1) % 8
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        if (r := math.isqrt(m)) ** 2 == m:
            stack += [r, r]
            continue
        g = _rho_split(m)
        stack += [g, m // g]
    return Factorization(n, tuple(sorted(out.items())))


def euler_phi(f: Factorization) -> int:
    """Euler's totient from the factorization: prod p^(e-1) (p-1)."""
    out = 1
    for p, e in f:
        out *= p ** (e - 1) * (p - 1)
    return out


def tau(f: Factorization) -> int:
    """Number of divisors: prod (e_i + 1)."""
    out = 1
    for _, e in f:
        out *= e + 1
    return out


def omega(f: Factorization) -> int:
    """Number of distinct prime factors (0 for n = 1)."""
    return len(f.factors)


def _u_d_prime_power(p: int, e: int, d: int) -> int:
    phi_pe = p ** (e - 1) * (p - 1)
    if d % 2 == 0 and p == 2 and e >= 3:
        return math.gcd(2 * d, phi_pe)
    return math.gcd(d, phi_pe)


def u_d(f: Factorization, d: int) -> int:
    """Number of solutions of x^d = 1 in Z/nZ.

    Computed per prime power: gcd(2d, phi) when d is even, p = 2 and e >= 3
    (the unit group splits as C2 x C2^(e-2)), else gcd(d, phi); multiplied
    across coprime factors. u_d(1) = 1.
    """
    if d < 1:
        raise ValueError(f"power must be >= 1, got {d}")
    out = 1
    for p, e in f:
        out *= _u_d_prime_power(p, e, d)
    return out


def r_d(f: Factorization, d: int) -> int:
    """Number of distinct d-th powers in a reduced residue system mod n.

    Per prime power this is phi(p^e) / u_d(p^e); multiplicative across
    factors. r_d(1) = 1.
    """
    if d < 1:
        raise ValueError(f"power must be >= 1, got {d}")
    out = 1
    for p, e in f:
        out *= p ** (e - 1) * (p - 1) // _u_d_prime_power(p, e, d)
    return out


def s_d(q: int, d: int) -> Fraction:
    """Density r_d(q) / q of d-th power residues, as an exact rational."""
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    return Fraction(r_d(factor(q), d), q)


def brute_u_d(n: int, d: int, cutoff: int = ORACLE_CUTOFF) -> int:
    """Oracle: count x in Z/nZ with x^d = 1 by exhaustive enumeration."""
    _check_oracle_args(n, d, cutoff)
    one = 1 % n
    return sum(1 for x in range(n) if pow(x, d, n) == one)


def brute_r_d(n: int, d: int, cutoff: int = ORACLE_CUTOFF) -> int:
    """Oracle: count distinct d-th powers of units mod n by enumeration."""
    _check_oracle_args(n, d, cutoff)
    return len({pow(x, d, n) for x in range(n) if math.gcd(x, n) == 1})


def _check_oracle_args(n: int, d: int, cutoff: int) -> None:
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if n > cutoff:
        raise ValueError(f"modulus {n} exceeds enumeration cutoff {cutoff}")


# ---------------------------------------------------------------------------
# Empirical growth of tau(n) and (2d)^omega(n) against n^eps.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthRow:
    """Per-block maxima of tau(n)/n^eps and base^omega(n)/n^eps over (lo, hi]."""

    block_lo: int
    block_hi: int
    eps: float
    base: int
    tau_max: float
    tau_argmax: int
    pow_max: float
    pow_argmax: int


def trend_threshold(stat: str, eps: float, d: int = 2) -> int | None:
    """Block bound past which the growth-scan maxima should stop increasing.

    Marginal analysis: a new prime p multiplies base^omega by base = 2d (or
    tau by 2) while n^eps grows by p^eps, so new primes pay only while
    p^eps < base; raising an existing exponent a to a+1 multiplies tau by
    (a+2)/(a+1), so it pays while that beats p^eps.  The product of all
    paying prime powers bounds the turnover region.  Returns None when the
    bound exceeds any desk-scale scan (notably eps = 0.25), in which case
    the table is reported but no monotone trend is asserted.
    """
    if stat not in ("tau", "pow_omega"):
        raise ValueError(f"unknown statistic {stat!r}")
    cap = 5 * 10**6
    threshold = 1
    if stat == "pow_omega":
        base = 2 * d
        for p in primes_up_to(10**4):
            if p**eps >= base:
                break
            threshold *= p
            if threshold > cap:
                return None
        return threshold
    for p in primes_up_to(10**4):
        ratio = p**eps
        if ratio >= 2:
            break
        a = 1
        while a < 64 and (a + 2) / (a + 1) > ratio:
            a += 1
        threshold *= p**a
        if threshold > cap:
            return None
    return threshold


def growth_scan(
    n_max: int,
    d: int = 2,
    eps_values: tuple[float, ...] = (0.5, 0.25),
    first_block: int = 16,
) -> list[GrowthRow]:
    """Tabulate block maxima of tau(n)/n^eps and (2d)^omega(n)/n^eps.

    Blocks are the doubling ranges (N, 2N] starting at first_block.  The
    caller decides, via trend_threshold, for which eps the block maxima can
    honestly be asserted non-increasing at desk scale.
    """
    import numpy as np

    if n_max < 2 * first_block:
        raise ValueError("scan range too small")
    tau_arr = np.zeros(n_max + 1, dtype=np.int64)
    for i in range(1, n_max + 1):
        tau_arr[i::i] += 1
    omega_arr = np.zeros(n_max + 1, dtype=np.int64)
    for p in primes_up_to(n_max):
        omega_arr[p::p] += 1
    base = 2 * d
    ns = np.arange(n_max + 1, dtype=np.float64)
    rows = []
    for eps in eps_values:
        scale = ns[1:] ** eps
        tau_ratio = tau_arr[1:] / scale
        pow_ratio = (float(base) ** omega_arr[1:]) / scale
        hi = first_block
        while hi <= n_max:
            lo = hi // 2
            sl = slice(lo, hi)  # ratios are indexed from n = 1
            ti = int(np.argmax(tau_ratio[sl]))
            pi = int(np.argmax(pow_ratio[sl]))
            rows.append(
                GrowthRow(
                    block_lo=lo,
                    block_hi=hi,
                    eps=eps,
                    base=base,
                    tau_max=float(tau_ratio[sl][ti]),
                    tau_argmax=lo + 1 + ti,
                    pow_max=float(pow_ratio[sl][pi]),
                    pow_argmax=lo + 1 + pi,
                )
            )
            hi *= 2
    return rows
