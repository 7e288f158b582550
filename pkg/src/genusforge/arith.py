"""Exact integer and modular arithmetic primitives."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple


class Factorization(tuple):
    """Sorted tuple of ``(p, e)`` pairs."""

    def __new__(cls, pairs: Iterable[tuple[int, int]] = ()):
        return super().__new__(cls, tuple(sorted(pairs)))

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self]

    def valuation(self, p: int) -> int:
        for q, e in self:
            if q == p:
                return e
        return 0

    @property
    def omega(self) -> int:
        return len(self)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self)

    def value(self) -> int:
        return math.prod(p**e for p, e in self)


@lru_cache(maxsize=4096)
def factorize(N: int) -> Factorization:
    """Trial-division factorization of a positive integer."""
    if N < 1:
        raise ValueError(f"factorize needs N >= 1, got {N}")
    pairs = []
    n = N
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            pairs.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        pairs.append((n, 1))
    return Factorization(pairs)


def prime_divisors(N: int) -> list[int]:
    return factorize(abs(N)).primes


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = factorize(n)
    return len(f) == 1 and f[0][1] == 1


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero integer or Fraction."""
    if x == 0:
        raise ValueError("valuation of zero")
    num = getattr(x, "numerator", x)
    den = getattr(x, "denominator", 1)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p: int):
    """x / p^v(x) as an integer or Fraction."""
    r = Fraction(x) / Fraction(p) ** valuation(x, p)
    return r.numerator if r.denominator == 1 else r


def mod_unit(x, p: int, m: int) -> int:
    """Reduce a p-integral rational modulo m (m a power of p)."""
    num = getattr(x, "numerator", x)
    den = getattr(x, "denominator", 1)
    if den % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return num * pow(den, -1, m) % m


def _check_odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def legendre(a: int, p: int) -> int:
    _check_odd_prime(p)
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@lru_cache(maxsize=None)
def nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue modulo an odd prime."""
    _check_odd_prime(p)
    u = 2
    while legendre(u, p) != -1:
        u += 1
    return u


def sqrt_mod(a: int, p: int) -> int:
    """Tonelli-Shanks square root, deterministic via the canonical non-residue."""
    _check_odd_prime(p)
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise ValueError(f"{a} has no square root modulo {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = nonresidue(p)
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int:
    """Square root of a unit a modulo p^k (Hensel lifting).

    For p = 2 the unit must be 1 mod 8 and k >= 3; the root returned is odd.
    """
    mod = p**k
    a %= mod
    if p == 2:
        if a % 8 != 1:
            raise ValueError(f"{a} is not a 2-adic square")
        x = 1
        # x^2 = a mod 2^j, lift to 2^(j+1) by x -> x + 2^(j-1) when needed
        for j in range(3, k):
            if (x * x - a) % (1 << (j + 1)):
                x += 1 << (j - 1)
        return x % mod
    x = sqrt_mod(a, p)
    if x == 0:
        raise ValueError("sqrt_mod_prime_power needs a unit")
    m = p
    while m < mod:
        m = min(m * m, mod)
        x = (x - (x * x - a) * pow(2 * x, -1, m)) % m
    return x % mod


class ConicSolution(NamedTuple):
    x: int
    y: int


def solve_conic(a: int, b: int, c: int, p: int, seed: int = 0) -> ConicSolution:
    """Return (x, y) with a x^2 + b y^2 + c = 0 mod p; a, b, c units mod p."""
    _check_odd_prime(p)
    if a % p == 0 or b % p == 0 or c % p == 0:
        raise ValueError("solve_conic needs coefficients prime to p")
    binv = pow(b, -1, p)
    # deterministic sweep first; small p hits here immediately
    for x in range(min(p, 64)):
        t = (-c - a * x * x) * binv % p
        if legendre(t, p) >= 0:
            return ConicSolution(x, sqrt_mod(t, p))
    rng = random.Random(seed)
    while True:
        x = rng.randrange(p)
        t = (-c - a * x * x) * binv % p
        if legendre(t, p) >= 0:
            return ConicSolution(x, sqrt_mod(t, p))


def crt(residues: list[int], moduli: list[int]) -> int:
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli differ in length")
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        if n < 1:
            raise ValueError("moduli must be positive")
        if math.gcd(m, n) != 1:
            raise ValueError(f"moduli {m} and {n} are not coprime")
        # x + m*t = r mod n
        t = (r - x) * pow(m, -1, n) % n if n > 1 else 0
        x += m * t
        m *= n
    return x % m


def squarefree_part(n: int) -> int:
    """Signed squarefree part of a nonzero integer."""
    if n == 0:
        raise ValueError("squarefree part of zero")
    s = -1 if n < 0 else 1
    for p, e in factorize(abs(n)):
        if e % 2:
            s *= p
    return s


def hilbert_symbol(a, b, p: int) -> int:
    """Hilbert symbol (a, b)_p for nonzero rationals; p = -1 means the real place."""
    if p == -1:
        return -1 if (a < 0 and b < 0) else 1
    va, vb = valuation(a, p), valuation(b, p)
    ua, ub = unit_part(a, p), unit_part(b, p)
    if p == 2:
        m = 8
        u = mod_unit(ua, 2, m)
        w = mod_unit(ub, 2, m)
        eps = lambda x: ((x - 1) // 2) % 2
        omg = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(w) + va * omg(w) + vb * omg(u)
        return -1 if e % 2 else 1
    u = mod_unit(ua, p, p)
    w = mod_unit(ub, p, p)
    s = (-1) ** (va * vb * ((p - 1) // 2) % 2)
    s *= legendre(u, p) ** (vb % 2)
    s *= legendre(w, p) ** (va % 2)
    return s


def is_local_square(x, p: int) -> bool:
    """Whether a nonzero rational is a square in Q_p."""
    if valuation(x, p) % 2:
        return False
    u = unit_part(x, p)
    if p == 2:
        return mod_unit(u, 2, 8) == 1
    return legendre(mod_unit(u, p, p), p) == 1
