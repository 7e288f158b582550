"""Counting local genus symbols: exact series, partition numbers, bounds."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import iv

from .arith import factorize
from .genus import dyadic_local_symbols, odd_local_symbols

DIGITS = 50
CSV_COLUMNS = ("n", "D", "p", "k", "exact", "series", "asym", "lower", "upper", "fD")


def _mp():
    ctx = mpmath.mp.clone()
    ctx.dps = DIGITS
    return ctx


def _iv():
    ctx = iv.clone() if hasattr(iv, "clone") else iv
    ctx.dps = DIGITS
    return ctx


# -- exact combinatorics -------------------------------------------------------

def c_coeffs(K: int) -> list[int]:
    """Coefficients c_0..c_K of prod_{i>=1} (1 + x^i) / (1 - x^i)."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    series = [1] + [0] * K
    for i in range(1, K + 1):
        # multiply by (1 + x^i) / (1 - x^i) = 1 + 2 x^i + 2 x^{2i} + ...
        new = series[:]
        for deg in range(i, K + 1):
            new[deg] += 2 * sum(series[deg - j * i] for j in range(1, deg // i + 1))
        series = new
    return series


def c_coeffs_by_partitions(K: int) -> list[int]:
    """Same coefficients from the definition: sum over partitions of 2^(#distinct parts)."""

    @lru_cache(maxsize=None)
    def weight(k: int, largest: int) -> int:
        # partitions of k with parts <= largest, each distinct part weighted by 2
        if k == 0:
            return 1
        total = 0
        for part in range(1, min(k, largest) + 1):
            for mult in range(1, k // part + 1):
                total += 2 * weight(k - mult * part, part - 1)
        return total

    return [weight(k, k) for k in range(K + 1)]


@lru_cache(maxsize=None)
def partition_count(k: int) -> int:
    """p(k) via Euler's pentagonal number recurrence."""
    if k < 0:
        return 0
    if k == 0:
        return 1
    total = 0
    j = 1
    while True:
        g1 = j * (3 * j - 1) // 2
        if g1 > k:
            break
        sign = 1 if j % 2 else -1
        total += sign * partition_count(k - g1)
        g2 = j * (3 * j + 1) // 2
        if g2 <= k:
            total += sign * partition_count(k - g2)
        j += 1
    return total


def s0(k: int) -> int:
    """S_0(k) from S_0(0) = 0, S_0(1) = 6 and S_0(k) = 3 S_0(k-1) + 2 S_0(k-2)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    a, b = 0, 6
    for _ in range(k):
        a, b = b, 3 * b + 2 * a
    return a


def s0_closed_form(k: int) -> int:
    """(6/sqrt17)(l1^k - l2^k) with l = (3 +- sqrt17)/2, evaluated exactly in Z[sqrt17].

    Writing (3 + sqrt17)^k = A + B sqrt17 gives l1^k - l2^k = 2 B sqrt17 / 2^k,
    so the value is 12 B / 2^k.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    A, B = 1, 0
    for _ in range(k):
        A, B = 3 * A + 17 * B, A + 3 * B
    value = Fraction(12 * B, 2**k)
    if value.denominator != 1:
        raise ArithmeticError("closed form did not produce an integer")
    return int(value)


# -- real-valued formulas ------------------------------------------------------

def _require_positive(k: int) -> None:
    if k < 1:
        raise ValueError("the asymptotic formulas need k >= 1")


def odd_asymptotic(k: int) -> mpmath.mpf:
    _require_positive(k)
    mp = _mp()
    return mp.exp(mp.pi * mp.sqrt(k)) / (8 * k)


def _bounds(ctx, k: int):
    growth = ctx.exp(ctx.pi * ctx.sqrt(ctx.mpf(2 * k) / 3))
    lower = growth / (4 * ctx.sqrt(3) * k)
    lam1 = (3 + ctx.sqrt(17)) / 2
    upper = 3 * lam1**k * growth / (2 * ctx.sqrt(51) * k)
    return lower, upper


def dyadic_bounds(k: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """(lower, upper) estimates for the number of 2-adic symbols at valuation k."""
    _require_positive(k)
    return _bounds(_mp(), k)


def dyadic_bounds_interval(k: int):
    """Interval enclosures of ``dyadic_bounds``; each has endpoints ``.a`` and ``.b``."""
    _require_positive(k)
    return _bounds(_iv(), k)


def s0_interval(k: int):
    """Interval enclosure of the irrational closed form of S_0(k)."""
    ctx = _iv()
    r17 = ctx.sqrt(17)
    return 6 / r17 * (((3 + r17) / 2) ** k - ((3 - r17) / 2) ** k)


def f_of_D(D: int) -> mpmath.mpf:
    """prod over p | D of exp(pi sqrt(v_p(D))) / v_p(D)."""
    if D <= 1:
        raise ValueError("f(D) needs D >= 2")
    mp = _mp()
    out = mp.mpf(1)
    for _, e in factorize(D):
        out *= mp.exp(mp.pi * mp.sqrt(e)) / e
    return out


# -- enumeration ground truth --------------------------------------------------

def exact_local_count(n: int, p: int, k: int) -> int:
    """Number of local symbols at p of rank n with det valuation k and unit det class 1."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    if p == 2:
        return len(dyadic_local_symbols(n, k, 1))
    return len(odd_local_symbols(n, p, k, 1))


# -- reports -------------------------------------------------------------------

def _real(x) -> str | None:
    return None if x is None else mpmath.nstr(x, 15)


@dataclass(frozen=True)
class CountRow:
    n: int
    D: int
    p: int
    k: int
    exact: int
    series: int | None
    series_half: Fraction | None
    asym: str | None
    lower: str | None
    upper: str | None
    fD: str | None

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.series_half is not None:
            out["series_half"] = str(self.series_half)
        return out

    def csv_values(self) -> list:
        d = self.to_dict()
        return ["" if d[c] is None else d[c] for c in CSV_COLUMNS]


def count_row(n: int, p: int, k: int, D: int | None = None) -> CountRow:
    D = p**k if D is None else D
    exact = exact_local_count(n, p, k)
    fD = _real(f_of_D(D)) if D >= 2 else None
    if p == 2:
        lower = upper = None
        if 1 <= k < n:
            lo, hi = dyadic_bounds(k)
            lower, upper = _real(lo), _real(hi)
        return CountRow(n, D, p, k, exact, None, None, None, lower, upper, fD)
    ck = c_coeffs(k)[k]
    asym = _real(odd_asymptotic(k)) if k >= 1 else None
    return CountRow(n, D, p, k, exact, ck, Fraction(ck, 2), asym, None, None, fD)


@dataclass(frozen=True)
class CountReport:
    n: int
    D: int
    rows: tuple[CountRow, ...]
    fD: str | None

    def to_dict(self) -> dict:
        return {"n": self.n, "D": self.D, "fD": self.fD, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def count_report(n: int, D: int) -> CountReport:
    """Per-prime counts for rank n and |det| = D (the prime 2 is always reported)."""
    if n < 1 or D < 1:
        raise ValueError("need n >= 1 and D >= 1")
    fac = factorize(D)
    primes = sorted(set([2] + fac.primes))
    rows = tuple(count_row(n, p, fac.valuation(p), D) for p in primes)
    return CountReport(n, D, rows, _real(f_of_D(D)) if D >= 2 else None)


def rows_to_csv(rows, header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(r.csv_values())
    return buf.getvalue()
