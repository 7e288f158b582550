"""Global genus symbols: validity, text format, enumeration and extraction."""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

from . import exactla as la
from .arith import factorize, is_prime, legendre
from .lattice import Lattice, gram
from .padic import (
    Constituent,
    LocalSymbol,
    _compartment_units,
    canonical_local_symbol,
    compartments,
    canonicalize_2adic,
)


@dataclass(frozen=True)
class GenusSymbol:
    signature: tuple[int, int]
    locals: tuple[LocalSymbol, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "signature", tuple(self.signature))
        object.__setattr__(self, "locals", tuple(sorted(self.locals, key=lambda s: s.p)))

    @property
    def rank(self) -> int:
        return sum(self.signature)

    @property
    def primes(self) -> list[int]:
        return [s.p for s in self.locals]

    def local(self, p: int) -> LocalSymbol:
        for s in self.locals:
            if s.p == p:
                return s
        return LocalSymbol(p, (Constituent(0, self.rank, 1, "I" if p == 2 else None, 0),))

    @property
    def abs_det(self) -> int:
        return math.prod(s.p ** s.det_valuation for s in self.locals)

    @property
    def det(self) -> int:
        return (-1) ** self.signature[1] * self.abs_det

    @property
    def is_even(self) -> bool:
        return self.local(2).is_even

    def __str__(self) -> str:
        return format_symbol(self)

    def to_dict(self) -> dict:
        return {
            "signature": list(self.signature),
            "locals": [
                {"p": s.p, "constituents": [c._asdict() for c in s.constituents]} for s in self.locals
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenusSymbol":
        locs = []
        for entry in data["locals"]:
            cons = tuple(Constituent(**c) for c in entry["constituents"])
            locs.append(LocalSymbol(int(entry["p"]), cons))
        return cls(tuple(data["signature"]), tuple(locs))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# -- local invariants ----------------------------------------------------------

def oddity(s: LocalSymbol) -> int:
    """2-adic oddity including the 4 contributed by each odd-scale minus sign."""
    t = sum(c.oddity for c in s.constituents)
    t += 4 * sum(1 for c in s.constituents if c.scale % 2 and c.sign == -1)
    return t % 8


def excess(s: LocalSymbol) -> int:
    p = s.p
    e = sum(c.rank * (p**c.scale - 1) for c in s.constituents)
    e += 4 * sum(1 for c in s.constituents if c.scale % 2 and c.sign == -1)
    return e % 8


def _type_ii_det(rank: int, sign: int) -> int:
    h = rank // 2
    return (-1) ** h % 8 if sign == 1 else ((-1) ** (h - 1) * 3) % 8


@lru_cache(maxsize=None)
def _type_i_data(rank: int) -> dict[tuple[int, int], int]:
    """Realizable (sign, oddity) pairs of an odd unimodular Z_2 form of this
    rank, mapped to the unit determinant mod 8."""
    out: dict[tuple[int, int], int] = {}
    for units in itertools.combinations_with_replacement((1, 3, 5, 7), rank):
        d = math.prod(units) % 8
        key = (1 if d in (1, 7) else -1, sum(units) % 8)
        out.setdefault(key, d)
    return out


def unit_det_mod8(s: LocalSymbol) -> int:
    """det / 2^v mod 8 of any form with this 2-adic symbol."""
    d = 1
    cons = list(s.constituents)
    comps = compartments(cons)
    seen = set()
    for comp in comps:
        units = _compartment_units(tuple((cons[i].rank, cons[i].sign) for i in comp),
                                   sum(cons[i].oddity for i in comp) % 8)
        if units is None:
            raise ValueError("unrealizable 2-adic compartment")
        for u in itertools.chain.from_iterable(units):
            d = d * u % 8
        seen.update(comp)
    for i, c in enumerate(cons):
        if i not in seen:
            d = d * _type_ii_det(c.rank, c.sign) % 8
    return d


class Validity(NamedTuple):
    valid: bool
    reason: str

    def __bool__(self) -> bool:
        return self.valid


def is_valid(g: GenusSymbol) -> Validity:
    n_plus, n_minus = g.signature
    n = n_plus + n_minus
    if n_plus < 0 or n_minus < 0 or n == 0:
        return Validity(False, "bad-signature")
    primes = g.primes
    if 2 not in primes:
        return Validity(False, "missing-2-adic-symbol")
    if len(set(primes)) != len(primes):
        return Validity(False, "duplicate-prime")
    for s in g.locals:
        if not is_prime(s.p):
            return Validity(False, f"not-a-prime:{s.p}")
        if s.rank != n:
            return Validity(False, f"rank-mismatch:{s.p}")
        last = -1
        for c in s.constituents:
            if c.scale <= last or c.rank < 1 or c.sign not in (1, -1):
                return Validity(False, f"malformed-constituent:{s.p}")
            last = c.scale
            if s.p == 2:
                if c.type not in ("I", "II"):
                    return Validity(False, "bad-type")
                if c.type == "II" and c.oddity % 8:
                    return Validity(False, "type-II-with-oddity")
                if c.type == "II" and c.rank % 2:
                    return Validity(False, "type-II-odd-rank")
            elif c.type is not None or c.oddity:
                return Validity(False, f"2-adic-data-at-odd-prime:{s.p}")
        if s.p != 2 and s.det_valuation == 0:
            return Validity(False, f"unimodular-odd-prime-listed:{s.p}")
    det = g.det
    for s in g.locals:
        if s.p == 2:
            continue
        unit = det // s.p**s.det_valuation
        if math.prod(c.sign for c in s.constituents) != legendre(unit, s.p):
            return Validity(False, f"determinant-sign:{s.p}")
    two = g.local(2)
    try:
        canon = canonicalize_2adic(two)
    except ValueError:
        return Validity(False, "2-adic-unrealizable")
    if canon != two:
        return Validity(False, "2-adic-not-canonical")
    if unit_det_mod8(two) != (det // 2**two.det_valuation) % 8:
        return Validity(False, "determinant-unit-at-2")
    lhs = (n_plus - n_minus) % 8
    rhs = (oddity(two) - sum(excess(s) for s in g.locals if s.p != 2)) % 8
    if lhs != rhs:
        return Validity(False, "oddity-formula")
    return Validity(True, "ok")


# -- text format -------------------------------------------------------------

def _fmt_constituent(c: Constituent, p: int) -> str:
    sg = "+" if c.sign == 1 else "-"
    if p == 2:
        return f"{c.scale}^{sg}{c.rank}_{c.oddity % 8}:{c.type}"
    return f"{c.scale}^{sg}{c.rank}"


def format_symbol(g: GenusSymbol) -> str:
    parts = [f"sig({g.signature[0]},{g.signature[1]})"]
    for s in g.locals:
        body = ", ".join(_fmt_constituent(c, s.p) for c in s.constituents)
        parts.append(f"{s.p}:[{body}]")
    return "; ".join(parts)


class SymbolParseError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def fail(self, what: str):
        raise SymbolParseError(f"expected {what}", self.pos)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def literal(self, s: str) -> None:
        self.skip()
        if not self.text.startswith(s, self.pos):
            self.fail(repr(s))
        self.pos += len(s)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def integer(self) -> int:
        self.skip()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.fail("an integer")
        self.pos = m.end()
        return int(m.group())

    def sign(self) -> int:
        self.skip()
        ch = self.text[self.pos:self.pos + 1]
        if ch not in ("+", "-"):
            self.fail("'+' or '-'")
        self.pos += 1
        return 1 if ch == "+" else -1

    def constituent(self, p: int) -> Constituent:
        k = self.integer()
        self.literal("^")
        eps = self.sign()
        r = self.integer()
        if p == 2:
            self.literal("_")
            t = self.integer()
            self.literal(":")
            if self.peek("II"):
                self.pos += 2
                typ = "II"
            elif self.peek("I"):
                self.pos += 1
                typ = "I"
            else:
                self.fail("'I' or 'II'")
            return Constituent(k, r, eps, typ, t % 8)
        return Constituent(k, r, eps)

    def symbol(self) -> GenusSymbol:
        self.literal("sig")
        self.literal("(")
        a = self.integer()
        self.literal(",")
        b = self.integer()
        self.literal(")")
        locs = []
        while self.peek(";"):
            self.literal(";")
            self.skip()
            start = self.pos
            p = self.integer()
            if not is_prime(p) or any(s.p == p for s in locs):
                self.pos = start
                self.fail("a new prime")
            self.literal(":")
            self.literal("[")
            cons = [self.constituent(p)]
            while self.peek(","):
                self.literal(",")
                cons.append(self.constituent(p))
            self.literal("]")
            locs.append(LocalSymbol(p, tuple(cons)))
        self.skip()
        if self.pos != len(self.text):
            self.fail("end of input")
        if not any(s.p == 2 for s in locs):
            self.fail("a 2-adic local symbol")
        return GenusSymbol((a, b), tuple(locs))


def parse_symbol(text: str, canonicalize: bool = True) -> GenusSymbol:
    """Parse the text format; the 2-adic part is canonicalized by default."""
    g = _Parser(text).symbol()
    if canonicalize and 2 in g.primes:
        try:
            two = canonicalize_2adic(g.local(2))
        except ValueError as exc:
            raise SymbolParseError(str(exc), len(text)) from exc
        g = GenusSymbol(g.signature, tuple(s if s.p != 2 else two for s in g.locals))
    return g


# -- enumeration ---------------------------------------------------------------

def _scale_rank_assignments(n: int, nu: int) -> Iterator[list[tuple[int, int]]]:
    """(scale, rank) lists with sum(scale*rank) = nu, scales >= 1, total rank <= n."""

    def rec(remaining: int, min_scale: int, ranks_left: int):
        if remaining == 0:
            yield []
            return
        for k in range(min_scale, remaining + 1):
            for r in range(1, min(ranks_left, remaining // k) + 1):
                for rest in rec(remaining - k * r, k + 1, ranks_left - r):
                    yield [(k, r)] + rest

    for parts in rec(nu, 1, n):
        r0 = n - sum(r for _, r in parts)
        yield ([(0, r0)] if r0 else []) + parts


@lru_cache(maxsize=None)
def odd_local_symbols(n: int, p: int, nu: int, unit_class: int) -> tuple[LocalSymbol, ...]:
    """All local symbols at odd p of rank n, det valuation nu and det unit
    Legendre class ``unit_class``."""
    out = []
    for parts in _scale_rank_assignments(n, nu):
        for signs in itertools.product((1, -1), repeat=len(parts)):
            if math.prod(signs) != unit_class:
                continue
            out.append(LocalSymbol(p, tuple(Constituent(k, r, e) for (k, r), e in zip(parts, signs))))
    return tuple(out)


def _constituent_options(k: int, r: int) -> list[Constituent]:
    opts = [Constituent(k, r, e, "I", t) for (e, t) in sorted(_type_i_data(r))]
    if r % 2 == 0:
        opts += [Constituent(k, r, 1, "II", 0), Constituent(k, r, -1, "II", 0)]
    return opts


def _constituent_det(c: Constituent) -> int:
    if c.type == "II":
        return _type_ii_det(c.rank, c.sign)
    return _type_i_data(c.rank)[(c.sign, c.oddity)]


@lru_cache(maxsize=None)
def dyadic_local_symbols(n: int, nu: int, unit_mod8: int | None = None) -> tuple[LocalSymbol, ...]:
    """Canonical 2-adic symbols of rank n and det valuation nu, optionally
    restricted to a given unit part of the determinant mod 8."""
    found = set()
    for parts in _scale_rank_assignments(n, nu):
        for combo in itertools.product(*(_constituent_options(k, r) for k, r in parts)):
            if unit_mod8 is not None and math.prod(_constituent_det(c) for c in combo) % 8 != unit_mod8:
                continue
            found.add(canonicalize_2adic(LocalSymbol(2, tuple(combo))))
    return tuple(sorted(found, key=_local_key))


def _local_key(s: LocalSymbol):
    return tuple((c.scale, c.rank, -c.sign, c.type or "", c.oddity) for c in s.constituents)


def symbol_sort_key(g: GenusSymbol):
    return (g.abs_det, -g.signature[0], tuple(_local_key(s) for s in g.locals))


def enumerate_genera(
    n: int,
    D: int,
    signature: tuple[int, int] | None = None,
    parity: str = "any",
) -> list[GenusSymbol]:
    """Every genus symbol of rank n and |det| = D, one canonical symbol each."""
    if n < 1 or D < 1:
        raise ValueError("enumerate needs n >= 1 and D >= 1")
    if parity not in ("any", "even", "odd"):
        raise ValueError(f"unknown parity filter {parity!r}")
    fac = factorize(D)
    sigs = [signature] if signature is not None else [(n - m, m) for m in range(n + 1)]
    out = []
    for n_plus, n_minus in sigs:
        if n_plus + n_minus != n or min(n_plus, n_minus) < 0:
            continue
        det = (-1) ** n_minus * D
        nu2 = fac.valuation(2)
        dyadic = dyadic_local_symbols(n, nu2, (det // 2**nu2) % 8)
        if parity != "any":
            dyadic = tuple(s for s in dyadic if s.is_even == (parity == "even"))
        odd_lists = []
        for p, e in fac:
            if p == 2:
                continue
            odd_lists.append(odd_local_symbols(n, p, e, legendre(det // p**e, p)))
        target = (n_plus - n_minus) % 8
        for two in dyadic:
            odd2 = oddity(two)
            for combo in itertools.product(*odd_lists):
                if (odd2 - sum(excess(s) for s in combo)) % 8 != target:
                    continue
                out.append(GenusSymbol((n_plus, n_minus), (two,) + combo))
    out.sort(key=symbol_sort_key)
    return out


def enumerate_upto(
    n: int,
    D_max: int,
    signature: tuple[int, int] | None = None,
    parity: str = "any",
) -> Iterator[tuple[int, GenusSymbol]]:
    if D_max < 1:
        raise ValueError("D_max must be at least 1")
    for d in range(1, D_max + 1):
        for g in enumerate_genera(n, d, signature, parity):
            yield d, g


# -- extraction ----------------------------------------------------------------

def signature_of(G: Sequence[Sequence]) -> tuple[int, int]:
    """Exact inertia (n_+, n_-) of a nonsingular symmetric matrix."""
    A = la.to_fractions(G)
    n = len(A)
    pos = neg = 0
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if A[i][i] != 0), None)
        if piv is None:
            i, j = next((i, j) for i in idx for j in idx if A[i][j] != 0)
            # e_i += e_j gives a nonzero diagonal entry 2 A_ij
            A[i] = [x + y for x, y in zip(A[i], A[j])]
            for row in A:
                row[i] += row[j]
            piv = i
        a = A[piv][piv]
        if a > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(piv)
        for r in idx:
            if A[r][piv]:
                f = A[r][piv] / a
                A[r] = [x - f * y for x, y in zip(A[r], A[piv])]
                for row in A:
                    row[r] -= f * row[piv]
    return pos, neg


def symbol_of_gram(G: Sequence[Sequence]) -> GenusSymbol:
    G = la.simplify(G)
    if not la.is_integral(G):
        raise ValueError("genus symbols need an integral Gram matrix")
    d = la.det(G)
    if d == 0:
        raise ValueError("singular Gram matrix")
    primes = sorted(set([2] + factorize(abs(d)).primes))
    return GenusSymbol(signature_of(G), tuple(canonical_local_symbol(G, p) for p in primes))


def symbol_of(L: Lattice) -> GenusSymbol:
    return symbol_of_gram(gram(L))

