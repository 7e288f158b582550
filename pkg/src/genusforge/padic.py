"""p-adic Jordan decompositions, local genus symbols and normal forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

from . import exactla as la
from .arith import legendre, mod_unit, nonresidue, sqrt_mod_prime_power, valuation


class Constituent(NamedTuple):
    """One Jordan constituent p^scale with the given rank and sign.

    At p = 2 ``type`` is "I" (odd) or "II" (even) and ``oddity`` lives in Z/8;
    at odd primes ``type`` is None and ``oddity`` is 0.
    """

    scale: int
    rank: int
    sign: int
    type: str | None = None
    oddity: int = 0


@dataclass(frozen=True)
class LocalSymbol:
    p: int
    constituents: tuple[Constituent, ...]

    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.constituents)

    @property
    def det_valuation(self) -> int:
        return sum(c.scale * c.rank for c in self.constituents)

    @property
    def is_even(self) -> bool:
        """Only meaningful at p = 2: no odd unimodular part."""
        return not any(c.scale == 0 and c.type == "I" for c in self.constituents)


@dataclass(frozen=True)
class JordanBlock:
    scale: int
    unit_gram: tuple[tuple[int, ...], ...]
    type: str | None = None


class PrecisionError(ArithmeticError):
    pass


def _val(x, p: int) -> int:
    return 10**9 if x == 0 else valuation(x, p)


def jordan_split(G: Sequence[Sequence], p: int) -> tuple[la.Matrix, list[tuple[int, la.Matrix]]]:
    """Exact p-local splitting T G T^T = block-diag(p^k_i U_i).

    T has rational entries with denominators prime to p. Returns T and the
    list of (scale, unit Gram) blocks in order of nondecreasing scale; unit
    Grams are exact p-local rationals. At p = 2 blocks have size 1 or 2.
    """
    n = len(G)
    if la.det(G) == 0:
        raise ValueError("singular Gram matrix")
    A = la.to_fractions(G)
    T = la.to_fractions(la.identity(n))
    blocks: list[tuple[int, la.Matrix]] = []
    s = 0

    def swap(i: int, j: int) -> None:
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        for row in A:
            row[i], row[j] = row[j], row[i]
        T[i], T[j] = T[j], T[i]

    def add_row(dst: int, src: int, f) -> None:
        # basis vector dst += f * basis vector src
        A[dst] = [x + f * y for x, y in zip(A[dst], A[src])]
        for row in A:
            row[dst] += f * row[src]
        T[dst] = [x + f * y for x, y in zip(T[dst], T[src])]

    while s < n:
        best = min(((_val(A[i][j], p), i != j, i, j) for i in range(s, n) for j in range(i, n)))
        m, offdiag, i, j = best
        if offdiag and p != 2:
            add_row(i, j, 1)
            offdiag = False
            j = i
        if not offdiag:
            swap(s, i)
            piv = A[s][s]
            for r in range(s + 1, n):
                if A[r][s]:
                    add_row(r, s, -A[r][s] / piv)
            blocks.append((m, [[piv / Fraction(p) ** m]]))
            s += 1
            continue
        swap(s, i)
        swap(s + 1, j if j != s else i)
        a, b, c = A[s][s], A[s][s + 1], A[s + 1][s + 1]
        d = a * c - b * b
        for r in range(s + 2, n):
            x, y = A[r][s], A[r][s + 1]
            if x or y:
                # coefficients of the projection onto the 2-dimensional block
                f1 = (x * c - y * b) / d
                f2 = (y * a - x * b) / d
                add_row(r, s, -f1)
                add_row(r, s + 1, -f2)
        scale = Fraction(p) ** m
        blocks.append((m, [[a / scale, b / scale], [b / scale, c / scale]]))
        s += 2
    return T, blocks


def _unit_int(x: Fraction, p: int, modulus: int) -> int:
    return mod_unit(x, p, modulus)


def jordan_decomposition(G: Sequence[Sequence], p: int) -> list[JordanBlock]:
    """Jordan blocks with unit Grams reduced modulo p^(v_p(det) + 3)."""
    prec = p ** (valuation(la.det(G), p) + 3)
    _, blocks = jordan_split(G, p)
    out = []
    for k, U in blocks:
        M = tuple(tuple(_unit_int(x, p, prec) if x else 0 for x in row) for row in U)
        typ = None
        if p == 2:
            typ = "II" if len(U) == 2 else "I"
        out.append(JordanBlock(k, M, typ))
    return out


def _sign_of_unit(u: int, p: int) -> int:
    if p == 2:
        return 1 if u % 8 in (1, 7) else -1
    return legendre(u, p)


def _symbol_from_blocks(blocks: list[tuple[int, la.Matrix]], p: int) -> LocalSymbol:
    grouped: dict[int, list[la.Matrix]] = {}
    for k, U in blocks:
        grouped.setdefault(k, []).append(U)
    cons = []
    for k in sorted(grouped):
        mats = grouped[k]
        rank = sum(len(U) for U in mats)
        det = Fraction(1)
        for U in mats:
            det *= la.det(U)
        sign = _sign_of_unit(mod_unit(det, p, 8 if p == 2 else p), p)
        if p == 2:
            ones = [U[0][0] for U in mats if len(U) == 1]
            typ = "I" if ones else "II"
            odd = sum(mod_unit(u, 2, 8) for u in ones) % 8
            cons.append(Constituent(k, rank, sign, typ, odd))
        else:
            cons.append(Constituent(k, rank, sign))
    return LocalSymbol(p, tuple(cons))


def local_symbol(G: Sequence[Sequence], p: int) -> LocalSymbol:
    """Raw local symbol read off a Jordan splitting (not canonicalized at 2)."""
    _, blocks = jordan_split(G, p)
    return _symbol_from_blocks(blocks, p)


def canonical_local_symbol(G: Sequence[Sequence], p: int) -> LocalSymbol:
    s = local_symbol(G, p)
    return canonicalize_2adic(s) if p == 2 else s


# -- 2-adic canonical form -------------------------------------------------

def _check_2adic(s: LocalSymbol) -> None:
    if s.p != 2:
        raise ValueError("canonicalize_2adic needs a symbol at p = 2")
    last = -1
    for c in s.constituents:
        if c.scale <= last or c.rank < 1 or c.sign not in (1, -1) or c.type not in ("I", "II"):
            raise ValueError(f"malformed 2-adic constituent {c}")
        if c.type == "II" and (c.oddity % 8 or c.rank % 2):
            raise ValueError(f"type II constituent {c} needs even rank and oddity 0")
        last = c.scale


def compartments(cons: Sequence[Constituent]) -> list[list[int]]:
    """Maximal runs of type I constituents with consecutive scales (indices)."""
    out: list[list[int]] = []
    for i, c in enumerate(cons):
        if c.type != "I":
            continue
        if out and out[-1][-1] == i - 1 and cons[i - 1].scale == c.scale - 1:
            out[-1].append(i)
        else:
            out.append([i])
    return out


def trains(cons: Sequence[Constituent]) -> list[list[int]]:
    """Groups of constituents between which signs can walk (indices)."""
    out: list[list[int]] = []
    for i, c in enumerate(cons):
        if out:
            prev = cons[i - 1]
            gap = c.scale - prev.scale
            linked = (gap == 1 and "I" in (prev.type, c.type)) or (gap == 2 and prev.type == c.type == "I")
            if linked:
                out[-1].append(i)
                continue
        out.append([i])
    return out


def canonicalize_2adic(s: LocalSymbol) -> LocalSymbol:
    """Canonical spelling of a 2-adic symbol.

    Sign walking flips the signs of two neighbours in a train and shifts the
    oddity of the compartments involved by 4. Among all spellings reachable
    this way whose compartments are realizable, the one with minus signs
    pushed furthest to the front is chosen; each compartment's oddity is then
    carried by its first constituent.
    """
    _check_2adic(s)
    cons = list(s.constituents)
    comps = compartments(cons)
    comp_of = {i: ci for ci, comp in enumerate(comps) for i in comp}
    base_total = [sum(cons[i].oddity for i in comp) % 8 for comp in comps]
    links = [(t[a], t[a + 1]) for t in trains(cons) for a in range(len(t) - 1)]
    best = None
    for flips in itertools.product((False, True), repeat=len(links)):
        signs = [c.sign for c in cons]
        total = list(base_total)
        for (i, j), flip in zip(links, flips):
            if not flip:
                continue
            signs[i], signs[j] = -signs[i], -signs[j]
            for ci in {comp_of[x] for x in (i, j) if x in comp_of}:
                total[ci] = (total[ci] + 4) % 8
        key = tuple(sg == -1 for sg in reversed(signs))
        if best is not None and key >= best[0]:
            continue
        if all(_compartment_units(tuple((cons[i].rank, signs[i]) for i in comp), total[ci]) is not None
               for ci, comp in enumerate(comps)):
            best = (key, signs, total)
    if best is None:
        raise ValueError("2-adic symbol is not realizable")
    _, signs, total = best
    out = []
    for i, c in enumerate(cons):
        odd = total[comp_of[i]] if i in comp_of and comps[comp_of[i]][0] == i else 0
        out.append(Constituent(c.scale, c.rank, signs[i], c.type, odd))
    return LocalSymbol(2, tuple(out))


# -- canonical Gram representatives ------------------------------------------

class Block(NamedTuple):
    scale: int
    kind: str  # "1" (diagonal unit), "U" or "V"
    unit: int = 1

    def matrix(self, p: int) -> la.Matrix:
        q = p**self.scale
        if self.kind == "U":
            return [[0, q], [q, 0]]
        if self.kind == "V":
            return [[2 * q, q], [q, 2 * q]]
        return [[q * self.unit]]


def _unit_det_sign(units: Sequence[int]) -> int:
    d = 1
    for u in units:
        d = d * u % 8
    return 1 if d in (1, 7) else -1


@lru_cache(maxsize=None)
def _compartment_units(parts: tuple[tuple[int, int], ...], total: int) -> tuple[tuple[int, ...], ...] | None:
    """Lexicographically first unit tuples (one per constituent, each sorted)
    with the requested signs whose entries sum to ``total`` mod 8."""
    choices = []
    for rank, sign in parts:
        opts = [t for t in itertools.combinations_with_replacement((1, 3, 5, 7), rank) if _unit_det_sign(t) == sign]
        if not opts:
            return None
        choices.append(opts)
    for combo in itertools.product(*choices):
        if sum(sum(t) for t in combo) % 8 == total % 8:
            return combo
    return None


def representative_blocks(s: LocalSymbol) -> list[Block]:
    """Block list of the canonical Gram matrix of a local symbol."""
    p = s.p
    blocks: list[Block] = []
    if p != 2:
        for c in s.constituents:
            u = 1 if c.sign == 1 else nonresidue(p)
            blocks += [Block(c.scale, "1", 1)] * (c.rank - 1) + [Block(c.scale, "1", u)]
        return blocks
    cons = list(s.constituents)
    units: dict[int, tuple[int, ...]] = {}
    for comp in compartments(cons):
        parts = tuple((cons[i].rank, cons[i].sign) for i in comp)
        total = sum(cons[i].oddity for i in comp)
        found = _compartment_units(parts, total % 8)
        if found is None:
            raise ValueError(f"compartment {[cons[i] for i in comp]} is not realizable")
        units.update(zip(comp, found))
    for i, c in enumerate(cons):
        if c.type == "II":
            h = c.rank // 2
            if c.sign == 1:
                blocks += [Block(c.scale, "U")] * h
            else:
                blocks += [Block(c.scale, "U")] * (h - 1) + [Block(c.scale, "V")]
        else:
            blocks += [Block(c.scale, "1", u) for u in units[i]]
    return blocks


def block_diagonal(mats: Sequence[la.Matrix]) -> la.Matrix:
    n = sum(len(M) for M in mats)
    out = la.zeros(n, n)
    o = 0
    for M in mats:
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                out[o + i][o + j] = x
        o += len(M)
    return out


def gram_zp_representative(s: LocalSymbol) -> la.Matrix:
    return block_diagonal([b.matrix(s.p) for b in representative_blocks(s)])


# -- normal form ---------------------------------------------------------------

def _bil(G: Sequence[Sequence[int]], x: Sequence[int], y: Sequence[int]) -> int:
    return sum(xi * sum(g * yj for g, yj in zip(row, y)) for xi, row in zip(x, G) if xi)


def _newton_root(f, df, t: int, mod: int) -> int:
    """Lift a root of f modulo an odd derivative (2-adic) to the modulus."""
    for _ in range(mod.bit_length() + 2):
        v = f(t) % mod
        if v == 0:
            return t % mod
        t = (t - v * pow(df(t), -1, mod)) % mod
    raise PrecisionError("Newton iteration did not converge")


def _candidate_coefficients(m: int, radius: int):
    seen = set()
    for R in range(1, radius + 1):
        for c in itertools.product(range(-R, R + 1), repeat=m):
            if max(map(abs, c)) != R and R > 1:
                continue
            if not any(c) or c in seen:
                continue
            first = next(x for x in c if x)
            if first < 0:
                continue
            seen.add(c)
            yield c


class _Search:
    """Greedy splitting of a p-adic lattice into the target blocks."""

    def __init__(self, G: Sequence[Sequence[int]], p: int, W: int) -> None:
        self.G = [list(map(int, row)) for row in G]
        self.p = p
        self.W = W
        self.mod = p**W

    def gram(self, rows: Sequence[Sequence[int]]) -> la.Matrix:
        return [[_bil(self.G, x, y) for y in rows] for x in rows]

    def combine(self, coeffs: Sequence[int], basis: Sequence[Sequence[int]]) -> list[int]:
        n = len(self.G)
        return [sum(c * b[k] for c, b in zip(coeffs, basis)) % self.mod for k in range(n)]

    def complement(self, found: list[list[int]], basis: list[list[int]], coeffs: list[Sequence[int]], k: int):
        """Basis of the orthogonal complement of the found vectors inside span(basis)."""
        p, mod = self.p, self.mod
        s = len(found)
        S = self.gram(found)
        unit = [[x // p**k for x in row] for row in S]
        inv = la.inverse_mod(unit, mod)
        # choose pivot columns where the coefficient minor is a unit
        m = len(basis)
        pivots = None
        for cols in itertools.combinations(range(m), s):
            minor = [[c[j] for j in cols] for c in coeffs]
            if la.det(minor) % p:
                pivots = cols
                break
        if pivots is None:
            return None
        rest = []
        for j in range(m):
            if j in pivots:
                continue
            x = basis[j]
            b = [_bil(self.G, x, f) // p**k for f in found]
            coef = [sum(b[a] * inv[a][c] for a in range(s)) % mod for c in range(s)]
            rest.append([(xi - sum(coef[c] * found[c][t] for c in range(s))) % mod for t, xi in enumerate(x)])
        return rest


@lru_cache(maxsize=4096)
def _canon_of_blocks(blocks: tuple[Block, ...], p: int) -> LocalSymbol:
    return canonical_local_symbol(block_diagonal([b.matrix(p) for b in blocks]), p)


def normal_form(G: Sequence[Sequence], p: int, precision: int | None = None) -> tuple[la.Matrix, la.Matrix]:
    """Return (T, N) with T G T^T congruent to N modulo p^precision.

    N is the canonical Gram matrix of the local genus of G at p. T is an
    integer matrix whose determinant is a p-adic unit.
    """
    G = [[int(x) for x in row] for row in G]
    n = len(G)
    nu = valuation(la.det(G), p)
    prec = precision if precision is not None else nu + 3
    W = prec + 2 * nu + 8
    mod = p**W
    symbol = canonical_local_symbol(G, p)
    targets = representative_blocks(symbol)
    N = block_diagonal([b.matrix(p) for b in targets])
    search = _Search(G, p, W)

    # start from the Jordan basis so that small combinations suffice
    Tj, _ = jordan_split(G, p)
    basis = [[mod_unit(x, p, mod) if x else 0 for x in row] for row in Tj]

    def solve(idx: int, basis: list[list[int]]) -> list[list[int]] | None:
        if idx == len(targets):
            return []
        tgt = targets[idx]
        k = tgt.scale
        rest_symbol = _canon_of_blocks(tuple(targets[idx + 1:]), p) if idx + 1 < len(targets) else None
        tried = 0
        for found, coeffs in _block_candidates(search, basis, tgt):
            comp = search.complement(found, basis, coeffs, k)
            if comp is None:
                continue
            if comp:
                if rest_symbol is None:
                    continue
                cg = [[x % mod for x in row] for row in search.gram(comp)]
                if la.det(cg) == 0 or canonical_local_symbol(cg, p) != rest_symbol:
                    continue
            tail = solve(idx + 1, comp)
            if tail is not None:
                return found + tail
            tried += 1
            if tried > 3:
                return None
        return None

    rows = solve(0, basis)
    if rows is None:
        raise PrecisionError(f"normal form search failed at p={p}")
    check = p**prec
    got = la.congruence(rows, G)
    if any((got[i][j] - N[i][j]) % check for i in range(n) for j in range(n)):
        raise PrecisionError(f"normal form verification failed at p={p}")
    return rows, N


def _block_candidates(search: _Search, basis: list[list[int]], tgt: Block):
    """Yield (vectors, coefficients over basis) realizing the target block."""
    p, mod, W = search.p, search.mod, search.W
    k = tgt.scale
    m = len(basis)
    pk = p**k

    def shell(R: int):
        for c in _candidate_coefficients(m, R):
            if R == 1 or max(map(abs, c)) == R:
                v = search.combine(c, basis)
                yield c, v, _bil(search.G, v, v)

    def binary_sweep():
        # a nondegenerate binary plane over F_p represents both square classes,
        # so e_i + t e_j reaches any class once t runs through all residues
        for i, j in itertools.combinations(range(m), 2):
            for t in range(4, p):
                c = [0] * m
                c[i], c[j] = 1, t
                v = search.combine(c, basis)
                yield tuple(c), v, _bil(search.G, v, v)

    if tgt.kind == "1":
        sources = [shell(1), shell(2), shell(3)]
        if p > 2:
            sources.append(binary_sweep())
        for source in sources:
            for c, v, nv in source:
                if nv == 0 or _val(nv, p) != k:
                    continue
                ratio = tgt.unit * pow(nv // pk, -1, mod) % mod
                if p == 2:
                    if ratio % 8 != 1:
                        continue
                elif legendre(ratio, p) != 1:
                    continue
                r = sqrt_mod_prime_power(ratio, p, W)
                yield [[r * x % mod for x in v]], [[r * x for x in c]]
        return
    partners = [(c, v, nv) for c, v, nv in shell(1) if nv % (2 * pk) == 0]
    for R in (1, 2):
        for c1, v1, n1 in shell(R):
            if n1 % (2 * pk):
                continue
            for c2, y, n2 in partners:
                b = _bil(search.G, v1, y)
                if b == 0 or _val(b, p) != k:
                    continue
                a2, b2, c2n = n1 // (2 * pk), b // pk, n2 // (2 * pk)
                det_class = (4 * a2 * c2n - b2 * b2) % 8
                if (tgt.kind == "U") != (det_class == 7):
                    continue
                pair = _binary_normalize(search, v1, y, a2, b2, c2n, k, tgt.kind)
                if pair is None:
                    continue
                e, f, ce, cf = pair
                coeffs = [[ce[0] * x + ce[1] * z for x, z in zip(c1, c2)],
                          [cf[0] * x + cf[1] * z for x, z in zip(c1, c2)]]
                yield [e, f], coeffs


def _binary_normalize(search: _Search, v1, y, a: int, b: int, c: int, k: int, kind: str):
    """Turn an even 2^k-modular binary pair into exact 2^k·U or 2^k·V.

    The pair has Gram 2^k [[2a, b], [b, 2c]] with b odd. Returns the new
    vectors and their coefficients over (v1, y).
    """
    mod = search.mod
    pk = 2**k
    G = search.G

    def lin(s, t):
        return [(s * x + t * z) % mod for x, z in zip(v1, y)]

    if kind == "U":
        if a % 2 == 0:
            t = _newton_root(lambda t: c * t * t + b * t + a, lambda t: 2 * c * t + b, 0, mod)
            ce, other = (1, t), (0, 1)
        elif c % 2 == 0:
            t = _newton_root(lambda t: a * t * t + b * t + c, lambda t: 2 * a * t + b, 0, mod)
            ce, other = (t, 1), (1, 0)
        else:
            return None
        e = lin(*ce)
        f0 = lin(*other)
        beta = _bil(G, e, f0) // pk
        inv = pow(beta, -1, mod)
        cf = (other[0] * inv % mod, other[1] * inv % mod)
        f0 = lin(*cf)
        q = _bil(G, f0, f0) // (2 * pk)
        cf = ((cf[0] - q * ce[0]) % mod, (cf[1] - q * ce[1]) % mod)
        return e, lin(*cf), ce, cf
    # V: first a vector of norm 2·2^k, then a partner
    if a % 2 == 1:
        t = _newton_root(lambda t: c * t * t + b * t + a - 1, lambda t: 2 * c * t + b, 0, mod)
        ce = (1, t)
        other = (0, 1)
    else:
        t = _newton_root(lambda t: a * t * t + b * t + c - 1, lambda t: 2 * a * t + b, 0, mod)
        ce = (t, 1)
        other = (1, 0)
    e = lin(*ce)
    w0 = lin(*other)
    beta = _bil(G, e, w0) // pk
    inv = pow(beta, -1, mod)
    cw = (other[0] * inv % mod, other[1] * inv % mod)
    w0 = lin(*cw)
    q0 = _bil(G, w0, w0) // (2 * pk)
    # f = (1 - 2s) w0 + s e keeps B(e, f) = 2^k; choose s so that Q(f) = 2^k
    s = _newton_root(lambda s: (4 * q0 - 1) * (s * s - s) + q0 - 1, lambda s: (4 * q0 - 1) * (2 * s - 1), 0, mod)
    cf = (((1 - 2 * s) * cw[0] + s * ce[0]) % mod, ((1 - 2 * s) * cw[1] + s * ce[1]) % mod)
    return e, lin(*cf), ce, cf
