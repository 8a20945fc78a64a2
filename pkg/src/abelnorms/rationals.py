"""Exact multiplicative arithmetic of nonzero rationals.

FactoredRational keeps a sign and a prime -> exponent map, so products,
powers and valuations are exact at any size. The module also carries the
quadratic toolbox used throughout: Kronecker symbols, Hilbert symbols over
Q_p and R, square roots in Z/p^k, and prime sieves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod

import numpy as np

__all__ = [
    "FactoredRational",
    "NormSubgroup",
    "PlaceSet",
    "INF",
    "factorint",
    "divisors",
    "primes_up_to",
    "smallest_prime_factor_sieve",
    "kronecker",
    "hilbert_symbol",
    "sqrt_mod_prime_power",
    "squarefree_part",
    "quadratic_discriminant",
    "parse_rational",
    "parse_rational_list",
]

INF = math.inf  # the real place


# ---------------------------------------------------------------------------
# integer plumbing

def factorint(n: int) -> dict[int, int]:
    """Trial-division factorization; inputs here are desk scale."""
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    n = abs(n)
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 7
    inc = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += inc[i]
        i = (i + 1) % 8
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorint(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p:: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def smallest_prime_factor_sieve(n: int) -> np.ndarray:
    """spf[k] = smallest prime factor of k (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int32)
    i = np.arange(0, n + 1, 2, dtype=np.int32)
    spf[i[1:]] = 2
    for p in range(3, int(n**0.5) + 1, 2):
        if spf[p] == 0:
            sl = spf[p * p:: p]
            sl[sl == 0] = p
            spf[p * p:: p] = sl
    odd = np.arange(3, n + 1, 2)
    rem = odd[spf[odd] == 0]
    spf[rem] = rem
    return spf


def squarefree_part(n: int) -> int:
    """Squarefree kernel of a nonzero integer (keeps the sign)."""
    s = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(n).items():
        if e % 2:
            out *= p
    return s * out


def quadratic_discriminant(m: int) -> int:
    """Fundamental discriminant of Q(sqrt(m)); m any non-square rational kernel."""
    m = squarefree_part(m)
    if m == 1:
        return 1
    return m if m % 4 == 1 else 4 * m


# ---------------------------------------------------------------------------
# symbols

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), fully general."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    out = 1
    if n < 0:
        n = -n
        if a < 0:
            out = -out
    # factor out 2s of n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 and a % 8 in (3, 5):
            out = -out
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                out = -out
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            out = -out
        a %= n
    return out if n == 1 else 0


def _epsilon(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def hilbert_symbol(a: Fraction | int, b: Fraction | int, place) -> int:
    """Hilbert symbol (a, b)_v over Q_v, v a prime or INF; returns +-1."""
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero entries")
    if place == INF:
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    alpha, u = _split_valuation(a, p)
    beta, v = _split_valuation(b, p)
    # u, v are p-adic units given as fractions; reduce them mod p (or 8)
    if p == 2:
        uu = _unit_mod(u, 8)
        vv = _unit_mod(v, 8)
        e = _epsilon(uu) * _epsilon(vv) + alpha * _omega(vv) + beta * _omega(uu)
        return -1 if e % 2 else 1
    uu = _unit_mod(u, p)
    vv = _unit_mod(v, p)
    sign = 1
    if (alpha * beta) % 2 and (p - 1) // 2 % 2:
        sign = -sign
    if beta % 2 and kronecker(uu, p) == -1:
        sign = -sign
    if alpha % 2 and kronecker(vv, p) == -1:
        sign = -sign
    return sign


def _split_valuation(x: Fraction, p: int) -> tuple[int, Fraction]:
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, Fraction(num, den)


def _unit_mod(x: Fraction, m: int) -> int:
    return x.numerator * pow(x.denominator, -1, m) % m


# ---------------------------------------------------------------------------
# modular square roots

def _sqrt_mod_prime(a: int, p: int) -> int | None:
    """Tonelli-Shanks; None when a is a non-residue."""
    a %= p
    if p == 2:
        return a
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # find a non-residue
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int | None:
    """A square root of a modulo p^k for a a unit mod p, or None.

    For p = 2 the usual extra conditions apply (a = 1 mod 8 for k >= 3).
    """
    pk = p**k
    a %= pk
    if p != 2:
        r = _sqrt_mod_prime(a, p)
        if r is None:
            return None
        # Hensel lift
        m = p
        while m < pk:
            m_next = min(m * m, pk)
            r = (r - (r * r - a) * pow(2 * r, -1, m_next)) % m_next
            m = m_next
        return r
    # p = 2
    if k == 1:
        return a % 2
    if k == 2:
        return a % 4 if a % 4 in (0, 1) else None if a % 4 == 3 else 1
    if a % 8 != 1:
        return None
    r = 1
    for j in range(3, k):
        if (r * r - a) % (1 << (j + 1)):
            r += 1 << (j - 1)
    return r % pk


# ---------------------------------------------------------------------------
# FactoredRational

@dataclass(frozen=True)
class FactoredRational:
    """Nonzero rational as a sign and a prime -> nonzero exponent map."""

    sign: int
    exps: tuple[tuple[int, int], ...]  # sorted (prime, exponent), exponents != 0

    # -- constructors

    @classmethod
    def from_fraction(cls, x) -> "FactoredRational":
        x = Fraction(x)
        if x == 0:
            raise ValueError("FactoredRational must be nonzero")
        sign = -1 if x < 0 else 1
        e: dict[int, int] = {}
        for p, k in factorint(x.numerator).items():
            e[p] = e.get(p, 0) + k
        for p, k in factorint(x.denominator).items():
            e[p] = e.get(p, 0) - k
        return cls(sign, tuple(sorted((p, k) for p, k in e.items() if k)))

    @classmethod
    def one(cls) -> "FactoredRational":
        return cls(1, ())

    @classmethod
    def minus_one(cls) -> "FactoredRational":
        return cls(-1, ())

    # -- views

    def value(self) -> Fraction:
        num = den = 1
        for p, k in self.exps:
            if k > 0:
                num *= p**k
            else:
                den *= p**(-k)
        return Fraction(self.sign * num, den)

    def exponent_map(self) -> dict[int, int]:
        return dict(self.exps)

    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.exps)

    def valuation(self, p: int) -> int:
        for q, k in self.exps:
            if q == p:
                return k
        return 0

    def unit_part(self, p: int) -> Fraction:
        """self / p^{v_p(self)} as an exact fraction (a p-adic unit)."""
        return self.value() / Fraction(p) ** self.valuation(p)

    def is_one(self) -> bool:
        return self.sign == 1 and not self.exps

    def is_positive(self) -> bool:
        return self.sign == 1

    # -- arithmetic

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        e = dict(self.exps)
        for p, k in other.exps:
            e[p] = e.get(p, 0) + k
        return FactoredRational(self.sign * other.sign,
                                tuple(sorted((p, k) for p, k in e.items() if k)))

    def __truediv__(self, other: "FactoredRational") -> "FactoredRational":
        return self * other**-1

    def __pow__(self, n: int) -> "FactoredRational":
        if n == 0:
            return FactoredRational.one()
        sign = self.sign if n % 2 else 1
        return FactoredRational(sign, tuple((p, k * n) for p, k in self.exps))

    # -- misc

    def squarefree_kernel(self) -> int:
        out = self.sign
        for p, k in self.exps:
            if k % 2:
                out *= p
        return out

    def reduce_exponents(self, d: int) -> "FactoredRational":
        """Canonical representative of the class modulo d-th powers."""
        sign = self.sign
        if d % 2 == 1:
            sign = 1  # -1 is a d-th power for odd d
        return FactoredRational(sign, tuple(sorted((p, k % d) for p, k in self.exps
                                                   if k % d)))

    def __str__(self):
        v = self.value()
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    def __repr__(self):
        return f"FactoredRational({self})"


def parse_rational(text: str) -> FactoredRational:
    """Rational literal: optional sign, integer or `num/den`."""
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {text!r}") from exc
    if value == 0:
        raise ValueError("rational literal must be nonzero")
    return FactoredRational.from_fraction(value)


def parse_rational_list(text: str) -> list[FactoredRational]:
    """Comma-separated rational literals for the subgroup generators."""
    items = [t for t in (s.strip() for s in text.split(",")) if t]
    return [parse_rational(t) for t in items]


# ---------------------------------------------------------------------------
# finitely generated subgroups of Q*

class NormSubgroup:
    """Finitely generated subgroup of Q*, given by FactoredRational generators.

    Caches an exponent-lattice basis (Hermite form over the joint support)
    plus the sign data, so membership tests are triangular solves.
    """

    def __init__(self, generators):
        gens = []
        for g in generators:
            if isinstance(g, FactoredRational):
                gens.append(g)
            else:
                gens.append(FactoredRational.from_fraction(g))
        # drop literal 1s but keep the trivial group representable
        self.generators: tuple[FactoredRational, ...] = tuple(
            g for g in gens if not g.is_one())
        self._support = tuple(sorted({p for g in self.generators
                                      for p in g.support()}))
        self._lattice = self._build_lattice()

    @classmethod
    def trivial(cls) -> "NormSubgroup":
        return cls([])

    @classmethod
    def parse(cls, text: str) -> "NormSubgroup":
        return cls(parse_rational_list(text))

    def _build_lattice(self):
        # rows: [sign bit mod 2 | exponent vector]; Hermite-reduce the free part
        from .abgroup import hermite_normal_form
        sup = self._support
        rows = []
        for g in self.generators:
            rows.append([0 if g.sign == 1 else 1] +
                        [g.valuation(p) for p in sup])
        return hermite_normal_form([r[1:] for r in rows]) if sup else []

    @property
    def support(self) -> tuple[int, ...]:
        return self._support

    def is_trivial(self) -> bool:
        return not self.generators

    def has_minus_one(self) -> bool:
        """Whether -1 lies in the subgroup."""
        return self.contains(FactoredRational.minus_one())

    def contains(self, beta: FactoredRational) -> bool:
        """Exact membership via the exponent lattice and a sign sweep."""
        sup = self._support
        if any(p not in sup for p in beta.support()):
            return False
        if not self.generators:
            return beta.is_one()
        rows = [[g.valuation(p) for p in sup] for g in self.generators]
        target = [beta.valuation(p) for p in sup]
        solved = _solve_integer_combination(rows, target)
        if solved is None:
            return False
        n0, kernel = solved
        sbits = [0 if g.sign == 1 else 1 for g in self.generators]
        eps0 = sum(n * s for n, s in zip(n0, sbits)) % 2
        want = 0 if beta.sign == 1 else 1
        if eps0 == want:
            return True
        return any(sum(k * s for k, s in zip(kv, sbits)) % 2 for kv in kernel)

    def residues(self, q: int) -> list[FactoredRational]:
        """Representatives of A / A^q (with duplicates removed)."""
        reps: dict[tuple, FactoredRational] = {}
        def rec(i, acc):
            if i == len(self.generators):
                key = acc.reduce_exponents(q)
                reps.setdefault((key.sign, key.exps), acc)
                return
            g = self.generators[i]
            cur = FactoredRational.one()
            for _ in range(q):
                rec(i + 1, acc * cur)
                cur = cur * g
        rec(0, FactoredRational.one())
        return list(reps.values())

    def reduction_mod_p(self, p: int) -> list[int]:
        """Images of the generators in F_p*, for p outside the support."""
        out = []
        for g in self.generators:
            val = g.value()
            if val.numerator % p == 0 or val.denominator % p == 0:
                raise ValueError(f"{g} is not a unit at {p}")
            out.append(val.numerator * pow(val.denominator, -1, p) % p)
        return out

    def label(self) -> str:
        if not self.generators:
            return "1"
        return ",".join(str(g) for g in self.generators)

    def __repr__(self):
        return f"NormSubgroup<{self.label()}>"


def _hnf_with_transform(rows: list[list[int]]):
    """Hermite form H = U * rows with U unimodular; returns (H, U).

    Zero rows of H are kept so the corresponding U-rows span the left kernel.
    """
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    M = [list(r) for r in rows]
    U = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    r = 0
    for c in range(nc):
        while True:
            nz = [i for i in range(r, nr) if M[i][c] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(M[i][c]))
            i0 = nz[0]
            for i in nz[1:]:
                q = M[i][c] // M[i0][c]
                for k in range(nc):
                    M[i][k] -= q * M[i0][k]
                for k in range(nr):
                    U[i][k] -= q * U[i0][k]
        nz = [i for i in range(r, nr) if M[i][c] != 0]
        if not nz:
            continue
        i0 = nz[0]
        M[r], M[i0] = M[i0], M[r]
        U[r], U[i0] = U[i0], U[r]
        if M[r][c] < 0:
            M[r] = [-x for x in M[r]]
            U[r] = [-x for x in U[r]]
        r += 1
    return M, U


def _solve_integer_combination(rows: list[list[int]], target: list[int]):
    """Solve n . rows = target over Z.

    Returns (particular solution, left-kernel basis) or None when unsolvable.
    """
    H, U = _hnf_with_transform(rows)
    nr, nc = len(rows), len(target)
    t = list(target)
    coeff = [0] * nr
    for i in range(nr):
        if not any(H[i]):
            continue
        pcol = next(k for k, x in enumerate(H[i]) if x != 0)
        if t[pcol] % H[i][pcol] != 0:
            return None
        q = t[pcol] // H[i][pcol]
        if q:
            for k in range(nc):
                t[k] -= q * H[i][k]
            coeff[i] = q
    if any(t):
        return None
    n0 = [sum(coeff[i] * U[i][j] for i in range(nr)) for j in range(nr)]
    kernel = [U[i] for i in range(nr) if not any(H[i])]
    return n0, kernel


# ---------------------------------------------------------------------------
# place sets

class PlaceSet:
    """Finite set of places of Q: primes plus the real place (INF)."""

    def __init__(self, places):
        norm = set()
        for v in places:
            if v == INF or v == "inf":
                norm.add(INF)
            else:
                norm.add(int(v))
        self.places = frozenset(norm)

    @classmethod
    def parse(cls, text: str) -> "PlaceSet":
        toks = [t for t in (s.strip() for s in text.split(",")) if t]
        return cls(toks)

    @classmethod
    def standard(cls, G, A: NormSubgroup) -> "PlaceSet":
        """The default admissible set: infinity, primes <= |G|, supp(A)."""
        ps = {INF}
        bound = G.order
        for p in range(2, bound + 1):
            if all(p % d for d in range(2, int(p**0.5) + 1)):
                ps.add(p)
        ps.update(A.support)
        return cls(ps)

    def finite(self) -> list[int]:
        return sorted(p for p in self.places if p != INF)

    def contains(self, v) -> bool:
        return (INF if v == INF or v == "inf" else int(v)) in self.places

    def is_admissible_for(self, G, A: NormSubgroup) -> bool:
        """Contains infinity, all primes <= |G|, and supp(A); over Q the
        trivial-class-group condition then holds automatically."""
        if INF not in self.places:
            return False
        for p in range(2, G.order + 1):
            if all(p % d for d in range(2, int(p**0.5) + 1)) and p not in self.places:
                return False
        return all(p in self.places for p in A.support)

    def __iter__(self):
        return iter(sorted(self.places, key=lambda v: (v == INF, v)))

    def __contains__(self, v):
        return self.contains(v)

    def __eq__(self, other):
        return isinstance(other, PlaceSet) and self.places == other.places

    def __hash__(self):
        return hash(self.places)

    def label(self) -> str:
        toks = [str(p) for p in self.finite()]
        if INF in self.places:
            toks.append("inf")
        return ",".join(toks)

    def __repr__(self):
        return f"PlaceSet({{{self.label()}}})"
