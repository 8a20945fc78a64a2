"""Cyclotomic-Kummer invariants over Q.

Power membership of rationals locally and in Q(mu_f), Kummer degrees, the
exponent invariant varpi, the almost-everywhere-local obstruction group of
exponent e, the frobenian divisor function d_{A}(p) with its sampled means,
and the finite group of classes that are locally in A at almost all places.

The 2-power membership rules work in the class of cyclotomic radicals
zeta^rho * s * sqrt(m): every element of a cyclotomic field with a 2-power
power in Q* has this shape, the shape is closed under the square roots that
exist in cyclotomic fields, and membership of such an element in Q(mu_f) is
a finite character condition. All cyclotomic entanglement over Q is
quadratic, so this covers the general case; the slow tower oracle pins the
rules in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod, sqrt as _fsqrt
import statistics

from .abgroup import AbelianGroup, torsion_order, order_class_count
from .rationals import (
    INF,
    FactoredRational,
    NormSubgroup,
    PlaceSet,
    divisors,
    factorint,
    kronecker,
    primes_up_to,
    quadratic_discriminant,
    squarefree_part,
)

__all__ = [
    "local_power_test",
    "cyclotomic_power_membership",
    "kummer_degree",
    "varpi",
    "d_frobenian",
    "frobenian_mean_sampled",
    "sha_omega",
    "BigXGroup",
    "big_X",
    "norm_density_positive",
    "CyclotomicRadical",
]


# ---------------------------------------------------------------------------
# local power tests

def local_power_test(beta: FactoredRational, place, d: int) -> bool:
    """Whether beta is a d-th power in Q_p (or in R for the real place)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return True
    if place == INF:
        return beta.is_positive() or d % 2 == 1
    p = int(place)
    v = beta.valuation(p)
    if v % d != 0:
        return False
    u = beta.unit_part(p)
    if p == 2:
        a = d & -d
        a = a.bit_length() - 1  # v_2(d)
        if a == 0:
            return True  # odd d: units are d-th powers in Z_2* iff ... check odd part below
        k = a + 3
        mod = 1 << k
        uu = u.numerator * pow(u.denominator, -1, mod) % mod
        # d-th powers among 2-adic units: the odd part of d is invertible on
        # Z_2*, so only the 2-part matters: (Z_2*)^(2^a) = 1 + 2^(a+2) Z_2
        return uu % (1 << (a + 2)) == 1
    # odd p: split d into the part acting on mu_(p-1) and the p-part
    dp = 1
    dd = d
    while dd % p == 0:
        dd //= p
        dp *= p
    k = 1 + 2 * (0 if dp == 1 else factorint(dp)[p]) + 1
    mod = p**k
    uu = u.numerator * pow(u.denominator, -1, mod) % mod
    group_order = (p - 1) * p ** (k - 1)
    return pow(uu, group_order // gcd(d, group_order), mod) == 1


# ---------------------------------------------------------------------------
# cyclotomic radicals: zeta^rho * s * sqrt(m)

@dataclass(frozen=True)
class CyclotomicRadical:
    """zeta^rho * s * sqrt(m) with rho in Q/Z, s a positive rational and m a
    positive squarefree integer. This normal form is unique."""

    rho: Fraction          # exponent of e^(2 pi i)
    s: Fraction            # positive rational
    m: int                 # positive squarefree

    @classmethod
    def from_rational(cls, beta: FactoredRational) -> "CyclotomicRadical":
        val = beta.value()
        if val > 0:
            return cls(Fraction(0), val, 1)
        return cls(Fraction(1, 2), -val, 1)

    def square_roots(self) -> list["CyclotomicRadical"]:
        """The square roots of this element that lie in the radical class.

        Elements with m != 1 have no square root in any cyclotomic field:
        the square of any radical has modulus s^2 * m rational, while the
        modulus here would be s*sqrt(m), which is irrational.
        """
        if self.m != 1:
            return []
        num, den = self.s.numerator, self.s.denominator
        m1 = squarefree_part(num * den)
        s0sq = self.s / m1
        s0 = Fraction(_isqrt_exact(s0sq.numerator), _isqrt_exact(s0sq.denominator))
        half = self.rho / 2
        return [CyclotomicRadical(half % 1, s0, m1),
                CyclotomicRadical((half + Fraction(1, 2)) % 1, s0, m1)]

    def in_cyclotomic(self, f: int) -> bool:
        """Whether the element lies in Q(mu_f): invariance under all
        sigma_t with t = 1 mod f."""
        b = self.rho.denominator
        a = self.rho.numerator
        D = quadratic_discriminant(self.m)
        L = lcm(b, abs(D), f)
        for t in range(1, L + 1, f):
            if gcd(t, L) != 1:
                continue
            r = (a * (t - 1)) % b
            chi = kronecker(D, t)
            phase_real = (r == 0)
            phase_minus = (2 * r == b)
            if chi == 1 and phase_real:
                continue
            if chi == -1 and phase_minus:
                continue
            return False
        return True


def _isqrt_exact(n: int) -> int:
    r = int(_fsqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    if r * r != n:
        raise ValueError(f"{n} is not a perfect square")
    return r


@lru_cache(maxsize=65536)
def _two_power_membership(sign: int, exps: tuple, f: int, j: int) -> bool:
    """beta in Q(mu_f)^(2^j), via square-root recursion in the radical class."""
    beta = FactoredRational(sign, exps)
    level = [CyclotomicRadical.from_rational(beta)]
    for _ in range(j):
        nxt = []
        for cand in level:
            nxt.extend(cand.square_roots())
        level = nxt
        if not level:
            return False
    return any(c.in_cyclotomic(f) for c in level)


def cyclotomic_power_membership(beta: FactoredRational, f: int, d: int) -> bool:
    """Whether beta is a d-th power in Q(mu_f).

    Odd prime-power parts of d reduce to d-th power testing in Q itself
    (no odd entanglement over Q); the 2-part runs the radical recursion.
    """
    if f < 1 or d < 1:
        raise ValueError("need f >= 1 and d >= 1")
    for q, e in factorint(d).items() if d > 1 else []:
        if q == 2:
            if not _two_power_membership(beta.sign, beta.exps, f, e):
                return False
        else:
            qe = q**e
            if any(k % qe for _, k in beta.exps):
                return False
    return True


# ---------------------------------------------------------------------------
# Kummer degrees and varpi

def _relation_subgroup_size(gens: list[FactoredRational], f: int, q: int) -> int:
    """|{n in (Z/q)^k : prod gens^n in Q(mu_f)^q}|."""
    from itertools import product as ip
    k = len(gens)
    if k == 0:
        return 1
    count = 0
    for n in ip(range(q), repeat=k):
        x = FactoredRational.one()
        for g, ni in zip(gens, n):
            if ni:
                x = x * g**ni
        if cyclotomic_power_membership(x, f, q):
            count += 1
    return count


def kummer_degree(A: NormSubgroup, f: int) -> tuple[int, int]:
    """Degrees ([Q(mu_f, A^(1/f)) : Q], [Q(mu_f, A^(1/f)) : Q(mu_f)]).

    The relative degree is the order of the image of A in
    Q(mu_f)*/Q(mu_f)*^f, computed one prime power of f at a time.
    """
    if f < 1:
        raise ValueError("f must be >= 1")
    phi = _euler_phi(f)
    rel = 1
    gens = list(A.generators)
    for q, e in factorint(f).items() if f > 1 else []:
        qe = q**e
        size = _relation_subgroup_size(gens, f, qe)
        total = qe ** len(gens)
        rel *= total // size
    return phi * rel, rel


def _euler_phi(n: int) -> int:
    out = 1
    for p, e in factorint(n).items() if n > 1 else []:
        out *= (p - 1) * p ** (e - 1)
    return out


def varpi(G: AbelianGroup, A: NormSubgroup) -> Fraction:
    """The exponent invariant: sum over nontrivial g of 1/[k_{|g|} : Q],
    with k_d the d-th cyclotomic-Kummer field of A."""
    e = G.exponent
    total = Fraction(0)
    for f in divisors(e):
        if f == 1:
            continue
        cnt = order_class_count(G, f)
        if cnt:
            total += Fraction(cnt, kummer_degree(A, f)[0])
    return total


# ---------------------------------------------------------------------------
# frobenian divisor function and sampled means

def d_frobenian(A: NormSubgroup, e: int, p: int) -> int:
    """max{d | gcd(e, p-1) : A mod p lies in the d-th powers of F_p*}."""
    if p < 2:
        raise ValueError("p must be a prime")
    if e % p == 0 or p in A.support:
        raise ValueError(f"prime {p} is exceptional for this (A, e)")
    g = gcd(e, p - 1)
    residues = A.reduction_mod_p(p)
    best = 1
    for d in divisors(g):
        if all(pow(r, (p - 1) // d, p) == 1 for r in residues):
            best = max(best, d)
    return best


def frobenian_mean_sampled(A: NormSubgroup, G: AbelianGroup, P: int,
                           seed: int = 0, lo: int = 2) -> tuple[float, float]:
    """Average of |G[d_A(p)]| - 1 over primes lo <= p <= P, with standard
    error. Converges to varpi(G, A); exceptional primes are skipped.

    Deterministic for a fixed range; the seed is kept for interface parity
    with the sharded samplers and reserved for subsampling.
    """
    if P < 10**3:
        raise ValueError("prime bound too small for a stable mean")
    e = G.exponent
    skip = set(A.support) | set(factorint(e) if e > 1 else {})
    vals = []
    for p in primes_up_to(P):
        p = int(p)
        if p < lo or p in skip or p <= G.order:
            continue
        vals.append(torsion_order(G, d_frobenian(A, e, p)) - 1)
    mean = statistics.fmean(vals)
    stderr = statistics.pstdev(vals) / _fsqrt(len(vals))
    return mean, stderr


# ---------------------------------------------------------------------------
# the exponent-e everywhere-unramified obstruction group over Q

def sha_omega(e: int, certify: bool = True):
    """Order of the group of classes in Q*/Q*^e that are local e-th powers at
    all but finitely many places, plus a generator class when nontrivial.

    Over Q this is trivial unless 8 | e, in which case it has order 2; the
    generator is found by candidate search certified through cyclotomic
    membership at level e.
    """
    if e < 1:
        raise ValueError("e must be >= 1")
    r = 0
    ee = e
    while ee % 2 == 0:
        ee //= 2
        r += 1
    if r < 3:
        return 1, None
    gen = _search_sha_generator(e) if certify else None
    return 2, gen


def _search_sha_generator(e: int) -> FactoredRational:
    candidates = []
    for a in range(1, e + 1):
        for odd in (1, 9, 25, 27):
            for sign in (1, -1):
                candidates.append(sign * 2**a * odd)
    candidates.sort(key=lambda c: (abs(c), c < 0))
    sample = [int(p) for p in primes_up_to(2000) if p > 2]
    for c in candidates:
        beta = FactoredRational.from_fraction(c)
        if cyclotomic_power_membership(beta, 1, e):
            continue  # already an e-th power in Q
        if not all(local_power_test(beta, p, gcd(e, p - 1)) for p in sample[:40]):
            continue
        if cyclotomic_power_membership(beta, e, e):
            return beta
    raise RuntimeError(f"no generator found for exponent {e}")


# ---------------------------------------------------------------------------
# the group X(Q, G, A)

class BigXGroup:
    """Finite group of classes x in O_S* (tensor the character group of G)
    that are locally in A at every place outside S.

    Elements are tuples of FactoredRational classes, one per cyclic factor
    of the dual group, with exponents reduced mod that factor's order.
    """

    def __init__(self, G: AbelianGroup, S: PlaceSet, classes):
        self.G = G
        self.S = S
        self.factor_orders = G.invariant_factors
        self.classes = sorted(classes,
                              key=lambda t: tuple((c.sign, c.exps) for c in t))

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def contains(self, cls: tuple) -> bool:
        key = tuple((c.reduce_exponents(d).sign, c.reduce_exponents(d).exps)
                    for c, d in zip(cls, self.factor_orders))
        return any(key == tuple((c.sign, c.exps) for c in t) for t in self.classes)

    def labels(self) -> list[str]:
        return ["(" + ",".join(str(c) for c in t) + ")" if len(t) != 1
                else str(t[0]) for t in self.classes]

    def __repr__(self):
        return f"BigXGroup(order={len(self.classes)}, classes={self.labels()})"


def _s_unit_classes(S: PlaceSet, d: int):
    """Representatives of O_S*/O_S*^d as FactoredRational, exponents in [0, d)."""
    from itertools import product as ip
    ps = S.finite()
    for sign in (1, -1):
        for exps in ip(range(d), repeat=len(ps)):
            yield FactoredRational(sign, tuple((p, k) for p, k in zip(ps, exps) if k))


def big_X(G: AbelianGroup, A: NormSubgroup, S: PlaceSet) -> BigXGroup:
    """Enumerate O_S* tensor the dual of G and keep the classes whose image
    in Q(mu_q)*/Q(mu_q)*^q lies in the image of A for every maximal prime
    power q of each cyclic factor. The result is independent of the choice
    of admissible S.
    """
    if not S.is_admissible_for(G, A):
        raise ValueError(f"{S!r} is not admissible for (G={G!r}, A={A!r})")
    if G.is_trivial():
        return BigXGroup(G, S, [()])
    residues_cache: dict[int, list[FactoredRational]] = {}
    member_cache: dict[tuple, bool] = {}

    def in_A_image(x: FactoredRational, q: int) -> bool:
        xq = x.reduce_exponents(q)
        key = (xq.sign, xq.exps, q)
        hit = member_cache.get(key)
        if hit is None:
            if q not in residues_cache:
                residues_cache[q] = A.residues(q)
            hit = any(cyclotomic_power_membership(xq * a**-1, q, q)
                      for a in residues_cache[q])
            member_cache[key] = hit
        return hit

    factor_classes = []
    for d in G.invariant_factors:
        kept = []
        for x in _s_unit_classes(S, d):
            if all(in_A_image(x, q**e) for q, e in factorint(d).items()):
                kept.append(x.reduce_exponents(d))
        factor_classes.append(kept)
    from itertools import product as ip
    classes = [tuple(t) for t in ip(*factor_classes)]
    return BigXGroup(G, S, classes)


def norm_density_positive(G: AbelianGroup, A: NormSubgroup,
                          sample_bound: int = 3000) -> bool:
    """Whether a positive proportion of G-extensions admit all of A as
    everywhere-local norms: every generator must be a d-th power in Q(mu_d)
    for every divisor d of the exponent.

    Cross-checked against the almost-everywhere local condition on sampled
    primes; disagreement raises, since the two are provably equivalent.
    """
    e = G.exponent
    main = all(cyclotomic_power_membership(g, d, d)
               for g in A.generators for d in divisors(e) if d > 1)
    # sampled equivalent: A in Q_p^{*e} for all non-exceptional p <= bound
    skip = set(A.support) | set(factorint(e) if e > 1 else {})
    failures = 0
    for p in primes_up_to(sample_bound):
        p = int(p)
        if p in skip or p == 2:
            continue
        if not all(local_power_test(g, p, e) for g in A.generators):
            failures += 1
    if main and failures:
        raise AssertionError("membership rules disagree with local sampling")
    if not main and failures == 0 and not A.is_trivial():
        raise AssertionError("local sampling found no failures but rules say density 0")
    return main
