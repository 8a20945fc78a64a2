"""G-valued characters of the idele class group of Q.

A continuous homomorphism from the idele class group to a finite abelian G
factors through the units modulo some least modulus m, so it is stored as
one block per prime power p^k || m: the images in G of a fixed generating
set of (Z/p^k Z)* (one canonical generator for odd p, the pair {-1, 5} for
p = 2 and k >= 3). Local components, the conductor, evaluation against
rationals, and conductor-ordered enumeration all run off the block data.

Conventions are pinned by two facts that the test suite asserts directly:
the product formula sum_v chi_v(alpha) = 0, and the unramified rule
chi_p(p) = chi(p mod m). Unit parts carry the inverse twist so that both
hold by construction; all norm predicates downstream only see kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod

from .abgroup import AbelianGroup, GroupElement
from .rationals import INF, FactoredRational, factorint, kronecker, quadratic_discriminant

__all__ = [
    "Block",
    "GChar",
    "LocalGChar",
    "conductor",
    "local_component",
    "evaluate_local",
    "enumerate_by_conductor",
    "blocks_for_prime",
    "quadratic_char",
    "char_cutting_field",
    "pairing",
    "brute_force_enumerate",
]


# ---------------------------------------------------------------------------
# discrete logarithms against canonical generators

@lru_cache(maxsize=None)
def smallest_primitive_root(p: int) -> int:
    """Smallest primitive root mod p (and mod p^k after the p^2 check)."""
    if p == 2:
        return 1
    fac = list(factorint(p - 1))
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return g
        g += 1


@lru_cache(maxsize=None)
def unit_group_generator(p: int, k: int) -> int:
    """Canonical generator of the cyclic group (Z/p^k Z)*, odd p."""
    g = smallest_primitive_root(p)
    if k >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _dlog_in_subgroup(x: int, gamma: int, m: int, mod: int) -> int:
    """j with gamma^j = x in the order-m cyclic subgroup of (Z/mod)*."""
    cur = 1
    for j in range(m):
        if cur == x:
            return j
        cur = cur * gamma % mod
    raise ArithmeticError(f"dlog failed: {x} not in <{gamma}> mod {mod}")


def dlog_mod(x: int, p: int, k: int, m: int) -> int:
    """dlog of the unit x base the canonical generator of (Z/p^k)*, mod m.

    Only residues mod small m are ever needed (m divides the exponent of G
    times the wild part), so the subgroup reduction keeps this cheap.
    """
    mod = p**k
    n = (p - 1) * p ** (k - 1)
    g = unit_group_generator(p, k)
    if m == 1:
        return 0
    if m == 2:
        return 0 if pow(x, n // 2, mod) == 1 else 1
    gamma = pow(g, n // m, mod)
    return _dlog_in_subgroup(pow(x, n // m, mod), gamma, m, mod)


def dlog_two_adic(x: int, k: int) -> tuple[int, int]:
    """(s, t) with x = (-1)^s 5^t mod 2^k, k >= 3; t is defined mod 2^(k-2)."""
    mod = 1 << k
    x %= mod
    s = 0 if x % 4 == 1 else 1
    if s:
        x = (-x) % mod
    t = 0
    pw = 5 % mod
    cur = 1
    for j in range(k - 2):
        bit_mod = 1 << min(j + 3, k)
        if cur % bit_mod != x % bit_mod:
            t |= 1 << j
            cur = cur * pw % mod
        pw = pw * pw % mod
    return s, t


# ---------------------------------------------------------------------------
# blocks

@dataclass(frozen=True)
class Block:
    """Primitive unit-map at one prime power p^k.

    `images` are element indices in G of the canonical generators:
    (h,) for odd p and for p = 2, k = 2 (generator -1);
    (h_minus, h_five) for p = 2, k >= 3.
    """
    p: int
    k: int
    images: tuple[int, ...]

    @property
    def conductor(self) -> int:
        return self.p ** self.k


def _block_level_ok(G: AbelianGroup, blk: Block) -> bool:
    ordt = G.order_table()
    p, k = blk.p, blk.k
    if p == 2:
        if k == 2:
            return len(blk.images) == 1 and ordt[blk.images[0]] == 2
        if k >= 3:
            if len(blk.images) != 2:
                return False
            hm, h5 = blk.images
            if ordt[hm] > 2:
                return False
            return ordt[h5] == 1 << (k - 2)
        return False
    if k == 1:
        h = blk.images[0]
        return h != 0 and (p - 1) % ordt[h] == 0
    # wild odd block: order = t * p^(k-1) with t | p - 1
    h = blk.images[0]
    o = ordt[h]
    pe = p ** (k - 1)
    return o % pe == 0 and o % (pe * p) != 0 and (p - 1) % (o // pe) == 0


def block_value(G: AbelianGroup, blk: Block, x) -> int:
    """Element index of the block's value at x (a rational unit at p)."""
    p, k = blk.p, blk.k
    mod = p**k
    if isinstance(x, Fraction):
        xi = x.numerator * pow(x.denominator, -1, mod) % mod
    else:
        xi = x % mod
        if gcd(xi, p) != 1:
            raise ValueError(f"{x} is not a unit at {p}")
    if p == 2:
        if k == 2:
            s = 0 if xi % 4 == 1 else 1
            return G.scalar_table(s)[blk.images[0]]
        s, t = dlog_two_adic(xi, k)
        add = G.add_table()
        hm = G.scalar_table(s)[blk.images[0]]
        h5 = G.scalar_table(t)[blk.images[1]]
        return add[hm][h5]
    h = blk.images[0]
    m = G.order_table()[h]
    j = dlog_mod(xi, p, k, m)
    return G.scalar_table(j)[h]


# ---------------------------------------------------------------------------
# the character type

class GChar:
    """A G-valued character, stored as primitive blocks sorted by prime."""

    __slots__ = ("G", "blocks", "_cache")

    def __init__(self, G: AbelianGroup, blocks, validate: bool = True):
        blocks = tuple(sorted(blocks, key=lambda b: b.p))
        if validate:
            seen = set()
            for b in blocks:
                if b.p in seen:
                    raise ValueError(f"two blocks at prime {b.p}")
                seen.add(b.p)
                if not _block_level_ok(G, b):
                    raise ValueError(f"non-primitive or invalid block {b}")
        self.G = G
        self.blocks = blocks
        self._cache: dict = {}

    # -- invariants

    @property
    def modulus(self) -> int:
        return prod(b.conductor for b in self.blocks) if self.blocks else 1

    @property
    def conductor(self) -> int:
        # primitivity makes the finite conductor equal to the modulus
        return self.modulus

    def is_trivial(self) -> bool:
        return not self.blocks

    def ramified_primes(self) -> tuple[int, ...]:
        return tuple(b.p for b in self.blocks)

    def image_mask(self) -> int:
        mask = self._cache.get("mask")
        if mask is None:
            mask = 1
            for b in self.blocks:
                for h in b.images:
                    mask = self.G.mask_extend(mask, h)
            self._cache["mask"] = mask
        return mask

    def is_surjective(self) -> bool:
        return self.image_mask() == self.G.full_mask()

    def image_order(self) -> int:
        return bin(self.image_mask()).count("1")

    # -- evaluation

    def value(self, x) -> GroupElement:
        """chi(x mod m): the unit-level value of the stored block data at a
        rational x prime to the modulus."""
        idx = 0
        add = self.G.add_table()
        for b in self.blocks:
            idx = add[idx][block_value(self.G, b, x)]
        return self.G.by_index(idx)

    def block_at(self, p: int):
        for b in self.blocks:
            if b.p == p:
                return b
        return None

    # -- canonical serialization: `m; p1^k1:[images]; ...`

    def serialize(self) -> str:
        parts = [str(self.modulus)]
        for b in self.blocks:
            imgs = ",".join("(" + ",".join(map(str, self.G.coords_of(h))) + ")"
                            for h in b.images)
            parts.append(f"{b.p}^{b.k}:[{imgs}]")
        return "; ".join(parts)

    def __eq__(self, other):
        return isinstance(other, GChar) and self.G == other.G and \
            self.blocks == other.blocks

    def __hash__(self):
        return hash((self.G, self.blocks))

    def __repr__(self):
        return f"GChar({self.serialize()})"


@dataclass(frozen=True)
class LocalGChar:
    """Local component at one place: the unit-part block (inverse-convention
    restriction of the global block), and the uniformizer image; at the real
    place only the sign image survives."""
    G: AbelianGroup
    place: object              # prime or INF
    block: Block | None        # None when unramified or archimedean
    uniformizer_image: int     # element index; sign image at INF

    def is_unramified(self) -> bool:
        return self.place != INF and self.block is None

    def image_mask(self) -> int:
        """Bitmask of the decomposition group Im chi_v."""
        mask = 1
        if self.block is not None:
            for h in self.block.images:
                mask = self.G.mask_extend(mask, h)
        return self.G.mask_extend(mask, self.uniformizer_image)

    def is_trivial(self) -> bool:
        return self.block is None and self.uniformizer_image == 0


def conductor(chi: GChar) -> int:
    """Finite part of the conductor (the archimedean place is excluded)."""
    return chi.conductor


def local_component(chi: GChar, v) -> LocalGChar:
    """Restriction of chi to Q_v*, via the canonical splitting at v."""
    G = chi.G
    add = G.add_table()
    if v == INF:
        idx = 0
        for b in chi.blocks:
            idx = add[idx][block_value(G, b, -1)]
        return LocalGChar(G, INF, None, idx)
    p = int(v)
    idx = 0
    for b in chi.blocks:
        if b.p != p:
            idx = add[idx][block_value(G, b, p)]
    return LocalGChar(G, p, chi.block_at(p), idx)


def evaluate_local(loc: LocalGChar, alpha: FactoredRational) -> GroupElement:
    """chi_v(alpha) for the local component chi_v."""
    G = loc.G
    if loc.place == INF:
        return G.by_index(loc.uniformizer_image if alpha.sign < 0 else 0)
    p = int(loc.place)
    a = alpha.valuation(p)
    idx = G.scalar_table(a)[loc.uniformizer_image] if a else 0
    if loc.block is not None:
        u = alpha.unit_part(p)
        unit_idx = G.neg_table()[block_value(G, loc.block, u)]
        idx = G.add_table()[idx][unit_idx]
    return G.by_index(idx)


# ---------------------------------------------------------------------------
# construction from quadratic fields

def quadratic_char(d: int) -> GChar:
    """The Z/2-valued character cutting Q(sqrt(d)); d a fundamental
    discriminant (any nonsquare integer is reduced to one first).

    The block at 2 comes from the prime-discriminant factorization
    d = t * prod p* with p* = (-1)^((p-1)/2) p and t in {1, -4, 8, -8}.
    """
    d = quadratic_discriminant(d)
    if d == 1:
        raise ValueError("d must not be a square")
    G = AbelianGroup((2,))
    blocks = []
    odd = abs(d)
    while odd % 2 == 0:
        odd //= 2
    prime_disc = 1
    for p in factorint(odd) if odd > 1 else []:
        blocks.append(Block(p, 1, (1,)))
        prime_disc *= p if p % 4 == 1 else -p
    t, rem = divmod(d, prime_disc)
    if rem:
        raise ArithmeticError(f"bad prime-discriminant split for {d}")
    if t == -4:
        blocks.append(Block(2, 2, (1,)))
    elif t == 8:
        blocks.append(Block(2, 3, (0, 1)))
    elif t == -8:
        blocks.append(Block(2, 3, (1, 1)))
    elif t != 1:
        raise ArithmeticError(f"bad 2-part {t} for discriminant {d}")
    return GChar(G, blocks)


def char_cutting_field(gens: list[int]) -> GChar:
    """Multiquadratic shorthand: the (Z/2)^r-valued character whose kernel
    cuts Q(sqrt(g1), ..., sqrt(gr)). The generators must be multiplicatively
    independent modulo squares."""
    discs = [quadratic_discriminant(g) for g in gens]
    if len(discs) != len(set(discs)) or 1 in discs:
        raise ValueError(f"field generators {gens} are not independent")
    r = len(discs)
    G = AbelianGroup((2,) * r)
    levels: dict[int, int] = {}
    vec_gen: dict[int, list[int]] = {}   # image coordinates of -1 resp. g_p
    vec_five: dict[int, list[int]] = {}  # image coordinates of 5 (p = 2 only)
    for i, d in enumerate(discs):
        for b in quadratic_char(d).blocks:
            levels[b.p] = max(levels.get(b.p, 0), b.k)
            v0 = vec_gen.setdefault(b.p, [0] * r)
            v1 = vec_five.setdefault(b.p, [0] * r)
            if b.p == 2 and b.k == 3:
                v0[i] ^= b.images[0]
                v1[i] ^= b.images[1]
            else:
                v0[i] ^= b.images[0]
    blocks = []
    for p, k in levels.items():
        if p == 2 and k == 3:
            blocks.append(Block(2, 3, (G.index_of(vec_gen[p]),
                                       G.index_of(vec_five[p]))))
        elif p == 2:
            blocks.append(Block(2, 2, (G.index_of(vec_gen[p]),)))
        else:
            blocks.append(Block(p, 1, (G.index_of(vec_gen[p]),)))
    chi = GChar(G, blocks, validate=False)
    if not chi.is_surjective():
        raise ValueError(f"field generators {gens} are not independent")
    return chi


# ---------------------------------------------------------------------------
# the pairing with elements of Q_v* tensor the dual group

def dual_pairing_exponent(G: AbelianGroup, psi: tuple[int, ...], g_idx: int) -> Fraction:
    """The exponent in Q/Z of <psi, g> for psi a dual vector (one integer
    per cyclic factor) and g a group element."""
    coords = G.coords_of(g_idx)
    total = Fraction(0)
    for c, t, d in zip(coords, psi, G.invariant_factors):
        total += Fraction(c * t, d)
    return total % 1


def pairing(loc: LocalGChar, x_v) -> int:
    """<chi_v, x_v> for x_v = sum alpha_i tensor psi_i, returned as the
    exponent mod e of the fixed primitive e-th root of unity."""
    G = loc.G
    e = G.exponent
    total = Fraction(0)
    for alpha, psi in x_v:
        g = evaluate_local(loc, alpha)
        total += dual_pairing_exponent(G, psi, g.index)
    total %= 1
    val = total * e
    if val.denominator != 1:
        raise ArithmeticError("pairing value is not an e-th root of unity")
    return int(val) % e


# ---------------------------------------------------------------------------
# block lists per prime and conductor-ordered enumeration

def blocks_for_prime(G: AbelianGroup, p: int, bound: int) -> list[Block]:
    """All primitive blocks at p with conductor <= bound, by conductor."""
    e = G.exponent
    ordt = G.order_table()
    out: list[Block] = []
    if p == 2:
        if 4 <= bound and e % 2 == 0:
            for h in G.torsion_indices(2):
                if h:
                    out.append(Block(2, 2, (h,)))
        k = 3
        while 2**k <= bound and 2 ** (k - 2) <= (e & -e):
            target = 1 << (k - 2)
            fives = [h for h in range(G.order) if ordt[h] == target]
            for h5 in fives:
                for hm in G.torsion_indices(2):
                    out.append(Block(2, k, (hm, h5)))
            k += 1
        return out
    if p <= bound:
        d = gcd(p - 1, e)
        if d > 1:
            for h in G.torsion_indices(d):
                if h:
                    out.append(Block(p, 1, (h,)))
    if e % p == 0:
        k = 2
        while p**k <= bound:
            pe = p ** (k - 1)
            for h in range(G.order):
                o = ordt[h]
                if o % pe == 0 and o % (pe * p) != 0 and (p - 1) % (o // pe) == 0:
                    out.append(Block(p, k, (h,)))
            k += 1
    return out


def enumerate_by_conductor(G: AbelianGroup, B: int, filter=None,
                           surjective: bool = False, lo: int = 1) -> list[GChar]:
    """Every character with conductor in [lo, B], each exactly once,
    conductors ascending with ties broken by canonical serialization.

    `surjective=True` keeps only genuine G-extensions; `filter` is an
    optional per-character predicate applied on top.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    from .rationals import primes_up_to
    out: list[GChar] = []
    prime_blocks: list[tuple[int, list[Block]]] = []
    for p in [int(q) for q in primes_up_to(B)]:
        blks = blocks_for_prime(G, p, B)
        if blks:
            prime_blocks.append((min(b.conductor for b in blks), blks))
    prime_blocks.sort(key=lambda t: t[0])

    def rec(i: int, cond: int, acc: list[Block]):
        if cond >= lo:
            chi = GChar(G, tuple(acc), validate=False)
            if (not surjective or chi.is_surjective()) and \
               (filter is None or filter(chi)):
                out.append(chi)
        for j in range(i, len(prime_blocks)):
            min_c, blks = prime_blocks[j]
            if cond * min_c > B:
                break
            for b in blks:
                c2 = cond * b.conductor
                if c2 <= B:
                    acc.append(b)
                    rec(j + 1, c2, acc)
                    acc.pop()

    rec(0, 1, [])
    out.sort(key=lambda chi: (chi.conductor, chi.serialize()))
    return out


def brute_force_enumerate(G: AbelianGroup, B: int) -> set[str]:
    """Independent oracle: serialize every hom (Z/mZ)* -> G over all moduli
    m <= B, strip to primitive block data, and keep conductors <= B."""
    from itertools import product as ip
    seen: set[str] = set()
    ordt = G.order_table()
    for m in range(1, B + 1):
        # generator structure of (Z/m)*
        gens: list[tuple[int, int, int, int]] = []  # (p, k, gen order, slot)
        ok = True
        blocks_shape = []
        for p, k in factorint(m).items() if m > 1 else []:
            if p == 2:
                if k == 1:
                    continue
                if k == 2:
                    blocks_shape.append((2, k, [2]))
                else:
                    blocks_shape.append((2, k, [2, 1 << (k - 2)]))
            else:
                blocks_shape.append((p, k, [(p - 1) * p ** (k - 1)]))
        pools = []
        for p, k, orders in blocks_shape:
            pools.append([tuple(t) for t in ip(*[G.torsion_indices(o) for o in orders])])
        for choice in ip(*pools):
            blocks = []
            valid = True
            for (p, k, orders), images in zip(blocks_shape, choice):
                blk = _primitive_part(G, p, k, images)
                if blk is not None:
                    blocks.append(blk)
            chi = GChar(G, tuple(blocks), validate=False)
            if chi.conductor <= B:
                seen.add(chi.serialize())
    return seen


def _primitive_part(G: AbelianGroup, p: int, k: int, images) -> Block | None:
    """Reduce a hom on (Z/p^k)* given by generator images to its primitive
    block (or None when trivial)."""
    ordt = G.order_table()
    if p == 2:
        if k == 2:
            hm = images[0]
            return Block(2, 2, (hm,)) if hm else None
        hm, h5 = images
        if h5 == 0:
            return Block(2, 2, (hm,)) if hm else None
        lvl = 2 + (ordt[h5].bit_length() - 1)
        # express the level-lvl block: image of 5 at that level is h5 itself
        return Block(2, lvl, (hm, h5))
    h = images[0]
    if h == 0:
        return None
    o = ordt[h]
    pe = 1
    while o % (pe * p) == 0:
        pe *= p
    lvl = 1
    t = pe
    while t > 1:
        lvl += 1
        t //= p
    return Block(p, lvl, (h,))
