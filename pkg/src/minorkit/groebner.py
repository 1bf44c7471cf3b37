"""Buchberger's algorithm and the membership oracles built on it.

Monomials are packed into single Python integers. For an ``n``-variable ring
with ``W`` bits per exponent the lex key is ``sum e_i << W*(n-1-i)`` and the
degrevlex key is ``(deg << W*n) - sum e_i << W*i``. Both are additive, so a
product of monomials is an integer sum and the monomial order is integer
comparison. Divisibility is tested on the packed exponent vector with one
guard bit per field.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import gmpy2

from .polycore import Polynomial, PolyRing, PrimeField

DEFAULT_PAIR_CAP = 50_000
DEFAULT_DEGREE_CAP = 40
MAX_HEIGHT_VARS = 20

_W = 8  # bits per exponent; the top bit of each field is the guard
_EMAX = (1 << (_W - 1)) - 1


class ResourceCapExceeded(RuntimeError):
    """A computation hit a configured limit; the instance is too large."""

    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} cap of {limit} exceeded")
        self.what = what
        self.limit = limit


class ImproperIdeal(ValueError):
    pass


@dataclass(frozen=True)
class IdealPresentation:
    ring: PolyRing
    generators: tuple

    def __init__(self, ring: PolyRing, generators: Iterable[Polynomial]):
        gens = tuple(g for g in generators if g)
        for g in gens:
            if g.ring != ring:
                raise ValueError("generators must live in the ideal's ring")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "generators", gens)

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __add__(self, other: "IdealPresentation") -> "IdealPresentation":
        if other.ring != self.ring:
            raise ValueError("ideals live in different rings")
        return IdealPresentation(self.ring, self.generators + other.generators)


def as_ideal(I, ring: PolyRing | None = None) -> IdealPresentation:
    if isinstance(I, IdealPresentation):
        return I
    gens = list(I)
    if ring is None:
        if not gens:
            raise ValueError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    return IdealPresentation(ring, gens)


class _Packer:
    """Conversion between exponent tuples and packed integer keys."""

    def __init__(self, nvars: int, order: str):
        self.n = nvars
        self.order = order
        self.shift = _W * nvars
        self.mask = (1 << _W) - 1
        self.guard = sum(1 << (_W * i + _W - 1) for i in range(nvars))
        self.degrevlex = order == "degrevlex"

    def packed(self, exps: Sequence[int]) -> int:
        # exponent vector with variable i in field i
        out = 0
        for i, e in enumerate(exps):
            if e > _EMAX:
                raise ResourceCapExceeded("exponent", _EMAX)
            out |= e << (_W * i)
        return out

    def key(self, exps: Sequence[int]) -> int:
        if self.degrevlex:
            return (sum(exps) << self.shift) - self.packed(exps)
        out = 0
        for e in exps:
            if e > _EMAX:
                raise ResourceCapExceeded("exponent", _EMAX)
            out = (out << _W) | e
        return out

    def pk(self, key: int) -> int:
        """Packed exponent vector of a key (variable i in field i)."""
        if self.degrevlex:
            deg = -((-key) >> self.shift)
            return (deg << self.shift) - key
        return self.packed(self.exps(key))

    def exps(self, key: int) -> tuple:
        if self.degrevlex:
            p = self.pk(key)
            return tuple((p >> (_W * i)) & self.mask for i in range(self.n))
        return tuple((key >> (_W * (self.n - 1 - i))) & self.mask for i in range(self.n))

    def degree(self, key: int) -> int:
        if self.degrevlex:
            return -((-key) >> self.shift)
        return sum(self.exps(key))

    def divides(self, pa: int, pb: int) -> bool:
        g = self.guard
        return ((pb | g) - pa) & g == g

    def lcm(self, a: int, b: int) -> int:
        return self.key([max(x, y) for x, y in zip(self.exps(a), self.exps(b))])

    def coprime(self, a: int, b: int) -> bool:
        return not any(x and y for x, y in zip(self.exps(a), self.exps(b)))


class _Arith:
    """Coefficient arithmetic: gmpy2 rationals or residues mod p."""

    def __init__(self, ring: PolyRing):
        F = ring.field
        self.p = F.p if isinstance(F, PrimeField) else 0

    def to_internal(self, c):
        if self.p:
            return int(c) % self.p
        return gmpy2.mpq(c.numerator, c.denominator)

    def to_external(self, c, F):
        if self.p:
            return int(c)
        from fractions import Fraction

        return F(Fraction(int(c.numerator), int(c.denominator)))

    def inv(self, c):
        if self.p:
            return pow(c, -1, self.p)
        return 1 / c


@dataclass
class _Engine:
    ring: PolyRing
    order: str
    pack: _Packer = field(init=False)
    ar: _Arith = field(init=False)

    def __post_init__(self):
        self.pack = _Packer(self.ring.nvars, self.order)
        self.ar = _Arith(self.ring)

    def convert(self, f: Polynomial) -> dict:
        key = self.pack.key
        to = self.ar.to_internal
        return {key(e): to(c) for e, c in f.as_dict().items()}

    def back(self, d: dict, ring: PolyRing) -> Polynomial:
        exps = self.pack.exps
        F = ring.field
        out = self.ar.to_external
        return Polynomial(ring, {exps(k): out(c, F) for k, c in d.items()})

    def monic(self, d: dict) -> dict:
        lc = d[max(d)]
        if lc == 1:
            return d
        inv = self.ar.inv(lc)
        p = self.ar.p
        if p:
            return {k: c * inv % p for k, c in d.items()}
        return {k: c * inv for k, c in d.items()}

    def reduce(self, f: dict, basis: list, full: bool = True) -> dict:
        """Normal form of ``f`` (destroyed) modulo monic ``basis`` entries.

        ``basis`` holds ``(lead key, packed lead, tail items)`` triples.
        """
        pk = self.pack.pk
        g = self.pack.guard
        p = self.ar.p
        rem = {}
        while f:
            m = max(f)
            c = f.pop(m)
            pm = pk(m) | g
            for lk, lp, tail in basis:
                if (pm - lp) & g == g:
                    s = m - lk
                    get = f.get
                    if p:
                        for t, a in tail:
                            k = t + s
                            v = (get(k, 0) - c * a) % p
                            if v:
                                f[k] = v
                            else:
                                f.pop(k, None)
                    else:
                        for t, a in tail:
                            k = t + s
                            v = get(k, 0) - c * a
                            if v:
                                f[k] = v
                            else:
                                f.pop(k, None)
                    break
            else:
                rem[m] = c
                if not full:
                    rem.update(f)
                    return rem
        return rem

    def entry(self, d: dict) -> tuple:
        lk = max(d)
        return (lk, self.pack.pk(lk), tuple((k, c) for k, c in d.items() if k != lk))

    def spoly(self, f: dict, g: dict, lf: int, lg: int, lcm: int) -> dict:
        p = self.ar.p
        sf, sg = lcm - lf, lcm - lg
        out = {k + sf: c for k, c in f.items() if k != lf}
        get = out.get
        for k, c in g.items():
            if k == lg:
                continue
            kk = k + sg
            v = get(kk, 0) - c
            if p:
                v %= p
            if v:
                out[kk] = v
            else:
                out.pop(kk, None)
        return out


def _buchberger(eng: _Engine, gens: list[dict], pair_cap: int, degree_cap: int) -> list[dict]:
    pack = eng.pack
    polys: list[dict] = []
    leads: list[int] = []
    sugar: list[int] = []
    active: list[int] = []
    pairs: list = []  # heap of (sugar, lcm key, i, j)
    entries: dict = {}
    processed = 0
    count = itertools.count()

    def basis_entries():
        return [entries[i] for i in active]

    def add(h: dict, s: int):
        nonlocal pairs, active
        h = eng.monic(h)
        idx = len(polys)
        polys.append(h)
        lh = max(h)
        leads.append(lh)
        sugar.append(s)
        entries[idx] = eng.entry(h)
        # Gebauer-Moeller update
        cand = list(active)
        lcms = {g: pack.lcm(lh, leads[g]) for g in cand}
        pending, keep = list(cand), []
        while pending:
            g1 = pending.pop(0)
            if pack.coprime(lh, leads[g1]):
                keep.append(g1)
                continue
            p1 = pack.pk(lcms[g1])
            if not any(pack.divides(pack.pk(lcms[g2]), p1) for g2 in pending + keep):
                keep.append(g1)
        new_pairs = [g for g in keep if not pack.coprime(lh, leads[g])]
        ph = pack.pk(lh)
        filtered = []
        for item in pairs:
            _, lij, _, i, j = item
            if pack.divides(ph, pack.pk(lij)) and pack.lcm(leads[i], lh) != lij and pack.lcm(leads[j], lh) != lij:
                continue
            filtered.append(item)
        for g in new_pairs:
            l = lcms[g]
            dl = pack.degree(l)
            s_pair = max(sugar[g] + dl - pack.degree(leads[g]), s + dl - pack.degree(lh))
            filtered.append((s_pair, l, next(count), g, idx))
        heapq.heapify(filtered)
        pairs = filtered
        active = [g for g in active if not pack.divides(ph, pack.pk(leads[g]))] + [idx]

    for f in gens:
        r = eng.reduce(dict(f), basis_entries())
        if not r:
            continue
        if max(r) == 0:
            return [{0: 1 if eng.ar.p else gmpy2.mpq(1)}]
        add(r, max(pack.degree(k) for k in f))
    while pairs:
        s, l, _, i, j = heapq.heappop(pairs)
        processed += 1
        if processed > pair_cap:
            raise ResourceCapExceeded("pair", pair_cap)
        if pack.degree(l) > degree_cap:
            raise ResourceCapExceeded("degree", degree_cap)
        h = eng.reduce(eng.spoly(polys[i], polys[j], leads[i], leads[j], l), basis_entries())
        if not h:
            continue
        if max(h) == 0:
            return [{0: 1 if eng.ar.p else gmpy2.mpq(1)}]
        add(h, s)
    # reduced basis: drop redundant leads, then interreduce tails
    minimal = [
        i for i in active
        if not any(j != i and pack.divides(pack.pk(leads[j]), pack.pk(leads[i])) for j in active)
    ]
    minimal.sort(key=lambda i: leads[i])
    out = []
    for i in minimal:
        others = [entries[j] for j in minimal if j != i]
        lk = leads[i]
        tail = {k: c for k, c in polys[i].items() if k != lk}
        red = eng.reduce(tail, others)
        red[lk] = polys[i][lk]
        out.append(red)
    out.sort(key=max, reverse=True)
    return out


class GroebnerBasis:
    """Reduced monic Gröbner basis of an ideal for one monomial order."""

    def __init__(self, source: IdealPresentation, order: str, engine: _Engine, internal: list[dict]):
        self.source = source
        self.order = order
        self._eng = engine
        self._internal = internal
        self._entries = [engine.entry(d) for d in internal]
        self.ring = source.ring.with_order(order) if source.ring.order != order else source.ring
        self.polys = tuple(engine.back(d, self.ring) for d in internal)

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    @property
    def is_unit(self) -> bool:
        return len(self._internal) == 1 and max(self._internal[0]) == 0

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring.names != self.ring.names or f.ring.field != self.ring.field:
            raise ValueError("polynomial is not in the basis' ring")
        d = self._eng.reduce(self._eng.convert(f), self._entries)
        return self._eng.back(d, f.ring)

    def contains(self, f: Polynomial) -> bool:
        if not f:
            return True
        return not self._eng.reduce(self._eng.convert(f), self._entries)

    def _power_member(self, f: Polynomial, max_power: int) -> bool:
        cur = self._eng.reduce(self._eng.convert(f), self._entries)
        base = self._eng.convert(f)
        p = self._eng.ar.p
        for _ in range(max_power):
            if not cur:
                return True
            prod: dict = {}
            for k1, c1 in cur.items():
                for k2, c2 in base.items():
                    k = k1 + k2
                    v = prod.get(k, 0) + c1 * c2
                    if p:
                        v %= p
                    if v:
                        prod[k] = v
                    else:
                        prod.pop(k, None)
            cur = self._eng.reduce(prod, self._entries)
        return not cur

    def leading_monomials(self) -> list[tuple]:
        return [self._eng.pack.exps(max(d)) for d in self._internal]


def _cache_key(I: IdealPresentation, order: str):
    return (I.ring.names, I.ring.field, order, frozenset(g for g in I.generators))


_CACHE: dict = {}
_CACHE_LIMIT = 256


def buchberger(
    I,
    order: str | None = None,
    pair_cap: int = DEFAULT_PAIR_CAP,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> GroebnerBasis:
    """Reduced Gröbner basis of ``I`` (an ``IdealPresentation`` or generator list)."""
    I = as_ideal(I)
    order = order or I.ring.order
    key = _cache_key(I, order)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    ring = I.ring if I.ring.order == order else I.ring.with_order(order)
    eng = _Engine(ring, order)
    gens = [eng.convert(g) for g in I.generators]
    gens.sort(key=lambda d: (eng.pack.degree(max(d)), max(d)))
    internal = _buchberger(eng, gens, pair_cap, degree_cap) if gens else []
    gb = GroebnerBasis(I, order, eng, internal)
    if len(_CACHE) >= _CACHE_LIMIT:
        _CACHE.pop(next(iter(_CACHE)))
    _CACHE[key] = gb
    return gb


def clear_cache() -> None:
    _CACHE.clear()


def ideal_member(f: Polynomial, I, **caps) -> bool:
    I = as_ideal(I, f.ring)
    return buchberger(I, **caps).contains(f)


def radical_member(f: Polynomial, I, *, max_power: int = 4, **caps) -> bool:
    """Is ``f`` in the radical of ``I``?

    Decided by the auxiliary-variable criterion ``1 in I + (1 - t f)``.
    Before that, cheap sufficient checks are tried: ``f^k`` reduces to zero
    modulo a Gröbner basis of ``I`` for some ``k <= max_power``.
    """
    I = as_ideal(I, f.ring)
    if not f:
        return True
    if f.is_constant():
        return buchberger(I, **caps).is_unit
    gb = buchberger(I, **caps)
    if gb.is_unit or gb._power_member(f, max_power):
        return True
    ring = I.ring
    t = ring.fresh_name("t")
    big = ring.extend([t])
    from .polycore import embed

    gens = [embed(g, big) for g in I.generators]
    gens.append(big.one() - big.var(t) * embed(f, big))
    return buchberger(IdealPresentation(big, gens), **caps).is_unit


def equal_radical(I, J, **caps) -> bool:
    I, J = as_ideal(I), as_ideal(J)
    if I.ring != J.ring:
        raise ValueError("ideals live in different rings")
    return all(radical_member(f, J, **caps) for f in I.generators) and all(
        radical_member(g, I, **caps) for g in J.generators
    )


def _min_hitting_set(sets: list[frozenset], universe: int) -> int:
    """Size of a smallest variable set meeting every set (branch and bound)."""
    sets = sorted(set(sets), key=len)
    # drop supersets: hitting a subset hits the superset
    pruned = []
    for s in sets:
        if not any(q <= s for q in pruned):
            pruned.append(s)
    best = universe

    def search(chosen: frozenset, remaining: list, size: int):
        nonlocal best
        if size >= best:
            return
        open_sets = [s for s in remaining if not (s & chosen)]
        if not open_sets:
            best = size
            return
        # lower bound: greedily pick disjoint open sets
        disjoint, used = 0, frozenset()
        for s in open_sets:
            if not (s & used):
                disjoint += 1
                used |= s
        if size + disjoint >= best:
            return
        pivot = min(open_sets, key=len)
        for v in sorted(pivot):
            search(chosen | {v}, open_sets, size + 1)

    search(frozenset(), pruned, 0)
    return best


def ideal_height(I, **caps) -> int:
    """Height of ``I``: number of variables minus the dimension of its initial ideal.

    The dimension is the largest variable set containing the support of no
    leading monomial, so the height is the size of a smallest variable set
    meeting every leading-monomial support.
    """
    I = as_ideal(I)
    n = I.ring.nvars
    if n > MAX_HEIGHT_VARS:
        raise ResourceCapExceeded("height variable", MAX_HEIGHT_VARS)
    gb = buchberger(I, **caps)
    if gb.is_unit:
        raise ImproperIdeal("the ideal contains 1")
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.leading_monomials()]
    if not supports:
        return 0
    return _min_hitting_set(supports, n)


# --- point oracle (tests only) ------------------------------------------------


def zero_set(I, p: int) -> frozenset:
    """All points of ``V(I)`` over GF(p), by exhaustive enumeration."""
    I = as_ideal(I)
    n = I.ring.nvars
    gens = [g.as_dict() for g in I.generators]
    out = []
    for pt in itertools.product(range(p), repeat=n):
        ok = True
        for g in gens:
            s = 0
            for e, c in g.items():
                term = int(c.numerator) * pow(int(c.denominator), -1, p) if hasattr(c, "numerator") else int(c)
                for x, k in zip(pt, e):
                    if k:
                        term *= pow(x, k, p)
                s += term
            if s % p:
                ok = False
                break
        if ok:
            out.append(pt)
    return frozenset(out)
