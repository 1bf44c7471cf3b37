"""Explicit generators up to radical for ideals of 2-minors.

Every construction returns a ``WitnessSet``: a list of polynomials together
with the ideal they are claimed to generate up to radical. The claim is not
trusted; ``WitnessSet.verify`` runs the Gröbner oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .groebner import IdealPresentation, equal_radical, ideal_member
from .pencil import Block, KWForm, LinMatrix
from .polycore import Field, Polynomial, PolyRing, QQ, embed, format_polynomial

TAGS = (
    "SchmittVogel",
    "BrunsPoset",
    "ScrollSCI",
    "JordanQ",
    "AnKn",
    "SyzygyReduce",
    "NilpotentExtend",
)


class ConditionViolated(ValueError):
    """A Schmitt-Vogel partition fails one of its three conditions."""

    def __init__(self, condition: str, ell: int | None = None, p=None, p2=None, detail: str = ""):
        msg = f"condition ({condition}) violated"
        if ell is not None:
            msg += f" in subset {ell}"
        if p is not None:
            msg += f": no earlier element divides ({p})*({p2})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.condition = condition
        self.ell = ell
        self.p = p
        self.p2 = p2


class SyzygyInvalid(ValueError):
    pass


class PowerNotInSyzygyIdeal(ValueError):
    pass


@dataclass
class WitnessSet:
    polys: tuple
    target: IdealPresentation | None
    tag: str
    verified: bool | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown construction tag {self.tag!r}")
        self.polys = tuple(self.polys)

    @property
    def count(self) -> int:
        return len(self.polys)

    @property
    def ring(self) -> PolyRing | None:
        if self.target is not None:
            return self.target.ring
        return self.polys[0].ring if self.polys else None

    def verify(self, **caps) -> bool:
        """Oracle check of ``sqrt(target) == sqrt(polys)``; records the result."""
        if self.target is None:
            raise ValueError("witness has no target ideal")
        ring = self.target.ring
        if not self.polys:
            ok = not self.target.generators
        elif not self.target.generators:
            ok = all(not p for p in self.polys)
        else:
            ok = equal_radical(self.target, IdealPresentation(ring, self.polys), **caps)
        self.verified = ok
        return ok

    def to_dict(self) -> dict:
        return {
            "construction": self.tag,
            "count": self.count,
            "polynomials": [format_polynomial(p) for p in self.polys],
            "verified": self.verified,
        }

    @classmethod
    def from_dict(cls, data: dict, ring: PolyRing, target: IdealPresentation | None = None) -> "WitnessSet":
        polys = [ring.parse(t) for t in data["polynomials"]]
        if len(polys) != data["count"]:
            raise ValueError("witness count does not match its polynomial list")
        return cls(tuple(polys), target, data["construction"], data.get("verified"))


def minors_ideal(M: LinMatrix) -> IdealPresentation:
    return IdealPresentation(M.ring, M.minors())


# --- Schmitt-Vogel -------------------------------------------------------------


@dataclass
class SVPartition:
    subsets: list
    exponents: dict = field(default_factory=dict)
    ground: tuple | None = None

    def exponent(self, p: Polynomial) -> int:
        return self.exponents.get(p, 1)

    def validate(self) -> None:
        subsets = [list(s) for s in self.subsets]
        if not subsets or any(not s for s in subsets):
            raise ConditionViolated("i", detail="empty subset")
        union = {p for s in subsets for p in s}
        if self.ground is not None and union != set(self.ground):
            raise ConditionViolated("i", detail="subsets do not cover the ground set exactly")
        if len(subsets[0]) != 1:
            raise ConditionViolated("ii", 0, detail=f"first subset has {len(subsets[0])} elements")
        for e in self.exponents.values():
            if int(e) < 1:
                raise ConditionViolated("i", detail="exponents must be positive")
        for ell in range(1, len(subsets)):
            earlier = [q for s in subsets[:ell] for q in s]
            cur = subsets[ell]
            for a in range(len(cur)):
                for b in range(a + 1, len(cur)):
                    p, p2 = cur[a], cur[b]
                    if p == p2:
                        continue
                    prod = p * p2
                    if not any(_divides(q, prod) for q in earlier):
                        raise ConditionViolated("iii", ell, p, p2)


def _divides(q: Polynomial, f: Polynomial) -> bool:
    if q.is_monomial() and f.is_monomial():
        (_, eq), = q.terms
        (_, ef), = f.terms
        return all(x <= y for x, y in zip(eq, ef))
    return ideal_member(f, IdealPresentation(q.ring, [q]))


def schmitt_vogel(partition: SVPartition, target: IdealPresentation | None = None) -> WitnessSet:
    """``q_l = sum of p^e(p)`` over each subset, after validating the partition."""
    partition.validate()
    qs = []
    for s in partition.subsets:
        q = s[0].ring.zero()
        for p in s:
            q = q + p ** partition.exponent(p)
        qs.append(q)
    if target is None:
        ring = partition.subsets[0][0].ring
        target = IdealPresentation(ring, [p for s in partition.subsets for p in s])
    return WitnessSet(tuple(qs), target, "SchmittVogel")


# --- generic matrices and the Bruns poset --------------------------------------


def generic_matrix(n: int, field_: Field = QQ, order: str = "degrevlex") -> LinMatrix:
    """Generic 2 x n matrix with rows ``x1..xn`` and ``x(n+1)..x(2n)``."""
    ring = PolyRing([f"x{i}" for i in range(1, 2 * n + 1)], field_, order)
    g = ring.gens()
    return LinMatrix(ring, (tuple(g[:n]), tuple(g[n:])), 1)


def bruns_delta(j: int, n: int) -> int:
    return (j - n + 1) * (j // n)


def bruns_index_sets(n: int) -> list[list[tuple[int, int]]]:
    """Closed-form index lists: level ``j`` holds the minors ``[a, b]`` summed into ``p_j``."""
    if n < 2:
        raise ValueError("need n >= 2")
    out = []
    for j in range(1, 2 * n - 2):
        d = bruns_delta(j, n)
        top = (j + 1) // 2 - 1 - d
        out.append([(k + 1 + d, j - k + 1 - d) for k in range(top + 1)])
    return out


@dataclass(frozen=True)
class MinorPoset:
    """The 2-minors ``[a,b]`` (``a < b``) of a 2 x n matrix, ordered componentwise."""

    n: int

    def elements(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(1, self.n + 1) for b in range(a + 1, self.n + 1)]

    @staticmethod
    def leq(x: tuple[int, int], y: tuple[int, int]) -> bool:
        return x[0] <= y[0] and x[1] <= y[1]

    def covers(self) -> dict:
        els = self.elements()
        up = {x: [] for x in els}
        for x in els:
            for y in els:
                if x != y and self.leq(x, y):
                    if not any(z not in (x, y) and self.leq(x, z) and self.leq(z, y) for z in els):
                        up[x].append(y)
        return up

    def rank_levels(self) -> list[list[tuple[int, int]]]:
        """Elements grouped by the length of the longest chain from the bottom."""
        up = self.covers()
        rank = {(1, 2): 1}
        frontier = [(1, 2)]
        while frontier:
            nxt = []
            for x in frontier:
                for y in up[x]:
                    if rank.get(y, 0) < rank[x] + 1:
                        rank[y] = rank[x] + 1
                        nxt.append(y)
            frontier = nxt
        levels: dict = {}
        for x, r in rank.items():
            levels.setdefault(r, []).append(x)
        return [sorted(levels[r]) for r in sorted(levels)]

    @property
    def rank(self) -> int:
        return len(self.rank_levels())


def bruns_poset_polys(n: int | None = None, M: LinMatrix | None = None, *, labels: Sequence[int] | None = None) -> WitnessSet:
    """The ``2n-3`` sums of minors along the rank levels of the minor poset.

    With ``M`` given, the minors are those of ``M`` (poset position ``a``
    maps to column label ``labels[a-1]``, default the columns of ``M`` in
    order); otherwise a generic matrix is used.
    """
    if M is None:
        if n is None:
            raise ValueError("give n or a matrix")
        M = generic_matrix(n)
    if labels is None:
        labels = list(M.labels())
    if n is None:
        n = len(labels)
    if n < 2 or len(labels) != n:
        raise ValueError("need n >= 2 columns")
    levels = bruns_index_sets(n)
    if [sorted(lv) for lv in levels] != MinorPoset(n).rank_levels():
        raise AssertionError("closed-form poset levels disagree with the enumeration")
    polys = []
    for lv in levels:
        p = M.ring.zero()
        for a, b in lv:
            p = p + M.minor(labels[a - 1], labels[b - 1])
        polys.append(p)
    target = IdealPresentation(M.ring, [M.minor(labels[a], labels[b]) for a in range(n) for b in range(a + 1, n)])
    return WitnessSet(tuple(polys), target, "BrunsPoset")


# --- single scroll ---------------------------------------------------------------


def scroll_matrix(n: int, names: Sequence[str] | None = None, field_: Field = QQ) -> LinMatrix:
    """The scroll block with ``n + 1`` columns in ``z0..z(n+1)``."""
    names = list(names) if names is not None else [f"z{i}" for i in range(n + 2)]
    ring = PolyRing(names, field_)
    g = ring.gens()
    return LinMatrix(ring, (tuple(g[:-1]), tuple(g[1:])), 0)


def scroll_sci(n: int, M: LinMatrix | None = None, names: Sequence[str] | None = None) -> WitnessSet:
    """``F_1..F_n`` for the rational normal curve block in ``z0..z(n+1)``."""
    if n < 1:
        raise ValueError("need n >= 1")
    if M is None:
        M = scroll_matrix(n)
    ring = M.ring
    zn = list(names) if names is not None else list(M.rows[0]) + [M.rows[1][-1]]
    if not isinstance(zn[0], Polynomial):
        zn = [ring.var(v) for v in zn]
    if len(zn) != n + 2:
        raise ValueError(f"scroll of length {n + 1} needs {n + 2} variables")
    polys = []
    for i in range(1, n + 1):
        f = ring.zero()
        for a in range(i + 1):
            term = (zn[i + 1] ** (i - a)) * zn[a] * (zn[i] ** a)
            f = f + term.scale(ring.field((-1) ** a * comb(i, a)))
        polys.append(f)
    return WitnessSet(tuple(polys), IdealPresentation(ring, M.minors()), "ScrollSCI")


# --- Jordan concatenations --------------------------------------------------------


def jordan_classes(form: KWForm) -> list[list[Block]]:
    """Jordan blocks grouped by eigenvalue, largest classes first (stable)."""
    if any(b.kind != "J" for b in form.blocks):
        raise ValueError("jordan_generators needs a form made of Jordan blocks only")
    classes: dict = {}
    for b in form.blocks:
        classes.setdefault(b.eigenvalue, []).append(b)
    return sorted(classes.values(), key=len, reverse=True)


def jordan_q_partition(form: KWForm) -> SVPartition | None:
    """Antidiagonals of the product matrix of last variables (None when d = 1)."""
    classes = jordan_classes(form)
    d = len(classes)
    if d < 2:
        return None
    ring = form.ring
    last = [[ring.var(b.variables[-1]) for b in cls] for cls in classes]
    cols = [(i, v) for i in range(d - 1) for v in last[i]]
    rows = [(j, v) for j in range(d - 1, 0, -1) for v in last[j]]
    diagonals: dict = {}
    for r, (j, yr) in enumerate(rows):
        for c, (i, yc) in enumerate(cols):
            if i < j:
                diagonals.setdefault(r + c, []).append(yc * yr)
    subsets = [diagonals[k] for k in sorted(diagonals)]
    return SVPartition(subsets)


def jordan_generators(form: KWForm) -> WitnessSet:
    classes = jordan_classes(form)
    ring = form.ring
    polys = [ring.var(v) for cls in classes for b in cls for v in b.variables[:-1]]
    part = jordan_q_partition(form)
    if part is not None:
        polys += list(schmitt_vogel(part).polys)
    return WitnessSet(tuple(polys), IdealPresentation(ring, form.matrix.minors()), "JordanQ")


# --- the A_n family ---------------------------------------------------------------


def an_matrix(n: int, field_: Field = QQ, order: str = "degrevlex") -> LinMatrix:
    """2 x n matrix, columns ``0..n-1``, zero in the top-left and bottom-right corners.

    Top entry of column ``c`` is ``x_c`` (``c >= 1``); bottom entry is
    ``x_(n+c)`` (``c <= n-2``). Variables ``x1..x(2n-2)``.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    ring = PolyRing([f"x{i}" for i in range(1, 2 * n - 1)], field_, order)
    z = ring.zero()
    top = tuple([z] + [ring.var(f"x{c}") for c in range(1, n)])
    bottom = tuple([ring.var(f"x{n + c}") for c in range(n - 1)] + [z])
    return LinMatrix(ring, (top, bottom), 0)


def an_generators(n: int, M: LinMatrix | None = None) -> WitnessSet:
    """``2n-5`` generators of the A_n minor ideal up to radical."""
    if n < 4:
        raise ValueError("need n >= 4")
    if M is None:
        M = an_matrix(n)
    if M.ncols != n:
        raise ValueError("matrix has the wrong number of columns")
    lab = lambda c: M.base + c  # noqa: E731
    q = [None] + [-M.minor(lab(0), lab(i - 1)) - M.minor(lab(i - 1), lab(n - 1)) if i > 1 else -M.minor(lab(0), lab(n - 1)) for i in range(1, n)]
    p = [None] + list(bruns_poset_polys(M=M, labels=[lab(c) for c in range(1, n - 1)]).polys)
    polys = [p[j] for j in range(1, n - 3)]
    polys += [q[i] + p[n - 4 + i] for i in range(1, n - 2)]
    polys += [q[n - 2], q[n - 1]]
    return WitnessSet(tuple(polys), IdealPresentation(M.ring, M.minors()), "AnKn")


def an_monomial_partition(n: int, M: LinMatrix | None = None) -> SVPartition:
    """Schmitt-Vogel partition of the monomials ``q``-terms: ``{x(n-1) x_n}``, then pairs."""
    if M is None:
        M = an_matrix(n)
    top, bottom = M.rows
    first = top[n - 1] * bottom[0]
    subsets = [[first]] + [[top[l] * bottom[0], top[n - 1] * bottom[l]] for l in range(1, n - 1)]
    return SVPartition(subsets)


# --- syzygy reduction, Plücker relations, nilpotent extension ---------------------


def syzygy_reduce(f: Sequence[Polynomial], g: Sequence[Polynomial], h: Sequence[Polynomial], r: int, target: IdealPresentation | None = None) -> WitnessSet:
    """Replace ``k`` generators by ``k-1`` with the same radical.

    Needs a syzygy ``g`` of ``f_1..f_(k-1)`` and ``f_k^r = sum h_i g_i``;
    returns ``q_i = f_k h_i + f_i``.
    """
    k = len(f)
    if k < 2 or len(g) != k - 1 or len(h) != k - 1:
        raise ValueError("need k >= 2 polynomials, k-1 syzygy entries and k-1 coefficients")
    if r < 1:
        raise ValueError("r must be positive")
    ring = f[0].ring
    lift = lambda x: x if isinstance(x, Polynomial) else ring.constant(x)  # noqa: E731
    g = [lift(x) for x in g]
    h = [lift(x) for x in h]
    s = ring.zero()
    for gi, fi in zip(g, f):
        s = s + gi * fi
    if s:
        raise SyzygyInvalid(f"sum g_i f_i = {s} is not zero")
    lhs = f[-1] ** r
    rhs = ring.zero()
    for hi, gi in zip(h, g):
        rhs = rhs + hi * gi
    if lhs != rhs:
        raise PowerNotInSyzygyIdeal(f"f_k^{r} differs from sum h_i g_i by {lhs - rhs}")
    qs = tuple(f[-1] * hi + fi for hi, fi in zip(h, f))
    if target is None:
        target = IdealPresentation(ring, f)
    return WitnessSet(qs, target, "SyzygyReduce")


def plucker_identity(M: LinMatrix, h: int, j1: int, j2: int, j3: int) -> Polynomial:
    return M.minor(h, j1) * M.minor(j2, j3) - M.minor(h, j2) * M.minor(j1, j3) + M.minor(h, j3) * M.minor(j1, j2)


def plucker_syzygy(M: LinMatrix, h: int, a: int, b: int, c: int) -> tuple[list, list]:
    """``f = ([a,h],[b,h],[c,h])`` with its syzygy ``([b,c], -[a,c], [a,b])``."""
    f = [M.minor(a, h), M.minor(b, h), M.minor(c, h)]
    g = [M.minor(b, c), -M.minor(a, c), M.minor(a, b)]
    return f, g


def koszul_syzygy(fi: Polynomial, fj: Polynomial) -> tuple[Polynomial, Polynomial]:
    return fj, -fi


def nilpotent_extend(base: WitnessSet | None, block: Block, ring: PolyRing | None = None, target: IdealPresentation | None = None) -> WitnessSet:
    """Append the variables of a nilpotent block to a witness."""
    if block.kind != "N" or block.variables is None:
        raise ValueError("need a nilpotent block with named variables")
    if ring is None:
        if base is not None and base.ring is not None:
            ring = base.ring
            if any(v not in ring.index for v in block.variables):
                ring = ring.extend(block.variables)
        else:
            ring = PolyRing(block.variables, QQ)
    base_polys = [] if base is None else [embed(p, ring) for p in base.polys]
    used = {v for p in base_polys for v in p.variables()}
    clash = used & set(block.variables)
    if clash:
        raise ValueError(f"variable collision: {sorted(clash)}")
    polys = base_polys + [ring.var(v) for v in block.variables]
    return WitnessSet(tuple(polys), target, "NilpotentExtend")
