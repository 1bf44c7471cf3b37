"""Kronecker-Weierstrass normal forms of 2 x n matrices of linear forms.

A 2 x n matrix of linear forms in m variables is the same data as a pencil
``s*A + t*B`` of n x m scalar matrices: ``A[c][k]`` is the coefficient of
variable ``k`` in the top entry of column ``c`` and ``B`` holds the bottom
row. Row operations on the matrix act on ``(A, B)`` through GL(2), column
operations by left multiplication and linear changes of variables by right
multiplication. The decomposition below is the classical one: split off
right minimal indices (scroll blocks), then left minimal indices (nilpotent
blocks), then bring the regular part to Jordan form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .polycore import Field, Polynomial, PolyRing, QQ, substitute_linear


class EigenvaluesNotInField(ValueError):
    """The regular part has an eigenvalue outside the coefficient field."""

    def __init__(self, factor: str):
        super().__init__(f"pencil has an irreducible eigenvalue factor {factor} of degree > 1")
        self.factor = factor


class BlockSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Block:
    """One canonical block: ``kind`` is ``"N"``, ``"J"`` or ``"B"``.

    ``size`` is the number of variables for nilpotent blocks (``size + 1``
    columns; ``size == 0`` is a zero column), the length for Jordan blocks and
    the length for scroll blocks (``size + 1`` variables).
    """

    kind: str
    size: int
    eigenvalue: object = None
    variables: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("N", "J", "B"):
            raise ValueError(f"unknown block kind {self.kind!r}")
        minimum = 0 if self.kind == "N" else 1
        if self.size < minimum:
            raise ValueError(f"{self.kind} block needs size >= {minimum}")
        if self.kind == "J" and self.eigenvalue is None:
            raise ValueError("Jordan block needs an eigenvalue")
        if self.variables is not None and len(self.variables) != self.nvars:
            raise ValueError(f"{self.label()} needs {self.nvars} variables")

    @property
    def ncols(self) -> int:
        return self.size + 1 if self.kind == "N" else self.size

    @property
    def nvars(self) -> int:
        return self.size + 1 if self.kind == "B" else self.size

    def label(self, F: Field | None = None) -> str:
        if self.kind == "J":
            lam = F.format(self.eigenvalue) if F is not None else str(self.eigenvalue)
            return f"J({lam},{self.size})"
        return f"{self.kind}({self.size})"

    def with_variables(self, names: Sequence[str]) -> "Block":
        return Block(self.kind, self.size, self.eigenvalue, tuple(names))


@dataclass(frozen=True)
class LinMatrix:
    """A 2 x n matrix of linear forms; ``base`` is the first column label."""

    ring: PolyRing
    rows: tuple
    base: int = 1

    def __post_init__(self):
        top, bottom = self.rows
        if len(top) != len(bottom) or not top:
            raise ValueError("a 2 x n matrix needs two rows of equal positive length")
        for e in top + bottom:
            if e.ring != self.ring:
                raise ValueError("matrix entries must share the ring")
            if not e.is_linear_form():
                raise ValueError(f"entry {e} is not a linear form")

    @classmethod
    def from_rows(cls, ring: PolyRing, top, bottom, base: int = 1) -> "LinMatrix":
        conv = [
            tuple(e if isinstance(e, Polynomial) else ring.parse(str(e)) for e in row)
            for row in (top, bottom)
        ]
        return cls(ring, (conv[0], conv[1]), base)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def labels(self) -> range:
        return range(self.base, self.base + self.ncols)

    def column(self, label: int) -> tuple:
        i = self._index(label)
        return self.rows[0][i], self.rows[1][i]

    def _index(self, label: int) -> int:
        i = label - self.base
        if not 0 <= i < self.ncols:
            raise IndexError(f"column {label} out of range {self.base}..{self.base + self.ncols - 1}")
        return i

    def minor(self, i: int, j: int) -> Polynomial:
        a, b = self._index(i), self._index(j)
        top, bottom = self.rows
        return top[a] * bottom[b] - top[b] * bottom[a]

    def minors(self) -> list[Polynomial]:
        labels = list(self.labels())
        return [self.minor(a, b) for k, a in enumerate(labels) for b in labels[k + 1 :]]

    def coefficient_matrices(self) -> tuple[list[list], list[list]]:
        return (
            [e.linear_coefficients() for e in self.rows[0]],
            [e.linear_coefficients() for e in self.rows[1]],
        )

    def with_base(self, base: int) -> "LinMatrix":
        return LinMatrix(self.ring, self.rows, base)

    def __str__(self):
        cells = [[str(e) for e in row] for row in self.rows]
        widths = [max(len(cells[0][c]), len(cells[1][c])) for c in range(self.ncols)]
        return "\n".join(
            "[ " + " | ".join(s.rjust(w) for s, w in zip(row, widths)) + " ]" for row in cells
        )


def matrix_from_coefficients(ring: PolyRing, A: list[list], B: list[list], base: int = 1) -> LinMatrix:
    gens = ring.gens()
    zero = ring.zero()

    def form(row):
        out = zero
        for c, g in zip(row, gens):
            if c:
                out = out + g.scale(c)
        return out

    return LinMatrix(ring, (tuple(form(r) for r in A), tuple(form(r) for r in B)), base)


def block_columns(block: Block, ring: PolyRing) -> list[tuple[Polynomial, Polynomial]]:
    """The columns of one canonical block in the given ring."""
    if block.variables is None:
        raise ValueError(f"{block.label()} has no variables assigned")
    v = [ring.var(name) for name in block.variables]
    zero = ring.zero()
    k = block.size
    if block.kind == "N":
        top = v + [zero]
        bottom = [zero] + v
    elif block.kind == "J":
        lam = ring.field(block.eigenvalue)
        top = v
        bottom = [v[0].scale(lam)] + [v[h - 1] + v[h].scale(lam) for h in range(1, k)]
    else:
        top = v[:k]
        bottom = v[1:]
    return list(zip(top, bottom))


def name_blocks(blocks: Sequence[Block]) -> list[Block]:
    """Assign fresh variable names: ``x<i>_<h>``, ``y<j>_<h>``, ``z<p>_<h>``."""
    counters = {"N": 0, "J": 0, "B": 0}
    stems = {"N": "x", "J": "y", "B": "z"}
    out = []
    for b in blocks:
        counters[b.kind] += 1
        i = counters[b.kind]
        if b.kind == "B":
            names = [f"z{i}_{h}" for h in range(b.size + 1)]
        else:
            names = [f"{stems[b.kind]}{i}_{h}" for h in range(1, b.size + 1)]
        out.append(b.with_variables(names))
    return out


def make_block(block: Block, ring: PolyRing | None = None) -> LinMatrix:
    if block.variables is None:
        block = name_blocks([block])[0]
    return concat([block], ring)


def concat(blocks: Sequence[Block], ring: PolyRing | None = None, base: int = 1) -> LinMatrix:
    """Horizontal concatenation of canonical blocks."""
    if not blocks:
        raise ValueError("need at least one block")
    if any(b.variables is None for b in blocks):
        blocks = name_blocks(blocks)
    seen: set = set()
    for b in blocks:
        clash = seen.intersection(b.variables)
        if clash:
            raise ValueError(f"variable collision between blocks: {sorted(clash)}")
        seen.update(b.variables)
    if ring is None:
        ring = PolyRing([n for b in blocks for n in b.variables], QQ)
    cols = [c for b in blocks for c in block_columns(b, ring)]
    return LinMatrix(ring, (tuple(c[0] for c in cols), tuple(c[1] for c in cols)), base)


@dataclass(frozen=True)
class Certificate:
    """``row_mix`` (2x2), ``col_mix`` (n x n) and ``substitution`` (m x m).

    ``substitution[k][j]`` is the coefficient of target variable ``j`` in the
    image of source variable ``k``. The certificate claims
    ``row_mix * source(substitution) * col_mix == target``.
    """

    row_mix: tuple
    col_mix: tuple
    substitution: tuple


def _freeze(M) -> tuple:
    return tuple(tuple(r) for r in M)


def apply_certificate(cert: Certificate, source: LinMatrix, target_ring: PolyRing) -> LinMatrix:
    if source.ring.nvars != len(cert.substitution):
        raise ValueError("substitution does not match the source ring")
    gens = target_ring.gens()
    images = {}
    for name, row in zip(source.ring.names, cert.substitution):
        img = target_ring.zero()
        for c, g in zip(row, gens):
            if c:
                img = img + g.scale(c)
        images[name] = img
    subst = [
        [substitute_linear(e, images, target_ring) for e in row] for row in source.rows
    ]
    (a, b), (c, d) = cert.row_mix
    mixed = [
        [x.scale(a) + y.scale(b) for x, y in zip(subst[0], subst[1])],
        [x.scale(c) + y.scale(d) for x, y in zip(subst[0], subst[1])],
    ]
    n = source.ncols
    out = []
    for row in mixed:
        new = []
        for j in range(n):
            s = target_ring.zero()
            for i in range(n):
                w = cert.col_mix[i][j]
                if w:
                    s = s + row[i].scale(w)
            new.append(s)
        out.append(tuple(new))
    return LinMatrix(target_ring, (out[0], out[1]), source.base)


def certificate_holds(cert: Certificate, source: LinMatrix, target: LinMatrix) -> bool:
    F = target.ring.field
    try:
        if source.ncols != target.ncols or len(cert.col_mix) != source.ncols:
            return False
        if len(cert.substitution) != source.ring.nvars:
            return False
        if any(len(r) != target.ring.nvars for r in cert.substitution):
            return False
        for M in (cert.row_mix, cert.col_mix, cert.substitution):
            if not la.is_invertible(F, [list(r) for r in M]):
                return False
        image = apply_certificate(cert, source, target.ring)
    except (ValueError, ZeroDivisionError, KeyError):
        return False
    return image.rows == target.rows


@dataclass(frozen=True)
class KWForm:
    blocks: tuple
    matrix: LinMatrix
    certificate: Certificate

    @property
    def ring(self) -> PolyRing:
        return self.matrix.ring

    def labels(self) -> list[str]:
        return [b.label(self.ring.field) for b in self.blocks]

    def spec(self) -> str:
        return " ".join(self.labels())


def form_from_blocks(blocks: Sequence[Block], field_: Field = QQ, order: str = "degrevlex") -> KWForm:
    """A KW form built directly from blocks, with the identity certificate."""
    if any(b.variables is None for b in blocks):
        blocks = name_blocks(blocks)
    ring = PolyRing([n for b in blocks for n in b.variables], field_, order)
    blocks = [
        Block(b.kind, b.size, field_(b.eigenvalue), b.variables) if b.kind == "J" else b
        for b in blocks
    ]
    matrix = concat(blocks, ring)
    F = field_
    cert = Certificate(
        _freeze(la.identity(F, 2)),
        _freeze(la.identity(F, matrix.ncols)),
        _freeze(la.identity(F, ring.nvars)),
    )
    return KWForm(tuple(blocks), matrix, cert)


def verify_certificate(form: KWForm, original: LinMatrix) -> bool:
    return certificate_holds(form.certificate, original, form.matrix)


_BLOCK_TOKEN = re.compile(
    r"^(?:N\((?P<n>-?\d+)\)|B\((?P<b>-?\d+)\)|J\((?P<lam>-?\d+(?:/\d+)?),(?P<m>-?\d+)\))$"
)


def parse_blocks(text: str) -> list[Block]:
    """Parse ``N(k) J(lambda,m) B(l)`` tokens (whitespace separated)."""
    tokens = text.replace(", ", ",").split()
    if not tokens:
        raise BlockSpecError("empty block specification")
    out = []
    for tok in tokens:
        m = _BLOCK_TOKEN.match(tok)
        if not m:
            raise BlockSpecError(f"malformed block token {tok!r}")
        try:
            if m.group("n") is not None:
                out.append(Block("N", int(m.group("n"))))
            elif m.group("b") is not None:
                out.append(Block("B", int(m.group("b"))))
            else:
                out.append(Block("J", int(m.group("m")), Fraction(m.group("lam"))))
        except ValueError as exc:
            raise BlockSpecError(f"{tok}: {exc}") from None
    return name_blocks(out)


# --- invariants -----------------------------------------------------------


@dataclass(frozen=True)
class KWInvariants:
    nilpotent_sizes: tuple  # variables per nilpotent block (block length minus one)
    scroll_lengths: tuple
    jordan_classes: tuple  # per eigenvalue class: (eigenvalue, lengths descending)
    ncols: int

    @property
    def c(self) -> int:
        return len(self.nilpotent_sizes)

    @property
    def nilpotent_lengths(self) -> tuple:
        return tuple(k + 1 for k in self.nilpotent_sizes)

    @property
    def g(self) -> int:
        return len(self.scroll_lengths)

    @property
    def d(self) -> int:
        return len(self.jordan_classes)

    @property
    def alphas(self) -> tuple:
        return tuple(len(lengths) for _, lengths in self.jordan_classes)

    @property
    def alpha(self) -> int:
        return sum(self.alphas)

    @property
    def gamma(self) -> int:
        return max(self.alphas, default=0)

    @property
    def jordan_vars(self) -> int:
        return sum(sum(lengths) for _, lengths in self.jordan_classes)

    def jordan_partitions(self) -> list:
        """Per-class length partitions, sorted, ignoring eigenvalue labels."""
        return sorted(tuple(lengths) for _, lengths in self.jordan_classes)


def kw_invariants(form: KWForm) -> KWInvariants:
    classes: dict = {}
    for b in form.blocks:
        if b.kind == "J":
            classes.setdefault(b.eigenvalue, []).append(b.size)
    return KWInvariants(
        nilpotent_sizes=tuple(sorted((b.size for b in form.blocks if b.kind == "N"), reverse=True)),
        scroll_lengths=tuple(sorted((b.size for b in form.blocks if b.kind == "B"), reverse=True)),
        jordan_classes=tuple((lam, tuple(sorted(ls, reverse=True))) for lam, ls in classes.items()),
        ncols=form.matrix.ncols,
    )


# --- decomposition ---------------------------------------------------------


def _normal_rank(F: Field, A: list[list], B: list[list], p: int, q: int) -> int:
    if p == 0 or q == 0:
        return 0
    best = 0
    for t in range(min(p, q) + 1):
        best = max(best, la.rank(F, la.combine(F, F.one, A, F(t), B)))
        if best == min(p, q):
            break
    return best


def _minimal_null_vector(F: Field, A, B, p: int, q: int):
    """Smallest-degree ``v_0..v_eps`` with ``A v_0 = 0``, ``A v_j = -B v_(j-1)``, ``B v_eps = 0``."""
    for eps in range(p + 1):
        rows = []
        for j in range(eps + 2):
            for i in range(p):
                row = [F.zero] * ((eps + 1) * q)
                if j <= eps:
                    row[j * q : (j + 1) * q] = A[i]
                if j >= 1:
                    row[(j - 1) * q : j * q] = B[i]
                rows.append(row)
        if p == 0:
            rows = []
        basis = la.nullspace(F, rows, (eps + 1) * q)
        if basis:
            v = basis[0]
            return eps, [v[j * q : (j + 1) * q] for j in range(eps + 1)]
    raise RuntimeError("no null vector found although the normal rank is deficient")


def _block_diag(F: Field, a: list[list], b: list[list]) -> list[list]:
    n1, n2 = len(a), len(b)
    out = la.zeros(F, n1 + n2, n1 + n2)
    for i in range(n1):
        out[i][:n1] = a[i]
    for i in range(n2):
        out[n1 + i][n1:] = b[i]
    return out


def _extract_right(F: Field, A, B):
    """Split one minimal right block ``L_eps`` off the pencil, or return None."""
    p = len(A)
    q = len(A[0]) if A else 0
    if q == 0:
        return None
    if p == 0:
        return 0, [], la.identity(F, q)
    if _normal_rank(F, A, B, p, q) == q:
        return None
    eps, v = _minimal_null_vector(F, A, B, p, q)
    u = [v[eps - k] if k % 2 == 0 else [F.neg(x) for x in v[eps - k]] for k in range(eps + 1)]
    r = [la.matvec(F, A, u[k]) for k in range(eps)]
    U = la.transpose(la.extend_to_basis(F, u, q))
    Rm = la.transpose(la.extend_to_basis(F, r, p))
    Rinv = la.inverse(F, Rm)
    A1 = la.matmul(F, la.matmul(F, Rinv, A), U)
    B1 = la.matmul(F, la.matmul(F, Rinv, B), U)
    e1, f1 = eps, eps + 1
    p2, q2 = p - e1, q - f1
    if e1 and q2:
        nx, ny = e1 * p2, f1 * q2
        rows, rhs = [], []
        for M1 in (A1, B1):
            for i in range(e1):
                for j in range(q2):
                    row = [F.zero] * (nx + ny)
                    for l in range(p2):
                        row[i * p2 + l] = M1[e1 + l][f1 + j]
                    for k in range(f1):
                        row[nx + k * q2 + j] = M1[i][k]
                    rows.append(row)
                    rhs.append(M1[i][f1 + j])
        sol = la.solve(F, rows, rhs)
        if sol is None:
            raise RuntimeError("could not decouple a scroll block")
        X = [[sol[i * p2 + l] for l in range(p2)] for i in range(e1)]
        Y = [[sol[nx + k * q2 + j] for j in range(q2)] for k in range(f1)]
        Prow = la.identity(F, p)
        for i in range(e1):
            for l in range(p2):
                Prow[i][e1 + l] = F.neg(X[i][l])
        Qcol = la.identity(F, q)
        for k in range(f1):
            for j in range(q2):
                Qcol[k][f1 + j] = F.neg(Y[k][j])
        Psub = la.matmul(F, Prow, Rinv)
        Qsub = la.matmul(F, U, Qcol)
    else:
        Psub, Qsub = Rinv, U
    return eps, Psub, Qsub


def _sub(M, r0, c0):
    return [row[c0:] for row in M[r0:]]


@dataclass
class _Layout:
    P: list
    Q: list
    right: list = field(default_factory=list)  # (eps, row0, col0)
    left: list = field(default_factory=list)  # (eta, row0, col0)
    reg_row: int = 0
    reg_col: int = 0


def _singular_split(F: Field, A, B) -> _Layout:
    n, m = len(A), len(A[0])
    P, Q = la.identity(F, n), la.identity(F, m)
    lay = _Layout(P, Q)
    r0 = c0 = 0

    def current():
        return (
            la.matmul(F, la.matmul(F, lay.P, A), lay.Q),
            la.matmul(F, la.matmul(F, lay.P, B), lay.Q),
        )

    while True:
        Ac, Bc = current()
        res = _extract_right(F, _sub(Ac, r0, c0), _sub(Bc, r0, c0))
        if res is None:
            break
        eps, Ps, Qs = res
        lay.P = la.matmul(F, _block_diag(F, la.identity(F, r0), Ps) if Ps else la.identity(F, n), lay.P)
        lay.Q = la.matmul(F, lay.Q, _block_diag(F, la.identity(F, c0), Qs))
        lay.right.append((eps, r0, c0))
        r0 += eps
        c0 += eps + 1
    while r0 < n:
        if c0 == m:
            # no variables left: every remaining row is a zero column of the matrix
            res = (0, [], la.identity(F, n - r0))
        else:
            Ac, Bc = current()
            res = _extract_right(F, la.transpose(_sub(Ac, r0, c0)), la.transpose(_sub(Bc, r0, c0)))
        if res is None:
            break
        eta, Ps, Qs = res
        rowT = la.transpose(Qs)
        colT = la.transpose(Ps) if Ps else la.identity(F, m - c0)
        lay.P = la.matmul(F, _block_diag(F, la.identity(F, r0), rowT), lay.P)
        lay.Q = la.matmul(F, lay.Q, _block_diag(F, la.identity(F, c0), colT))
        lay.left.append((eta, r0, c0))
        r0 += eta + 1
        c0 += eta
    lay.reg_row, lay.reg_col = r0, c0
    if n - r0 != m - c0:
        raise RuntimeError("regular part is not square")
    return lay


def _row_mix_candidates(F: Field):
    yield (F.one, F.zero)
    for k in range(1, 50):
        for s in (k, -k):
            try:
                yield (F.one, F(s))
            except ZeroDivisionError:
                continue
    yield (F.zero, F.one)


def _eigenvalues(F: Field, T: list[list]) -> list[tuple[object, int]]:
    from sympy import Poly, Rational, symbols

    coeffs = la.charpoly(F, T)
    x = symbols("x")
    high_first = list(reversed(coeffs))
    if F.characteristic == 0:
        poly = Poly([Rational(c.numerator, c.denominator) for c in high_first], x, domain="QQ")
    else:
        poly = Poly([int(c) for c in high_first], x, modulus=F.characteristic)
    _, factors = poly.factor_list()
    roots = []
    for fac, mult in factors:
        if fac.degree() > 1:
            raise EigenvaluesNotInField(str(fac.as_expr()))
        a, b = fac.all_coeffs()
        if F.characteristic == 0:
            lam = Fraction(int((-b / a).p), int((-b / a).q))
        else:
            lam = F.div(F(-int(b)), F(int(a)))
        roots.append((F(lam), mult))
    return roots


def _jordan_chains(F: Field, T: list[list], lam, multiplicity: int) -> list[list]:
    """Chains ``[g, N g, ..., N^(l-1) g]`` for ``N = T - lam``, longest first."""
    r = len(T)
    N = [[F.sub(T[i][j], lam if i == j else F.zero) for j in range(r)] for i in range(r)]
    kernels = [[]]
    power = la.identity(F, r)
    while len(kernels[-1]) < multiplicity:
        power = la.matmul(F, N, power)
        K = la.nullspace(F, power, r)
        if len(K) == len(kernels[-1]):
            raise RuntimeError("generalized eigenspace stalled")
        kernels.append(K)
    chains: list[list] = []
    for level in range(len(kernels) - 1, 0, -1):
        span = list(kernels[level - 1])
        for chain in chains:
            span.append(chain[len(chain) - level])
        have = la.rank(F, span) if span else 0
        for x in kernels[level]:
            if la.rank(F, span + [x]) > have:
                span.append(x)
                have += 1
                chain = [x]
                for _ in range(level - 1):
                    chain.append(la.matvec(F, N, chain[-1]))
                chains.append(chain)
    return chains


def _single(e: Polynomial):
    """``(variable index, coefficient)`` if ``e`` is a nonzero multiple of one variable."""
    if len(e) != 1:
        return None
    (c, exps), = e.terms
    return exps.index(1), c


def _recognize(M: LinMatrix):
    """Read ``M`` as a concatenation of canonical blocks, or return None.

    Returns a list of ``(Block, column indices, variable indices)``.
    """
    F = M.ring.field
    top, bottom = M.rows
    n = M.ncols
    out = []
    used: set = set()
    c = 0
    while c < n:
        t, b = top[c], bottom[c]
        st, sb = _single(t), _single(b)
        if not t and not b:
            out.append((Block("N", 0), [c], []))
            c += 1
            continue
        if st is None or st[1] != F.one:
            return None
        if not b:
            # nilpotent: (v1,0), (v2,v1), ..., (0,vk)
            vs = [st[0]]
            c2 = c + 1
            while c2 < n:
                s2t, s2b = _single(top[c2]), _single(bottom[c2])
                if s2b != (vs[-1], F.one):
                    return None
                if not top[c2]:
                    break
                if s2t is None or s2t[1] != F.one:
                    return None
                vs.append(s2t[0])
                c2 += 1
            else:
                return None
            out.append((Block("N", len(vs)), list(range(c, c2 + 1)), vs))
            c = c2 + 1
        elif sb is not None and sb[0] == st[0]:
            lam = sb[1]
            vs = [st[0]]
            c2 = c + 1
            while c2 < n:
                s2t = _single(top[c2])
                if s2t is None or s2t[1] != F.one or s2t[0] in vs:
                    break
                w = M.ring.var(M.ring.names[vs[-1]]) + top[c2].scale(lam)
                if bottom[c2] != w:
                    break
                vs.append(s2t[0])
                c2 += 1
            out.append((Block("J", len(vs), lam), list(range(c, c2)), vs))
            c = c2
        elif sb is not None and sb[1] == F.one:
            vs = [st[0], sb[0]]
            c2 = c + 1
            while c2 < n:
                s2t, s2b = _single(top[c2]), _single(bottom[c2])
                if s2t != (vs[-1], F.one) or s2b is None or s2b[1] != F.one or s2b[0] in vs:
                    break
                vs.append(s2b[0])
                c2 += 1
            out.append((Block("B", len(vs) - 1), list(range(c, c2)), vs))
            c = c2
        else:
            return None
        if used.intersection(out[-1][2]) or len(set(out[-1][2])) != len(out[-1][2]):
            return None
        used.update(out[-1][2])
    return out


def _assemble(M: LinMatrix, C, P, Q, blocks) -> KWForm:
    """Build the form for ``blocks`` (unnamed) from transforms ``C``, ``P``, ``Q``."""
    F = M.ring.field
    blocks = name_blocks(blocks)
    nfree = M.ring.nvars - sum(b.nvars for b in blocks)
    names = [v for blk in blocks for v in blk.variables] + [f"u{k + 1}" for k in range(nfree)]
    canon_ring = PolyRing(names, F, M.ring.order)
    canon = concat(blocks, canon_ring, base=M.base)
    cert = Certificate(_freeze(C), _freeze(la.transpose(P)), _freeze(Q))
    form = KWForm(tuple(blocks), canon, cert)
    if not verify_certificate(form, M):
        raise RuntimeError("internal error: decomposition certificate does not verify")
    return form


def _canonical_fast_path(M: LinMatrix):
    found = _recognize(M)
    if found is None:
        return None
    F = M.ring.field
    classes: dict = {}

    def key(item):
        blk = item[0]
        if blk.kind == "N":
            return (0, -blk.size)
        if blk.kind == "J":
            return (1, classes.setdefault(blk.eigenvalue, len(classes)), -blk.size)
        return (2, -blk.size)

    for item in found:
        key(item)
    found.sort(key=key)
    col_order = [c for _, cols, _ in found for c in cols]
    var_order = [v for _, _, vs in found for v in vs]
    var_order += [k for k in range(M.ring.nvars) if k not in set(var_order)]
    n, m = M.ncols, M.ring.nvars
    P = [[F.one if col_order[i] == j else F.zero for j in range(n)] for i in range(n)]
    Q = [[F.one if var_order[j] == k else F.zero for j in range(m)] for k in range(m)]
    return _assemble(M, la.identity(F, 2), P, Q, [blk for blk, _, _ in found])


def kw_decompose(M: LinMatrix) -> KWForm:
    """Kronecker-Weierstrass form of ``M`` with a checked certificate.

    Blocks come out as nilpotent (longest first), Jordan (eigenvalue classes
    in the order found, lengths descending), then scroll (longest first).
    Raises ``EigenvaluesNotInField`` when the regular part does not split
    over the coefficient field.
    """
    ring = M.ring
    F = ring.field
    A0, B0 = M.coefficient_matrices()
    n, m = M.ncols, ring.nvars
    if m == 0:
        raise ValueError("matrix over a ring without variables")
    fast = _canonical_fast_path(M)
    if fast is not None:
        return fast

    lay = _singular_split(F, A0, B0)
    mix = (F.one, F.zero)
    size = n - lay.reg_row
    if size:
        Ac = la.matmul(F, la.matmul(F, lay.P, A0), lay.Q)
        Bc = la.matmul(F, la.matmul(F, lay.P, B0), lay.Q)
        Ar, Br = _sub(Ac, lay.reg_row, lay.reg_col), _sub(Bc, lay.reg_row, lay.reg_col)
        for a, b in _row_mix_candidates(F):
            if la.det(F, la.combine(F, a, Ar, b, Br)):
                mix = (a, b)
                break
        else:
            raise RuntimeError("no row combination makes the regular part invertible")
    a, b = mix
    C = [[a, b], [F.zero, F.one]] if a else [[F.zero, F.one], [F.one, F.zero]]
    A = la.combine(F, C[0][0], A0, C[0][1], B0)
    B = la.combine(F, C[1][0], A0, C[1][1], B0)
    if mix != (F.one, F.zero):
        lay = _singular_split(F, A, B)

    P, Q = lay.P, lay.Q
    jordan: list[tuple[object, int, int, int]] = []  # (lambda, length, row0, col0)
    if size:
        Ac = la.matmul(F, la.matmul(F, P, A), Q)
        Bc = la.matmul(F, la.matmul(F, P, B), Q)
        Ar, Br = _sub(Ac, lay.reg_row, lay.reg_col), _sub(Bc, lay.reg_row, lay.reg_col)
        Ainv = la.inverse(F, Ar)
        T = la.matmul(F, Ainv, Br)
        cols = []
        for lam, mult in _eigenvalues(F, T):
            for chain in _jordan_chains(F, T, lam, mult):
                jordan.append((lam, len(chain), lay.reg_row + len(cols), lay.reg_col + len(cols)))
                cols.extend(chain)
        Qr = la.transpose(cols)
        Pr = la.matmul(F, la.inverse(F, Qr), Ainv)
        P = la.matmul(F, _block_diag(F, la.identity(F, lay.reg_row), Pr), P)
        Q = la.matmul(F, Q, _block_diag(F, la.identity(F, lay.reg_col), Qr))

    # normalized block order: nilpotent, Jordan by class, scroll; free variables last
    pieces = []  # (sort key, Block, rows, cols)
    for eta, r0, c0 in lay.left:
        pieces.append(((0, -eta), Block("N", eta), list(range(r0, r0 + eta + 1)), list(range(c0, c0 + eta))))
    class_order: dict = {}
    for lam, length, r0, c0 in jordan:
        cls = class_order.setdefault(lam, len(class_order))
        rows = list(range(r0, r0 + length))
        pieces.append(((1, cls, -length), Block("J", length, lam), rows, list(range(c0, c0 + length))))
    free_cols = []
    for eps, r0, c0 in lay.right:
        if eps == 0:
            free_cols.append(c0)
        else:
            pieces.append(((2, -eps), Block("B", eps), list(range(r0, r0 + eps)), list(range(c0, c0 + eps + 1))))
    pieces.sort(key=lambda item: item[0])

    row_order = [r for _, _, rows, _ in pieces for r in rows]
    col_order = [c for _, _, _, cs in pieces for c in cs] + free_cols
    P = [P[r] for r in row_order]
    Q = [[row[c] for c in col_order] for row in Q]
    return _assemble(M, C, P, Q, [blk for _, blk, _, _ in pieces])
