"""Exact sparse multivariate polynomials over the rationals and prime fields."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class RingMismatch(ValueError):
    pass


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, column: int | None = None):
        super().__init__(message if column is None else f"{message} (column {column})")
        self.column = column


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class Field:
    """Base class for coefficient fields.

    Elements are plain Python objects (``Fraction`` for the rationals, ``int``
    residues for prime fields); the field object carries the arithmetic.
    """

    characteristic: int

    def __call__(self, value):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def format(self, a) -> str:
        raise NotImplementedError


class RationalField(Field):
    characteristic = 0

    def __call__(self, value):
        if isinstance(value, str):
            return Fraction(value.strip())
        return Fraction(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def format(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField(Field):
    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    def __call__(self, value):
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"{value} has no image in GF({self.p})")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def format(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_for(characteristic: int) -> Field:
    return QQ if characteristic == 0 else PrimeField(characteristic)


ORDERS = ("degrevlex", "lex")


def order_key(order: str):
    """Sort key turning exponent tuples into natively comparable tuples."""
    if order == "degrevlex":
        return lambda e: (sum(e), tuple(-x for x in reversed(e)))
    if order == "lex":
        return lambda e: e
    raise ValueError(f"unknown monomial order {order!r}")


class PolyRing:
    """Ordered variable names, a coefficient field and a monomial order."""

    def __init__(self, names: Sequence[str], field: Field = QQ, order: str = "degrevlex"):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if order not in ORDERS:
            raise ValueError(f"unknown monomial order {order!r}")
        self.names = names
        self.field = field
        self.order = order
        self.nvars = len(names)
        self.index = {name: i for i, name in enumerate(names)}
        self.key = order_key(order)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.names == other.names
            and self.field == other.field
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.names, self.field, self.order))

    def __repr__(self):
        return f"PolyRing({list(self.names)}, {self.field!r}, {self.order!r})"

    def with_order(self, order: str) -> "PolyRing":
        return PolyRing(self.names, self.field, order)

    def extend(self, names: Iterable[str]) -> "PolyRing":
        return PolyRing(self.names + tuple(names), self.field, self.order)

    def fresh_name(self, stem: str = "t") -> str:
        name, k = stem, 0
        while name in self.index:
            k += 1
            name = f"{stem}{k}"
        return name

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "Polynomial":
        if name not in self.index:
            raise KeyError(f"unknown variable {name!r}")
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    def gens(self) -> list["Polynomial"]:
        return [self.var(n) for n in self.names]

    def monomial(self, exponents: Sequence[int], coeff=1) -> "Polynomial":
        if len(exponents) != self.nvars:
            raise ValueError("exponent vector length does not match the ring")
        c = self.field(coeff)
        return Polynomial(self, {tuple(exponents): c} if c else {})

    def linear_form(self, coeffs: Mapping[str, object]) -> "Polynomial":
        terms = {}
        for name, c in coeffs.items():
            c = self.field(c)
            if c:
                e = [0] * self.nvars
                e[self.index[name]] = 1
                terms[tuple(e)] = c
        return Polynomial(self, terms)

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)


class Polynomial:
    """Immutable sparse polynomial; terms are kept as ``{exponents: coeff}``."""

    __slots__ = ("ring", "_terms", "_sorted", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self._terms = terms
        self._sorted = None
        self._hash = None

    @property
    def terms(self) -> tuple:
        """``(coeff, exponents)`` pairs, strictly descending in the ring order."""
        if self._sorted is None:
            key = self.ring.key
            self._sorted = tuple(
                (self._terms[e], e) for e in sorted(self._terms, key=key, reverse=True)
            )
        return self._sorted

    def as_dict(self) -> dict:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def is_linear_form(self) -> bool:
        return all(sum(e) == 1 for e in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def variables(self) -> list[str]:
        used = set()
        for e in self._terms:
            used.update(i for i, x in enumerate(e) if x)
        return [self.ring.names[i] for i in sorted(used)]

    def leading_term(self):
        return self.terms[0] if self._terms else None

    def leading_monomial(self):
        return self.terms[0][1] if self._terms else None

    def leading_coefficient(self):
        return self.terms[0][0] if self._terms else self.ring.field.zero

    def coefficient(self, exponents) -> object:
        return self._terms.get(tuple(exponents), self.ring.field.zero)

    def linear_coefficients(self) -> list:
        """Coefficient of each ring variable; requires a linear form."""
        if not self.is_linear_form():
            raise ValueError(f"{self} is not a linear form")
        out = [self.ring.field.zero] * self.ring.nvars
        for e, c in self._terms.items():
            out[e.index(1)] = c
        return out

    def _check(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.ring.constant(other)
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring!r} vs {other.ring!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        F = self.ring.field
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = F.add(out[e], c) if e in out else c
            if s:
                out[e] = s
            else:
                del out[e]
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.ring.field
        return Polynomial(self.ring, {e: F.neg(c) for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        F = self.ring.field
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = F.mul(c1, c2)
                if e in out:
                    c = F.add(out[e], c)
                    if c:
                        out[e] = c
                    else:
                        del out[e]
                elif c:
                    out[e] = c
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        F = self.ring.field
        c = F(c)
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {e: F.mul(v, c) for e, v in self._terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result, base = self.ring.one(), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def monic(self) -> "Polynomial":
        if not self._terms:
            return self
        return self.scale(self.ring.field.inv(self.leading_coefficient()))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return format_polynomial(self)

    def evaluate(self, point: Sequence) -> object:
        return evaluate(self, point)


def format_polynomial(f: Polynomial) -> str:
    if not f._terms:
        return "0"
    F = f.ring.field
    names = f.ring.names
    pieces = []
    for c, e in f.terms:
        mono = "*".join(
            names[i] if x == 1 else f"{names[i]}^{x}" for i, x in enumerate(e) if x
        )
        if isinstance(F, PrimeField):
            # symmetric residues read better: p-1 prints as -1
            v = c if c <= F.p // 2 else c - F.p
        else:
            v = c
        negative = v < 0
        mag = -v if negative else v
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^]))"
)


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    """Parse sums of products of rational literals and ``var`` or ``var^k`` factors."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            while text[pos].isspace():
                pos += 1
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    if not tokens:
        raise PolynomialSyntaxError("empty expression", 1)

    F = ring.field
    result = ring.zero()
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1
        while i < n and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        if i >= n:
            raise PolynomialSyntaxError("dangling sign", tokens[-1][2])
        term = ring.constant(sign)
        expect_factor = True
        while i < n:
            kind, val, col = tokens[i]
            if expect_factor:
                if kind == "num":
                    term = term.scale(F(Fraction(val)))
                elif kind == "name":
                    if val not in ring.index:
                        raise PolynomialSyntaxError(f"unknown variable {val!r}", col)
                    factor = ring.var(val)
                    if i + 1 < n and tokens[i + 1][1] == "^":
                        if i + 2 >= n or tokens[i + 2][0] != "num" or "/" in tokens[i + 2][1]:
                            raise PolynomialSyntaxError("exponent must be an integer", col)
                        factor = factor ** int(tokens[i + 2][1])
                        i += 2
                    term = term * factor
                else:
                    raise PolynomialSyntaxError(f"unexpected {val!r}", col)
                expect_factor = False
                i += 1
            elif kind == "op" and val == "*":
                expect_factor = True
                i += 1
            elif kind == "op" and val in "+-":
                break
            else:
                raise PolynomialSyntaxError(f"unexpected {val!r}", col)
        if expect_factor:
            raise PolynomialSyntaxError("expression ends with an operator", tokens[-1][2])
        result = result + term
    return result


def parse_linear_form(text: str, ring: PolyRing) -> Polynomial:
    f = parse_polynomial(text, ring)
    if not f.is_linear_form():
        raise PolynomialSyntaxError(f"entry {text.strip()!r} is not a linear form")
    return f


def evaluate(f: Polynomial, point: Sequence) -> object:
    ring = f.ring
    if len(point) != ring.nvars:
        raise ValueError(f"point has {len(point)} coordinates, ring has {ring.nvars} variables")
    F = ring.field
    vals = [F(v) for v in point]
    total = F.zero
    for e, c in f._terms.items():
        t = c
        for v, x in zip(vals, e):
            if x:
                t = F.mul(t, v if x == 1 else _fpow(F, v, x))
        total = F.add(total, t)
    return total


def _fpow(F: Field, v, k: int):
    if isinstance(F, PrimeField):
        return pow(v, k, F.p)
    return v**k


def substitute_linear(
    f: Polynomial, mapping: Mapping[str, Polynomial], target: PolyRing | None = None
) -> Polynomial:
    """Replace each variable of ``f`` by the polynomial ``mapping[name]``.

    All images must live in one ring; that ring is the ring of the result.
    """
    images = list(mapping.values())
    if target is None:
        if not images:
            target = f.ring
        else:
            target = images[0].ring
    for g in images:
        if g.ring != target:
            raise RingMismatch("substitution images live in different rings")
    names = f.ring.names
    needed = f.variables()
    missing = [v for v in needed if v not in mapping]
    if missing:
        raise KeyError(f"substitution map undefined for {missing}")
    power_cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in power_cache:
            power_cache[key] = mapping[names[i]] ** k
        return power_cache[key]

    result = target.zero()
    for e, c in f._terms.items():
        term = target.constant(c)
        for i, x in enumerate(e):
            if x:
                term = term * power(i, x)
        result = result + term
    return result


def embed(f: Polynomial, target: PolyRing) -> Polynomial:
    """Map ``f`` into a ring that contains all of its variables (by name)."""
    if f.ring == target:
        return f
    if f.ring.field != target.field:
        raise RingMismatch("cannot embed across coefficient fields")
    perm = []
    for name in f.ring.names:
        if name not in target.index:
            perm.append(None)
        else:
            perm.append(target.index[name])
    out = {}
    for e, c in f._terms.items():
        new = [0] * target.nvars
        for i, x in enumerate(e):
            if x:
                if perm[i] is None:
                    raise RingMismatch(f"variable {f.ring.names[i]} missing from target ring")
                new[perm[i]] = x
        out[tuple(new)] = c
    return Polynomial(target, out)
