"""Height, cohomological dimension and arithmetical rank of KW forms.

Values are table driven: each entry names the rule it came from. Heights
are always exact. A value of ``cd`` or ``ara`` that no rule pins down is
reported as ``unknown`` together with a bracket ``[lower, upper]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import linalg as la
from .groebner import IdealPresentation
from .pencil import (
    Certificate,
    KWForm,
    KWInvariants,
    certificate_holds,
    form_from_blocks,
    kw_invariants,
)
from .polycore import PolyRing, embed, field_for, format_polynomial, substitute_linear
from .radgen import (
    WitnessSet,
    an_generators,
    an_matrix,
    bruns_poset_polys,
    jordan_generators,
    nilpotent_extend,
    scroll_sci,
)

STATUSES = ("exact", "upper_bound", "lower_bound", "unknown")

# short rule names used as citations
C_HEIGHT = "height formula for KW forms"
C_SANDWICH = "ht <= cd <= ara"
C_ZERO = "zero ideal"
C_PRINCIPAL = "principal ideal"
C_SCROLL1 = "rational normal curve (Robbiano-Valla F_i)"
C_JORDAN1 = "single Jordan block"
C_NIL1 = "single nilpotent block"
C_GENERIC_ARA = "generic matrix (Bruns-Schwaenzl)"
C_GENERIC_CD = "generic matrix cd, characteristic dichotomy"
C_SCROLLS_ARA = "rational normal scroll ara (Badescu-Valla)"
C_SCROLLS_CD = "rational normal scroll cd, characteristic dichotomy"
C_JORDAN = "Jordan concatenation rule"
C_JORDAN_P = "Jordan witness (characteristic-free construction)"
C_AN_ARA = "zero-diagonal A_n witness K_n"
C_AN_CD = "zero-diagonal A_n cd, characteristic dichotomy"
C_2X3 = "2x3 classification"
C_NIL = "nilpotent extension (+n rule)"
C_OPEN = "open case; Bruns bracket"


class CharacteristicError(ValueError):
    pass


@dataclass(frozen=True)
class InvariantValue:
    value: int | None
    status: str
    citation: str
    lower: int | None = None
    upper: int | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    @classmethod
    def exact(cls, v: int, citation: str) -> "InvariantValue":
        return cls(v, "exact", citation, v, v)

    @classmethod
    def upper_bound(cls, v: int, citation: str, lower: int | None = None) -> "InvariantValue":
        return cls(v, "upper_bound", citation, lower, v)

    @classmethod
    def unknown(cls, lower: int, upper: int, citation: str) -> "InvariantValue":
        return cls(None, "unknown", citation, lower, upper)

    @property
    def best_upper(self) -> int | None:
        if self.status in ("exact", "upper_bound"):
            return self.value
        return self.upper

    def shifted(self, k: int, citation: str) -> "InvariantValue":
        add = lambda v: None if v is None else v + k  # noqa: E731
        return InvariantValue(add(self.value), self.status, f"{self.citation}; {citation}", add(self.lower), add(self.upper))

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "status": self.status,
            "citation": self.citation,
            "lower": self.lower,
            "upper": self.upper,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InvariantValue":
        return cls(d["value"], d["status"], d["citation"], d.get("lower"), d.get("upper"))

    def text(self) -> str:
        if self.status == "exact":
            return f"{self.value}"
        if self.status == "upper_bound":
            lo = f", >= {self.lower}" if self.lower is not None else ""
            return f"<= {self.value}{lo}"
        if self.status == "lower_bound":
            return f">= {self.value}"
        return f"unknown in [{self.lower}, {self.upper}]"


@dataclass
class Report:
    pattern: str
    blocks: str
    ncols: int
    characteristic: int
    height: InvariantValue
    cd: InvariantValue
    ara: InvariantValue
    witness: WitnessSet | None = None
    generic_comparison: bool | None = None
    certificate: dict | None = None
    decomposition: dict | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "pattern": self.pattern,
            "blocks": self.blocks,
            "ncols": self.ncols,
            "characteristic": self.characteristic,
            "height": self.height.to_dict(),
            "cd": self.cd.to_dict(),
            "ara": self.ara.to_dict(),
            "witness": None if self.witness is None else self.witness.to_dict(),
            "ring": None if self.witness is None else list(self.witness.ring.names),
            "generic_comparison": self.generic_comparison,
            "certificate": self.certificate,
            "decomposition": self.decomposition,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != 1:
            raise ValueError("unsupported report schema")
        witness = None
        if d.get("witness") is not None:
            ring = PolyRing(d["ring"], field_for(d["characteristic"]))
            witness = WitnessSet.from_dict(d["witness"], ring)
        return cls(
            pattern=d["pattern"],
            blocks=d["blocks"],
            ncols=d["ncols"],
            characteristic=d["characteristic"],
            height=InvariantValue.from_dict(d["height"]),
            cd=InvariantValue.from_dict(d["cd"]),
            ara=InvariantValue.from_dict(d["ara"]),
            witness=witness,
            generic_comparison=d.get("generic_comparison"),
            certificate=d.get("certificate"),
            decomposition=d.get("decomposition"),
            notes=list(d.get("notes", [])),
        )

    def text(self) -> str:
        rows = [
            ("pattern", self.pattern),
            ("blocks", self.blocks),
            ("columns", str(self.ncols)),
            ("characteristic", str(self.characteristic)),
            ("ht", f"{self.height.text()}  [{self.height.citation}]"),
            ("cd", f"{self.cd.text()}  [{self.cd.citation}]"),
            ("ara", f"{self.ara.text()}  [{self.ara.citation}]"),
            ("ara < 2n-3", str(self.generic_comparison).lower()),
        ]
        if self.witness is not None:
            status = {None: "not verified", True: "verified", False: "FAILED"}[self.witness.verified]
            rows.append(("witness", f"{self.witness.tag}, {self.witness.count} polynomials, {status}"))
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)} : {v}" for k, v in rows]
        if self.witness is not None:
            lines += [f"{'':{width}}   {format_polynomial(p)}" for p in self.witness.polys]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def height_formula(inv: KWInvariants) -> int:
    """Height of the 2-minor ideal of a KW form from its block data."""
    if inv.ncols == 0:
        raise ValueError("empty form")
    s = sum(inv.nilpotent_sizes)
    if inv.d:
        return s + sum(inv.scroll_lengths) + inv.jordan_vars - inv.gamma
    if inv.g:
        return s + sum(inv.scroll_lengths) - 1
    return s


def question1_flag(report: Report, n: int | None = None) -> bool:
    """True iff the reported ara (or its upper bound) is below ``2n-3``."""
    n = report.ncols if n is None else n
    upper = report.ara.best_upper
    if upper is None:
        raise ValueError("ara is unknown without an upper bound")
    return upper < 2 * n - 3


def _check_char(characteristic: int) -> None:
    try:
        field_for(characteristic)
    except ValueError as exc:
        raise CharacteristicError(str(exc)) from None


def _sub_form(form: KWForm, blocks) -> KWForm:
    """The sub-concatenation on ``blocks``, in the form's own ring."""
    from .pencil import concat

    ring = form.ring
    matrix = concat(list(blocks), ring, base=form.matrix.base)
    F = ring.field
    cert = Certificate(
        tuple(map(tuple, la.identity(F, 2))),
        tuple(map(tuple, la.identity(F, matrix.ncols))),
        tuple(map(tuple, la.identity(F, ring.nvars))),
    )
    return KWForm(tuple(blocks), matrix, cert)


@dataclass
class _Core:
    pattern: str
    cd: InvariantValue
    ara: InvariantValue
    witness: WitnessSet | None = None
    certificate: dict | None = None
    keep_upper: bool = False  # report ara as a bound even when ht meets it


def an_normalization(form: KWForm):
    """Certificate taking an A_n-pattern form to the zero-diagonal matrix.

    Returns ``(certificate, target matrix, pullback map)``; the map sends the
    target variables to linear forms in the form's ring.
    """
    jordans = [b for b in form.blocks if b.kind == "J"]
    scrolls = [b for b in form.blocks if b.kind == "B"]
    n = form.matrix.ncols
    ring = form.ring
    F = ring.field
    l1, l2 = F(jordans[0].eigenvalue), F(jordans[1].eigenvalue)
    target = an_matrix(n, F, ring.order)
    T = target.ring
    d = F.sub(l1, l2)
    # row action (-l1 1; -l2 1): J(l1) -> (0, (l1-l2) y), J(l2) -> ((l2-l1) y, 0),
    # scroll column (z0, z1) -> (z1 - l1 z0, z1 - l2 z0)
    row_mix = ((F.neg(l1), F.one), (F.neg(l2), F.one))
    forward = {}  # target variable -> linear form in the source ring
    y1 = ring.var(jordans[0].variables[0])
    y2 = ring.var(jordans[1].variables[0])
    forward[f"x{n}"] = y1.scale(d)
    forward[f"x{n - 1}"] = y2.scale(F.neg(d))
    for i, b in enumerate(scrolls, start=1):
        z0, z1 = (ring.var(v) for v in b.variables)
        forward[f"x{i}"] = z1 - z0.scale(l1)
        forward[f"x{n + i}"] = z1 - z0.scale(l2)
    # inverse substitution, source variable -> linear form in the target ring
    back = {}
    inv_d = F.inv(d)
    back[jordans[0].variables[0]] = T.var(f"x{n}").scale(inv_d)
    back[jordans[1].variables[0]] = T.var(f"x{n - 1}").scale(F.neg(inv_d))
    for i, b in enumerate(scrolls, start=1):
        xi, xni = T.var(f"x{i}"), T.var(f"x{n + i}")
        z0 = (xni - xi).scale(inv_d)  # x_i - x_(n+i) = (l2 - l1) z0
        back[b.variables[0]] = z0
        back[b.variables[1]] = xi + z0.scale(l1)
    subst = tuple(tuple(back[name].linear_coefficients()) for name in ring.names)
    # column order: first Jordan, scrolls, second Jordan
    pos = {}
    c = 0
    for b in form.blocks:
        pos[b] = c
        c += b.ncols
    order = [pos[jordans[0]]] + [pos[b] for b in scrolls] + [pos[jordans[1]]]
    col_mix = tuple(tuple(F.one if order[j] == i else F.zero for j in range(n)) for i in range(n))
    cert = Certificate(row_mix, col_mix, subst)
    if not certificate_holds(cert, form.matrix, target):
        raise RuntimeError("internal error: A_n normalization does not verify")
    return cert, target, forward


def _is_an_pattern(inv: KWInvariants, form_blocks) -> bool:
    js = [b for b in form_blocks if b.kind == "J"]
    bs = [b for b in form_blocks if b.kind == "B"]
    return (
        len(js) == 2
        and all(b.size == 1 for b in js)
        and js[0].eigenvalue != js[1].eigenvalue
        and len(bs) >= 2
        and all(b.size == 1 for b in bs)
        and len(js) + len(bs) == len(form_blocks)
    )


def _analyze_core(core: KWForm, p: int, ht: int) -> _Core:
    inv = kw_invariants(core)
    blocks = core.blocks
    n = core.matrix.ncols
    ring = core.ring
    F = ring.field

    if ht == 0:
        z = InvariantValue.exact(0, C_ZERO)
        return _Core("zero", z, z)
    if n == 2:
        one = InvariantValue.exact(1, C_PRINCIPAL)
        w = bruns_poset_polys(M=core.matrix)
        return _Core("principal", one, one, w)
    if len(blocks) == 1 and blocks[0].kind == "B":
        b = blocks[0]
        w = scroll_sci(b.size - 1, core.matrix, names=b.variables)
        v = InvariantValue.exact(b.size - 1, C_SCROLL1)
        return _Core("single-scroll", v, v, w)
    if len(blocks) == 1 and blocks[0].kind == "J":
        b = blocks[0]
        w = WitnessSet(tuple(ring.var(v) for v in b.variables[:-1]), IdealPresentation(ring, core.matrix.minors()), "JordanQ")
        v = InvariantValue.exact(b.size - 1, C_JORDAN1)
        return _Core("single-jordan", v, v, w)
    if inv.d == 0:
        total = sum(inv.scroll_lengths)
        if all(l == 1 for l in inv.scroll_lengths):
            ara = InvariantValue.exact(2 * n - 3, C_GENERIC_ARA)
            cd = InvariantValue.exact(2 * n - 3 if p == 0 else n - 1, C_GENERIC_CD)
            return _Core("generic", cd, ara, bruns_poset_polys(M=core.matrix))
        a = total + inv.g - 3
        ara = InvariantValue.exact(a, C_SCROLLS_ARA)
        cd = InvariantValue.exact(a if p == 0 else total - 1, C_SCROLLS_CD)
        return _Core("scrolls", cd, ara)
    if inv.g == 0:
        bound = inv.jordan_vars - (inv.alpha if inv.d == 1 else 1)
        w = jordan_generators(core)
        if p == 0:
            v = InvariantValue.exact(bound, C_JORDAN)
            return _Core("jordan", v, v, w)
        ara = InvariantValue.upper_bound(bound, C_JORDAN_P, lower=ht)
        cd = InvariantValue.unknown(ht, bound, C_JORDAN_P)
        return _Core("jordan", cd, ara, w)
    if _is_an_pattern(inv, blocks) and n >= 4:
        # normalize in the ring of the core's own variables, then embed back
        compact = form_from_blocks(blocks, F, ring.order)
        cert, target, forward = an_normalization(compact)
        kn = an_generators(n, target)
        polys = tuple(embed(substitute_linear(f, forward, compact.ring), ring) for f in kn.polys)
        w = WitnessSet(polys, IdealPresentation(ring, core.matrix.minors()), "AnKn")
        if p == 0:
            v = InvariantValue.exact(2 * n - 5, C_AN_ARA)
            cd = InvariantValue.exact(2 * n - 5, C_AN_CD)
        else:
            v = InvariantValue.upper_bound(2 * n - 5, C_AN_ARA, lower=ht)
            cd = InvariantValue.exact(n - 1, C_AN_CD)
        return _Core("A_n", cd, v, w, certificate=_cert_dict(cert, F), keep_upper=p != 0)
    if n == 3:
        ara = InvariantValue.exact(2, C_2X3)
        cd = InvariantValue.exact(2, C_2X3) if ht == 2 else InvariantValue.unknown(ht, 2, C_2X3)
        return _Core("2x3", cd, ara)
    ara = InvariantValue.unknown(ht, 2 * n - 3, C_OPEN)
    cd = InvariantValue.unknown(ht, 2 * n - 3, C_OPEN)
    return _Core("mixed", cd, ara, bruns_poset_polys(M=core.matrix))


def _cert_dict(cert: Certificate, F) -> dict:
    fmt = lambda M: [[F.format(x) for x in row] for row in M]  # noqa: E731
    return {"row_mix": fmt(cert.row_mix), "col_mix": fmt(cert.col_mix), "substitution": fmt(cert.substitution)}


def _squeeze(ht: int, cd: InvariantValue, ara: InvariantValue, keep_upper: bool = False) -> tuple[InvariantValue, InvariantValue]:
    """Tighten statuses using ht <= cd <= ara."""
    up = ara.best_upper
    if up is not None and up == ht:
        if cd.status != "exact":
            cd = InvariantValue.exact(ht, f"{cd.citation}; {C_SANDWICH}")
        if ara.status != "exact" and not keep_upper:
            ara = InvariantValue.exact(ht, f"{ara.citation}; {C_SANDWICH}")
    if cd.status == "exact" and ara.status == "upper_bound" and ara.value == cd.value and not keep_upper:
        ara = InvariantValue.exact(cd.value, f"{ara.citation}; {C_SANDWICH}")
    if cd.status == "exact" and ara.status == "upper_bound" and (ara.lower is None or ara.lower < cd.value):
        ara = replace(ara, lower=cd.value)
    return cd, ara


def analyze(form: KWForm, characteristic: int = 0) -> Report:
    """Dispatch a KW form to the rule that covers it."""
    _check_char(characteristic)
    inv = kw_invariants(form)
    ht = height_formula(inv)
    nil = [b for b in form.blocks if b.kind == "N"]
    rest = [b for b in form.blocks if b.kind != "N"]
    s = sum(b.size for b in nil)
    target = IdealPresentation(form.ring, form.matrix.minors())

    if rest:
        core_form = _sub_form(form, rest)
        core = _analyze_core(core_form, characteristic, height_formula(kw_invariants(core_form)))
    else:
        z = InvariantValue.exact(0, C_ZERO)
        core = _Core("zero", z, z)

    pattern, cd, ara, witness = core.pattern, core.cd, core.ara, core.witness
    if witness is not None:
        witness = WitnessSet(witness.polys, target, witness.tag)
    if nil:
        if pattern == "zero" and len(nil) == 1:
            pattern = "single-nilpotent"
            cd = ara = InvariantValue.exact(s, C_NIL1)
        else:
            pattern = f"{pattern}+nilpotent" if rest else "nilpotent"
            cd = cd.shifted(s, C_NIL)
            if ara.status == "exact":
                tight = cd.status == "exact" and cd.value == ara.value + s
                ara = InvariantValue.exact(ara.value + s, f"{ara.citation}; {C_NIL}") if tight else InvariantValue.upper_bound(ara.value + s, f"{ara.citation}; {C_NIL}", lower=ht)
            else:
                ara = ara.shifted(s, C_NIL)
        if s and (witness is not None or core.pattern == "zero"):
            base = witness
            for b in nil:
                if b.size:
                    base = nilpotent_extend(base, b, form.ring)
            witness = WitnessSet(base.polys, target, base.tag) if base is not None else None
        if cd.status == "unknown":
            cd = replace(cd, lower=max(ht, cd.lower))
        if ara.status == "unknown":
            ara = replace(ara, lower=max(ht, ara.lower))
    if pattern == "zero":
        witness = None
    cd, ara = _squeeze(ht, cd, ara, core.keep_upper)
    report = Report(
        pattern=pattern,
        blocks=form.spec(),
        ncols=form.matrix.ncols,
        characteristic=characteristic,
        height=InvariantValue.exact(ht, C_HEIGHT),
        cd=cd,
        ara=ara,
        witness=witness,
        certificate=core.certificate,
    )
    report.generic_comparison = question1_flag(report)
    return report


def analyze_blocks(spec: str, characteristic: int = 0) -> Report:
    from .pencil import parse_blocks

    return analyze(form_from_blocks(parse_blocks(spec), field_for(characteristic)), characteristic)
