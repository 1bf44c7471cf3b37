"""Ideals of 2-minors of 2 x n matrices of linear forms.

Kronecker-Weierstrass decomposition with certificates, height / cd / ara
reports, explicit generators up to radical and a Gröbner-basis oracle.
"""

from .classify import InvariantValue, Report, analyze, analyze_blocks, height_formula, question1_flag
from .groebner import (
    GroebnerBasis,
    IdealPresentation,
    ResourceCapExceeded,
    buchberger,
    equal_radical,
    ideal_height,
    ideal_member,
    radical_member,
)
from .pencil import (
    Block,
    EigenvaluesNotInField,
    KWForm,
    KWInvariants,
    LinMatrix,
    concat,
    form_from_blocks,
    kw_decompose,
    kw_invariants,
    make_block,
    parse_blocks,
    verify_certificate,
)
from .polycore import GF, QQ, Polynomial, PolyRing
from .radgen import (
    SVPartition,
    WitnessSet,
    an_generators,
    bruns_poset_polys,
    jordan_generators,
    nilpotent_extend,
    plucker_identity,
    schmitt_vogel,
    scroll_sci,
    syzygy_reduce,
)

__all__ = [
    "InvariantValue",
    "Report",
    "analyze",
    "analyze_blocks",
    "height_formula",
    "question1_flag",
    "GroebnerBasis",
    "IdealPresentation",
    "ResourceCapExceeded",
    "buchberger",
    "equal_radical",
    "ideal_height",
    "ideal_member",
    "radical_member",
    "Block",
    "EigenvaluesNotInField",
    "KWForm",
    "KWInvariants",
    "LinMatrix",
    "concat",
    "form_from_blocks",
    "kw_decompose",
    "kw_invariants",
    "make_block",
    "parse_blocks",
    "verify_certificate",
    "GF",
    "QQ",
    "Polynomial",
    "PolyRing",
    "SVPartition",
    "WitnessSet",
    "an_generators",
    "bruns_poset_polys",
    "jordan_generators",
    "nilpotent_extend",
    "plucker_identity",
    "schmitt_vogel",
    "scroll_sci",
    "syzygy_reduce",
]

__version__ = "0.1.0"
