"""``minorkit`` command line.

Exit codes: 0 success, 1 bad input or usage, 2 a witness failed
verification, 3 a resource cap was hit, 4 the pencil has eigenvalues outside
the coefficient field.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .classify import CharacteristicError, _cert_dict, analyze
from .groebner import DEFAULT_DEGREE_CAP, DEFAULT_PAIR_CAP, ResourceCapExceeded
from .pencil import (
    BlockSpecError,
    EigenvaluesNotInField,
    KWForm,
    LinMatrix,
    form_from_blocks,
    kw_decompose,
    parse_blocks,
    verify_certificate,
)
from .polycore import ORDERS, PolynomialSyntaxError, PolyRing, field_for, parse_linear_form

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_CAP, EXIT_EIGEN = 0, 1, 2, 3, 4


class InputError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class JobConfig:
    blocks: str | None = None
    path: str | None = None
    characteristic: int | None = None
    verify: bool | None = None  # None: decide from the variable cap
    force_verify: bool = False
    max_verify_vars: int = 12
    order: str = "degrevlex"
    output: str = "text"
    pair_cap: int = DEFAULT_PAIR_CAP
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        if (self.blocks is None) == (self.path is None):
            raise InputError("give exactly one of --blocks and --file")
        for name in ("max_verify_vars", "pair_cap", "degree_cap"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name.replace('_', '-')} must be positive")
        if self.characteristic is not None:
            try:
                field_for(self.characteristic)
            except ValueError as exc:
                raise InputError(f"characteristic must be 0 or a prime: {exc}") from None


def parse_matrix_file(text: str, characteristic: int | None = None) -> LinMatrix:
    """Read ``vars:``, optional ``field:``, then two rows of ``;``-separated linear forms."""
    lines = [(i + 1, raw) for i, raw in enumerate(text.splitlines())]
    lines = [(no, raw) for no, raw in lines if raw.strip() and not raw.lstrip().startswith("#")]
    if not lines or not lines[0][1].lstrip().startswith("vars:"):
        raise InputError("first line must be 'vars: <names>'", lines[0][0] if lines else 1, 1)
    no, raw = lines.pop(0)
    names = raw.split(":", 1)[1].split()
    if not names:
        raise InputError("no variables declared", no)
    for name in names:
        if not name.replace("_", "a").isalnum() or name[0].isdigit():
            raise InputError(f"bad variable name {name!r}", no, raw.index(name) + 1)
    if len(set(names)) != len(names):
        raise InputError("duplicate variable names", no)
    file_char = None
    if lines and lines[0][1].lstrip().startswith("field:"):
        no, raw = lines.pop(0)
        value = raw.split(":", 1)[1].strip()
        try:
            file_char = int(value)
            field_for(file_char)
        except ValueError:
            raise InputError(f"field must be 0 or a prime, got {value!r}", no, raw.index(":") + 2) from None
    if characteristic is not None and file_char is not None and characteristic != file_char:
        raise InputError(f"--char {characteristic} conflicts with 'field: {file_char}' in the file")
    char = characteristic if characteristic is not None else (file_char or 0)
    ring = PolyRing(names, field_for(char))
    if len(lines) != 2:
        raise InputError(f"expected two matrix rows, found {len(lines)}", lines[-1][0] if lines else None)
    rows = []
    for no, raw in lines:
        cells = raw.split(";")
        if cells and not cells[-1].strip():
            cells = cells[:-1]
        entries, offset = [], 0
        for cell in cells:
            if not cell.strip():
                raise InputError("empty entry", no, offset + 1)
            try:
                entries.append(parse_linear_form(cell, ring))
            except PolynomialSyntaxError as exc:
                col = offset + (exc.column or 1)
                if exc.column is None:
                    col = offset + len(cell) - len(cell.lstrip()) + 1
                raise InputError(str(exc).split(" (column")[0], no, col) from None
            offset += len(cell) + 1
        rows.append(entries)
    if len(rows[0]) != len(rows[1]):
        raise InputError(f"rows have {len(rows[0])} and {len(rows[1])} entries", lines[1][0])
    return LinMatrix(ring, (tuple(rows[0]), tuple(rows[1])), 1)


def parse_block_spec(text: str, characteristic: int = 0, order: str = "degrevlex") -> KWForm:
    return form_from_blocks(parse_blocks(text), field_for(characteristic), order)


def run(config: JobConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    caps = {"pair_cap": config.pair_cap, "degree_cap": config.degree_cap}
    try:
        if config.blocks is not None:
            char = config.characteristic or 0
            form = parse_block_spec(config.blocks, char, config.order)
            decomposition = None
        else:
            with open(config.path, encoding="utf-8") as fh:
                text = fh.read()
            M = parse_matrix_file(text, config.characteristic)
            char = M.ring.field.characteristic
            if config.order != M.ring.order:
                M = LinMatrix(M.ring.with_order(config.order), tuple(tuple(_reorder(e, config.order) for e in row) for row in M.rows), M.base)
            if char and char <= M.ncols:
                raise InputError(f"decomposition over GF({char}) needs a prime larger than the column count {M.ncols}")
            form = kw_decompose(M)
            decomposition = {
                "blocks": form.spec(),
                "canonical_ring": list(form.ring.names),
                "certificate": _cert_dict(form.certificate, form.ring.field),
                "certificate_verified": verify_certificate(form, M),
            }
        report = analyze(form, char)
        report.decomposition = decomposition
        nvars = form.ring.nvars
        want = config.verify if config.verify is not None else nvars <= config.max_verify_vars
        if config.verify and nvars > config.max_verify_vars and not config.force_verify:
            want = False
            report.notes.append(
                f"verification skipped: {nvars} variables exceed --max-verify-vars {config.max_verify_vars} (use --force-verify)"
            )
        if config.force_verify:
            want = True
        failed = False
        if want and report.witness is not None:
            failed = not report.witness.verify(**caps)
        if decomposition is not None and not decomposition["certificate_verified"]:
            failed = True
    except (InputError, BlockSpecError, CharacteristicError, PolynomialSyntaxError, OSError) as exc:
        print(f"minorkit: error: {exc}", file=err)
        return EXIT_INPUT
    except EigenvaluesNotInField as exc:
        print(f"minorkit: {exc}; supply the KW form with --blocks or use a field containing the eigenvalues", file=err)
        return EXIT_EIGEN
    except ResourceCapExceeded as exc:
        print(f"minorkit: resource limit: {exc}", file=err)
        return EXIT_CAP
    except ValueError as exc:
        print(f"minorkit: error: {exc}", file=err)
        return EXIT_INPUT

    if config.output == "json":
        out.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    else:
        out.write(report.text() + "\n")
        if decomposition is not None:
            ok = "verified" if decomposition["certificate_verified"] else "FAILED"
            out.write(f"decomposition certificate: {ok}\n")
    if failed:
        print("minorkit: verification failed", file=err)
        return EXIT_VERIFY
    return EXIT_OK


def _reorder(e, order):
    from .polycore import embed

    return embed(e, e.ring.with_order(order))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="minorkit", description="Invariants of ideals of 2-minors of 2 x n matrices of linear forms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("analyze", "decompose (if needed), classify and verify"),
        ("decompose", "alias of analyze"),
    ):
        p = sub.add_parser(name, help=help_text)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--blocks", help='KW block spec, e.g. "J(0,1) B(1) B(1) J(1,1)"')
        src.add_argument("--file", help="matrix file (vars: line, optional field: line, two rows)")
        p.add_argument("--char", type=int, default=None, help="field characteristic: 0 or a prime")
        p.add_argument("--verify", dest="verify", action="store_true", default=None)
        p.add_argument("--no-verify", dest="verify", action="store_false")
        p.add_argument("--force-verify", action="store_true", help="verify even above --max-verify-vars")
        p.add_argument("--max-verify-vars", type=int, default=12)
        p.add_argument("--order", choices=ORDERS, default="degrevlex")
        p.add_argument("--output", choices=("text", "json"), default="text")
        p.add_argument("--pair-cap", type=int, default=DEFAULT_PAIR_CAP)
        p.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = JobConfig(
            blocks=args.blocks,
            path=args.file,
            characteristic=args.char,
            verify=args.verify,
            force_verify=args.force_verify,
            max_verify_vars=args.max_verify_vars,
            order=args.order,
            output=args.output,
            pair_cap=args.pair_cap,
            degree_cap=args.degree_cap,
        )
    except InputError as exc:
        print(f"minorkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
