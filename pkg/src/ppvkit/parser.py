"""Expression and system parsing.

A small hand-written recursive descent parser for rational function
expressions, plus a validator for the JSON description of a parameterized
linear system.  Precedence, loosest first: unary minus, then + and -, then
* and /, then ^ (right associative, literal integer exponents only, so all
values stay inside the rational function field).  Unary minus is accepted
at the start of an expression and after an opening parenthesis.

Errors are structured: they carry the source position and never abort the
process.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .fieldcore import FieldContext, Rat


class ParseError(Exception):
    """A lexical or syntactic error with its source position."""

    def __init__(self, message: str, position: int, source: str = ""):
        self.message = message
        self.position = position
        self.source = source
        super().__init__(f"{message} (at position {position})")

    def diagnostic(self) -> dict:
        return {"message": self.message, "position": self.position}


class SystemFormatError(Exception):
    """The JSON system description violates the schema."""

    def __init__(self, message: str, location: str = ""):
        self.message = message
        self.location = location
        where = f" at {location}" if location else ""
        super().__init__(f"{message}{where}")

    def diagnostic(self) -> dict:
        return {"message": self.message, "location": self.location}


# -- lexer -------------------------------------------------------------------

_SYMBOLS = "+-*/^()"


@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "ident" | one of the symbols | "end"
    text: str
    pos: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and (src[j].isalpha() or src[j] == "_"):
                raise ParseError(f"malformed number {src[i:j+1]!r}", i, src)
            tokens.append(_Token("int", src[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(_Token("ident", src[i:j], i))
            i = j
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i, src)
    tokens.append(_Token("end", "", n))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, src: str, ctx: FieldContext):
        self.src = src
        self.ctx = ctx
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.take()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos, self.src)
        return tok

    def parse(self) -> Rat:
        value = self.expression()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"trailing input {tok.text!r}", tok.pos, self.src)
        return value

    def expression(self) -> Rat:
        value = self.signed_term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            rhs = self.multiplicative()
            value = value + rhs if op == "+" else value - rhs
        return value

    def signed_term(self) -> Rat:
        # unary minus binds looser than * and ^: it negates a whole term
        if self.peek().kind == "-":
            self.take()
            return -self.signed_term()
        return self.multiplicative()

    def multiplicative(self) -> Rat:
        value = self.power()
        while self.peek().kind in ("*", "/"):
            tok = self.take()
            rhs = self.power()
            if tok.kind == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", tok.pos, self.src)
                value = value / rhs
        return value

    def power(self) -> Rat:
        base = self.atom()
        if self.peek().kind == "^":
            self.take()
            return base ** self.exponent()
        return base

    def exponent(self) -> int:
        # literal integer, optionally negated; right-associative chains fold
        neg = False
        if self.peek().kind == "-":
            self.take()
            neg = True
        tok = self.take()
        if tok.kind != "int":
            raise ParseError(
                f"exponent must be an integer literal, found {tok.text or 'end of input'!r}",
                tok.pos,
                self.src,
            )
        value = int(tok.text)
        if self.peek().kind == "^":
            self.take()
            value = value ** self.exponent()
        return -value if neg else value

    def atom(self) -> Rat:
        tok = self.take()
        if tok.kind == "int":
            return self.ctx.rat(int(tok.text))
        if tok.kind == "ident":
            if tok.text not in self.ctx.variables():
                raise ParseError(f"unknown identifier {tok.text!r}", tok.pos, self.src)
            return self.ctx.gen(tok.text)
        if tok.kind == "(":
            value = self.expression()
            self.expect(")")
            return value
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos, self.src)


def parse_expr(src: str, ctx: FieldContext) -> Rat:
    """Parse a rational function expression over the context's variables."""
    return _Parser(src, ctx).parse()


# -- system descriptions -------------------------------------------------------


@dataclass(frozen=True)
class SystemSpec:
    """Validated description of a parameterized linear system.

    One n-by-n matrix of expression strings per named derivation; keys are
    the main variable or a parameter name.
    """

    params: tuple[str, ...]
    var: str
    n: int
    matrices: dict[str, list[list[str]]]

    def context(self) -> FieldContext:
        return FieldContext(self.params, var=self.var)

    def parse_matrices(self, ctx: Optional[FieldContext] = None):
        ctx = ctx or self.context()
        out = {}
        for name, rows in self.matrices.items():
            out[name] = [[parse_expr(e, ctx) for e in row] for row in rows]
        return ctx, out


def _no_duplicate_keys(pairs):
    seen = set()
    out = {}
    for key, value in pairs:
        if key in seen:
            raise SystemFormatError(f"duplicate key {key!r}")
        seen.add(key)
        out[key] = value
    return out


def parse_system(src: str | dict) -> SystemSpec:
    """Validate a JSON system description.

    Schema: {"params": [names...], "var": optional name (default "x"),
    "n": positive int, "matrices": {derivation: n-by-n array of expression
    strings}}.  Derivation names must be the main variable or a declared
    parameter, each appearing at most once.
    """
    if isinstance(src, str):
        try:
            data = json.loads(src, object_pairs_hook=_no_duplicate_keys)
        except json.JSONDecodeError as exc:
            raise SystemFormatError(f"invalid JSON: {exc}") from None
    else:
        data = src
    if not isinstance(data, dict):
        raise SystemFormatError("top level must be an object")
    unknown = set(data) - {"params", "var", "n", "matrices"}
    if unknown:
        raise SystemFormatError(f"unknown keys {sorted(unknown)}")

    params = data.get("params")
    if not isinstance(params, list) or not all(isinstance(p, str) for p in params):
        raise SystemFormatError('"params" must be an array of identifier strings')
    var = data.get("var", "x")
    if not isinstance(var, str):
        raise SystemFormatError('"var" must be a string')
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SystemFormatError('"n" must be a positive integer')
    matrices = data.get("matrices")
    if not isinstance(matrices, dict) or not matrices:
        raise SystemFormatError('"matrices" must be a non-empty object')

    try:
        ctx = FieldContext(params, var=var)
    except Exception as exc:
        raise SystemFormatError(str(exc), "params") from None

    allowed = {var, *params}
    clean: dict[str, list[list[str]]] = {}
    for name, rows in matrices.items():
        if name not in allowed:
            raise SystemFormatError(
                f"derivation {name!r} is neither the main variable nor a parameter",
                f"matrices.{name}",
            )
        if not isinstance(rows, list) or len(rows) != n:
            raise SystemFormatError(
                f"matrix must have {n} rows", f"matrices.{name}"
            )
        mat = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise SystemFormatError(
                    f"row has {len(row) if isinstance(row, list) else '??'} entries, expected {n}",
                    f"matrices.{name}[{i}]",
                )
            entries = []
            for j, entry in enumerate(row):
                if not isinstance(entry, str):
                    raise SystemFormatError(
                        "matrix entries must be expression strings",
                        f"matrices.{name}[{i}][{j}]",
                    )
                try:
                    parse_expr(entry, ctx)
                except ParseError as exc:
                    raise SystemFormatError(
                        f"bad expression {entry!r}: {exc.message}",
                        f"matrices.{name}[{i}][{j}]",
                    ) from None
                entries.append(entry)
            mat.append(entries)
        clean[name] = mat
    return SystemSpec(params=tuple(params), var=var, n=n, matrices=clean)
