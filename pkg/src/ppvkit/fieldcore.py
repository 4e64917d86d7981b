"""Exact arithmetic in Q(t1,...,tm)(x) with commuting derivations.

The field is the rational function field in one main variable (``x`` by
default) and finitely many parameters over Q.  Every value is kept in a
canonical form (numerator and denominator coprime, denominator sign
normalized under a fixed graded-lex monomial order), so equality of
representations is equality of the functions they denote.  All arithmetic
is arbitrary-precision rational; no floating point enters this module.

Values are immutable and operations are pure, so they may be shared freely
across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from sympy import QQ
from sympy.polys.fields import field as _frac_field


class FieldError(Exception):
    """Base class for exact-arithmetic errors."""


class UnknownVariableError(FieldError):
    """A derivation or substitution named a variable outside the field."""


class UnsupportedDenominatorError(FieldError):
    """A denominator factor is irreducible of degree >= 2 in the main variable.

    Such factors have no root in Q(t1,...,tm), so pole-based algorithms
    cannot split them; the offending factors are reported verbatim.
    """

    def __init__(self, factors: Sequence[str]):
        self.factors = tuple(factors)
        super().__init__(
            "denominator has irreducible non-linear factor(s) in the main "
            "variable: " + ", ".join(self.factors)
        )


_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")

Scalar = Union[int, Fraction]


class FieldContext:
    """The differential field Q(params)(var) and its derivations.

    Derivations are named by variable: ``derive(var, f)`` is d/dx, and
    ``derive(p, f)`` for a parameter ``p`` is the corresponding partial
    derivative.  The derivations commute pairwise.
    """

    def __init__(self, params: Sequence[str], var: str = "x"):
        names = [var, *params]
        for name in names:
            if not _IDENT_RE.match(name):
                raise FieldError(f"invalid variable name: {name!r}")
        if len(set(names)) != len(names):
            raise FieldError(f"variable names must be distinct: {names}")
        self.var = var
        self.params = tuple(params)
        self._field, *gens = _frac_field(",".join(names), QQ, order="grlex")
        self._ring = self._field.ring
        self._gen_by_name = dict(zip(names, gens))
        self._ring_gen_by_name = dict(zip(names, self._ring.gens))
        self.zero = Rat(self, self._field.zero)
        self.one = Rat(self, self._field.one)

    # -- constructors ------------------------------------------------------

    def gen(self, name: str) -> "Rat":
        try:
            return Rat(self, self._gen_by_name[name])
        except KeyError:
            raise UnknownVariableError(
                f"unknown variable {name!r}; expected one of "
                f"{[self.var, *self.params]}"
            ) from None

    def rat(self, value: Union["Rat", Scalar]) -> "Rat":
        if isinstance(value, Rat):
            if value.ctx is not self:
                raise FieldError("value belongs to a different field context")
            return value
        if isinstance(value, int):
            return Rat(self, self._field.one * QQ(value))
        if isinstance(value, Fraction):
            return Rat(self, self._field.one * QQ(value.numerator, value.denominator))
        raise FieldError(f"cannot coerce {value!r} into the field")

    def variables(self) -> tuple[str, ...]:
        return (self.var, *self.params)

    def __repr__(self) -> str:
        return f"FieldContext(Q({', '.join(self.params)})({self.var}))"


class Rat:
    """An element of Q(params)(var) in canonical form."""

    __slots__ = ("ctx", "fe")

    def __init__(self, ctx: FieldContext, fe):
        self.ctx = ctx
        self.fe = fe

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.fe

    def is_one(self) -> bool:
        return self.fe == self.ctx._field.one

    def is_param_only(self) -> bool:
        """True when the main variable does not occur."""
        xg = self.ctx._ring_gen_by_name[self.ctx.var]
        return self.fe.numer.degree(xg) <= 0 and self.fe.denom.degree(xg) <= 0

    def is_constant(self) -> bool:
        """True when the value lies in Q."""
        return self.fe.numer.is_ground and self.fe.denom.is_ground

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise FieldError(f"{self} is not a rational constant")
        num = self.fe.numer.LC if self.fe.numer else QQ(0)
        den = self.fe.denom.LC
        q = num / den
        return Fraction(int(q.numerator), int(q.denominator))

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> Optional["Rat"]:
        if isinstance(other, Rat):
            if other.ctx is not self.ctx:
                raise FieldError("mixed field contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.rat(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else Rat(self.ctx, self.fe + o.fe)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else Rat(self.ctx, self.fe - o.fe)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else Rat(self.ctx, o.fe - self.fe)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else Rat(self.ctx, self.fe * o.fe)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero in the rational function field")
        return Rat(self.ctx, self.fe / o.fe)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero():
            raise ZeroDivisionError("division by zero in the rational function field")
        return Rat(self.ctx, o.fe / self.fe)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise FieldError("exponents must be integers")
        if n < 0 and self.is_zero():
            raise ZeroDivisionError("zero to a negative power")
        return Rat(self.ctx, self.fe ** n)

    def __neg__(self):
        return Rat(self.ctx, -self.fe)

    def __eq__(self, other) -> bool:
        if isinstance(other, Rat):
            return self.ctx is other.ctx and self.fe == other.fe
        if isinstance(other, (int, Fraction)):
            return self.fe == self.ctx.rat(other).fe
        return NotImplemented

    def __hash__(self):
        return hash(self.fe)

    def __bool__(self):
        return not self.is_zero()

    # -- calculus ----------------------------------------------------------

    def derive(self, name: str) -> "Rat":
        gen = self.ctx._gen_by_name.get(name)
        if gen is None:
            raise UnknownVariableError(
                f"unknown derivation {name!r}; expected one of "
                f"{[self.ctx.var, *self.ctx.params]}"
            )
        return Rat(self.ctx, self.fe.diff(gen))

    # -- display -----------------------------------------------------------

    def __str__(self) -> str:
        return format_rat(self)

    def __repr__(self) -> str:
        return f"Rat({format_rat(self)})"


def arith(op: str, f: Rat, g: Rat) -> Rat:
    """Field operation dispatch; ``op`` is one of add, sub, mul, div."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise FieldError(f"unknown operation {op!r}")


def derive(name: str, f: Rat) -> Rat:
    return f.derive(name)


# -- printing ---------------------------------------------------------------


def _format_coeff_monom(ctx: FieldContext, monom, coeff) -> str:
    pieces = []
    frac = Fraction(int(coeff.numerator), int(coeff.denominator))
    names = ctx.variables()
    for name, exp in zip(names, monom):
        if exp == 1:
            pieces.append(name)
        elif exp > 1:
            pieces.append(f"{name}^{exp}")
    if not pieces:
        return str(frac)
    if abs(frac) != 1:
        pieces.insert(0, str(abs(frac)))
    body = "*".join(pieces)
    return f"-{body}" if frac < 0 else body


def format_poly(ctx: FieldContext, poly) -> str:
    if not poly:
        return "0"
    order = ctx._ring.order
    terms = sorted(poly.terms(), key=lambda mc: order(mc[0]), reverse=True)
    out = ""
    for monom, coeff in terms:
        piece = _format_coeff_monom(ctx, monom, coeff)
        if not out:
            out = piece
        elif piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out


def _parenthesize(s: str) -> str:
    if re.fullmatch(r"[A-Za-z_0-9]+(\^[0-9]+)?", s):
        return s
    return f"({s})"


def format_rat(f: Rat) -> str:
    """Render in the expression grammar accepted by the parser.

    Powers print as ``^``; the output reparses to an equal value.
    """
    num = format_poly(f.ctx, f.fe.numer)
    if f.fe.denom == f.ctx._ring.one:
        return num
    den = format_poly(f.ctx, f.fe.denom)
    return f"{_parenthesize(num)}/{_parenthesize(den)}"


# -- structure in the main variable ------------------------------------------


def _split_by_main_var(ctx: FieldContext, poly) -> dict[int, object]:
    """Group a numerator/denominator polynomial by powers of the main variable.

    Returns {exponent: PolyElement free of the main variable}.
    """
    ring = ctx._ring
    buckets: dict[int, dict] = {}
    for monom, coeff in poly.terms():
        xdeg = monom[0]
        rest = (0,) + monom[1:]
        buckets.setdefault(xdeg, {})[rest] = coeff
    return {d: ring.from_dict(terms) for d, terms in buckets.items()}


def x_coefficients(f: Rat) -> dict[int, Rat]:
    """Coefficients of ``f`` as a polynomial in the main variable.

    Requires the denominator to be free of the main variable; the
    coefficients are parameter-only field elements.
    """
    ctx = f.ctx
    xg = ctx._ring_gen_by_name[ctx.var]
    if f.fe.denom.degree(xg) > 0:
        raise FieldError("denominator involves the main variable")
    den = Rat(ctx, ctx._field(f.fe.denom))
    out = {}
    for d, p in _split_by_main_var(ctx, f.fe.numer).items():
        out[d] = Rat(ctx, ctx._field(p)) / den
    return out


def x_poly_degree(f: Rat) -> int:
    """Degree in the main variable of a polynomial value (-1 for zero)."""
    coeffs = x_coefficients(f)
    return max(coeffs) if coeffs else -1


def from_x_coefficients(ctx: FieldContext, coeffs: dict[int, Rat]) -> Rat:
    x = ctx.gen(ctx.var)
    total = ctx.zero
    for d, c in coeffs.items():
        total = total + c * x ** d
    return total


def eval_at_main_var(f: Rat, value: Rat) -> Rat:
    """Substitute ``value`` (any field element) for the main variable.

    Raises ZeroDivisionError when the denominator vanishes at the point.
    """
    ctx = f.ctx
    num = _horner(ctx, _split_by_main_var(ctx, f.fe.numer), value)
    den = _horner(ctx, _split_by_main_var(ctx, f.fe.denom), value)
    if den.is_zero():
        raise ZeroDivisionError(f"denominator of {f} vanishes at {value}")
    return num / den


def _horner(ctx: FieldContext, buckets: dict[int, object], value: Rat) -> Rat:
    if not buckets:
        return ctx.zero
    top = max(buckets)
    acc = ctx.zero
    for d in range(top, -1, -1):
        acc = acc * value
        if d in buckets:
            acc = acc + Rat(ctx, ctx._field(buckets[d]))
    return acc


def shift_main_var(f: Rat, c: Rat) -> Rat:
    """Compose with the translation x -> x + c (c parameter-only)."""
    if not c.is_param_only():
        raise FieldError("translation amount must not involve the main variable")
    return eval_at_main_var(f, f.ctx.gen(f.ctx.var) + c)


def denominator_lcm(ctx: FieldContext, rats: Sequence[Rat]) -> Rat:
    """Least common multiple of the denominators, as a field element."""
    acc = ctx._ring.one
    for r in rats:
        d = r.fe.denom
        g = acc.gcd(d)
        acc = acc * d.quo(g)
    return Rat(ctx, ctx._field(acc))


def _poly_sqrt(ctx: FieldContext, poly):
    from math import isqrt

    if not poly:
        return ctx._ring.zero
    content, factors = poly.factor_list()
    c = Fraction(int(content.numerator), int(content.denominator))
    if c < 0:
        return None
    rn, rd = isqrt(c.numerator), isqrt(c.denominator)
    if rn * rn != c.numerator or rd * rd != c.denominator:
        return None
    from sympy import QQ as _QQ

    acc = ctx._ring.one * _QQ(rn, rd)
    for fac, exp in factors:
        if exp % 2:
            return None
        acc = acc * fac ** (exp // 2)
    return acc


def rat_sqrt(f: Rat) -> Optional[Rat]:
    """Square root inside the field, or None when f is not a square."""
    ctx = f.ctx
    if f.is_zero():
        return ctx.zero
    ns = _poly_sqrt(ctx, f.fe.numer)
    ds = _poly_sqrt(ctx, f.fe.denom)
    if ns is None or ds is None:
        return None
    root = Rat(ctx, ctx._field(ns) / ctx._field(ds))
    if root * root != f:
        return None
    return root


# -- partial fractions -------------------------------------------------------


@dataclass(frozen=True)
class PoleTerm:
    """One term b/(x - c)^j of a partial fraction decomposition."""

    root: Rat
    order: int
    coeff: Rat


@dataclass(frozen=True)
class PartialFractionForm:
    """Decomposition f = poly + sum of pole terms + unsplit remainder.

    Pole terms have roots in Q(t1,...,tm) and nonzero coefficients; the
    remainder, when present, is a fraction whose denominator has no root
    in the parameter field (all its factors have degree >= 2 in the main
    variable).  Recombining the parts reproduces the input exactly.
    """

    poly_part: Rat
    pole_terms: tuple[PoleTerm, ...]
    remainder: Optional[Rat]
    unsplit_factors: tuple[str, ...] = ()

    def recombine(self) -> Rat:
        ctx = self.poly_part.ctx
        x = ctx.gen(ctx.var)
        total = self.poly_part
        for term in self.pole_terms:
            total = total + term.coeff / (x - term.root) ** term.order
        if self.remainder is not None:
            total = total + self.remainder
        return total


def _linear_root(ctx: FieldContext, factor) -> Optional[Rat]:
    """Root in Q(params) of a factor that is linear in the main variable."""
    xg = ctx._ring_gen_by_name[ctx.var]
    if factor.degree(xg) != 1:
        return None
    buckets = _split_by_main_var(ctx, factor)
    a = Rat(ctx, ctx._field(buckets[1]))
    b = buckets.get(0)
    if b is None:
        return ctx.zero
    return -Rat(ctx, ctx._field(b)) / a


def partial_fractions_x(f: Rat) -> PartialFractionForm:
    """Unique partial fraction decomposition over Q(t1,...,tm).

    Denominator factors that are linear in the main variable split into
    pole terms; irreducible factors of higher degree are carried in the
    remainder rather than rejected.
    """
    ctx = f.ctx
    x = ctx.gen(ctx.var)
    xg = ctx._ring_gen_by_name[ctx.var]

    if f.fe.denom.degree(xg) <= 0:
        return PartialFractionForm(f, (), None)

    _, factors = f.fe.denom.factor_list()
    roots: list[tuple[Rat, int]] = []
    unsplit = []
    for p, mult in factors:
        d = p.degree(xg)
        if d <= 0:
            continue
        root = _linear_root(ctx, p)
        if root is not None:
            roots.append((root, mult))
        else:
            unsplit.append((p, mult))

    # Polynomial part: divide numerator by denominator in (Q(t))[x].
    num_c = x_coefficients(Rat(ctx, ctx._field(f.fe.numer)))
    den_c = x_coefficients(Rat(ctx, ctx._field(f.fe.denom)))
    poly_c, _ = _poly_divmod(ctx, num_c, den_c)
    poly_part = from_x_coefficients(ctx, poly_c)
    proper = f - poly_part

    terms: list[PoleTerm] = []
    for root, mult in roots:
        # Laurent coefficients at the root from derivatives of
        # g = (x - root)^mult * f, evaluated at the root.
        g = proper * (x - root) ** mult
        fact = 1
        for k in range(mult + 1):
            if k > 0:
                g = g.derive(ctx.var)
                fact *= k
            order = mult - k
            if order == 0:
                break
            coeff = eval_at_main_var(g, root) / fact
            if not coeff.is_zero():
                terms.append(PoleTerm(root=root, order=order, coeff=coeff))

    terms.sort(key=lambda t: (str(t.root), t.order))
    split_total = poly_part
    for t_ in terms:
        split_total = split_total + t_.coeff / (x - t_.root) ** t_.order
    remainder = f - split_total
    if remainder.is_zero():
        remainder_opt = None
    else:
        remainder_opt = remainder
    names = tuple(sorted(format_poly(ctx, p) for p, _ in unsplit))
    if remainder_opt is None:
        names = ()
    return PartialFractionForm(poly_part, tuple(terms), remainder_opt, names)


def _poly_divmod(ctx, num: dict[int, Rat], den: dict[int, Rat]):
    """Long division in (Q(params))[x] on coefficient dicts."""
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    dd = max(den)
    lead = den[dd]
    quo: dict[int, Rat] = {}
    rem = dict(num)
    while rem and max(rem) >= dd:
        k = max(rem)
        c = rem[k] / lead
        quo[k - dd] = c
        for e, dc in den.items():
            upd = rem.get(e + k - dd, ctx.zero) - c * dc
            if upd.is_zero():
                rem.pop(e + k - dd, None)
            else:
                rem[e + k - dd] = upd
        rem.pop(k, None)
    return quo, rem


def hermite_reduce_x(f: Rat) -> tuple[Rat, Rat]:
    """Split f = d/dx(R) + residual with residual a sum of simple poles.

    The polynomial part and all higher-order poles are absorbed into R;
    the residual keeps exactly the simple-pole residues.  Requires every
    denominator factor to split over the parameter field.
    """
    ctx = f.ctx
    x = ctx.gen(ctx.var)
    pf = partial_fractions_x(f)
    if pf.remainder is not None:
        raise UnsupportedDenominatorError(pf.unsplit_factors)
    R = ctx.zero
    for d, c in x_coefficients(pf.poly_part).items():
        R = R + c * x ** (d + 1) / (d + 1)
    residual = ctx.zero
    for term in pf.pole_terms:
        if term.order == 1:
            residual = residual + term.coeff / (x - term.root)
        else:
            R = R - term.coeff / ((term.order - 1) * (x - term.root) ** (term.order - 1))
    return R, residual


def simple_pole_residues(f: Rat) -> list[tuple[Rat, Rat]]:
    """Pairs (root, residue) of the simple poles of ``f`` over Q(params)."""
    pf = partial_fractions_x(f)
    return [(t.root, t.coeff) for t in pf.pole_terms if t.order == 1]
