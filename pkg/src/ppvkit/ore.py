"""The noncommutative operator ring Q(t1,...,tm)[D] for one parametric derivation.

An operator sum a_i D^i acts on the parameter field through the designated
derivation, and multiplication is composition, so D*a = a*D + a' for a
coefficient a.  Right division is Euclidean; greatest common right divisors
and least common left multiples come from the extended Euclidean scheme and
realize intersection and join of solution spaces.  Annihilators of finite
spans are built from bordered Wronskians; the Wronskian rank of a family in
Q(t) equals the dimension of its span over constants, which keeps the
construction of minimal order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import linalg
from .fieldcore import FieldContext, FieldError, Rat


class OreError(FieldError):
    """Operator-ring contract violation (mixed derivations, zero divisor, ...)."""


@dataclass(frozen=True)
class OreOperator:
    """sum coeffs[i] * D^i with parameter-only coefficients.

    The zero operator has an empty coefficient tuple; otherwise the leading
    coefficient is nonzero.  Operators with distinct designated derivations
    never mix.
    """

    ctx: FieldContext
    deriv: str
    coeffs: tuple[Rat, ...]

    def __post_init__(self):
        if self.deriv not in self.ctx.params:
            raise OreError(f"designated derivation {self.deriv!r} is not a parameter")
        if self.coeffs and self.coeffs[-1].is_zero():
            raise OreError("leading coefficient must be nonzero")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_coeffs(ctx: FieldContext, deriv: str, coeffs: Iterable[Rat]) -> "OreOperator":
        cs = [ctx.rat(c) if not isinstance(c, Rat) else c for c in coeffs]
        for c in cs:
            if not c.is_param_only():
                raise OreError("operator coefficients must not involve the main variable")
        return OreOperator._make(ctx, deriv, cs)

    @staticmethod
    def _make(ctx: FieldContext, deriv: str, coeffs: list) -> "OreOperator":
        # internal constructor: coefficients already in the parameter field
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        return OreOperator(ctx, deriv, tuple(coeffs))

    @staticmethod
    def zero(ctx: FieldContext, deriv: str) -> "OreOperator":
        return OreOperator(ctx, deriv, ())

    @staticmethod
    def identity(ctx: FieldContext, deriv: str) -> "OreOperator":
        return OreOperator(ctx, deriv, (ctx.one,))

    @staticmethod
    def d(ctx: FieldContext, deriv: str) -> "OreOperator":
        return OreOperator(ctx, deriv, (ctx.zero, ctx.one))

    # -- structure ----------------------------------------------------------

    @property
    def order(self) -> int:
        """Order of the operator; -1 for the zero operator."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coeff(self) -> Rat:
        if self.is_zero():
            raise OreError("zero operator has no leading coefficient")
        return self.coeffs[-1]

    def monic(self) -> "OreOperator":
        if self.is_zero():
            return self
        lc = self.leading_coeff
        if lc.is_one():
            return self
        return OreOperator(self.ctx, self.deriv, tuple(c / lc for c in self.coeffs))

    def _check_compatible(self, other: "OreOperator"):
        if self.ctx is not other.ctx:
            raise OreError("operators belong to different field contexts")
        if self.deriv != other.deriv:
            raise OreError(
                f"mixed designated derivations: {self.deriv!r} vs {other.deriv!r}"
            )

    # -- ring operations ------------------------------------------------------

    def __add__(self, other: "OreOperator") -> "OreOperator":
        self._check_compatible(other)
        n = max(len(self.coeffs), len(other.coeffs))
        zero = self.ctx.zero
        out = [
            (self.coeffs[i] if i < len(self.coeffs) else zero)
            + (other.coeffs[i] if i < len(other.coeffs) else zero)
            for i in range(n)
        ]
        return OreOperator._make(self.ctx, self.deriv, out)

    def __neg__(self) -> "OreOperator":
        return OreOperator(self.ctx, self.deriv, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "OreOperator") -> "OreOperator":
        return self + (-other)

    def scale(self, c: Rat) -> "OreOperator":
        """Left multiplication by a field element."""
        c = self.ctx.rat(c) if not isinstance(c, Rat) else c
        if c.is_zero():
            return OreOperator.zero(self.ctx, self.deriv)
        return OreOperator(self.ctx, self.deriv, tuple(c * a for a in self.coeffs))

    def shift(self, k: int) -> "OreOperator":
        """Left multiplication by D^k composed coefficient-wise: c * D^(i+k) terms only."""
        if self.is_zero() or k == 0:
            return self
        zero = self.ctx.zero
        return OreOperator(self.ctx, self.deriv, (zero,) * k + self.coeffs)

    def __mul__(self, other: "OreOperator") -> "OreOperator":
        """Composition: (L*M)(f) = L(M(f))."""
        self._check_compatible(other)
        ctx = self.ctx
        if self.is_zero() or other.is_zero():
            return OreOperator.zero(ctx, self.deriv)
        # hot loop on raw field elements; rewrapped once at the end
        zero = ctx._field.zero
        dgen = ctx._gen_by_name[self.deriv]
        out = [zero] * (self.order + other.order + 1)
        # rows of D^i * M, produced incrementally via D*(c D^j) = c D^(j+1) + c' D^j
        row = [c.fe for c in other.coeffs]
        for i in range(len(self.coeffs)):
            ci = self.coeffs[i].fe
            if ci:
                for j, mj in enumerate(row):
                    if mj:
                        out[j] = out[j] + ci * mj
            if i < self.order:
                nxt = [zero] * (len(row) + 1)
                for j, mj in enumerate(row):
                    if mj:
                        nxt[j + 1] = nxt[j + 1] + mj
                        d = mj.diff(dgen)
                        if d:
                            nxt[j] = nxt[j] + d
                row = nxt
        return OreOperator._make(ctx, self.deriv, [Rat(ctx, fe) for fe in out])

    def __eq__(self, other) -> bool:
        if not isinstance(other, OreOperator):
            return NotImplemented
        return self.deriv == other.deriv and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.deriv, self.coeffs))

    # -- action -------------------------------------------------------------

    def apply(self, f: Rat) -> Rat:
        """Evaluate sum coeffs[i] * (d^i f) with d the designated derivation."""
        f = self.ctx.rat(f) if not isinstance(f, Rat) else f
        out = self.ctx.zero
        current = f
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                out = out + c * current
            if i < self.order:
                current = current.derive(self.deriv)
        return out

    # -- display ------------------------------------------------------------

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.order, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            negative = c.fe.numer.LC < 0
            if negative:
                c = -c
            if i == 0:
                term = str(c)
            else:
                dpow = "D" if i == 1 else f"D^{i}"
                if c.is_one():
                    term = dpow
                else:
                    cs = str(c)
                    if "+" in cs or (" - " in cs):
                        cs = f"({cs})"
                    term = f"{cs}*{dpow}"
            if not parts:
                parts.append(f"-{term}" if negative else term)
            else:
                parts.append(f"- {term}" if negative else f"+ {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"OreOperator[d/d{self.deriv}]({self})"


def ore_mul(L: OreOperator, M: OreOperator) -> OreOperator:
    return L * M


def right_divide(L: OreOperator, D: OreOperator) -> tuple[OreOperator, OreOperator]:
    """Quotient and remainder with L = Q*D + R and ord R < ord D."""
    L._check_compatible(D)
    if D.is_zero():
        raise OreError("right division by the zero operator")
    Q = OreOperator.zero(L.ctx, L.deriv)
    R = L
    while not R.is_zero() and R.order >= D.order:
        c = R.leading_coeff / D.leading_coeff
        k = R.order - D.order
        T = OreOperator.from_coeffs(L.ctx, L.deriv, [L.ctx.zero] * k + [c])
        Q = Q + T
        R = R - T * D
    return Q, R


def right_divides(D: OreOperator, L: OreOperator) -> bool:
    """True when L = Q*D exactly."""
    return right_divide(L, D)[1].is_zero()


def gcrd_lclm(L: OreOperator, M: OreOperator) -> tuple[OreOperator, OreOperator]:
    """Monic greatest common right divisor and least common left multiple.

    Extended Euclidean scheme: track cofactors u with r = u*L + v*M; the
    first vanishing remainder yields gcrd from its predecessor and lclm from
    its cofactor, so ord gcrd + ord lclm = ord L + ord M.
    """
    L._check_compatible(M)
    if L.is_zero() and M.is_zero():
        raise OreError("gcrd/lclm of two zero operators")
    if L.is_zero():
        return M.monic(), OreOperator.zero(L.ctx, L.deriv)
    if M.is_zero():
        return L.monic(), OreOperator.zero(L.ctx, L.deriv)
    r0, r1 = L, M
    u0 = OreOperator.identity(L.ctx, L.deriv)
    u1 = OreOperator.zero(L.ctx, L.deriv)
    while not r1.is_zero():
        q, r2 = right_divide(r0, r1)
        u2 = u0 - q * u1
        r0, r1, u0, u1 = r1, r2, u1, u2
    lclm_op = (u1 * L).monic()
    return r0.monic(), lclm_op


def gcrd(L: OreOperator, M: OreOperator) -> OreOperator:
    return gcrd_lclm(L, M)[0]


def lclm(L: OreOperator, M: OreOperator) -> OreOperator:
    return gcrd_lclm(L, M)[1]


# -- Wronskian machinery -------------------------------------------------------


def wronskian_matrix(
    ctx: FieldContext, deriv: str, gens: Sequence[Rat], rows: int | None = None
) -> list[list[Rat]]:
    """Rows are iterated derivatives d^i applied to each generator."""
    rows = len(gens) if rows is None else rows
    matrix = [list(gens)]
    for _ in range(rows - 1):
        matrix.append([g.derive(deriv) for g in matrix[-1]])
    return matrix


def wronskian_det(ctx: FieldContext, deriv: str, gens: Sequence[Rat]) -> Rat:
    return linalg.det(ctx, wronskian_matrix(ctx, deriv, gens))


def constant_span_basis(ctx: FieldContext, deriv: str, gens: Sequence[Rat]) -> list[Rat]:
    """Maximal subfamily independent over constants (Wronskian criterion)."""
    basis: list[Rat] = []
    for g in gens:
        if g.is_zero():
            continue
        if wronskian_det(ctx, deriv, basis + [g]).is_zero():
            continue
        basis.append(g)
    return basis


def annihilator_of_span(ctx: FieldContext, deriv: str, gens: Sequence[Rat]) -> OreOperator:
    """Monic operator of minimal order killing every generator.

    The order equals the Wronskian rank of the family.  When every
    generator vanishes the identity operator (order 0, kernel {0}) is
    returned, which callers should treat as the degenerate answer.
    """
    if not gens:
        raise OreError("annihilator of an empty family")
    basis = constant_span_basis(ctx, deriv, gens)
    if not basis:
        return OreOperator.identity(ctx, deriv)
    s = len(basis)
    # bordered Wronskian: the coefficient of D^i is the signed minor that
    # deletes the row of i-th derivatives and the symbolic last column
    full = wronskian_matrix(ctx, deriv, basis, rows=s + 1)
    coeffs = []
    for i in range(s + 1):
        minor = [full[r] for r in range(s + 1) if r != i]
        value = linalg.det(ctx, minor)
        sign = -1 if (i + s) % 2 else 1
        coeffs.append(value if sign == 1 else -value)
    op = OreOperator.from_coeffs(ctx, deriv, coeffs).monic()
    for g in gens:
        if not op.apply(g).is_zero():
            raise OreError(f"annihilator construction failed on generator {g}")
    return op
