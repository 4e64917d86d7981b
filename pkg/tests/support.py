"""Shared generators for randomized and property-based tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from ppvkit import FieldContext, OreOperator
from ppvkit.fieldcore import Rat


def poly_from_terms(ctx: FieldContext, terms) -> Rat:
    """terms: iterable of (coeff, exponent tuple over ctx.variables())."""
    total = ctx.zero
    gens = [ctx.gen(name) for name in ctx.variables()]
    for coeff, exps in terms:
        monom = ctx.rat(coeff)
        for g, e in zip(gens, exps):
            monom = monom * g ** e
        total = total + monom
    return total


def rat_strategy(ctx: FieldContext, max_deg: int = 2, max_terms: int = 3):
    nvars = len(ctx.variables())
    term = st.tuples(
        st.integers(-4, 4),
        st.tuples(*[st.integers(0, max_deg) for _ in range(nvars)]),
    )
    terms = st.lists(term, min_size=1, max_size=max_terms)

    def build(num_terms, den_terms):
        num = poly_from_terms(ctx, num_terms)
        den = poly_from_terms(ctx, den_terms)
        if den.is_zero():
            den = ctx.one
        return num / den

    return st.builds(build, terms, terms)


def nonzero_rat_strategy(ctx: FieldContext, **kw):
    return rat_strategy(ctx, **kw).filter(lambda r: not r.is_zero())


class RandomRats:
    """Seeded generator of small field elements and operators."""

    def __init__(self, ctx: FieldContext, seed: int = 0):
        self.ctx = ctx
        self.rng = random.Random(seed)

    def param_poly(self, max_deg: int = 2) -> Rat:
        t = self.ctx.gen(self.ctx.params[0])
        total = self.ctx.zero
        for i in range(max_deg + 1):
            total = total + self.ctx.rat(self.rng.randint(-3, 3)) * t ** i
        return total

    def param_rat(self, denominator_chance: float = 0.2) -> Rat:
        num = self.param_poly()
        if self.rng.random() < denominator_chance:
            t = self.ctx.gen(self.ctx.params[0])
            den = t + self.rng.randint(0, 2) if self.rng.random() < 0.5 else t
            return num / den
        return num

    def nonzero_param_rat(self, **kw) -> Rat:
        while True:
            r = self.param_rat(**kw)
            if not r.is_zero():
                return r

    def operator(self, deriv: str, max_order: int = 2) -> OreOperator:
        order = self.rng.randint(0, max_order)
        coeffs = [self.param_rat() for _ in range(order + 1)]
        coeffs[-1] = self.nonzero_param_rat()
        return OreOperator.from_coeffs(self.ctx, deriv, coeffs)

    def nonzero_operator(self, deriv: str, **kw) -> OreOperator:
        while True:
            op = self.operator(deriv, **kw)
            if not op.is_zero():
                return op
