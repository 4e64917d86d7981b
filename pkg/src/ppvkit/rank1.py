"""Parameterized Picard-Vessiot groups of rank-1 equations over Q(t)(x).

Additive case dy/dx = a: after splitting off an exact derivative (Hermite
reduction), only the simple-pole residues b_1,...,b_r matter, and the group
is the kernel of the minimal operator annihilating their span over
constants.  Multiplicative case dy/dx = a*y: the polynomial part and the
higher-order poles integrate to a rational exponent; the simple-pole
residues become exponents of the solution's power-product factors.  Purely
rational residues give a finite cyclic group (or the constant group when an
exponential factor is present); a nonconstant residue b contributes the
condition L(f'/f) = 0 with L the annihilator of the span of the residue
derivatives.

Cases the classification does not settle symbolically are reported as
flagged upper bounds rather than guesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Union

from . import linalg
from .fieldcore import (
    FieldContext,
    FieldError,
    Rat,
    denominator_lcm,
    hermite_reduce_x,
    simple_pole_residues,
)
from .groups import AlgebraicGroupTag, GaSubgroup, GmSubgroup, zariski_closure
from .ore import annihilator_of_span

FLAG_UPPER_BOUND = "UpperBoundOnly"
FLAG_MIXED_RESIDUES = "MixedConstantNonconstantResidues"
FLAG_RATIONAL_RELATION = "RationalRelationDetected"


@dataclass(frozen=True)
class Rank1Answer:
    """Group descriptor plus the reduction trace that produced it."""

    group: Union[GaSubgroup, GmSubgroup]
    integrated_part: Rat
    residues: tuple[tuple[Rat, Rat], ...]  # (pole, residue) surviving reduction
    exponential_part_present: bool
    caveats: tuple[str, ...] = ()


def _single_param(a: Rat) -> str:
    ctx = a.ctx
    if len(ctx.params) != 1:
        raise FieldError(
            f"rank-1 group computation needs exactly one parameter, got {ctx.params}"
        )
    return ctx.params[0]


def additive_group(a: Rat) -> Rank1Answer:
    """PPV group of dy/dx = a as a subgroup of the additive line.

    The answer is unconditional: adding an exact derivative d/dx(R) does
    not change the group, and the surviving residues span it over
    constants.
    """
    deriv = _single_param(a)
    ctx = a.ctx
    R, residual = hermite_reduce_x(a)
    residues = simple_pole_residues(residual)
    values = [b for _, b in residues]
    if not values:
        group = GaSubgroup.trivial(ctx, deriv)
    else:
        group = GaSubgroup.kernel(annihilator_of_span(ctx, deriv, values))
    return Rank1Answer(
        group=group,
        integrated_part=R,
        residues=tuple(residues),
        exponential_part_present=False,
    )


def _rational_relation_exists(ctx: FieldContext, values: list[Rat]) -> bool:
    """Is some nontrivial Q-combination of the values constant?

    Equivalently: are the derivatives Q-linearly dependent?  Detected by
    exact rank computation on the cleared coefficient vectors.
    """
    derivs = [v.derive(ctx.params[0]) for v in values]
    if len(derivs) < 2:
        return False
    delta = denominator_lcm(ctx, derivs)
    monomials: dict[tuple, int] = {}
    vectors = []
    for d in derivs:
        cleared = (d * delta).fe
        scale = Fraction(int(cleared.denom.LC.numerator), int(cleared.denom.LC.denominator))
        entries = {}
        for monom, coeff in cleared.numer.terms():
            idx = monomials.setdefault(monom, len(monomials))
            entries[idx] = Fraction(int(coeff.numerator), int(coeff.denominator)) / scale
        vectors.append(entries)
    cols = len(monomials)
    rows = [[ctx.rat(vec.get(j, Fraction(0))) for j in range(cols)] for vec in vectors]
    return linalg.rank(ctx, rows) < len(vectors)


def multiplicative_group(a: Rat) -> Rank1Answer:
    """PPV group of dy/dx = a*y as a subgroup of the multiplicative line.

    Residues in Q cut out torsion; nonconstant residues impose the
    logarithmic-derivative condition through the annihilator of their
    derivatives.  Repeated residues at distinct poles are deduplicated
    first; a power product with equal exponents behaves as a single
    character, not as a relation.
    """
    deriv = _single_param(a)
    ctx = a.ctx
    R, residual = hermite_reduce_x(a)
    residues = simple_pole_residues(residual)
    exponential = not R.is_zero()
    values = [b for _, b in residues]
    constant = [b for b in values if b.is_constant()]
    nonconstant = [b for b in values if not b.is_constant()]

    caveats: list[str] = []
    if not nonconstant:
        if not exponential:
            n = lcm(*(b.as_fraction().denominator for b in constant)) if constant else 1
            group = GmSubgroup.finite_cyclic(n)
        else:
            # rational exponents plus a nonzero exponential factor: the
            # torsion refinement is not resolved symbolically
            caveats.append(FLAG_UPPER_BOUND)
            group = GmSubgroup.constants(ctx, deriv, upper_bound_only=True)
    else:
        deduped: list[Rat] = []
        for b in nonconstant:
            if b not in deduped:
                deduped.append(b)
        if constant:
            caveats.extend([FLAG_MIXED_RESIDUES, FLAG_UPPER_BOUND])
        if _rational_relation_exists(ctx, deduped):
            caveats.append(FLAG_RATIONAL_RELATION)
            if FLAG_UPPER_BOUND not in caveats:
                caveats.append(FLAG_UPPER_BOUND)
        L = annihilator_of_span(ctx, deriv, [b.derive(deriv) for b in deduped])
        group = GmSubgroup.log_kernel(L, upper_bound_only=bool(caveats))
    return Rank1Answer(
        group=group,
        integrated_part=R,
        residues=tuple(residues),
        exponential_part_present=exponential,
        caveats=tuple(caveats),
    )


def classical_pv_group(answer: Rank1Answer) -> AlgebraicGroupTag:
    """Zariski closure of the answer: the classical Picard-Vessiot group
    of the unparameterized specialization family."""
    return zariski_closure(answer.group)
