"""Partial trichotomy for traceless 2x2 parameterized systems.

For A in sl2 over Q(t)(x) the PPV group is either all of SL2, or contains a
solvable subgroup of finite index, or is conjugate to SL2(C); the third
case is equivalent to complete integrability, and reducibility (a rational
invariant line) certifies the second.  The decision procedure here is
deliberately partial: it runs the integrability search, then a
Kovacic-style rational eigen-line search seeded with indicial data at
simple poles, and otherwise reports a generic candidate or an honest
Unknown listing every skipped subsearch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Optional

from . import linalg
from .fieldcore import (
    FieldContext,
    FieldError,
    Rat,
    rat_sqrt,
    x_coefficients,
)
from .systems import (
    AnsatzBounds,
    Matrix,
    _linear_rows,
    _pole_profile,
    check_integrability,
    mat_derive,
    mat_is_zero,
    ParamLinearSystem,
    solve_complete_integrability,
)

COMPLETELY_INTEGRABLE = "CompletelyIntegrable"
REDUCIBLE_SOLVABLE = "ReducibleSolvable"
GENERIC_SL2 = "GenericSL2Candidate"
UNKNOWN = "Unknown"


@dataclass
class TrichotomyVerdict:
    kind: str
    witnesses: Optional[dict[str, Matrix]] = None
    eigenvector: Optional[list[Rat]] = None
    exponent: Optional[Rat] = None
    reasons: tuple[str, ...] = ()


def _quadratic_roots(ctx: FieldContext, tr: Rat, det: Rat) -> Optional[list[Rat]]:
    """Roots of z^2 - tr z + det inside the field, or None."""
    disc = tr * tr - 4 * det
    s = rat_sqrt(disc)
    if s is None:
        return None
    roots = [(tr + s) / 2, (tr - s) / 2]
    return roots[:1] if roots[0] == roots[1] else roots


def _poly_part_matrix(ctx: FieldContext, A: Matrix) -> Matrix:
    from .fieldcore import partial_fractions_x

    return [[partial_fractions_x(entry).poly_part for entry in row] for row in A]


def _residue_matrix(ctx: FieldContext, A: Matrix, pole: Rat) -> Matrix:
    from .fieldcore import simple_pole_residues

    out = []
    for row in A:
        out_row = []
        for entry in row:
            res = ctx.zero
            for root, value in simple_pole_residues(entry):
                if root == pole:
                    res = value
            out_row.append(res)
        out.append(out_row)
    return out


def _eigenline_search(
    ctx: FieldContext, A: Matrix, degree_cap: int, reasons: list[str]
) -> Optional[tuple[list[Rat], Rat]]:
    """Find polynomial v (degree <= cap) and rational lam with (d/dx + A)v = lam v.

    Candidate pole parts of lam are eigenvalues of the residue matrices at
    simple poles; candidate polynomial parts are eigenvalues of the
    polynomial part of A.  Skipped candidate sources are recorded.
    """
    x = ctx.gen(ctx.var)
    poles, _ = _pole_profile(ctx, A)

    pole_choices: list[list[Rat]] = []
    for p in sorted(poles, key=str):
        if poles[p] > 1:
            reasons.append(
                f"pole at {p} has order {poles[p]} > 1; indicial candidates unavailable"
            )
            continue
        R = _residue_matrix(ctx, A, p)
        tr = R[0][0] + R[1][1]
        det = R[0][0] * R[1][1] - R[0][1] * R[1][0]
        eigs = _quadratic_roots(ctx, tr, det)
        if eigs is None:
            reasons.append(
                f"residue-matrix eigenvalues at pole {p} are not in the parameter field"
            )
            continue
        pole_choices.append([e / (x - p) for e in sorted(eigs, key=str)])

    mu_candidates: list[Rat] = [ctx.zero]
    P = _poly_part_matrix(ctx, A)
    if not mat_is_zero(P):
        tr = P[0][0] + P[1][1]
        det = P[0][0] * P[1][1] - P[0][1] * P[1][0]
        eigs = _quadratic_roots(ctx, tr, det)
        if eigs is None:
            reasons.append(
                "polynomial-part eigenvalues are not in the parameter field"
            )
        else:
            for e in sorted(eigs, key=str):
                if e not in mu_candidates:
                    mu_candidates.append(e)

    seen: set[str] = set()
    for combo in itertools.product(*pole_choices) if pole_choices else [()]:
        for mu in mu_candidates:
            lam = sum(combo, ctx.zero) + mu
            key = str(lam)
            if key in seen:
                continue
            seen.add(key)
            found = _solve_eigenline(ctx, A, lam, degree_cap)
            if found is not None:
                return found, lam
    return None


def _solve_eigenline(
    ctx: FieldContext, A: Matrix, lam: Rat, degree_cap: int
) -> Optional[list[Rat]]:
    """Nonzero polynomial solution of (d/dx + A)v = lam v, or None."""
    x = ctx.gen(ctx.var)
    unknowns = [(r, d) for r in range(2) for d in range(degree_cap + 1)]
    rows: list[list[Rat]] = []
    for i in range(2):
        terms = []
        for (r, d) in unknowns:
            g = A[i][r] * x ** d - (lam * x ** d if i == r else ctx.zero)
            if i == r and d >= 1:
                g = g + d * x ** (d - 1)
            terms.append(g)
        r_rows, _ = _linear_rows(ctx, terms, ctx.zero)
        rows.extend(r_rows)
    basis = linalg.nullspace(ctx, rows, len(unknowns))
    if not basis:
        return None
    coeffs = basis[0]
    v = [ctx.zero, ctx.zero]
    for value, (r, d) in zip(coeffs, unknowns):
        if not value.is_zero():
            v[r] = v[r] + value * x ** d
    if v[0].is_zero() and v[1].is_zero():
        return None
    return v


def _verify_eigenline(ctx: FieldContext, A: Matrix, v: list[Rat], lam: Rat) -> bool:
    lhs = [
        v[0].derive(ctx.var) + A[0][0] * v[0] + A[0][1] * v[1],
        v[1].derive(ctx.var) + A[1][0] * v[0] + A[1][1] * v[1],
    ]
    return (lhs[0] - lam * v[0]).is_zero() and (lhs[1] - lam * v[1]).is_zero()


def classify_2x2(
    ctx: FieldContext,
    A: Matrix,
    bounds: AnsatzBounds = AnsatzBounds(),
    degree_cap: int = 5,
) -> TrichotomyVerdict:
    """Decide the trichotomy for a traceless 2x2 matrix, partially.

    Pipeline: (1) rational completion search; (2) rational eigen-line
    search with indicial candidates; (3) generic candidate, downgraded to
    Unknown when candidate sources had to be skipped.  Every positive
    verdict re-verifies its witness by exact substitution.

    A parameter-free matrix is completely integrable for free (zero
    witnesses), which says nothing about the group; for such inputs the
    eigen-line search runs first and the vacuous integrability verdict is
    the fallback.
    """
    if len(A) != 2 or any(len(row) != 2 for row in A):
        raise FieldError("expected a 2x2 matrix")
    if not (A[0][0] + A[1][1]).is_zero():
        raise FieldError("matrix must be traceless")
    if len(ctx.params) != 1:
        raise FieldError("classification needs exactly one parameter")
    deriv = ctx.params[0]

    parameter_free = mat_is_zero(mat_derive(A, deriv))
    if not parameter_free:
        report = solve_complete_integrability(ctx, A, [deriv], bounds)
        if report.verdict == "Integrable":
            candidate = ParamLinearSystem(ctx, 2, {ctx.var: A, **report.witnesses})
            if check_integrability(candidate).verdict != "Integrable":
                raise FieldError("completion witnesses failed re-verification")
            return TrichotomyVerdict(COMPLETELY_INTEGRABLE, witnesses=report.witnesses)

    reasons: list[str] = []
    found = _eigenline_search(ctx, A, degree_cap, reasons)
    if found is not None:
        v, lam = found
        if not _verify_eigenline(ctx, A, v, lam):
            raise FieldError("eigen-line witness failed re-verification")
        return TrichotomyVerdict(
            REDUCIBLE_SOLVABLE, eigenvector=v, exponent=lam, reasons=tuple(reasons)
        )
    if parameter_free:
        zero = [[ctx.zero, ctx.zero], [ctx.zero, ctx.zero]]
        return TrichotomyVerdict(COMPLETELY_INTEGRABLE, witnesses={deriv: zero})
    if reasons:
        return TrichotomyVerdict(UNKNOWN, reasons=tuple(reasons))
    return TrichotomyVerdict(GENERIC_SL2)


def interpret_verdict(v: TrichotomyVerdict) -> str:
    """Human reading of the verdict in Galois-theoretic language."""
    if v.kind == COMPLETELY_INTEGRABLE:
        return (
            "PPV group conjugate to SL2(C); isomonodromic family "
            "(regular-singular reading)"
        )
    if v.kind == REDUCIBLE_SOLVABLE:
        return (
            "PPV group lies in a Borel subgroup; solutions are "
            "parameterized liouvillian"
        )
    if v.kind == GENERIC_SL2:
        return (
            "candidate PPV group SL2(k0) or a proper Zariski-dense "
            "subgroup; not decided"
        )
    skipped = "; ".join(v.reasons) if v.reasons else "no subsearch applied"
    return f"not decided; skipped subsearches: {skipped}"
