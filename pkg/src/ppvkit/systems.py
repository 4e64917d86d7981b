"""Integrability conditions and rational completion search.

A parameterized linear system attaches one square matrix over the field to
each named derivation.  The system is completely integrable when every
ordered pair satisfies d_i A_j - d_j A_i = [A_i, A_j] with the commutator
[P, Q] = PQ - QP.  The solver searches for rational completions B_h of a
single matrix A: it posits pole orders at the poles of A (plus headroom)
and a polynomial tail, imposes d_x B_h - d_h A = [A, B_h] as an identity of
rational functions, and solves the resulting finite linear system over the
parameter field by exact elimination.

A failed search is a bounded-ansatz outcome, never a proof that no
completion exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from . import linalg
from .fieldcore import (
    FieldContext,
    FieldError,
    Rat,
    UnsupportedDenominatorError,
    denominator_lcm,
    partial_fractions_x,
    x_coefficients,
    x_poly_degree,
)

Matrix = list[list[Rat]]


# -- matrix helpers ------------------------------------------------------------


def mat_zero(ctx: FieldContext, n: int) -> Matrix:
    return [[ctx.zero for _ in range(n)] for _ in range(n)]


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n = len(A)
    m = len(B[0])
    k = len(B)
    return [
        [sum((A[i][l] * B[l][j] for l in range(k)), A[0][0].ctx.zero) for j in range(m)]
        for i in range(n)
    ]


def mat_scale(c: Rat, A: Matrix) -> Matrix:
    return [[c * a for a in row] for row in A]


def mat_derive(A: Matrix, name: str) -> Matrix:
    return [[a.derive(name) for a in row] for row in A]


def mat_is_zero(A: Matrix) -> bool:
    return all(a.is_zero() for row in A for a in row)


def commutator(A: Matrix, B: Matrix) -> Matrix:
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def mat_eq(A: Matrix, B: Matrix) -> bool:
    return mat_is_zero(mat_sub(A, B))


# -- data types ----------------------------------------------------------------


@dataclass(frozen=True)
class AnsatzBounds:
    """Search-space bounds for the rational completion ansatz.

    ``pole_headroom`` adds to the pole order of A at each of its poles;
    ``poly_degree`` bounds the polynomial tail (None means: one more than
    the degree of the polynomial part of A, since integrating the tail of
    A raises its degree by one); ``extra_poles`` adds candidate pole
    locations not visible in A, searched up to order ``pole_headroom``.
    """

    pole_headroom: int = 1
    poly_degree: Optional[int] = None
    extra_poles: tuple = ()

    def __post_init__(self):
        if self.pole_headroom < 0:
            raise FieldError("pole headroom must be nonnegative")
        if self.poly_degree is not None and self.poly_degree < 0:
            raise FieldError("polynomial degree bound must be nonnegative")


@dataclass
class ParamLinearSystem:
    """Square matrices over the field attached to named derivations."""

    ctx: FieldContext
    n: int
    matrices: dict[str, Matrix]

    def __post_init__(self):
        allowed = set(self.ctx.variables())
        for name, mat in self.matrices.items():
            if name not in allowed:
                raise FieldError(f"derivation {name!r} not declared in the field")
            if len(mat) != self.n or any(len(row) != self.n for row in mat):
                raise FieldError(f"matrix for {name!r} is not {self.n}x{self.n}")


@dataclass
class IntegrabilityReport:
    """Outcome of an integrability check or completion search."""

    verdict: str  # Integrable | ViolationsFound | NotFoundWithinAnsatz | IsomonodromicWithinAnsatz
    witnesses: dict[str, Matrix] = dc_field(default_factory=dict)
    violations: list[tuple[str, str, Matrix]] = dc_field(default_factory=list)
    notes: list[str] = dc_field(default_factory=list)


# -- integrability check ---------------------------------------------------------


def check_integrability(system: ParamLinearSystem) -> IntegrabilityReport:
    """Evaluate d_i A_j - d_j A_i - [A_i, A_j] for every ordered pair.

    The system is integrable exactly when all residual matrices vanish.
    """
    names = sorted(system.matrices)
    violations = []
    for i, di in enumerate(names):
        for dj in names:
            if di == dj:
                continue
            Ai, Aj = system.matrices[di], system.matrices[dj]
            residual = mat_sub(
                mat_sub(mat_derive(Aj, di), mat_derive(Ai, dj)),
                commutator(Ai, Aj),
            )
            if not mat_is_zero(residual):
                violations.append((di, dj, residual))
    if violations:
        return IntegrabilityReport("ViolationsFound", violations=violations)
    return IntegrabilityReport("Integrable", witnesses=dict(system.matrices))


# -- completion search ------------------------------------------------------------


def _pole_profile(ctx: FieldContext, A: Matrix):
    """Poles of A with maximal order across entries, plus max polynomial degree."""
    poles: dict[Rat, int] = {}
    poly_deg = 0
    for row in A:
        for entry in row:
            pf = partial_fractions_x(entry)
            if pf.remainder is not None:
                raise UnsupportedDenominatorError(pf.unsplit_factors)
            d = x_poly_degree(pf.poly_part)
            poly_deg = max(poly_deg, d)
            for term in pf.pole_terms:
                poles[term.root] = max(poles.get(term.root, 0), term.order)
    return poles, poly_deg


def default_poly_degree(poly_part_degree: int) -> int:
    """Degree bound for the polynomial tail: integration raises it by one."""
    return max(0, poly_part_degree + 1)


def _basis_functions(ctx: FieldContext, poles: dict[Rat, int], bounds: AnsatzBounds, poly_deg: int):
    """Scalar ansatz functions phi with their d/dx derivatives."""
    x = ctx.gen(ctx.var)
    J = bounds.pole_headroom
    functions = []
    all_poles = dict(poles)
    for extra in bounds.extra_poles:
        p = ctx.rat(extra) if not isinstance(extra, Rat) else extra
        all_poles.setdefault(p, 0)
    for p in sorted(all_poles, key=str):
        max_order = all_poles[p] + J
        for j in range(1, max_order + 1):
            phi = ctx.one / (x - p) ** j
            functions.append(phi)
    D = bounds.poly_degree if bounds.poly_degree is not None else default_poly_degree(poly_deg)
    for d in range(D + 1):
        functions.append(x ** d)
    return [(phi, phi.derive(ctx.var)) for phi in functions]


def _linear_rows(ctx: FieldContext, terms: list[Rat], rhs: Rat):
    """Turn sum u_k * terms[k] = rhs into rows over the parameter field.

    Clears the common denominator and matches coefficients of powers of the
    main variable.
    """
    clear = denominator_lcm(ctx, terms + [rhs])
    cleared_terms = [x_coefficients(g * clear) for g in terms]
    cleared_rhs = x_coefficients(rhs * clear)
    degrees = set(cleared_rhs)
    for c in cleared_terms:
        degrees.update(c)
    rows = []
    rhs_out = []
    for d in sorted(degrees):
        rows.append([c.get(d, ctx.zero) for c in cleared_terms])
        rhs_out.append(cleared_rhs.get(d, ctx.zero))
    return rows, rhs_out


def _solve_completion(
    ctx: FieldContext, A: Matrix, deriv: str, basis
) -> Optional[Matrix]:
    """Solve d_x B - d_h A = [A, B] for B in the span of the ansatz."""
    n = len(A)
    target = mat_derive(A, deriv)
    # contribution of unknown u at (phi, r, c): phi' E_rc - phi (A E_rc - E_rc A)
    unknowns = [(k, r, c) for k in range(len(basis)) for r in range(n) for c in range(n)]
    rows: list[list[Rat]] = []
    rhs: list[Rat] = []
    for i in range(n):
        for j in range(n):
            terms = []
            for (k, r, c) in unknowns:
                phi, dphi = basis[k]
                # entry (i, j) of phi' E_rc - phi [A, E_rc]
                value = ctx.zero
                if i == r and j == c:
                    value = value + dphi
                if j == c:
                    value = value - phi * A[i][r]
                if i == r:
                    value = value + phi * A[c][j]
                terms.append(value)
            r_rows, r_rhs = _linear_rows(ctx, terms, target[i][j])
            rows.extend(r_rows)
            rhs.extend(r_rhs)
    solution = linalg.solve_linear(ctx, rows, rhs)
    if solution is None:
        return None
    B = mat_zero(ctx, n)
    for value, (k, r, c) in zip(solution, unknowns):
        if not value.is_zero():
            phi, _ = basis[k]
            B[r][c] = B[r][c] + value * phi
    return B


def solve_complete_integrability(
    ctx: FieldContext,
    A: Matrix,
    derivs: Sequence[str],
    bounds: AnsatzBounds = AnsatzBounds(),
) -> IntegrabilityReport:
    """Search for matrices B_h completing d_x Y = A Y to an integrable system.

    On success the full pairwise integrability conditions are re-checked
    exactly before reporting witnesses.  A NotFoundWithinAnsatz verdict
    only says the bounded search failed.
    """
    for h in derivs:
        if h not in ctx.params:
            raise FieldError(f"derivation {h!r} is not a parameter")
    poles, poly_deg = _pole_profile(ctx, A)
    basis = _basis_functions(ctx, poles, bounds, poly_deg)
    witnesses: dict[str, Matrix] = {}
    for h in derivs:
        B = _solve_completion(ctx, A, h, basis)
        if B is None:
            return IntegrabilityReport(
                "NotFoundWithinAnsatz",
                notes=[
                    f"no completion for d/d{h} within pole headroom "
                    f"{bounds.pole_headroom} and polynomial degree "
                    f"{bounds.poly_degree if bounds.poly_degree is not None else default_poly_degree(poly_deg)}",
                    "bounded ansatz search; this is not a proof of non-integrability",
                ],
            )
        witnesses[h] = B
    candidate = ParamLinearSystem(ctx, len(A), {ctx.var: A, **witnesses})
    verification = check_integrability(candidate)
    if verification.verdict != "Integrable":
        return IntegrabilityReport(
            "NotFoundWithinAnsatz",
            notes=[
                "per-derivation completions exist but fail the pairwise "
                "parameter integrability conditions",
                "bounded ansatz search; this is not a proof of non-integrability",
            ],
        )
    return IntegrabilityReport("Integrable", witnesses=witnesses)


def isomonodromy_verdict(
    ctx: FieldContext,
    A: Matrix,
    derivs: Sequence[str],
    bounds: AnsatzBounds = AnsatzBounds(),
) -> IntegrabilityReport:
    """Completion search reported in the isomonodromy vocabulary.

    For families with only regular singular points, a rational completion
    exists exactly when the family is isomonodromic, so the rational ansatz
    is complete in that case; for irregular families the completion need
    not be rational in x and a NotFound verdict carries less weight.
    """
    report = solve_complete_integrability(ctx, A, derivs, bounds)
    if report.verdict == "Integrable":
        return IntegrabilityReport(
            "IsomonodromicWithinAnsatz",
            witnesses=report.witnesses,
            notes=report.notes,
        )
    return report
