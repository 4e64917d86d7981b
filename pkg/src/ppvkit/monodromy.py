"""Floating-point monodromy scanning along loops in the complex plane.

The symbolic side of the toolkit stays float-free; this module evaluates a
system matrix at exact rational parameter values (converted to floats only
at this boundary), transports a fundamental solution along a closed loop
with an adaptive embedded Runge-Kutta pair, and compares conjugation
invariants of the monodromy matrices across a parameter grid.

Base points and fundamental-matrix choices vary with the parameters, so
raw matrices are never compared; the characteristic polynomial
coefficients are conjugation invariant and base-point independent.  A
constant-invariants verdict is named ConsistentWithIsomonodromy because
constancy of the monodromy is a necessary condition only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .fieldcore import FieldContext, Rat, x_coefficients
from .systems import AnsatzBounds, Matrix, isomonodromy_verdict

CLEARANCE = 1e-3

CONSISTENT = "ConsistentWithIsomonodromy"
VARIES = "VariesWithParameter"


class PathTooCloseError(Exception):
    """The loop passes within the clearance of a pole (or the stepper collapsed)."""


class EvalError(Exception):
    """The parameter assignment hits a singularity of the coefficients."""


# -- loops ---------------------------------------------------------------------


@dataclass(frozen=True)
class LoopSpec:
    """A closed integration path: a circle split into arcs, or a polyline.

    The polyline is given by its vertices and is closed implicitly.
    Orientation -1 traverses the path backwards.
    """

    center: complex = 0j
    radius: float = 1.0
    segments: int = 16
    orientation: int = 1
    vertices: Optional[tuple[complex, ...]] = None

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.vertices is None:
            if self.radius <= 0 or self.segments < 1:
                raise ValueError("circle needs positive radius and at least one segment")
        elif len(self.vertices) < 3:
            raise ValueError("polyline loop needs at least three vertices")

    def base_point(self) -> complex:
        if self.vertices is not None:
            return self.vertices[0]
        return self.center + self.radius

    def segment_maps(self) -> list[tuple[Callable[[float], complex], Callable[[float], complex]]]:
        """(position, velocity) pairs, each parameterized over [0, 1]."""
        maps = []
        if self.vertices is not None:
            pts = list(self.vertices) + [self.vertices[0]]
            if self.orientation == -1:
                pts = pts[::-1]
            for a, b in zip(pts, pts[1:]):
                maps.append(self._line_map(a, b))
            return maps
        full = 2 * math.pi * self.orientation
        for k in range(self.segments):
            th0 = full * k / self.segments
            th1 = full * (k + 1) / self.segments
            maps.append(self._arc_map(th0, th1))
        return maps

    def _line_map(self, a: complex, b: complex):
        return (lambda s: a + (b - a) * s, lambda s: b - a)

    def _arc_map(self, th0: float, th1: float):
        c, r = self.center, self.radius

        def pos(s: float) -> complex:
            return c + r * cmath.exp(1j * (th0 + (th1 - th0) * s))

        def vel(s: float) -> complex:
            return r * 1j * (th1 - th0) * cmath.exp(1j * (th0 + (th1 - th0) * s))

        return pos, vel

    def clearance_to(self, point: complex) -> float:
        if self.vertices is not None:
            pts = list(self.vertices) + [self.vertices[0]]
            return min(
                _point_segment_distance(point, a, b) for a, b in zip(pts, pts[1:])
            )
        return abs(abs(point - self.center) - self.radius)

    def reversed(self) -> "LoopSpec":
        return LoopSpec(
            center=self.center,
            radius=self.radius,
            segments=self.segments,
            orientation=-self.orientation,
            vertices=self.vertices,
        )


def _point_segment_distance(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(p - a)
    s = max(0.0, min(1.0, ((p - a) * ab.conjugate()).real / denom))
    return abs(p - (a + s * ab))


# -- evaluation of the symbolic matrix -----------------------------------------


class SystemEvaluator:
    """A(x) as complex matrices, for one exact parameter assignment."""

    def __init__(self, ctx: FieldContext, A: Matrix, assignment: dict[str, Fraction]):
        self.n = len(A)
        missing = set(ctx.params) - set(assignment)
        if missing:
            raise EvalError(f"missing parameter values: {sorted(missing)}")
        self._entries = []
        self._poles: list[complex] = []
        for row in A:
            entry_row = []
            for entry in row:
                num, den = _substituted_coeff_arrays(ctx, entry, assignment)
                if not den.any():
                    raise EvalError(
                        f"denominator of {entry} vanishes identically at "
                        f"{_fmt_assignment(assignment)}"
                    )
                entry_row.append((num, den))
                if len(den) > 1:
                    self._poles.extend(np.roots(den[::-1]))
            self._entries.append(entry_row)

    def poles(self) -> list[complex]:
        return list(self._poles)

    def __call__(self, x: complex) -> np.ndarray:
        out = np.empty((self.n, self.n), dtype=complex)
        for i, row in enumerate(self._entries):
            for j, (num, den) in enumerate(row):
                out[i, j] = _horner(num, x) / _horner(den, x)
        return out


def _horner(coeffs: np.ndarray, x: complex) -> complex:
    acc = 0j
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def _substituted_coeff_arrays(ctx: FieldContext, entry: Rat, assignment: dict[str, Fraction]):
    pairs = [
        (ctx._gen_by_name[name], _to_qq(value)) for name, value in assignment.items()
    ]
    try:
        substituted = entry.fe.evaluate(pairs) if pairs else entry.fe
    except ZeroDivisionError:
        raise EvalError(
            f"coefficient {entry} is singular at {_fmt_assignment(assignment)}"
        ) from None
    if not hasattr(substituted, "numer"):  # ground value
        q = Fraction(int(substituted.numerator), int(substituted.denominator))
        return np.array([complex(q)]), np.array([1.0 + 0j])
    rat = Rat(ctx, substituted) if substituted.field is ctx._field else None
    if rat is None:
        # evaluation landed in the reduced field in x only
        num = _coeff_array_from_poly(substituted.numer)
        den = _coeff_array_from_poly(substituted.denom)
        return num, den
    num_c = x_coefficients(Rat(ctx, ctx._field(rat.fe.numer)))
    den_c = x_coefficients(Rat(ctx, ctx._field(rat.fe.denom)))
    return _coeff_array(num_c), _coeff_array(den_c)


def _to_qq(value: Fraction):
    from sympy import QQ

    return QQ(value.numerator, value.denominator)


def _coeff_array(coeffs: dict[int, Rat]) -> np.ndarray:
    if not coeffs:
        return np.array([0j])
    out = np.zeros(max(coeffs) + 1, dtype=complex)
    for d, c in coeffs.items():
        out[d] = complex(c.as_fraction())
    return out


def _coeff_array_from_poly(poly) -> np.ndarray:
    terms = list(poly.terms())
    if not terms:
        return np.array([0j])
    deg = max(m[0] for m, _ in terms)
    out = np.zeros(deg + 1, dtype=complex)
    for monom, coeff in terms:
        out[monom[0]] = complex(Fraction(int(coeff.numerator), int(coeff.denominator)))
    return out


def _fmt_assignment(assignment: dict[str, Fraction]) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(assignment.items()))


# -- adaptive transport ----------------------------------------------------------

# Dormand-Prince 5(4) tableau
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)


def _rk45_segment(f, W: np.ndarray, tol: float) -> np.ndarray:
    """Advance W' = f(s, W) over s in [0, 1] with local error <= tol."""
    s = 0.0
    h = 0.1
    min_step = 1e-13
    while s < 1.0:
        h = min(h, 1.0 - s)
        if h < min_step:
            raise PathTooCloseError("step size collapsed during transport")
        ks = []
        for i in range(7):
            Wi = W.copy()
            for j, a in enumerate(_DP_A[i]):
                if a:
                    Wi = Wi + h * a * ks[j]
            ks.append(f(s + _DP_C[i] * h, Wi))
        W5 = W.copy()
        W4 = W.copy()
        for k, b5, b4 in zip(ks, _DP_B5, _DP_B4):
            if b5:
                W5 = W5 + h * b5 * k
            if b4:
                W4 = W4 + h * b4 * k
        scale = tol * (1.0 + np.max(np.abs(W)))
        err = np.max(np.abs(W5 - W4))
        if err <= scale:
            s += h
            W = W5
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (scale / err) ** 0.2))
        else:
            factor = max(0.2, 0.9 * (scale / err) ** 0.2)
        h *= factor
    return W


def integrate_transfer(
    evaluator: SystemEvaluator, loop: LoopSpec, tol: float = 1e-9
) -> np.ndarray:
    """Transfer matrix of dW/dx = A(x) W along the loop, with W(start) = I.

    Raises PathTooCloseError when a pole of A sits within the clearance of
    the path.
    """
    for pole in evaluator.poles():
        if loop.clearance_to(pole) < CLEARANCE:
            raise PathTooCloseError(
                f"pole at {pole:.6g} is within {CLEARANCE} of the integration path"
            )
    W = np.eye(evaluator.n, dtype=complex)
    for pos, vel in loop.segment_maps():
        def f(s, Y, pos=pos, vel=vel):
            return evaluator(pos(s)) @ Y * vel(s)

        W = _rk45_segment(f, W, tol)
    return W


# -- scans -----------------------------------------------------------------------


@dataclass
class GridPointResult:
    assignment: dict[str, Fraction]
    matrix: Optional[np.ndarray] = None
    invariants: Optional[tuple[complex, ...]] = None
    error: Optional[str] = None


@dataclass
class MonodromyReport:
    points: list[GridPointResult]
    spread: float
    verdict: str
    eps: float
    tol: float

    def invariant_rows(self):
        return [p.invariants for p in self.points if p.invariants is not None]


def char_poly_invariants(W: np.ndarray) -> tuple[complex, ...]:
    """Non-leading characteristic polynomial coefficients (conjugation invariant)."""
    return tuple(np.poly(W)[1:])


def monodromy_scan(
    ctx: FieldContext,
    A: Matrix,
    loop: LoopSpec,
    grid: Sequence[dict[str, Fraction]],
    tol: float = 1e-9,
    eps: float = 1e-6,
) -> MonodromyReport:
    """Monodromy invariants across the parameter grid, with a spread verdict.

    Per-point failures are recorded, not fatal, unless every point fails.
    The spread is the maximum pairwise distance of invariant vectors,
    relative to their magnitude; at most eps means consistent with an
    isomonodromic family.
    """
    if not grid:
        raise ValueError("parameter grid must be nonempty")
    points = []
    for assignment in grid:
        result = GridPointResult(assignment=dict(assignment))
        try:
            evaluator = SystemEvaluator(ctx, A, assignment)
            W = integrate_transfer(evaluator, loop, tol)
            result.matrix = W
            result.invariants = char_poly_invariants(W)
        except (PathTooCloseError, EvalError) as exc:
            result.error = f"{type(exc).__name__}: {exc}"
        points.append(result)
    rows = [p.invariants for p in points if p.invariants is not None]
    if not rows:
        failures = "; ".join(p.error for p in points if p.error)
        raise EvalError(f"every grid point failed: {failures}")
    vecs = [np.asarray(r) for r in rows]
    scale = max(1.0, max(float(np.linalg.norm(v)) for v in vecs))
    spread = 0.0
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            spread = max(spread, float(np.linalg.norm(vecs[i] - vecs[j])))
    spread /= scale
    verdict = CONSISTENT if spread <= eps else VARIES
    return MonodromyReport(points=points, spread=spread, verdict=verdict, eps=eps, tol=tol)


# -- symbolic/numeric agreement ----------------------------------------------------


@dataclass
class CrossCheckReport:
    symbolic_verdict: str
    numeric_verdict: str
    agreement: str  # "agree" | "inconclusive" | "defect"
    spread: float
    notes: list[str] = dc_field(default_factory=list)


def cross_check(
    ctx: FieldContext,
    A: Matrix,
    derivs: Sequence[str],
    loop: LoopSpec,
    grid: Sequence[dict[str, Fraction]],
    bounds: AnsatzBounds = AnsatzBounds(),
    tol: float = 1e-9,
    eps: float = 1e-6,
) -> CrossCheckReport:
    """Run the symbolic completion search and the numeric scan side by side.

    Symbolic witnesses with numeric variation would be a soundness defect
    and are flagged as such; a failed bounded search with numerically
    constant invariants stays inconclusive.
    """
    symbolic = isomonodromy_verdict(ctx, A, derivs, bounds)
    numeric = monodromy_scan(ctx, A, loop, grid, tol, eps)
    notes = list(symbolic.notes)
    if symbolic.verdict == "IsomonodromicWithinAnsatz":
        if numeric.verdict == CONSISTENT:
            agreement = "agree"
        else:
            agreement = "defect"
            notes.append(
                "symbolic witnesses exist but numeric invariants vary: "
                "symbolic soundness defect"
            )
    else:
        if numeric.verdict == VARIES:
            agreement = "agree"
            notes.append("numeric variation matches the failed completion search")
        else:
            agreement = "inconclusive"
            notes.append(
                "bounded ansatz found nothing but numeric invariants look "
                "constant; larger bounds may be needed"
            )
    return CrossCheckReport(
        symbolic_verdict=symbolic.verdict,
        numeric_verdict=numeric.verdict,
        agreement=agreement,
        spread=numeric.spread,
        notes=notes,
    )
