"""Integrability checking and the rational completion search."""

import pytest

from ppvkit import (
    AnsatzBounds,
    FieldContext,
    ParamLinearSystem,
    UnsupportedDenominatorError,
    check_integrability,
    isomonodromy_verdict,
    parse_expr,
    solve_complete_integrability,
)
from ppvkit.fieldcore import shift_main_var
from ppvkit.systems import mat_eq, mat_is_zero, mat_sub

CTX2 = FieldContext(["t1", "t2"])
CTX = FieldContext(["t"])


def M(ctx, *rows):
    return [[parse_expr(s, ctx) for s in row] for row in rows]


DIAG_A = M(CTX2, ["t1", "0"], ["0", "t2"])
DIAG_B1 = M(CTX2, ["x", "0"], ["0", "0"])
DIAG_B2 = M(CTX2, ["0", "0"], ["0", "x"])


# -- check_integrability ------------------------------------------------------


def test_diag_family_is_integrable():
    system = ParamLinearSystem(CTX2, 2, {"x": DIAG_A, "t1": DIAG_B1, "t2": DIAG_B2})
    report = check_integrability(system)
    assert report.verdict == "Integrable"
    assert not report.violations


def test_zero_matrices_are_integrable():
    zero = M(CTX, ["0", "0"], ["0", "0"])
    system = ParamLinearSystem(CTX, 2, {"x": zero, "t": zero})
    assert check_integrability(system).verdict == "Integrable"


def test_nilpotent_pair_violates():
    A = M(CTX, ["0", "1"], ["0", "0"])
    B = M(CTX, ["0", "0"], ["1", "0"])
    report = check_integrability(ParamLinearSystem(CTX, 2, {"x": A, "t": B}))
    assert report.verdict == "ViolationsFound"
    assert all(not mat_is_zero(R) for _, _, R in report.violations)
    # the residual is the (nonzero) commutator here, derivative terms vanish
    pairs = {(i, j) for i, j, _ in report.violations}
    assert ("x", "t") in pairs and ("t", "x") in pairs


# -- solve_complete_integrability ------------------------------------------------


def test_diag_example_with_explicit_bounds():
    report = solve_complete_integrability(
        CTX2, DIAG_A, ["t1", "t2"], AnsatzBounds(pole_headroom=0, poly_degree=1)
    )
    assert report.verdict == "Integrable"
    assert mat_eq(report.witnesses["t1"], DIAG_B1)
    assert mat_eq(report.witnesses["t2"], DIAG_B2)


def test_diag_example_with_default_bounds():
    report = solve_complete_integrability(CTX2, DIAG_A, ["t1", "t2"])
    assert report.verdict == "Integrable"
    system = ParamLinearSystem(CTX2, 2, {"x": DIAG_A, **report.witnesses})
    assert check_integrability(system).verdict == "Integrable"


def test_scalar_residue_obstruction():
    A = M(CTX, ["t/x"])
    for bounds in (AnsatzBounds(), AnsatzBounds(pole_headroom=3, poly_degree=4)):
        report = solve_complete_integrability(CTX, A, ["t"], bounds)
        assert report.verdict == "NotFoundWithinAnsatz"
        assert any("not a proof" in note for note in report.notes)


def test_parameter_free_matrix_completes_with_zero():
    A = M(CTX, ["1/x"])
    report = solve_complete_integrability(CTX, A, ["t"])
    assert report.verdict == "Integrable"
    assert mat_is_zero(report.witnesses["t"])


def test_unsupported_denominator_is_rejected():
    A = M(CTX, ["t/(x^2 + t^2 + 1)"])
    with pytest.raises(UnsupportedDenominatorError):
        solve_complete_integrability(CTX, A, ["t"])


def test_witnesses_always_reverify():
    # a parameter-coupled family: A = diag(t, 2t) has completion diag(x, 2x)
    A = M(CTX, ["t", "0"], ["0", "2*t"])
    report = solve_complete_integrability(CTX, A, ["t"])
    assert report.verdict == "Integrable"
    system = ParamLinearSystem(CTX, 2, {"x": A, **report.witnesses})
    assert check_integrability(system).verdict == "Integrable"


def test_translation_invariance_of_verdict():
    samples = [
        M(CTX, ["t/x"]),
        M(CTX, ["t", "0"], ["0", "-t"]),
        M(CTX, ["0", "1"], ["t/x", "0"]),
        M(CTX, ["1/(x-2)"]),
    ]
    c = CTX.one  # translate x -> x + 1
    for A in samples:
        before = solve_complete_integrability(CTX, A, ["t"]).verdict
        shifted = [[shift_main_var(e, c) for e in row] for row in A]
        after = solve_complete_integrability(CTX, shifted, ["t"]).verdict
        assert before == after


def test_monotone_under_bound_enlargement():
    samples = [
        M(CTX, ["t/x"]),
        M(CTX, ["t", "0"], ["0", "-t"]),
        M(CTX, ["t/(x-1)"]),
        M(CTX, ["0", "1"], ["t/x", "0"]),
    ]
    small = AnsatzBounds(pole_headroom=1, poly_degree=1)
    big = AnsatzBounds(pole_headroom=2, poly_degree=3)
    for A in samples:
        v_small = solve_complete_integrability(CTX, A, ["t"], small).verdict
        v_big = solve_complete_integrability(CTX, A, ["t"], big).verdict
        if v_small == "Integrable":
            assert v_big == "Integrable"


def test_extra_poles_enlarge_the_ansatz():
    A = M(CTX, ["t/x"])
    bounds = AnsatzBounds(pole_headroom=1, extra_poles=(CTX.one,))
    report = solve_complete_integrability(CTX, A, ["t"], bounds)
    assert report.verdict == "NotFoundWithinAnsatz"  # still obstructed


# -- isomonodromy relabeling -------------------------------------------------------


def test_isomonodromy_vocabulary():
    assert isomonodromy_verdict(CTX2, DIAG_A, ["t1", "t2"]).verdict == "IsomonodromicWithinAnsatz"
    assert isomonodromy_verdict(CTX, M(CTX, ["t/x"]), ["t"]).verdict == "NotFoundWithinAnsatz"
    assert isomonodromy_verdict(CTX, M(CTX, ["1/x"]), ["t"]).verdict == "IsomonodromicWithinAnsatz"


def test_bad_derivation_name():
    from ppvkit.fieldcore import FieldError

    with pytest.raises(FieldError):
        solve_complete_integrability(CTX, M(CTX, ["t"]), ["x"])


def test_system_shape_validation():
    from ppvkit.fieldcore import FieldError

    with pytest.raises(FieldError):
        ParamLinearSystem(CTX, 2, {"x": M(CTX, ["t"])})
    with pytest.raises(FieldError):
        ParamLinearSystem(CTX, 1, {"u": M(CTX, ["t"])})