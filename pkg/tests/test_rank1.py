"""Rank-1 PPV group computation, additive and multiplicative."""

from fractions import Fraction

import pytest

from ppvkit import FieldContext, OreOperator, parse_expr
from ppvkit.fieldcore import FieldError, UnsupportedDenominatorError
from ppvkit.groups import GaSubgroup, GmSubgroup
from ppvkit.ore import annihilator_of_span, constant_span_basis
from ppvkit.rank1 import (
    FLAG_MIXED_RESIDUES,
    FLAG_RATIONAL_RELATION,
    FLAG_UPPER_BOUND,
    additive_group,
    classical_pv_group,
    multiplicative_group,
)
from support import RandomRats

CTX = FieldContext(["t"])
X, T = CTX.gen("x"), CTX.gen("t")
D = OreOperator.d(CTX, "t")


def e(src):
    return parse_expr(src, CTX)


# -- additive case ------------------------------------------------------------


def test_additive_line_of_constant_multiples():
    ans = additive_group(e("t/(x-1)"))
    assert ans.group == GaSubgroup.kernel(D - OreOperator.from_coeffs(CTX, "t", [CTX.one / T]))
    assert [(c.as_fraction(), str(b)) for c, b in ans.residues] == [(Fraction(1), "t")]
    assert not ans.caveats


def test_additive_rank_two():
    ans = additive_group(e("1/(x-1) + t/(x-2)"))
    assert ans.group.operator == D * D
    assert ans.group.operator.order == 2


def test_additive_fully_integrable():
    ans = additive_group(e("x^3 + 1/(x-5)^2"))
    assert ans.group.is_trivial
    assert not ans.residues


def test_additive_order_equals_wronskian_rank():
    rnd = RandomRats(CTX, seed=31)
    for _ in range(12):
        residues = [rnd.param_poly(max_deg=2) for _ in range(rnd.rng.randint(1, 3))]
        a = CTX.zero
        for i, b in enumerate(residues):
            a = a + b / (X - (i + 1))
        ans = additive_group(a)
        nonzero = [b for b in residues if not b.is_zero()]
        expected = len(constant_span_basis(CTX, "t", nonzero))
        if expected == 0:
            assert ans.group.is_trivial
        else:
            assert ans.group.operator.order == expected


def test_additive_invariant_under_exact_derivatives():
    rnd = RandomRats(CTX, seed=17)
    a = e("t/(x-1) + t^2/(x-2)")
    base = additive_group(a).group
    for _ in range(10):
        num = rnd.param_poly() + rnd.rng.randint(0, 2) * X ** rnd.rng.randint(1, 3)
        den = X - rnd.rng.randint(2, 5) if rnd.rng.random() < 0.5 else CTX.one
        R = num / den
        assert additive_group(a + R.derive("x")).group == base


def test_additive_rejects_multi_parameter_fields():
    ctx2 = FieldContext(["t1", "t2"])
    with pytest.raises(FieldError):
        additive_group(parse_expr("t1/x", ctx2))


def test_additive_rejects_unsplittable():
    with pytest.raises(UnsupportedDenominatorError):
        additive_group(e("t/(x^2 + t^2 + 1)"))


# -- multiplicative case ---------------------------------------------------------


def test_mult_the_x_to_the_t_family():
    ans = multiplicative_group(e("t/x"))
    assert ans.group == GmSubgroup.log_kernel(D)
    assert not ans.caveats
    assert not ans.exponential_part_present


def test_mult_classical_torsion():
    ans = multiplicative_group(e("(2/3)/x"))
    assert ans.group == GmSubgroup.finite_cyclic(3)
    assert not ans.caveats


def test_mult_torsion_lcm():
    ans = multiplicative_group(e("(1/2)/x + (1/3)/(x-1)"))
    assert ans.group == GmSubgroup.finite_cyclic(6)


def test_mult_integer_residues_are_trivial():
    ans = multiplicative_group(e("2/x + 3/(x-1)"))
    assert ans.group == GmSubgroup.finite_cyclic(1)


def test_mult_duplicate_residues_are_not_a_relation():
    ans = multiplicative_group(e("t/x + t/(x-1)"))
    assert ans.group == GmSubgroup.log_kernel(D)
    assert not ans.caveats


def test_mult_rational_exponent_with_exponential_part():
    ans = multiplicative_group(e("(1/2)/x + x"))
    assert ans.group.is_constants
    assert ans.group.upper_bound_only
    assert ans.caveats == (FLAG_UPPER_BOUND,)
    assert ans.exponential_part_present


def test_mult_relation_among_residues_is_flagged():
    ans = multiplicative_group(e("t/x + (t+5)/(x-1)"))
    assert FLAG_RATIONAL_RELATION in ans.caveats
    assert FLAG_UPPER_BOUND in ans.caveats
    assert ans.group.upper_bound_only


def test_mult_mixed_residues_are_flagged():
    ans = multiplicative_group(e("(1/2)/x + t/(x-1)"))
    assert FLAG_MIXED_RESIDUES in ans.caveats
    assert FLAG_UPPER_BOUND in ans.caveats


def test_mult_independent_residues():
    ans = multiplicative_group(e("t/x + t^2/(x-1)"))
    assert ans.group.operator == D * D
    assert not ans.caveats


def test_mult_scaling_behavior():
    # case (a): scaling by q in Q rescales the torsion order predictably
    ans = multiplicative_group(e("(1/2)/x"))
    scaled = multiplicative_group(e("(3/2)/x"))
    assert ans.group == GmSubgroup.finite_cyclic(2) and scaled.group == GmSubgroup.finite_cyclic(2)
    third = multiplicative_group(e("(1/6)/x"))
    assert third.group == GmSubgroup.finite_cyclic(6)
    # case (c): a rational scalar leaves the annihilator kernel unchanged
    base = multiplicative_group(e("t/x")).group
    assert multiplicative_group(e("(5*t)/x")).group == base
    values = [T.derive("t"), (5 * T).derive("t")]
    assert annihilator_of_span(CTX, "t", values[:1]) == annihilator_of_span(CTX, "t", values[1:])


def test_caveats_imply_upper_bound_descriptor():
    for src in ("(1/2)/x + t/(x-1)", "t/x + (t+5)/(x-1)", "(1/2)/x + x"):
        ans = multiplicative_group(e(src))
        assert bool(ans.caveats) == ans.group.upper_bound_only
        if ans.caveats:
            assert FLAG_UPPER_BOUND in ans.caveats


# -- classical closure --------------------------------------------------------------


def test_closure_of_answers():
    assert str(classical_pv_group(multiplicative_group(e("t/x")))) == "FullGm"
    assert str(classical_pv_group(multiplicative_group(e("(2/3)/x")))) == "FiniteCyclic(3)"
    assert str(classical_pv_group(additive_group(e("t/(x-1)")))) == "FullGa"


def test_closure_of_nonzero_additive_groups_is_always_full():
    for src in ("t/(x-1)", "1/(x-1) + t/(x-2)", "t^2/x"):
        ans = additive_group(e(src))
        assert str(classical_pv_group(ans)) == "FullGa"
