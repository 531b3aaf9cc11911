"""Expression evaluation, Weyl twisting, residues, and regularity slopes."""

import random

import pytest

from dynhecke import (
    Const,
    EvalPoint,
    HigherOrderPoleError,
    LinearForm,
    NearDivisorError,
    Prod,
    Quot,
    Sum,
    ThetaOf,
    ThetaParams,
    build_root_datum,
    denominator_forms,
    evaluate,
    is_regular_along,
    proportional,
    residue_along,
    sample_generic_point,
    theta,
    transform_point,
    twist,
    weyl_group,
)
from dynhecke.expr import GuardRejectionError, h_linear, lam_linear, slice_point, z_linear

PARAMS = ThetaParams()
H = 0.2173 + 0.1409j

RD = build_root_datum("A2")
W = weyl_group(RD)
ALPHA = RD.simple_roots[0]
ALPHAV = RD.simple_coroots[0]
Z_A = z_linear(ALPHA)
L_A = lam_linear(ALPHAV)
HH = h_linear(2)


def point(seed=0, guards=()):
    return sample_generic_point(RD.rank, guards, seed, PARAMS, H)


def test_const_eval():
    assert evaluate(Const(2.5 - 1j), point(), PARAMS) == 2.5 - 1j


def test_quotient_of_equal_subtrees_is_one():
    e = Quot(ThetaOf(Z_A), ThetaOf(Z_A))
    p = point(guards=[Z_A])
    assert abs(evaluate(e, p, PARAMS) - 1.0) < 1e-15


def test_theta_of_form_matches_flat_evaluation():
    # oracle: evaluate the linear form by hand, then call theta on the value
    form = Z_A - L_A
    e = ThetaOf(form)
    for seed in range(5):
        p = point(seed)
        flat = sum(c * zi for c, zi in zip(ALPHA, p.z)) - sum(
            c * li for c, li in zip(ALPHAV, p.lam)
        )
        assert abs(evaluate(e, p, PARAMS) - theta(flat, PARAMS)) < 1e-15


def test_arithmetic_nodes():
    p = point(3)
    a = ThetaOf(Z_A)
    b = ThetaOf(L_A)
    va = evaluate(a, p, PARAMS)
    vb = evaluate(b, p, PARAMS)
    assert abs(evaluate(a + b, p, PARAMS) - (va + vb)) < 1e-15
    assert abs(evaluate(a - b, p, PARAMS) - (va - vb)) < 1e-15
    assert abs(evaluate(a * b, p, PARAMS) - va * vb) < 1e-15
    assert abs(evaluate(a / b, p, PARAMS) - va / vb) < 1e-14
    assert abs(evaluate(-a, p, PARAMS) + va) < 1e-15


def test_near_divisor_error():
    e = Quot(Const(1), ThetaOf(Z_A))
    p_on_wall = EvalPoint((0.0, 0.37 + 0.2j), (0.11 + 0.1j, 0.23 + 0.4j), H)
    with pytest.raises(NearDivisorError) as err:
        evaluate(e, p_on_wall, PARAMS)
    assert Z_A in err.value.forms


def test_twist_simple_root_negates_form():
    s = W.simple[0]
    e = W.identity
    twisted = twist(ThetaOf(Z_A), s, e)
    assert twisted == ThetaOf(-Z_A)
    twisted_lam = twist(ThetaOf(L_A), e, s)
    assert twisted_lam == ThetaOf(-L_A)


def test_twist_identity_is_identity():
    expr = Quot(ThetaOf(Z_A - L_A + HH), ThetaOf(L_A))
    assert twist(expr, W.identity, W.identity) == expr


def test_twist_preserves_h_coefficient():
    for w in W.elements:
        twisted = twist(ThetaOf(Z_A - L_A + HH), w, w)
        assert twisted.form.h_coeff == 1


def test_twist_group_action_and_eval_compat():
    expr = Quot(ThetaOf(Z_A - L_A), Prod((ThetaOf(Z_A), ThetaOf(HH - L_A))))
    rng = random.Random(11)
    elements = list(W.elements)
    for _ in range(6):
        w, v, w2, v2 = (rng.choice(elements) for _ in range(4))
        lhs = twist(twist(expr, w, v), w2, v2)
        rhs = twist(expr, W.product(w2, w), W.product(v2, v))
        p = point(rng.randrange(1000), guards=denominator_forms(lhs))
        assert abs(evaluate(lhs, p, PARAMS) - evaluate(rhs, p, PARAMS)) < 1e-12
        # eval after twist = eval at the inverse-transformed point
        moved = transform_point(p, W.inverse(w), W.inverse(v))
        lhs2 = evaluate(twist(expr, w, v), p, PARAMS)
        assert abs(lhs2 - evaluate(expr, moved, PARAMS)) < 1e-12


def test_twist_rank_mismatch():
    other = weyl_group(build_root_datum("A3"))
    with pytest.raises(ValueError):
        twist(ThetaOf(Z_A), other.simple[0], other.identity)


def test_slice_point_hits_requested_value():
    base = point(7)
    for form in (Z_A, L_A, Z_A - L_A + HH):
        moved = slice_point(form, base, 1e-3)
        assert abs(form.value_at(moved) - 1e-3) < 1e-12


def test_slice_needs_variable_dependence():
    with pytest.raises(ValueError):
        slice_point(HH, point(), 0.1)


def test_residue_of_simple_pole_is_one():
    e = Quot(Const(1), ThetaOf(Z_A))
    base = slice_point(Z_A, point(5), 0.0)
    assert abs(residue_along(e, Z_A, base, PARAMS) - 1.0) < 1e-9


def test_residue_of_regular_expression_vanishes():
    e = ThetaOf(Z_A - L_A + HH)
    base = slice_point(Z_A, point(6), 0.0)
    assert abs(residue_along(e, Z_A, base, PARAMS)) < 1e-9


def test_residue_shifted_quotient_closed_form():
    # theta(z_a - c*h)/theta(z_a) has residue theta(-c*h) on the wall, since
    # theta has unit derivative at its simple zero
    for c in (1, 2):
        shifted = LinearForm(ALPHA, (0, 0), -c)
        e = Quot(ThetaOf(shifted), ThetaOf(Z_A))
        base = slice_point(Z_A, point(8 + c), 0.0)
        expected = theta(-c * H, PARAMS)
        assert abs(residue_along(e, Z_A, base, PARAMS) - expected) < 1e-8


def test_residue_linearity():
    e1 = Quot(ThetaOf(Z_A - L_A), ThetaOf(Z_A))
    e2 = Quot(ThetaOf(Z_A + L_A + HH), ThetaOf(Z_A))
    a = 1.7 - 0.4j
    base = slice_point(Z_A, point(9), 0.0)
    combined = Sum((Prod((Const(a), e1)), e2))
    r = residue_along(combined, Z_A, base, PARAMS)
    r1 = residue_along(e1, Z_A, base, PARAMS)
    r2 = residue_along(e2, Z_A, base, PARAMS)
    assert abs(r - (a * r1 + r2)) < 1e-8


def test_residue_stability_under_step_halving():
    e = Quot(ThetaOf(Z_A - L_A), ThetaOf(Z_A))
    for seed in range(4):
        base = slice_point(Z_A, point(20 + seed), 0.0)
        r1 = residue_along(e, Z_A, base, PARAMS, eps=1e-4)
        r2 = residue_along(e, Z_A, base, PARAMS, eps=5e-5)
        assert abs(r1 - r2) < 10 * PARAMS.tol_abs


def test_higher_order_pole_detected():
    e = Quot(Const(1), Prod((ThetaOf(Z_A), ThetaOf(Z_A))))
    base = slice_point(Z_A, point(10), 0.0)
    with pytest.raises(HigherOrderPoleError):
        residue_along(e, Z_A, base, PARAMS)


def test_regularity_slopes():
    base = slice_point(Z_A, point(12), 0.0)
    flat = is_regular_along(Const(3.0), Z_A, base, PARAMS)
    assert flat.regular and abs(flat.slope) < 0.01
    pole = is_regular_along(Quot(Const(1), ThetaOf(Z_A)), Z_A, base, PARAMS)
    assert not pole.regular
    assert abs(pole.slope + 1.0) < 0.05
    zero = is_regular_along(ThetaOf(Z_A), Z_A, base, PARAMS)
    assert zero.regular
    assert abs(zero.slope - 1.0) < 0.05


def test_regularity_along_shifted_wall():
    shifted = LinearForm(ALPHA, (0, 0), -1)  # z_a - h
    e = Quot(ThetaOf(Z_A), ThetaOf(-shifted))  # theta(z_a)/theta(h - z_a)
    base = slice_point(shifted, point(13), 0.0)
    res = is_regular_along(e, shifted, base, PARAMS)
    assert not res.regular  # the quotient blows up where z_a = h


def test_denominator_forms_collection():
    e = Sum(
        (
            Quot(ThetaOf(Z_A - L_A), Prod((ThetaOf(Z_A), ThetaOf(HH - L_A)))),
            ThetaOf(L_A),
        )
    )
    assert denominator_forms(e) == frozenset({Z_A, HH - L_A})


def test_proportional_forms():
    assert proportional(Z_A, LinearForm(tuple(2 * c for c in ALPHA), (0, 0), 0))
    assert proportional(Z_A, -Z_A)
    assert not proportional(Z_A, Z_A - HH)
    assert not proportional(Z_A, L_A)


def test_sampling_empty_guards():
    p = sample_generic_point(2, (), 0, PARAMS, H)
    lo, hi = 0.05, 0.95
    for c in p.z + p.lam:
        assert lo <= c.real <= hi
        assert lo * PARAMS.tau.imag <= c.imag <= hi * PARAMS.tau.imag


def test_sampling_respects_guards():
    p = sample_generic_point(2, [Z_A], 1, PARAMS, H)
    assert abs(theta(Z_A.value_at(p), PARAMS)) > 1e-3


def test_sampling_self_consistency_bulk():
    guards = [Z_A, L_A, Z_A - L_A, HH - L_A, HH - Z_A]
    violations = 0
    for seed in range(1000):
        p = sample_generic_point(2, guards, seed, PARAMS, H)
        if any(abs(theta(g.value_at(p), PARAMS)) <= 1e-3 for g in guards):
            violations += 1
    assert violations == 0


def test_sampling_rejection_budget():
    # an impossible guard: theta of the zero form is identically 0
    impossible = LinearForm((0, 0), (0, 0), 0)
    with pytest.raises(GuardRejectionError):
        sample_generic_point(2, [impossible], 0, PARAMS, H, max_tries=50)


def test_sampling_deterministic():
    guards = [Z_A, L_A]
    assert sample_generic_point(2, guards, 42, PARAMS, H) == sample_generic_point(
        2, guards, 42, PARAMS, H
    )
