"""Model-level tests: charts, fields, twisted operators, Casimir."""

from fractions import Fraction

import pytest

from pgl3dops import pgl3 as P
from pgl3dops.ring import RatFunc
from pgl3dops.weyl import (Affine, PowerSection, commutator,
                           express_as_multiple, op_apply, op_apply_section,
                           op_compose, parse_operator, regular_on, transport)

ONE = RatFunc.const(P.MATRIX_TABLE, 1)


def rf(p):
    return RatFunc.from_poly(p)


def test_minor_examples():
    # minors behave like derivative cofactors of the determinant
    assert P.det_g().differentiate("g11") == P.minor(1, 1)
    assert P.minor(1, 1).differentiate("g11").is_zero()
    assert P.minor(1, 1) == P.gvar(2, 2) * P.gvar(3, 3) - P.gvar(2, 3) * P.gvar(3, 2)


def test_alpha2_is_minor_over_g33_squared():
    fw = P.big_cell_in_matrix()
    assert fw["a2"] == rf(P.minor(1, 1)) / rf(P.gvar(3, 3) * P.gvar(3, 3))


def test_forward_at_identity():
    point = {f"g{i}{j}": Fraction(int(i == j)) for i in (1, 2, 3) for j in (1, 2, 3)}
    fw = P.big_cell_in_matrix()
    assert fw["a1"].evaluate(point) == 1
    assert fw["a2"].evaluate(point) == 1
    for name in ("U12", "U21", "U13", "U31", "U23", "U32"):
        assert fw[name].evaluate(point) == 0


def test_backward_substitution_roundtrip():
    # substituting the derived ratios into the a2 formula recovers a2
    bw = P.matrix_ratios_in_big_cell()
    subs = {f"g{i}{j}": rf(bw[f"g{i}{j}"]) for i in (1, 2, 3) for j in (1, 2, 3)}
    a2 = P.big_cell_in_matrix()["a2"].substitute(subs)
    assert a2 == RatFunc.var(P.BIG_TABLE, "a2")


def test_backward_g22_formula():
    bw = P.matrix_ratios_in_big_cell()
    t = P.BIG_TABLE
    assert bw["g22"] == t.var("a2") + t.var("U23") * t.var("U32")
    assert bw["g32"] == t.var("U32")  # the display prints U23 here


def test_field_x1_matrix():
    got = P.action_field_matrix(P.Generator("X1", "left"))
    want = parse_operator("-g21 * d/dg11 - g22 * d/dg12 - g23 * d/dg13", P.MATRIX)
    assert got == want


def test_field_h1_kills_constants():
    h1 = P.action_field_matrix(P.Generator("H1", "left"))
    assert op_apply(h1, ONE).is_zero()


def test_bracket_x1_y1_is_h1():
    x1 = P.action_field_matrix(P.Generator("X1", "left"))
    y1 = P.action_field_matrix(P.Generator("Y1", "left"))
    h1 = P.action_field_matrix(P.Generator("H1", "left"))
    assert commutator(x1, y1) == h1


def test_big_cell_x_fields():
    assert P.action_field_big_cell(P.Generator("X3", "left")) == \
        parse_operator("-d/dU13", P.BIG)
    assert P.action_field_big_cell(P.Generator("X1", "left")) == \
        parse_operator("-d/dU12 - U23 * d/dU13", P.BIG)
    assert P.action_field_big_cell(P.Generator("X2", "left")) == \
        parse_operator("-d/dU23", P.BIG)


def test_partial_alpha_formulas():
    p1, p2 = P.alpha_derivations_matrix()
    assert p1 == parse_operator("((g22*g33 - g23*g32)/g33) * d/dg11", P.MATRIX)
    fw = P.big_cell_in_matrix()
    assert op_apply(p1, fw["a1"]) == ONE
    assert op_apply(p1, fw["U13"]).is_zero()
    assert op_apply(p2, fw["a2"]) == ONE
    assert op_apply(p2, fw["a1"]).is_zero()


def test_d0_displayed_expansion():
    d0 = P.mixed_second_order_matrix()
    first = parse_operator("d/dg11", P.MATRIX)
    second = parse_operator(
        "(g11*g33 - g13*g31) * d/dg11 + (g22*g33 - g23*g32) * d/dg22"
        " + (g12*g33 - g13*g32) * d/dg12 + (g21*g33 - g23*g31) * d/dg21",
        P.MATRIX)
    assert d0 == op_compose(first, second)
    assert regular_on(d0, P.MATRIX) == (True, None)


def test_d0_applied_through_both_charts():
    # D0 applied to a1*a2 written through the change of variables equals 1
    fw = P.big_cell_in_matrix()
    f = fw["a1"] * fw["a2"]
    assert op_apply(P.mixed_second_order_matrix(), f) == ONE


def test_sigma_weights_and_exponents():
    sig = P.monomial_section()
    nu1, nu2 = P.weight_exponents(P.sym_m1(), P.sym_m2())
    t = P.MATRIX_TABLE
    for label, want in (("H1", nu1), ("H2", nu2)):
        w = express_as_multiple(
            P.apply_generator(P.Generator(label, "left"), sig), sig)
        assert w == want.as_ratfunc(t)
    # right factor acts by -nu
    for label, want in (("H1", nu1), ("H2", nu2)):
        w = express_as_multiple(
            P.apply_generator(P.Generator(label, "right"), sig), sig)
        assert w == (-want).as_ratfunc(t)
    # the g33 exponent of sigma is lam1 + m1 - 2 m2
    g33_exp = [e for b, e in sig.factors if b == P.gvar(3, 3)]
    assert g33_exp == [nu2]


def test_sigma_zero_is_canonical_section():
    assert P.monomial_section(0, 0) == P.canonical_section()


def test_twist_corrections_displayed():
    t = P.BIG_TABLE
    assert P.twist_correction_big(P.Generator("Y1", "left")) == \
        -rf(t.var("U12")).scale(1) * RatFunc.var(t, "lam2")
    assert P.twist_correction_big(P.Generator("X2", "left")).is_zero()
    # at lam = 0 the twisted field is the plain field
    zero = {"lam1": RatFunc.const(P.MATRIX_TABLE, 0),
            "lam2": RatFunc.const(P.MATRIX_TABLE, 0)}
    for label in P.GENERATOR_LABELS:
        tw = P.twisted_field_matrix(P.Generator(label, "left"))
        plain = P.action_field_matrix(P.Generator(label, "left"))
        from pgl3dops.weyl import DiffOp
        spec = DiffOp(P.MATRIX, {K: c.substitute(zero) for K, c in tw.terms.items()})
        assert spec == plain


def test_case1_both_chart_routes():
    m1, m2 = P.sym_m1(), P.sym_m2()
    target = P.monomial_section(m1 - 1, m2 - 1)
    out = P.apply_descent(P.monomial_section())
    t = P.MATRIX_TABLE
    assert express_as_multiple(out, target) == \
        RatFunc.var(t, "m1") * RatFunc.var(t, "m2")
    # big-cell coefficient route: d/da1 d/da2 on a1^m1 a2^m2
    big = P.monomial_section_big()
    moved = op_apply_section(P.mixed_second_order_big(), big)
    tb = P.BIG_TABLE
    assert express_as_multiple(moved, P.monomial_section_big(m1 - 1, m2 - 1)) \
        == RatFunc.var(tb, "m1") * RatFunc.var(tb, "m2")


def test_apply_descent_on_powers():
    # sampled agreement of the twisted operator with direct differentiation
    for m1v, m2v, l1, l2 in ((1, 1, 0, 0), (3, 2, 1, 2), (2, 5, 4, 3),
                             (4, 1, 2, 0), (2, 2, 3, 3)):
        vals = {"lam1": l1, "lam2": l2, "m1": m1v, "m2": m2v}
        sig = P.monomial_section(m1v, m2v).substitute_params(vals)
        f = P.canonical_section().substitute_params(vals)
        out = P.apply_descent(sig, f)
        target = P.monomial_section(m1v - 1, m2v - 1).substitute_params(vals)
        assert express_as_multiple(out, target).constant_value() == m1v * m2v


def test_weyl_element_matrices():
    assert P.W_S1.matrix == ((0, 1, 0), (-1, 0, 0), (0, 0, 1))
    assert P.W_S2.matrix == ((1, 0, 0), (0, 0, 1), (0, -1, 0))
    w0 = P.W_LONG.matrix
    assert w0 == ((0, 0, 1), (0, -1, 0), (1, 0, 0))
    assert P.mat_mul(w0, w0) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_twist_by_identity():
    d0 = P.mixed_second_order_matrix()
    assert P.twist_operator(d0, P.W_E) == d0
    sig = P.monomial_section(1, 2)
    assert P.twist_section(sig, P.W_E) == sig


def test_twisted_section_s1():
    sig = P.monomial_section()
    tw = P.twist_section(sig, P.W_S1.inverse())
    nu1, nu2 = P.weight_exponents(P.sym_m1(), P.sym_m2())
    expected = PowerSection(P.MATRIX, ONE, [
        (P.gvar(3, 3), nu2), (P.minor(2, 2), nu1), (P.det_g(), P.sym_m1())])
    assert tw == expected


def test_casimir_chi_values():
    t = P.MATRIX_TABLE
    assert P.central_character(Affine(0), Affine(0)) == RatFunc.const(t, 0)
    assert P.central_character(Affine(1), Affine(1)) == RatFunc.const(t, 1)
    # chi(2, 0) = 2/3 + 4/9 = 10/9
    assert P.central_character(Affine(2), Affine(0)) == \
        RatFunc.const(t, Fraction(10, 9))


def test_casimir_eigenvalue_on_sections():
    sig = P.monomial_section()
    nu = P.weight_exponents(P.sym_m1(), P.sym_m2())
    assert express_as_multiple(P.casimir_apply(sig), sig) == \
        P.central_character(*nu)


def test_casimir_centrality_spot():
    cas = P.casimir_operator("left")
    for label in ("X1", "Y3", "H2"):
        assert commutator(
            cas, P.twisted_field_matrix(P.Generator(label, "left"))).is_zero()


def test_descent_regular_both_presentations():
    assert P.descent_regular_on_big_cell() == (True, None)
    ok, witness = P.descent_regular_on_bminusb()
    assert ok and witness is None


def test_bminusb_units_required():
    # without the unit set the conjugated operator is not polynomial
    conj = P.descent_bminusb_presentation()
    ok, witness = regular_on(conj, P.MATRIX)
    assert not ok and witness is not None


def test_conjugate_route_reproduces_descent():
    # conjugating the mixed derivative by the inverse canonical section gives
    # the section-level twisted operator
    from pgl3dops.weyl import conjugate
    conj = conjugate(P.mixed_second_order_matrix(),
                     P.canonical_section().inverse())
    sig = P.monomial_section()
    assert op_apply_section(conj, sig) == P.apply_descent(sig)


def test_twisted_cross_factor_brackets_vanish():
    for a, b in (("X1", "Y1"), ("H1", "X2")):
        lhs = commutator(P.twisted_field_matrix(P.Generator(a, "left")),
                         P.twisted_field_matrix(P.Generator(b, "right")))
        assert lhs.is_zero()


def test_weight_helpers():
    assert P.weight_star((3, 1)) == (1, 3)
    assert P.weight_dominant((0, 2)) and not P.weight_dominant((-1, 0))
    # nu = lam* - m1 alpha1 - m2 alpha2 in the omega basis
    nu1, nu2 = P.weight_exponents(P.sym_m1(), P.sym_m2())
    s = P.shift_weight((nu1, nu2), {"alpha1": 1, "alpha2": 1})
    r = P.shift_weight((nu1, nu2), {"rho": 1})
    assert s == r  # alpha1 + alpha2 = rho on the weight lattice


def test_partial_alpha_regularity_depends_on_units():
    from pgl3dops.weyl import Chart
    p1, _ = P.alpha_derivations_matrix()
    ok, witness = regular_on(p1, P.MATRIX)          # empty unit set
    assert not ok and witness is not None
    with_unit = Chart("matrix_g33", P.MATRIX_TABLE, units=(P.gvar(3, 3),))
    assert regular_on(p1, with_unit) == (True, None)
