"""Contract error paths: every promised failure mode raises as documented."""

import pytest

from pgl3dops.ring import (ParameterDerivative, ParseError, Poly, RatFunc,
                           VarTable, ZeroDenominator, parse_ratfunc)
from pgl3dops.weyl import (Affine, Chart, ChartMap, DiffOp, ExpressFailure,
                           PowerSection, SingularJacobian, express_as_multiple,
                           parse_operator, transport)

T = VarTable(coords=("x", "y"), params=("k",))
CH = Chart("plane", T)
X = RatFunc.var(T, "x")
Y = RatFunc.var(T, "y")


def test_vartable_rejects_duplicates():
    with pytest.raises(ValueError):
        VarTable(coords=("x", "y"), params=("x",))


def test_vartable_mismatch():
    other = VarTable(coords=("u", "v"))
    from pgl3dops.ring import VarTableMismatch
    with pytest.raises(VarTableMismatch):
        T.var("x") + other.var("u")


def test_zero_denominator_everywhere():
    with pytest.raises(ZeroDenominator):
        RatFunc(T.one(), T.zero())
    with pytest.raises(ZeroDenominator):
        X / RatFunc.const(T, 0)
    with pytest.raises(ZeroDenominator):
        (RatFunc.const(T, 1) / X).evaluate({"x": 0, "y": 1, "k": 0})
    with pytest.raises(ZeroDenominator):
        (RatFunc.const(T, 1) / (X - Y)).substitute({"x": Y})


def test_parameter_derivative_rejected():
    with pytest.raises(ParameterDerivative):
        X.differentiate("k")
    with pytest.raises(ParameterDerivative):
        T.var("k").differentiate("k")


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_ratfunc("x +", T)
    with pytest.raises(ParseError):
        parse_ratfunc("unknown_name", T)
    with pytest.raises(ParseError):
        parse_operator("d/dx * x", CH)    # coefficient right of a derivative
    with pytest.raises(ParseError):
        parse_operator("x / d/dx", CH)


def test_chart_invariants():
    with pytest.raises(ValueError):
        Chart("bad", T, units=(T.zero(),))
    with pytest.raises(ValueError):
        Chart("bad", T, coords=("x", "x"))


def test_chart_mismatch_on_compose():
    from pgl3dops.weyl import ChartMismatch, op_compose
    other = Chart("other", VarTable(coords=("u", "v"), params=("k",)))
    with pytest.raises(ChartMismatch):
        op_compose(DiffOp.partial(CH, "x"), DiffOp.partial(other, "u"))


def test_singular_transport():
    # x -> u, y -> u is not invertible
    U = VarTable(coords=("u", "v"), params=("k",))
    target = Chart("uv", U)
    m = ChartMap(CH, target,
                 {"x": RatFunc.var(U, "u"), "y": RatFunc.var(U, "u")},
                 {"u": X, "v": Y})
    with pytest.raises(SingularJacobian):
        transport(DiffOp.partial(CH, "x"), m)


def test_power_section_invariants():
    with pytest.raises(ZeroDenominator):
        PowerSection(CH, T.one(), [(T.zero(), Affine.param("k"))])
    with pytest.raises(ValueError):
        # constant base 2 with a symbolic exponent is not representable
        PowerSection(CH, T.one(), [(T.const(2), Affine.param("k"))])
    # constant base with a concrete exponent folds into the numerator
    s = PowerSection(CH, T.one(), [(T.const(2), Affine(3))])
    assert s.num == T.const(8)


def test_express_failures():
    s = PowerSection(CH, T.one(), [(T.var("x"), Affine.param("k"))])
    with pytest.raises(ZeroDenominator):
        express_as_multiple(s, PowerSection(CH, T.zero()))
    bad = s.scale(X + Y)
    with pytest.raises(ExpressFailure) as exc:
        express_as_multiple(bad, s)
    assert exc.value.witness is not None


def test_substitution_must_keep_bases_polynomial():
    s = PowerSection(CH, T.one(), [(T.var("x"), Affine.param("k"))])
    inv = RatFunc.const(T, 1) / Y
    with pytest.raises(ValueError):
        s.substitute_coords({"x": inv + X}, CH)
