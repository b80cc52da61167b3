"""Charts, group actions and operators for the compactified PGL3 picture.

Three affine charts are used throughout:

* ``matrix``   -- all nine entries g11..g33 of a 3x3 matrix (the affine cone
  over the first projective factor; nothing is normalised, operators built
  here are checked to be homogeneous of degree 0),
* ``ratio``    -- the eight ratios x_ij = g_ij/g33 (the g33 != 0 chart),
* ``big_cell`` -- coordinates a1, a2 (the two simple-root directions, which
  cut out the boundary divisors) and the six unipotent coordinates U_ij.

The change of variables between the big cell and the ratio chart is rational
and square, so operators move across it by exact Jacobian inversion; the
ratio and matrix charts are bridged by homogenisation.  The displayed
formulas of the underlying construction are *derived* here (from the
infinitesimal action and from Jacobian inversion) and compared elsewhere
against the reference forms.

Sections of the line bundle attached to a weight (lam1, lam2) are modelled
on the matrix chart as power products: the canonical section is
g33^lam1 * Delta11^lam2, and its monomial multiples carry exponents affine
in the parameters lam1, lam2, m1, m2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .ring import Poly, RatFunc, VarTable
from .weyl import (Affine, Chart, ChartMap, DiffOp, PowerSection,
                   conjugate, op_apply_section, op_compose,
                   regular_on, transport)

PARAMS = ("lam1", "lam2", "m1", "m2", "nu1", "nu2")

MATRIX_NAMES = ("g11", "g12", "g13", "g21", "g22", "g23", "g31", "g32", "g33")
BIG_NAMES = ("a1", "a2", "U12", "U21", "U13", "U31", "U23", "U32")
RATIO_NAMES = ("x11", "x12", "x13", "x21", "x22", "x23", "x31", "x32")

MATRIX_TABLE = VarTable(coords=MATRIX_NAMES, params=PARAMS)
BIG_TABLE = VarTable(coords=BIG_NAMES, params=PARAMS)
RATIO_TABLE = VarTable(coords=RATIO_NAMES, params=PARAMS)

MATRIX = Chart("matrix", MATRIX_TABLE)
BIG = Chart("big_cell", BIG_TABLE)
RATIO = Chart("ratio", RATIO_TABLE)


def gvar(i: int, j: int) -> Poly:
    return MATRIX_TABLE.var(f"g{i}{j}")


def _det3(m) -> Poly:
    return (m[0][0] * m[1][1] * m[2][2] + m[0][1] * m[1][2] * m[2][0]
            + m[0][2] * m[1][0] * m[2][1] - m[0][2] * m[1][1] * m[2][0]
            - m[0][0] * m[1][2] * m[2][1] - m[0][1] * m[1][0] * m[2][2])


def _matrix_of_vars(table: VarTable, names) -> list:
    return [[RatFunc.from_poly(table.var(n)) if isinstance(n, str) else n
             for n in row] for row in names]


G_MAT = [[gvar(i + 1, j + 1) for j in range(3)] for i in range(3)]


@lru_cache(maxsize=None)
def minor(i: int, j: int) -> Poly:
    """2x2 determinant of g with row i and column j deleted (1-based)."""
    rows = [r for r in range(3) if r != i - 1]
    cols = [c for c in range(3) if c != j - 1]
    return (G_MAT[rows[0]][cols[0]] * G_MAT[rows[1]][cols[1]]
            - G_MAT[rows[0]][cols[1]] * G_MAT[rows[1]][cols[0]])


@lru_cache(maxsize=None)
def det_g() -> Poly:
    return _det3(G_MAT)


BMINUSB = Chart("bminusb", MATRIX_TABLE, units=(gvar(1, 1), minor(3, 3)))


# -- ratio-chart copies of the minors (g33 normalised to 1) ------------------------

def xvar(i: int, j: int) -> Poly:
    if (i, j) == (3, 3):
        return RATIO_TABLE.one()
    return RATIO_TABLE.var(f"x{i}{j}")


X_MAT = [[xvar(i + 1, j + 1) for j in range(3)] for i in range(3)]


@lru_cache(maxsize=None)
def minor_x(i: int, j: int) -> Poly:
    rows = [r for r in range(3) if r != i - 1]
    cols = [c for c in range(3) if c != j - 1]
    return (X_MAT[rows[0]][cols[0]] * X_MAT[rows[1]][cols[1]]
            - X_MAT[rows[0]][cols[1]] * X_MAT[rows[1]][cols[0]])


@lru_cache(maxsize=None)
def det_x() -> Poly:
    return _det3(X_MAT)


# -- Lie algebra generators and Weyl representatives ---------------------------------

_GEN_MATRICES: dict[str, tuple[tuple[int, ...], ...]] = {
    "X1": ((0, 1, 0), (0, 0, 0), (0, 0, 0)),
    "X2": ((0, 0, 0), (0, 0, 1), (0, 0, 0)),
    "X3": ((0, 0, 1), (0, 0, 0), (0, 0, 0)),
    "Y1": ((0, 0, 0), (1, 0, 0), (0, 0, 0)),
    "Y2": ((0, 0, 0), (0, 0, 0), (0, 1, 0)),
    "Y3": ((0, 0, 0), (0, 0, 0), (1, 0, 0)),
    "H1": ((1, 0, 0), (0, -1, 0), (0, 0, 0)),
    "H2": ((0, 0, 0), (0, 1, 0), (0, 0, -1)),
}

GENERATOR_LABELS = tuple(_GEN_MATRICES)
NILPOTENT_LABELS = ("X1", "X2", "X3", "Y1", "Y2", "Y3")


@dataclass(frozen=True)
class Generator:
    """A basis element of sl3 acting through the left or the right factor."""

    label: str
    factor: str = "left"

    def __post_init__(self):
        if self.label not in _GEN_MATRICES:
            raise ValueError(f"unknown generator {self.label!r}")
        if self.factor not in ("left", "right"):
            raise ValueError("factor must be 'left' or 'right'")

    @property
    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(Fraction(e) for e in row)
                     for row in _GEN_MATRICES[self.label])


def mat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
                 for i in range(3))


def mat_bracket(a, b):
    ab, ba = mat_mul(a, b), mat_mul(b, a)
    return tuple(tuple(ab[i][j] - ba[i][j] for j in range(3)) for i in range(3))


def mat_inv(a):
    """Exact inverse of a 3x3 rational matrix (adjugate over determinant)."""
    det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
           - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
           + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            m = (a[rows[0]][cols[0]] * a[rows[1]][cols[1]]
                 - a[rows[0]][cols[1]] * a[rows[1]][cols[0]])
            cof[i][j] = (-1) ** (i + j) * m
    return tuple(tuple(Fraction(cof[j][i], 1) / det for j in range(3))
                 for i in range(3))


@dataclass(frozen=True)
class WeylElement:
    """A Weyl-group representative as a concrete 3x3 matrix."""

    label: str
    matrix: tuple[tuple[Fraction, ...], ...]

    def inverse(self) -> "WeylElement":
        return WeylElement(f"{self.label}^-1", mat_inv(self.matrix))

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.label + other.label,
                           mat_mul(self.matrix, other.matrix))


def _fr(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


W_E = WeylElement("e", _fr([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
W_S1 = WeylElement("s1", _fr([[0, 1, 0], [-1, 0, 0], [0, 0, 1]]))
W_S2 = WeylElement("s2", _fr([[1, 0, 0], [0, 0, 1], [0, -1, 0]]))
W_S1S2 = WeylElement("s1s2", mat_mul(W_S1.matrix, W_S2.matrix))
W_S2S1 = WeylElement("s2s1", mat_mul(W_S2.matrix, W_S1.matrix))
W_LONG = WeylElement("w0", mat_mul(W_S1S2.matrix, W_S1.matrix))

WEYL_ELEMENTS = {w.label: w for w in (W_E, W_S1, W_S2, W_S1S2, W_S2S1, W_LONG)}


# -- infinitesimal action on the matrix chart ------------------------------------------


def field_of_matrix(xi, factor: str = "left") -> DiffOp:
    """Vector field of the one-parameter flow of a 3x3 matrix xi.

    Left factor: coefficient of d/dg_ij is -(xi g)_ij; right factor: +(g xi)_ij.
    Both conventions give Lie-algebra homomorphisms and commute with each
    other; the right-factor sign is calibrated so the canonical section has
    torus weight (-lam2, -lam1) under the right Cartan fields.
    """
    terms = {}
    for i in range(3):
        for j in range(3):
            if factor == "left":
                coeff = MATRIX_TABLE.zero()
                for k in range(3):
                    if xi[i][k]:
                        coeff = coeff + gvar(k + 1, j + 1).scale(-xi[i][k])
            else:
                coeff = MATRIX_TABLE.zero()
                for k in range(3):
                    if xi[k][j]:
                        coeff = coeff + gvar(i + 1, k + 1).scale(xi[k][j])
            if coeff.is_zero():
                continue
            idx = [0] * 9
            idx[MATRIX.coord_index(f"g{i + 1}{j + 1}")] = 1
            key = tuple(idx)
            cur = terms.get(key)
            rf = RatFunc.from_poly(coeff)
            terms[key] = rf if cur is None else cur + rf
    return DiffOp(MATRIX, terms)


@lru_cache(maxsize=None)
def action_field_matrix(gen: Generator) -> DiffOp:
    """Infinitesimal action of a generator, on the nine matrix entries."""
    return field_of_matrix(gen.matrix, gen.factor)


@lru_cache(maxsize=None)
def euler_field_matrix() -> DiffOp:
    terms = {}
    for name in MATRIX_NAMES:
        idx = [0] * 9
        idx[MATRIX.coord_index(name)] = 1
        terms[tuple(idx)] = RatFunc.var(MATRIX_TABLE, name)
    return DiffOp(MATRIX, terms)


# -- change of variables -----------------------------------------------------------------


@lru_cache(maxsize=None)
def big_cell_in_matrix() -> dict[str, RatFunc]:
    """The eight big-cell coordinates as degree-0 fractions of matrix entries."""
    g33 = RatFunc.from_poly(gvar(3, 3))
    d11 = RatFunc.from_poly(minor(1, 1))
    return {
        "a1": RatFunc.from_poly(gvar(3, 3) * det_g()) / (d11 * d11),
        "a2": d11 / (g33 * g33),
        "U12": RatFunc.from_poly(minor(2, 1)) / d11,
        "U21": RatFunc.from_poly(minor(1, 2)) / d11,
        "U13": RatFunc.from_poly(gvar(1, 3)) / g33,
        "U31": RatFunc.from_poly(gvar(3, 1)) / g33,
        "U23": RatFunc.from_poly(gvar(2, 3)) / g33,
        "U32": RatFunc.from_poly(gvar(3, 2)) / g33,
    }


@lru_cache(maxsize=None)
def matrix_ratios_in_big_cell() -> dict[str, Poly]:
    """The ratios g_ij/g33 derived by expanding the unipotent-torus product.

    Multiplies u * a * u' with u upper unipotent (U12, U13, U23), u' lower
    unipotent (U21, U31, U32) and torus ratios a = diag(a1*a2, a2, 1).
    """
    t = BIG_TABLE
    one, zero = t.one(), t.zero()
    u = [[one, t.var("U12"), t.var("U13")],
         [zero, one, t.var("U23")],
         [zero, zero, one]]
    a = [[t.var("a1") * t.var("a2"), zero, zero],
         [zero, t.var("a2"), zero],
         [zero, zero, one]]
    up = [[one, zero, zero],
          [t.var("U21"), one, zero],
          [t.var("U31"), t.var("U32"), one]]

    def mul(p, q):
        return [[sum((p[i][k] * q[k][j] for k in range(3)), start=zero)
                 for j in range(3)] for i in range(3)]

    prod = mul(mul(u, a), up)
    return {f"g{i + 1}{j + 1}": prod[i][j] for i in range(3) for j in range(3)}


@lru_cache(maxsize=None)
def big_cell_in_ratio() -> dict[str, RatFunc]:
    """Forward formulas restricted to the ratio chart (g33 = 1)."""
    d11 = RatFunc.from_poly(minor_x(1, 1))
    return {
        "a1": RatFunc.from_poly(det_x()) / (d11 * d11),
        "a2": d11,
        "U12": RatFunc.from_poly(minor_x(2, 1)) / d11,
        "U21": RatFunc.from_poly(minor_x(1, 2)) / d11,
        "U13": RatFunc.from_poly(xvar(1, 3)),
        "U31": RatFunc.from_poly(xvar(3, 1)),
        "U23": RatFunc.from_poly(xvar(2, 3)),
        "U32": RatFunc.from_poly(xvar(3, 2)),
    }


@lru_cache(maxsize=None)
def map_big_to_ratio() -> ChartMap:
    inverse = {f"x{i}{j}": RatFunc.from_poly(matrix_ratios_in_big_cell()[f"g{i}{j}"])
               for i in (1, 2, 3) for j in (1, 2, 3) if (i, j) != (3, 3)}
    return ChartMap(BIG, RATIO, big_cell_in_ratio(), inverse)


@lru_cache(maxsize=None)
def map_ratio_to_big() -> ChartMap:
    return map_big_to_ratio().reversed()


def slice_to_ratio(f: RatFunc) -> RatFunc:
    """Restrict a matrix-chart function to the slice g33 = 1."""
    mapping = {f"g{i}{j}": RatFunc.from_poly(xvar(i, j))
               for i in (1, 2, 3) for j in (1, 2, 3)}
    return f.substitute(mapping)


def ratio_to_matrix(f: RatFunc) -> RatFunc:
    """Express a ratio-chart function through the degree-0 fractions g_ij/g33."""
    g33 = RatFunc.from_poly(gvar(3, 3))
    mapping = {f"x{i}{j}": RatFunc.from_poly(gvar(i, j)) / g33
               for i in (1, 2, 3) for j in (1, 2, 3) if (i, j) != (3, 3)}
    return f.substitute(mapping)


def matrix_deg0_to_big(f: RatFunc) -> RatFunc:
    """Express a degree-0 matrix-chart function in big-cell coordinates."""
    mapping = {f"x{i}{j}": RatFunc.from_poly(matrix_ratios_in_big_cell()[f"g{i}{j}"])
               for i in (1, 2, 3) for j in (1, 2, 3) if (i, j) != (3, 3)}
    return slice_to_ratio(f).substitute(mapping)


def big_to_matrix_deg0(f: RatFunc) -> RatFunc:
    """Express a big-cell function as a degree-0 matrix-chart function."""
    return f.substitute(big_cell_in_matrix())


def homogenize(op: DiffOp) -> DiffOp:
    """Lift a ratio-chart operator to the matrix chart.

    Coefficients are rewritten through g_ij/g33 and each derivative order
    picks up one factor of g33; the lift acts identically on functions that
    are homogeneous of degree 0.
    """
    if op.chart is not RATIO:
        raise ValueError("homogenize expects a ratio-chart operator")
    g33 = RatFunc.from_poly(gvar(3, 3))
    terms = {}
    for K, c in op.terms.items():
        coeff = ratio_to_matrix(c) * g33 ** sum(K)
        idx = [0] * 9
        for pos, k in enumerate(K):
            idx[MATRIX.coord_index("g" + RATIO_NAMES[pos][1:])] = k
        terms[tuple(idx)] = coeff
    return DiffOp(MATRIX, terms)


def dehomogenize_field(op: DiffOp) -> DiffOp:
    """Restrict a first-order matrix-chart operator to the ratio chart.

    d/dg_ij maps to d/dx_ij and d/dg33 to minus the ratio-chart Euler field.
    Only valid input: operators of order <= 1.
    """
    if op.order() > 1:
        raise ValueError("dehomogenize_field is restricted to order <= 1")
    out = DiffOp.zero(RATIO)
    euler = DiffOp(RATIO, {
        tuple(1 if i == pos else 0 for i in range(8)):
            -RatFunc.from_poly(RATIO_TABLE.var(name))
        for pos, name in enumerate(RATIO_NAMES)})
    for K, c in op.terms.items():
        coeff = slice_to_ratio(c)
        if not any(K):
            out = out + DiffOp.multiplication(RATIO, coeff)
            continue
        pos = K.index(1)
        name = MATRIX_NAMES[pos]
        if name == "g33":
            out = out + euler.scale(coeff)
        else:
            out = out + DiffOp.partial(RATIO, "x" + name[1:], coeff)
    return out


@lru_cache(maxsize=None)
def action_field_big_cell(gen: Generator) -> DiffOp:
    """The generator's field in big-cell coordinates, derived by transport."""
    ratio_form = dehomogenize_field(action_field_matrix(gen))
    return transport(ratio_form, map_ratio_to_big())


# -- the two boundary derivations and the global order-2 operator ---------------------


@lru_cache(maxsize=None)
def alpha_derivations_ratio() -> tuple[DiffOp, DiffOp]:
    m = map_big_to_ratio()
    return (transport(DiffOp.partial(BIG, "a1"), m),
            transport(DiffOp.partial(BIG, "a2"), m))


@lru_cache(maxsize=None)
def alpha_derivations_matrix() -> tuple[DiffOp, DiffOp]:
    """d/da1 and d/da2 as matrix-chart operators, by Jacobian inversion."""
    r1, r2 = alpha_derivations_ratio()
    return homogenize(r1), homogenize(r2)


@lru_cache(maxsize=None)
def mixed_second_order_big() -> DiffOp:
    return op_compose(DiffOp.partial(BIG, "a1"), DiffOp.partial(BIG, "a2"))


@lru_cache(maxsize=None)
def mixed_second_order_matrix() -> DiffOp:
    """The globally defined order-2 operator, composed on the matrix chart."""
    p1, p2 = alpha_derivations_matrix()
    return op_compose(p1, p2)


# -- sections ------------------------------------------------------------------------------


def _affine(value) -> Affine:
    if isinstance(value, Affine):
        return value
    return Affine(value)


def lam1() -> Affine:
    return Affine.param("lam1")


def lam2() -> Affine:
    return Affine.param("lam2")


def sym_m1() -> Affine:
    return Affine.param("m1")


def sym_m2() -> Affine:
    return Affine.param("m2")


@lru_cache(maxsize=None)
def canonical_section() -> PowerSection:
    """The eigensection trivialising the bundle on the big cell: g33^lam1 Delta11^lam2."""
    one = RatFunc.const(MATRIX_TABLE, 1)
    return PowerSection(MATRIX, one, [(gvar(3, 3), lam1()), (minor(1, 1), lam2())])


def weight_exponents(m1, m2) -> tuple[Affine, Affine]:
    """(nu1, nu2) = (lam2 - 2 m1 + m2, lam1 + m1 - 2 m2)."""
    m1, m2 = _affine(m1), _affine(m2)
    return lam2() - m1.scale(2) + m2, lam1() + m1 - m2.scale(2)


def monomial_section(m1=None, m2=None) -> PowerSection:
    """sigma = a1^m1 a2^m2 times the canonical section, in matrix coordinates.

    With symbolic (default) or concrete m1, m2; the matrix-chart power
    product is g33^nu2 * Delta11^nu1 * Delta^m1.
    """
    m1 = sym_m1() if m1 is None else _affine(m1)
    m2 = sym_m2() if m2 is None else _affine(m2)
    nu1, nu2 = weight_exponents(m1, m2)
    one = RatFunc.const(MATRIX_TABLE, 1)
    return PowerSection(MATRIX, one, [
        (gvar(3, 3), nu2), (minor(1, 1), nu1), (det_g(), m1)])


def monomial_section_big(m1=None, m2=None) -> PowerSection:
    """Big-cell coefficient of sigma relative to the canonical section: a1^m1 a2^m2."""
    m1 = sym_m1() if m1 is None else _affine(m1)
    m2 = sym_m2() if m2 is None else _affine(m2)
    one = RatFunc.const(BIG_TABLE, 1)
    return PowerSection(BIG, one, [(BIG_TABLE.var("a1"), m1),
                                   (BIG_TABLE.var("a2"), m2)])


def apply_generator(gen: Generator, s: PowerSection) -> PowerSection:
    """Twisted action of a generator on a section (plain Leibniz action)."""
    return op_apply_section(action_field_matrix(gen), s)


def apply_descent(s: PowerSection, trivialization: PowerSection | None = None
                  ) -> PowerSection:
    """The twisted order-2 operator on sections: conjugate the mixed
    derivative by the canonical section.

    The trivialising section must carry the same weight parameters as ``s``
    (symbolic by default; pass the specialised canonical section when ``s``
    has concrete lam values).
    """
    f = trivialization if trivialization is not None else canonical_section()
    return op_apply_section(mixed_second_order_matrix(), s / f) * f


# -- twisted operators (coefficient side, big-cell trivialisation) ----------------------


def twisted_field_of_matrix(xi, factor: str = "left") -> DiffOp:
    """Coefficient-side twisted field of an arbitrary sl3 matrix."""
    field = field_of_matrix(xi, factor)
    f = canonical_section()
    corr = op_apply_section(field, f).ratio_to(f)
    return field + DiffOp.multiplication(MATRIX, corr)


@lru_cache(maxsize=None)
def twist_correction_matrix(gen: Generator) -> RatFunc:
    """Logarithmic derivative of the canonical section along the generator."""
    f = canonical_section()
    return op_apply_section(action_field_matrix(gen), f).ratio_to(f)


@lru_cache(maxsize=None)
def twisted_field_matrix(gen: Generator) -> DiffOp:
    """Coefficient-side twisted generator: the plain field plus a zero-order
    logarithmic correction."""
    corr = twist_correction_matrix(gen)
    return action_field_matrix(gen) + DiffOp.multiplication(MATRIX, corr)


@lru_cache(maxsize=None)
def twist_correction_big(gen: Generator) -> RatFunc:
    return matrix_deg0_to_big(twist_correction_matrix(gen))


@lru_cache(maxsize=None)
def twisted_field_big(gen: Generator) -> DiffOp:
    return action_field_big_cell(gen) + DiffOp.multiplication(
        BIG, twist_correction_big(gen))


# -- Casimir -------------------------------------------------------------------------------


@lru_cache(maxsize=None)
def casimir_operator(factor: str = "left") -> DiffOp:
    """Twisted image of the degree-2 central element, as one composed operator:

        (H1 + H2)/3 + (H1^2 + H2^2 + H1 H2)/9 + (Y1 X1 + Y2 X2 + Y3 X3)/3
    """
    f = {lbl: twisted_field_matrix(Generator(lbl, factor))
         for lbl in GENERATOR_LABELS}
    third, ninth = Fraction(1, 3), Fraction(1, 9)
    linear = (f["H1"] + f["H2"]).scale(third)
    cartan = (op_compose(f["H1"], f["H1"]) + op_compose(f["H2"], f["H2"])
              + op_compose(f["H1"], f["H2"])).scale(ninth)
    raised = (op_compose(f["Y1"], f["X1"]) + op_compose(f["Y2"], f["X2"])
              + op_compose(f["Y3"], f["X3"])).scale(third)
    return linear + cartan + raised


def casimir_apply(s: PowerSection, factor: str = "left") -> PowerSection:
    """Apply the Casimir to a section by iterated first-order actions."""
    def ap(label, t):
        return apply_generator(Generator(label, factor), t)

    h1, h2 = ap("H1", s), ap("H2", s)
    third, ninth = Fraction(1, 3), Fraction(1, 9)
    out = (h1 + h2).scale(third)
    out = out + (ap("H1", h1) + ap("H2", h2) + ap("H1", h2)).scale(ninth)
    out = out + (ap("Y1", ap("X1", s)) + ap("Y2", ap("X2", s))
                 + ap("Y3", ap("X3", s))).scale(third)
    return out


def central_character(mu1, mu2, table: VarTable = MATRIX_TABLE) -> RatFunc:
    """Scalar action of the Casimir on the simple module of highest weight mu:
    (mu1 + mu2)/3 + (mu1^2 + mu1 mu2 + mu2^2)/9."""
    p1 = _affine(mu1).as_ratfunc(table)
    p2 = _affine(mu2).as_ratfunc(table)
    return (p1 + p2).scale(Fraction(1, 3)) + \
        (p1 * p1 + p1 * p2 + p2 * p2).scale(Fraction(1, 9))


def weight_star(mu: tuple) -> tuple:
    """The star involution on dominant weights: (mu1, mu2) -> (mu2, mu1)."""
    return (mu[1], mu[0])


def weight_dominant(mu: tuple[int, int]) -> bool:
    return mu[0] >= 0 and mu[1] >= 0


def shift_weight(mu: tuple, steps: Mapping[str, int]) -> tuple:
    """Shift a weight (pair of Affine/int) by multiples of alpha1, alpha2, rho."""
    mu1, mu2 = _affine(mu[0]), _affine(mu[1])
    a1 = steps.get("alpha1", 0)
    a2 = steps.get("alpha2", 0)
    r = steps.get("rho", 0)
    # alpha1 = (2, -1), alpha2 = (-1, 2), rho = (1, 1) in the omega basis
    mu1 = mu1 + Affine(2 * a1 - a2 + r)
    mu2 = mu2 + Affine(-a1 + 2 * a2 + r)
    return (mu1, mu2)


# -- Weyl twists ------------------------------------------------------------------------------


def _conjugation_formulas(w, wp) -> dict[str, RatFunc]:
    """g_ij as entries of w^{-1} g wp (a linear polynomial substitution)."""
    winv = mat_inv(w)
    out = {}
    for i in range(3):
        for j in range(3):
            p = MATRIX_TABLE.zero()
            for k in range(3):
                for l in range(3):
                    c = winv[i][k] * wp[l][j]
                    if c:
                        p = p + gvar(k + 1, l + 1).scale(c)
            out[f"g{i + 1}{j + 1}"] = RatFunc.from_poly(p)
    return out


def weyl_substitution(w: WeylElement, wp: WeylElement | None = None) -> ChartMap:
    """The linear chart map induced by g -> w^{-1} g w' on the matrix chart."""
    wp = wp if wp is not None else w
    return ChartMap(MATRIX, MATRIX,
                    _conjugation_formulas(w.matrix, wp.matrix),
                    _conjugation_formulas(mat_inv(w.matrix), mat_inv(wp.matrix)))


def twist_operator(D: DiffOp, w: WeylElement) -> DiffOp:
    """Diagonal Weyl twist of an operator: transport along g -> w^{-1} g w."""
    return transport(D, weyl_substitution(w, w))


def twist_section(s: PowerSection, w: WeylElement) -> PowerSection:
    """Diagonal Weyl twist of a section (substitute g -> w^{-1} g w everywhere)."""
    return s.substitute_coords(_conjugation_formulas(w.matrix, w.matrix), MATRIX)


def apply_twisted_descent(s: PowerSection, w: WeylElement,
                          trivialization: PowerSection | None = None
                          ) -> PowerSection:
    """The w-twisted order-2 operator on sections: w ( D ( w^{-1} s ) )."""
    inner = apply_descent(twist_section(s, w.inverse()), trivialization)
    return twist_section(inner, w)


# -- twisted-operator globality data ------------------------------------------------------------


@lru_cache(maxsize=None)
def descent_bminusb_presentation() -> DiffOp:
    """The twisted order-2 operator written in the opposite-cell trivialisation.

    Conjugating the mixed second-order operator by
    (g33/g11)^(-lam1) (Delta11/Delta33)^(-lam2) expresses it relative to the
    section that trivialises the bundle where g11 * Delta33 != 0.
    """
    one = RatFunc.const(MATRIX_TABLE, 1)
    h = PowerSection(MATRIX, one, [
        (gvar(3, 3), -lam1()), (gvar(1, 1), lam1()),
        (minor(1, 1), -lam2()), (minor(3, 3), lam2())])
    return conjugate(mixed_second_order_matrix(), h)


def descent_regular_on_bminusb() -> tuple[bool, DiffOp | None]:
    return regular_on(descent_bminusb_presentation(), BMINUSB)


def descent_regular_on_big_cell() -> tuple[bool, DiffOp | None]:
    return regular_on(mixed_second_order_big(), BIG)
