"""The complete-conics picture: pairs of symmetric matrices with scalar product.

The variety consists of pairs ([S], [S']) of symmetric 3x3 matrices with
S S' scalar.  Its open cell is parametrised by an upper unipotent u and two
affine coordinates (x, y):

    S  = t(u^-1) diag(1, x, xy) u^-1,      S' = u diag(xy, y, 1) t(u)

so that S S' = xy I identically.  The mixed derivative d/dx d/dy plays the
same globalising role as the order-2 operator on the group compactification:
transported to the entry chart s_ij = S_ij / S_11 it has polynomial
coefficients, and it is ad-nilpotent under the infinitesimal sl3 action.

Charts:

* ``conic``  -- u12, u13, u23, x, y (the cell coordinates),
* ``entry``  -- s12, s13, s22, s23, s33 (normalised S-entries),
* ``cone``   -- all twelve entries S11..S33, T11..T33 of the two symmetric
  matrices (T stands for S'); operators lifted here are checked to commute
  with both Euler fields (bi-degree (0,0) homogeneity).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .ring import Poly, RatFunc, VarTable
from .weyl import (Affine, Chart, ChartMap, DiffOp, PowerSection,
                   ad_nilpotency_depth, commutator, conjugate, op_compose,
                   regular_on, transport)
from .pgl3 import PARAMS, _GEN_MATRICES, NILPOTENT_LABELS

CONIC_NAMES = ("u12", "u13", "u23", "x", "y")
ENTRY_NAMES = ("s12", "s13", "s22", "s23", "s33")
SYM_POSITIONS = ((1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))
CONE_NAMES = tuple(f"S{i}{j}" for i, j in SYM_POSITIONS) + \
    tuple(f"T{i}{j}" for i, j in SYM_POSITIONS)

CONIC_TABLE = VarTable(coords=CONIC_NAMES, params=PARAMS)
ENTRY_TABLE = VarTable(coords=ENTRY_NAMES, params=PARAMS)
CONE_TABLE = VarTable(coords=CONE_NAMES, params=PARAMS)

CONIC = Chart("conic", CONIC_TABLE)
ENTRY = Chart("conic_entry", ENTRY_TABLE)
CONE = Chart("conic_cone", CONE_TABLE)


def _sym_entry(prefix: str, i: int, j: int, table: VarTable) -> Poly:
    if i > j:
        i, j = j, i
    return table.var(f"{prefix}{i}{j}")


@lru_cache(maxsize=None)
def parametrization() -> tuple[tuple, tuple]:
    """Polynomial entries of (S, S') in the cell coordinates (u, x, y)."""
    t = CONIC_TABLE
    one, zero = t.one(), t.zero()
    u12, u13, u23 = t.var("u12"), t.var("u13"), t.var("u23")
    x, y = t.var("x"), t.var("y")
    # u^-1 for the standard upper unipotent placement
    vinv = [[one, -u12, u12 * u23 - u13],
            [zero, one, -u23],
            [zero, zero, one]]
    u = [[one, u12, u13],
         [zero, one, u23],
         [zero, zero, one]]

    def mul(p, q):
        return [[sum((p[i][k] * q[k][j] for k in range(3)), start=zero)
                 for j in range(3)] for i in range(3)]

    def transpose(p):
        return [[p[j][i] for j in range(3)] for i in range(3)]

    d1 = [[one, zero, zero], [zero, x, zero], [zero, zero, x * y]]
    d2 = [[x * y, zero, zero], [zero, y, zero], [zero, zero, one]]
    s = mul(mul(transpose(vinv), d1), vinv)
    sp = mul(mul(u, d2), transpose(u))
    return (tuple(tuple(row) for row in s), tuple(tuple(row) for row in sp))


def membership_defect() -> tuple[list, Poly]:
    """Entries of S S' - (S S')_11 I; all must vanish identically.

    Returns (list of off-diagonal/diagonal-difference polynomials, the
    common scalar (S S')_11, which should equal x*y).
    """
    s, sp = parametrization()
    zero = CONIC_TABLE.zero()
    prod = [[sum((s[i][k] * sp[k][j] for k in range(3)), start=zero)
             for j in range(3)] for i in range(3)]
    defects = []
    for i in range(3):
        for j in range(3):
            if i != j:
                defects.append(prod[i][j])
            elif i > 0:
                defects.append(prod[i][i] - prod[0][0])
    return defects, prod[0][0]


def boundary_rank_one_minors() -> list[Poly]:
    """All 2x2 minors of S at x = 0 (each must vanish: rank drops to one)."""
    s, _ = parametrization()
    zero = RatFunc.const(CONIC_TABLE, 0)
    at0 = [[RatFunc.from_poly(e).substitute({"x": zero}) for e in row]
           for row in s]
    minors = []
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            for c1 in range(3):
                for c2 in range(c1 + 1, 3):
                    m = at0[r1][c1] * at0[r2][c2] - at0[r1][c2] * at0[r2][c1]
                    minors.append(m.num)
    return minors


@lru_cache(maxsize=None)
def entry_formulas() -> dict[str, Poly]:
    """The five entry coordinates s_ij = S_ij/S_11 in cell coordinates."""
    s, _ = parametrization()
    return {"s12": s[0][1], "s13": s[0][2], "s22": s[1][1],
            "s23": s[1][2], "s33": s[2][2]}


@lru_cache(maxsize=None)
def map_conic_to_entry() -> ChartMap:
    """Invertible rational chart change between the cell and entry charts."""
    t = ENTRY_TABLE
    s12, s13 = RatFunc.var(t, "s12"), RatFunc.var(t, "s13")
    s22, s23 = RatFunc.var(t, "s22"), RatFunc.var(t, "s23")
    s33 = RatFunc.var(t, "s33")
    x = s22 - s12 * s12
    c = (s23 - s12 * s13) / x
    u23 = -c
    u12 = -s12
    u13 = u12 * u23 - s13
    y = (s33 - s13 * s13 - x * c * c) / x
    forward = {"u12": u12, "u13": u13, "u23": u23, "x": x, "y": y}
    inverse = {name: RatFunc.from_poly(p) for name, p in entry_formulas().items()}
    return ChartMap(CONIC, ENTRY, forward, inverse)


@lru_cache(maxsize=None)
def mixed_derivative_conic() -> DiffOp:
    return op_compose(DiffOp.partial(CONIC, "x"), DiffOp.partial(CONIC, "y"))


@lru_cache(maxsize=None)
def mixed_derivative_entry() -> DiffOp:
    """d/dx d/dy transported to the entry chart (Jacobian inversion)."""
    return transport(mixed_derivative_conic(), map_conic_to_entry())


def mixed_derivative_regular() -> tuple[bool, DiffOp | None]:
    return regular_on(mixed_derivative_entry(), ENTRY)


# -- the twelve-entry double cone ---------------------------------------------------------


def _cone_var(prefix: str, i: int, j: int) -> Poly:
    return _sym_entry(prefix, i, j, CONE_TABLE)


def action_field_cone(xi) -> DiffOp:
    """Infinitesimal action on the double cone.

    The flow of exp(-t xi) sends S to t(exp(t xi)) S exp(t xi) and S' to
    exp(-t xi) S' t(exp(-t xi)); entry (i <= j) coefficients are read off the
    symmetric derivative matrices.
    """
    terms = {}

    def add(name: str, coeff: Poly):
        if coeff.is_zero():
            return
        idx = [0] * len(CONE_NAMES)
        idx[CONE.coord_index(name)] = 1
        key = tuple(idx)
        rf = RatFunc.from_poly(coeff)
        cur = terms.get(key)
        terms[key] = rf if cur is None else cur + rf

    for i in range(1, 4):
        for j in range(i, 4):
            # (t(xi) S + S xi)_{ij}
            coeff = CONE_TABLE.zero()
            for k in range(1, 4):
                if xi[k - 1][i - 1]:
                    coeff = coeff + _cone_var("S", k, j).scale(xi[k - 1][i - 1])
                if xi[k - 1][j - 1]:
                    coeff = coeff + _cone_var("S", i, k).scale(xi[k - 1][j - 1])
            add(f"S{i}{j}", coeff)
            # -(xi S' + S' t(xi))_{ij}
            coeff = CONE_TABLE.zero()
            for k in range(1, 4):
                if xi[i - 1][k - 1]:
                    coeff = coeff + _cone_var("T", k, j).scale(-xi[i - 1][k - 1])
                if xi[j - 1][k - 1]:
                    coeff = coeff + _cone_var("T", i, k).scale(-xi[j - 1][k - 1])
            add(f"T{i}{j}", coeff)
    return DiffOp(CONE, terms)


@lru_cache(maxsize=None)
def generator_field_cone(label: str) -> DiffOp:
    return action_field_cone(tuple(tuple(Fraction(e) for e in row)
                                   for row in _GEN_MATRICES[label]))


def euler_field_cone(prefix: str) -> DiffOp:
    terms = {}
    for i, j in SYM_POSITIONS:
        name = f"{prefix}{i}{j}"
        idx = [0] * len(CONE_NAMES)
        idx[CONE.coord_index(name)] = 1
        terms[tuple(idx)] = RatFunc.var(CONE_TABLE, name)
    return DiffOp(CONE, terms)


@lru_cache(maxsize=None)
def mixed_derivative_cone() -> DiffOp:
    """Lift of the entry-chart operator to the S-cone (degree-0 homogeneous)."""
    op = mixed_derivative_entry()
    s11 = RatFunc.from_poly(_cone_var("S", 1, 1))
    mapping = {f"s{i}{j}": RatFunc.from_poly(_cone_var("S", i, j)) / s11
               for (i, j) in SYM_POSITIONS if (i, j) != (1, 1)}
    terms = {}
    for K, c in op.terms.items():
        coeff = c.substitute(mapping) * s11 ** sum(K)
        idx = [0] * len(CONE_NAMES)
        for pos, k in enumerate(K):
            name = "S" + ENTRY_NAMES[pos][1:]
            idx[CONE.coord_index(name)] = k
        terms[tuple(idx)] = coeff
    return DiffOp(CONE, terms)


def cone_nilpotency_depths(limit: int = 12) -> dict[str, int | None]:
    d = mixed_derivative_cone()
    return {label: ad_nilpotency_depth(d, generator_field_cone(label), limit)
            for label in NILPOTENT_LABELS}


def twisted_mixed_derivative() -> DiffOp:
    """Conjugate of the lifted operator by S11^lam1 T33^lam2 (the twisted
    analogue of the canonical-section conjugation)."""
    one = RatFunc.const(CONE_TABLE, 1)
    section = PowerSection(CONE, one, [
        (_cone_var("S", 1, 1), Affine.param("lam1")),
        (_cone_var("T", 3, 3), Affine.param("lam2"))])
    return conjugate(mixed_derivative_cone(), section)


def bracket_table_defects() -> list[tuple[str, str]]:
    """Pairs of generators whose cone fields fail the sl3 bracket relations."""
    from .pgl3 import mat_bracket, Generator
    bad = []
    labels = tuple(_GEN_MATRICES)
    for a in labels:
        for b in labels:
            if a >= b:
                continue
            ma = Generator(a).matrix
            mb = Generator(b).matrix
            lhs = commutator(generator_field_cone(a), generator_field_cone(b))
            rhs = action_field_cone(mat_bracket(ma, mb))
            if lhs != rhs:
                bad.append((a, b))
    return bad
