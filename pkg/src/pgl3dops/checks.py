"""Registered identity suites, the concordance report, and report assembly.

Every check verifies an exact identity (or a finite family of them) and
returns pass/fail; comparisons against the reference *display* may instead
return the status "mismatch-reported" when the engine derivation is
validated independently but disagrees with the displayed form (a known typo
in the display).  Mismatch-reported checks never fail a run, but they are
always listed, with the exact residual.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from . import certify as CERT
from . import conics as CON
from . import pgl3 as P
from . import reference as REF
from .ring import RatFunc
from .weyl import (Affine, DiffOp, ad_nilpotency_depth, commutator,
                   op_apply, op_apply_section, op_compose, regular_on)


@dataclass
class CheckResult:
    check_id: str
    status: str          # "pass" | "fail" | "mismatch-reported"
    details: str
    wall_time: float

    def to_json(self) -> dict:
        # wall time is excluded so that identical runs give identical bytes
        return {"id": self.check_id, "status": self.status,
                "details": self.details}


@dataclass
class CheckConfig:
    param_mode: str = "symbolic"
    grid: int = 4
    nilpotency_limit: int = 12
    seed: int = 0


SCHEMA_VERSION = "1"


# -- small helpers ----------------------------------------------------------------------


def _sym_sigma():
    return P.monomial_section()


def _sym_nu():
    return P.weight_exponents(P.sym_m1(), P.sym_m2())


def _nu_texts(table):
    n1, n2 = _sym_nu()
    return n1.as_ratfunc(table), n2.as_ratfunc(table)


def _sub_nu(rf: RatFunc) -> RatFunc:
    """Replace the stand-alone parameters nu1, nu2 by their (lam, m) forms."""
    n1, n2 = _nu_texts(rf.table)
    return rf.substitute({"nu1": n1, "nu2": n2})


def _grid_points(n, dims=4):
    return itertools.product(range(n + 1), repeat=dims)


def lagrange_interpolate(values, names, degrees, table):
    """Tensor-grid Lagrange interpolation over integer nodes 0..d_i.

    ``values`` maps integer tuples (one per name) to Fractions; every node of
    the product grid must be present.  Returns a Poly over ``table`` in the
    named parameters.
    """
    def rec(prefix, rest):
        if not rest:
            return table.const(values[prefix])
        name, deg = rest[0]
        var = table.var(name)
        total = table.zero()
        for i in range(deg + 1):
            branch = rec(prefix + (i,), rest[1:])
            basis = table.one()
            denom = Fraction(1)
            for j in range(deg + 1):
                if j != i:
                    basis = basis * (var - table.const(j))
                    denom *= (i - j)
            total = total + basis * branch.scale(Fraction(1, 1) / denom)
        return total

    return rec((), list(zip(names, degrees)))


# -- cdv suite -----------------------------------------------------------------------------


def check_cdv_forward_reference(cfg):
    fw = P.big_cell_in_matrix()
    bad = [name for name in fw
           if fw[name] != REF.rf_matrix(REF.CDV_FORWARD[name])]
    if bad:
        return "fail", f"forward formulas differ from the reference: {bad}"
    return "pass", "all 8 forward formulas equal the reference display"


def check_cdv_backward_reference(cfg):
    bw = P.matrix_ratios_in_big_cell()
    mismatches = []
    for name, text in REF.CDV_BACKWARD.items():
        eng = RatFunc.from_poly(bw[name])
        ref = REF.rf_big(text)
        if eng != ref:
            mismatches.append(
                f"{name}/g33: engine {eng.to_text()} vs display {text}")
    if mismatches == [f"g32/g33: engine U32 vs display U23"]:
        return "mismatch-reported", mismatches[0] + " (display typo)"
    if mismatches:
        return "fail", "; ".join(mismatches)
    return "fail", "expected the known g32 display typo to be detected"


def check_cdv_roundtrip_forward(cfg):
    fw = P.big_cell_in_matrix()
    bw = P.matrix_ratios_in_big_cell()
    subs = {f"g{i}{j}": RatFunc.from_poly(bw[f"g{i}{j}"])
            for i in (1, 2, 3) for j in (1, 2, 3)}
    bad = [name for name, f in fw.items()
           if f.substitute(subs) != RatFunc.var(P.BIG_TABLE, name)]
    if bad:
        return "fail", f"forward∘backward is not the identity on {bad}"
    return "pass", "forward∘backward fixes all 8 big-cell coordinates"


def check_cdv_roundtrip_backward(cfg):
    fw = P.big_cell_in_matrix()
    bw = P.matrix_ratios_in_big_cell()
    g33 = RatFunc.from_poly(P.gvar(3, 3))
    bad = []
    for i, j in itertools.product((1, 2, 3), repeat=2):
        expr = RatFunc.from_poly(bw[f"g{i}{j}"]).substitute(fw)
        if expr != RatFunc.from_poly(P.gvar(i, j)) / g33:
            bad.append(f"g{i}{j}")
    if bad:
        return "fail", f"backward∘forward differs from g_ij/g33 on {bad}"
    return "pass", "backward∘forward reproduces every ratio g_ij/g33"


def check_cdv_identity_values(cfg):
    fw = P.big_cell_in_matrix()
    point = {f"g{i}{j}": Fraction(int(i == j))
             for i in (1, 2, 3) for j in (1, 2, 3)}
    expected = {"a1": 1, "a2": 1}
    bad = [n for n, f in fw.items()
           if f.evaluate(point) != expected.get(n, 0)]
    if bad:
        return "fail", f"values at the identity matrix are wrong for {bad}"
    return "pass", "forward formulas at the identity give (1, 1, 0, ..., 0)"


def check_cdv_homogeneous(cfg):
    euler = P.euler_field_matrix()
    bad = [n for n, f in P.big_cell_in_matrix().items()
           if not op_apply(euler, f).is_zero()]
    if bad:
        return "fail", f"not degree-0 homogeneous: {bad}"
    return "pass", "all forward formulas are annihilated by the Euler field"


# -- vectorfields suite ---------------------------------------------------------------------


def _field_reference_matrix(label):
    return REF.op_matrix(REF.FIELDS_MATRIX_LEFT[label])


def check_fields_matrix_reference(cfg):
    mismatches = []
    for label in P.GENERATOR_LABELS:
        eng = P.action_field_matrix(P.Generator(label, "left"))
        ref = _field_reference_matrix(label)
        if eng != ref:
            res = (eng - ref).to_text()
            mismatches.append(f"{label}: residual engine-display = {res}")
    if mismatches:
        if all(m.startswith("Y3") for m in mismatches):
            return "mismatch-reported", ("7 of 8 displayed matrix fields "
                                         "match verbatim; " + mismatches[0] +
                                         " (display typo)")
        return "fail", "; ".join(mismatches)
    return "fail", "expected the known Y3 display typo to be detected"


def check_fields_bracket_left(cfg):
    return _bracket_table("left")


def check_fields_bracket_right(cfg):
    return _bracket_table("right")


def _bracket_table(factor):
    for a, b in itertools.combinations(P.GENERATOR_LABELS, 2):
        ga, gb = P.Generator(a, factor), P.Generator(b, factor)
        lhs = commutator(P.action_field_matrix(ga), P.action_field_matrix(gb))
        rhs = P.field_of_matrix(P.mat_bracket(ga.matrix, gb.matrix), factor)
        if lhs != rhs:
            return "fail", f"[{a},{b}] ({factor}) differs from the matrix bracket"
    return "pass", f"all 28 {factor}-factor brackets match matrix commutators"


def check_fields_bracket_cross(cfg):
    for a in P.GENERATOR_LABELS:
        for b in P.GENERATOR_LABELS:
            c = commutator(P.action_field_matrix(P.Generator(a, "left")),
                           P.action_field_matrix(P.Generator(b, "right")))
            if not c.is_zero():
                return "fail", f"[{a}-left, {b}-right] != 0"
    return "pass", "all 64 cross-factor brackets vanish"


def check_fields_big_cell_reference(cfg):
    matched, mismatches = [], []
    for label in ("X1", "X2", "X3", "Y1", "Y2", "Y3"):
        eng = P.action_field_big_cell(P.Generator(label, "left"))
        ref = REF.op_big(REF.FIELDS_BIG_LEFT[label])
        if eng == ref:
            matched.append(label)
        else:
            mismatches.append(
                f"{label}: residual engine-display = {(eng - ref).to_text()}")
    if set(matched) >= {"X1", "X2", "X3"} and mismatches:
        return "mismatch-reported", (f"matched: {matched}; " +
                                     "; ".join(mismatches))
    if mismatches:
        return "fail", "; ".join(mismatches)
    return "fail", "expected the known Y-field display typos to be detected"


def check_fields_big_cell_roundtrip(cfg):
    # transporting the big-cell form back to the matrix chart recovers the field
    for label in ("Y1", "X1", "H2"):
        gen = P.Generator(label, "left")
        big = P.action_field_big_cell(gen)
        ratio = P.transport(big, P.map_big_to_ratio())
        lifted = P.homogenize(ratio)
        direct = P.action_field_matrix(gen)
        # both act identically on degree-0 functions; compare on the ratios
        for i, j in ((1, 1), (1, 2), (2, 3)):
            f = RatFunc.from_poly(P.gvar(i, j)) / RatFunc.from_poly(P.gvar(3, 3))
            if op_apply(lifted, f) != op_apply(direct, f):
                return "fail", f"transport roundtrip broke {label} on g{i}{j}/g33"
    return "pass", "big-cell fields transport back to the matrix-chart fields"


def check_fields_homogeneous(cfg):
    euler = P.euler_field_matrix()
    for label in P.GENERATOR_LABELS:
        for factor in ("left", "right"):
            f = P.action_field_matrix(P.Generator(label, factor))
            if not commutator(f, euler).is_zero():
                return "fail", f"{label}-{factor} does not commute with Euler"
    return "pass", "all 16 matrix-chart fields commute with the Euler field"


# -- d0 suite ----------------------------------------------------------------------------------


def check_partials_reference(cfg):
    p1, p2 = P.alpha_derivations_matrix()
    if p1 != REF.op_matrix(REF.PARTIAL_A1):
        return "fail", "d/da1 differs from the displayed form"
    if p2 != REF.op_matrix(REF.PARTIAL_A2):
        return "fail", "d/da2 differs from the displayed form"
    return "pass", "Jacobian inversion reproduces both displayed derivations"


def check_partials_action(cfg):
    p1, p2 = P.alpha_derivations_matrix()
    fw = P.big_cell_in_matrix()
    checks = [(p1, "a1", 1), (p1, "a2", 0), (p1, "U13", 0),
              (p2, "a2", 1), (p2, "a1", 0), (p2, "U21", 0)]
    for op, name, want in checks:
        got = op_apply(op, fw[name])
        if got != RatFunc.const(P.MATRIX_TABLE, want):
            return "fail", f"d/dalpha applied to {name} gave {got.to_text()}"
    return "pass", "derivations act correctly on the coordinate functions"


def check_d0_reference(cfg):
    d0 = P.mixed_second_order_matrix()
    first = REF.op_matrix(REF.ORDER2_FACTORS[0])
    second = REF.op_matrix(REF.ORDER2_FACTORS[1])
    if d0 != op_compose(first, second):
        return "fail", "composed operator differs from the displayed expansion"
    return "pass", "composed operator equals the displayed second-order form"


def check_d0_polynomial(cfg):
    ok, witness = regular_on(P.mixed_second_order_matrix(), P.MATRIX)
    if not ok:
        return "fail", f"non-polynomial coefficient: {witness.to_text()}"
    return "pass", "all matrix-chart coefficients are polynomials"


def check_d0_monomial_action(cfg):
    d0 = P.mixed_second_order_big()
    for m, n in ((1, 1), (3, 2), (2, 5)):
        f = RatFunc.from_poly(P.BIG_TABLE.var("a1") ** m * P.BIG_TABLE.var("a2") ** n)
        want = RatFunc.from_poly(
            P.BIG_TABLE.var("a1") ** (m - 1) * P.BIG_TABLE.var("a2") ** (n - 1)
        ).scale(m * n)
        if op_apply(d0, f) != want:
            return "fail", f"wrong action on a1^{m} a2^{n}"
    return "pass", "acts on a1^m a2^n as m n a1^(m-1) a2^(n-1)"


def check_d0_nilpotency(cfg):
    d0 = P.mixed_second_order_matrix()
    depths = {}
    for label in P.NILPOTENT_LABELS:
        for factor in ("left", "right"):
            V = P.action_field_matrix(P.Generator(label, factor))
            d = ad_nilpotency_depth(d0, V, cfg.nilpotency_limit)
            if d is None:
                return "fail", (f"ad({label}-{factor}) not nilpotent within "
                                f"limit {cfg.nilpotency_limit}")
            depths[f"{label}-{factor}"] = d
    worst = max(depths.values())
    return "pass", f"finite for all 12 nilpotent fields, max depth {worst}"


def check_d0_euler(cfg):
    d0 = P.mixed_second_order_matrix()
    if not commutator(d0, P.euler_field_matrix()).is_zero():
        return "fail", "does not commute with the Euler field"
    return "pass", "commutes with the Euler field (degree-0 homogeneous)"


# -- twists suite ------------------------------------------------------------------------------


def check_twist_corrections(cfg):
    for label, text in REF.TWIST_CORRECTIONS.items():
        eng = P.twist_correction_big(P.Generator(label, "left"))
        if eng != REF.rf_big(text):
            return "fail", (f"correction of {label} is {eng.to_text()}, "
                            f"display has {text}")
    return "pass", "all six zero-order corrections match the display"


def check_twist_regular_big_cell(cfg):
    ok, witness = P.descent_regular_on_big_cell()
    if not ok:
        return "fail", f"witness: {witness.to_text()}"
    return "pass", "twisted operator is regular on the big cell"


def check_twist_regular_bminusb(cfg):
    ok, witness = P.descent_regular_on_bminusb()
    if not ok:
        return "fail", f"witness: {witness.to_text()}"
    return "pass", ("coefficients lie in k[g][1/g11, 1/Delta33] on the "
                    "opposite cell")


def check_twist_nilpotency(cfg):
    d0 = P.mixed_second_order_matrix()
    for label in P.NILPOTENT_LABELS:
        for factor in ("left", "right"):
            V = P.twisted_field_matrix(P.Generator(label, factor))
            if ad_nilpotency_depth(d0, V, cfg.nilpotency_limit) is None:
                return "fail", f"twisted ad({label}-{factor}) exceeded the limit"
    return "pass", "twisted operator is ad-nilpotent under all twisted fields"


def check_twist_section_example(cfg):
    sig = P.monomial_section()
    tw = P.twist_section(sig, P.W_S1.inverse())
    nu1, nu2 = _sym_nu()
    one = RatFunc.const(P.MATRIX_TABLE, 1)
    from .weyl import PowerSection
    expected = PowerSection(P.MATRIX, one, [
        (P.gvar(3, 3), nu2), (P.minor(2, 2), nu1), (P.det_g(), P.sym_m1())])
    if tw != expected:
        return "fail", "twisted section is not (a1 + U12 U21)^nu1 sigma"
    return "pass", ("s1-twisted section equals (a1 + U12*U21)^nu1 sigma "
                    "(minor Delta22 replaces Delta11)")


def check_twist_descent_example(cfg):
    # D^{s1} sigma = m2 ( m1 U12 U21 sigma_{nu+rho} + (m1 + nu1) sigma_{nu+a2} )
    sig = P.monomial_section()
    out = P.apply_twisted_descent(sig, P.W_S1)
    m1, m2 = P.sym_m1(), P.sym_m2()
    s_rho = P.monomial_section(m1 - 1, m2 - 1)
    s_a2 = P.monomial_section(m1, m2 - 1)
    t = P.MATRIX_TABLE
    u12u21 = (RatFunc.from_poly(P.minor(2, 1)) * RatFunc.from_poly(P.minor(1, 2))
              / (RatFunc.from_poly(P.minor(1, 1)) ** 2))
    m1r, m2r = RatFunc.var(t, "m1"), RatFunc.var(t, "m2")
    nu1r = _sym_nu()[0].as_ratfunc(t)
    expected = s_rho.scale(m2r * m1r * u12u21) + \
        s_a2.scale(m2r * (m1r + nu1r))
    if out != expected:
        return "fail", "twisted descent does not match the displayed splitting"
    return "pass", ("twisted descent splits as m2 (m1 U12 U21 sigma_{nu+rho}"
                    " + (m1+nu1) sigma_{nu+alpha2}) symbolically")


def check_twist_bracket_table(cfg):
    """[twisted(xi), twisted(eta)] = twisted([xi, eta]) with symbolic lam."""
    for a, b in itertools.combinations(P.GENERATOR_LABELS, 2):
        ga, gb = P.Generator(a, "left"), P.Generator(b, "left")
        lhs = commutator(P.twisted_field_matrix(ga), P.twisted_field_matrix(gb))
        rhs = P.twisted_field_of_matrix(P.mat_bracket(ga.matrix, gb.matrix),
                                        "left")
        if lhs != rhs:
            return "fail", f"twisted bracket [{a},{b}] fails"
    for a, b in (("X1", "Y2"), ("H1", "Y3"), ("Y1", "X3"), ("H2", "H1")):
        lhs = commutator(P.twisted_field_matrix(P.Generator(a, "left")),
                         P.twisted_field_matrix(P.Generator(b, "right")))
        if not lhs.is_zero():
            return "fail", f"twisted cross bracket [{a}-left, {b}-right] != 0"
    return "pass", ("twisted fields satisfy the full bracket table and "
                    "cross-factor brackets vanish, symbolically in lam")


def check_twist_operator_identity(cfg):
    rng = random.Random(cfg.seed)
    d0 = P.mixed_second_order_matrix()
    for w in (P.W_E, P.W_S1, P.W_S1S2):
        tw = P.twist_operator(d0, w)
        if w.label == "e" and tw != d0:
            return "fail", "identity twist changed the operator"
        for _ in range(3):
            exps = [rng.randint(0, 1) for _ in range(9)]
            mono = P.MATRIX_TABLE.one()
            for name, e in zip(P.MATRIX_NAMES, exps):
                mono = mono * P.MATRIX_TABLE.var(name) ** e
            f = RatFunc.from_poly(mono)
            lhs = op_apply(tw, f)
            sub_in = P._conjugation_formulas(P.mat_inv(w.matrix), P.mat_inv(w.matrix))
            sub_out = P._conjugation_formulas(w.matrix, w.matrix)
            rhs = op_apply(d0, f.substitute(sub_in)).substitute(sub_out)
            if lhs != rhs:
                return "fail", f"twist by {w.label} fails the defining identity"
    return "pass", "operator twists satisfy w.(D(w^{-1}.f)) on samples"


# -- casimir suite ------------------------------------------------------------------------------


def check_casimir_centrality(cfg):
    cas = P.casimir_operator("left")
    for label in P.GENERATOR_LABELS:
        com = commutator(cas, P.twisted_field_matrix(P.Generator(label, "left")))
        if not com.is_zero():
            return "fail", f"[c, {label}] != 0 with symbolic lam"
    return "pass", "the Casimir commutes with all 8 twisted left fields"


def check_casimir_routes_agree(cfg):
    # composed-operator route against the iterated section route
    sig = P.monomial_section()
    f = P.canonical_section()
    via_op = op_apply_section(P.casimir_operator("left"), sig / f) * f
    via_sections = P.casimir_apply(sig)
    if via_op != via_sections:
        return "fail", "operator route and section route disagree"
    return "pass", "composed-operator and iterated-section routes agree"


def check_casimir_eigenvalue(cfg):
    sig = P.monomial_section()
    from .weyl import express_as_multiple
    w = express_as_multiple(P.casimir_apply(sig), sig)
    if w != P.central_character(*_sym_nu()):
        return "fail", f"eigenvalue {w.to_text()} differs from the character"
    return "pass", "c sigma_nu = chi_nu(c) sigma_nu symbolically"


def check_chi_values(cfg):
    t = P.MATRIX_TABLE
    if P.central_character(Affine(0), Affine(0)) != RatFunc.const(t, 0):
        return "fail", "chi(0) != 0"
    if P.central_character(Affine(1), Affine(1)) != RatFunc.const(t, 1):
        return "fail", "chi(rho) != 1"
    chi_ref = _sub_nu(REF.rf_matrix(REF.CHI_TEXT))
    chi_eng = _sub_nu(P.central_character(Affine.param("nu1"), Affine.param("nu2")))
    if chi_eng != chi_ref:
        return "fail", "character formula differs from the display"
    return "pass", "chi(0) = 0, chi(rho) = 1, formula matches the display"


def check_casimir_alpha_free(cfg):
    sig = P.monomial_section()
    chi = P.central_character(*_sym_nu())
    B = P.BIG_TABLE
    samples = [B.one(), B.var("U12") * B.var("U21"),
               B.var("U13") * B.var("U31") + B.var("U23"),
               B.var("U12") * B.var("U23") * B.var("U32") - B.var("U21")]
    z = RatFunc.const(B, 0)
    nonzero_seen = False
    for f in samples:
        fm = P.big_to_matrix_deg0(RatFunc.from_poly(f))
        res = P.casimir_apply(sig.scale(fm)) + sig.scale(-chi * fm)
        if res.is_zero():
            continue
        nonzero_seen = True
        q = P.matrix_deg0_to_big(res.ratio_to(sig))
        at0 = q.substitute({"a1": z, "a2": z})
        if not at0.is_zero():
            return "fail", (f"alpha-free component {at0.to_text()} "
                            f"for f = {f.to_text()}")
    if not nonzero_seen:
        return "fail", "all samples were annihilated; the check is vacuous"
    return "pass", ("(c - chi_nu)(f sigma_nu) lies in a1*(sections) + "
                    "a2*(sections) for symbolic parameters, including "
                    "U-dependent coefficients f")


def check_casimir_lemma_operator(cfg):
    # the intended reading of the displayed second-order reduction operator
    B = P.BIG_TABLE

    def pd(name, coeff=None):
        return DiffOp.partial(P.BIG, name, coeff)

    def mul(name):
        return DiffOp.multiplication(P.BIG, RatFunc.var(B, name))

    a1, a2 = RatFunc.var(B, "a1"), RatFunc.var(B, "a2")
    omega = (op_compose(pd("U12"), pd("U21")).scale(a1)
             + op_compose(pd("U23") + op_compose(mul("U12"), pd("U13")),
                          pd("U32") + op_compose(mul("U21"), pd("U31"))).scale(a2)
             + op_compose(pd("U13"), pd("U31")).scale(a1 * a2)
             ).scale(Fraction(1, 3))
    sig = P.monomial_section()
    chi = P.central_character(*_sym_nu())
    unames = ("U12", "U21", "U13", "U31", "U23", "U32")
    samples = [B.one()]
    samples += [B.var(u) for u in unames]
    samples += [B.var(a) * B.var(b)
                for a, b in itertools.combinations_with_replacement(unames, 2)]
    rng = random.Random(cfg.seed)
    extra = B.zero()
    for u in unames:
        extra = extra + B.var(u).scale(rng.randint(-3, 3))
    samples.append(extra * extra)
    for f in samples:
        fb = RatFunc.from_poly(f)
        fm = P.big_to_matrix_deg0(fb)
        lhs = P.casimir_apply(sig.scale(fm)) + sig.scale(-chi * fm)
        rhs = sig.scale(P.big_to_matrix_deg0(op_apply(omega, fb)))
        if lhs != rhs:
            return "fail", f"lemma operator fails on f = {f.to_text()}"
    return "pass", (f"(c - chi_nu)(f sigma_nu) = (1/3) Omega(f) sigma_nu on "
                    f"{len(samples)} coefficient samples, symbolic parameters")


# -- cases suite ---------------------------------------------------------------------------------


def _sym_case_scalar(case):
    """Symbolic engine scalar of a case move (parameters lam, m kept free)."""
    sig = P.monomial_section()
    m1, m2 = P.sym_m1(), P.sym_m2()
    nu = _sym_nu()
    from .weyl import express_as_multiple
    if case == "1":
        return express_as_multiple(P.apply_descent(sig),
                                   P.monomial_section(m1 - 1, m2 - 1))
    if case == "2b":
        out = P.apply_twisted_descent(sig, P.W_S1)
        out = P.casimir_apply(out) + out.scale(
            -P.central_character(*P.shift_weight(nu, {"rho": 1})))
        return express_as_multiple(out, P.monomial_section(m1, m2 - 1))
    if case == "2a":
        out = P.apply_twisted_descent(sig, P.W_S2)
        out = P.casimir_apply(out) + out.scale(
            -P.central_character(*P.shift_weight(nu, {"rho": 1})))
        return express_as_multiple(out, P.monomial_section(m1 - 1, m2))
    raise ValueError(case)


def check_case1_symbolic(cfg):
    got = _sym_case_scalar("1")
    if got != _sub_nu(REF.rf_matrix(REF.CASE1_SCALAR)):
        return "fail", f"engine scalar {got.to_text()}"
    return "pass", "descent scalar = m1*m2 symbolically"


def check_case2b_engine_form(cfg):
    got = _sym_case_scalar("2b")
    engine_form = _sub_nu(REF.rf_matrix(REF.CASE2B_SCALAR_ENGINE))
    if got != engine_form:
        return "fail", f"engine scalar {got.to_text()} != recorded closed form"
    return "pass", ("scalar = -(m2/3) nu1 (m1 + nu1 + 1) symbolically "
                    "(engine-verified closed form)")


def check_case2b_displayed_form(cfg):
    got = _sym_case_scalar("2b")
    displayed = _sub_nu(REF.rf_matrix(REF.CASE2B_SCALAR_DISPLAYED))
    if got == displayed:
        return "pass", "matches the displayed closed form"
    diff = got - displayed
    return "mismatch-reported", (
        "engine scalar -(m2/3)*nu1*(m1+nu1+1) differs from the displayed "
        "-(m2/3)*((m1+nu1)*(nu1+1)+nu1) by " + diff.to_text() +
        "; the displayed middle factor (nu1+1) should read nu1 "
        "(equivalently chi_{nu+alpha2}-chi_{nu+rho} = -(nu1+1)/3, "
        "not -(nu1+2)/3); zero/nonzero agree on all support edges")


def check_case2a_engine_form(cfg):
    got = _sym_case_scalar("2a")
    engine_form = _sub_nu(REF.rf_matrix(REF.CASE2A_SCALAR_ENGINE))
    if got != engine_form:
        return "fail", f"engine scalar {got.to_text()} != recorded closed form"
    return "pass", ("scalar = -(m1/3) nu2 (m2 + nu2 + 1) symbolically "
                    "(engine-derived, the display only says 'likewise')")


def check_case2b_interpolation(cfg):
    # sampled-mode recovery: interpolate the scalar from grid evaluations
    degrees = {"lam1": 1, "lam2": 3, "m1": 3, "m2": 4}
    names = tuple(degrees)
    values = {}
    for pt in itertools.product(*(range(degrees[n] + 1) for n in names)):
        vals = dict(zip(names, pt))
        p = CERT.SupportPoint(vals["m1"], vals["m2"],
                              *CERT.weight_at((vals["lam1"], vals["lam2"]),
                                              vals["m1"], vals["m2"]))
        values[pt] = CERT.case_scalar((vals["lam1"], vals["lam2"]), p, "2b",
                                      check_preconditions=False)
    poly = lagrange_interpolate(values, names, tuple(degrees[n] for n in names),
                                P.MATRIX_TABLE)
    sym = _sym_case_scalar("2b")
    if RatFunc.from_poly(poly) != sym:
        return "fail", "interpolated polynomial differs from the symbolic scalar"
    # out-of-grid confirmation points
    rng = random.Random(cfg.seed)
    for _ in range(3):
        vals = {n: rng.randint(degrees[n] + 1, degrees[n] + 4) for n in names}
        p = CERT.SupportPoint(vals["m1"], vals["m2"],
                              *CERT.weight_at((vals["lam1"], vals["lam2"]),
                                              vals["m1"], vals["m2"]))
        direct = CERT.case_scalar((vals["lam1"], vals["lam2"]), p, "2b",
                                  check_preconditions=False)
        if poly.evaluate(vals) != direct:
            return "fail", f"interpolant wrong outside the grid at {vals}"
    return "pass", ("grid interpolation (degree bounds 1,3,3,4) recovers the "
                    "symbolic scalar and matches out-of-grid samples")


def check_case2_grid(cfg):
    n = cfg.grid
    checked = 0
    display_disagreements = 0
    for l1, l2, m1, m2 in _grid_points(n):
        p = CERT.SupportPoint(m1, m2, *CERT.weight_at((l1, l2), m1, m2))
        got = CERT.case_scalar((l1, l2), p, "2b", check_preconditions=False)
        want = CERT.closed_form_value("2b", p)
        if got != want:
            return "fail", f"engine vs closed form at lam=({l1},{l2}) m=({m1},{m2})"
        displayed = Fraction(-m2, 3) * ((m1 + p.nu1) * (p.nu1 + 1) + p.nu1)
        if got != displayed:
            display_disagreements += 1
        checked += 1
    return "pass", (f"engine matches the corrected closed form on all "
                    f"{checked} grid points; the displayed form disagrees on "
                    f"{display_disagreements} of them (see concordance)")


def check_case3a_grid(cfg):
    n = cfg.grid
    checked = 0
    for l1, l2, m1, m2 in _grid_points(n):
        nu1, nu2 = CERT.weight_at((l1, l2), m1, m2)
        if nu1 < 2:
            continue
        p = CERT.SupportPoint(m1, m2, nu1, nu2)
        got = CERT.case_scalar((l1, l2), p, "3a", check_preconditions=False)
        want = CERT.closed_form_value("3a", p)
        if got != want:
            return "fail", (f"engine {got} vs displayed product {want} at "
                            f"lam=({l1},{l2}) m=({m1},{m2})")
        checked += 1
    return "pass", (f"engine scalar equals the displayed 7-factor product at "
                    f"all {checked} grid points with nu1 >= 2")


def check_case3b_grid(cfg):
    n = cfg.grid
    checked = 0
    for l1, l2, m1, m2 in _grid_points(n):
        nu1, nu2 = CERT.weight_at((l1, l2), m1, m2)
        if nu2 < 2:
            continue
        p = CERT.SupportPoint(m1, m2, nu1, nu2)
        got = CERT.case_scalar((l1, l2), p, "3b", check_preconditions=False)
        want = CERT.closed_form_value("3b", p)
        if got != want:
            return "fail", (f"engine {got} vs mirrored product {want} at "
                            f"lam=({l1},{l2}) m=({m1},{m2})")
        checked += 1
    return "pass", (f"engine-derived mirrored product verified at all "
                    f"{checked} grid points with nu2 >= 2")


def check_case4_scalar(cfg):
    if cfg.param_mode == "symbolic":
        from .weyl import PowerSection, express_as_multiple
        lam1 = Affine(1) + P.sym_m2().scale(2) - P.sym_m1()
        lam2 = Affine(1) + P.sym_m1().scale(2) - P.sym_m2()
        one = RatFunc.const(P.MATRIX_TABLE, 1)
        f_lam = PowerSection(P.MATRIX, one, [(P.gvar(3, 3), lam1),
                                             (P.minor(1, 1), lam2)])

        def sect(dm1, dm2):
            m1 = P.sym_m1() + dm1
            m2 = P.sym_m2() + dm2
            n1 = lam2 - m1.scale(2) + m2
            n2 = lam1 + m1 - m2.scale(2)
            return PowerSection(P.MATRIX, one, [
                (P.gvar(3, 3), n2), (P.minor(1, 1), n1), (P.det_g(), m1)])

        tw = P.twist_section(sect(0, 0), P.W_LONG.inverse())
        mid = op_apply_section(P.mixed_second_order_matrix(), tw / f_lam) * f_lam
        out = P.twist_section(mid, P.W_LONG)
        for mu in ((2, 2), (3, 0), (1, 1)):
            out = P.casimir_apply(out) + out.scale(
                -P.central_character(Affine(mu[0]), Affine(mu[1])))
        got = express_as_multiple(out, sect(1, 1))
        if got != REF.rf_matrix(REF.CASE4_SCALAR):
            return "fail", f"engine scalar {got.to_text()}"
        return "pass", "-(2/3)(m1+4)(m2+4) with symbolic m1, m2"
    checked = 0
    for m1, m2 in itertools.product(range(cfg.grid + 1), repeat=2):
        lam = (1 - m1 + 2 * m2, 1 + 2 * m1 - m2)
        p = CERT.SupportPoint(m1, m2, 1, 1)
        got = CERT.case_scalar(lam, p, "4")
        if got != CERT.closed_form_value("4", p):
            return "fail", f"mismatch at m=({m1},{m2})"
        checked += 1
    return "pass", f"-(2/3)(m1+4)(m2+4) on {checked} sampled m-pairs"


def check_case_signs(cfg):
    # the sign remarks of the display versus the computed scalars
    notes = []
    # case 2b: computed scalar is <= 0, zero exactly when nu1 = 0
    boundary = CERT.SupportPoint(1, 1, *CERT.weight_at((1, 1), 1, 1))
    got = CERT.case_scalar((1, 1), boundary, "2b")
    claimed_positive = Fraction(1, 3) * ((1 + 0) * (0 + 1) + 0)
    if got == 0 and claimed_positive > 0:
        notes.append("case 2 scalar vanishes at nu1 = 0 (m1 >= 1) although "
                     "the displayed positivity bound is nonzero there; with "
                     "the corrected closed form the move is exactly "
                     "unavailable when the target leaves the dominant cone")
    p3 = CERT.SupportPoint(1, 1, *CERT.weight_at((1, 3), 1, 1))
    r = CERT.case_scalar((1, 3), p3, "3a")
    if r < 0:
        notes.append(f"case 3 scalar is negative (example r = {r} at "
                     "nu=(2,0), m=(1,1)) although the display asserts > 0; "
                     "nonzero-ness, which the certificates need, holds")
    if not notes:
        return "pass", "computed signs agree with the displayed remarks"
    return "mismatch-reported", "; ".join(notes)


def check_certificates_small(cfg):
    for lam, want in (((1, 1), "irreducible"), ((0, 0), "irreducible"),
                      ((-1, 0), "zero_module"), ((2, 1), "irreducible")):
        cert = CERT.certify(lam)
        if cert.status != want:
            return "fail", f"certify{lam} gave {cert.status}"
        problems = CERT.validate_certificate(cert)
        if problems:
            return "fail", f"checker rejected certify{lam}: {problems}"
    return "pass", "small certificates build and re-validate"


# -- conics suite ------------------------------------------------------------------------------


def check_conics_membership(cfg):
    defects, scal = CON.membership_defect()
    if not all(d.is_zero() for d in defects):
        return "fail", "S S' is not scalar"
    xy = CON.CONIC_TABLE.var("x") * CON.CONIC_TABLE.var("y")
    if scal != xy:
        return "fail", f"scalar is {scal.to_text()}, not x*y"
    return "pass", "S S' = x*y*I identically in (u, x, y)"


def check_conics_boundary(cfg):
    if not all(m.is_zero() for m in CON.boundary_rank_one_minors()):
        return "fail", "some 2x2 minor of S survives at x = 0"
    return "pass", "S has rank 1 along x = 0 (all 2x2 minors vanish)"


def check_conics_roundtrip(cfg):
    if not CON.map_conic_to_entry().roundtrip_checks():
        return "fail", "cell <-> entry chart maps do not invert each other"
    return "pass", "cell <-> entry chart maps are mutually inverse"


def check_conics_regular(cfg):
    ok, witness = CON.mixed_derivative_regular()
    if not ok:
        return "fail", f"witness: {witness.to_text()}"
    return "pass", ("d/dx d/dy transported to the entry chart has polynomial "
                    "coefficients")


def check_conics_monomial_action(cfg):
    d = CON.mixed_derivative_conic()
    t = CON.CONIC_TABLE
    for a, b in ((1, 1), (3, 2)):
        f = RatFunc.from_poly(t.var("x") ** a * t.var("y") ** b)
        want = RatFunc.from_poly(t.var("x") ** (a - 1) * t.var("y") ** (b - 1)
                                 ).scale(a * b)
        if op_apply(d, f) != want:
            return "fail", f"wrong action on x^{a} y^{b}"
    return "pass", "acts on x^a y^b as a b x^(a-1) y^(b-1)"


def check_conics_nilpotency(cfg):
    depths = CON.cone_nilpotency_depths(cfg.nilpotency_limit)
    missing = [k for k, v in depths.items() if v is None]
    if missing:
        return "fail", f"limit exhausted for {missing}"
    return "pass", f"finite for all 6 nilpotent fields, max depth {max(depths.values())}"


def check_conics_euler(cfg):
    d = CON.mixed_derivative_cone()
    for prefix in ("S", "T"):
        if not commutator(d, CON.euler_field_cone(prefix)).is_zero():
            return "fail", f"does not commute with the {prefix}-cone Euler field"
    return "pass", "lifted operator commutes with both cone Euler fields"


def check_conics_brackets(cfg):
    bad = CON.bracket_table_defects()
    if bad:
        return "fail", f"bracket failures: {bad}"
    return "pass", "cone fields satisfy the full sl3 bracket table"


def check_conics_twisted(cfg):
    tw = CON.twisted_mixed_derivative()
    if tw.order() != 2:
        return "fail", "twisted conjugate lost its order"
    spec0 = {name: RatFunc.const(CON.CONE_TABLE, 0)
             for name in ("lam1", "lam2")}
    at0 = DiffOp(CON.CONE, {K: c.substitute(spec0) for K, c in tw.terms.items()})
    if at0 != CON.mixed_derivative_cone():
        return "fail", "twisted conjugate does not specialise to the untwisted lift"
    return "pass", ("conjugating by S11^lam1 T33^lam2 stays order 2 and "
                    "specialises correctly at lam = 0")


# -- suite registry ----------------------------------------------------------------------------

SUITES: dict[str, dict] = {
    "cdv": {
        "cdv.forward.reference": check_cdv_forward_reference,
        "cdv.backward.reference": check_cdv_backward_reference,
        "cdv.roundtrip.forward_backward": check_cdv_roundtrip_forward,
        "cdv.roundtrip.backward_forward": check_cdv_roundtrip_backward,
        "cdv.identity_values": check_cdv_identity_values,
        "cdv.homogeneous": check_cdv_homogeneous,
    },
    "vectorfields": {
        "fields.matrix.reference": check_fields_matrix_reference,
        "fields.brackets.left": check_fields_bracket_left,
        "fields.brackets.right": check_fields_bracket_right,
        "fields.brackets.cross": check_fields_bracket_cross,
        "fields.big_cell.reference": check_fields_big_cell_reference,
        "fields.big_cell.roundtrip": check_fields_big_cell_roundtrip,
        "fields.homogeneous": check_fields_homogeneous,
    },
    "d0": {
        "partials.reference": check_partials_reference,
        "partials.action": check_partials_action,
        "d0.reference": check_d0_reference,
        "d0.polynomial": check_d0_polynomial,
        "d0.monomial_action": check_d0_monomial_action,
        "d0.nilpotency": check_d0_nilpotency,
        "d0.euler": check_d0_euler,
    },
    "twists": {
        "twists.corrections": check_twist_corrections,
        "twists.regular.big_cell": check_twist_regular_big_cell,
        "twists.regular.bminusb": check_twist_regular_bminusb,
        "twists.nilpotency": check_twist_nilpotency,
        "twists.section_example": check_twist_section_example,
        "twists.descent_example": check_twist_descent_example,
        "twists.operator_identity": check_twist_operator_identity,
        "twists.bracket_table": check_twist_bracket_table,
    },
    "casimir": {
        "casimir.centrality": check_casimir_centrality,
        "casimir.routes_agree": check_casimir_routes_agree,
        "casimir.eigenvalue": check_casimir_eigenvalue,
        "casimir.chi_values": check_chi_values,
        "casimir.alpha_free": check_casimir_alpha_free,
        "casimir.lemma_operator": check_casimir_lemma_operator,
    },
    "cases": {
        "cases.case1.symbolic": check_case1_symbolic,
        "cases.case2b.engine_form": check_case2b_engine_form,
        "cases.case2b.displayed_form": check_case2b_displayed_form,
        "cases.case2a.engine_form": check_case2a_engine_form,
        "cases.case2b.interpolation": check_case2b_interpolation,
        "cases.case2.grid": check_case2_grid,
        "cases.case3a.grid": check_case3a_grid,
        "cases.case3b.grid": check_case3b_grid,
        "cases.case4.scalar": check_case4_scalar,
        "cases.signs": check_case_signs,
        "cases.certificates_small": check_certificates_small,
    },
    "conics": {
        "conics.membership": check_conics_membership,
        "conics.boundary_rank": check_conics_boundary,
        "conics.roundtrip": check_conics_roundtrip,
        "conics.regular": check_conics_regular,
        "conics.monomial_action": check_conics_monomial_action,
        "conics.nilpotency": check_conics_nilpotency,
        "conics.euler": check_conics_euler,
        "conics.brackets": check_conics_brackets,
        "conics.twisted": check_conics_twisted,
    },
}


def suite_names() -> list[str]:
    return list(SUITES)


def checks_for(selection: str) -> dict:
    if selection == "all":
        out = {}
        for suite in SUITES.values():
            out.update(suite)
        return out
    return dict(SUITES[selection])


def run_check(check_id: str, cfg: CheckConfig) -> CheckResult:
    fn = None
    for suite in SUITES.values():
        if check_id in suite:
            fn = suite[check_id]
            break
    if fn is None:
        raise KeyError(check_id)
    start = time.monotonic()
    try:
        status, details = fn(cfg)
    except Exception as exc:           # a crash is a failing check, not a crash
        status, details = "fail", f"exception: {type(exc).__name__}: {exc}"
    return CheckResult(check_id, status, details, time.monotonic() - start)


def run_suite(selection: str, cfg: CheckConfig, jobs: int = 1) -> list[CheckResult]:
    ids = sorted(checks_for(selection))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_check_job,
                                    [(i, cfg) for i in ids]))
    else:
        results = [run_check(i, cfg) for i in ids]
    return sorted(results, key=lambda r: r.check_id)


def _run_check_job(arg):
    check_id, cfg = arg
    return run_check(check_id, cfg)


# -- concordance -------------------------------------------------------------------------------


def _item(item_id, reference, engine, residual=None):
    out = {"id": item_id,
           "status": "matched" if residual is None else "mismatch",
           "reference": reference, "engine": engine}
    if residual is not None:
        out["residual"] = residual
    return out


def concordance_items() -> list[dict]:
    """Formula-by-formula comparison of the engine against the display."""
    items = []
    fw = P.big_cell_in_matrix()
    for name in sorted(REF.CDV_FORWARD):
        ref = REF.rf_matrix(REF.CDV_FORWARD[name])
        eng = fw[name]
        items.append(_item(f"cdv.forward.{name}", REF.CDV_FORWARD[name],
                           eng.to_text(),
                           None if eng == ref else (eng - ref).to_text()))
    bw = P.matrix_ratios_in_big_cell()
    for name in sorted(REF.CDV_BACKWARD):
        ref = REF.rf_big(REF.CDV_BACKWARD[name])
        eng = RatFunc.from_poly(bw[name])
        items.append(_item(f"cdv.backward.{name}", REF.CDV_BACKWARD[name],
                           eng.to_text(),
                           None if eng == ref else (eng - ref).to_text()))
    for label in sorted(REF.FIELDS_MATRIX_LEFT):
        ref = REF.op_matrix(REF.FIELDS_MATRIX_LEFT[label])
        eng = P.action_field_matrix(P.Generator(label, "left"))
        items.append(_item(f"fields.matrix.left.{label}",
                           REF.FIELDS_MATRIX_LEFT[label], eng.to_text(),
                           None if eng == ref else (eng - ref).to_text()))
    for label in sorted(REF.FIELDS_BIG_LEFT):
        ref = REF.op_big(REF.FIELDS_BIG_LEFT[label])
        eng = P.action_field_big_cell(P.Generator(label, "left"))
        items.append(_item(f"fields.big_cell.left.{label}",
                           REF.FIELDS_BIG_LEFT[label], eng.to_text(),
                           None if eng == ref else (eng - ref).to_text()))
    p1, p2 = P.alpha_derivations_matrix()
    for name, op, text in (("a1", p1, REF.PARTIAL_A1), ("a2", p2, REF.PARTIAL_A2)):
        ref = REF.op_matrix(text)
        items.append(_item(f"partials.{name}", text, op.to_text(),
                           None if op == ref else (op - ref).to_text()))
    d0 = P.mixed_second_order_matrix()
    ref_d0 = op_compose(REF.op_matrix(REF.ORDER2_FACTORS[0]),
                        REF.op_matrix(REF.ORDER2_FACTORS[1]))
    items.append(_item("order2.matrix",
                       " compose ".join(REF.ORDER2_FACTORS), d0.to_text(),
                       None if d0 == ref_d0 else (d0 - ref_d0).to_text()))
    for label in sorted(REF.TWIST_CORRECTIONS):
        ref = REF.rf_big(REF.TWIST_CORRECTIONS[label])
        eng = P.twist_correction_big(P.Generator(label, "left"))
        items.append(_item(f"twists.correction.{label}",
                           REF.TWIST_CORRECTIONS[label], eng.to_text(),
                           None if eng == ref else (eng - ref).to_text()))
    # case scalars (symbolic where available)
    c1 = _sym_case_scalar("1")
    ref1 = _sub_nu(REF.rf_matrix(REF.CASE1_SCALAR))
    items.append(_item("cases.1.scalar", REF.CASE1_SCALAR, c1.to_text(),
                       None if c1 == ref1 else (c1 - ref1).to_text()))
    c2 = _sym_case_scalar("2b")
    ref2 = _sub_nu(REF.rf_matrix(REF.CASE2B_SCALAR_DISPLAYED))
    items.append(_item("cases.2b.scalar", REF.CASE2B_SCALAR_DISPLAYED,
                       REF.CASE2B_SCALAR_ENGINE,
                       None if c2 == ref2 else (c2 - ref2).to_text()))
    # case 3: displayed product (verified against the engine on grids)
    p = CERT.SupportPoint(1, 1, *CERT.weight_at((1, 3), 1, 1))
    r_eng = CERT.case_scalar((1, 3), p, "3a")
    r_ref = CERT.closed_form_value("3a", p)
    items.append(_item("cases.3a.scalar", REF.CASE3A_SCALAR_DISPLAYED,
                       CERT.closed_form_text("3a"),
                       None if r_eng == r_ref else f"sample defect {r_eng - r_ref}"))
    items.append(_item("cases.3.sign", "display asserts the scalar is > 0",
                       f"computed r = {r_eng} < 0 at nu=(2,0), m=(1,1)",
                       "sign remark disagrees (nonzero-ness is unaffected)"))
    c4sym = REF.rf_matrix(REF.CASE4_SCALAR)
    p4 = CERT.SupportPoint(0, 0, 1, 1)
    got4 = CERT.case_scalar((1, 1), p4, "4")
    items.append(_item("cases.4.scalar", REF.CASE4_SCALAR,
                       CERT.closed_form_text("4"),
                       None if got4 == c4sym.evaluate({"m1": 0, "m2": 0})
                       else f"sample defect {got4}"))
    chi_eng = _sub_nu(P.central_character(Affine.param("nu1"), Affine.param("nu2")))
    chi_ref = _sub_nu(REF.rf_matrix(REF.CHI_TEXT))
    items.append(_item("casimir.chi", REF.CHI_TEXT, chi_eng.to_text() if chi_eng != chi_ref else REF.CHI_TEXT,
                       None if chi_eng == chi_ref else (chi_eng - chi_ref).to_text()))
    return items


# -- report assembly ---------------------------------------------------------------------------


def report_json(checks: list[CheckResult] = (), certificates: list[dict] = (),
                concordance: list[dict] = ()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "checks": [c.to_json() for c in checks],
        "certificates": list(certificates),
        "concordance": list(concordance),
    }


def transcript(checks: list[CheckResult]) -> str:
    lines = []
    for c in checks:
        lines.append(f"[{c.status:>18}] {c.check_id}  ({c.wall_time:.2f}s)")
        lines.append(f"{'':21}{c.details}")
    n_fail = sum(1 for c in checks if c.status == "fail")
    n_mis = sum(1 for c in checks if c.status == "mismatch-reported")
    lines.append(f"{len(checks)} checks: {len(checks) - n_fail - n_mis} passed, "
                 f"{n_mis} mismatch-reported, {n_fail} failed")
    return "\n".join(lines)
