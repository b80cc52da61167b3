"""Certifier tests: supports, case scalars, certificates and the checker."""

from fractions import Fraction

import pytest

from pgl3dops import certify as C


def test_dominant_support_examples():
    assert [(p.m1, p.m2) for p in C.dominant_support((0, 0))] == [(0, 0)]
    assert C.dominant_support((-1, 0)) == []
    pts = {(p.m1, p.m2): (p.nu1, p.nu2) for p in C.dominant_support((1, 1))}
    assert pts == {(0, 0): (1, 1), (1, 1): (0, 0)}


def test_dominant_support_brute_force_oracle():
    # enumeration with an independent, generous bound
    for lam in ((2, 3), (4, 0), (0, 4), (3, 3)):
        got = {(p.m1, p.m2) for p in C.dominant_support(lam)}
        brute = set()
        for m1 in range(25):
            for m2 in range(25):
                if lam[1] - 2 * m1 + m2 >= 0 and lam[0] + m1 - 2 * m2 >= 0:
                    brute.add((m1, m2))
        assert got == brute


def test_module_dimension_examples():
    assert C.module_dimension((0, 0)) == 1
    assert C.module_dimension((1, 1)) == 65
    assert C.module_dimension((-1, 0)) == 0


def test_case1_scalars():
    p = C.SupportPoint(1, 1, *C.weight_at((1, 1), 1, 1))
    assert C.case_scalar((1, 1), p, "1") == 1
    p = C.SupportPoint(3, 2, *C.weight_at((4, 4), 3, 2))
    assert C.case_scalar((4, 4), p, "1") == 6


def test_case2_zero_at_boundary():
    # nu1 = 0, m1 = 0, m2 = 1: the move's scalar vanishes
    lam = (2, 1)
    nu = C.weight_at(lam, 0, 1)
    assert nu[0] == 2  # pick instead lam2 - 2m1 + m2 = 0
    lam = (2, -1)
    p = C.SupportPoint(0, 1, *C.weight_at(lam, 0, 1))
    assert p.nu1 == 0
    assert C.case_scalar(lam, p, "2b", check_preconditions=False) == 0


def test_case3_example_value():
    # nu = (2, 0), m = (1, 1): r = -(2/3^5) * 3*4*3*5*7*2*1
    lam = (1, 3)
    p = C.SupportPoint(1, 1, *C.weight_at(lam, 1, 1))
    assert (p.nu1, p.nu2) == (2, 0)
    want = Fraction(-2, 3 ** 5) * 3 * 4 * 3 * 5 * 7 * 2 * 1
    assert C.case_scalar(lam, p, "3a") == want == Fraction(-560, 27)


def test_case3_zero_when_motion_unavailable():
    # nu1 = 1 makes the (nu1 - 1) factor vanish
    lam = (2, 1)
    p = C.SupportPoint(0, 0, *C.weight_at(lam, 0, 0))
    assert p.nu1 == 1
    assert C.case_scalar(lam, p, "3a", check_preconditions=False) == 0


def test_case4_values():
    p = C.SupportPoint(0, 0, 1, 1)
    assert C.case_scalar((1, 1), p, "4") == Fraction(-32, 3)
    with pytest.raises(C.CaseUnavailable):
        C.case_scalar((2, 2), C.SupportPoint(0, 0, 2, 2), "4")


def test_closed_forms_match_engine_on_samples():
    for lam in ((2, 2), (3, 1)):
        for p in C.dominant_support(lam):
            for case in ("1", "2a", "2b", "3a", "3b"):
                got = C.case_scalar(lam, p, case, check_preconditions=False)
                assert got == C.closed_form_value(case, p), (lam, p, case)


def test_certify_small_examples():
    cert = C.certify((1, 1))
    assert cert.status == "irreducible"
    assert {(e.source, e.target, e.case) for e in cert.edges} == \
        {((1, 1), (0, 0), "1"), ((0, 0), (1, 1), "4")}
    assert C.validate_certificate(cert) == []

    cert = C.certify((0, 0))
    assert cert.status == "irreducible" and cert.edges == []
    assert C.validate_certificate(cert) == []

    cert = C.certify((-1, 0))
    assert cert.status == "zero_module"
    assert C.validate_certificate(cert) == []


def test_certify_grid_row():
    for lam in ((2, 0), (0, 3), (2, 2)):
        cert = C.certify(lam)
        assert cert.status in ("irreducible", "zero_module")
        assert C.validate_certificate(cert) == []


def test_checker_rejects_corruption():
    cert = C.certify((2, 1))
    assert cert.status == "irreducible"
    # corrupt one edge's target
    bad = C.Certificate(cert.lam, cert.support,
                        [C.CaseEdge(e.source, (9, 9), e.case, e.scalar,
                                    e.closed_form) if i == 0 else e
                         for i, e in enumerate(cert.edges)],
                        cert.basepoint, cert.paths, cert.status)
    assert C.validate_certificate(bad)
    # remove a support point
    bad2 = C.Certificate(cert.lam, cert.support[1:], cert.edges,
                         cert.basepoint, cert.paths, cert.status)
    assert C.validate_certificate(bad2)
    # zero scalar cannot even be constructed
    with pytest.raises(ValueError):
        C.CaseEdge((1, 0), (0, 0), "2a", Fraction(0), "x")


def test_certificate_json_shape():
    data = C.certify((1, 1)).to_json()
    assert set(data) == {"lambda", "status", "module_dimension", "support",
                         "basepoint", "edges", "paths", "unreachable"}
    assert data["lambda"] == [1, 1]
    assert data["module_dimension"] == 65
    for e in data["edges"]:
        assert e["scalar_num"] != 0
        assert set(e) == {"from", "to", "case", "scalar_num", "scalar_den",
                          "closed_form"}


def test_case2b_strictly_negative_on_interior():
    # with the corrected closed form the scalar is strictly negative exactly
    # when the move stays inside the dominant cone (nu1 >= 1, m2 >= 1)
    for lam in ((2, 2), (3, 1), (1, 3)):
        for p in C.dominant_support(lam):
            if p.m2 < 1:
                continue
            s = C.case_scalar(lam, p, "2b")
            if p.nu1 >= 1:
                assert s < 0, (lam, p)
            else:
                assert s == 0, (lam, p)
