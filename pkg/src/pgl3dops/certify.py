"""Generation certificates for the spaces of global twisted sections.

For a concrete integer weight (lam1, lam2) the space of global sections
decomposes along its *dominant support*: the pairs (m1, m2) of nonnegative
integers for which

    nu1 = lam2 - 2 m1 + m2 >= 0   and   nu2 = lam1 + m1 - 2 m2 >= 0.

A certificate is a directed graph over the support whose edges carry exact
nonzero scalars: an edge p -> q asserts that the section at q is obtained
from the section at p by an explicit global operator (one of four kinds of
moves, each built from the twisted order-2 operator, Weyl twists and Casimir
shifts).  Every scalar is computed by actually applying the operators to the
sections; closed forms are recorded alongside for comparison.

Move catalogue (case labels):

    "1"  : (m1, m2) -> (m1-1, m2-1)   descent operator alone
    "2a" : (m1, m2) -> (m1-1, m2)     s2-twist, one Casimir factor
    "2b" : (m1, m2) -> (m1, m2-1)     s1-twist, one Casimir factor
    "3a" : (m1, m2) -> (m1+1, m2)     s1s2-twist, five Casimir factors
    "3b" : (m1, m2) -> (m1, m2+1)     s2s1-twist, five Casimir factors
    "4"  : (m1, m2) -> (m1+1, m2+1)   w0-twist, three Casimir factors
                                      (only from nu = (1,1) to nu = 0)

A certificate is *connected* when every support point reaches the basepoint
and is reached from it through recorded edges; the path construction replays
the inductive descent on |m1' - m1| + |m2' - m2|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .weyl import Affine, PowerSection, express_as_multiple, op_apply_section
from . import pgl3 as P

CASE_MOVES = {
    "1": (-1, -1),
    "2a": (-1, 0),
    "2b": (0, -1),
    "3a": (1, 0),
    "3b": (0, 1),
    "4": (1, 1),
}


@dataclass(frozen=True)
class SupportPoint:
    m1: int
    m2: int
    nu1: int
    nu2: int

    @property
    def m(self) -> tuple[int, int]:
        return (self.m1, self.m2)


@dataclass(frozen=True)
class CaseEdge:
    source: tuple[int, int]
    target: tuple[int, int]
    case: str
    scalar: Fraction
    closed_form: str

    def __post_init__(self):
        if self.scalar == 0:
            raise ValueError("a certificate edge must carry a nonzero scalar")


@dataclass
class Certificate:
    lam: tuple[int, int]
    support: list[SupportPoint]
    edges: list[CaseEdge]
    basepoint: tuple[int, int] | None
    paths: dict[tuple[int, int], dict[str, list[int]]]
    status: str               # "irreducible" | "zero_module" | "unreachable"
    unreachable: list[tuple[int, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lambda": list(self.lam),
            "status": self.status,
            "module_dimension": module_dimension(self.lam),
            "support": [{"m1": p.m1, "m2": p.m2, "nu1": p.nu1, "nu2": p.nu2}
                        for p in self.support],
            "basepoint": list(self.basepoint) if self.basepoint else None,
            "edges": [{"from": list(e.source), "to": list(e.target),
                       "case": e.case,
                       "scalar_num": e.scalar.numerator,
                       "scalar_den": e.scalar.denominator,
                       "closed_form": e.closed_form}
                      for e in self.edges],
            "paths": [{"point": list(pt),
                       "to_basepoint": self.paths[pt]["to_basepoint"],
                       "from_basepoint": self.paths[pt]["from_basepoint"]}
                      for pt in sorted(self.paths)],
            "unreachable": [list(p) for p in sorted(self.unreachable)],
        }


def weight_at(lam: tuple[int, int], m1: int, m2: int) -> tuple[int, int]:
    return (lam[1] - 2 * m1 + m2, lam[0] + m1 - 2 * m2)


def dominant_support(lam: tuple[int, int]) -> list[SupportPoint]:
    """All (m1, m2) >= 0 with dominant weight; empty iff the space is zero."""
    l1, l2 = lam
    out = []
    bound = max(l1 + l2, 0)
    for m1 in range(bound + 1):
        for m2 in range(bound + 1):
            nu1, nu2 = weight_at(lam, m1, m2)
            if nu1 >= 0 and nu2 >= 0:
                out.append(SupportPoint(m1, m2, nu1, nu2))
    out.sort(key=lambda p: (p.m1 + p.m2, p.m1))
    return out


def module_dimension(lam: tuple[int, int]) -> int:
    """Sum over the support of (dim of the simple module of weight nu)^2."""
    total = 0
    for p in dominant_support(lam):
        d = (p.nu1 + 1) * (p.nu2 + 1) * (p.nu1 + p.nu2 + 2) // 2
        total += d * d
    return total


# -- engine computation of the case scalars ----------------------------------------


@lru_cache(maxsize=None)
def _canonical_section_at(lam: tuple[int, int]) -> PowerSection:
    return P.canonical_section().substitute_params(
        {"lam1": lam[0], "lam2": lam[1]})


def _sigma_at(lam: tuple[int, int], m1: int, m2: int) -> PowerSection:
    return P.monomial_section(m1, m2).substitute_params(
        {"lam1": lam[0], "lam2": lam[1]})


def _descent(lam: tuple[int, int], s: PowerSection) -> PowerSection:
    f = _canonical_section_at(lam)
    return op_apply_section(P.mixed_second_order_matrix(), s / f) * f


def _twisted_descent(lam, s, w) -> PowerSection:
    return P.twist_section(_descent(lam, P.twist_section(s, w.inverse())), w)


def _casimir_shift(s: PowerSection, mu: tuple[int, int]) -> PowerSection:
    chi = P.central_character(Affine(mu[0]), Affine(mu[1]))
    return P.casimir_apply(s) + s.scale(-chi)


class CaseUnavailable(ValueError):
    """The requested move's precondition fails at this support point."""


def case_scalar(lam: tuple[int, int], p: SupportPoint, case: str,
                check_preconditions: bool = True) -> Fraction:
    """Exact scalar of the case move, by applying the actual operators.

    With ``check_preconditions=False`` the move is evaluated as a pure
    algebraic identity even where the certificate-level preconditions
    (m >= 1 for lowering moves) fail; the scalar then comes out zero.
    """
    m1, m2 = p.m1, p.m2
    nu1, nu2 = p.nu1, p.nu2
    dm1, dm2 = CASE_MOVES[case]
    t1, t2 = m1 + dm1, m2 + dm2
    if check_preconditions and (t1 < 0 or t2 < 0):
        raise CaseUnavailable(f"case {case} needs m >= 1 at {p.m}")
    sig = _sigma_at(lam, m1, m2)
    target = _sigma_at(lam, t1, t2)
    if case == "1":
        out = _descent(lam, sig)
    elif case == "2b":
        out = _twisted_descent(lam, sig, P.W_S1)
        out = _casimir_shift(out, (nu1 + 1, nu2 + 1))
    elif case == "2a":
        out = _twisted_descent(lam, sig, P.W_S2)
        out = _casimir_shift(out, (nu1 + 1, nu2 + 1))
    elif case == "3a":
        out = _twisted_descent(lam, sig, P.W_S1S2)
        for mu in ((nu1 + 1, nu2 + 1), (nu1 + 2, nu2 - 1), (nu1 - 3, nu2 + 3),
                   (nu1 - 1, nu2 + 2), (nu1, nu2)):
            out = _casimir_shift(out, mu)
    elif case == "3b":
        out = _twisted_descent(lam, sig, P.W_S2S1)
        for mu in ((nu1 + 1, nu2 + 1), (nu1 - 1, nu2 + 2), (nu1 + 3, nu2 - 3),
                   (nu1 + 2, nu2 - 1), (nu1, nu2)):
            out = _casimir_shift(out, mu)
    elif case == "4":
        if (nu1, nu2) != (1, 1):
            raise CaseUnavailable("case 4 moves only the nu = (1,1) point")
        out = _twisted_descent(lam, sig, P.W_LONG)
        for mu in ((2, 2), (3, 0), (1, 1)):
            out = _casimir_shift(out, mu)
    else:
        raise ValueError(f"unknown case {case!r}")
    return express_as_multiple(out, target).constant_value()


def closed_form_value(case: str, p: SupportPoint) -> Fraction:
    """Evaluate the engine-derived closed form of a case scalar."""
    m1, m2, nu1, nu2 = p.m1, p.m2, p.nu1, p.nu2
    if case == "1":
        return Fraction(m1 * m2)
    if case == "2b":
        return Fraction(-m2 * nu1 * (m1 + nu1 + 1), 3)
    if case == "2a":
        return Fraction(-m1 * nu2 * (m2 + nu2 + 1), 3)
    if case == "3a":
        return Fraction(-2, 3 ** 5) * (nu2 + 3) * (nu1 + m1 + 1) * \
            (nu1 + nu2 + 1) * (nu1 + nu2 + m2 + 2) * (2 * nu1 + nu2 + 3) * \
            nu1 * (nu1 - 1)
    if case == "3b":
        return Fraction(-2, 3 ** 5) * (nu1 + 3) * (nu2 + m2 + 1) * \
            (nu1 + nu2 + 1) * (nu1 + nu2 + m1 + 2) * (nu1 + 2 * nu2 + 3) * \
            nu2 * (nu2 - 1)
    if case == "4":
        return Fraction(-2 * (m1 + 4) * (m2 + 4), 3)
    raise ValueError(f"unknown case {case!r}")


def closed_form_text(case: str) -> str:
    return {
        "1": "m1*m2",
        "2a": "-(1/3)*m1*nu2*(m2 + nu2 + 1)",
        "2b": "-(1/3)*m2*nu1*(m1 + nu1 + 1)",
        "3a": "-(2/243)*(nu2+3)*(nu1+m1+1)*(nu1+nu2+1)*(nu1+nu2+m2+2)*(2*nu1+nu2+3)*nu1*(nu1-1)",
        "3b": "-(2/243)*(nu1+3)*(nu2+m2+1)*(nu1+nu2+1)*(nu1+nu2+m1+2)*(nu1+2*nu2+3)*nu2*(nu2-1)",
        "4": "-(2/3)*(m1+4)*(m2+4)",
    }[case]


# -- certificate construction ---------------------------------------------------------


class _EdgeFactory:
    def __init__(self, lam: tuple[int, int], support: list[SupportPoint]):
        self.lam = lam
        self.points = {p.m: p for p in support}
        self.cache: dict[tuple[tuple[int, int], str], CaseEdge | None] = {}

    def get(self, source: tuple[int, int], case: str) -> CaseEdge | None:
        key = (source, case)
        if key in self.cache:
            return self.cache[key]
        p = self.points[source]
        dm1, dm2 = CASE_MOVES[case]
        target = (p.m1 + dm1, p.m2 + dm2)
        edge = None
        if target in self.points:
            scalar = case_scalar(self.lam, p, case)
            if scalar != 0:
                edge = CaseEdge(source, target, case, scalar,
                                closed_form_text(case))
        self.cache[key] = edge
        return edge


def _replay_path(factory: _EdgeFactory, start: tuple[int, int],
                 goal: tuple[int, int]) -> list[CaseEdge] | None:
    """Follow the inductive move selection from start until goal is reached."""
    path = []
    cur = factory.points[start]
    seen = set()
    while cur.m != goal:
        if cur.m in seen:
            return None
        seen.add(cur.m)
        m1, m2 = cur.m
        g1, g2 = goal
        if g1 < m1 and g2 < m2:
            case = "1"
        elif g1 < m1:
            case = "2a"
        elif g2 < m2:
            case = "2b"
        elif g1 > m1 and g2 == m2:
            case = "3a"
        elif g2 > m2:
            # raise m2 (or m1) through a case-3 move when a dominant lower
            # neighbour exists, otherwise the support is {0, rho} and the
            # long-element move applies
            if cur.nu2 >= 2:
                case = "3b"
            elif g1 > m1 and cur.nu1 >= 2:
                case = "3a"
            elif (cur.nu1, cur.nu2) == (1, 1):
                case = "4"
            else:
                return None
        else:
            return None
        edge = factory.get(cur.m, case)
        if edge is None:
            return None
        path.append(edge)
        cur = factory.points[edge.target]
    return path


def certify(lam: tuple[int, int]) -> Certificate:
    """Build the generation certificate for a concrete weight pair."""
    support = dominant_support(lam)
    if not support:
        return Certificate(lam, [], [], None, {}, "zero_module")
    basepoint = support[0].m
    factory = _EdgeFactory(lam, support)
    paths: dict[tuple[int, int], dict[str, list[CaseEdge]]] = {}
    unreachable = []
    for p in support:
        to_base = _replay_path(factory, p.m, basepoint)
        from_base = _replay_path(factory, basepoint, p.m)
        if to_base is None or from_base is None:
            unreachable.append(p.m)
        paths[p.m] = {"to_basepoint": to_base or [],
                      "from_basepoint": from_base or []}
    edges = sorted({(e.source, e.case): e
                    for trip in paths.values()
                    for leg in trip.values() for e in leg}.values(),
                   key=lambda e: (e.source, e.case))
    index = {(e.source, e.case): i for i, e in enumerate(edges)}
    indexed = {pt: {leg: [index[(e.source, e.case)] for e in trip[leg]]
                    for leg in trip}
               for pt, trip in paths.items()}
    status = "unreachable" if unreachable else "irreducible"
    return Certificate(lam, support, edges, basepoint, indexed, status,
                       unreachable)


# -- the independent certificate checker ---------------------------------------------------


def validate_certificate(cert: Certificate) -> list[str]:
    """Re-verify a certificate with plain loops; returns a list of problems."""
    problems = []
    l1, l2 = cert.lam
    # independent support enumeration
    expected = set()
    for m1 in range(max(l1 + l2, 0) + 1):
        for m2 in range(max(l1 + l2, 0) + 1):
            nu1 = l2 - 2 * m1 + m2
            nu2 = l1 + m1 - 2 * m2
            if nu1 >= 0 and nu2 >= 0:
                expected.add((m1, m2))
    got = {p.m for p in cert.support}
    if expected != got:
        problems.append(f"support mismatch: {sorted(expected ^ got)}")
    if not expected:
        if cert.status != "zero_module":
            problems.append("empty support must be a zero-module certificate")
        return problems
    if cert.status == "zero_module":
        problems.append("nonempty support marked as zero module")
        return problems
    for p in cert.support:
        if p.nu1 < 0 or p.nu2 < 0:
            problems.append(f"non-dominant support point {p}")
        if (p.nu1, p.nu2) != weight_at(cert.lam, p.m1, p.m2):
            problems.append(f"wrong weight at {p.m}")
    for e in cert.edges:
        if e.scalar == 0:
            problems.append(f"zero scalar on {e}")
        if e.source not in got or e.target not in got:
            problems.append(f"edge endpoint outside support: {e}")
        move = CASE_MOVES[e.case]
        if (e.source[0] + move[0], e.source[1] + move[1]) != e.target:
            problems.append(f"edge target inconsistent with case: {e}")
    if cert.status == "irreducible":
        for pt, trip in cert.paths.items():
            for leg, goal_at_end in (("to_basepoint", cert.basepoint),
                                     ("from_basepoint", pt)):
                start = pt if leg == "to_basepoint" else cert.basepoint
                cur = start
                for idx in trip[leg]:
                    e = cert.edges[idx]
                    if e.source != cur:
                        problems.append(f"broken path at {pt} ({leg})")
                        break
                    cur = e.target
                else:
                    if cur != goal_at_end:
                        problems.append(f"path of {pt} ({leg}) ends at {cur}")
    elif cert.unreachable:
        pass  # surfaced, nothing further to check
    return problems
