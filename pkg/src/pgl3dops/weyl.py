"""Differential operators with rational-function coefficients on named charts.

An operator is kept in normal form: every coefficient stands to the left of
the derivative monomials, which are recorded as multi-indices over the
chart's coordinates.  Composition uses the generalised Leibniz rule, so the
normal form is unique and equality is decidable.

``PowerSection`` models expressions ``prefactor * b1^e1 * ... * bk^ek`` with
polynomial bases and exponents that are affine in the parameters; first-order
operators act through the symbolic power rule ``d(b^e) = e b^(e-1) db``, and
higher orders by iteration, so applying an operator never leaves this class.

``ChartMap`` carries an invertible rational change of coordinates; operators
are transported by inverting the Jacobian of the forward formulas, exactly.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .ring import (Number, Poly, RatFunc, VarTable, ZeroDenominator, _frac,
                   _Tokens, ParseError)

MultiIndex = tuple[int, ...]


class ChartMismatch(ValueError):
    """Operands live on different charts."""


class SingularJacobian(ValueError):
    """The chart map's Jacobian is not invertible."""


class ExpressFailure(ValueError):
    """A section is not a parameter-scalar multiple of the reference section."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class Chart:
    """A named affine chart: coordinates plus the denominators allowed there.

    ``units`` lists polynomials that are invertible on the chart; a
    coefficient is regular if clearing unit factors from its denominator
    leaves an exact polynomial divisor of the numerator.
    """

    __slots__ = ("name", "table", "coords", "units")

    def __init__(self, name: str, table: VarTable,
                 coords: Iterable[str] | None = None,
                 units: Iterable[Poly] = ()):
        self.name = name
        self.table = table
        self.coords = tuple(coords) if coords is not None else table.coords
        self.units = tuple(units)
        for u in self.units:
            if u.is_zero():
                raise ValueError("unit-set entries must be nonzero")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("chart coordinates must be distinct")

    def __repr__(self) -> str:
        return f"Chart({self.name!r})"

    def coord_index(self, name: str) -> int:
        return self.coords.index(name)

    def zero_index(self) -> MultiIndex:
        return (0,) * len(self.coords)


def _check_chart(a: "DiffOp", b: "DiffOp") -> None:
    if a.chart is not b.chart and a.chart.coords != b.chart.coords:
        raise ChartMismatch(f"{a.chart!r} vs {b.chart!r}")


class DiffOp:
    """Normal-ordered differential operator on a chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[MultiIndex, RatFunc]):
        self.chart = chart
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "DiffOp":
        return DiffOp(chart, {})

    @staticmethod
    def identity(chart: Chart) -> "DiffOp":
        return DiffOp.multiplication(chart, RatFunc.const(chart.table, 1))

    @staticmethod
    def multiplication(chart: Chart, f: RatFunc) -> "DiffOp":
        return DiffOp(chart, {chart.zero_index(): f})

    @staticmethod
    def partial(chart: Chart, name: str, coeff: RatFunc | None = None) -> "DiffOp":
        idx = [0] * len(chart.coords)
        idx[chart.coord_index(name)] = 1
        coeff = coeff if coeff is not None else RatFunc.const(chart.table, 1)
        return DiffOp(chart, {tuple(idx): coeff})

    # -- linear structure ------------------------------------------------------

    def __add__(self, other: "DiffOp") -> "DiffOp":
        _check_chart(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            s = terms.get(k)
            s = v if s is None else s + v
            if s.is_zero():
                terms.pop(k, None)
            else:
                terms[k] = s
        return DiffOp(self.chart, terms)

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.chart, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, f: RatFunc | Number) -> "DiffOp":
        if not isinstance(f, RatFunc):
            f = RatFunc.const(self.chart.table, f)
        if f.is_zero():
            return DiffOp.zero(self.chart)
        return DiffOp(self.chart, {k: v * f for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        """Derived quantity: maximal total derivative order (-1 if zero)."""
        if not self.terms:
            return -1
        return max(sum(k) for k in self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        if self.chart.coords != other.chart.coords:
            return False
        keys = set(self.terms) | set(other.terms)
        zero = RatFunc.const(self.chart.table, 0)
        return all(self.terms.get(k, zero) == other.terms.get(k, zero) for k in keys)

    def __hash__(self):
        raise TypeError("DiffOp is unhashable")

    # -- printing --------------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for idx in sorted(self.terms, reverse=True):
            coeff = self.terms[idx]
            dd = " ".join(
                f"d/d{name}^{k}" if k > 1 else f"d/d{name}"
                for name, k in zip(self.chart.coords, idx) if k
            )
            if not dd:
                pieces.append(f"({coeff.to_text()})")
            elif coeff.is_poly() and coeff.num.is_one():
                pieces.append(dd)
            else:
                pieces.append(f"({coeff.to_text()}) * {dd}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"DiffOp[{self.chart.name}]({self.to_text()})"


# -- multi-index helpers --------------------------------------------------------


def _sub_indices(K: MultiIndex):
    """All multi-indices J with 0 <= J <= K componentwise."""
    if not K:
        yield ()
        return
    head, rest = K[0], K[1:]
    for tail in _sub_indices(rest):
        for j in range(head + 1):
            yield (j,) + tail


def _binom(K: MultiIndex, J: MultiIndex) -> int:
    out = 1
    for k, j in zip(K, J):
        out *= comb(k, j)
    return out


def _iter_derivative(f: RatFunc, chart: Chart, M: MultiIndex) -> RatFunc:
    for name, k in zip(chart.coords, M):
        for _ in range(k):
            f = f.differentiate(name)
            if f.is_zero():
                return f
    return f


# -- core operations ---------------------------------------------------------------


def op_compose(A: DiffOp, B: DiffOp) -> DiffOp:
    """Normal-ordered product A∘B via the generalised Leibniz rule."""
    _check_chart(A, B)
    chart = A.chart
    out: dict[MultiIndex, RatFunc] = {}
    for L, b in B.terms.items():
        # derivatives of b needed across all A terms, memoised
        derivs: dict[MultiIndex, RatFunc] = {chart.zero_index(): b}

        def deriv(M: MultiIndex) -> RatFunc:
            hit = derivs.get(M)
            if hit is not None:
                return hit
            # reduce along the first positive component
            for i, m in enumerate(M):
                if m:
                    prev = deriv(M[:i] + (m - 1,) + M[i + 1:])
                    val = prev.differentiate(chart.coords[i])
                    break
            derivs[M] = val
            return val

        for K, a in A.terms.items():
            for J in _sub_indices(K):
                c = _binom(K, J)
                dM = tuple(k - j for k, j in zip(K, J))
                db = deriv(dM)
                if db.is_zero():
                    continue
                coeff = a * db
                if c != 1:
                    coeff = coeff.scale(c)
                key = tuple(j + l for j, l in zip(J, L))
                s = out.get(key)
                s = coeff if s is None else s + coeff
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
    return DiffOp(chart, out)


def op_apply(A: DiffOp, f: RatFunc) -> RatFunc:
    """Exact action of the operator on a rational function."""
    chart = A.chart
    total = RatFunc.const(chart.table, 0)
    for K, c in A.terms.items():
        df = _iter_derivative(f, chart, K)
        if df.is_zero():
            continue
        total = total + c * df
    return total


def commutator(A: DiffOp, B: DiffOp) -> DiffOp:
    return op_compose(A, B) - op_compose(B, A)


def ad_nilpotency_depth(A: DiffOp, V: DiffOp, limit: int = 12) -> int | None:
    """Smallest n <= limit with ad(V)^n(A) = 0, or None if not reached."""
    cur = A
    for n in range(1, limit + 1):
        cur = commutator(V, cur)
        if cur.is_zero():
            return n
    return None


def regular_on(A: DiffOp, chart: Chart) -> tuple[bool, DiffOp | None]:
    """Check every coefficient is polynomial after clearing unit denominators.

    Returns (True, None) or (False, witness) where the witness is the
    offending term as a one-term operator.
    """
    for K, coeff in A.terms.items():
        den = coeff.den
        for u in chart.units:
            while True:
                q = den.divide_exact(u)
                if q is None:
                    break
                den = q
        if den.is_constant():
            continue
        if coeff.num.divide_exact(den) is None:
            return False, DiffOp(chart, {K: coeff})
    return True, None


# -- chart maps and transport ---------------------------------------------------------


def invert_matrix(rows: list[list[RatFunc]]) -> list[list[RatFunc]]:
    """Exact inverse of a square matrix over the fraction field (Gauss-Jordan)."""
    n = len(rows)
    table = rows[0][0].table
    work = [list(r) for r in rows]
    iden = [[RatFunc.const(table, 1 if i == j else 0) for j in range(n)]
            for i in range(n)]
    for col in range(n):
        # pick the simplest nonzero pivot in this column
        pivot = None
        best = None
        for r in range(col, n):
            entry = work[r][col]
            if entry.is_zero():
                continue
            size = len(entry.num.terms) + len(entry.den.terms)
            if best is None or size < best:
                best, pivot = size, r
        if pivot is None:
            raise SingularJacobian("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        iden[col], iden[pivot] = iden[pivot], iden[col]
        inv = RatFunc.const(table, 1) / work[col][col]
        work[col] = [x * inv for x in work[col]]
        iden[col] = [x * inv for x in iden[col]]
        for r in range(n):
            if r == col:
                continue
            factor = work[r][col]
            if factor.is_zero():
                continue
            work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
            iden[r] = [a - factor * b for a, b in zip(iden[r], iden[col])]
    return iden


class ChartMap:
    """Invertible rational coordinate change between two charts.

    ``forward`` expresses each source coordinate in target coordinates;
    ``inverse`` expresses each target coordinate in source coordinates.
    Operators are transported by substituting coefficients through
    ``forward`` and mapping each source derivation through the inverse of
    the Jacobian matrix of the forward formulas.
    """

    def __init__(self, source: Chart, target: Chart,
                 forward: Mapping[str, RatFunc],
                 inverse: Mapping[str, RatFunc]):
        self.source = source
        self.target = target
        self.forward = dict(forward)
        self.inverse = dict(inverse)
        self._partials: list[DiffOp] | None = None
        self._powers: dict[MultiIndex, DiffOp] = {}

    def reversed(self) -> "ChartMap":
        return ChartMap(self.target, self.source, self.inverse, self.forward)

    def substitute_to_target(self, f: RatFunc) -> RatFunc:
        """Express a source-chart function in target coordinates."""
        return f.substitute(self.forward)

    def substitute_to_source(self, f: RatFunc) -> RatFunc:
        return f.substitute(self.inverse)

    def roundtrip_checks(self) -> bool:
        """forward∘inverse and inverse∘forward are the identity substitutions."""
        for name, f in self.forward.items():
            back = f.substitute(self.inverse)
            if back != RatFunc.var(self.source.table, name):
                return False
        for name, f in self.inverse.items():
            back = f.substitute(self.forward)
            if back != RatFunc.var(self.target.table, name):
                return False
        return True

    def partial_images(self) -> list[DiffOp]:
        """Transported source derivations, via the inverse Jacobian."""
        if self._partials is None:
            src, tgt = self.source, self.target
            if len(src.coords) != len(tgt.coords):
                raise SingularJacobian(
                    "transport requires equally many source and target coordinates")
            jac = [[self.forward[y].differentiate(z) for z in tgt.coords]
                   for y in src.coords]
            inv = invert_matrix(jac)
            n = len(src.coords)
            self._partials = [
                DiffOp(tgt, {
                    tuple(1 if t == j else 0 for t in range(n)): inv[j][i]
                    for j in range(n) if not inv[j][i].is_zero()
                })
                for i in range(n)
            ]
        return self._partials

    def partial_power(self, K: MultiIndex) -> DiffOp:
        hit = self._powers.get(K)
        if hit is not None:
            return hit
        if not any(K):
            op = DiffOp.identity(self.target)
        else:
            i = next(i for i, k in enumerate(K) if k)
            rest = self.partial_power(K[:i] + (K[i] - 1,) + K[i + 1:])
            op = op_compose(self.partial_images()[i], rest)
        self._powers[K] = op
        return op


def transport(A: DiffOp, M: ChartMap) -> DiffOp:
    """Push an operator along a chart map; exact on the function-field level."""
    if A.chart.coords != M.source.coords:
        raise ChartMismatch("operator is not presented on the map's source chart")
    out = DiffOp.zero(M.target)
    for K, c in A.terms.items():
        coeff = M.substitute_to_target(c)
        out = out + M.partial_power(K).scale(coeff)
    return out


# -- parameter-affine exponents -----------------------------------------------------


class Affine:
    """Affine-linear expression in parameter names with rational coefficients."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const=0, coeffs: Mapping[str, Number] | None = None):
        self.const = _frac(const)
        items = {}
        if coeffs:
            for name, c in coeffs.items():
                c = _frac(c)
                if c != 0:
                    items[name] = c
        self.coeffs = dict(sorted(items.items()))

    @staticmethod
    def param(name: str, scale=1) -> "Affine":
        return Affine(0, {name: scale})

    def __add__(self, other) -> "Affine":
        if isinstance(other, (int, Fraction)):
            return Affine(self.const + other, self.coeffs)
        out = dict(self.coeffs)
        for name, c in other.coeffs.items():
            out[name] = out.get(name, Fraction(0)) + c
        return Affine(self.const + other.const, out)

    def __radd__(self, other) -> "Affine":
        return self + other

    def __neg__(self) -> "Affine":
        return Affine(-self.const, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other) -> "Affine":
        return self + (-other if isinstance(other, Affine) else -_frac(other))

    def scale(self, k) -> "Affine":
        k = _frac(k)
        return Affine(self.const * k, {n: c * k for n, c in self.coeffs.items()})

    def is_constant(self) -> bool:
        return not self.coeffs

    def constant_value(self) -> Fraction:
        if self.coeffs:
            raise ValueError(f"exponent {self.to_text()} is not constant")
        return self.const

    def is_zero(self) -> bool:
        return self.const == 0 and not self.coeffs

    def evaluate(self, values: Mapping[str, Number]) -> Fraction:
        total = self.const
        for name, c in self.coeffs.items():
            total += c * _frac(values[name])
        return total

    def substitute(self, values: Mapping[str, Number]) -> "Affine":
        """Replace the given parameters by numbers, keeping the rest symbolic."""
        const = self.const
        out = {}
        for name, c in self.coeffs.items():
            if name in values:
                const += c * _frac(values[name])
            else:
                out[name] = c
        return Affine(const, out)

    def as_ratfunc(self, table: VarTable) -> RatFunc:
        total = table.const(self.const)
        for name, c in self.coeffs.items():
            total = total + table.var(name).scale(c)
        return RatFunc.from_poly(total)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.const == other
        return self.const == other.const and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.const, tuple(self.coeffs.items())))

    def to_text(self) -> str:
        parts = []
        for name, c in self.coeffs.items():
            if c == 1:
                parts.append(name)
            elif c == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{c}*{name}")
        if self.const != 0 or not parts:
            parts.append(str(self.const))
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Affine({self.to_text()})"


# -- power sections --------------------------------------------------------------------


def _base_key(p: Poly):
    return tuple(sorted((exp, _frac(c)) for exp, c in p.terms.items()))


def _primitive(base: Poly) -> tuple[Poly, Fraction]:
    """Scale a polynomial to integer-primitive form with positive leading term."""
    c = base.content()
    _, lead = base.leading()
    if lead < 0:
        c = -c
    if c == 1:
        return base, Fraction(1)
    return base.scale(Fraction(1, 1) / c), c


class PowerSection:
    """num * product of polynomial bases raised to parameter-affine exponents.

    The numerator is always a polynomial: every denominator is absorbed into
    the power product as an integer shift of an exponent (with new bases
    created on demand).  Two sections are compatible for addition whenever
    they have the same bases up to concrete integer exponent differences,
    which are reconciled by multiplying base powers into the numerators.
    """

    __slots__ = ("chart", "num", "factors")

    def __init__(self, chart: Chart, prefactor, factors=()):
        table = chart.table
        merged: dict = {}

        def push(base: Poly, exp):
            if not isinstance(exp, Affine):
                exp = Affine(exp)
            if base.is_zero():
                raise ZeroDenominator("power-section base is identically zero")
            key = _base_key(base)
            if key in merged:
                b, e = merged[key]
                merged[key] = (b, e + exp)
            else:
                merged[key] = (base, exp)

        for base, exp in factors:
            push(base, exp)

        if isinstance(prefactor, RatFunc):
            num, den = prefactor.num, prefactor.den
        elif isinstance(prefactor, Poly):
            num, den = prefactor, None
        else:
            num, den = table.const(prefactor), None

        if den is not None and not den.is_constant():
            # factor the denominator through the bases, newest remainder last
            for key in list(merged):
                b = merged[key][0]
                if b.is_constant():
                    continue
                while not den.is_constant():
                    q = den.divide_exact(b)
                    if q is None:
                        break
                    den = q
                    push(b, Affine(-1))
            if not den.is_constant():
                rem, c = _primitive(den)
                push(rem, Affine(-1))
                den = den.table.const(c)
        if den is not None:
            c = den.constant_value()
            if c != 1:
                num = num.scale(Fraction(1, 1) / c)

        out = []
        for key, (base, exp) in merged.items():
            if exp.is_zero():
                continue
            if base.is_constant():
                c = base.constant_value()
                if c == 1:
                    continue
                if exp.is_constant() and exp.const.denominator == 1:
                    num = num.scale(c ** int(exp.const))
                    continue
                raise ValueError(
                    f"constant base {c} with symbolic exponent {exp.to_text()}")
            out.append((key, base, exp))
        if num.is_zero():
            out = []
        out.sort(key=lambda t: t[0])
        self.chart = chart
        self.num = num
        self.factors = tuple((b, e) for _, b, e in out)

    # -- basic views -----------------------------------------------------------

    @staticmethod
    def one(chart: Chart) -> "PowerSection":
        return PowerSection(chart, chart.table.one())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _aligned(self, other: "PowerSection", context: str = ""):
        """Common power product: returns (factors, num_self, num_other)."""
        sdict = {_base_key(b): (b, e) for b, e in self.factors}
        odict = {_base_key(b): (b, e) for b, e in other.factors}
        factors = []
        n1, n2 = self.num, other.num
        for key in sorted(set(sdict) | set(odict)):
            base = (sdict.get(key) or odict.get(key))[0]
            e1 = sdict[key][1] if key in sdict else Affine(0)
            e2 = odict[key][1] if key in odict else Affine(0)
            diff = e1 - e2
            if not diff.is_constant() or diff.const.denominator != 1:
                raise ExpressFailure(
                    f"incompatible exponents on base {base.to_text()}: "
                    f"{e1.to_text()} vs {e2.to_text()}" +
                    (f" ({context})" if context else ""),
                    witness=base)
            shift = int(diff.const)
            if shift >= 0:
                target = e2
                n1 = n1 * base ** shift
            else:
                target = e1
                n2 = n2 * base ** (-shift)
            if not target.is_zero():
                factors.append((base, target))
        return factors, n1, n2

    def __add__(self, other: "PowerSection") -> "PowerSection":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        factors, n1, n2 = self._aligned(other, "sum of sections")
        return PowerSection(self.chart, n1 + n2, factors)

    def scale(self, f) -> "PowerSection":
        if isinstance(f, RatFunc):
            return PowerSection(self.chart, RatFunc(self.num * f.num, f.den,
                                                    normalise=False),
                                self.factors)
        if isinstance(f, Poly):
            return PowerSection(self.chart, self.num * f, self.factors)
        return PowerSection(self.chart, self.num.scale(f), self.factors)

    def __mul__(self, other: "PowerSection") -> "PowerSection":
        if self.chart is not other.chart:
            raise ChartMismatch("sections on different charts")
        return PowerSection(self.chart, self.num * other.num,
                            self.factors + other.factors)

    def inverse(self) -> "PowerSection":
        if self.is_zero():
            raise ZeroDenominator("inverting the zero section")
        factors = [(b, -e) for b, e in self.factors]
        if self.num.is_constant():
            num = self.chart.table.const(Fraction(1, 1) / self.num.constant_value())
        else:
            prim, c = _primitive(self.num)
            factors.append((prim, Affine(-1)))
            num = self.chart.table.const(Fraction(1, 1) / c)
        return PowerSection(self.chart, num, factors)

    def __truediv__(self, other: "PowerSection") -> "PowerSection":
        return self * other.inverse()

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSection):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        try:
            _, n1, n2 = self._aligned(other)
        except ExpressFailure:
            return False
        return n1 == n2

    def __hash__(self):
        raise TypeError("PowerSection is unhashable")

    def same_factors(self, other: "PowerSection") -> bool:
        try:
            self._aligned(other)
            return True
        except ExpressFailure:
            return False

    def ratio_to(self, other: "PowerSection") -> RatFunc:
        """self / other as a rational function (power products must align)."""
        if other.is_zero():
            raise ZeroDenominator("ratio to the zero section")
        if self.is_zero():
            return RatFunc.const(self.chart.table, 0)
        _, n1, n2 = self._aligned(other, "ratio of sections")
        return RatFunc(n1, n2)

    # -- calculus ---------------------------------------------------------------

    def derivative(self, name: str) -> "PowerSection":
        """First-order derivative via the symbolic power rule."""
        table = self.chart.table
        live = [(i, b, e, b.differentiate(name))
                for i, (b, e) in enumerate(self.factors)]
        live = [(i, b, e, db) for i, b, e, db in live if not db.is_zero()]
        dnum = self.num.differentiate(name)
        if not live:
            return PowerSection(self.chart, dnum, self.factors)
        shifted = {i for i, *_ in live}
        total = dnum
        for i, b, e, db in live:
            total = total * b
        # total = num' * prod(live bases); add num * e_i * db_i * prod(other live)
        for i, b, e, db in live:
            term = self.num * _affine_poly(e, table) * db
            for j, bj, ej, dbj in live:
                if j != i:
                    term = term * bj
            total = total + term
        factors = [(b, e - 1 if i in shifted else e)
                   for i, (b, e) in enumerate(self.factors)]
        return PowerSection(self.chart, total, factors)

    def substitute_params(self, values: Mapping[str, Number]) -> "PowerSection":
        """Specialise parameters in the exponents and the numerator."""
        table = self.chart.table
        mapping = {name: RatFunc.const(table, v) for name, v in values.items()}
        num = self.num.substitute(mapping).as_poly() if mapping else self.num
        factors = tuple((b, e.substitute(values)) for b, e in self.factors)
        return PowerSection(self.chart, num, factors)

    def substitute_coords(self, mapping: Mapping[str, RatFunc],
                          chart: Chart) -> "PowerSection":
        """Coordinate substitution; bases must stay polynomial up to scale."""
        pre = self.num.substitute(mapping)
        factors = []
        for base, exp in self.factors:
            image = base.substitute(mapping)
            den = image.den
            if not den.is_constant():
                q = image.num.divide_exact(den)
                if q is None:
                    raise ValueError(
                        f"base {base.to_text()} is not polynomial after substitution")
                image = RatFunc.from_poly(q)
            newbase = image.num
            scalar = Fraction(1, 1) / image.den.constant_value()
            if newbase.is_zero():
                raise ZeroDenominator(
                    f"base {base.to_text()} vanishes identically after substitution")
            if scalar != 1:
                if not (exp.is_constant() and exp.const.denominator == 1):
                    raise ValueError(
                        f"base {base.to_text()} rescales by {scalar} under "
                        f"substitution but has symbolic exponent {exp.to_text()}")
                pre = pre * RatFunc.const(pre.table, scalar ** int(exp.const))
            factors.append((newbase, exp))
        return PowerSection(chart, pre, factors)

    def reduce_num(self) -> "PowerSection":
        """Move base factors of the numerator back into the exponents.

        Iterated derivatives multiply the numerator by base polynomials; this
        undoes that growth by exact trial division (no gcd machinery).
        """
        if self.is_zero() or not self.factors:
            return self
        num = self.num
        shifts = [0] * len(self.factors)
        changed = False
        for i, (base, exp) in enumerate(self.factors):
            while len(num.terms) >= len(base.terms):
                q = num.divide_exact(base, step_limit=4 * len(num.terms) + 16)
                if q is None:
                    break
                num = q
                shifts[i] += 1
                changed = True
        if not changed:
            return self
        factors = tuple((b, e + s) for (b, e), s in zip(self.factors, shifts))
        return PowerSection(self.chart, num, factors)

    def concrete_ratfunc(self) -> RatFunc:
        """Fold concrete integer exponents into an honest rational function."""
        out = RatFunc.from_poly(self.num)
        for base, exp in self.factors:
            n = exp.constant_value()
            if n.denominator != 1:
                raise ValueError(f"fractional exponent {n} cannot be folded")
            out = out * RatFunc.from_poly(base) ** int(n)
        return out

    def to_text(self) -> str:
        parts = [f"({self.num.to_text()})"]
        for base, exp in self.factors:
            parts.append(f"({base.to_text()})^({exp.to_text()})")
        return " * ".join(parts)

    def __repr__(self) -> str:
        return f"PowerSection[{self.chart.name}]({self.to_text()})"


def _affine_poly(e: Affine, table: VarTable) -> Poly:
    out = table.const(e.const)
    for name, c in e.coeffs.items():
        out = out + table.var(name).scale(c)
    return out


def op_apply_section(A: DiffOp, s: PowerSection) -> PowerSection:
    """Apply an operator to a power section; stays in power-section form."""
    if A.chart.coords != s.chart.coords:
        raise ChartMismatch("operator and section on different charts")
    derivs: dict[MultiIndex, PowerSection] = {A.chart.zero_index(): s}

    def deriv(M: MultiIndex) -> PowerSection:
        hit = derivs.get(M)
        if hit is not None:
            return hit
        for i, m in enumerate(M):
            if m:
                prev = deriv(M[:i] + (m - 1,) + M[i + 1:])
                val = prev.derivative(A.chart.coords[i])
                break
        derivs[M] = val
        return val

    total = PowerSection(s.chart, s.chart.table.zero(), s.factors)
    for K, c in A.terms.items():
        total = total + deriv(K).scale(c)
    return total.reduce_num()


def conjugate(A: DiffOp, s: PowerSection) -> DiffOp:
    """s^{-1} ∘ A ∘ s as an operator; coefficients pick up log-derivatives."""
    if A.chart.coords != s.chart.coords:
        raise ChartMismatch("operator and section on different charts")
    chart = A.chart
    if s.is_zero():
        raise ZeroDenominator("conjugation by the zero section")
    derivs: dict[MultiIndex, PowerSection] = {chart.zero_index(): s}

    def dsec(M: MultiIndex) -> PowerSection:
        hit = derivs.get(M)
        if hit is not None:
            return hit
        for i, m in enumerate(M):
            if m:
                prev = dsec(M[:i] + (m - 1,) + M[i + 1:])
                val = prev.derivative(chart.coords[i])
                break
        derivs[M] = val
        return val

    out: dict[MultiIndex, RatFunc] = {}
    for K, c in A.terms.items():
        for J in _sub_indices(K):
            M = tuple(k - j for k, j in zip(K, J))
            dM = dsec(M)
            if dM.is_zero():
                continue
            tM = dM.ratio_to(s)
            coeff = c * tM
            b = _binom(K, J)
            if b != 1:
                coeff = coeff.scale(b)
            cur = out.get(J)
            cur = coeff if cur is None else cur + coeff
            if cur.is_zero():
                out.pop(J, None)
            else:
                out[J] = cur
    return DiffOp(chart, out)


def express_as_multiple(s: PowerSection, t: PowerSection) -> RatFunc:
    """Scalar c with s = c·t where c involves only parameters.

    Bases are aligned by exact polynomial equality; exponent differences must
    be concrete integers, which are folded into the quotient.  Raises
    ``ExpressFailure`` (carrying a witness) if the quotient depends on
    coordinates.
    """
    if t.is_zero():
        raise ZeroDenominator("reference section is zero")
    if s.is_zero():
        return RatFunc.const(s.chart.table, 0)
    return _parameter_scalar(s.ratio_to(t))


def _parameter_scalar(q: RatFunc) -> RatFunc:
    """Certify that a fraction only involves parameters, and return it reduced."""
    table = q.table
    pbits = table.param_bits

    def split(p: Poly) -> dict:
        out: dict = {}
        for key, c in p.terms.items():
            out.setdefault(key >> pbits, {})[key] = c
        return out

    if not q.den.coordinates_used() and not q.num.coordinates_used():
        return q
    nmap, dmap = split(q.num), split(q.den)
    mstar = max(dmap)
    dref = Poly._raw(table, dmap[mstar])
    nref = Poly._raw(table, nmap.get(mstar, {}))
    if q.num * dref != q.den * nref:
        raise ExpressFailure(
            "quotient depends on coordinates",
            witness=q)
    # strip the shared coordinate monomial from the reference pair
    floor = mstar << pbits
    scalar = RatFunc(nref.shift_down(floor) if not nref.is_zero() else nref,
                     dref.shift_down(floor))
    if scalar.coordinates_used():
        raise ExpressFailure("quotient depends on coordinates", witness=scalar)
    return scalar


# -- operator text parsing ---------------------------------------------------------


def parse_operator(text: str, chart: Chart) -> DiffOp:
    """Parse the canonical operator grammar: sums of coeff * d/dv^k products.

    Within one product every scalar factor must precede the derivative
    factors (operators are written in normal order).
    """
    toks = _Tokens(text)
    result = DiffOp.zero(chart)
    sign = 1
    first = True
    while True:
        tok = toks.peek()
        if tok is None:
            if first:
                raise ParseError("empty operator expression")
            break
        if not first:
            if tok not in ("+", "-"):
                raise ParseError(f"expected + or - between terms, got {tok!r}")
            toks.next()
            sign = 1 if tok == "+" else -1
        else:
            if tok in ("+", "-"):
                toks.next()
                sign = 1 if tok == "+" else -1
            first = False
        term = _parse_op_product(toks, chart)
        result = result + (term if sign > 0 else -term)
    return result


def _parse_op_product(toks: _Tokens, chart: Chart) -> DiffOp:
    table = chart.table
    coeff = RatFunc.const(table, 1)
    index = [0] * len(chart.coords)
    seen_derivative = False
    while True:
        tok = toks.peek()
        if tok is None or tok in ("+", "-"):
            break
        if tok == "*":
            toks.next()
            continue
        if tok.startswith("d/d"):
            toks.next()
            name = tok[3:]
            power = 1
            if toks.peek() == "^":
                toks.next()
                p = toks.next()
                if not p.isdigit():
                    raise ParseError(f"expected integer power, got {p!r}")
                power = int(p)
            index[chart.coord_index(name)] += power
            seen_derivative = True
        else:
            if seen_derivative:
                raise ParseError(
                    "coefficients must be written to the left of derivatives")
            # a scalar factor: parse one multiplicative factor
            factor = _parse_scalar_factor(toks, table)
            coeff = coeff * factor
    return DiffOp(chart, {tuple(index): coeff})


def _parse_scalar_factor(toks: _Tokens, table: VarTable) -> RatFunc:
    from .ring import _parse_factor
    value = _parse_factor(toks, table)
    while toks.peek() == "/":
        # only allow division by a following scalar factor
        toks.next()
        nxt = toks.peek()
        if nxt is not None and nxt.startswith("d/d"):
            raise ParseError("cannot divide by a derivative")
        value = value / _parse_factor(toks, table)
    return value
