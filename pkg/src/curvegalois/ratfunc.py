"""Univariate polynomial and rational-function algebra over the field tower.

Everything is exact: polynomials are dense coefficient lists of
:class:`~curvegalois.fields.FieldElement`, rational functions are kept
reduced (gcd removed, monic denominator) after every operation.

Partial fractions are computed without general root finding.  Pole
locations are either supplied by the caller (the reduction pipeline knows
its denominators by construction) or discovered by a limited factorization
strategy: squarefree layers, linear and quadratic pieces, extraction of the
root at the origin, an even/odd gcd split, and recursion on even
polynomials.  Denominators outside that class raise
``UnsupportedDenominatorError``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .fields import FE, FieldElement, FieldTowerError, adjoin_sqrt

__all__ = [
    "Polynomial",
    "RationalFunction",
    "PoleTerm",
    "PartialFractionForm",
    "UnsupportedDenominatorError",
    "PoleOrderError",
    "partial_fractions",
    "laurent_coefficient",
    "behavior_at_infinity",
]

_ZERO = FE(0)
_ONE = FE(1)


class UnsupportedDenominatorError(ArithmeticError):
    """Denominator cannot be split into supported linear/quadratic factors."""


class PoleOrderError(ArithmeticError):
    """A pole of unsupported order was encountered."""


def _coerce_coeff(c) -> FieldElement:
    if isinstance(c, FieldElement):
        return c
    return FE(c)


class Polynomial:
    """Dense univariate polynomial, coefficients lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):  # trims trailing zeros
        cs = [_coerce_coeff(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[FieldElement, ...] = tuple(cs)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(c) -> "Polynomial":
        return Polynomial([c])

    @staticmethod
    def x() -> "Polynomial":
        return Polynomial([0, 1])

    @staticmethod
    def linear_root(z0) -> "Polynomial":
        """The monic factor z - z0."""
        return Polynomial([-FE(z0), FE(1)])

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> FieldElement:
        if self.is_zero():
            return _ZERO
        return self.coeffs[-1]

    def __getitem__(self, k: int) -> FieldElement:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return _ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if k == 0:
                parts.append(f"{c!r}")
            elif k == 1:
                parts.append(f"({c!r})*z")
            else:
                parts.append(f"({c!r})*z^{k}")
        return " + ".join(parts)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction, FieldElement)):
            c = _coerce_coeff(other)
            return Polynomial([a * c for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai.is_zero():
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        out = Polynomial([1])
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return Polynomial(), self
        rem = list(self.coeffs)
        dq = self.degree - other.degree
        quot = [_ZERO] * (dq + 1)
        dlead = other.leading.inv()
        dcs = other.coeffs
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] * dlead
            quot[k] = c
            if not c.is_zero():
                for j, dc in enumerate(dcs):
                    rem[k + j] = rem[k + j] - c * dc
        return Polynomial(quot), Polynomial(rem[: other.degree])

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[1]

    def monic(self) -> "Polynomial":
        if self.is_zero() or self.leading == _ONE:
            return self
        inv = self.leading.inv()
        return Polynomial([c * inv for c in self.coeffs])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Monic greatest common divisor (Euclid)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        if a.is_zero():
            return a
        return a.monic()

    def derivative(self) -> "Polynomial":
        return Polynomial([self.coeffs[k] * k for k in range(1, len(self.coeffs))])

    def __call__(self, z0) -> FieldElement:
        z0 = _coerce_coeff(z0)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * z0 + c
        return acc

    def compose_neg(self) -> "Polynomial":
        """p(-z)."""
        return Polynomial([c if k % 2 == 0 else -c
                           for k, c in enumerate(self.coeffs)])

    def is_even(self) -> bool:
        return all(c.is_zero() for k, c in enumerate(self.coeffs) if k % 2 == 1)

    def even_contraction(self) -> "Polynomial":
        """For an even polynomial p(z) = T(z^2), return T."""
        return Polynomial([self.coeffs[k] for k in range(0, len(self.coeffs), 2)])


class RationalFunction:
    """Reduced ratio of polynomials; denominator monic, gcd removed."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial([1])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = Polynomial(), Polynomial([1])
            return
        g = num.gcd(den)
        if g.degree > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        lead = den.leading.inv()
        self.num = num * lead
        self.den = den * lead

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(c) -> "RationalFunction":
        return RationalFunction(Polynomial.constant(c))

    @staticmethod
    def from_poly(p: Polynomial) -> "RationalFunction":
        return RationalFunction(p)

    @staticmethod
    def x() -> "RationalFunction":
        return RationalFunction(Polynomial.x())

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.is_polynomial():
            return repr(self.num)
        return f"({self.num!r}) / ({self.den!r})"

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction, FieldElement)):
            return RationalFunction.constant(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * o.den + o.num * self.den,
                                self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return (RationalFunction.constant(1) / self) ** (-n)
        out = RationalFunction.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den)

    def logderiv(self) -> "RationalFunction":
        """f'/f, reduced."""
        if self.is_zero():
            raise ZeroDivisionError("logarithmic derivative of zero")
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.num)

    def __call__(self, z0) -> FieldElement:
        d = self.den(z0)
        if d.is_zero():
            raise ZeroDivisionError(f"evaluation at a pole")
        return self.num(z0) / d


# ---------------------------------------------------------------------------
# behavior at infinity, Laurent data, partial fractions
# ---------------------------------------------------------------------------

_INF_ORDER = float("inf")


def behavior_at_infinity(r: RationalFunction):
    """(order, leading coefficient) of r at infinity.

    order = deg(den) - deg(num); r ~ lead / z^order.  The zero function
    returns (inf, 0).
    """
    if r.is_zero():
        return _INF_ORDER, _ZERO
    return r.den.degree - r.num.degree, r.num.leading / r.den.leading


def _root_multiplicity(den: Polynomial, z0: FieldElement):
    """(multiplicity m, cofactor E) with den = (z-z0)^m * E, E(z0) != 0."""
    lin = Polynomial.linear_root(z0)
    m = 0
    cur = den
    while True:
        q, rem = cur.divmod(lin)
        if rem.is_zero():
            cur = q
            m += 1
        else:
            break
    return m, cur


def laurent_coefficient(r: RationalFunction, pole, k: int) -> FieldElement:
    """Exact coefficient of (z-pole)^k in the Laurent expansion, k in {-2,-1}."""
    if k not in (-2, -1):
        raise ValueError("only orders -2 and -1 are supported")
    z0 = _coerce_coeff(pole)
    m, E = _root_multiplicity(r.den, z0)
    if m == 0:
        raise PoleOrderError(f"{z0!r} is not a pole")
    if m > 2:
        raise PoleOrderError(f"pole of order {m} at {z0!r}; orders > 2 unsupported")
    j = k + m
    if j < 0:
        return _ZERO
    N = r.num
    Ev = E(z0)
    if j == 0:
        return N(z0) / Ev
    # j == 1: (N/E)'(z0)
    Np = N.derivative()(z0)
    Ep = E.derivative()(z0)
    return (Np * Ev - N(z0) * Ep) / (Ev * Ev)


@dataclass(frozen=True)
class PoleTerm:
    """One pole of order <= 2: coeff2/(z-location)^2 + coeff1/(z-location)."""

    location: FieldElement
    coeff2: FieldElement
    coeff1: FieldElement
    order: int


@dataclass(frozen=True)
class PartialFractionForm:
    poles: tuple[PoleTerm, ...]
    poly_part: Polynomial

    def recombine(self) -> RationalFunction:
        """Reassemble the decomposition; exact round trip.

        Conjugate pole pairs (same radicand) are recombined pairwise first so
        all cross-pole arithmetic stays inside a single extension.
        """
        total = RationalFunction(self.poly_part)
        terms = list(self.poles)
        used = [False] * len(terms)
        for idx, t in enumerate(terms):
            if used[idx]:
                continue
            used[idx] = True
            part = _pole_term_function(t)
            if t.location.level == 2:
                # find the partner with opposite sign of the radical part
                for jdx in range(idx + 1, len(terms)):
                    u = terms[jdx]
                    if used[jdx] or u.location.level != 2:
                        continue
                    if u.location == -t.location and u.location.d == t.location.d:
                        used[jdx] = True
                        part = part + _pole_term_function(u)
                        break
            total = total + part
        return total


def _pole_term_function(t: PoleTerm) -> RationalFunction:
    lin = Polynomial.linear_root(t.location)
    out = RationalFunction(Polynomial.constant(t.coeff1), lin)
    if not t.coeff2.is_zero():
        out = out + RationalFunction(Polynomial.constant(t.coeff2), lin * lin)
    return out


def _squarefree_layers(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: p = prod S_k^k with S_k squarefree, pairwise coprime."""
    p = p.monic()
    out: list[tuple[Polynomial, int]] = []
    u = p.gcd(p.derivative())
    if u.degree <= 0:
        return [(p, 1)]
    b = p.divmod(u)[0]
    c = p.derivative().divmod(u)[0]
    d = c - b.derivative()
    k = 1
    while b.degree > 0:
        a = b.gcd(d)
        if a.degree > 0:
            out.append((a.monic(), k))
            b = b.divmod(a)[0]
            c = d.divmod(a)[0]
        else:
            c = d
        d = c - b.derivative()
        k += 1
    return out


def _quadratic_roots(p: Polynomial) -> list[FieldElement]:
    """Roots of a monic quadratic, via one square-root adjunction."""
    c0, c1 = p[0], p[1]
    half = FE(Fraction(1, 2))
    shift = -c1 * half
    disc = shift * shift - c0
    if disc.level == 2:
        raise UnsupportedDenominatorError(
            "quadratic factor needs a nested extension")
    s = adjoin_sqrt(disc)
    if s.is_zero():
        return [shift, shift]  # double root; caller folds multiplicities
    return [shift + s, shift - s]


def _squarefree_roots(S: Polynomial) -> list[FieldElement]:
    """Roots of a squarefree monic polynomial, limited strategy."""
    S = S.monic()
    if S.degree == 0:
        return []
    if S.degree == 1:
        return [-S[0]]
    if S.degree == 2:
        r = _quadratic_roots(S)
        if r[0] == r[1]:
            raise UnsupportedDenominatorError("squarefree part has a double root")
        return r
    roots: list[FieldElement] = []
    if S(_ZERO).is_zero():
        roots.append(_ZERO)
        S = S.divmod(Polynomial.x())[0]
        return roots + _squarefree_roots(S)
    G = S.gcd(S.compose_neg().monic())
    if 0 < G.degree < S.degree:
        L = S.divmod(G)[0]
        return _squarefree_roots(G) + _squarefree_roots(L)
    if S.is_even():
        T = S.even_contraction()
        roots = []
        for w in _squarefree_roots(T):
            if w.level == 2:
                raise UnsupportedDenominatorError(
                    "pole location needs a nested extension")
            s = adjoin_sqrt(w)
            roots.extend([s, -s])
        return roots
    raise UnsupportedDenominatorError(
        f"cannot factor denominator part of degree {S.degree}; "
        "supply the factor list")


def _roots_from_factors(den: Polynomial,
                        factors: Sequence[Polynomial]) -> list[tuple[FieldElement, int]]:
    """Pole locations and multiplicities of den against a known factor basis."""
    seen: set[tuple] = set()
    uniq: list[Polynomial] = []
    for f in factors:
        f = f.monic()
        key = f.coeffs
        if key not in seen:
            seen.add(key)
            uniq.append(f)
    rem = den
    located: list[tuple[FieldElement, int]] = []
    for f in uniq:
        mult = 0
        while True:
            q, r0 = rem.divmod(f)
            if r0.is_zero():
                rem = q
                mult += 1
            else:
                break
        if mult == 0:
            continue
        if f.degree == 1:
            located.append((-f[0], mult))
        elif f.degree == 2:
            r1, r2 = _quadratic_roots(f)
            if r1 == r2:
                located.append((r1, 2 * mult))
            else:
                located.append((r1, mult))
                located.append((r2, mult))
        else:
            raise UnsupportedDenominatorError(
                "factor basis entries must have degree 1 or 2")
    if rem.degree != 0:
        raise UnsupportedDenominatorError(
            f"factor basis does not cover the denominator; leftover {rem!r}")
    return located


def partial_fractions(r: RationalFunction,
                      factors: Sequence[Polynomial] | None = None
                      ) -> PartialFractionForm:
    """Exact decomposition into order <= 2 pole terms plus a polynomial part.

    When the caller knows the denominator's factors (the reduction pipeline
    always does) they should be passed in; otherwise a limited automatic
    factorization is attempted.
    """
    poly_part, rem = r.num.divmod(r.den)
    proper = RationalFunction(rem, r.den)
    if proper.is_zero():
        return PartialFractionForm((), poly_part)
    den = proper.den
    if factors is not None:
        located = _roots_from_factors(den, factors)
    else:
        located = []
        for S, mult in _squarefree_layers(den):
            for z0 in _squarefree_roots(S):
                located.append((z0, mult))
    # fold duplicate locations (e.g. double root reported by a hint factor)
    folded: dict[FieldElement, int] = {}
    for z0, m in located:
        folded[z0] = folded.get(z0, 0) + m
    terms = []
    for z0, m in folded.items():
        if m > 2:
            raise PoleOrderError(
                f"pole of order {m} at {z0!r}; the method supports orders <= 2")
        lin = Polynomial.linear_root(z0)
        E = den
        for _ in range(m):
            E = E.divmod(lin)[0]
        Ev = E(z0)
        N = proper.num
        if m == 1:
            terms.append(PoleTerm(z0, _ZERO, N(z0) / Ev, 1))
        else:
            c2 = N(z0) / Ev
            c1 = (N.derivative()(z0) * Ev - N(z0) * E.derivative()(z0)) / (Ev * Ev)
            terms.append(PoleTerm(z0, c2, c1, 2))
    return PartialFractionForm(tuple(terms), poly_part)
