"""Exact arithmetic in the tower Q < Q(i) < Q(i)(sqrt(d)).

Every coefficient that appears in the reduction pipeline lives in this tower:
the input parameters are rationals, the normal-form equation has rational
coefficients, and only residue extraction at quadratic pole pairs needs a
single square-root adjunction.  The tower is deliberately capped at one
quadratic extension over Q(i); any demand for a deeper extension raises
``TowerDepthError`` instead of approximating.

Reality and rationality predicates are decided exactly, never by floating
point.  The branch convention for square roots is: the returned root has
argument in (-pi/2, pi/2] under the standard embedding, i.e. positive real
part, or zero real part and positive imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "FieldTowerError",
    "IncompatibleRadicandsError",
    "TowerDepthError",
    "GaussianRational",
    "QuadExtElement",
    "FieldElement",
    "FE",
    "Rat",
    "adjoin_sqrt",
    "is_real",
    "is_rational_number",
    "rational_value",
    "is_square_of_rational",
    "rational_sqrt",
]

Rat = Fraction


class FieldTowerError(ArithmeticError):
    """Base error for tower arithmetic."""


class IncompatibleRadicandsError(FieldTowerError):
    """Two quadratic extensions with unrelated radicands were mixed."""


class TowerDepthError(FieldTowerError):
    """The computation would need more than one quadratic extension."""


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a rational, or None if x is not a rational square."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def is_square_of_rational(x: Fraction) -> bool:
    return rational_sqrt(x) is not None


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Element re + im*i of Q(i)."""

    re: Fraction
    im: Fraction

    def __add__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inv(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, o: "GaussianRational") -> "GaussianRational":
        return self * o.inv()

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def sqrt(self) -> "GaussianRational | None":
        """Exact square root in Q(i) with argument in (-pi/2, pi/2], or None."""
        if self.is_zero():
            return GaussianRational(Fraction(0), Fraction(0))
        m = rational_sqrt(self.norm())
        if m is None:
            return None
        u2 = (self.re + m) / 2
        u = rational_sqrt(u2)
        if u is None:
            return None
        if u != 0:
            v = self.im / (2 * u)
            root = GaussianRational(u, v)
        else:
            # self.re = -m <= 0 and self.im = 0: root is purely imaginary
            v = rational_sqrt(-self.re)
            if v is None:
                return None
            root = GaussianRational(Fraction(0), v)
        # fix branch: Re > 0, or Re = 0 and Im > 0
        if root.re < 0 or (root.re == 0 and root.im < 0):
            root = -root
        return root


_G0 = GaussianRational(Fraction(0), Fraction(0))
_G1 = GaussianRational(Fraction(1), Fraction(0))


@dataclass(frozen=True, slots=True)
class QuadExtElement:
    """Element a + b*sqrt(radicand) with a, b, radicand in Q(i).

    Only produced through :class:`FieldElement`; the radicand is never a
    perfect square of Q(i) and b is never zero after normalization.
    """

    a: GaussianRational
    b: GaussianRational
    radicand: GaussianRational


class FieldElement:
    """Immutable tagged value in Q, Q(i) or a quadratic extension Q(i)(sqrt d).

    Arithmetic lifts both operands to the smallest common level.  Levels:
    0 = rational, 1 = Gaussian rational, 2 = quadratic extension.
    """

    __slots__ = ("a", "b", "d", "_hash")

    def __init__(self, a: GaussianRational, b: GaussianRational = _G0,
                 d: GaussianRational = _G0):
        # normalize: collapse perfect-square radicands and vanishing b
        if not b.is_zero():
            root = d.sqrt()
            if root is not None:
                a = a + b * root
                b = _G0
                d = _G0
        if b.is_zero():
            d = _G0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *_):
        raise AttributeError("FieldElement is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(x) -> "FieldElement":
        return FieldElement(GaussianRational(_fraction(x), Fraction(0)))

    @staticmethod
    def from_gaussian(re, im) -> "FieldElement":
        return FieldElement(GaussianRational(_fraction(re), _fraction(im)))

    @staticmethod
    def i() -> "FieldElement":
        return FieldElement(GaussianRational(Fraction(0), Fraction(1)))

    # -- structure ---------------------------------------------------------

    @property
    def level(self) -> int:
        if not self.b.is_zero():
            return 2
        return 0 if self.a.im == 0 else 1

    def as_quad(self) -> QuadExtElement:
        return QuadExtElement(self.a, self.b, self.d)

    def is_zero(self) -> bool:
        return self.b.is_zero() and self.a.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement.from_rational(other)
        return NotImplemented  # type: ignore[return-value]

    def _match_radicand(self, o: "FieldElement"):
        """Common radicand for self and o, or raise.

        Returns (d, b_self, b_other) where both elements are read as
        a + b*sqrt(d).  Elements at level < 2 have b = 0.
        """
        if self.b.is_zero():
            return o.d, _G0, o.b
        if o.b.is_zero():
            return self.d, self.b, _G0
        if self.d == o.d:
            return self.d, self.b, o.b
        # same field, rescaled radicand: only real-rational radicands are
        # needed by the pipeline (sqrt(8) vs sqrt(2), sqrt(-2) vs sqrt(2))
        if self.d.im == 0 and o.d.im == 0 and self.d.re != 0:
            ratio = o.d.re / self.d.re
            s = rational_sqrt(ratio)
            if s is not None:
                # sqrt(o.d) = s*sqrt(self.d) under the branch convention
                return self.d, self.b, o.b * GaussianRational(s, Fraction(0))
            s = rational_sqrt(-ratio)
            if s is not None:
                # opposite signs: sqrt(o.d) = (+/- i s) sqrt(self.d); the
                # branch convention fixes +i s when self.d > 0, -i s otherwise
                mult = GaussianRational(Fraction(0), s if self.d.re > 0 else -s)
                return self.d, self.b, o.b * mult
        raise IncompatibleRadicandsError(
            f"radicands {self.d} and {o.d} generate different extensions")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d, bs, bo = self._match_radicand(o)
        return FieldElement(self.a + o.a, bs + bo, d)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.d)

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
        try:
            d, bs, bo = self._match_radicand(o)
        except IncompatibleRadicandsError:
            # pure radicals over conjugate radicands multiply into the real
            # extension: sqrt(d) * sqrt(conj d) = sqrt(|d|^2) > 0
            if self.a.is_zero() and o.a.is_zero() and self.d == o.d.conj():
                s = adjoin_sqrt(FieldElement(self.d * o.d))
                return FieldElement(self.b * o.b) * s
            raise
        # (a1 + b1 s)(a2 + b2 s) = a1 a2 + b1 b2 d + (a1 b2 + a2 b1) s
        a = self.a * o.a + bs * bo * d
        b = self.a * bo + o.a * bs
        return FieldElement(a, b, d)

    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in the field tower")
        if self.b.is_zero():
            return FieldElement(self.a.inv())
        # 1/(a + b s) = (a - b s)/(a^2 - b^2 d)
        den = self.a * self.a - self.b * self.b * self.d
        if den.is_zero():
            # would mean sqrt(d) in Q(i), excluded by normalization
            raise FieldTowerError("inconsistent quadratic element")
        di = den.inv()
        return FieldElement(self.a * di, -self.b * di, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = FE(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def conj(self) -> "FieldElement":
        """Complex conjugate under the fixed embedding.

        May land in the conjugate extension Q(i)(sqrt(conj d)); that is still
        a single quadratic extension, so no depth violation.
        """
        if self.b.is_zero():
            return FieldElement(self.a.conj())
        d = self.d
        if d.im == 0:
            if d.re > 0:
                # sqrt(d) real positive: conj fixes it
                return FieldElement(self.a.conj(), self.b.conj(), d)
            # sqrt(d) = i*sqrt(|d|): conj negates it
            return FieldElement(self.a.conj(), -self.b.conj(), d)
        # conj(sqrt(d)) = sqrt(conj(d)): arg in (-pi/2, pi/2) maps into itself
        return FieldElement(self.a.conj(), self.b.conj(), d.conj())

    # -- comparison --------------------------------------------------------

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.b.is_zero() != o.b.is_zero():
            return False
        if self.b.is_zero():
            return self.a == o.a
        if self.d == o.d:
            return self.a == o.a and self.b == o.b
        try:
            d, bs, bo = self._match_radicand(o)
        except IncompatibleRadicandsError:
            # unrelated extensions: nonzero radical parts can never agree
            return False
        return self.a == o.a and bs == bo

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.a, self.b, self.d))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        def g(x: GaussianRational) -> str:
            if x.im == 0:
                return str(x.re)
            if x.re == 0:
                return f"{x.im}i"
            return f"({x.re}{'+' if x.im > 0 else '-'}{abs(x.im)}i)"

        if self.b.is_zero():
            return g(self.a)
        return f"{g(self.a)} + {g(self.b)}*sqrt({g(self.d)})"


def FE(x) -> FieldElement:
    """Shorthand constructor from ints, Fractions or strings like '3/4'."""
    if isinstance(x, FieldElement):
        return x
    return FieldElement.from_rational(x)


# ---------------------------------------------------------------------------
# predicates and the square-root adjunction
# ---------------------------------------------------------------------------

def adjoin_sqrt(x: FieldElement | int | Fraction) -> FieldElement:
    """A field element s with s*s = x, branch argument in (-pi/2, pi/2].

    x must lie in the Q(i) level.  Perfect squares collapse back into Q(i);
    otherwise the result generates the extension Q(i)(sqrt(x)).
    """
    x = FE(x)
    if x.level == 2:
        raise TowerDepthError("cannot adjoin a square root of a quadratic element")
    root = x.a.sqrt()
    if root is not None:
        return FieldElement(root)
    return FieldElement(_G0, _G1, x.a)


def _sign_of_u_plus_v_sqrt(u: Fraction, v: Fraction, m2: Fraction) -> int:
    """Exact sign of u + v*sqrt(m2) for rational u, v and m2 > 0."""
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return (v > 0) - (v < 0)
    # compare |u| with |v| sqrt(m2)
    lhs, rhs = u * u, v * v * m2
    if u > 0 and v > 0:
        return 1
    if u < 0 and v < 0:
        return -1
    if u > 0:  # v < 0
        if lhs == rhs:
            return 0
        return 1 if lhs > rhs else -1
    # u < 0, v > 0
    if lhs == rhs:
        return 0
    return -1 if lhs > rhs else 1


def is_real(x: FieldElement) -> bool:
    """True iff x equals its own complex conjugate under the fixed embedding."""
    x = FE(x)
    if x.b.is_zero():
        return x.a.im == 0
    a2 = x.a.im
    b1, b2 = x.b.re, x.b.im
    d1, d2 = x.d.re, x.d.im
    if d2 == 0:
        if d1 > 0:
            # Im x = a2 + b2*sqrt(d1), sqrt(d1) irrational
            return a2 == 0 and b2 == 0
        # sqrt(d) = i*sqrt(|d1|): Im x = a2 + b1*sqrt(|d1|), irrational
        return a2 == 0 and b1 == 0
    # non-real radicand: Im x = a2 + (U + V*m)/s1 with m = |d|, s1 = sqrt((m+d1)/2)
    U = (b1 * d2 + b2 * d1) / 2
    V = b2 / 2
    m2 = d1 * d1 + d2 * d2
    m = rational_sqrt(m2)
    if m is not None:
        # T = U + V*m rational, s1 irrational: need a2 = 0 and T = 0
        return a2 == 0 and U + V * m == 0
    # m irrational: square the condition U + V*m = -a2*s1
    c2 = 2 * U * V - a2 * a2 / 2
    rhs2 = a2 * a2 * d1 / 2 - U * U - V * V * m2
    if c2 != 0:
        return False  # would force m rational
    if rhs2 != 0:
        return False
    # |U + V*m| = |a2|*s1; compare signs of U + V*m and -a2
    sT = _sign_of_u_plus_v_sqrt(U, V, m2)
    sR = (a2 < 0) - (a2 > 0)  # sign of -a2
    return sT == sR


def is_rational_number(x: FieldElement) -> bool:
    """True iff x lies in the Q level of the tower."""
    x = FE(x)
    return x.level == 0


def rational_value(x: FieldElement) -> Fraction:
    """The Fraction value of a level-0 element."""
    x = FE(x)
    if x.level != 0:
        raise FieldTowerError(f"{x!r} is not a rational number")
    return x.a.re
