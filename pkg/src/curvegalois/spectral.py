"""Singular-point classification of y'' = r(z) y and the reality conditions.

Each pole of r of order <= 2 is a regular singular point with indicial
exponents rho+- = (1 +- Delta)/2, Delta = sqrt(1 + 4*alpha), where alpha is
the order -2 Laurent coefficient; the point at infinity is regular singular
when r = alpha_inf/z^2 + O(1/z^3).  Delta itself may leave the supported
tower, so records always carry Delta^2 and the downstream case logic is
phrased in terms of Delta^2 rationality and square tests.

The reality checks implement the two sufficient conditions for non-real
exponent data: for the tan family the inequality

    (sqrt(eps^2+1) - eps)(eps^2+1) != (mu-1)^2 p^2 / (4 alpha mu)

decided exactly by comparing (eps^2+1)^3 against the square of
W = eps(eps^2+1) + (mu-1)^2 p^2/(4 alpha mu) with a sign-case analysis,
and for the csc family the condition eps < 0.  Both checks also report the
direct reality test of the relevant alpha_j, so the sufficient condition is
tested rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .fields import (
    FE,
    FieldElement,
    TowerDepthError,
    adjoin_sqrt,
    is_rational_number,
    is_real,
    is_square_of_rational,
    rational_value,
)
from .ratfunc import (
    PoleOrderError,
    behavior_at_infinity,
    laurent_coefficient,
    partial_fractions,
)
from .reduction import (
    NormalFormODE,
    Potential,
    ProblemInstance,
    Space,
    build_first_order,
    to_normal_form,
)

__all__ = [
    "INFINITY",
    "SingularPointRecord",
    "IrregularSingularityError",
    "LemmaHypothesisError",
    "RealityReport",
    "singular_points",
    "check_reality_lemma_tan",
    "check_reality_lemma_csc",
    "delta_is_rational",
    "delta_as_integer",
    "delta_as_half_integer",
]


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "infinity"


INFINITY = _Infinity()


class IrregularSingularityError(ArithmeticError):
    """A singular point violates the regular-singular hypotheses."""


class LemmaHypothesisError(ValueError):
    """Parameters violate the hypotheses of a reality condition."""


@dataclass(frozen=True)
class SingularPointRecord:
    """Laurent and indicial data at one singular point.

    ``delta`` is the exponent difference sqrt(1 + 4*alpha) when it is
    representable in the tower, else None; ``delta_squared`` always is.
    ``order`` is the pole order (for the infinity record, the order of r at
    infinity, which is >= 2 for a regular singular point).
    """

    location: FieldElement | _Infinity
    alpha: FieldElement
    beta: FieldElement
    delta_squared: FieldElement
    delta: FieldElement | None
    order: int | float

    @property
    def is_infinity(self) -> bool:
        return self.location is INFINITY

    @property
    def exponents(self) -> tuple[FieldElement, FieldElement] | None:
        """(rho+, rho-) when Delta is representable."""
        if self.delta is None:
            return None
        half = FE(Fraction(1, 2))
        return (half * (1 + self.delta), half * (1 - self.delta))


def _make_record(location, alpha: FieldElement, beta: FieldElement,
                 order) -> SingularPointRecord:
    delta_sq = FE(1) + FE(4) * alpha
    try:
        delta = adjoin_sqrt(delta_sq)
    except TowerDepthError:
        delta = None
    return SingularPointRecord(location, alpha, beta, delta_sq, delta, order)


def singular_points(ode: NormalFormODE) -> list[SingularPointRecord]:
    """One record per pole of r plus one for infinity.

    Raises :class:`IrregularSingularityError` when a pole of order >= 3 or
    an order <= 1 at infinity is found.
    """
    r = ode.r
    try:
        pf = partial_fractions(r, factors=list(ode.denominator_factors))
    except PoleOrderError as exc:
        raise IrregularSingularityError(str(exc)) from exc
    order_inf, lead_inf = behavior_at_infinity(r)
    if order_inf <= 1:
        raise IrregularSingularityError(
            f"order {order_inf} at infinity: irregular singular point")
    if not pf.poly_part.is_zero():
        raise IrregularSingularityError("r has a polynomial part")
    records = [
        _make_record(t.location, t.coeff2, t.coeff1, t.order)
        for t in pf.poles
    ]
    alpha_inf = lead_inf if order_inf == 2 else FE(0)
    records.append(_make_record(INFINITY, alpha_inf, FE(0), order_inf))
    return records


# ---------------------------------------------------------------------------
# Delta arithmetic used by the case analysis
# ---------------------------------------------------------------------------

def delta_is_rational(rec: SingularPointRecord) -> bool:
    """Delta = sqrt(delta_squared) is a rational number."""
    d2 = rec.delta_squared
    return is_rational_number(d2) and is_square_of_rational(rational_value(d2))


def delta_as_integer(rec: SingularPointRecord) -> int | None:
    """Delta as a non-negative integer, when it is one."""
    d2 = rec.delta_squared
    if not is_rational_number(d2):
        return None
    v = rational_value(d2)
    if v < 0 or v.denominator != 1:
        return None
    k = math.isqrt(v.numerator)
    return k if k * k == v.numerator else None


def delta_as_half_integer(rec: SingularPointRecord) -> Fraction | None:
    """Delta as a non-negative element of (1/2)Z, when it is one."""
    d2 = rec.delta_squared
    if not is_rational_number(d2):
        return None
    v = rational_value(d2) * 4
    if v < 0 or v.denominator != 1:
        return None
    k = math.isqrt(v.numerator)
    return Fraction(k, 2) if k * k == v.numerator else None


# ---------------------------------------------------------------------------
# reality conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RealityReport:
    """Outcome of a sufficient reality condition and the direct check."""

    condition_holds: bool
    alphas_nonreal: bool
    checked_alphas: tuple[FieldElement, ...]
    mirror_identity_ok: bool | None = None  # csc only: im a6 = -im a7


def _noneq_condition(inst: ProblemInstance) -> bool:
    """Exact decision of (sqrt(e^2+1) - e)(e^2+1) != (mu-1)^2 p^2/(4 a mu)."""
    e, mu, p, a = inst.epsilon, inst.mu, inst.p, inst.alpha
    rhs = (mu - 1) ** 2 * p * p / (4 * a * mu)
    w = e * (e * e + 1) + rhs
    if w <= 0:
        return True  # left side is strictly positive
    return (e * e + 1) ** 3 != w * w


def check_reality_lemma_tan(inst: ProblemInstance,
                            ode: NormalFormODE | None = None) -> RealityReport:
    """Tan-family condition on the sphere plus the direct reality test of
    the alpha coefficients at +-lambda, +-eta of the constructed r."""
    if inst.space is not Space.SPHERE or inst.potential is not Potential.TAN_FAMILY:
        raise LemmaHypothesisError("condition applies to the S2 tan family")
    if inst.mu == 1:
        raise LemmaHypothesisError("mu = 1 is the one-body limit")
    condition = _noneq_condition(inst)
    if ode is None:
        ode = to_normal_form(build_first_order(inst))
    lam = adjoin_sqrt(inst.lambda_sq)
    eta = adjoin_sqrt(inst.eta_sq)
    alphas = tuple(
        laurent_coefficient(ode.r, z0, -2) for z0 in (lam, -lam, eta, -eta))
    nonreal = all(not is_real(a) for a in alphas)
    return RealityReport(condition, nonreal, alphas)


def csc_kappa_alphas(inst: ProblemInstance) -> tuple[FieldElement, FieldElement]:
    """Closed-form alpha at +kappa and -kappa for the csc family."""
    if inst.kappa_sq == 0:
        raise LemmaHypothesisError("kappa = 0: the +-kappa pair merges")
    mu, q = FE(inst.mu), FE(inst.q)
    kap = adjoin_sqrt(FE(inst.kappa_sq))
    x = q / kap
    a6 = FE(Fraction(3, 4)) + (mu - 1) * (1 - x) * (1 + mu + (1 - mu) * x)
    a7 = FE(Fraction(3, 4)) + (mu - 1) * (1 + x) * (1 + mu - (1 - mu) * x)
    return a6, a7


def check_reality_lemma_csc(inst: ProblemInstance) -> RealityReport:
    """Csc-family condition eps < 0 on the sphere, checked against the
    closed-form alpha at +-kappa, plus the exact mirror identity
    im alpha(+kappa) = -im alpha(-kappa) = 2 mu (mu-1) q i / kappa."""
    if inst.space is not Space.SPHERE or inst.potential is not Potential.CSC_FAMILY:
        raise LemmaHypothesisError("condition applies to the S2 csc family")
    if inst.mu == 1:
        raise LemmaHypothesisError("mu = 1 is the one-body limit")
    condition = inst.epsilon < 0
    a6, a7 = csc_kappa_alphas(inst)
    nonreal = not is_real(a6) and not is_real(a7)
    # im a6 = -im a7 exactly iff a6 + a7 is real
    mirror = is_real(a6 + a7)
    if condition:
        # displayed value: a6 - conj(a6) = 2i im a6 = -4 mu (mu-1) q / kappa
        mu, q = FE(inst.mu), FE(inst.q)
        kap = adjoin_sqrt(FE(inst.kappa_sq))
        mirror = mirror and (a6 - a6.conj() == FE(-4) * mu * (mu - 1) * q / kap)
    return RealityReport(condition, nonreal, (a6, a7), mirror_identity_ok=mirror)
