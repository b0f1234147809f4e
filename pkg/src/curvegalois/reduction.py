"""Normal variational equations for the reduced two-body problem and their
reduction to y''(z) = r(z) y(z).

For each (space, potential) pair the first-order system in the momentum
variables (p1, p2) is written with respect to z = (p_theta + mu p)/alpha
along the geodesic orbit:

    p1' = A p1 + B w p2,   p2' = C w p1 - A p2,

where w = 1 for the tan family and w = sqrt(f) for the csc family.  On the
sphere with V = alpha*tan(theta):

    A = p/(f(1+f^2)),  B = p/(mu f^2) + ((mu-2)p - alpha z)/(1+f^2),
    C = (alpha z - mu p)/(1+f^2),   f = eps - alpha z^2/(2 mu),

and with V = -alpha/sin(theta) (phi = alpha z^2/(2 mu) - eps, f = phi^2-1):

    A = p/phi,  B = (p phi^2/mu + (mu-2)p - alpha z)/(phi f),
    C = (alpha z - mu p)/(phi f).

The hyperbolic branch is obtained by running the identical change of
variable through the hyperbolic normal variational equations (orbit
relations tanh(theta) = f(z) for V = alpha*tanh(theta) and
1/sinh(theta) = eps - alpha z^2/(2 mu) for V = alpha/sinh(theta)); it
lands on the same shapes with 1+f^2 -> 1-f^2, phi^2-1 -> phi^2+1 and the
sign of the (mu-2)p - alpha z term flipped.

Eliminating p1 gives p2'' = a1 p2' + a0 p2 with

    a1 = C'/C (+ f'/(2f) for the radical coupling),
    a0 = a1 A + A^2 + C B (f) - A',

and the scaling p2 = y sqrt(C) (f^(1/4)) removes the first-derivative term:

    r = a0 + a1^2/4 - a1'/2.

The derived constants q = p mu/alpha, kappa^2 = 2 mu eps/alpha and the
family-dependent lambda^2, eta^2 locate every finite singular point of r in
{q, +-lambda, +-eta, +-kappa}, so the denominator factor basis is known
without any root finding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .fields import FE, FieldElement, adjoin_sqrt
from .ratfunc import Polynomial, RationalFunction

__all__ = [
    "Space",
    "Potential",
    "ProblemInstance",
    "FirstOrderNVE",
    "NormalFormODE",
    "ParameterError",
    "CollisionError",
    "EliminationError",
    "build_first_order",
    "reduce_to_second_order",
    "to_normal_form",
    "tan_pole_table",
    "csc_pole_alphas",
]


class ParameterError(ValueError):
    """A hypothesis on the parameters is violated (mu, p or alpha zero)."""


class CollisionError(ValueError):
    """Two distinct singular points coincide for these parameters."""


class EliminationError(ArithmeticError):
    """C vanishes identically; p1 cannot be eliminated."""


class Space(enum.Enum):
    SPHERE = "S2"
    HYPERBOLIC = "H2"


class Potential(enum.Enum):
    TAN_FAMILY = "tan"
    CSC_FAMILY = "csc"


@dataclass(frozen=True)
class ProblemInstance:
    """Reduced two-body problem selection with exact rational parameters.

    mu is the mass ratio m1/(m1+m2), p the geodesic momentum (gamma = p^2),
    alpha the potential strength, epsilon the energy parameter: the energy
    level is alpha*epsilon - mu p^2/2.
    """

    space: Space
    potential: Potential
    mu: Fraction
    p: Fraction
    alpha: Fraction
    epsilon: Fraction

    def __post_init__(self):
        for name, val in (("mu", self.mu), ("p", self.p), ("alpha", self.alpha)):
            if not isinstance(val, Fraction):
                object.__setattr__(self, name, Fraction(val))
        if not isinstance(self.epsilon, Fraction):
            object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.mu == 0:
            raise ParameterError("mu = 0 violates mu = m1/(m1+m2) != 0")
        if self.p == 0:
            raise ParameterError("p = 0 violates gamma = p^2 > 0")
        if self.alpha == 0:
            raise ParameterError("alpha = 0 violates m1 m2 alpha != 0")

    @classmethod
    def from_energy(cls, space: Space, potential: Potential, mu, p, alpha,
                    energy) -> "ProblemInstance":
        """Build from the energy level instead of epsilon."""
        mu, p, alpha = Fraction(mu), Fraction(p), Fraction(alpha)
        if alpha == 0:
            raise ParameterError("alpha = 0 violates m1 m2 alpha != 0")
        eps = (Fraction(energy) + mu * p * p / 2) / alpha
        return cls(space, potential, mu, p, alpha, eps)

    # -- derived constants ---------------------------------------------------

    @property
    def q(self) -> Fraction:
        return self.p * self.mu / self.alpha

    @property
    def kappa_sq(self) -> Fraction:
        return 2 * self.mu * self.epsilon / self.alpha

    @property
    def gaussian_pair(self) -> bool:
        """True when lambda^2, eta^2 = (2mu/alpha)(eps +- i) are non-real."""
        if self.potential is Potential.TAN_FAMILY:
            return self.space is Space.SPHERE
        return self.space is Space.HYPERBOLIC

    @property
    def lambda_sq(self) -> FieldElement:
        c = 2 * self.mu / self.alpha
        if self.gaussian_pair:
            return FieldElement.from_gaussian(c * self.epsilon, c)
        return FE(c * (self.epsilon + 1))

    @property
    def eta_sq(self) -> FieldElement:
        c = 2 * self.mu / self.alpha
        if self.gaussian_pair:
            return FieldElement.from_gaussian(c * self.epsilon, -c)
        return FE(c * (self.epsilon - 1))

    @property
    def energy(self) -> Fraction:
        return self.alpha * self.epsilon - self.mu * self.p * self.p / 2

    @property
    def is_one_body_limit(self) -> bool:
        return self.mu == 1

    def check_collisions(self) -> None:
        """Reject parameter choices where q meets another singular point.

        Pair merges (lambda, eta or kappa equal to 0) are allowed: the two
        members of a +- pair fuse into one pole and the analysis proceeds on
        the actual pole set.
        """
        q2 = FE(self.q * self.q)
        for name, w in (("lambda", self.lambda_sq), ("eta", self.eta_sq),
                        ("kappa", FE(self.kappa_sq))):
            if q2 == w:
                raise CollisionError(
                    f"q^2 equals {name}^2 = {w!r}: singular points collide")


@dataclass(frozen=True)
class FirstOrderNVE:
    """The z-domain first-order system p1' = A p1 + B w p2, p2' = C w p1 - A p2
    with w = sqrt(f) when radical_coupling else 1."""

    instance: ProblemInstance
    A: RationalFunction
    B: RationalFunction
    C: RationalFunction
    f: RationalFunction
    radical_coupling: bool
    degenerate_one_body: bool = False


@dataclass(frozen=True)
class SubstitutionRecord:
    """Audit trail of the reduction chain."""

    independent_variable: str
    orbit_relation: str
    scaling: str
    radical_coupling: bool


@dataclass(frozen=True)
class NormalFormODE:
    r: RationalFunction
    substitution: SubstitutionRecord
    instance: ProblemInstance
    denominator_factors: tuple[Polynomial, ...]


def _tan_f(inst: ProblemInstance) -> RationalFunction:
    zsq = Polynomial([0, 0, 1])
    return RationalFunction(
        Polynomial([inst.epsilon]) - zsq * FE(inst.alpha / (2 * inst.mu)))


def _csc_phi(inst: ProblemInstance) -> RationalFunction:
    zsq = Polynomial([0, 0, 1])
    return RationalFunction(
        zsq * FE(inst.alpha / (2 * inst.mu)) - Polynomial([inst.epsilon]))


def build_first_order(inst: ProblemInstance) -> FirstOrderNVE:
    """Exact coefficients of the z-domain normal variational system."""
    inst.check_collisions()
    z = RationalFunction.x()
    p, mu, alpha = inst.p, inst.mu, inst.alpha
    sphere = inst.space is Space.SPHERE
    if sphere:
        linear = FE(-alpha) * z + FE((mu - 2) * p)
    else:
        linear = FE(alpha) * z + FE((2 - mu) * p)
    c_num = FE(alpha) * z - FE(mu * p)
    if inst.potential is Potential.TAN_FAMILY:
        f = _tan_f(inst)
        g = 1 + f * f if sphere else 1 - f * f
        A = FE(p) / (f * g)
        B = FE(p / mu) / (f * f) + linear / g
        C = c_num / g
        radical = False
    else:
        phi = _csc_phi(inst)
        f = phi * phi - 1 if sphere else phi * phi + 1
        A = FE(p) / phi
        B = (FE(p / mu) * phi * phi + linear) / (phi * f)
        C = c_num / (phi * f)
        radical = True
    return FirstOrderNVE(inst, A, B, C, f, radical,
                         degenerate_one_body=inst.is_one_body_limit)


def reduce_to_second_order(sys: FirstOrderNVE
                           ) -> tuple[RationalFunction, RationalFunction]:
    """Coefficients (a1, a0) of p2'' = a1 p2' + a0 p2 after eliminating p1."""
    if sys.C.is_zero():
        raise EliminationError("C is identically zero; cannot eliminate p1")
    a1 = sys.C.logderiv()
    coupling = sys.C * sys.B
    if sys.radical_coupling:
        a1 = a1 + sys.f.logderiv() * FE(Fraction(1, 2))
        coupling = coupling * sys.f
    a0 = a1 * sys.A + sys.A * sys.A + coupling - sys.A.derivative()
    return a1, a0


def to_normal_form(sys: FirstOrderNVE) -> NormalFormODE:
    """Remove the first-derivative term: y'' = r y with p2 = y sqrt(C) f^(1/4)."""
    a1, a0 = reduce_to_second_order(sys)
    r = a0 + a1 * a1 * FE(Fraction(1, 4)) - a1.derivative() * FE(Fraction(1, 2))
    inst = sys.instance
    factors = (
        Polynomial.linear_root(FE(inst.q)),
        Polynomial([-FE(inst.kappa_sq), FE(0), FE(1)]),
        Polynomial([-inst.lambda_sq, FE(0), FE(1)]),
        Polynomial([-inst.eta_sq, FE(0), FE(1)]),
    )
    scaling = "p2 = y*sqrt(C)*f^(1/4)" if sys.radical_coupling else "p2 = y*sqrt(C)"
    if inst.potential is Potential.TAN_FAMILY:
        rel = "tan(theta) = f(z)" if inst.space is Space.SPHERE \
            else "tanh(theta) = f(z)"
    else:
        rel = "1/sin(theta) = phi(z)" if inst.space is Space.SPHERE \
            else "1/sinh(theta) = eps - alpha z^2/(2 mu)"
    sub = SubstitutionRecord(
        independent_variable="z = (p_theta + mu*p)/alpha",
        orbit_relation=rel,
        scaling=scaling,
        radical_coupling=sys.radical_coupling,
    )
    return NormalFormODE(r, sub, inst, factors)


# ---------------------------------------------------------------------------
# closed-form Laurent data at the singular points (regression targets and
# the direct input of the reality checks)
# ---------------------------------------------------------------------------

def tan_pole_table(inst: ProblemInstance) -> dict[str, tuple[FieldElement, FieldElement]]:
    """Closed-form (alpha_j, beta_j) of r at its poles for the tan family.

    Keys: 'q', '+lambda', '-lambda', '+eta', '-eta', '+kappa', '-kappa'.
    Requires pairwise distinct singular points (in particular eps != 0).
    """
    if inst.potential is not Potential.TAN_FAMILY:
        raise ValueError("tan_pole_table needs a tan-family instance")
    if inst.kappa_sq == 0 or inst.lambda_sq.is_zero() or inst.eta_sq.is_zero():
        raise CollisionError("pair merge: closed forms assume distinct points")
    mu, q = FE(inst.mu), FE(inst.q)
    lam2, eta2 = inst.lambda_sq, inst.eta_sq
    lam, eta = adjoin_sqrt(lam2), adjoin_sqrt(eta2)
    kap = adjoin_sqrt(FE(inst.kappa_sq))

    def alpha_at(s, s2, sign_root):
        # (mu-1)/(4 s^2) (q - s)(q(mu-1) - s(mu+1)) at the +s member and the
        # s -> -s mirror at the -s member
        s = s if sign_root > 0 else -s
        return (mu - 1) / (FE(4) * s2) * (q - s) * (q * (mu - 1) - s * (mu + 1))

    def beta_at(s, s2, t2, sign_root):
        # the even-in-s core flips between the two members of a pair; the
        # prefactor carries (s^2 - t^2), which also encodes the lambda/eta
        # orientation of the displayed formulas
        s = s if sign_root > 0 else -s
        lead = (mu - 1) / (FE(4) * (s2 - t2) * s2 * s)
        core = -(mu + 1) * lam2 * eta2 + (mu - 1) * t2 * q * q \
            - FE(3) * (mu + 1) * s2 * s2 - FE(5) * (mu - 1) * q * q * s2
        return lead * (core + FE(8) * s2 * s * q * mu)

    table: dict[str, tuple[FieldElement, FieldElement]] = {}
    beta1 = FE(-4) * q / (FE(2) * q * q - lam2 - eta2)
    table["q"] = (FE(Fraction(3, 4)), beta1)
    table["+lambda"] = (alpha_at(lam, lam2, +1), beta_at(lam, lam2, eta2, +1))
    table["-lambda"] = (alpha_at(lam, lam2, -1), beta_at(lam, lam2, eta2, -1))
    table["+eta"] = (alpha_at(eta, eta2, +1), beta_at(eta, eta2, lam2, +1))
    table["-eta"] = (alpha_at(eta, eta2, -1), beta_at(eta, eta2, lam2, -1))
    zero = FE(0)
    table["+kappa"] = (zero, q / (kap * (q - kap)))
    table["-kappa"] = (zero, -q / (kap * (q + kap)))
    return table


def csc_pole_alphas(inst: ProblemInstance) -> dict[str, FieldElement]:
    """Closed-form alpha_j of r at its poles for the csc family.

    alpha = 3/4 at q, -3/16 at +-lambda and +-eta, and at +-kappa

        3/4 + (mu-1)(1 -+ q/kappa)(1 + mu +- (1-mu) q/kappa).

    Requires pairwise distinct singular points.
    """
    if inst.potential is not Potential.CSC_FAMILY:
        raise ValueError("csc_pole_alphas needs a csc-family instance")
    if inst.kappa_sq == 0 or inst.lambda_sq.is_zero() or inst.eta_sq.is_zero():
        raise CollisionError("pair merge: closed forms assume distinct points")
    mu, q = FE(inst.mu), FE(inst.q)
    kap = adjoin_sqrt(FE(inst.kappa_sq))
    x = q / kap
    a_plus = FE(Fraction(3, 4)) + (mu - 1) * (1 - x) * (1 + mu + (1 - mu) * x)
    a_minus = FE(Fraction(3, 4)) + (mu - 1) * (1 + x) * (1 + mu - (1 - mu) * x)
    m316 = FE(Fraction(-3, 16))
    return {
        "q": FE(Fraction(3, 4)),
        "+lambda": m316, "-lambda": m316, "+eta": m316, "-eta": m316,
        "+kappa": a_plus, "-kappa": a_minus,
    }
