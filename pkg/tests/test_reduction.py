"""Construction of the z-domain NVE systems and reduction to y'' = r y."""

import random
from fractions import Fraction

import pytest

from curvegalois.fields import FE, adjoin_sqrt
from curvegalois.ratfunc import (
    Polynomial,
    RationalFunction,
    behavior_at_infinity,
    laurent_coefficient,
    partial_fractions,
)
from curvegalois.reduction import (
    CollisionError,
    EliminationError,
    ParameterError,
    Potential,
    ProblemInstance,
    Space,
    FirstOrderNVE,
    build_first_order,
    csc_pole_alphas,
    reduce_to_second_order,
    tan_pole_table,
    to_normal_form,
)

DEFAULT_TAN = ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                              Fraction(1, 2), Fraction(1), Fraction(1), Fraction(2))
DEFAULT_CSC = ProblemInstance(Space.SPHERE, Potential.CSC_FAMILY,
                              Fraction(1, 2), Fraction(1), Fraction(1), Fraction(-2))


def poly(*coeffs):
    return Polynomial(list(reversed(coeffs)))


def all_pole_locations(inst):
    lam = adjoin_sqrt(inst.lambda_sq)
    eta = adjoin_sqrt(inst.eta_sq)
    kap = adjoin_sqrt(FE(inst.kappa_sq))
    return {"q": FE(inst.q), "+lambda": lam, "-lambda": -lam,
            "+eta": eta, "-eta": -eta, "+kappa": kap, "-kappa": -kap}


def random_instances(space, potential, n, seed, eps_sign=None):
    """Admissible random tuples avoiding collisions and pair merges.

    Sampling stays in the physical domain: mu = m1/(m1+m2) in (0,1) for
    positive masses, alpha > 0 (the attractive convention the reality
    conditions assume via kappa^2 = 2 mu eps/alpha).
    """
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        den = rng.randint(2, 10)
        mu = Fraction(rng.randint(1, den - 1), den)
        if mu in (0, 1):
            continue
        p = Fraction(rng.randint(1, 6), rng.randint(1, 4)) * rng.choice([1, -1])
        alpha = Fraction(rng.randint(1, 6), rng.randint(1, 4))
        eps = Fraction(rng.randint(1, 8), rng.randint(1, 4))
        if eps_sign is not None:
            eps = eps * eps_sign
        else:
            eps = eps * rng.choice([1, -1])
        if eps == 0:
            continue
        try:
            inst = ProblemInstance(space, potential, mu, p, alpha, eps)
            if inst.lambda_sq.is_zero() or inst.eta_sq.is_zero() or inst.kappa_sq == 0:
                continue
            inst.check_collisions()
        except (ParameterError, CollisionError):
            continue
        out.append(inst)
    return out


def test_parameter_validation():
    with pytest.raises(ParameterError):
        ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                        Fraction(0), Fraction(1), Fraction(1), Fraction(2))
    with pytest.raises(ParameterError):
        ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                        Fraction(1, 2), Fraction(0), Fraction(1), Fraction(2))
    with pytest.raises(ParameterError):
        ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                        Fraction(1, 2), Fraction(1), Fraction(0), Fraction(2))


def test_from_energy_roundtrip():
    inst = ProblemInstance.from_energy(Space.SPHERE, Potential.TAN_FAMILY,
                                       Fraction(1, 2), 1, 1, DEFAULT_TAN.energy)
    assert inst.epsilon == DEFAULT_TAN.epsilon


def test_tan_coefficients_match_display():
    sys_ = build_first_order(DEFAULT_TAN)
    # C(z) = (z - 1/2)/(1 + (2 - z^2)^2)
    assert sys_.C == RationalFunction(poly(1, Fraction(-1, 2)),
                                      poly(1, 0, -4, 0, 5))
    assert not sys_.radical_coupling


def test_csc_A_is_p_over_phi():
    inst = ProblemInstance(Space.SPHERE, Potential.CSC_FAMILY,
                           Fraction(1, 2), Fraction(1), Fraction(1), Fraction(-1))
    sys_ = build_first_order(inst)
    # phi(z) = alpha z^2/(2 mu) - eps = z^2 + 1
    assert sys_.A == RationalFunction(poly(1), poly(1, 0, 1))
    assert sys_.radical_coupling


def test_one_body_limit_flagged():
    inst = ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                           Fraction(1), Fraction(1), Fraction(1), Fraction(2))
    sys_ = build_first_order(inst)
    assert sys_.degenerate_one_body
    # alpha_j vanish at +-lambda, +-eta: those points are not poles of r
    ode = to_normal_form(sys_)
    lam = adjoin_sqrt(inst.lambda_sq)
    with pytest.raises(Exception):
        laurent_coefficient(ode.r, lam, -1)


def test_collision_rejection():
    # q^2 = kappa^2: q = mu p/alpha = 1, kappa^2 = 2 mu eps/alpha = 1
    inst = ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                           Fraction(1, 2), Fraction(2), Fraction(1), Fraction(1))
    assert inst.q == 1 and inst.kappa_sq == 1
    with pytest.raises(CollisionError):
        build_first_order(inst)


def test_pair_merge_is_allowed():
    # eps = -1 merges +-lambda at 0 for the csc family; construction proceeds
    inst = ProblemInstance(Space.SPHERE, Potential.CSC_FAMILY,
                           Fraction(1, 2), Fraction(1), Fraction(1), Fraction(-1))
    ode = to_normal_form(build_first_order(inst))
    assert behavior_at_infinity(ode.r) == (2, FE(Fraction(3, 4)))
    assert laurent_coefficient(ode.r, FE(0), -2) == FE(Fraction(-3, 8))


def test_reduce_constant_system():
    sys_ = FirstOrderNVE(DEFAULT_TAN, RationalFunction.constant(0),
                         RationalFunction.constant(1),
                         RationalFunction.constant(1),
                         RationalFunction.constant(1), False)
    a1, a0 = reduce_to_second_order(sys_)
    assert a1.is_zero() and a0 == RationalFunction.constant(1)


def test_reduce_requires_nonzero_C():
    sys_ = FirstOrderNVE(DEFAULT_TAN, RationalFunction.constant(0),
                         RationalFunction.constant(1),
                         RationalFunction.constant(0),
                         RationalFunction.constant(1), False)
    with pytest.raises(EliminationError):
        reduce_to_second_order(sys_)


def test_first_derivative_coefficient_shapes():
    tan_sys = build_first_order(DEFAULT_TAN)
    a1, _ = reduce_to_second_order(tan_sys)
    assert a1 == tan_sys.C.logderiv()
    csc_sys = build_first_order(DEFAULT_CSC)
    a1c, _ = reduce_to_second_order(csc_sys)
    assert a1c == csc_sys.C.logderiv() + csc_sys.f.logderiv() * FE(Fraction(1, 2))


def test_normal_form_gcd_reduced():
    ode = to_normal_form(build_first_order(DEFAULT_TAN))
    assert ode.r.num.gcd(ode.r.den).degree == 0
    assert ode.r.den.leading == FE(1)


def test_tan_table_regression_default():
    ode = to_normal_form(build_first_order(DEFAULT_TAN))
    table = tan_pole_table(DEFAULT_TAN)
    for name, z0 in all_pole_locations(DEFAULT_TAN).items():
        assert laurent_coefficient(ode.r, z0, -2) == table[name][0], name
        assert laurent_coefficient(ode.r, z0, -1) == table[name][1], name


def test_csc_alpha_regression_default():
    ode = to_normal_form(build_first_order(DEFAULT_CSC))
    alphas = csc_pole_alphas(DEFAULT_CSC)
    for name, z0 in all_pole_locations(DEFAULT_CSC).items():
        assert laurent_coefficient(ode.r, z0, -2) == alphas[name], name


@pytest.mark.parametrize("space", [Space.SPHERE, Space.HYPERBOLIC])
@pytest.mark.parametrize("potential", [Potential.TAN_FAMILY, Potential.CSC_FAMILY])
def test_infinity_behavior_all_branches(space, potential):
    for inst in random_instances(space, potential, 6, seed=hash((space, potential)) & 0xFFFF):
        ode = to_normal_form(build_first_order(inst))
        assert behavior_at_infinity(ode.r) == (2, FE(Fraction(3, 4)))


def _paired_sums(pf):
    """(sum beta, sum alpha + beta z) with conjugate pairs combined first."""
    acc_b, acc_ab = FE(0), FE(0)
    terms = list(pf.poles)
    used = [False] * len(terms)
    for i, t in enumerate(terms):
        if used[i]:
            continue
        used[i] = True
        b, ab = t.coeff1, t.coeff2 + t.coeff1 * t.location
        if t.location.level == 2:
            for j in range(i + 1, len(terms)):
                u = terms[j]
                if not used[j] and u.location.level == 2 and u.location == -t.location:
                    used[j] = True
                    b = b + u.coeff1
                    ab = ab + u.coeff2 + u.coeff1 * u.location
                    break
        acc_b = acc_b + b
        acc_ab = acc_ab + ab
    return acc_b, acc_ab


@pytest.mark.parametrize("space", [Space.SPHERE, Space.HYPERBOLIC])
@pytest.mark.parametrize("potential", [Potential.TAN_FAMILY, Potential.CSC_FAMILY])
def test_residue_sum_identities(space, potential):
    for inst in random_instances(space, potential, 5, seed=0xBEEF):
        ode = to_normal_form(build_first_order(inst))
        pf = partial_fractions(ode.r, factors=list(ode.denominator_factors))
        sb, sab = _paired_sums(pf)
        assert sb == FE(0)
        assert sab == FE(Fraction(3, 4))


def test_partial_fraction_roundtrip_pipeline():
    for inst in (DEFAULT_TAN, DEFAULT_CSC):
        ode = to_normal_form(build_first_order(inst))
        pf = partial_fractions(ode.r, factors=list(ode.denominator_factors))
        assert pf.recombine() == ode.r


def test_tan_table_random_tuples():
    for inst in random_instances(Space.SPHERE, Potential.TAN_FAMILY, 8, seed=7):
        ode = to_normal_form(build_first_order(inst))
        table = tan_pole_table(inst)
        for name, z0 in all_pole_locations(inst).items():
            assert laurent_coefficient(ode.r, z0, -2) == table[name][0]
            assert laurent_coefficient(ode.r, z0, -1) == table[name][1]


@pytest.mark.slow
def test_r_against_independent_symbolic_derivation():
    """Cross-check r with an independent sympy derivation of the same chain."""
    sympy = pytest.importorskip("sympy")
    sp = sympy
    z = sp.Symbol("z")

    def sympy_r(inst):
        mu, p, al, eps = (sp.Rational(x) for x in
                          (inst.mu, inst.p, inst.alpha, inst.epsilon))
        sphere = inst.space is Space.SPHERE
        if inst.potential is Potential.TAN_FAMILY:
            f = eps - al * z**2 / (2 * mu)
            g = 1 + f**2 if sphere else 1 - f**2
            lin = (mu - 2) * p - al * z if sphere else (2 - mu) * p + al * z
            A = p / (f * g)
            B = p / (mu * f**2) + lin / g
            C = (al * z - mu * p) / g
            a1 = sp.cancel(sp.diff(C, z) / C)
            a0 = a1 * A + A**2 + C * B - sp.diff(A, z)
        else:
            phi = al * z**2 / (2 * mu) - eps
            f = phi**2 - 1 if sphere else phi**2 + 1
            lin = (mu - 2) * p - al * z if sphere else (2 - mu) * p + al * z
            A = p / phi
            B = (p * phi**2 / mu + lin) / (phi * f)
            C = (al * z - mu * p) / (phi * f)
            a1 = sp.cancel(sp.diff(C, z) / C + sp.diff(f, z) / (2 * f))
            a0 = a1 * A + A**2 + C * B * f - sp.diff(A, z)
        return sp.cancel(a0 + a1**2 / 4 - sp.diff(a1, z) / 2)

    def to_sympy(rf):
        def conv(poly_):
            return sum(sp.Rational(c.a.re) * z**k
                       for k, c in enumerate(poly_.coeffs))
        return conv(rf.num) / conv(rf.den)

    cases = [DEFAULT_TAN, DEFAULT_CSC,
             ProblemInstance(Space.HYPERBOLIC, Potential.TAN_FAMILY,
                             Fraction(1, 3), Fraction(2), Fraction(1), Fraction(3)),
             ProblemInstance(Space.HYPERBOLIC, Potential.CSC_FAMILY,
                             Fraction(2, 3), Fraction(1), Fraction(2), Fraction(-1))]
    for inst in cases:
        ode = to_normal_form(build_first_order(inst))
        diff = sp.cancel(sp.together(sympy_r(inst) - to_sympy(ode.r)))
        assert sp.simplify(diff) == 0, inst
