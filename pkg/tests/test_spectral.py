"""Singular-point records, exponent data, reality conditions."""

from fractions import Fraction

import pytest

from curvegalois.fields import FE, adjoin_sqrt, is_rational_number, rational_value
from curvegalois.ratfunc import Polynomial, RationalFunction
from curvegalois.reduction import (
    NormalFormODE,
    Potential,
    ProblemInstance,
    Space,
    build_first_order,
    to_normal_form,
)
from curvegalois.spectral import (
    INFINITY,
    IrregularSingularityError,
    LemmaHypothesisError,
    check_reality_lemma_csc,
    check_reality_lemma_tan,
    csc_kappa_alphas,
    delta_is_rational,
    singular_points,
)
from test_reduction import DEFAULT_CSC, DEFAULT_TAN, random_instances


def _records_by_delta(records):
    table = {}
    for rec in records:
        key = repr(rec.location)
        table[key] = rec
    return table


def _synthetic_ode(r, factors):
    return NormalFormODE(r, None, DEFAULT_TAN, tuple(factors))


def test_record_count_and_deltas_tan():
    ode = to_normal_form(build_first_order(DEFAULT_TAN))
    records = singular_points(ode)
    assert len(records) == 8
    inf = [rec for rec in records if rec.is_infinity][0]
    assert inf.delta == FE(2)
    q_rec = [rec for rec in records if rec.location == FE(DEFAULT_TAN.q)][0]
    assert q_rec.delta == FE(2)
    kap = adjoin_sqrt(FE(DEFAULT_TAN.kappa_sq))
    for loc in (kap, -kap):
        rec = [x for x in records if x.location == loc][0]
        assert rec.order == 1 and rec.delta == FE(1)
    lam = adjoin_sqrt(DEFAULT_TAN.lambda_sq)
    lam_rec = [x for x in records if x.location == lam][0]
    assert not delta_is_rational(lam_rec)


def test_record_deltas_csc():
    ode = to_normal_form(build_first_order(DEFAULT_CSC))
    records = singular_points(ode)
    assert len(records) == 8
    lam = adjoin_sqrt(DEFAULT_CSC.lambda_sq)
    lam_rec = [x for x in records if x.location == lam][0]
    assert lam_rec.delta_squared == FE(Fraction(1, 4))
    assert lam_rec.delta == FE(Fraction(1, 2))
    kap = adjoin_sqrt(FE(DEFAULT_CSC.kappa_sq))
    kap_rec = [x for x in records if x.location == kap][0]
    assert not delta_is_rational(kap_rec)


def test_exponent_invariants():
    for inst in (DEFAULT_TAN, DEFAULT_CSC):
        ode = to_normal_form(build_first_order(inst))
        for rec in singular_points(ode):
            assert rec.delta_squared == FE(1) + FE(4) * rec.alpha
            exps = rec.exponents
            if exps is not None:
                rp, rm = exps
                assert rp + rm == FE(1)
                assert rp * rm == -rec.alpha


def test_free_coefficient_two_point_equation():
    # r = 3/(4 z^2): records at 0 and infinity, both Delta = 2
    r = RationalFunction(Polynomial([Fraction(3, 4)]), Polynomial([0, 0, 1]))
    recs = singular_points(_synthetic_ode(r, [Polynomial.linear_root(FE(0))]))
    assert len(recs) == 2
    assert all(rec.delta == FE(2) for rec in recs)


def test_irregular_at_infinity_rejected():
    r = RationalFunction(Polynomial([0, 1]))  # r = z: order at infinity -1
    with pytest.raises(IrregularSingularityError):
        singular_points(_synthetic_ode(r, []))


def test_irregular_pole_rejected():
    r = RationalFunction(Polynomial([1]), Polynomial([0, 0, 0, 1]))  # 1/z^3
    with pytest.raises(IrregularSingularityError):
        singular_points(_synthetic_ode(r, [Polynomial.linear_root(FE(0))]))


def test_reality_tan_default():
    rep = check_reality_lemma_tan(DEFAULT_TAN)
    assert rep.condition_holds and rep.alphas_nonreal


def test_reality_tan_engineered_equality():
    # left side of the inequality equals 1 at eps=0, so alpha = 1/8 hits it
    inst = ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                           Fraction(1, 2), Fraction(1), Fraction(1, 8), Fraction(0))
    rep = check_reality_lemma_tan(inst)
    assert not rep.condition_holds
    # at the equality point two of the four coefficients become real
    assert not rep.alphas_nonreal


def test_reality_tan_hypothesis_violation():
    inst = ProblemInstance(Space.SPHERE, Potential.TAN_FAMILY,
                           Fraction(1), Fraction(1), Fraction(1), Fraction(2))
    with pytest.raises(LemmaHypothesisError):
        check_reality_lemma_tan(inst)
    with pytest.raises(LemmaHypothesisError):
        check_reality_lemma_tan(
            ProblemInstance(Space.HYPERBOLIC, Potential.TAN_FAMILY,
                            Fraction(1, 2), Fraction(1), Fraction(1), Fraction(2)))


def test_reality_csc_negative_energy_parameter():
    inst = ProblemInstance(Space.SPHERE, Potential.CSC_FAMILY,
                           Fraction(1, 2), Fraction(1), Fraction(1), Fraction(-1))
    rep = check_reality_lemma_csc(inst)
    assert rep.condition_holds and rep.alphas_nonreal and rep.mirror_identity_ok
    # kappa = i: direct value check of alpha at +kappa
    a6, a7 = csc_kappa_alphas(inst)
    assert a6 == FieldE(-Fraction(1, 16), -Fraction(1, 4))
    assert a7 == FieldE(-Fraction(1, 16), Fraction(1, 4))


def FieldE(re, im):
    from curvegalois.fields import FieldElement
    return FieldElement.from_gaussian(re, im)


def test_reality_csc_positive_epsilon():
    inst = ProblemInstance(Space.SPHERE, Potential.CSC_FAMILY,
                           Fraction(1, 2), Fraction(1), Fraction(1), Fraction(1))
    rep = check_reality_lemma_csc(inst)
    assert not rep.condition_holds
    assert not rep.alphas_nonreal  # kappa real makes both coefficients real


def test_reality_csc_hypothesis_violation():
    inst = ProblemInstance(Space.SPHERE, Potential.CSC_FAMILY,
                           Fraction(1), Fraction(1), Fraction(1), Fraction(-1))
    with pytest.raises(LemmaHypothesisError):
        check_reality_lemma_csc(inst)


@pytest.mark.slow
def test_lemma_tan_100_random_tuples():
    count = 0
    for inst in random_instances(Space.SPHERE, Potential.TAN_FAMILY, 100, seed=101):
        rep = check_reality_lemma_tan(inst)
        if rep.condition_holds:
            assert rep.alphas_nonreal, inst
            count += 1
    assert count >= 80  # the inequality holds generically


def test_lemma_csc_100_random_tuples():
    count = 0
    for inst in random_instances(Space.SPHERE, Potential.CSC_FAMILY, 100,
                                 seed=202, eps_sign=-1):
        rep = check_reality_lemma_csc(inst)
        assert rep.condition_holds
        assert rep.alphas_nonreal, inst
        assert rep.mirror_identity_ok, inst
        count += 1
    assert count == 100


def test_branch_flip_permutes_records():
    ode = to_normal_form(build_first_order(DEFAULT_TAN))
    records = singular_points(ode)
    # flipping the adjoin_sqrt branch maps the record set onto itself:
    # locations come in +- pairs with matching data under the flip
    quad_recs = [rec for rec in records if not rec.is_infinity
                 and rec.location.level == 2]
    d2_multiset = sorted(repr(rec.delta_squared) for rec in records)
    for rec in quad_recs:
        partner = [x for x in quad_recs if x.location == -rec.location]
        assert len(partner) == 1
    assert d2_multiset == sorted(repr(rec.delta_squared) for rec in records)
