"""Tower arithmetic: axioms, predicates, branch convention."""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from curvegalois.fields import (
    FE,
    FieldElement,
    GaussianRational,
    IncompatibleRadicandsError,
    TowerDepthError,
    adjoin_sqrt,
    is_rational_number,
    is_real,
    is_square_of_rational,
    rational_value,
)

I = FieldElement.i()


def gauss(re, im):
    return FieldElement.from_gaussian(Fraction(re), Fraction(im))


def _mpf(f: Fraction) -> mp.mpf:
    return mp.mpf(f.numerator) / f.denominator


def to_mpc(x: FieldElement) -> mp.mpc:
    """Numerical embedding with the principal square-root branch."""
    a = mp.mpc(_mpf(x.a.re), _mpf(x.a.im))
    if x.b.is_zero():
        return a
    b = mp.mpc(_mpf(x.b.re), _mpf(x.b.im))
    d = mp.mpc(_mpf(x.d.re), _mpf(x.d.im))
    return a + b * mp.sqrt(d)


rationals = st.fractions(min_value=-50, max_value=50)
small_rationals = st.fractions(min_value=-8, max_value=8)


def test_conjugate_product():
    assert (FE(1) + I) * (FE(1) - I) == FE(2)


def test_defining_relation():
    for d in (2, -3, Fraction(5, 7)):
        s = adjoin_sqrt(FE(d))
        assert s * s == FE(d)


def test_lambda_eta_product():
    # lambda^2 = 2 mu (eps+i)/alpha, eta^2 = 2 mu (eps-i)/alpha at
    # mu=1/2, eps=2, alpha=1: product is an element whose square is 5
    lam2 = gauss(2, 1)
    eta2 = gauss(2, -1)
    lam = adjoin_sqrt(lam2)
    eta = adjoin_sqrt(eta2)
    prod = lam * eta
    assert prod * prod == FE(5)
    # oracle: direct expansion of (lam*eta)^2 in Q(i)
    assert lam2 * eta2 == FE(5)


def test_is_real_basics():
    assert is_real(FE(Fraction(3, 4)))
    assert not is_real(I)
    assert is_real(adjoin_sqrt(FE(2)))
    assert not is_real(adjoin_sqrt(FE(-2)))
    assert not is_real(FE(1) + adjoin_sqrt(FE(-2)))
    assert is_real(FE(1) + adjoin_sqrt(FE(2)))


def test_is_rational_number():
    assert is_rational_number(FE(Fraction(1, 2)))
    assert not is_rational_number(adjoin_sqrt(FE(2)))
    assert not is_rational_number(I)
    assert rational_value(FE(Fraction(1, 2))) == Fraction(1, 2)


def test_adjoin_sqrt_perfect_squares():
    assert adjoin_sqrt(FE(4)) == FE(2)
    assert adjoin_sqrt(gauss(0, 2)) == gauss(1, 1)  # (1+i)^2 = 2i
    # branch convention: argument in (-pi/2, pi/2]
    assert adjoin_sqrt(FE(-1)) == I
    assert adjoin_sqrt(FE(-4)) == gauss(0, 2)


def test_adjoin_sqrt_kappa_example():
    # kappa^2 = 2 mu eps / alpha with mu=1/2, eps=-1, alpha=1 is -1
    k = adjoin_sqrt(FE(-1))
    assert k == I
    assert k * k == FE(-1)


def test_tower_depth_cap():
    s = adjoin_sqrt(FE(2))
    with pytest.raises(TowerDepthError):
        adjoin_sqrt(s + FE(1))


def test_incompatible_radicands():
    a = adjoin_sqrt(FE(2)) + FE(1)
    b = adjoin_sqrt(FE(3)) + FE(1)
    with pytest.raises(IncompatibleRadicandsError):
        _ = a + b
    with pytest.raises(IncompatibleRadicandsError):
        _ = a * b


def test_radicand_rescaling():
    # sqrt(8) = 2 sqrt(2) lives in the same field
    assert adjoin_sqrt(FE(8)) == FE(2) * adjoin_sqrt(FE(2))
    # sqrt(-2) = i sqrt(2)
    assert adjoin_sqrt(FE(-2)) == I * adjoin_sqrt(FE(2))
    assert adjoin_sqrt(FE(8)) + adjoin_sqrt(FE(2)) == FE(3) * adjoin_sqrt(FE(2))


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        FE(1) / FE(0)
    with pytest.raises(ZeroDivisionError):
        (adjoin_sqrt(FE(2)) * 0).inv()


@given(re=rationals, im=rationals)
def test_gaussian_inverse(re, im):
    x = FieldElement.from_gaussian(re, im)
    if not x.is_zero():
        assert x * x.inv() == FE(1)


@given(re=rationals, im=rationals)
def test_conj_involution_gaussian(re, im):
    x = FieldElement.from_gaussian(re, im)
    assert x.conj().conj() == x
    assert is_real(x) == (x.conj() == x)


@settings(max_examples=100)
@given(re=small_rationals, im=small_rationals)
def test_adjoin_sqrt_squares_to_argument(re, im):
    x = FieldElement.from_gaussian(re, im)
    s = adjoin_sqrt(x)
    assert s * s == x


@settings(max_examples=100)
@given(re=small_rationals, im=small_rationals)
def test_adjoin_sqrt_branch_numeric(re, im):
    x = FieldElement.from_gaussian(re, im)
    s = adjoin_sqrt(x)
    if s.is_zero():
        return
    with mp.workdps(80):
        arg = mp.arg(to_mpc(s))
        assert -mp.pi / 2 - mp.mpf("1e-60") < arg <= mp.pi / 2 + mp.mpf("1e-60")


@settings(max_examples=150)
@given(a_re=small_rationals, a_im=small_rationals,
       b_re=small_rationals, b_im=small_rationals,
       d_re=small_rationals, d_im=small_rationals)
def test_quad_field_ops_numeric(a_re, a_im, b_re, b_im, d_re, d_im):
    """Exact ops agree with the numerical embedding for quadratic elements."""
    d = FieldElement.from_gaussian(d_re, d_im)
    x = FieldElement.from_gaussian(a_re, a_im) \
        + FieldElement.from_gaussian(b_re, b_im) * adjoin_sqrt(d)
    y = FieldElement.from_gaussian(b_re, a_im) \
        + FieldElement.from_gaussian(a_re, d_im) * adjoin_sqrt(d)
    with mp.workdps(60):
        for op in ("add", "mul"):
            exact = x + y if op == "add" else x * y
            num = to_mpc(x) + to_mpc(y) if op == "add" else to_mpc(x) * to_mpc(y)
            assert mp.fabs(to_mpc(exact) - num) < mp.mpf("1e-40")
    if not x.is_zero():
        assert x * x.inv() == FE(1)


@settings(max_examples=200)
@given(a_re=small_rationals, a_im=small_rationals,
       b_re=small_rationals, b_im=small_rationals,
       d_re=small_rationals, d_im=small_rationals)
def test_is_real_matches_numeric(a_re, a_im, b_re, b_im, d_re, d_im):
    """Exact reality predicate vs high-precision numerics."""
    d = FieldElement.from_gaussian(d_re, d_im)
    x = FieldElement.from_gaussian(a_re, a_im) \
        + FieldElement.from_gaussian(b_re, b_im) * adjoin_sqrt(d)
    exact = is_real(x)
    with mp.workdps(40):
        num = abs(mp.im(to_mpc(x))) < mp.mpf("1e-30")
    assert exact == num


@settings(max_examples=200)
@given(a_re=small_rationals, a_im=small_rationals,
       b_re=small_rationals, b_im=small_rationals,
       d_re=small_rationals, d_im=small_rationals)
def test_conj_involution_and_reality_quad(a_re, a_im, b_re, b_im, d_re, d_im):
    d = FieldElement.from_gaussian(d_re, d_im)
    x = FieldElement.from_gaussian(a_re, a_im) \
        + FieldElement.from_gaussian(b_re, b_im) * adjoin_sqrt(d)
    assert x.conj().conj() == x
    with mp.workdps(40):
        assert mp.fabs(to_mpc(x.conj()) - mp.conj(to_mpc(x))) < mp.mpf("1e-30")


def test_normalization_idempotence():
    # building the same value twice gives structurally equal elements
    x = FE(3) + FE(2) * adjoin_sqrt(FE(9))  # collapses: sqrt(9) = 3
    assert x == FE(9)
    assert x.level == 0
    y = adjoin_sqrt(gauss(3, 4))  # (2+i)^2 = 3+4i collapses into Q(i)
    assert y == gauss(2, 1)


def test_is_square_of_rational():
    assert is_square_of_rational(Fraction(4, 9))
    assert not is_square_of_rational(Fraction(2))
    assert not is_square_of_rational(Fraction(-4))
    assert is_square_of_rational(Fraction(0))
