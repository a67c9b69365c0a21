import pytest
from hypothesis import given, settings
from sympy.polys.domains import QQ

from src.grading import (
    HolomorphicQuotient,
    InvalidWeightError,
    NotHomogeneousError,
    UndefinedGradeError,
    Weight,
    balance_class,
    balanced_in_variable,
    completely_diversely_balanced,
    grade,
    is_balanced,
    is_weighted_homogeneous,
    s_w_set,
    signature_expansion,
    weighted_expansion,
)
from src.parser import parse
from src.polynomial import Monomial, RPoly
from tests.strategies import circle_weights, monomials, positive_rationals

PLUS_INFINITY = HolomorphicQuotient.plus_infinity()
MINUS_INFINITY = HolomorphicQuotient.minus_infinity()


def ratio(numerator, denominator=1):
    return HolomorphicQuotient.finite(QQ(numerator, denominator))


grade_cases = [
    pytest.param(Monomial(1, 1, 0, 0), Weight.circle(1, 1), (2, 0, ratio(1)), id="modulus"),
    pytest.param(Monomial(3, 0, 0, 1), Weight.circle(1, 3), (6, 0, ratio(1)), id="weighted_balanced"),
    pytest.param(Monomial(2, 0, 0, 0), Weight.circle(1, 1), (2, 2, PLUS_INFINITY), id="holomorphic"),
    pytest.param(Monomial(0, 0, 0, 3), Weight.circle(1, 2), (6, -6, MINUS_INFINITY), id="antiholomorphic"),
    pytest.param(Monomial(1, 0, 0, 1), Weight.circle(-1, 1), (0, -2, None), id="undefined_quotient"),
]

balanced_cases = [
    pytest.param(Monomial(3, 0, 0, 1), Weight.circle(1, 3), True, id="circle_balanced"),
    pytest.param(Monomial(2, 0, 0, 1), Weight.integers(1, 1), True, id="integer_signature"),
    pytest.param(Monomial(2, 0, 0, 1), Weight.circle(1, 1), False, id="circle_unbalanced"),
    pytest.param(Monomial(2, 0, 0, 1), Weight.integers(QQ(1, 2), QQ(1, 2)), False, id="half_integer_signature"),
    pytest.param(Monomial(3, 0, 0, 0), Weight.cyclic_group(1, 0, 3), True, id="cyclic_cube"),
    pytest.param(Monomial(2, 0, 0, 0), Weight.cyclic_group(1, 0, 3), False, id="cyclic_square"),
]


@pytest.mark.parametrize(("m", "theta", "expected"), grade_cases)
def test_grade(m, theta, expected):
    result = grade(m, theta)
    assert (result.wt, result.sgn, result.hq) == expected


def test_grade_of_constant_is_undefined():
    with pytest.raises(UndefinedGradeError):
        grade(Monomial(), Weight.circle(1, 1))


@pytest.mark.parametrize(("m", "theta", "expected"), balanced_cases)
def test_is_balanced(m, theta, expected):
    assert is_balanced(m, theta) is expected


def test_balanced_in_variable():
    assert balanced_in_variable(Monomial(1, 1, 1, 0), 1)
    assert not balanced_in_variable(Monomial(1, 0, 0, 1), 1)
    assert balanced_in_variable(Monomial(), 2)


def test_weighted_expansion():
    p = parse("z1*cz1 + z2^2*cz2^2")
    assert weighted_expansion(p, Weight.circle(1, 1)) == [(2, parse("z1*cz1")), (4, parse("z2^2*cz2^2"))]
    assert weighted_expansion(p, Weight.circle(2, 1)) == [(4, p)]
    assert weighted_expansion(RPoly.zero(), Weight.circle(1, 1)) == []
    assert is_weighted_homogeneous(p, Weight.circle(2, 1))


def test_signature_expansion():
    theta = Weight.circle(1, 1)
    assert signature_expansion(parse("z1*cz2 + cz1*z2"), theta) == [(0, parse("z1*cz2 + cz1*z2"))]
    assert signature_expansion(parse("z1^2 + cz1^2"), theta) == [(-2, parse("cz1^2")), (2, parse("z1^2"))]


balance_class_cases = [
    pytest.param("z1*cz1*z2*cz2", Weight.circle(1, 1), (True, True, False, True), id="extremely_balanced"),
    pytest.param("z1^3 + cz1^3 + z1*z2 + cz1*cz2", Weight.circle(1, 1), (False, False, True, False), id="real_part"),
    pytest.param("z1^2*cz2 + cz1^2*z2", Weight.circle(1, 1), (False, False, False, True), id="diversely_balanced"),
    pytest.param("z1^3*cz2 + cz1^3*z2", Weight.circle(1, 3), (True, False, False, True), id="weighted_mixed"),
]


@pytest.mark.parametrize(("text", "theta", "expected"), balance_class_cases)
def test_balance_class(text, theta, expected):
    result = balance_class(parse(text), theta)
    flags = (result.strictly_balanced, result.extremely_balanced, result.extremely_imbalanced, result.diversely_balanced)
    assert flags == expected


def test_balance_class_of_constant_is_undefined():
    with pytest.raises(UndefinedGradeError):
        balance_class(parse("3"), Weight.circle(1, 1))


s_w_cases = [
    pytest.param(2, {PLUS_INFINITY, ratio(1), MINUS_INFINITY}, id="weight_two"),
    pytest.param(1, {PLUS_INFINITY, MINUS_INFINITY}, id="weight_one"),
    pytest.param(3, {PLUS_INFINITY, ratio(2), ratio(1, 2), MINUS_INFINITY}, id="weight_three"),
    pytest.param(0, set(), id="weight_zero"),
]


@pytest.mark.parametrize(("total_weight", "expected"), s_w_cases)
def test_s_w_set(total_weight, expected):
    assert s_w_set(total_weight, Weight.circle(1, 1)) == expected


def test_s_w_set_needs_positive_weights():
    with pytest.raises(InvalidWeightError):
        s_w_set(2, Weight.circle(1, -1))


completely_diverse_cases = [
    pytest.param("z1^2 + 2*z1*cz1 + cz1^2", True, id="square_of_real_part"),
    pytest.param("z1*cz1", False, id="modulus"),
    pytest.param("z1^2 + cz1^2", False, id="missing_ratio_one"),
]


@pytest.mark.parametrize(("text", "expected"), completely_diverse_cases)
def test_completely_diversely_balanced(text, expected):
    assert completely_diversely_balanced(parse(text), Weight.circle(1, 1)) is expected


def test_completely_diversely_balanced_needs_homogeneity():
    with pytest.raises(NotHomogeneousError):
        completely_diversely_balanced(parse("z1*cz1 + z2^2*cz2^2"), Weight.circle(1, 1))


def test_cyclic_weight_validation():
    assert Weight.cyclic_group(1, 2, 5).theta2 == QQ(2, 5)
    with pytest.raises(InvalidWeightError):
        Weight.cyclic_group(1, 0, 0)


@pytest.mark.property_based
@given(monomials(), circle_weights())
@settings(max_examples=500, deadline=None)
def test_signature_is_holomorphic_minus_antiholomorphic_weight(m, theta):
    holomorphic = m.j1 * theta.theta1 + m.j2 * theta.theta2
    antiholomorphic = m.k1 * theta.theta1 + m.k2 * theta.theta2
    result = grade(m, theta)
    assert result.sgn == holomorphic - antiholomorphic
    assert result.wt == holomorphic + antiholomorphic


@pytest.mark.property_based
@given(monomials(), circle_weights())
@settings(max_examples=500, deadline=None)
def test_conjugate_monomial_has_inverse_quotient(m, theta):
    assert grade(m.conjugate(), theta).hq == grade(m, theta).hq.inverse()


@pytest.mark.property_based
@given(positive_rationals(), positive_rationals())
@settings(max_examples=50, deadline=None)
def test_extremely_balanced_polynomial_is_balanced_for_every_weight(theta1, theta2):
    p = parse("z1*cz1 + 2*z1^2*cz1^2*z2*cz2 + z2^3*cz2^3")
    theta = Weight.circle(theta1, theta2)
    assert all(is_balanced(m, theta) for m in p.monomials())
    assert balance_class(p, theta).extremely_balanced
