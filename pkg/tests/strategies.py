"""Hypothesis strategies for polynomials, weights and linear maps."""

from hypothesis import strategies as st
from sympy.polys.domains import QQ

from src.grading import Weight
from src.polynomial import HoloPoly, Monomial, PolyMap, RPoly, conjugate, gaussian, z1, z2

small_ints = st.integers(min_value=-4, max_value=4)
nonzero_ints = small_ints.filter(bool)


@st.composite
def rationals(draw, max_numerator=6, max_denominator=4):
    return QQ(draw(st.integers(-max_numerator, max_numerator)), draw(st.integers(1, max_denominator)))


@st.composite
def positive_rationals(draw, max_numerator=6, max_denominator=4):
    return QQ(draw(st.integers(1, max_numerator)), draw(st.integers(1, max_denominator)))


@st.composite
def gaussian_coefficients(draw, *, nonzero=False):
    re, im = draw(small_ints), draw(small_ints)
    if nonzero and not (re or im):
        re = 1
    return gaussian(re, im)


@st.composite
def monomials(draw, max_exponent=3, *, nonconstant=True):
    exponents = draw(st.tuples(*[st.integers(0, max_exponent)] * 4))
    if nonconstant and not any(exponents):
        exponents = (1, *exponents[1:])
    return Monomial(*exponents)


@st.composite
def real_polynomials(draw, max_exponent=3, max_pairs=6, max_degree=None):
    """Sums c*m + conj(c)*conj(m), real valued by construction and free of constants."""
    total = RPoly.zero()
    for _ in range(draw(st.integers(1, max_pairs))):
        m = draw(monomials(max_exponent))
        if max_degree is not None and m.degree > max_degree:
            continue
        term = RPoly({m: draw(gaussian_coefficients(nonzero=True))})
        total = total + term + conjugate(term)
    return total


@st.composite
def circle_weights(draw):
    return Weight.circle(draw(positive_rationals()), draw(positive_rationals()))


@st.composite
def holomorphic_in_z1(draw, max_degree=2):
    """A nonzero polynomial in z1 alone."""
    coefficients = draw(st.lists(gaussian_coefficients(), min_size=1, max_size=max_degree + 1))
    if not any(coefficients):
        coefficients[0] = gaussian(1)
    total = HoloPoly.coerce(RPoly.zero())
    for power, c in enumerate(coefficients):
        total = total + z1() ** power * c
    return HoloPoly.coerce(total)


@st.composite
def invertible_linear_maps(draw):
    a, b, c, d = (draw(gaussian_coefficients()) for _ in range(4))
    if not a * d - b * c:
        a, b, c, d = gaussian(1), b, gaussian(0), gaussian(1)
    return PolyMap(HoloPoly.coerce(z1() * a + z2() * b), HoloPoly.coerce(z1() * c + z2() * d))
