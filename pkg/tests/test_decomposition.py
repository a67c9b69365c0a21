import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy.polys.domains import QQ

from src.decomposition import (
    ParametricInputError,
    coprime_with_parts,
    holomorphic_decompose,
    im_expansion,
    pluriharmonic_split,
    reconstruct_im_expansion,
)
from src.parser import parse
from src.polynomial import HoloPoly, NotRealValuedError, RPoly, conjugate, cz1, gaussian, squared_modulus, substitute, z1, z2
from tests.strategies import gaussian_coefficients, holomorphic_in_z1, invertible_linear_maps, real_polynomials

pluriharmonic_cases = [
    pytest.param("z1^3 + cz1^3 + z2*cz2", "z1^3", "z2*cz2", id="cube_plus_modulus"),
    pytest.param("z1*cz1", "0", "z1*cz1", id="no_pure_terms"),
    pytest.param("3", "3/2", "0", id="constant"),
    pytest.param("i*z1*z2 - i*cz1*cz2 + z1^2*cz2 + cz1^2*z2", "i*z1*z2", "z1^2*cz2 + cz1^2*z2", id="imaginary_pure"),
]


@pytest.mark.parametrize(("text", "q", "core"), pluriharmonic_cases)
def test_pluriharmonic_split(text, q, core):
    result_q, result_core = pluriharmonic_split(parse(text))
    assert result_q == parse(q)
    assert result_core == parse(core)


def test_pluriharmonic_split_requires_real_input():
    with pytest.raises(NotRealValuedError):
        pluriharmonic_split(parse("z1*cz2"))


def test_decompose_mixed_real_part():
    decomposition = holomorphic_decompose(parse("z1*cz2 + cz1*z2"))
    assert not decomposition.q
    assert decomposition.plus == [(QQ(1, 2), parse("z1 + z2"))]
    assert decomposition.minus == [(QQ(1, 2), parse("z1 - z2"))]
    assert decomposition.inertia == (1, 1)


def test_decompose_difference_of_moduli():
    decomposition = holomorphic_decompose(parse("z1*cz1 - z2*cz2"))
    assert decomposition.plus == [(1, z1())]
    assert decomposition.minus == [(1, z2())]


def test_decompose_pluriharmonic_input():
    decomposition = holomorphic_decompose(parse("(1/2)*z1^3 + (1/2)*cz1^3"))
    assert decomposition.q == parse("(1/2)*z1^3")
    assert decomposition.plus == []
    assert decomposition.minus == []


def test_decompose_purely_imaginary_off_diagonal():
    p = parse("i*z1*cz2 - i*cz1*z2")
    decomposition = holomorphic_decompose(p)
    assert decomposition.reconstruct() == p
    assert decomposition.inertia == (1, 1)


def test_decompose_rejects_formal_parameters():
    with pytest.raises(ParametricInputError):
        holomorphic_decompose(parse("s*z1*cz1"))


im_expansion_cases = [
    pytest.param("((z2*cz1 - cz2*z1)/(2*i))^2", "z1", [0, 0, 1], id="square_of_im_z2_conj_z1"),
    pytest.param("((z2 - cz2)/(2*i))^3", "1", [0, 0, 0, 1], id="cube_of_im_z2"),
    pytest.param("z1*cz1 + (z1 + cz1)*(z2 - cz2)/(2*i)", "1", ["z1*cz1", "z1 + cz1"], id="coefficients_in_z1"),
]


@pytest.mark.parametrize(("q_text", "p_text", "expected"), im_expansion_cases)
def test_im_expansion(q_text, p_text, expected):
    expansion = im_expansion(parse(q_text), HoloPoly.coerce(parse(p_text)))
    assert expansion.success
    assert expansion.coefficients == [parse(str(b)) for b in expected]


def test_im_expansion_fails_on_real_part():
    expansion = im_expansion(parse("(z2 + cz2)/2"), HoloPoly.coerce(parse("1")))
    assert not expansion.success
    assert "Re z2" in expansion.reason


def test_im_expansion_fails_when_shifted_variable_is_not_scaled():
    assert not im_expansion(parse("(z2 - cz2)/(2*i)"), z1()).success


def test_im_expansion_validates_p():
    with pytest.raises(ValueError, match="nonzero"):
        im_expansion(parse("z2"), HoloPoly.coerce(RPoly.zero()))
    with pytest.raises(ValueError, match="z1 alone"):
        im_expansion(parse("z2"), z2())


coprime_cases = [
    pytest.param("z1", True, id="monomial"),
    pytest.param("z1 + i", True, id="shifted_root"),
    pytest.param("z1^2 + 1", True, id="two_roots"),
    pytest.param("1", True, id="constant"),
    pytest.param("2*i*z1^3 - z1", True, id="odd"),
]


@pytest.mark.parametrize(("text", "expected"), coprime_cases)
def test_coprime_with_parts(text, expected):
    assert coprime_with_parts(HoloPoly.coerce(parse(text))) is expected


def test_coprime_with_parts_needs_polynomial_in_z1():
    with pytest.raises(ValueError, match="z1 alone"):
        coprime_with_parts(HoloPoly.coerce(parse("z1*z2")))


@pytest.mark.property_based
@given(holomorphic_in_z1(max_degree=4))
@settings(max_examples=100, deadline=None)
def test_random_polynomials_in_z1_are_coprime_with_parts(p):
    assert p.degree <= 4
    assert coprime_with_parts(p)


@pytest.mark.property_based
@given(real_polynomials(max_exponent=4, max_pairs=20, max_degree=8))
@settings(max_examples=300, deadline=None)
def test_decomposition_reconstructs_exactly(p):
    decomposition = holomorphic_decompose(p)
    assert decomposition.reconstruct() == p
    assert decomposition.rank_certificate == decomposition.inertia
    for _, f in decomposition.plus + decomposition.minus:
        assert not f.constant_term


@st.composite
def hermitian_forms(draw):
    """sum(H[u][v] b_u conj(b_v)) over the monomials z1, z2, z1^2, z1 z2, z2^2 with H Hermitian."""
    basis = [z1(), z2(), z1() ** 2, z1() * z2(), z2() ** 2]
    total = RPoly.zero()
    for u, b_u in enumerate(basis):
        total = total + squared_modulus(b_u) * draw(st.integers(-3, 3))
        for b_v in basis[u + 1 :]:
            c = draw(gaussian_coefficients())
            term = b_u * conjugate(b_v) * c
            total = total + term + conjugate(term)
    return total


@pytest.mark.property_based
@given(hermitian_forms(), invertible_linear_maps())
@settings(max_examples=100, deadline=None)
def test_inertia_is_invariant_under_linear_changes_of_variables(p, mapping):
    assume(p)
    assert holomorphic_decompose(substitute(p, mapping)).inertia == holomorphic_decompose(p).inertia


@pytest.mark.property_based
@given(
    st.lists(st.tuples(gaussian_coefficients(), gaussian_coefficients(), gaussian_coefficients()), min_size=1, max_size=3),
    holomorphic_in_z1(),
)
@settings(max_examples=50, deadline=None)
def test_im_expansion_recovers_forward_built_coefficients(raw_coefficients, p):
    coefficients = [
        RPoly.constant(c0) + z1() * c1 + cz1() * c2 for c0, c1, c2 in raw_coefficients
    ]
    assume(coefficients[-1])
    q_poly = reconstruct_im_expansion(coefficients, p)
    expansion = im_expansion(q_poly, p)
    assert expansion.success
    assert expansion.coefficients == coefficients


@pytest.mark.property_based
@given(
    st.lists(st.tuples(gaussian_coefficients(), gaussian_coefficients()), min_size=1, max_size=3),
    holomorphic_in_z1(),
    gaussian_coefficients(nonzero=True),
)
@settings(max_examples=20, deadline=None)
def test_im_expansion_rejects_real_part_dependence(raw_coefficients, p, c):
    assume(p + conjugate(p))
    coefficients = [RPoly.constant(c0) + z1() * c1 for c0, c1 in raw_coefficients]
    q_poly = reconstruct_im_expansion(coefficients, p) + parse("z2 + cz2") * c
    assert not im_expansion(q_poly, p).success


def test_squared_modulus_of_constant_is_real():
    assert squared_modulus(RPoly.constant(gaussian(1, 1))) == 2
