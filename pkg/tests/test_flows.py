import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from src.finite_type import DegeneratePolynomialError
from src.flows import (
    FlowKind,
    FlowSpec,
    Invariance,
    InvalidFlowError,
    VField,
    admissible_flow_types,
    admissible_pairs,
    commutes,
    conjugate_linear_field,
    flow_preserves_model,
    generator,
    invariance_constraint,
    lie_bracket,
    linear_map,
    pair_check,
    pushforward_matches,
    rotation_constraint_rows,
    rotation_field,
    shear_normalize,
    translation_verdict,
)
from src.parser import parse
from src.polynomial import HoloPoly, Monomial, PolyMap, RPoly, conjugate, gaussian, z1, z2
from tests.strategies import gaussian_coefficients, real_polynomials, small_ints

IMAG = gaussian(0, 1)

generator_cases = [
    pytest.param(FlowSpec.type1(IMAG), ("0", "i*z2"), id="type1"),
    pytest.param(FlowSpec.type2a(2), ("1", "2*z2"), id="type2a"),
    pytest.param(FlowSpec.type2b(), ("1", "0"), id="type2b"),
    pytest.param(FlowSpec.type3(parse("z1^2 + 1")), ("0", "z1^2 + 1"), id="type3"),
    pytest.param(FlowSpec.type4(IMAG, gaussian(0, 3)), ("i*z1", "3*i*z2"), id="type4"),
    pytest.param(FlowSpec.type5(1, 2), ("z1", "2*z2 + z1^2"), id="type5"),
    pytest.param(FlowSpec.type1(IMAG, swapped=True), ("i*z1", "0"), id="type1_swapped"),
    pytest.param(FlowSpec.type3(parse("z1^2"), swapped=True), ("z2^2", "0"), id="type3_swapped"),
]


@pytest.mark.parametrize(("flow", "expected"), generator_cases)
def test_generator(flow, expected):
    assert generator(flow) == VField(parse(expected[0]), parse(expected[1]))


def test_generator_carries_drift():
    assert generator(FlowSpec.type4(IMAG, IMAG, beta3=2)).drift == gaussian(0, 2)


def test_lie_bracket_of_translation_and_dilation():
    assert lie_bracket(VField(parse("1"), parse("0")), VField(parse("z1"), parse("0"))) == VField(parse("1"), parse("0"))


def test_lie_bracket_of_diagonal_fields_vanishes():
    x = VField(parse("2*z1"), parse("i*z2"))
    y = VField(parse("-z1"), parse("(1 + i)*z2"))
    assert not lie_bracket(x, y)
    assert not lie_bracket(x, x)


commute_cases = [
    pytest.param(FlowSpec.type1(IMAG), FlowSpec.type4(IMAG, gaussian(0, 2)), True, id="rotation_with_torus"),
    pytest.param(FlowSpec.type2b(), FlowSpec.type4(1, 1), False, id="translation_with_dilation"),
    pytest.param(FlowSpec.type2b(), FlowSpec.type2b(swapped=True), True, id="two_translations"),
    pytest.param(FlowSpec.type3(parse("z1^2")), FlowSpec.type5(1, 2), True, id="shear_with_type5"),
]


@pytest.mark.parametrize(("f", "g", "expected"), commute_cases)
def test_commutes(f, g, expected):
    assert commutes(f, g) is expected
    assert commutes(g, f) is expected


@pytest.mark.parametrize(
    "flow",
    [pytest.param(case.values[0], id=case.id) for case in generator_cases],
)
def test_every_flow_commutes_with_the_canonical_translation(flow):
    assert commutes(flow, VField.canonical())


invariance_cases = [
    pytest.param("((z1 - cz1)/(2*i))^2", VField(parse("1"), parse("0")), Invariance.INVARIANT, id="imaginary_part_translation"),
    pytest.param("z1*cz1", VField(parse("i*z1"), parse("0")), Invariance.INVARIANT, id="radius_rotation"),
    pytest.param(
        "((z1 + cz1)/2)^2",
        VField(parse("1"), parse("0")),
        Invariance.INVARIANT_MOD_PLURIHARMONIC,
        id="real_part_translation",
    ),
    pytest.param("z1*cz1", VField(parse("z1"), parse("0")), Invariance.VIOLATED, id="real_dilation"),
]


@pytest.mark.parametrize(("text", "field", "expected"), invariance_cases)
def test_invariance_constraint(text, field, expected):
    assert invariance_constraint(parse(text), field).status is expected


def test_invariance_constraint_certificates():
    verdict = invariance_constraint(parse("((z1 + cz1)/2)^2"), VField(parse("1"), parse("0")))
    assert verdict.psi == parse("z1")
    assert verdict.holds
    violated = invariance_constraint(parse("z1*cz1"), VField(parse("z1"), parse("0")))
    assert violated.residual == parse("2*z1*cz1")
    assert not violated.holds


rows_cases = [
    pytest.param("z1*cz1 + z2*cz2", [(0, 0)], id="ball"),
    pytest.param("z1^3*cz2 + cz1^3*z2", [(-3, 1), (3, -1)], id="weighted_pair"),
    pytest.param("z1*cz2 + cz1*z2 + z1^2*cz1^2", [(-1, 1), (0, 0), (1, -1)], id="with_modulus"),
]


@pytest.mark.parametrize(("text", "expected"), rows_cases)
def test_rotation_constraint_rows(text, expected):
    assert rotation_constraint_rows(parse(text)) == expected


def test_translation_verdict_for_the_ball(ball):
    verdict = translation_verdict(ball, 1)
    assert verdict.status is Invariance.INVARIANT_MOD_PLURIHARMONIC
    assert verdict.shear == parse("(1/2)*z1^2")
    assert verdict.normalized == parse("z1*cz1 - (1/2)*z1^2 - (1/2)*cz1^2 + z2*cz2")


def test_translation_verdict_for_the_tube(tube):
    for which in (1, 2):
        verdict = translation_verdict(tube, which)
        assert verdict.status is Invariance.INVARIANT
        assert verdict.normalized == tube


def test_translation_verdict_violated():
    assert translation_verdict(parse("((z1 - cz1)/(2*i))^2 + z2^2*cz2^2"), 2).status is Invariance.VIOLATED


def _admissible(results):
    return {(r.kind, r.swapped) for r in results if r.admissible}


def test_admissible_flow_types_for_the_ball(ball):
    admissible = _admissible(admissible_flow_types(ball))
    assert (FlowKind.TYPE1, False) in admissible
    assert (FlowKind.TYPE1, True) in admissible
    assert (FlowKind.TYPE4, False) in admissible
    assert not any(kind in (FlowKind.TYPE3, FlowKind.TYPE5) for kind, _ in admissible)


def test_admissible_flow_types_for_translation_in_z1():
    p = parse("((z1 - cz1)/(2*i))^2 + z2^2*cz2^2")
    admissible = _admissible(admissible_flow_types(p))
    assert (FlowKind.TYPE2B, False) in admissible
    assert (FlowKind.TYPE2A, False) in admissible
    assert (FlowKind.TYPE1, False) in admissible
    assert (FlowKind.TYPE2B, True) not in admissible


def test_admissible_flow_types_for_the_weighted_torus(weighted):
    results = admissible_flow_types(weighted)
    admissible = _admissible(results)
    assert admissible == {(FlowKind.TYPE4, False)}
    witness = next(r.witness for r in results if r.kind is FlowKind.TYPE4)
    assert witness == FlowSpec.type4(IMAG, gaussian(0, 3))


def test_admissible_flow_types_rejects_degenerate_input():
    with pytest.raises(DegeneratePolynomialError):
        admissible_flow_types(parse("z1*cz1"))


@st.composite
def polynomials_with_pure_terms(draw):
    """|z1|^4 + |z2|^4 plus real mixed terms of degree at most 3 in each variable."""
    total = parse("z1^2*cz1^2 + z2^2*cz2^2")
    for _ in range(draw(st.integers(0, 4))):
        j1 = draw(st.integers(0, 3))
        k1 = draw(st.integers(0, 3 - j1))
        j2 = draw(st.integers(0, 3))
        k2 = draw(st.integers(0, 3 - j2))
        if not j1 + k1:
            j1 = 1
        if not j2 + k2:
            k2 = 1
        term = RPoly({Monomial(j1, k1, j2, k2): draw(gaussian_coefficients(nonzero=True))})
        total = total + term + conjugate(term)
    return total


@pytest.mark.property_based
@given(polynomials_with_pure_terms())
@settings(max_examples=100, deadline=None)
def test_type5_is_never_admissible(p):
    results = admissible_flow_types(p)
    type5 = [r for r in results if r.kind is FlowKind.TYPE5]
    assert len(type5) == 2
    assert not any(r.admissible for r in type5)
    assert all(r.certificate for r in type5)
    assert not any(r.admissible for r in results if r.kind is FlowKind.TYPE3)


@pytest.mark.property_based
@given(real_polynomials(max_exponent=3, max_pairs=4), small_ints, small_ints)
@settings(max_examples=200, deadline=None)
def test_rotation_invariance_matches_constraint_rows(p, alpha, beta):
    annihilated = all(r1 * alpha + r2 * beta == 0 for r1, r2 in rotation_constraint_rows(p))
    verdict = invariance_constraint(p, rotation_field(alpha, beta))
    assert (verdict.status is Invariance.INVARIANT) is annihilated


shear_cases = [
    pytest.param("z2^2", IMAG, 0, FlowSpec.type1(IMAG), id="rotation"),
    pytest.param("z2", 1, 1, FlowSpec.type2a(1), id="rotation_and_translation"),
    pytest.param("z2^3", 0, 2, FlowSpec.type2b(), id="translation"),
    pytest.param("0", IMAG, 1, FlowSpec.type2a(IMAG), id="no_shear"),
]


@pytest.mark.parametrize(("q", "lam", "c_prime", "expected"), shear_cases)
def test_shear_normalize(q, lam, c_prime, expected):
    result = shear_normalize(parse(q), lam, c_prime)
    assert result.flow == expected
    assert result.verified
    assert result.conjugator == PolyMap(HoloPoly.coerce(z1() + parse(q)), z2())


def test_shear_normalize_without_shear_keeps_the_family():
    result = shear_normalize(parse("0"), IMAG, 1)
    assert result.conjugator == PolyMap.identity()
    assert result.original == result.normalized


def test_shear_normalize_rejects_trivial_family():
    with pytest.raises(InvalidFlowError):
        shear_normalize(parse("z2^2"), 0, 0)


def test_shear_normalize_rejects_q_in_z1():
    with pytest.raises(ValueError, match="z2 alone"):
        shear_normalize(parse("z1*z2"), 1, 0)


def test_admissible_pairs():
    assert len(admissible_pairs()) == 9
    assert admissible_pairs(model_only=True) == (("1", "1"), ("1", "2"), ("1", "4"), ("2", "2"), ("4", "4"))


def test_pair_check_rotation_and_torus():
    verdict = pair_check(FlowSpec.type1(IMAG), FlowSpec.type4(IMAG, gaussian(0, 2)))
    assert verdict.commute
    assert verdict.entry == ("1", "4")
    assert verdict.ga2_admissible
    assert verdict.model_admissible


def test_pair_check_type3_and_type5_of_equal_degree():
    verdict = pair_check(FlowSpec.type3(parse("z1^2")), FlowSpec.type5(1, 2))
    assert verdict.commute
    assert verdict.entry == ("3", "5")
    assert verdict.degree_condition is True
    assert verdict.ga2_admissible
    assert not verdict.model_admissible
    assert "pair cannot act on a rigid model" in verdict.reasons


def test_pair_check_translations_use_the_family_label():
    verdict = pair_check(FlowSpec.type2b(), FlowSpec.type2b(swapped=True))
    assert verdict.commute
    assert verdict.entry == ("2", "2")
    assert verdict.model_admissible


def test_pair_check_non_commuting_pair():
    verdict = pair_check(FlowSpec.type2b(), FlowSpec.type4(1, 1))
    assert not verdict.commute
    assert verdict.bracket == VField(parse("1"), parse("0"))
    assert not verdict.ga2_admissible
    assert verdict.entry is None


invalid_flows = [
    pytest.param(lambda: FlowSpec.type1(0), id="type1_zero_rate"),
    pytest.param(lambda: FlowSpec.type4(IMAG, 0), id="type4_zero_rate"),
    pytest.param(lambda: FlowSpec.type5(1, 0), id="type5_zero_degree"),
    pytest.param(lambda: FlowSpec.type3(parse("2*z1")), id="type3_not_monic"),
    pytest.param(lambda: FlowSpec.type3(parse("z1 + z2")), id="type3_depends_on_z2"),
    pytest.param(lambda: FlowSpec.type3(parse("1")), id="type3_constant"),
]


@pytest.mark.parametrize("build", invalid_flows)
def test_invalid_flow_data_raises(build):
    with pytest.raises(InvalidFlowError):
        build()


def test_model_violations():
    assert FlowSpec.type4(1, IMAG).model_violations() == ["a = 1 is not purely imaginary"]
    assert FlowSpec(FlowKind.TYPE2B, beta3=1).model_violations() == ["beta3 must vanish for type 2b"]
    assert FlowSpec.type1(IMAG, beta3=3).model_violations() == []


def test_flow_spec_str():
    assert str(FlowSpec.type4(IMAG, gaussian(0, 2))) == "Type4(a=i, b=2*i)"
    assert str(FlowSpec.type1(IMAG, swapped=True)) == "flip*Type1(b=i)*flip"
    assert str(FlowSpec.type2b()) == "Type2b()"


def test_flow_preserves_model(ball):
    assert flow_preserves_model(ball, FlowSpec.type4(IMAG, gaussian(0, 5))).status is Invariance.INVARIANT
    assert flow_preserves_model(ball, FlowSpec.type2b()).status is Invariance.INVARIANT_MOD_PLURIHARMONIC


@st.composite
def linear_flows(draw):
    kind = draw(st.sampled_from([FlowKind.TYPE1, FlowKind.TYPE2A, FlowKind.TYPE2B, FlowKind.TYPE4]))
    a, b = draw(gaussian_coefficients(nonzero=True)), draw(gaussian_coefficients(nonzero=True))
    swapped = draw(st.booleans())
    if kind is FlowKind.TYPE4:
        return FlowSpec.type4(a, b)
    if kind is FlowKind.TYPE2B:
        return FlowSpec.type2b(swapped=swapped)
    return FlowSpec(kind, b=b, swapped=swapped)


@st.composite
def invertible_matrices(draw):
    entries = [draw(gaussian_coefficients()) for _ in range(4)]
    assume(entries[0] * entries[3] - entries[1] * entries[2])
    return DomainMatrix([entries[:2], entries[2:]], (2, 2), QQ_I)


@pytest.mark.property_based
@given(linear_flows(), linear_flows(), invertible_matrices())
@settings(max_examples=50, deadline=None)
def test_linear_conjugation_acts_on_generators(f, g, matrix):
    x, y = generator(f), generator(g)
    moved_x, moved_y = conjugate_linear_field(matrix, x), conjugate_linear_field(matrix, y)
    assert pushforward_matches(linear_map(matrix), x, moved_x)
    assert lie_bracket(moved_x, moved_y) == conjugate_linear_field(matrix, lie_bracket(x, y))


@st.composite
def polynomial_fields(draw, max_degree=3):
    components = []
    for _ in range(2):
        total = RPoly.zero()
        for a in range(max_degree + 1):
            for b in range(max_degree + 1 - a):
                total = total + z1() ** a * z2() ** b * draw(gaussian_coefficients())
        components.append(HoloPoly.coerce(total))
    return VField(*components)


@pytest.mark.property_based
@given(polynomial_fields(), polynomial_fields(), polynomial_fields())
@settings(max_examples=30, deadline=None)
def test_bracket_is_antisymmetric_and_satisfies_jacobi(x, y, w):
    assert lie_bracket(x, y) == lie_bracket(y, x).scaled(-1)
    jacobi = lie_bracket(x, lie_bracket(y, w)) + lie_bracket(y, lie_bracket(w, x)) + lie_bracket(w, lie_bracket(x, y))
    assert not jacobi
