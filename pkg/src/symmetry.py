"""Symmetry detection on a rigid model 2 Re z3 + P(z1, z2) < 0 and its classification.

Continuous symmetries are read off P directly: the rotation torus from the
integer kernel of the phase rows, translations from formal shifts, and the
polynomial tangent fields from an exact linear solve. Discrete rotations and
explicit model maps are verified by exact exponent arithmetic and
substitution.
"""

import logging
import math
from dataclasses import dataclass, field

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ, QQ_I

from src.config import DEFAULT_TANGENT_DEGREE, ZN_MAX_ORDER
from src.decomposition import pluriharmonic_split
from src.finite_type import FiniteTypeVerdict, finite_type_necessary
from src.flows import (
    TranslationVerdict,
    VField,
    invariance_derivative,
    rotation_constraint_rows,
    translation_verdict,
)
from src.grading import InvalidWeightError, Weight, balanced_in_variable, is_balanced, monomial_weight, weighted_expansion
from src.linalg import integer_kernel, rational_nullspace
from src.polynomial import (
    HoloPoly,
    ModelMap,
    PolyMap,
    RPoly,
    gaussian,
    is_real,
    split_parts,
    substitute,
    twice_real_part,
    z1,
    z2,
)

logger = logging.getLogger(__name__)

THM3_ORDER = ("i", "ii", "iii")
THM2_ORDER = ("iii", "i", "iv", "ii")


class InvalidDomainError(ValueError):
    """Error when a model polynomial is not admissible as a domain."""

    def __init__(self, reason: str) -> None:
        super().__init__(f"invalid model domain: {reason}")


@dataclass(frozen=True)
class ModelDomain:
    """The rigid model {2 Re z3 + P < 0}: P real valued, parameter free, P(0) = 0."""

    p: RPoly
    assume_nondegenerate: bool = False

    def __post_init__(self) -> None:
        """Check that P is admissible.

        Raises:
            InvalidDomainError: If P has parameters, is not real valued or does not vanish at 0.
        """
        if self.p.has_parameters:
            msg = f"P must not involve formal parameters: {self.p}"
            raise InvalidDomainError(msg)
        if not is_real(self.p):
            msg = f"P is not real valued: {self.p}"
            raise InvalidDomainError(msg)
        if self.p.constant_term:
            msg = f"P must vanish at the origin, constant term {self.p.constant_term}"
            raise InvalidDomainError(msg)


@dataclass(frozen=True)
class WeightKernel:
    """Saturated integer basis of the rotation weights (alpha, beta) fixing P."""

    basis: list[tuple[int, int]]
    rows: list[tuple[int, int]] = field(default_factory=list)

    @property
    def rank(self) -> int:
        """Dimension of the rotation torus."""
        return len(self.basis)

    def annihilates(self, vector: tuple[int, int]) -> bool:
        """Whether (alpha, beta) solves every constraint row.

        Args:
            vector: The rotation weights (alpha, beta).

        Returns:
            True when every row is orthogonal to ``vector``.
        """
        return all(r1 * vector[0] + r2 * vector[1] == 0 for r1, r2 in self.rows)


def torus_weights(p: RPoly) -> WeightKernel:
    """Integer kernel of the phase rows of P.

    Each basis vector (alpha, beta) certifies the rotation field
    i*alpha*z1 d/dz1 + i*beta*z2 d/dz2 as tangent; rank 2 means P is
    extremely balanced.

    Args:
        p: The polynomial, usually with its pluriharmonic part removed.

    Returns:
        The kernel together with the rows it solves.
    """
    rows = rotation_constraint_rows(p)
    kernel = WeightKernel(integer_kernel(rows), rows)
    logger.debug("Rotation rows %s, kernel %s", rows, kernel.basis)
    return kernel


def translation_directions(p: RPoly) -> list[TranslationVerdict]:
    """Translation verdicts in the Re z1 and Re z2 directions, with shear certificates.

    Args:
        p: A real-valued polynomial.

    Returns:
        The verdicts for z1 and z2, in that order.
    """
    return [translation_verdict(p, which) for which in (1, 2)]


def zn_rotation_check(p: RPoly, a: int, b: int, order: int) -> bool:
    """Whether (z1, z2) -> (zeta^a z1, zeta^b z2), zeta a primitive order-th root of unity, fixes P.

    Args:
        p: The polynomial.
        a: Exponent acting on z1.
        b: Exponent acting on z2.
        order: The order N of zeta.

    Returns:
        True when every monomial of P is Z_N balanced.

    Raises:
        InvalidWeightError: If ``order`` < 1.
    """
    weight = Weight.cyclic_group(a, b, order)
    return all(is_balanced(m, weight) for m in p.monomials())


@dataclass(frozen=True)
class UnitaryVerdict:
    """Consequences of a discrete unitary symmetry (zeta^a z1, zeta^b z2)."""

    fixes: bool
    balanced: bool
    pure_parts_balanced: tuple[bool, bool]

    @property
    def passed(self) -> bool:
        """All three consequences hold."""
        return self.fixes and self.balanced and all(self.pure_parts_balanced)


_GAUSSIAN_ROOTS = {1: gaussian(1), 2: gaussian(-1), 4: gaussian(0, 1)}


def unitary_element_check(p: RPoly, a: int, b: int, order: int) -> UnitaryVerdict:
    """Check P against the rotation by (zeta^a, zeta^b): invariance, Z_N balance, balance of P1 in z1 and P2 in z2.

    Args:
        p: A real-valued polynomial.
        a: Exponent acting on z1.
        b: Exponent acting on z2.
        order: The order N of zeta.

    Returns:
        The verdict. For N in {1, 2, 4} the root of unity is a Gaussian
        rational and ``fixes`` is checked by substitution; otherwise it falls
        back to exponent bookkeeping.
    """
    weight = Weight.cyclic_group(a, b, order)
    zeta = _GAUSSIAN_ROOTS.get(order)
    if zeta is None:
        fixes = zn_rotation_check(p, a, b, order)
    else:
        rotation = PolyMap(HoloPoly.coerce(z1() * zeta**a), HoloPoly.coerce(z2() * zeta**b))
        fixes = substitute(p, rotation) == p
    balanced = all(is_balanced(m, weight) for m in p.monomials())
    parts = split_parts(p)
    pure_balanced = (
        all((m.j1 - m.k1) * a % order == 0 for m in parts.p1.monomials()),
        all((m.j2 - m.k2) * b % order == 0 for m in parts.p2.monomials()),
    )
    return UnitaryVerdict(fixes, balanced, pure_balanced)


def _generated_group(a: int, b: int, order: int) -> frozenset[tuple[MPQ, MPQ]]:
    return frozenset((QQ(k * a % order, order), QQ(k * b % order, order)) for k in range(order))


def _inside_torus(a: int, b: int, order: int, torus: WeightKernel) -> bool:
    if torus.rank == 2:
        return True
    if torus.rank == 0:
        return False
    v1, v2 = torus.basis[0]
    return (a * v2 - b * v1) % order == 0


def discrete_rotations(p: RPoly, torus: WeightKernel, max_order: int = ZN_MAX_ORDER) -> list[tuple[int, int, int]]:
    """Finite rotation groups fixing P that the rotation torus does not already contain.

    One generator (a, b, N) is reported per group, with 2 <= N <= max_order and
    gcd(a, b, N) = 1.

    Args:
        p: The polynomial.
        torus: Its rotation torus.
        max_order: Largest N searched.

    Returns:
        The generators in order of increasing N.
    """
    found: list[tuple[int, int, int]] = []
    seen: set[frozenset[tuple[MPQ, MPQ]]] = set()
    for order in range(2, max_order + 1):
        for a in range(order):
            for b in range(order):
                if math.gcd(a, b, order) != 1 or _inside_torus(a, b, order, torus):
                    continue
                group = _generated_group(a, b, order)
                if group in seen or not zn_rotation_check(p, a, b, order):
                    continue
                seen.add(group)
                found.append((a, b, order))
    logger.debug("Discrete rotations outside the torus: %s", found)
    return found


def _holomorphic_monomials(bound: int) -> list[HoloPoly]:
    return [HoloPoly.coerce(z1() ** i * z2() ** (total - i)) for total in range(bound + 1) for i in range(total, -1, -1)]


def tangent_fields(p: RPoly, degree_bound: int | None = DEFAULT_TANGENT_DEGREE) -> list[VField]:
    """Basis of the real space of polynomial tangent fields with constant drift.

    Solves 2 Re(X1 dP/dz1 + X2 dP/dz2) = 0 over the real and imaginary parts
    of the coefficients of X1, X2 (degree at most ``degree_bound``) together
    with a drift i*beta, by an exact rational nullspace. The drift never enters
    the equations, so the canonical field (0, 0, i) is always a solution.

    Args:
        p: A real-valued polynomial.
        degree_bound: Maximal degree of X1, X2; None means the degree of P.

    Returns:
        The basis, one VField per nullspace vector.

    Raises:
        ValueError: If ``degree_bound`` is negative.
    """
    bound = max(p.degree, 0) if degree_bound is None else degree_bound
    if bound < 0:
        msg = f"degree bound must be non-negative, got {bound}"
        raise ValueError(msg)
    zero = HoloPoly.coerce(RPoly.zero())
    unit = gaussian(0, 1)
    columns: list[VField] = []
    for monomial in _holomorphic_monomials(bound):
        rotated = HoloPoly.coerce(monomial * unit)
        columns.extend((VField(monomial, zero), VField(rotated, zero), VField(zero, monomial), VField(zero, rotated)))
    columns.append(VField.canonical())
    derivatives = [invariance_derivative(p, column).element for column in columns]
    keys = sorted({expv for derivative in derivatives for expv in derivative.monoms()})
    rows = []
    for expv in keys:
        coefficients = [derivative.get(expv, QQ_I.zero) for derivative in derivatives]
        rows.append([c.x for c in coefficients])
        rows.append([c.y for c in coefficients])
    solutions = []
    for vector in rational_nullspace(rows, len(columns)):
        solution = VField.zero()
        for weight, column in zip(vector, columns, strict=True):
            if weight:
                solution = solution + column.scaled(weight)
        solutions.append(solution)
    logger.info("Found %d tangent fields up to degree %d", len(solutions), bound)
    return solutions


@dataclass
class ClassificationReport:
    """Symmetry certificates of a model and the normal forms they realise.

    ``thm3_case`` is the first realised form of the three-dimensional
    classification in the order (i), (ii), (iii) and ``thm2_case`` the first of
    the one-parameter forms in the order (iii), (i), (iv), (ii); the candidate
    lists hold every realised form.
    """

    finite_type_necessary: FiniteTypeVerdict
    torus: WeightKernel | None = None
    translations: list[TranslationVerdict] = field(default_factory=list)
    zn_rotations: list[tuple[int, int, int]] = field(default_factory=list)
    thm3_case: str | None = None
    thm3_candidates: list[str] = field(default_factory=list)
    thm2_case: str | None = None
    thm2_candidates: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _mixed_weight_note(core: RPoly, torus: WeightKernel) -> str:
    mixed = split_parts(core).mixed
    if not mixed:
        return "M ≡ 0"
    if all(balanced_in_variable(m, 1) and balanced_in_variable(m, 2) for m in mixed.monomials()):
        return "M extremely balanced: the symmetry algebra has dimension at least 3"
    weight = next((v for v in torus.basis if v[0] and v[1]), None)
    return f"M not extremely balanced, balanced with respect to the weight {weight}"


def classify(domain: ModelDomain) -> ClassificationReport:
    """Classify a model by the normal forms its detected symmetries realise.

    Works up to pluriharmonic shears only: translations count when the
    shear-normalised P is invariant under them, rotations are read from the
    phase rows of the pluriharmonic-free part.

    Args:
        domain: The model.

    Returns:
        The report. A model failing the finite-type tests is reported
        unclassified with the reasons, unless ``assume_nondegenerate`` is set.
    """
    p = domain.p
    verdict = finite_type_necessary(p)
    if not verdict.passed and not domain.assume_nondegenerate:
        logger.info("Model %s left unclassified: %s", p, verdict.reasons)
        return ClassificationReport(verdict, notes=[f"unclassified: {'; '.join(verdict.reasons)}"])
    report = ClassificationReport(verdict)
    if not verdict.passed:
        report.notes.append("finite-type tests failed; classified because assume_nondegenerate is set")
    _, core = pluriharmonic_split(p)
    torus = torus_weights(core)
    report.torus = torus
    report.translations = translation_directions(p)
    report.zn_rotations = discrete_rotations(core, torus)

    genuine = [t.direction for t in report.translations if t.holds]
    rotates = {1: torus.annihilates((1, 0)), 2: torus.annihilates((0, 1))}
    translation_with_rotation = any(rotates[3 - which] for which in genuine)
    mixed_rotation = torus.rank == 2 or any(v[0] and v[1] for v in torus.basis)

    realised3 = {"i": len(genuine) == 2, "ii": translation_with_rotation, "iii": torus.rank == 2}
    report.thm3_candidates = [case for case in THM3_ORDER if realised3[case]]
    realised2 = {
        "iii": translation_with_rotation,
        "i": bool(genuine),
        "iv": mixed_rotation,
        "ii": rotates[1] or rotates[2],
    }
    report.thm2_candidates = [case for case in THM2_ORDER if realised2[case]]
    report.thm3_case = next(iter(report.thm3_candidates), None)
    report.thm2_case = next(iter(report.thm2_candidates), None)

    if len(report.thm3_candidates) > 1:
        report.notes.append(
            f"P realises the three-dimensional forms ({'), ('.join(report.thm3_candidates)}): "
            "the symmetry group is not abelian of dimension 3"
        )
        logger.warning("Ambiguous classification of %s: %s", p, report.thm3_candidates)
    if report.thm2_case == "iv":
        report.notes.append(_mixed_weight_note(core, torus))
    if report.thm2_case == "ii" and rotates[1] != rotates[2]:
        balanced_axis = 2 if rotates[2] else 1
        report.notes.append(f"P not balanced in z{3 - balanced_axis}")
    if not report.thm3_candidates and not report.thm2_candidates:
        report.notes.append("unclassified: no symmetry beyond the canonical translations detected")
    logger.info("Classified %s: thm3=%s thm2=%s", p, report.thm3_case, report.thm2_case)
    return report


@dataclass(frozen=True)
class MapVerdict:
    """Outcome of checking a model map; ``residual`` is P o 'g + 2 Re phi - mu P."""

    passed: bool
    residual: RPoly
    invertible: bool
    reasons: list[str] = field(default_factory=list)


def verify_model_map(domain: ModelDomain, g: ModelMap) -> MapVerdict:
    """Check that g = ('g, mu z3 + phi) maps the model onto itself.

    The identity P o 'g + 2 Re phi = mu P is checked exactly. A plane map
    whose Jacobian determinant is not a nonzero constant is flagged, and
    mu = 1 is enforced when P carries no pluriharmonic terms and 'g fixes
    the origin.

    Args:
        domain: The model.
        g: The model map.

    Returns:
        The verdict with its residual and the reasons for failure.
    """
    p = domain.p
    residual = substitute(p, g.plane) + twice_real_part(g.phi) - p * g.mu
    reasons = []
    invertible = g.plane.is_invertible_candidate
    if not invertible:
        reasons.append(f"plane map is not invertible: Jacobian determinant {g.plane.jacobian_determinant()}")
    if residual:
        reasons.append(f"nonzero residual {residual}")
    q, _ = pluriharmonic_split(p)
    if not q and g.plane.fixes_origin and g.mu != 1:
        reasons.append(f"mu = {g.mu} but P has no pluriharmonic terms and 'g fixes the origin, so mu must be 1")
    verdict = MapVerdict(passed=not reasons, residual=residual, invertible=invertible, reasons=reasons)
    logger.debug("Map verdict for %s: %s", g.plane, verdict.passed)
    return verdict


def map_weight(mapping: PolyMap, theta: Weight) -> MPQ | None:
    """The factor eta when every component of F is weighted homogeneous of weight eta * theta_i.

    Args:
        mapping: The plane map F.
        theta: A weight with both components positive.

    Returns:
        eta, or None when F is not weighted homogeneous in that sense.

    Raises:
        InvalidWeightError: If a weight component is not positive.
    """
    if not theta.is_positive:
        msg = f"map_weight needs positive weights, got {theta}"
        raise InvalidWeightError(msg)
    if mapping.f1.has_parameters or mapping.f2.has_parameters:
        return None
    eta = None
    for component, target in ((mapping.f1, theta.theta1), (mapping.f2, theta.theta2)):
        if not component:
            return None
        for monomial in component.monomials():
            ratio = monomial_weight(monomial, theta) / target
            if eta is None:
                eta = ratio
            elif ratio != eta:
                return None
    return eta


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of checking that a weighted homogeneous map carries one balanced model to another."""

    passed: bool
    residual: RPoly
    eta: MPQ | None
    reasons: list[str] = field(default_factory=list)


def _core_weights(p: RPoly, theta: Weight) -> set[MPQ]:
    _, core = pluriharmonic_split(p)
    return {weight for weight, _ in weighted_expansion(core, theta)}


def verify_equivalence(q1: RPoly, q2: RPoly, mapping: ModelMap, theta: Weight) -> EquivalenceVerdict:
    """Check Q2 o F' + 2 Re phi = a Q1 with F' weighted homogeneous for theta.

    Args:
        q1: Model polynomial of the source.
        q2: Model polynomial of the target.
        mapping: The map (F', a z3 + phi), with a stored as ``mu``.
        theta: Positive weight both models are balanced for.

    Returns:
        The verdict; it also requires the homogeneous weights of Q1 to be eta
        times those of Q2 (pluriharmonic terms ignored).

    Raises:
        InvalidWeightError: If a weight component is not positive.
    """
    residual = substitute(q2, mapping.plane) + twice_real_part(mapping.phi) - q1 * mapping.mu
    reasons = []
    if residual:
        reasons.append(f"nonzero residual {residual}")
    eta = map_weight(mapping.plane, theta)
    if eta is None:
        reasons.append("F' is not weighted homogeneous for the weight")
    elif _core_weights(q1, theta) != {eta * weight for weight in _core_weights(q2, theta)}:
        reasons.append(f"homogeneous weights of Q1 are not {eta} times those of Q2")
    return EquivalenceVerdict(not reasons, residual, eta, reasons)
