"""One-parameter subgroups of polynomial plane automorphisms and their generators.

Flows are described by normal-form data (``FlowSpec``) and handled through
their infinitesimal generators (``VField``): commutation is a vanishing Lie
bracket and invariance of a model is a derivation identity, so group
elements such as exp(lambda*s) are never evaluated. Normal forms:

    Type 1   (z1, exp(b s) z2)                 generator (0, b z2)
    Type 2a  (z1 + s, exp(b s) z2)             generator (1, b z2)
    Type 2b  (z1 + s, z2)                      generator (1, 0)
    Type 3   (z1, z2 + s p(z1))                generator (0, p(z1))
    Type 4   (exp(a s) z1, exp(b s) z2)        generator (a z1, b z2)
    Type 5   (exp(a s) z1, exp(a d s)(z2 + s z1^d))   generator (a z1, a d z2 + z1^d)

A ``swapped`` flow is the normal form conjugated by the flip (z1, z2) -> (z2, z1).
"""

import enum
import logging
from dataclasses import dataclass, field

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix

from src.decomposition import pluriharmonic_split
from src.finite_type import require_finite_type
from src.linalg import gaussian_matrix, integer_kernel
from src.polynomial import (
    HoloPoly,
    Monomial,
    PolyMap,
    RPoly,
    diff,
    format_coefficient,
    gaussian,
    integrate,
    parameter,
    require_real,
    shift_map,
    split_parts,
    substitute,
    twice_real_part,
    z1,
    z2,
)

logger = logging.getLogger(__name__)

Scalar = int | MPQ | GaussianRational


class InvalidFlowError(ValueError):
    """Error when flow data violate the side conditions of its normal form."""

    def __init__(self, reason: str) -> None:
        super().__init__(f"invalid flow: {reason}")


class FlowKind(enum.Enum):
    """The normal forms of one-parameter subgroups of plane automorphisms."""

    TYPE1 = "1"
    TYPE2A = "2a"
    TYPE2B = "2b"
    TYPE3 = "3"
    TYPE4 = "4"
    TYPE5 = "5"

    @property
    def family(self) -> str:
        """"2" for both translation kinds, the kind itself otherwise."""
        return "2" if self in (FlowKind.TYPE2A, FlowKind.TYPE2B) else self.value


def _holo(value: Scalar | RPoly) -> HoloPoly:
    if isinstance(value, RPoly):
        return HoloPoly.coerce(value)
    return HoloPoly.coerce(RPoly.constant(value))


@dataclass(frozen=True)
class FlowSpec:
    """Normal-form data of a one-parameter subgroup, with third-component drift i*beta3."""

    kind: FlowKind
    a: GaussianRational | None = None
    b: GaussianRational | None = None
    p: HoloPoly | None = None
    d: int | None = None
    beta3: MPQ = field(default_factory=lambda: QQ(0))
    swapped: bool = False

    def __post_init__(self) -> None:
        """Coerce the rates and drift to exact scalars, then check the side conditions."""
        for name in ("a", "b"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, QQ_I.convert(value))
        object.__setattr__(self, "beta3", QQ.convert(self.beta3))
        self._validate()

    def _validate(self) -> None:
        kind = self.kind
        if kind in (FlowKind.TYPE1, FlowKind.TYPE2A) and not self.b:
            msg = f"type {kind.value} needs a nonzero b"
            raise InvalidFlowError(msg)
        if kind is FlowKind.TYPE4 and not (self.a and self.b):
            msg = "type 4 needs nonzero a and b"
            raise InvalidFlowError(msg)
        if kind is FlowKind.TYPE5:
            if not self.a:
                msg = "type 5 needs a nonzero a"
                raise InvalidFlowError(msg)
            if self.d is None or self.d < 1:
                msg = f"type 5 needs a positive integer d, got {self.d}"
                raise InvalidFlowError(msg)
        if kind is FlowKind.TYPE3:
            if self.p is None:
                msg = "type 3 needs a polynomial p(z1)"
                raise InvalidFlowError(msg)
            p = HoloPoly.coerce(self.p)
            object.__setattr__(self, "p", p)
            if any(expv[2] for expv in p.element.monoms()) or p.has_parameters:
                msg = f"p must be a polynomial in z1 alone, got {p}"
                raise InvalidFlowError(msg)
            if p.degree < 1 or p.element.LC != QQ_I.one:
                msg = f"p must be monic of degree >= 1, got {p}"
                raise InvalidFlowError(msg)

    @classmethod
    def type1(cls, b: Scalar, *, swapped: bool = False, beta3: Scalar = 0) -> "FlowSpec":
        """Rotation of z2 alone: (z1, exp(b s) z2).

        Args:
            b: Nonzero rotation rate.
            swapped: Conjugate by the flip, rotating z1 instead.
            beta3: Real drift of the third component.

        Returns:
            The flow data.
        """
        return cls(FlowKind.TYPE1, b=b, beta3=beta3, swapped=swapped)

    @classmethod
    def type2a(cls, b: Scalar, *, swapped: bool = False) -> "FlowSpec":
        """Translation of z1 combined with a rotation of z2.

        Args:
            b: Nonzero rotation rate of z2.
            swapped: Conjugate by the flip.

        Returns:
            The flow data.
        """
        return cls(FlowKind.TYPE2A, b=b, swapped=swapped)

    @classmethod
    def type2b(cls, *, swapped: bool = False) -> "FlowSpec":
        """Pure translation z1 -> z1 + s.

        Args:
            swapped: Translate z2 instead.

        Returns:
            The flow data.
        """
        return cls(FlowKind.TYPE2B, swapped=swapped)

    @classmethod
    def type3(cls, p: RPoly, *, swapped: bool = False) -> "FlowSpec":
        """Shear z2 -> z2 + s p(z1).

        Args:
            p: Monic polynomial in z1 of degree at least 1.
            swapped: Conjugate by the flip.

        Returns:
            The flow data.
        """
        return cls(FlowKind.TYPE3, p=HoloPoly.coerce(p), swapped=swapped)

    @classmethod
    def type4(cls, a: Scalar, b: Scalar, *, beta3: Scalar = 0) -> "FlowSpec":
        """Diagonal flow (exp(a s) z1, exp(b s) z2).

        Args:
            a: Nonzero rate of z1.
            b: Nonzero rate of z2.
            beta3: Real drift of the third component.

        Returns:
            The flow data.
        """
        return cls(FlowKind.TYPE4, a=a, b=b, beta3=beta3)

    @classmethod
    def type5(cls, a: Scalar, d: int, *, swapped: bool = False, beta3: Scalar = 0) -> "FlowSpec":
        """Resonant flow (exp(a s) z1, exp(a d s)(z2 + s z1^d)).

        Args:
            a: Nonzero rate.
            d: Positive resonance degree.
            swapped: Conjugate by the flip.
            beta3: Real drift of the third component.

        Returns:
            The flow data.
        """
        return cls(FlowKind.TYPE5, a=a, d=d, beta3=beta3, swapped=swapped)

    def model_violations(self) -> list[str]:
        """Conditions a flow must meet to act on a rigid model but does not.

        Rotation parameters must be purely imaginary, and the translation-type
        kinds carry no drift.

        Returns:
            One message per violated condition.
        """
        violations = []
        rotation = {"b": self.b} if self.kind in (FlowKind.TYPE1, FlowKind.TYPE2A) else {}
        if self.kind in (FlowKind.TYPE4, FlowKind.TYPE5):
            rotation = {"a": self.a, "b": self.b}
        for name, value in rotation.items():
            if value is not None and value.x:
                violations.append(f"{name} = {format_coefficient(value)} is not purely imaginary")
        if self.kind in (FlowKind.TYPE2A, FlowKind.TYPE2B, FlowKind.TYPE3) and self.beta3:
            violations.append(f"beta3 must vanish for type {self.kind.value}")
        return violations

    def __str__(self) -> str:
        """Compact form such as ``Type4(a=i, b=2*i)``."""
        params = []
        for name in ("a", "b"):
            value = getattr(self, name)
            if value is not None:
                params.append(f"{name}={format_coefficient(value)}")
        if self.p is not None:
            params.append(f"p={self.p}")
        if self.d is not None:
            params.append(f"d={self.d}")
        if self.beta3:
            params.append(f"beta3={self.beta3}")
        label = f"Type{self.kind.value}({', '.join(params)})"
        return f"flip*{label}*flip" if self.swapped else label


@dataclass(frozen=True)
class VField:
    """Holomorphic vector field x1 d/dz1 + x2 d/dz2 + drift d/dz3 with constant drift."""

    x1: HoloPoly
    x2: HoloPoly
    drift: GaussianRational = field(default_factory=lambda: QQ_I.zero)

    def __post_init__(self) -> None:
        """Coerce the components to HoloPoly and the drift to QQ(i)."""
        object.__setattr__(self, "x1", _holo(self.x1))
        object.__setattr__(self, "x2", _holo(self.x2))
        object.__setattr__(self, "drift", QQ_I.convert(self.drift))

    @classmethod
    def canonical(cls) -> "VField":
        """The generator of the translations z3 -> z3 + it.

        Returns:
            The field (0, 0, i).
        """
        return cls(_holo(0), _holo(0), gaussian(0, 1))

    @classmethod
    def zero(cls) -> "VField":
        """The zero field.

        Returns:
            (0, 0, 0).
        """
        return cls(_holo(0), _holo(0))

    def __bool__(self) -> bool:
        """False only for the zero field."""
        return bool(self.x1) or bool(self.x2) or bool(self.drift)

    def __add__(self, other: "VField") -> "VField":
        """Componentwise sum."""
        return VField(_holo(self.x1 + other.x1), _holo(self.x2 + other.x2), self.drift + other.drift)

    def __sub__(self, other: "VField") -> "VField":
        """Componentwise difference."""
        return VField(_holo(self.x1 - other.x1), _holo(self.x2 - other.x2), self.drift - other.drift)

    def scaled(self, factor: Scalar) -> "VField":
        """Multiply every component by a scalar.

        Args:
            factor: Integer, rational or Gaussian rational.

        Returns:
            The scaled field.
        """
        c = QQ_I.convert(factor)
        return VField(_holo(self.x1 * c), _holo(self.x2 * c), self.drift * c)

    def __str__(self) -> str:
        """Printer form ``(x1, x2, drift)``."""
        return f"({self.x1}, {self.x2}, {format_coefficient(self.drift)})"


def generator(f: FlowSpec) -> VField:
    """Infinitesimal generator of a flow, the derivative at s = 0.

    Args:
        f: The flow.

    Returns:
        The vector field, with drift i*beta3.
    """
    drift = gaussian(0, f.beta3)
    if f.kind is FlowKind.TYPE1:
        x1, x2 = _holo(0), _holo(z2() * f.b)
    elif f.kind is FlowKind.TYPE2A:
        x1, x2 = _holo(1), _holo(z2() * f.b)
    elif f.kind is FlowKind.TYPE2B:
        x1, x2 = _holo(1), _holo(0)
    elif f.kind is FlowKind.TYPE3:
        x1, x2 = _holo(0), HoloPoly.coerce(f.p)
    elif f.kind is FlowKind.TYPE4:
        x1, x2 = _holo(z1() * f.a), _holo(z2() * f.b)
    else:
        x1 = _holo(z1() * f.a)
        x2 = _holo(z2() * (f.a * QQ_I.convert(f.d)) + z1() ** f.d)
    field_ = VField(x1, x2, drift)
    if f.swapped:
        flip = PolyMap.flip()
        field_ = VField(_holo(substitute(field_.x2, flip)), _holo(substitute(field_.x1, flip)), drift)
    return field_


def lie_bracket(x: VField, y: VField) -> VField:
    """[X, Y] = (X . grad) Y - (Y . grad) X on the plane components; drifts bracket to 0.

    Args:
        x: First field.
        y: Second field.

    Returns:
        The bracket, with zero drift.
    """
    components = []
    for target_x, target_y in ((x.x1, y.x1), (x.x2, y.x2)):
        term = (
            x.x1 * diff(target_y, "z1")
            + x.x2 * diff(target_y, "z2")
            - y.x1 * diff(target_x, "z1")
            - y.x2 * diff(target_x, "z2")
        )
        components.append(_holo(term))
    return VField(components[0], components[1])


def _as_field(flow: "FlowSpec | VField") -> VField:
    return generator(flow) if isinstance(flow, FlowSpec) else flow


def commutes(f: "FlowSpec | VField", g: "FlowSpec | VField") -> bool:
    """Whether two flows (or generators) commute, i.e. their bracket vanishes.

    Args:
        f: A flow or its generator.
        g: A flow or its generator.

    Returns:
        True when [f, g] = 0.
    """
    return not lie_bracket(_as_field(f), _as_field(g))


class Invariance(enum.Enum):
    """How a model responds to a flow."""

    INVARIANT = "invariant"
    INVARIANT_MOD_PLURIHARMONIC = "invariant_mod_pluriharmonic"
    VIOLATED = "violated"


@dataclass(frozen=True)
class InvarianceVerdict:
    """Invariance status, with the pluriharmonic certificate psi or the offending residual."""

    status: Invariance
    psi: HoloPoly | None = None
    residual: RPoly | None = None

    @property
    def holds(self) -> bool:
        """Invariant, exactly or up to a pluriharmonic term."""
        return self.status is not Invariance.VIOLATED


def invariance_derivative(p: RPoly, x: VField) -> RPoly:
    """V = 2 Re(x1 dP/dz1 + x2 dP/dz2), the derivative of P along the flow of x.

    Args:
        p: The model polynomial.
        x: The generator.

    Returns:
        The real polynomial V.
    """
    return twice_real_part(x.x1 * diff(p, "z1") + x.x2 * diff(p, "z2"))


def invariance_constraint(p: RPoly, x: VField) -> InvarianceVerdict:
    """Decide whether the flow of x preserves P, exactly or up to a pluriharmonic term.

    Args:
        p: A real-valued polynomial.
        x: The generator.

    Returns:
        INVARIANT when V = 0, INVARIANT_MOD_PLURIHARMONIC with V = 2 Re psi,
        VIOLATED with the non-pluriharmonic part of V otherwise.

    Raises:
        NotRealValuedError: If ``p`` is not real valued.
    """
    require_real(p)
    derivative = invariance_derivative(p, x)
    if not derivative:
        return InvarianceVerdict(Invariance.INVARIANT)
    psi, residual = pluriharmonic_split(derivative)
    if not residual:
        return InvarianceVerdict(Invariance.INVARIANT_MOD_PLURIHARMONIC, psi=psi)
    return InvarianceVerdict(Invariance.VIOLATED, residual=residual)


def rotation_constraint_rows(p: RPoly) -> list[tuple[int, int]]:
    """The distinct phase rows (j1 - k1, j2 - k2) of the monomials of P, sorted.

    Args:
        p: The polynomial.

    Returns:
        The sorted distinct rows.
    """
    return sorted({m.rotation_row for m in p.monomials()})


def rotation_field(alpha: Scalar, beta: Scalar) -> VField:
    """The rotation generator i*alpha*z1 d/dz1 + i*beta*z2 d/dz2.

    Args:
        alpha: Real rate of z1.
        beta: Real rate of z2.

    Returns:
        The generator.
    """
    return VField(_holo(z1() * gaussian(0, alpha)), _holo(z2() * gaussian(0, beta)))


def translation_field(which: int) -> VField:
    """The generator d/dz_which of real translations in z_which.

    Args:
        which: 1 or 2.

    Returns:
        The constant field.
    """
    one, zero = _holo(1), _holo(0)
    return VField(one, zero) if which == 1 else VField(zero, one)


@dataclass(frozen=True)
class TranslationVerdict:
    """Translation invariance of P in the Re z_which direction.

    For INVARIANT_MOD_PLURIHARMONIC, ``psi`` satisfies V = 2 Re psi, ``shear``
    is its z_which-antiderivative, and ``normalized`` = P - 2 Re(shear) is
    invariant under the translation itself.
    """

    direction: int
    status: Invariance
    psi: HoloPoly | None = None
    shear: HoloPoly | None = None
    normalized: RPoly | None = None

    @property
    def holds(self) -> bool:
        """Translation invariant, exactly or after the shear."""
        return self.status is not Invariance.VIOLATED


def translation_verdict(p: RPoly, which: int) -> TranslationVerdict:
    """Check P(z_which + s) - P against 0 and against pluriharmonic families in s.

    Args:
        p: A real-valued polynomial.
        which: 1 or 2.

    Returns:
        The verdict with its shear certificate.
    """
    shift = shift_map(which, parameter("s"))
    difference = substitute(p, shift) - p
    if not difference:
        return TranslationVerdict(which, Invariance.INVARIANT, normalized=p)
    _, residual = pluriharmonic_split(difference)
    if residual:
        return TranslationVerdict(which, Invariance.VIOLATED)
    psi, _ = pluriharmonic_split(invariance_derivative(p, translation_field(which)))
    shear = integrate(psi, f"z{which}")
    normalized = p - twice_real_part(shear)
    if substitute(normalized, shift) != normalized:
        logger.warning("Shear by %s does not remove the Re z%d dependence of %s", shear, which, p)
        return TranslationVerdict(which, Invariance.VIOLATED, psi=psi, shear=shear)
    return TranslationVerdict(which, Invariance.INVARIANT_MOD_PLURIHARMONIC, psi, shear, normalized)


@dataclass(frozen=True)
class FlowAdmissibility:
    """Whether a normal form can act on the model, with a witness flow or a certificate of impossibility."""

    kind: FlowKind
    swapped: bool
    admissible: bool
    reason: str
    witness: FlowSpec | None = None
    certificate: str = ""


def _pure_monomial(part: RPoly) -> Monomial | None:
    return next((m for m in part.monomials() if not m.is_constant), None)


def admissible_flow_types(p: RPoly) -> list[FlowAdmissibility]:
    """Report which normal forms can occur as symmetries of the model of P.

    Rotation-type kinds are decided on the integer kernel of the phase rows of
    the pluriharmonic-free part, translation-type kinds by translation
    invariance up to pluriharmonic terms. Types 3 and 5 never act on a
    finite-type model.

    Args:
        p: A real-valued polynomial passing the necessary finite-type tests.

    Returns:
        One entry per normal form and orientation.

    Raises:
        DegeneratePolynomialError: If P fails the necessary finite-type tests.
    """
    require_finite_type(p)
    _, core = pluriharmonic_split(p)
    rows = rotation_constraint_rows(core)
    kernel = integer_kernel(rows)

    def annihilates(vector: tuple[int, int]) -> bool:
        return all(r1 * vector[0] + r2 * vector[1] == 0 for r1, r2 in rows)

    translations = {which: translation_verdict(p, which) for which in (1, 2)}
    results = []
    for swapped, axis in ((False, 2), (True, 1)):
        unit = (0, 1) if axis == 2 else (1, 0)
        rotates = annihilates(unit)
        results.append(
            FlowAdmissibility(
                FlowKind.TYPE1,
                swapped,
                rotates,
                f"rotation of z{axis} {'preserves' if rotates else 'does not preserve'} P modulo pluriharmonic terms",
                FlowSpec.type1(gaussian(0, 1), swapped=swapped) if rotates else None,
            )
        )
    mixed = [v for v in kernel if v[0] and v[1]] or ([(1, 1)] if len(kernel) == 2 else [])
    results.append(
        FlowAdmissibility(
            FlowKind.TYPE4,
            False,
            bool(mixed),
            f"kernel vector {mixed[0]} of the phase rows" if mixed else "no kernel vector with both entries nonzero",
            FlowSpec.type4(gaussian(0, mixed[0][0]), gaussian(0, mixed[0][1])) if mixed else None,
        )
    )
    for swapped, axis in ((False, 1), (True, 2)):
        other = 2 if axis == 1 else 1
        translates = translations[axis].holds
        results.append(
            FlowAdmissibility(
                FlowKind.TYPE2B,
                swapped,
                translates,
                f"translation in Re z{axis}: {translations[axis].status.value}",
                FlowSpec.type2b(swapped=swapped) if translates else None,
            )
        )
        rotates_other = annihilates((0, 1) if other == 2 else (1, 0))
        both = translates and rotates_other
        results.append(
            FlowAdmissibility(
                FlowKind.TYPE2A,
                swapped,
                both,
                f"translation in Re z{axis} {'with' if both else 'and'} rotation of z{other}"
                + ("" if both else " not both available"),
                FlowSpec.type2a(gaussian(0, 1), swapped=swapped) if both else None,
            )
        )
    parts = split_parts(core)
    for swapped, part, axis in ((False, parts.p2, 2), (True, parts.p1, 1)):
        results.append(
            FlowAdmissibility(
                FlowKind.TYPE3,
                swapped,
                False,
                "invariance forces a complex curve into the boundary",
            )
        )
        witness = _pure_monomial(part)
        results.append(
            FlowAdmissibility(
                FlowKind.TYPE5,
                swapped,
                False,
                f"z{axis}-pure monomials force every coefficient of the invariance identity to vanish",
                certificate=str(witness) if witness is not None else "",
            )
        )
    logger.info("Admissible flow kinds: %s", sorted({r.kind.value for r in results if r.admissible}))
    return results


PAIR_TABLE = (
    ("1", "1"),
    ("1", "2"),
    ("1", "4"),
    ("2", "2"),
    ("4", "4"),
    ("2b", "3"),
    ("3", "3"),
    ("3", "5"),
    ("5", "5"),
)
MODEL_PAIR_TABLE = PAIR_TABLE[:5]


def admissible_pairs(*, model_only: bool = False) -> tuple[tuple[str, str], ...]:
    """Unordered kind pairs realised by commuting one-parameter subgroups.

    Args:
        model_only: Restrict to the pairs that can act on a rigid model.

    Returns:
        The pairs as tuples of kind labels.
    """
    return MODEL_PAIR_TABLE if model_only else PAIR_TABLE


def _label_matches(kind: FlowKind, label: str) -> bool:
    return label in (kind.value, kind.family)


def _table_entry(f: FlowSpec, g: FlowSpec) -> tuple[str, str] | None:
    for entry in PAIR_TABLE:
        first, second = entry
        if (_label_matches(f.kind, first) and _label_matches(g.kind, second)) or (
            _label_matches(g.kind, first) and _label_matches(f.kind, second)
        ):
            return entry
    return None


@dataclass(frozen=True)
class PairVerdict:
    """Commutation and table membership of a pair of flows."""

    commute: bool
    bracket: VField
    ga2_admissible: bool
    model_admissible: bool
    entry: tuple[str, str] | None = None
    degree_condition: bool | None = None
    reasons: list[str] = field(default_factory=list)


def pair_check(f: FlowSpec, g: FlowSpec) -> PairVerdict:
    """Check that two flows commute and that their kinds form an admissible pair.

    The pairs {3, 5} and {5, 5} additionally need equal degrees (deg p = d,
    respectively equal d).

    Args:
        f: First flow.
        g: Second flow.

    Returns:
        The verdict, with the bracket when the flows do not commute.
    """
    bracket = lie_bracket(generator(f), generator(g))
    if bracket:
        return PairVerdict(False, bracket, False, False, reasons=[f"generators do not commute, bracket {bracket}"])
    entry = _table_entry(f, g)
    reasons = []
    degree_condition = None
    if entry == ("3", "5"):
        type3, type5 = (f, g) if f.kind is FlowKind.TYPE3 else (g, f)
        degree_condition = type3.p is not None and type3.p.degree == type5.d
    elif entry == ("5", "5"):
        degree_condition = f.d == g.d
    if degree_condition is False:
        reasons.append("the pair needs equal degrees")
    if entry is None:
        reasons.append(f"kinds {{{f.kind.value}, {g.kind.value}}} do not form a listed pair")
    ga2 = entry is not None and degree_condition is not False
    model = ga2 and entry in MODEL_PAIR_TABLE
    if ga2 and not model:
        reasons.append("pair cannot act on a rigid model")
    return PairVerdict(True, bracket, ga2, model, entry, degree_condition, reasons)


def linear_map(matrix: DomainMatrix) -> PolyMap:
    """The plane map z -> H z for a 2x2 matrix H.

    Args:
        matrix: The matrix H.

    Returns:
        The linear plane map.
    """
    (h11, h12), (h21, h22) = gaussian_matrix(matrix).to_list()
    return PolyMap(_holo(z1() * h11 + z2() * h12), _holo(z1() * h21 + z2() * h22))


def pushforward_matches(mapping: PolyMap, y: VField, x: VField) -> bool:
    """Whether X o E = DE . Y, i.e. E carries the field Y to the field X (drifts equal).

    Args:
        mapping: The map E.
        y: Field on the source side.
        x: Field on the target side.

    Returns:
        True when the identity holds exactly.
    """
    if y.drift != x.drift:
        return False
    for component, target in ((mapping.f1, x.x1), (mapping.f2, x.x2)):
        pushed = diff(component, "z1") * y.x1 + diff(component, "z2") * y.x2
        if substitute(target, mapping) != pushed:
            return False
    return True


def conjugate_linear_field(matrix: DomainMatrix, x: VField) -> VField:
    """Push X forward by the invertible linear map z -> H z: the field H X(H^-1 w).

    Args:
        matrix: The invertible matrix H.
        x: The field to move.

    Returns:
        The pushed-forward field, drift unchanged.
    """
    h = gaussian_matrix(matrix)
    inverse = linear_map(h.inv())
    moved = (substitute(x.x1, inverse), substitute(x.x2, inverse))
    (h11, h12), (h21, h22) = h.to_list()
    return VField(_holo(moved[0] * h11 + moved[1] * h12), _holo(moved[0] * h21 + moved[1] * h22), x.drift)


@dataclass(frozen=True)
class ShearNormalization:
    """An elementary conjugator E_q = (z1 + q(z2), z2) and the normal form it produces."""

    conjugator: PolyMap
    flow: FlowSpec
    original: VField
    normalized: VField
    verified: bool


def shear_normalize(q: RPoly, lam: Scalar, c_prime: Scalar) -> ShearNormalization:
    """Normalise the family (z1 + q(exp(lam t) z2) - q(z2) + c' t, exp(lam t) z2).

    Its generator X = (lam z2 q'(z2) + c', lam z2) is carried by E_q to
    Y = (c', lam z2); the identity X o E_q = DE_q . Y is checked exactly.

    Args:
        q: Holomorphic polynomial in z2.
        lam: Rotation rate lambda.
        c_prime: Translation rate c'.

    Returns:
        The conjugator and the normal form: type 2a with b = lam/c' when both
        rates are nonzero, type 2b when lam = 0, type 1 with b = lam when c' = 0.

    Raises:
        InvalidFlowError: If both rates vanish.
        ValueError: If ``q`` involves z1.
    """
    q_holo = HoloPoly.coerce(q)
    if any(expv[0] for expv in q_holo.element.monoms()):
        msg = f"q must be a polynomial in z2 alone, got {q}"
        raise ValueError(msg)
    lam_c, c_c = QQ_I.convert(lam), QQ_I.convert(c_prime)
    original = VField(_holo(z2() * diff(q_holo, "z2") * lam_c + c_c), _holo(z2() * lam_c))
    normalized = VField(_holo(c_c), _holo(z2() * lam_c))
    conjugator = PolyMap(_holo(z1() + q_holo), z2())
    if lam_c and c_c:
        flow = FlowSpec.type2a(lam_c / c_c)
    elif c_c:
        flow = FlowSpec.type2b()
    elif lam_c:
        flow = FlowSpec.type1(lam_c)
    else:
        msg = "lambda and c' both vanish: the family is trivial"
        raise InvalidFlowError(msg)
    verified = pushforward_matches(conjugator, normalized, original)
    logger.debug("Shear %s normalises %s to %s (verified=%s)", conjugator, original, flow, verified)
    return ShearNormalization(conjugator, flow, original, normalized, verified)


def flow_preserves_model(p: RPoly, f: FlowSpec) -> InvarianceVerdict:
    """Invariance of the model of P under the flow f (drift contributes Re(i*beta3) = 0).

    Args:
        p: The model polynomial.
        f: The flow.

    Returns:
        The invariance verdict of its generator.
    """
    return invariance_constraint(p, generator(f))


