"""Exact sparse polynomials in the conjugate-variable alphabet z1, cz1, z2, cz2.

Coefficients are Gaussian rationals (sympy's ``QQ_I``); the formal real
parameters s, t, n are adjoined as commuting self-conjugate indeterminates so
that identities depending on a flow time or a shift can be checked as
polynomial identities. All values are immutable once built.

The module houses the ring itself, the ``Monomial``/``RPoly``/``HoloPoly``
value types, polynomial self-maps of the plane (``PolyMap``) and their rigid
lifts (``ModelMap``), and the basic operations every other module builds on:
conjugation, the reality test, substitution, the P1 + M + P2 split and mixed
second derivatives.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import Union

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring

from src.config import PARAMETER_NAMES, VARIABLE_NAMES, max_terms

logger = logging.getLogger(__name__)

RING, *_GENERATORS = ring(",".join(VARIABLE_NAMES + PARAMETER_NAMES), QQ_I, grlex)
GENERATORS = dict(zip(VARIABLE_NAMES + PARAMETER_NAMES, _GENERATORS, strict=True))
N_VARIABLES = len(VARIABLE_NAMES)

Scalar = Union[int, MPQ, GaussianRational]


class TermLimitExceededError(ValueError):
    """Error when a product or substitution grows past the configured term cap."""

    def __init__(self, terms: int, limit: int) -> None:
        super().__init__(f"polynomial with {terms} terms exceeds the cap of {limit} terms")
        self.terms = terms
        self.limit = limit


class NotHolomorphicError(ValueError):
    """Error when a holomorphic polynomial is expected but conjugate variables occur."""

    def __init__(self, text: str) -> None:
        super().__init__(f"polynomial is not holomorphic: {text}")


class NotRealValuedError(ValueError):
    """Error when a real-valued polynomial is required."""

    def __init__(self, text: str) -> None:
        super().__init__(f"polynomial is not real valued: {text}")


def gaussian(real: Scalar = 0, imag: Scalar = 0) -> GaussianRational:
    """Build the Gaussian rational real + i*imag.

    Args:
        real: Real part, an integer or exact rational (or a Gaussian rational, added as is).
        imag: Imaginary part, an integer or exact rational (or a Gaussian rational, multiplied by i).

    Returns:
        The exact element of QQ_I.
    """
    return QQ_I.convert(real) + QQ_I.convert(imag) * QQ_I.imag_unit


def rational(numerator: int, denominator: int = 1) -> MPQ:
    """Exact rational numerator/denominator.

    Args:
        numerator: Integer numerator.
        denominator: Nonzero integer denominator.

    Returns:
        The reduced rational.
    """
    return QQ(numerator, denominator)


def conjugate_coefficient(c: GaussianRational) -> GaussianRational:
    """Complex conjugate of a Gaussian rational.

    Args:
        c: The coefficient.

    Returns:
        c with the sign of its imaginary part flipped.
    """
    return QQ_I(c.x, -c.y)


def is_real_coefficient(c: GaussianRational) -> bool:
    """Whether a Gaussian rational has zero imaginary part.

    Args:
        c: The coefficient.

    Returns:
        True when ``c`` is a rational.
    """
    return not c.y


def format_rational(q: MPQ) -> str:
    """Printer form of a rational: ``p`` or ``p/q``.

    Args:
        q: The rational.

    Returns:
        Its shortest exact text form.
    """
    numerator, denominator = int(QQ.numer(q)), int(QQ.denom(q))
    return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"


def format_coefficient(c: GaussianRational) -> str:
    """Printer form of a Gaussian rational, parseable by the polynomial grammar.

    Args:
        c: The coefficient.

    Returns:
        ``a``, ``b*i`` or the parenthesised ``(a + b*i)``.
    """
    if not c.y:
        return format_rational(c.x)
    imag = "i" if c.y == 1 else "-i" if c.y == -1 else f"{format_rational(c.y)}*i"
    if not c.x:
        return imag
    sign = "-" if c.y < 0 else "+"
    magnitude = "i" if abs(c.y) == 1 else f"{format_rational(abs(c.y))}*i"
    return f"({format_rational(c.x)} {sign} {magnitude})"


def _check_terms(element: PolyElement) -> PolyElement:
    limit = max_terms()
    if len(element) > limit:
        raise TermLimitExceededError(len(element), limit)
    return element


def _bounded_product(left: PolyElement, right: PolyElement) -> PolyElement:
    """Multiply two ring elements without letting the product outgrow the term cap.

    When ``len(left) * len(right)`` fits under the cap the product is formed in
    one step. Otherwise ``left`` is multiplied by one term of ``right`` at a
    time and the running sum is checked after every row.

    Args:
        left: First factor.
        right: Second factor.

    Returns:
        The product ``left * right``.

    Raises:
        TermLimitExceededError: As soon as a partial product passes the cap.
    """
    if len(left) * len(right) <= max_terms():
        return left * right
    product = RING.zero
    for expv, coeff in right.terms():
        product = _check_terms(product + left * RING.term_new(expv, coeff))
    return product


def _bounded_power(base: PolyElement, exponent: int) -> PolyElement:
    result = RING.one
    for _ in range(exponent):
        result = _check_terms(_bounded_product(result, base))
    return result



@dataclass(frozen=True)
class Monomial:
    """Exponent data of z1^j1 * cz1^k1 * z2^j2 * cz2^k2 * (parameter powers).

    ``param_exps`` is kept canonical: sorted in ring order and free of zero
    exponents, so two equal monomials always compare equal.
    """

    j1: int = 0
    k1: int = 0
    j2: int = 0
    k2: int = 0
    param_exps: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        """Validate exponents and canonicalise the parameter part."""
        if min(self.j1, self.k1, self.j2, self.k2) < 0:
            msg = f"negative exponent in {self.j1, self.k1, self.j2, self.k2}"
            raise ValueError(msg)
        params = dict(self.param_exps)
        unknown = set(params) - set(PARAMETER_NAMES)
        if unknown:
            msg = f"unknown formal parameters: {sorted(unknown)}"
            raise ValueError(msg)
        if any(exp < 0 for exp in params.values()):
            msg = "negative parameter exponent"
            raise ValueError(msg)
        canonical = tuple((name, params[name]) for name in PARAMETER_NAMES if params.get(name))
        object.__setattr__(self, "param_exps", canonical)

    @classmethod
    def from_exponents(cls, expv: tuple[int, ...]) -> Monomial:
        """Build a monomial from a ring exponent vector.

    Args:
        expv: Exponents in ring order (z1, cz1, z2, cz2, s, t, n).

    Returns:
        The monomial with those exponents.
    """
        j1, k1, j2, k2 = expv[:N_VARIABLES]
        params = tuple((name, exp) for name, exp in zip(PARAMETER_NAMES, expv[N_VARIABLES:], strict=True) if exp)
        return cls(j1, k1, j2, k2, params)

    @property
    def exponents(self) -> tuple[int, ...]:
        """Ring exponent vector (z1, cz1, z2, cz2, s, t, n)."""
        params = dict(self.param_exps)
        return (self.j1, self.k1, self.j2, self.k2, *(params.get(name, 0) for name in PARAMETER_NAMES))

    @property
    def degree(self) -> int:
        """Total degree in the z-variables."""
        return self.j1 + self.k1 + self.j2 + self.k2

    @property
    def is_constant(self) -> bool:
        """Free of the z-variables."""
        return self.degree == 0

    @property
    def is_holomorphic(self) -> bool:
        """Nonconstant and free of cz1, cz2."""
        return not self.is_constant and self.k1 == self.k2 == 0

    @property
    def is_antiholomorphic(self) -> bool:
        """Nonconstant and free of z1, z2."""
        return not self.is_constant and self.j1 == self.j2 == 0

    @property
    def is_pure(self) -> bool:
        """Holomorphic or anti-holomorphic (and nonconstant)."""
        return self.is_holomorphic or self.is_antiholomorphic

    @property
    def is_mixed(self) -> bool:
        """Involves both z1 (or cz1) and z2 (or cz2)."""
        return self.j1 + self.k1 > 0 and self.j2 + self.k2 > 0

    @property
    def rotation_row(self) -> tuple[int, int]:
        """The phase exponents (j1 - k1, j2 - k2)."""
        return (self.j1 - self.k1, self.j2 - self.k2)

    def conjugate(self) -> Monomial:
        """The monomial with z_l and cz_l exponents swapped.

        Returns:
            The conjugate monomial.
        """
        return Monomial(self.k1, self.j1, self.k2, self.j2, self.param_exps)

    def __str__(self) -> str:
        """Printer form, ``1`` for the empty monomial."""
        return _format_monomial(self.exponents) or "1"


def _format_monomial(expv: tuple[int, ...]) -> str:
    names = VARIABLE_NAMES + PARAMETER_NAMES
    return "*".join(name if exp == 1 else f"{name}^{exp}" for name, exp in zip(names, expv, strict=True) if exp)


def _format_term(expv: tuple[int, ...], coeff: GaussianRational) -> tuple[bool, str]:
    """Split a term into (is_negative, unsigned body) for the printer."""
    monomial = _format_monomial(expv)
    if coeff.x and coeff.y:
        body = format_coefficient(coeff)
        return False, f"{body}*{monomial}" if monomial else body
    value = coeff.x if coeff.x else coeff.y
    negative = value < 0
    magnitude = abs(value)
    if coeff.x:
        scalar = "" if magnitude == 1 and monomial else format_rational(magnitude)
    else:
        scalar = "i" if magnitude == 1 else f"{format_rational(magnitude)}*i"
    pieces = [piece for piece in (scalar, monomial) if piece]
    return negative, "*".join(pieces)


class RPoly:
    """Real-analytic polynomial in z1, cz1, z2, cz2 (and the formal parameters).

    Wraps a canonical sparse ring element: no duplicate monomials and no stored
    zero coefficients, so equality of polynomials is equality of
    representations. Arithmetic never mutates an operand.
    """

    __slots__ = ("_element",)

    _element: PolyElement

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None) -> None:
        element = RING.zero
        for monomial, coeff in (terms or {}).items():
            element += RING.term_new(monomial.exponents, QQ_I.convert(coeff))
        self._element = element

    @classmethod
    def _wrap(cls, element: PolyElement) -> RPoly:
        poly = object.__new__(cls)
        poly._element = element
        return poly

    @classmethod
    def from_element(cls, element: PolyElement) -> RPoly:
        """Wrap a ring element, validating it for the subclass.

        Args:
            element: An element of the shared polynomial ring.

        Returns:
            The wrapped polynomial.
        """
        return cls._wrap(element)

    @classmethod
    def zero(cls) -> RPoly:
        """The zero polynomial.

        Returns:
            A polynomial with no terms.
        """
        return cls._wrap(RING.zero)

    @classmethod
    def one(cls) -> RPoly:
        """The constant polynomial 1.

        Returns:
            The multiplicative identity.
        """
        return cls._wrap(RING.one)

    @classmethod
    def constant(cls, value: Scalar) -> RPoly:
        """A constant polynomial.

        Args:
            value: Integer, rational or Gaussian rational.

        Returns:
            The polynomial equal to ``value``.
        """
        return cls._wrap(RING.ground_new(QQ_I.convert(value)))

    @classmethod
    def variable(cls, name: str) -> RPoly:
        """The generator called ``name`` (z1, cz1, z2, cz2 or a formal parameter).

        Args:
            name: Generator name.

        Returns:
            The generator as a polynomial.

        Raises:
            ValueError: If ``name`` is not a generator.
        """
        try:
            return cls._wrap(GENERATORS[name])
        except KeyError:
            msg = f"unknown variable {name!r}"
            raise ValueError(msg) from None

    @property
    def element(self) -> PolyElement:
        """The underlying sparse ring element (treat as read-only)."""
        return self._element

    def terms(self) -> dict[Monomial, GaussianRational]:
        """Terms in canonical (descending graded lexicographic) order.

        Returns:
            A mapping from monomial to nonzero coefficient.
        """
        return {Monomial.from_exponents(expv): coeff for expv, coeff in self._element.terms()}

    def monomials(self) -> Iterator[Monomial]:
        """Iterate over the support in canonical order.

        Yields:
            Each monomial with a nonzero coefficient.
        """
        for expv in self._element.monoms():
            yield Monomial.from_exponents(expv)

    def coefficient(self, monomial: Monomial) -> GaussianRational:
        """Coefficient of ``monomial``.

        Args:
            monomial: The monomial to look up.

        Returns:
            Its coefficient, zero when absent.
        """
        return self._element.get(monomial.exponents, QQ_I.zero)

    @property
    def degree(self) -> int:
        """Total degree in the z-variables (-1 for the zero polynomial)."""
        if not self._element:
            return -1
        return max(sum(expv[:N_VARIABLES]) for expv in self._element.monoms())

    @property
    def constant_term(self) -> GaussianRational:
        """Coefficient of the monomial 1."""
        return self._element.get(RING.zero_monom, QQ_I.zero)

    @property
    def is_constant(self) -> bool:
        """No generator occurs, parameters included."""
        return all(not any(expv) for expv in self._element.monoms())

    @property
    def is_holomorphic(self) -> bool:
        """Free of cz1 and cz2."""
        return all(expv[1] == expv[3] == 0 for expv in self._element.monoms())

    @property
    def has_parameters(self) -> bool:
        """Whether a formal parameter occurs."""
        return any(any(expv[N_VARIABLES:]) for expv in self._element.monoms())

    def _result_class(self, other: object) -> type[RPoly]:
        if isinstance(self, HoloPoly) and (isinstance(other, HoloPoly) or not isinstance(other, RPoly)):
            return HoloPoly
        return RPoly

    @staticmethod
    def _coerce(other: object) -> PolyElement | None:
        if isinstance(other, RPoly):
            return other.element
        if isinstance(other, (int, GaussianRational)) or QQ.of_type(other):
            return RING.ground_new(QQ_I.convert(other))
        return None

    def __add__(self, other: object) -> RPoly:
        """Sum with a polynomial or scalar."""
        element = self._coerce(other)
        if element is None:
            return NotImplemented
        return self._result_class(other)._wrap(self._element + element)

    __radd__ = __add__

    def __sub__(self, other: object) -> RPoly:
        """Difference with a polynomial or scalar."""
        element = self._coerce(other)
        if element is None:
            return NotImplemented
        return self._result_class(other)._wrap(self._element - element)

    def __rsub__(self, other: object) -> RPoly:
        """Scalar minus polynomial."""
        element = self._coerce(other)
        if element is None:
            return NotImplemented
        return self._result_class(other)._wrap(element - self._element)

    def __mul__(self, other: object) -> RPoly:
        """Product with a polynomial or scalar, bounded by the term cap."""
        element = self._coerce(other)
        if element is None:
            return NotImplemented
        return self._result_class(other)._wrap(_bounded_product(self._element, element))

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> RPoly:
        """Division by a nonzero constant."""
        if isinstance(other, RPoly):
            if not other.is_constant:
                return NotImplemented
            other = other.constant_term
        element = self._coerce(other)
        if element is None:
            return NotImplemented
        divisor = QQ_I.convert(other)
        if not divisor:
            msg = "division of a polynomial by zero"
            raise ZeroDivisionError(msg)
        return type(self)._wrap(self._element.quo_ground(divisor))

    def __neg__(self) -> RPoly:
        """Negation."""
        return type(self)._wrap(-self._element)

    def __pow__(self, exponent: int) -> RPoly:
        """Power by repeated multiplication, checked against the term cap at each step."""
        if not isinstance(exponent, int) or exponent < 0:
            msg = f"exponent must be a non-negative integer, got {exponent!r}"
            raise ValueError(msg)
        return type(self)._wrap(_bounded_power(self._element, exponent))

    def __eq__(self, other: object) -> bool:
        """Exact equality with a polynomial or scalar."""
        element = self._coerce(other)
        if element is None:
            return NotImplemented
        return bool(self._element == element)

    def __hash__(self) -> int:
        """Hash of the canonical term set."""
        return hash(frozenset(self._element.items()))

    def __bool__(self) -> bool:
        """False only for the zero polynomial."""
        return bool(self._element)

    def __len__(self) -> int:
        """Number of terms."""
        return len(self._element)

    def __str__(self) -> str:
        """Printer form, parseable by the polynomial grammar."""
        if not self._element:
            return "0"
        pieces: list[str] = []
        for index, (expv, coeff) in enumerate(self._element.terms()):
            negative, body = _format_term(expv, coeff)
            if index == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        """Class name around the printer form."""
        return f"{type(self).__name__}('{self}')"


class HoloPoly(RPoly):
    """A polynomial in z1, z2 (and formal parameters) only: no conjugate variables."""

    __slots__ = ()

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None) -> None:
        super().__init__(terms)
        if not self.is_holomorphic:
            raise NotHolomorphicError(str(self))

    @classmethod
    def from_element(cls, element: PolyElement) -> HoloPoly:
        """Wrap a ring element, checking that it is holomorphic.

        Args:
            element: An element of the shared polynomial ring.

        Returns:
            The wrapped holomorphic polynomial.
        """
        poly = RPoly._wrap(element)
        return cls.coerce(poly)

    @classmethod
    def coerce(cls, poly: RPoly) -> HoloPoly:
        """View an RPoly as a HoloPoly.

        Args:
            poly: Polynomial to view.

        Returns:
            ``poly`` itself when already holomorphic, or a HoloPoly sharing its terms.

        Raises:
            NotHolomorphicError: If a conjugate variable occurs in ``poly``.
        """
        if isinstance(poly, HoloPoly):
            return poly
        if not poly.is_holomorphic:
            raise NotHolomorphicError(str(poly))
        holo = object.__new__(cls)
        holo._element = poly.element
        return holo

    @classmethod
    def variable(cls, name: str) -> HoloPoly:
        """A holomorphic generator: z1, z2 or a formal parameter.

        Args:
            name: Generator name.

        Returns:
            The generator as a HoloPoly.

        Raises:
            NotHolomorphicError: For cz1 or cz2.
        """
        if name not in ("z1", "z2", *PARAMETER_NAMES):
            raise NotHolomorphicError(name)
        return cls.coerce(RPoly.variable(name))


def z1() -> HoloPoly:
    """The coordinate z1.

    Returns:
        z1 as a HoloPoly.
    """
    return HoloPoly.variable("z1")


def z2() -> HoloPoly:
    """The coordinate z2.

    Returns:
        z2 as a HoloPoly.
    """
    return HoloPoly.variable("z2")


def cz1() -> RPoly:
    """The conjugate coordinate cz1.

    Returns:
        cz1 as an RPoly.
    """
    return RPoly.variable("cz1")


def cz2() -> RPoly:
    """The conjugate coordinate cz2.

    Returns:
        cz2 as an RPoly.
    """
    return RPoly.variable("cz2")


def parameter(name: str) -> HoloPoly:
    """A formal real parameter (s, t or n).

    Args:
        name: Parameter name.

    Returns:
        The parameter as a HoloPoly.

    Raises:
        ValueError: If ``name`` is not a formal parameter.
    """
    if name not in PARAMETER_NAMES:
        msg = f"unknown formal parameter {name!r}"
        raise ValueError(msg)
    return HoloPoly.variable(name)


def conjugate(p: RPoly) -> RPoly:
    """Apply the reality involution: swap z_l with cz_l and conjugate coefficients.

    Formal parameters are real, so their exponents are left alone.

    Args:
        p: Any polynomial.

    Returns:
        The conjugate polynomial; ``conjugate(conjugate(p)) == p``.
    """
    swapped = {
        (expv[1], expv[0], expv[3], expv[2], *expv[N_VARIABLES:]): conjugate_coefficient(coeff)
        for expv, coeff in p.element.iterterms()
    }
    return RPoly.from_element(RING.from_dict(swapped))


def is_real(p: RPoly) -> bool:
    """Whether the reality involution fixes ``p``.

    Args:
        p: Any polynomial.

    Returns:
        True when ``p`` is real valued.
    """
    return conjugate(p) == p


def require_real(p: RPoly) -> None:
    """Raise NotRealValuedError unless ``p`` is real valued.

    Args:
        p: Any polynomial.

    Raises:
        NotRealValuedError: If ``conjugate(p) != p``.
    """
    if not is_real(p):
        raise NotRealValuedError(str(p))


def real_part(p: RPoly) -> RPoly:
    """Re p = (p + conj p) / 2.

    Args:
        p: Any polynomial.

    Returns:
        The real part, a real-valued polynomial.
    """
    return (p + conjugate(p)) / 2


def imaginary_part(p: RPoly) -> RPoly:
    """Im p = (p - conj p) / (2i).

    Args:
        p: Any polynomial.

    Returns:
        The imaginary part, a real-valued polynomial.
    """
    return (p - conjugate(p)) / gaussian(0, 2)


def twice_real_part(p: RPoly) -> RPoly:
    """2 Re p, the pluriharmonic polynomial attached to a holomorphic ``p``.

    Args:
        p: Any polynomial.

    Returns:
        p + conj p.
    """
    return p + conjugate(p)


def squared_modulus(p: RPoly) -> RPoly:
    """|p|^2 = p * conj p.

    Args:
        p: Any polynomial.

    Returns:
        The squared modulus.
    """
    return p * conjugate(p)


def diff(p: RPoly, name: str) -> RPoly:
    """Partial derivative with respect to the generator ``name``.

    Args:
        p: Polynomial to differentiate.
        name: Generator name, e.g. "cz2".

    Returns:
        The derivative, a HoloPoly when ``p`` is one.
    """
    result = RPoly.from_element(p.element.diff(GENERATORS[name]))
    return HoloPoly.coerce(result) if isinstance(p, HoloPoly) else result


def integrate(p: HoloPoly, name: str) -> HoloPoly:
    """Antiderivative with respect to the generator ``name`` with zero constant.

    Args:
        p: A polynomial (typically holomorphic).
        name: Generator name, e.g. "z1".

    Returns:
        The polynomial F with dF/d(name) = p and F vanishing when the generator does.
    """
    index = (VARIABLE_NAMES + PARAMETER_NAMES).index(name)
    integrated = {}
    for expv, coeff in p.element.iterterms():
        raised = list(expv)
        raised[index] += 1
        integrated[tuple(raised)] = coeff / QQ_I.convert(raised[index])
    return HoloPoly.from_element(RING.from_dict(integrated))


@dataclass(frozen=True)
class SplitParts:
    """P = constant + P1 + M + P2 with P1 in z1 only, P2 in z2 only, M mixed."""

    p1: RPoly
    mixed: RPoly
    p2: RPoly
    constant: RPoly

    def recombine(self) -> RPoly:
        """Sum the four parts.

        Returns:
            The polynomial that was split.
        """
        return self.constant + self.p1 + self.mixed + self.p2


def split_parts(p: RPoly) -> SplitParts:
    """Split a polynomial into its z1-only, mixed and z2-only parts.

    Formal parameters ride along with their monomials; terms free of the
    z-variables are reported separately as ``constant``.

    Args:
        p: The polynomial to split.

    Returns:
        The four parts; they recombine to ``p`` exactly and have disjoint supports.
    """
    buckets: dict[str, dict[tuple[int, ...], GaussianRational]] = {"p1": {}, "mixed": {}, "p2": {}, "constant": {}}
    for expv, coeff in p.element.iterterms():
        in_z1 = expv[0] + expv[1] > 0
        in_z2 = expv[2] + expv[3] > 0
        if in_z1 and in_z2:
            key = "mixed"
        elif in_z1:
            key = "p1"
        elif in_z2:
            key = "p2"
        else:
            key = "constant"
        buckets[key][expv] = coeff
    parts = {key: RPoly.from_element(RING.from_dict(terms)) for key, terms in buckets.items()}
    return SplitParts(**parts)


MIXED_PARTIAL_PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))


def mixed_partial(p: RPoly, pair: tuple[int, int]) -> RPoly:
    """Second derivative d^2 p / dz_j d(cz_k) for pair = (j, k).

    Args:
        p: Polynomial to differentiate.
        pair: The index pair (j, k) in {1, 2}^2.

    Returns:
        The mixed second partial.

    Raises:
        ValueError: If an index lies outside {1, 2}.
    """
    j, k = pair
    if j not in (1, 2) or k not in (1, 2):
        msg = f"index pair must lie in {{1,2}}^2, got {pair}"
        raise ValueError(msg)
    return diff(diff(p, f"z{j}"), f"cz{k}")


def mixed_partial_factor(pair: tuple[int, int], lam1: GaussianRational, lam2: GaussianRational) -> GaussianRational:
    """Chain-rule factor c with d^2(p o g) = c * (d^2 p) o g for g = (lam1*z1, lam2*z2).

    Args:
        pair: The index pair (j, k).
        lam1: Multiplier of z1.
        lam2: Multiplier of z2.

    Returns:
        lam_j * conj(lam_k).
    """
    lams = {1: QQ_I.convert(lam1), 2: QQ_I.convert(lam2)}
    j, k = pair
    return lams[j] * conjugate_coefficient(lams[k])


def check_mixed_partial_equivariance(p: RPoly, lam1: GaussianRational, lam2: GaussianRational) -> dict[tuple[int, int], bool]:
    """For g = (lam1*z1, lam2*z2), test c * (D^2 p) o g == D^2 p for the four index pairs.

    Args:
        p: The model polynomial.
        lam1: Multiplier of z1.
        lam2: Multiplier of z2.

    Returns:
        The outcome for each index pair.
    """
    rotation = PolyMap(HoloPoly.coerce(z1() * lam1), HoloPoly.coerce(z2() * lam2))
    results = {}
    for pair in MIXED_PARTIAL_PAIRS:
        second = mixed_partial(p, pair)
        factor = mixed_partial_factor(pair, lam1, lam2)
        results[pair] = substitute(second, rotation) * factor == second
    return results


@dataclass(frozen=True)
class PolyMap:
    """A polynomial self-map (z1, z2) -> (f1, f2) of the plane, possibly with formal parameters."""

    f1: HoloPoly
    f2: HoloPoly

    def __post_init__(self) -> None:
        """Coerce both components to HoloPoly."""
        object.__setattr__(self, "f1", HoloPoly.coerce(self.f1))
        object.__setattr__(self, "f2", HoloPoly.coerce(self.f2))

    @classmethod
    def identity(cls) -> PolyMap:
        """The identity map.

        Returns:
            (z1, z2).
        """
        return cls(z1(), z2())

    @classmethod
    def flip(cls) -> PolyMap:
        """The coordinate swap.

        Returns:
            (z2, z1).
        """
        return cls(z2(), z1())

    def compose(self, inner: PolyMap) -> PolyMap:
        """The composite self o inner.

        Args:
            inner: Map applied first.

        Returns:
            The composite plane map.
        """
        return PolyMap(
            HoloPoly.coerce(substitute(self.f1, inner)),
            HoloPoly.coerce(substitute(self.f2, inner)),
        )

    def jacobian_determinant(self) -> RPoly:
        """Formal Jacobian determinant of (f1, f2).

        Returns:
            df1/dz1 * df2/dz2 - df1/dz2 * df2/dz1.
        """
        return diff(self.f1, "z1") * diff(self.f2, "z2") - diff(self.f1, "z2") * diff(self.f2, "z1")

    @property
    def is_invertible_candidate(self) -> bool:
        """Whether the formal Jacobian determinant is a nonzero constant."""
        jacobian = self.jacobian_determinant()
        return bool(jacobian) and jacobian.is_constant

    @property
    def fixes_origin(self) -> bool:
        """Whether both components vanish at 0."""
        return not self.f1.constant_term and not self.f2.constant_term

    def __str__(self) -> str:
        """Printer form ``(f1, f2)``."""
        return f"({self.f1}, {self.f2})"


@dataclass(frozen=True)
class ModelMap:
    """g(z) = ('g(z1, z2), mu*z3 + phi(z1, z2)) with mu a nonzero real rational."""

    plane: PolyMap
    mu: MPQ = field(default_factory=lambda: QQ(1))
    phi: HoloPoly = field(default_factory=lambda: HoloPoly.coerce(RPoly.zero()))

    def __post_init__(self) -> None:
        """Coerce ``mu`` to a rational and ``phi`` to a HoloPoly.

        Raises:
            ValueError: If ``mu`` is zero.
        """
        mu = QQ.convert(self.mu)
        if not mu:
            msg = "mu must be nonzero"
            raise ValueError(msg)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "phi", HoloPoly.coerce(self.phi))

    @classmethod
    def identity(cls) -> ModelMap:
        """The identity model map.

        Returns:
            The identity plane map with mu = 1 and phi = 0.
        """
        return cls(PolyMap.identity())

    def compose(self, inner: ModelMap) -> ModelMap:
        """The composite self o inner.

        The third component is mu_self*(mu_inner*z3 + phi_inner) + phi_self('inner).

        Args:
            inner: Map applied first.

        Returns:
            The composite model map.
        """
        phi = inner.phi * QQ_I.convert(self.mu) + substitute(self.phi, inner.plane)
        return ModelMap(self.plane.compose(inner.plane), self.mu * inner.mu, HoloPoly.coerce(phi))


def substitute(p: RPoly, mapping: PolyMap) -> RPoly:
    """Compose ``p`` with a holomorphic plane map.

    z1, z2 are replaced by the map components and cz1, cz2 by their conjugates;
    formal parameters are real, so they pass through conjugation unchanged.

    Args:
        p: Polynomial to transform.
        mapping: The map (f1, f2), possibly depending on formal parameters.

    Returns:
        The exact composite p(f1, f2, conj f1, conj f2).

    Raises:
        TermLimitExceededError: If the composite exceeds the term cap.
    """
    images = [
        mapping.f1.element,
        conjugate(mapping.f1).element,
        mapping.f2.element,
        conjugate(mapping.f2).element,
    ]
    powers: list[list[PolyElement]] = [[RING.one] for _ in images]
    composite = RING.zero
    for expv, coeff in p.element.terms():
        term = RING.term_new((0,) * N_VARIABLES + expv[N_VARIABLES:], coeff)
        for index, exp in enumerate(expv[:N_VARIABLES]):
            cache = powers[index]
            while len(cache) <= exp:
                cache.append(_check_terms(_bounded_product(cache[-1], images[index])))
            term = _check_terms(_bounded_product(term, cache[exp]))
        composite = _check_terms(composite + term)
    logger.debug("Substituted %s into a %d-term polynomial, %d terms out", mapping, len(p), len(composite))
    result = RPoly.from_element(composite)
    return HoloPoly.coerce(result) if isinstance(p, HoloPoly) else result


def shift_map(which: int, amount: RPoly) -> PolyMap:
    """The translation z_which -> z_which + amount (amount holomorphic, e.g. a parameter).

    Args:
        which: 1 or 2.
        amount: Holomorphic shift.

    Returns:
        The translation as a plane map.

    Raises:
        ValueError: If ``which`` is neither 1 nor 2.
    """
    shift = HoloPoly.coerce(amount)
    if which == 1:
        return PolyMap(HoloPoly.coerce(z1() + shift), z2())
    if which == 2:
        return PolyMap(z1(), HoloPoly.coerce(z2() + shift))
    msg = f"variable index must be 1 or 2, got {which}"
    raise ValueError(msg)
