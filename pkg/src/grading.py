"""Weights, signatures, holomorphic quotients and the balancedness predicates.

A weight assigns rationals theta1, theta2 to z1, z2 together with the group
the rotations run over: the circle, the integers, or a cyclic group Z_N
(stored as an integer triple (a, b, N) meaning theta = (a/N, b/N)). Holomorphic
quotients are kept as exact positive ratios; "the average of the holomorphic
quotients is zero" becomes "the product of the ratios is one".
"""

import enum
import logging
import math
from collections import defaultdict
from collections.abc import Callable
from dataclasses import dataclass

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ

from src.polynomial import RING, Monomial, RPoly

logger = logging.getLogger(__name__)


class UndefinedGradeError(ValueError):
    """Error when grading a constant monomial."""

    def __init__(self) -> None:
        super().__init__("weight, signature and holomorphic quotient are undefined for a constant monomial")


class InvalidWeightError(ValueError):
    """Error when a weight violates the requirements of an operation."""

    def __init__(self, reason: str) -> None:
        super().__init__(f"invalid weight: {reason}")


class NotHomogeneousError(ValueError):
    """Error when a weighted homogeneous polynomial is required."""

    def __init__(self, text: str) -> None:
        super().__init__(f"polynomial is not weighted homogeneous: {text}")


class GroupKind(enum.Enum):
    """The group acting through the weight: S^1 (equivalently R), Z or Z_N."""

    CIRCLE = "circle"
    INTEGERS = "integers"
    CYCLIC = "cyclic"


@dataclass(frozen=True)
class Weight:
    """Weights (theta1, theta2) of z1, z2 and the acting group.

    For cyclic groups ``cyclic`` holds the integer triple (a, b, N) and the
    thetas are a/N and b/N.
    """

    theta1: MPQ
    theta2: MPQ
    group: GroupKind = GroupKind.CIRCLE
    cyclic: tuple[int, int, int] | None = None

    def __post_init__(self) -> None:
        """Coerce the thetas to rationals and check the cyclic data.

        Raises:
            InvalidWeightError: If cyclic data is given for a non-cyclic group or missing for a cyclic one.
        """
        object.__setattr__(self, "theta1", QQ.convert(self.theta1))
        object.__setattr__(self, "theta2", QQ.convert(self.theta2))
        if (self.group is GroupKind.CYCLIC) != (self.cyclic is not None):
            msg = "cyclic data (a, b, N) is required exactly for the cyclic group"
            raise InvalidWeightError(msg)

    @classmethod
    def circle(cls, theta1: int | MPQ, theta2: int | MPQ) -> "Weight":
        """A weight with the circle acting.

        Args:
            theta1: Weight of z1.
            theta2: Weight of z2.

        Returns:
            The circle weight.
        """
        return cls(theta1, theta2, GroupKind.CIRCLE)

    @classmethod
    def integers(cls, theta1: int | MPQ, theta2: int | MPQ) -> "Weight":
        """A weight with the integers acting.

        Args:
            theta1: Weight of z1.
            theta2: Weight of z2.

        Returns:
            The integer weight.
        """
        return cls(theta1, theta2, GroupKind.INTEGERS)

    @classmethod
    def cyclic_group(cls, a: int, b: int, order: int) -> "Weight":
        """The rotation (z1, z2) -> (zeta^a z1, zeta^b z2) with zeta a primitive order-th root of unity.

        Args:
            a: Exponent of zeta on z1.
            b: Exponent of zeta on z2.
            order: The group order N.

        Returns:
            The cyclic weight with thetas a/N and b/N.

        Raises:
            InvalidWeightError: If ``order`` is not positive.
        """
        if order < 1:
            msg = f"N must be a positive integer, got {order}"
            raise InvalidWeightError(msg)
        return cls(QQ(a, order), QQ(b, order), GroupKind.CYCLIC, (a, b, order))

    @property
    def is_positive(self) -> bool:
        """Both thetas are positive."""
        return self.theta1 > 0 and self.theta2 > 0

    def __str__(self) -> str:
        """Printer form such as ``circle(1, 3)`` or ``Z_4(1, 2)``."""
        if self.cyclic is not None:
            a, b, order = self.cyclic
            return f"Z_{order}({a}, {b})"
        return f"{self.group.value}({self.theta1}, {self.theta2})"


@dataclass(frozen=True, order=True)
class HolomorphicQuotient:
    """An hq value: a finite positive ratio, or +infinity / -infinity.

    ``infinity`` is +1 for holomorphic monomials, -1 for anti-holomorphic ones
    and 0 for finite values, in which case ``ratio`` holds the quotient.
    """

    infinity: int
    ratio: MPQ | None = None

    @classmethod
    def finite(cls, ratio: MPQ) -> "HolomorphicQuotient":
        """A finite quotient.

        Args:
            ratio: The positive ratio.

        Returns:
            The quotient value.
        """
        return cls(0, QQ.convert(ratio))

    @classmethod
    def plus_infinity(cls) -> "HolomorphicQuotient":
        """The quotient of a holomorphic monomial.

        Returns:
            +infinity.
        """
        return cls(1)

    @classmethod
    def minus_infinity(cls) -> "HolomorphicQuotient":
        """The quotient of an anti-holomorphic monomial.

        Returns:
            -infinity.
        """
        return cls(-1)

    @property
    def is_finite(self) -> bool:
        """Neither infinity."""
        return self.infinity == 0

    def inverse(self) -> "HolomorphicQuotient":
        """The quotient of the conjugate monomial.

        Returns:
            1/ratio, or the opposite infinity.
        """
        if self.ratio is None:
            return HolomorphicQuotient(-self.infinity)
        return HolomorphicQuotient.finite(1 / self.ratio)

    def __str__(self) -> str:
        """``+inf``, ``-inf`` or the ratio."""
        if self.infinity:
            return "+inf" if self.infinity > 0 else "-inf"
        return str(self.ratio)


@dataclass(frozen=True)
class Grade:
    """Weight, signature and holomorphic quotient of a monomial.

    ``hq`` is None when the quotient is undefined, which happens for an impure
    monomial whose holomorphic or anti-holomorphic weighted degree is not positive.
    """

    wt: MPQ
    sgn: MPQ
    hq: HolomorphicQuotient | None


def monomial_weight(m: Monomial, theta: Weight) -> MPQ:
    """Weighted degree (j1+k1)theta1 + (j2+k2)theta2.

    Args:
        m: The monomial.
        theta: The weight.

    Returns:
        The weight of ``m``.
    """
    return (m.j1 + m.k1) * theta.theta1 + (m.j2 + m.k2) * theta.theta2


def monomial_signature(m: Monomial, theta: Weight) -> MPQ:
    """Signature (j1-k1)theta1 + (j2-k2)theta2.

    Args:
        m: The monomial.
        theta: The weight.

    Returns:
        The signature of ``m``.
    """
    return (m.j1 - m.k1) * theta.theta1 + (m.j2 - m.k2) * theta.theta2


def grade(m: Monomial, theta: Weight) -> Grade:
    """Grade a nonconstant monomial.

    Args:
        m: The monomial.
        theta: The weight.

    Returns:
        wt = (j1+k1)theta1 + (j2+k2)theta2, sgn = (j1-k1)theta1 + (j2-k2)theta2
        and hq = (j1 theta1 + j2 theta2) / (k1 theta1 + k2 theta2).

    Raises:
        UndefinedGradeError: If ``m`` is constant.
    """
    if m.is_constant:
        raise UndefinedGradeError
    if m.is_holomorphic:
        hq: HolomorphicQuotient | None = HolomorphicQuotient.plus_infinity()
    elif m.is_antiholomorphic:
        hq = HolomorphicQuotient.minus_infinity()
    else:
        holomorphic = m.j1 * theta.theta1 + m.j2 * theta.theta2
        antiholomorphic = m.k1 * theta.theta1 + m.k2 * theta.theta2
        hq = HolomorphicQuotient.finite(holomorphic / antiholomorphic) if holomorphic > 0 and antiholomorphic > 0 else None
    return Grade(monomial_weight(m, theta), monomial_signature(m, theta), hq)


def _expansion(p: RPoly, key: Callable[[Monomial], MPQ]) -> list[tuple[MPQ, RPoly]]:
    fibers: dict[MPQ, dict[tuple[int, ...], object]] = defaultdict(dict)
    for expv, coeff in p.element.iterterms():
        fibers[key(Monomial.from_exponents(expv))][expv] = coeff
    return [(value, RPoly.from_element(RING.from_dict(fibers[value]))) for value in sorted(fibers)]


def weighted_expansion(p: RPoly, theta: Weight) -> list[tuple[MPQ, RPoly]]:
    """Split ``p`` into weighted homogeneous parts, in strictly increasing weight.

    Args:
        p: The polynomial.
        theta: The weight.

    Returns:
        (weight, part) pairs that sum to ``p``.
    """
    return _expansion(p, lambda m: monomial_weight(m, theta))


def signature_expansion(p: RPoly, theta: Weight) -> list[tuple[MPQ, RPoly]]:
    """Split ``p`` into signature homogeneous parts, in strictly increasing signature.

    Args:
        p: The polynomial.
        theta: The weight.

    Returns:
        (signature, part) pairs that sum to ``p``.
    """
    return _expansion(p, lambda m: monomial_signature(m, theta))


def is_weighted_homogeneous(p: RPoly, theta: Weight) -> bool:
    """Whether every monomial of ``p`` has the same weight.

    Args:
        p: A nonzero polynomial.
        theta: The weight.

    Returns:
        True for a single weighted homogeneous part.
    """
    return len(weighted_expansion(p, theta)) == 1


def is_balanced(m: Monomial, theta: Weight) -> bool:
    """Whether the rotation group of ``theta`` fixes the monomial ``m``.

    Circle: the signature vanishes. Integers: the signature is an integer.
    Cyclic (a, b, N): (j1-k1)a + (j2-k2)b is divisible by N.

    Args:
        m: The monomial.
        theta: The weight and its group.

    Returns:
        True when ``m`` is invariant.
    """
    if theta.group is GroupKind.CYCLIC:
        a, b, order = theta.cyclic  # type: ignore[misc]
        row1, row2 = m.rotation_row
        return (row1 * a + row2 * b) % order == 0
    signature = monomial_signature(m, theta)
    if theta.group is GroupKind.INTEGERS:
        return QQ.denom(signature) == 1
    return not signature


def balanced_in_variable(m: Monomial, which: int) -> bool:
    """j_which == k_which, i.e. balanced with respect to the rotation of z_which alone.

    Args:
        m: The monomial.
        which: 1 or 2.

    Returns:
        True when the exponents of z_which and cz_which agree.

    Raises:
        ValueError: If ``which`` is neither 1 nor 2.
    """
    if which == 1:
        return m.j1 == m.k1
    if which == 2:
        return m.j2 == m.k2
    msg = f"variable index must be 1 or 2, got {which}"
    raise ValueError(msg)


@dataclass(frozen=True)
class BalanceClass:
    """Balancedness flags of a polynomial with respect to a weight."""

    strictly_balanced: bool
    extremely_balanced: bool
    extremely_imbalanced: bool
    diversely_balanced: bool

    @property
    def pure(self) -> bool:
        """Alias of ``extremely_imbalanced``."""
        return self.extremely_imbalanced


def holomorphic_quotients(p: RPoly, theta: Weight) -> list[HolomorphicQuotient | None]:
    """The hq value of every nonconstant monomial of ``p``, in canonical order.

    Args:
        p: The polynomial.
        theta: The weight.

    Returns:
        The quotients, None where undefined.
    """
    return [grade(m, theta).hq for m in p.monomials() if not m.is_constant]


def balance_class(p: RPoly, theta: Weight) -> BalanceClass:
    """Classify ``p`` by the balancedness notions.

    Constant terms are balanced in every sense and are ignored by the purity
    test; a constant term does rule out diverse balance.

    Args:
        p: A nonconstant polynomial.
        theta: The weight and its group.

    Returns:
        The four flags.

    Raises:
        UndefinedGradeError: If ``p`` is constant.
    """
    if p.is_constant:
        raise UndefinedGradeError
    monomials = list(p.monomials())
    nonconstant = [m for m in monomials if not m.is_constant]
    strictly = all(is_balanced(m, theta) for m in monomials)
    extremely = all(balanced_in_variable(m, 1) and balanced_in_variable(m, 2) for m in monomials)
    imbalanced = all(m.is_pure for m in nonconstant)
    diversely = False
    if len(nonconstant) == len(monomials) and not any(m.is_pure for m in monomials):
        quotients = [grade(m, theta).hq for m in monomials]
        if all(hq is not None for hq in quotients):
            diversely = math.prod((hq.ratio for hq in quotients), start=QQ(1)) == 1  # type: ignore[union-attr]
    result = BalanceClass(strictly, extremely, imbalanced, diversely)
    logger.debug("Balance class of %s with respect to %s: %s", p, theta, result)
    return result


def s_w_set(total_weight: MPQ | int, theta: Weight) -> frozenset[HolomorphicQuotient]:
    """All holomorphic quotients realised by monomials of weight ``total_weight``.

    Args:
        total_weight: The weight W.
        theta: A weight with both components positive.

    Returns:
        The set S_W; it is closed under inversion. Empty when no nonconstant
        monomial has weight W.

    Raises:
        InvalidWeightError: If a weight component is not positive.
    """
    if not theta.is_positive:
        msg = f"s_w_set needs positive weights, got {theta}"
        raise InvalidWeightError(msg)
    target = QQ.convert(total_weight)
    values: set[HolomorphicQuotient] = set()
    if target <= 0:
        return frozenset(values)
    max_first = int(target / theta.theta1)
    for degree1 in range(max_first + 1):
        rest = (target - degree1 * theta.theta1) / theta.theta2
        if QQ.denom(rest) != 1:
            continue
        degree2 = int(rest)
        for j1 in range(degree1 + 1):
            for j2 in range(degree2 + 1):
                m = Monomial(j1, degree1 - j1, j2, degree2 - j2)
                hq = grade(m, theta).hq
                if hq is not None:
                    values.add(hq)
    return frozenset(values)


def completely_diversely_balanced(p: RPoly, theta: Weight) -> bool:
    """Whether ``p`` realises every holomorphic quotient available at its weight.

    Args:
        p: A weighted homogeneous polynomial.
        theta: A weight with both components positive.

    Returns:
        True when the quotients of ``p`` fill the set S_W.

    Raises:
        NotHomogeneousError: If ``p`` is not weighted homogeneous with respect to ``theta``.
        InvalidWeightError: If a weight component is not positive.
    """
    parts = weighted_expansion(p, theta)
    if len(parts) != 1:
        raise NotHomogeneousError(str(p))
    total_weight, _ = parts[0]
    return set(holomorphic_quotients(p, theta)) == s_w_set(total_weight, theta)
