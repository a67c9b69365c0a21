"""Necessary conditions for a rigid model to be of finite type.

A pluriharmonic P, a P without pure terms in one of the variables, or a P
whose restriction to a complex line {z_l = c} is harmonic all put a complex
curve into the boundary. The line test only probes a finite set of points,
so passing means "no obstruction found", never a proof of finite type.
"""

import logging
from dataclasses import dataclass, field

from src.config import LINE_TEST_CANDIDATES
from src.decomposition import pluriharmonic_split
from src.polynomial import (
    RING,
    HoloPoly,
    PolyMap,
    RPoly,
    format_coefficient,
    gaussian,
    parameter,
    split_parts,
    substitute,
    z1,
    z2,
)

logger = logging.getLogger(__name__)

PLURIHARMONIC_REASON = "pluriharmonic"


class DegeneratePolynomialError(ValueError):
    """Error when P fails a necessary finite-type condition."""

    def __init__(self, reasons: list[str]) -> None:
        super().__init__(f"P fails the finite-type necessary conditions: {'; '.join(reasons)}")
        self.reasons = reasons


@dataclass(frozen=True)
class FiniteTypeVerdict:
    """Outcome of the necessary finite-type tests.

    ``lines_checked`` counts the complex lines probed by the line test.
    """

    passed: bool
    reasons: list[str] = field(default_factory=list)
    lines_checked: int = 0


def _line_map(which: int, point: RPoly) -> PolyMap:
    value = HoloPoly.coerce(point)
    return PolyMap(value, z2()) if which == 1 else PolyMap(z1(), value)


def _restriction_is_pluriharmonic(p: RPoly, which: int, point: RPoly) -> bool:
    restricted = substitute(p, _line_map(which, point))
    _, core = pluriharmonic_split(restricted)
    return not core


def _exponent_slots(which: int) -> tuple[int, int]:
    return (2 * (which - 1), 2 * (which - 1) + 1)


def _real_rational_roots(p: RPoly, which: int) -> list[RPoly]:
    """Rational points of the real axis in z_which where the lowest mixed coefficient in the other variable vanishes.

    Writing P = sum(C_jk(z_which, cz_which) * w^j * cw^k) in the other
    variable w, the restriction to {z_which = c} can only be harmonic where
    every C_jk with j, k >= 1 vanishes at c.
    """
    hol, anti = _exponent_slots(2 if which == 1 else 1)
    mixed = sorted({(expv[hol], expv[anti]) for expv in p.element.monoms() if expv[hol] and expv[anti]}, key=lambda jk: (sum(jk), jk))
    if not mixed:
        return []
    lowest = mixed[0]
    coefficient = {}
    for expv, coeff in p.element.iterterms():
        if (expv[hol], expv[anti]) == lowest:
            stripped = list(expv)
            stripped[hol] = stripped[anti] = 0
            coefficient[tuple(stripped)] = coeff
    coefficient_poly = RPoly.from_element(RING.from_dict(coefficient))
    on_axis = substitute(coefficient_poly, _line_map(which, parameter("n"))).element
    if not on_axis:
        return []
    n_index = len(on_axis.ring.gens) - 1
    roots = []
    _, factors = on_axis.factor_list()
    for factor, _ in factors:
        if factor.degree(n_index) != 1 or any(any(expv[:n_index]) for expv in factor.monoms()):
            continue
        root = -factor.coeff_wrt(n_index, 0).LC / factor.coeff_wrt(n_index, 1).LC
        if not root.y:
            roots.append(RPoly.constant(root))
    logger.debug("Real rational roots for the z%d line test: %s", which, [str(r) for r in roots])
    return roots


def _candidate_points(p: RPoly, which: int) -> list[RPoly]:
    points = [RPoly.constant(gaussian(re, im)) for re, im in LINE_TEST_CANDIDATES]
    for root in _real_rational_roots(p, which):
        if root not in points:
            points.append(root)
    return points


def finite_type_necessary(p: RPoly) -> FiniteTypeVerdict:
    """Run the necessary finite-type tests on a real P.

    Args:
        p: A real-valued polynomial.

    Returns:
        The verdict; ``reasons`` names every failed condition.

    Raises:
        NotRealValuedError: If ``p`` is not real valued.
    """
    _, core = pluriharmonic_split(p)
    if not core:
        logger.info("P is pluriharmonic")
        return FiniteTypeVerdict(passed=False, reasons=[PLURIHARMONIC_REASON])
    reasons = []
    parts = split_parts(core)
    if not parts.p1:
        reasons.append("P1 ≡ 0")
    if not parts.p2:
        reasons.append("P2 ≡ 0")
    checked = 0
    for which in (1, 2):
        for point in _candidate_points(p, which):
            checked += 1
            if _restriction_is_pluriharmonic(p, which, point):
                label = format_coefficient(point.constant_term)
                logger.debug("Complex line z%d = %s lies in the boundary", which, label)
                reasons.append(f"complex line {{z{which} = {label}}} lies in the boundary")
    verdict = FiniteTypeVerdict(passed=not reasons, reasons=reasons, lines_checked=checked)
    logger.debug("Finite-type verdict for %s: %s", p, verdict)
    return verdict


def require_finite_type(p: RPoly) -> None:
    """Raise DegeneratePolynomialError unless P passes the necessary tests.

    Args:
        p: A real-valued polynomial.

    Raises:
        DegeneratePolynomialError: With the failed conditions as ``reasons``.
    """
    verdict = finite_type_necessary(p)
    if not verdict.passed:
        raise DegeneratePolynomialError(verdict.reasons)
