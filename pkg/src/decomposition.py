"""Pluriharmonic extraction and holomorphic decompositions of real polynomials.

Every real-valued polynomial p splits as

    p = 2 Re q + sum(lam_i |f_i|^2) - sum(mu_j |g_j|^2)

with q holomorphic and the f's (and the g's) linearly independent holomorphic
polynomials vanishing at 0. The Hermitian part is found by an exact pivoted
LDL* congruence of the coefficient matrix of the core, so the weights stay
rational and no square roots are ever taken.
"""

import logging
from dataclasses import dataclass, field

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring

from src.polynomial import (
    N_VARIABLES,
    RING,
    HoloPoly,
    Monomial,
    PolyMap,
    RPoly,
    conjugate,
    conjugate_coefficient,
    imaginary_part,
    real_part,
    require_real,
    squared_modulus,
    substitute,
    z1,
    z2,
)

logger = logging.getLogger(__name__)

# (z1, z2) exponents of a holomorphic monomial
HoloExponent = tuple[int, int]


class ParametricInputError(ValueError):
    """Error when an operation needs a polynomial free of the formal parameters."""

    def __init__(self, text: str) -> None:
        super().__init__(f"formal parameters must be specialised before this operation: {text}")


class ReconstructionError(ValueError):
    """Error when a computed decomposition fails to reproduce its input."""

    def __init__(self, residual: RPoly) -> None:
        super().__init__(f"decomposition does not reconstruct its input, residual {residual}")
        self.residual = residual


@dataclass(frozen=True)
class HoloDecomposition:
    """p = 2 Re q + sum(lam |f|^2 for plus) - sum(mu |g|^2 for minus).

    ``rank_certificate`` holds the ranks of the coefficient matrices of the
    f's and of the g's; they equal the list lengths when the lists are
    linearly independent.
    """

    q: HoloPoly
    plus: list[tuple[MPQ, HoloPoly]] = field(default_factory=list)
    minus: list[tuple[MPQ, HoloPoly]] = field(default_factory=list)
    rank_certificate: tuple[int, int] = (0, 0)

    @property
    def inertia(self) -> tuple[int, int]:
        """Numbers of positive and negative squares."""
        return (len(self.plus), len(self.minus))

    def reconstruct(self) -> RPoly:
        """Rebuild the polynomial from q and the weighted squares.

        Returns:
            2 Re q + sum(lam |f|^2) - sum(mu |g|^2).
        """
        total = self.q + conjugate(self.q)
        for lam, f in self.plus:
            total = total + squared_modulus(f) * lam
        for mu, g in self.minus:
            total = total - squared_modulus(g) * mu
        return total


def pluriharmonic_split(p: RPoly) -> tuple[HoloPoly, RPoly]:
    """Split off the pluriharmonic part of a real polynomial.

    Holomorphic monomials go to q with their coefficients; their conjugates are
    then accounted for by conj(q). A real constant c contributes c/2 to q.

    Args:
        p: A real-valued polynomial.

    Returns:
        (q, core) with p = 2 Re q + core; core has no pure monomials and no constant.

    Raises:
        NotRealValuedError: If ``p`` is not real valued.
    """
    require_real(p)
    q_terms: dict[tuple[int, ...], GaussianRational] = {}
    for expv, coeff in p.element.iterterms():
        monomial = Monomial.from_exponents(expv)
        if monomial.is_holomorphic:
            q_terms[expv] = coeff
        elif monomial.is_constant:
            q_terms[expv] = coeff / QQ_I.convert(2)
    q = HoloPoly.from_element(RING.from_dict(q_terms))
    core = p - q - conjugate(q)
    return q, core


def _holomorphic_monomial(exponent: HoloExponent) -> HoloPoly:
    return HoloPoly.coerce(z1() ** exponent[0] * z2() ** exponent[1])


def _grlex_key(exponent: HoloExponent) -> tuple[int, tuple[int, int]]:
    return grlex((exponent[0], exponent[1]))


class _HermitianForm:
    """sum(H[u][v] * b_u * conj(b_v)) over a basis b of holomorphic polynomials.

    Reduced step by step: each pivot splits off one weighted square and
    replaces H by its Schur complement.
    """

    def __init__(self, entries: list[list[GaussianRational]], basis: list[HoloPoly]) -> None:
        self.entries = entries
        self.basis = basis

    @classmethod
    def from_core(cls, core: RPoly) -> "_HermitianForm":
        coefficients: dict[tuple[HoloExponent, HoloExponent], GaussianRational] = {}
        support: set[HoloExponent] = set()
        for expv, coeff in core.element.iterterms():
            holomorphic, antiholomorphic = (expv[0], expv[2]), (expv[1], expv[3])
            coefficients[holomorphic, antiholomorphic] = coeff
            support.update((holomorphic, antiholomorphic))
        index = sorted(support, key=_grlex_key, reverse=True)
        entries = [[coefficients.get((u, v), QQ_I.zero) for v in index] for u in index]
        return cls(entries, [_holomorphic_monomial(u) for u in index])

    @property
    def size(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.entries)

    def pivot_index(self) -> int | None:
        """Index of the largest-magnitude diagonal entry, or None if the diagonal vanishes."""
        best, best_value = None, QQ.zero
        for k in range(self.size):
            magnitude = abs(self.entries[k][k].x)
            if magnitude > best_value:
                best, best_value = k, magnitude
        return best

    def make_pivot(self) -> None:
        """Congruence creating a nonzero diagonal when the whole diagonal vanishes.

        With c = H[u][v] for the first nonzero entry, the basis change
        b_v -> b_v - c*b_u turns H[u][u] into 2|c|^2.
        """
        u, v = next((i, j) for i in range(self.size) for j in range(self.size) if self.entries[i][j])
        c = self.entries[u][v]
        logger.debug("Zero diagonal; adding %s times row %d to row %d", c, v, u)
        rows = [list(row) for row in self.entries]
        rows[u] = [rows[u][j] + c * rows[v][j] for j in range(self.size)]
        c_bar = conjugate_coefficient(c)
        for row in rows:
            row[u] = row[u] + c_bar * row[v]
        self.entries = rows
        self.basis[v] = HoloPoly.coerce(self.basis[v] - self.basis[u] * c)

    def eliminate(self, k: int) -> tuple[MPQ, HoloPoly]:
        """Split off d*|f|^2 at pivot k and pass to the Schur complement."""
        d = self.entries[k][k]
        f = self.basis[k]
        for v in range(self.size):
            if v != k and self.entries[v][k]:
                f = f + self.basis[v] * (self.entries[v][k] / d)
        keep = [i for i in range(self.size) if i != k]
        self.entries = [
            [self.entries[i][j] - self.entries[i][k] * self.entries[k][j] / d for j in keep] for i in keep
        ]
        self.basis = [self.basis[i] for i in keep]
        return d.x, HoloPoly.coerce(f)


def _normalise(weight: MPQ, f: HoloPoly) -> tuple[MPQ, HoloPoly]:
    """Rescale so the leading coefficient of f is 1, moving |c|^2 into the weight."""
    lead = f.element.LC
    scaled = HoloPoly.coerce(f / lead)
    return weight * (lead * conjugate_coefficient(lead)).x, scaled


def _coefficient_rank(polys: list[HoloPoly]) -> int:
    if not polys:
        return 0
    support = sorted({expv for f in polys for expv in f.element.monoms()})
    rows = [[f.element.get(expv, QQ_I.zero) for expv in support] for f in polys]
    return DomainMatrix(rows, (len(rows), len(support)), QQ_I).rank()


def holomorphic_decompose(p: RPoly) -> HoloDecomposition:
    """Compute a holomorphic decomposition of a real polynomial.

    Args:
        p: A real-valued polynomial without formal parameters.

    Returns:
        The decomposition; it reconstructs ``p`` exactly.

    Raises:
        NotRealValuedError: If ``p`` is not real valued.
        ParametricInputError: If ``p`` involves a formal parameter.
        ReconstructionError: If the result fails its own reconstruction check.
    """
    if p.has_parameters:
        raise ParametricInputError(str(p))
    q, core = pluriharmonic_split(p)
    form = _HermitianForm.from_core(core)
    logger.debug("Hermitian coefficient matrix of size %d", form.size)
    plus: list[tuple[MPQ, HoloPoly]] = []
    minus: list[tuple[MPQ, HoloPoly]] = []
    while form.size and not form.is_zero():
        k = form.pivot_index()
        if k is None:
            form.make_pivot()
            continue
        d, f = form.eliminate(k)
        weight, f = _normalise(abs(d), f)
        (plus if d > 0 else minus).append((weight, f))
    decomposition = HoloDecomposition(
        q,
        plus,
        minus,
        (_coefficient_rank([f for _, f in plus]), _coefficient_rank([g for _, g in minus])),
    )
    residual = decomposition.reconstruct() - p
    if residual:
        raise ReconstructionError(residual)
    logger.info("Decomposed %d-term polynomial with inertia %s", len(p), decomposition.inertia)
    return decomposition


@dataclass(frozen=True)
class ImExpansion:
    """Outcome of writing Q as sum(b_j(z1, cz1) * Im(z2 * conj p(z1))^j).

    On success ``coefficients[j]`` is b_j; otherwise ``reason`` says which step failed.
    """

    success: bool
    coefficients: list[RPoly] = field(default_factory=list)
    reason: str = ""


_LOCAL_RING, _LZ1, _LCZ1, _LX, _LY = ring("z1,cz1,x,y", QQ_I, grlex)


def _to_real_coordinates(element: PolyElement) -> PolyElement:
    """Rewrite z2 = x + iy, cz2 = x - iy in the local ring."""
    z2_local = _LX + _LY * QQ_I.imag_unit
    cz2_local = _LX - _LY * QQ_I.imag_unit
    result = _LOCAL_RING.zero
    for expv, coeff in element.iterterms():
        result += _LZ1 ** expv[0] * _LCZ1 ** expv[1] * z2_local ** expv[2] * cz2_local ** expv[3] * coeff
    return result


def im_expansion(q_poly: RPoly, p: HoloPoly) -> ImExpansion:
    """Expand Q in powers of Im(z2 * conj p(z1)), if it has that form.

    Q(z1, p(z1) z2) is rewritten in (z1, cz1, Re z2, Im z2); Q has the form
    iff no term involves Re z2 and the coefficient a_j of (Im z2)^j is
    divisible by |p|^(2j), in which case b_j = a_j / |p|^(2j).

    Args:
        q_poly: The polynomial Q.
        p: A nonzero holomorphic polynomial in z1.

    Returns:
        The expansion, or a failure with its reason.

    Raises:
        ValueError: If ``p`` is zero or involves z2.
        ParametricInputError: If an input involves a formal parameter.
    """
    if not p:
        msg = "p must be nonzero"
        raise ValueError(msg)
    if any(expv[2] for expv in p.element.monoms()):
        msg = f"p must be a polynomial in z1 alone, got {p}"
        raise ValueError(msg)
    if q_poly.has_parameters or p.has_parameters:
        raise ParametricInputError(f"{q_poly}; {p}")
    composed = substitute(q_poly, PolyMap(z1(), HoloPoly.coerce(p * z2())))
    local = _to_real_coordinates(composed.element)
    if any(expv[2] for expv in local.monoms()):
        return ImExpansion(success=False, reason="depends on Re z2")
    modulus = squared_modulus(p).element
    coefficients: list[RPoly] = []
    for j in range(local.degree(_LY) + 1):
        a_j = RING.from_dict({(expv[0], expv[1]) + (0,) * (RING.ngens - 2): coeff for expv, coeff in local.iterterms() if expv[3] == j})
        quotient, remainder = a_j.div(modulus**j)
        if remainder:
            return ImExpansion(success=False, reason=f"coefficient of (Im z2)^{j} is not divisible by |p|^{2 * j}")
        coefficients.append(RPoly.from_element(quotient))
    expansion = ImExpansion(success=True, coefficients=coefficients)
    if reconstruct_im_expansion(expansion.coefficients, p) != q_poly:
        return ImExpansion(success=False, reason="expansion does not reconstruct Q")
    return expansion


def reconstruct_im_expansion(coefficients: list[RPoly], p: HoloPoly) -> RPoly:
    """sum(b_j * Im(z2 * conj p)^j).

    Args:
        coefficients: The b_j, lowest power first.
        p: The holomorphic polynomial in z1 used by the expansion.

    Returns:
        The reconstructed Q.
    """
    base = imaginary_part(z2() * conjugate(p))
    total = RPoly.zero()
    power = RPoly.one()
    for b_j in coefficients:
        total = total + b_j * power
        power = power * base
    return total


_Z1_RING, _RZ1, _RCZ1 = ring("z1,cz1", QQ_I, grlex)
_CZ1_RING, _SCZ1, _SZ1 = ring("cz1,z1", QQ_I, grlex)


def _shares_factor(f: RPoly, g: RPoly) -> bool:
    """Whether f, g in (z1, cz1) have a common nonconstant factor, by resultants in z1 and in cz1."""
    if not f or not g:
        return not (f or g).is_constant
    for local_ring, first, second in ((_Z1_RING, 0, 1), (_CZ1_RING, 1, 0)):
        f_local = local_ring.from_dict({(expv[first], expv[second]): c for expv, c in f.element.iterterms()})
        g_local = local_ring.from_dict({(expv[first], expv[second]): c for expv, c in g.element.iterterms()})
        if f_local.degree(0) and g_local.degree(0) and not f_local.resultant(g_local):
            return True
    return False


def coprime_with_parts(p: HoloPoly) -> bool:
    """Whether |p|^2 shares no factor with Re p nor with Im p, for p holomorphic in z1.

    Args:
        p: A nonzero holomorphic polynomial in z1 alone.

    Returns:
        True when both pairs are coprime.

    Raises:
        ValueError: If ``p`` involves z2 or a formal parameter.
    """
    if any(expv[2] or any(expv[N_VARIABLES:]) for expv in p.element.monoms()):
        msg = f"p must be a polynomial in z1 alone, got {p}"
        raise ValueError(msg)
    modulus = squared_modulus(p)
    return not _shares_factor(modulus, real_part(p)) and not _shares_factor(modulus, imaginary_part(p))
