"""Exact linear algebra over ZZ, QQ and QQ(i) on top of sympy's DomainMatrix.

Covers the three solves the symmetry detectors need: saturated integer
kernels of the rotation constraint rows, rational nullspaces for the
tangent-field system, and simultaneous diagonalisation of commuting 2x2
matrices over the Gaussian rationals.
"""

import logging
from collections.abc import Sequence

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ, QQ_I, ZZ
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

MatrixLike = DomainMatrix | Sequence[Sequence[int | MPQ | GaussianRational]]


class NonCommutingError(ValueError):
    """Error when matrices required to commute do not."""

    def __init__(self) -> None:
        super().__init__("matrices do not commute")


class NotDiagonalizableError(ValueError):
    """Error when a matrix has no eigenbasis."""

    def __init__(self) -> None:
        super().__init__("matrix is not diagonalizable")


class EigenvalueOutsideFieldError(ValueError):
    """Error when an eigenvalue is not a Gaussian rational."""

    def __init__(self, factor: str) -> None:
        super().__init__(f"characteristic polynomial has the irreducible factor {factor} over QQ(i)")


def gaussian_matrix(rows: MatrixLike) -> DomainMatrix:
    """Coerce nested rows (or a DomainMatrix over a subfield) to a DomainMatrix over QQ(i).

    Args:
        rows: A DomainMatrix or a sequence of rows of exact scalars.

    Returns:
        The same matrix over QQ(i).
    """

    if isinstance(rows, DomainMatrix):
        return rows.convert_to(QQ_I)
    entries = [[QQ_I.convert(entry) for entry in row] for row in rows]
    return DomainMatrix(entries, (len(entries), len(entries[0]) if entries else 0), QQ_I)


def _is_scalar(m: DomainMatrix) -> bool:
    if not m.is_diagonal:
        return False
    diagonal = m.diagonal()
    return all(entry == diagonal[0] for entry in diagonal)


def _eigenvalues(m: DomainMatrix) -> list[tuple[GaussianRational, int]]:
    """Eigenvalues with multiplicities, sorted by (real, imaginary) part.

    Raises:
        EigenvalueOutsideFieldError: If the characteristic polynomial does not split over QQ(i).
    """
    eigenvalues = []
    for factor, multiplicity in m.charpoly_factor_list():
        if len(factor) != 2:
            raise EigenvalueOutsideFieldError(str(factor))
        leading, constant = factor
        eigenvalues.append((-constant / leading, multiplicity))
    return sorted(eigenvalues, key=lambda pair: (pair[0].x, pair[0].y))


def _eigenvector(m: DomainMatrix, eigenvalue: GaussianRational) -> list[GaussianRational]:
    size = m.shape[0]
    shifted = m - DomainMatrix.eye(size, QQ_I) * eigenvalue
    kernel = shifted.nullspace().to_list()
    vector = kernel[0]
    pivot = next(entry for entry in vector if entry)
    return [entry / pivot for entry in vector]


def simultaneous_diagonalize(a: MatrixLike, b: MatrixLike) -> DomainMatrix:
    """Find H with H^-1 A H and H^-1 B H both diagonal.

    The eigenbasis of whichever matrix is not scalar diagonalises both, since
    they commute. Columns are scaled so that their first nonzero entry is 1 and
    ordered by the (real, imaginary) part of the eigenvalue.

    Args:
        a: A 2x2 matrix over the Gaussian rationals.
        b: A 2x2 matrix commuting with ``a``.

    Returns:
        The change-of-basis matrix H (the identity when both inputs are scalar).

    Raises:
        NonCommutingError: If AB != BA.
        EigenvalueOutsideFieldError: If an eigenvalue is not a Gaussian rational.
        NotDiagonalizableError: If the non-scalar input has a repeated eigenvalue.
    """
    a_matrix, b_matrix = gaussian_matrix(a), gaussian_matrix(b)
    if a_matrix * b_matrix != b_matrix * a_matrix:
        raise NonCommutingError
    size = a_matrix.shape[0]
    if _is_scalar(a_matrix) and _is_scalar(b_matrix):
        return DomainMatrix.eye(size, QQ_I).to_dense()
    reference = b_matrix if _is_scalar(a_matrix) else a_matrix
    eigenvalues = _eigenvalues(reference)
    if any(multiplicity > 1 for _, multiplicity in eigenvalues):
        raise NotDiagonalizableError
    columns = [_eigenvector(reference, eigenvalue) for eigenvalue, _ in eigenvalues]
    change = DomainMatrix([list(row) for row in zip(*columns, strict=True)], (size, len(columns)), QQ_I)
    inverse = change.inv()
    if not (inverse * a_matrix * change).is_diagonal or not (inverse * b_matrix * change).is_diagonal:
        raise NotDiagonalizableError
    logger.debug("Simultaneous eigenbasis %s", change.to_list())
    return change


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Saturated integer basis of the kernel of rows acting on (alpha, beta).

    A one-dimensional kernel is spanned by its primitive vector with first
    nonzero entry positive; a full kernel is returned as the standard basis.
    Both are in Hermite-reduced form.

    Args:
        rows: Integer constraint rows of length 2.

    Returns:
        The kernel basis (empty when only (0, 0) solves the system).
    """
    nonzero = [list(row) for row in rows if any(row)]
    if not nonzero:
        return [(1, 0), (0, 1)]
    matrix = DomainMatrix.from_list([[ZZ(entry) for entry in row] for row in nonzero], ZZ)
    kernel = matrix.nullspace()
    if kernel.shape[0] == 0:
        return []
    _, primitive = kernel.primitive()
    first, second = (int(entry) for entry in primitive.to_list()[0])
    sign = 1 if first > 0 or (first == 0 and second > 0) else -1
    return [(sign * first, sign * second)]


def rational_nullspace(rows: Sequence[Sequence[MPQ]], ncols: int) -> list[list[MPQ]]:
    """Basis of the rational nullspace of rows with ``ncols`` unknowns.

    Each basis vector is scaled so that its first nonzero entry is 1.

    Args:
        rows: Coefficient rows of the homogeneous system.
        ncols: Number of unknowns.

    Returns:
        The basis vectors, or the standard basis when every row is zero.
    """

    nonzero = [list(row) for row in rows if any(row)]
    if not nonzero:
        return [[QQ(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    matrix = DomainMatrix.from_list([[QQ.convert(entry) for entry in row] for row in nonzero], QQ)
    logger.debug("Rational nullspace of a %d x %d system", *matrix.shape)
    basis = []
    for vector in matrix.nullspace().to_list():
        pivot = next(entry for entry in vector if entry)
        basis.append([entry / pivot for entry in vector])
    return basis
