"""
Exact Rational and Polynomial Algebra
Sparse multivariate polynomials over QQ and exact linear algebra for the tensor pipeline
"""

import logging
import re
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

from sympy import Rational as SympyRational
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement, PolyRing, ring

logger = logging.getLogger(__name__)

# Scalar and polynomial types used throughout ecslab
Rational = type(QQ.one)
MultiPoly = PolyElement
RationalMatrix = DomainMatrix
RationalLike = Union[int, str, Fraction, SympyRational, Rational]

_RATIONAL_LITERAL = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$')


class ExactAlgebraError(ValueError):
    """Raised on malformed input to an exact algebra operation"""


def to_rational(value: RationalLike) -> Rational:
    """Convert an integer, a "p/q" string or a rational object to a QQ element"""
    if isinstance(value, bool):
        raise ExactAlgebraError(f"Not a rational literal: {value!r}")
    if isinstance(value, Rational):
        return value
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, SympyRational):
        return QQ.from_sympy(value)
    if isinstance(value, str):
        match = _RATIONAL_LITERAL.match(value)
        if match is None:
            raise ExactAlgebraError(f"Not a rational literal: {value!r}")
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        if denominator == 0:
            raise ExactAlgebraError(f"Zero denominator in {value!r}")
        return QQ(numerator, denominator)
    raise ExactAlgebraError(f"Not a rational literal: {value!r}")


def format_rational(value: RationalLike) -> str:
    """Canonical text form: "p" for integers, "p/q" otherwise"""
    q = to_rational(value)
    numerator, denominator = int(q.numerator), int(q.denominator)
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def coordinate_ring(n: int) -> PolyRing:
    """Polynomial ring QQ[x1, ..., xn], shared by every tensor of dimension n"""
    if n < 1:
        raise ExactAlgebraError(f"Coordinate ring needs at least one variable, got n={n}")
    symbols = ",".join(f"x{i}" for i in range(1, n + 1))
    return ring(symbols, QQ)[0]


def coordinate(n: int, k: int) -> MultiPoly:
    """The coordinate function x^k (1-based) in QQ[x1..xn]"""
    R = coordinate_ring(n)
    if not 1 <= k <= n:
        raise ExactAlgebraError(f"Coordinate index {k} out of range 1..{n}")
    return R.gens[k - 1]


def constant(n: int, value: RationalLike) -> MultiPoly:
    return coordinate_ring(n).ground_new(to_rational(value))


def poly_partial(p: MultiPoly, k: int) -> MultiPoly:
    """Exact partial derivative of p with respect to x^k (1-based)"""
    nvars = p.ring.ngens
    if not 1 <= k <= nvars:
        raise ExactAlgebraError(f"Derivative index {k} out of range 1..{nvars}")
    return p.diff(k - 1)


def poly_eval(p: MultiPoly, point: Sequence[RationalLike]) -> Rational:
    """Exact evaluation of p at a point of length nvars"""
    nvars = p.ring.ngens
    if len(point) != nvars:
        raise ExactAlgebraError(f"Point has {len(point)} coordinates, polynomial has {nvars} variables")
    values = [to_rational(v) for v in point]
    if not p:
        return QQ.zero
    return p(*values)


def univariate_in_x1(coeffs: Sequence[RationalLike], n: int) -> MultiPoly:
    """f(x^1) = sum_k coeffs[k] (x^1)^k, ascending degree"""
    x1 = coordinate(n, 1)
    f = coordinate_ring(n).zero
    for power, c in enumerate(coeffs):
        f += x1**power * to_rational(c)
    return f


def depends_only_on(p: MultiPoly, indices: Sequence[int]) -> bool:
    """True when every monomial of p involves only the given 1-based coordinates"""
    allowed = {k - 1 for k in indices}
    return all(
        exponent == 0 or position in allowed
        for monom in p.itermonoms()
        for position, exponent in enumerate(monom)
    )


# ---------------------------------------------------------------------------
# Rational matrices
# ---------------------------------------------------------------------------

def rational_matrix(rows: Sequence[Sequence[RationalLike]], cols: Optional[int] = None) -> RationalMatrix:
    """Build a rectangular QQ matrix, rejecting ragged input"""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else (cols or 0)
    for r, row in enumerate(rows):
        if len(row) != ncols:
            raise ExactAlgebraError(f"Row {r} has {len(row)} entries, expected {ncols}")
    entries = [[to_rational(v) for v in row] for row in rows]
    return DomainMatrix(entries, (nrows, ncols), QQ)


def identity_matrix(size: int) -> RationalMatrix:
    return DomainMatrix.eye(size, QQ)


def matrix_rows(M: RationalMatrix) -> List[List[Rational]]:
    return M.to_list()


def is_symmetric(M: RationalMatrix) -> bool:
    return M.is_square and M == M.transpose()


def exact_rank(M: RationalMatrix) -> int:
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return 0
    return M.rank()


def exact_kernel(M: RationalMatrix) -> List[Tuple[Rational, ...]]:
    """
    Basis of {v : M v = 0} in reduced row echelon form.
    Each basis vector has leading entry 1; vectors are ordered by leading position.
    """
    rows, cols = M.shape
    if cols == 0:
        return []
    if rows == 0 or M.is_zero_matrix:
        basis = identity_matrix(cols).to_list()
        return [tuple(v) for v in basis]

    nullity = cols - M.rank()
    if nullity == 0:
        return []

    raw = M.nullspace()
    canonical, _ = raw.rref()
    basis = [tuple(v) for v in canonical.to_list()]
    logger.debug(f"Kernel of {rows}x{cols} matrix has dimension {len(basis)}")
    return basis


def exact_det(M: Union[RationalMatrix, Sequence[Sequence[MultiPoly]]]) -> Union[Rational, MultiPoly]:
    """
    Exact determinant of a rational matrix or of a square array of polynomials.
    Polynomial determinants use fraction-free (Bareiss) elimination over QQ[x].
    """
    if isinstance(M, DomainMatrix):
        rows, cols = M.shape
        if rows != cols:
            raise ExactAlgebraError(f"Determinant of non-square {rows}x{cols} matrix")
        if rows == 0:
            return QQ.one
        return M.det()

    entries = [list(row) for row in M]
    size = len(entries)
    if any(len(row) != size for row in entries):
        raise ExactAlgebraError("Determinant of non-square polynomial matrix")
    if size == 0:
        return QQ.one
    R = entries[0][0].ring
    domain = R.to_domain()
    return DomainMatrix(entries, (size, size), domain).det()


def solve_in_span(basis: Sequence[Sequence[Rational]], vector: Sequence[Rational]) -> bool:
    """True when vector lies in the span of the basis vectors"""
    if not basis:
        return all(v == 0 for v in vector)
    spanned = rational_matrix([list(b) for b in basis])
    extended = rational_matrix([list(b) for b in basis] + [list(vector)])
    return exact_rank(extended) == exact_rank(spanned)


def proportional(x: Sequence[Rational], y: Sequence[Rational]) -> bool:
    """Exact proportionality test by cross-multiplication (x_i y_j = x_j y_i)"""
    if len(x) != len(y):
        return False
    return all(
        x[i] * y[j] == x[j] * y[i]
        for i in range(len(x))
        for j in range(i + 1, len(x))
    )
