"""
Olszak Rank Analysis
Wedge-divisibility kernel of the Weyl 2-forms at a point, the rank d it defines,
and the null parallel facts carried by the coordinate field ∂_n
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ

from .exact_algebra import (
    Rational, RationalLike, RationalMatrix, exact_kernel, exact_rank,
    format_rational, identity_matrix, matrix_rows, proportional, rational_matrix, solve_in_span,
    to_rational,
)
from .roter_construction import CheckResult, CheckStatus
from .tensor_geometry import Curvature, Point, TensorField, evaluate_at

logger = logging.getLogger(__name__)

Covector = Tuple[Rational, ...]

CONFORMALLY_FLAT_WARNING = "conformally flat point: W(p) = 0, d reported as n"


class OlszakAnalysisError(ValueError):
    """Raised when a rank computation is asked for something it cannot decide"""


@dataclass
class WedgeSystem:
    """
    Linear conditions on ξ from (ζ∧ξ)_{abc} = ζ_{ab}ξ_c + ζ_{bc}ξ_a + ζ_{ca}ξ_b = 0,
    one row per 2-form ζ = W(∂_i, ∂_j, ·, ·) with i < j and triple a < b < c.
    """
    n: int
    rows: List[Covector]
    raw_row_count: int

    def matrix(self) -> RationalMatrix:
        return rational_matrix([list(r) for r in self.rows], cols=self.n)

    def kernel(self) -> List[Covector]:
        return exact_kernel(self.matrix())


@dataclass
class OlszakResult:
    point: Point
    kernel_basis: List[Covector]
    d: int
    degenerate: bool = False
    warning: Optional[str] = None

    def contains(self, covector: Sequence[Rational]) -> bool:
        return solve_in_span(self.kernel_basis, covector)

    def to_dict(self) -> Dict:
        data = {
            'point': [format_rational(x) for x in self.point.coords],
            'd': self.d,
            'kernel_basis': [[format_rational(x) for x in v] for v in self.kernel_basis],
        }
        if self.warning:
            data['warning'] = self.warning
        return data


@dataclass
class RankConstancyReport:
    results: List[OlszakResult]
    constant_d: bool
    same_kernel: bool

    @property
    def ok(self) -> bool:
        return self.constant_d and self.same_kernel

    @property
    def d_values(self) -> List[int]:
        return [r.d for r in self.results]


@dataclass
class NullParallelReport:
    """Flags for g(∂_n,∂_n) = 0, ∇∂_n = 0, g(∂_n,·) = dx¹ and dx¹ in the Olszak kernel"""
    is_null: bool
    is_parallel: bool
    dual_is_dx1: bool
    dx1_in_kernel: Optional[bool]
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_null and self.is_parallel and self.dual_is_dx1 and self.dx1_in_kernel is not False

    def to_checks(self) -> List[CheckResult]:
        def status(flag):
            if flag is None:
                return CheckStatus.SKIP
            return CheckStatus.PASS if flag else CheckStatus.FAIL

        detail = "; ".join(self.failures)
        return [
            CheckResult('dn_null', status(self.is_null), detail if not self.is_null else "g_nn = 0"),
            CheckResult('dn_parallel', status(self.is_parallel),
                        detail if not self.is_parallel else "Γ^j_{in} = 0"),
            CheckResult('dn_dual_is_dx1', status(self.dual_is_dx1),
                        detail if not self.dual_is_dx1 else "g_{in} = δ_{1i}"),
            CheckResult('dx1_in_kernel', status(self.dx1_in_kernel),
                        "no sample points" if self.dx1_in_kernel is None else
                        ("dx¹ annihilates every wedge condition" if self.dx1_in_kernel else detail)),
        ]


def dx1(n: int) -> Covector:
    return tuple(QQ.one if i == 0 else QQ.zero for i in range(n))


# ---------------------------------------------------------------------------
# Wedge system
# ---------------------------------------------------------------------------

def _normalized(row: Sequence[Rational]) -> Covector:
    """Scale a nonzero row so its leading entry is 1"""
    lead = next(v for v in row if v)
    return tuple(v / lead for v in row)


def assemble_wedge_system(W_values: np.ndarray, n: int, dedup: bool = True) -> WedgeSystem:
    """
    Build the wedge conditions from an evaluated rank-4 Weyl array.
    Coordinate basis pairs suffice by bilinearity of W in its first two slots.
    """
    if W_values.shape != (n,) * 4:
        raise OlszakAnalysisError(f"Weyl array has shape {W_values.shape}, expected {(n,) * 4}")

    rows: List[Covector] = []
    raw = 0
    seen = set()
    for i, j in combinations(range(n), 2):
        zeta = W_values[i, j]
        for a, b, c in combinations(range(n), 3):
            raw += 1
            row = [QQ.zero] * n
            row[a] = zeta[b, c]
            row[b] = zeta[c, a]
            row[c] = zeta[a, b]
            if not dedup:
                rows.append(tuple(row))
                continue
            if not any(row):
                continue
            key = _normalized(row)
            if key not in seen:
                seen.add(key)
                rows.append(key)

    logger.debug(f"Wedge system for n={n}: {raw} raw rows, {len(rows)} kept")
    return WedgeSystem(n=n, rows=rows, raw_row_count=raw)


def kernel_of_weyl(W_values: np.ndarray, n: int, dedup: bool = True) -> List[Covector]:
    return assemble_wedge_system(W_values, n, dedup=dedup).kernel()


# ---------------------------------------------------------------------------
# Rank at points
# ---------------------------------------------------------------------------

def olszak_rank_from_values(W_values: Optional[np.ndarray], n: int, point: Point,
                            dedup: bool = True) -> OlszakResult:
    """Rank d from an already evaluated Weyl array"""
    if W_values is None or not any(v for v in W_values.flat):
        logger.warning(f"Weyl tensor vanishes at {[format_rational(x) for x in point.coords]}")
        return OlszakResult(
            point=point,
            kernel_basis=[tuple(row) for row in matrix_rows(identity_matrix(n))],
            d=n,
            degenerate=True,
            warning=CONFORMALLY_FLAT_WARNING,
        )
    basis = kernel_of_weyl(W_values, n, dedup=dedup)
    return OlszakResult(point=point, kernel_basis=basis, d=len(basis))


def olszak_rank_at(curvature: Curvature, point: Point, dedup: bool = True) -> OlszakResult:
    """Exact kernel dimension of the wedge system of W at a point"""
    n = curvature.n
    if len(point) != n:
        raise OlszakAnalysisError(f"Point has {len(point)} coordinates, metric lives in dimension {n}")
    W_values = evaluate_at(curvature.weyl, point) if curvature.weyl is not None else None
    result = olszak_rank_from_values(W_values, n, point, dedup=dedup)
    logger.debug(f"Olszak rank d={result.d} at {[format_rational(x) for x in point.coords]}")
    return result


def _same_span(first: Sequence[Covector], second: Sequence[Covector]) -> bool:
    if len(first) != len(second):
        return False
    return all(solve_in_span(first, v) for v in second)


def rank_constancy(curvature: Curvature, points: Sequence[Point],
                   dedup: bool = True) -> RankConstancyReport:
    """Compute d at every point and check that d and the kernel do not change"""
    if len(points) < 2:
        raise OlszakAnalysisError("need >= 2 points")
    results = [olszak_rank_at(curvature, p, dedup=dedup) for p in points]
    reference = results[0]
    constant_d = all(r.d == reference.d for r in results)
    same_kernel = constant_d and all(_same_span(reference.kernel_basis, r.kernel_basis) for r in results)
    return RankConstancyReport(results=results, constant_d=constant_d, same_kernel=same_kernel)


def dedup_consistency(curvature: Curvature, point: Point) -> bool:
    """Kernel computed from the full and from the deduplicated wedge system must agree"""
    if curvature.weyl is None:
        return True
    W_values = evaluate_at(curvature.weyl, point)
    full = kernel_of_weyl(W_values, curvature.n, dedup=False)
    reduced = kernel_of_weyl(W_values, curvature.n, dedup=True)
    return full == reduced


def rescaling_invariance(curvature: Curvature, point: Point, factor: RationalLike) -> bool:
    """ker(cW) == ker(W) for nonzero rational c"""
    c = to_rational(factor)
    if c == 0:
        raise OlszakAnalysisError("Rescaling factor must be nonzero")
    if curvature.weyl is None:
        return True
    W_values = evaluate_at(curvature.weyl, point)
    scaled = evaluate_at(curvature.weyl.scaled(c), point)
    return kernel_of_weyl(W_values, curvature.n) == kernel_of_weyl(scaled, curvature.n)


def kernel_is_dx1_line(result: OlszakResult) -> bool:
    return result.d == 1 and result.contains(dx1(len(result.point)))


# ---------------------------------------------------------------------------
# Null parallel distribution and kernel structure
# ---------------------------------------------------------------------------

def null_parallel_check(g: TensorField, gamma: TensorField,
                        results: Sequence[OlszakResult] = ()) -> NullParallelReport:
    """Exact checks of the facts carried by ∂_n; each failure names its component"""
    n = g.n
    last = n - 1
    failures = []

    is_null = not g[last, last]
    if not is_null:
        failures.append(f"g_{{{n}{n}}} = {g[last, last].as_expr()}")

    is_parallel = True
    for j, i in product(range(n), repeat=2):
        if gamma[j, i, last]:
            is_parallel = False
            failures.append(f"Γ^{j + 1}_{{{i + 1}{n}}} = {gamma[j, i, last].as_expr()}")

    dual_is_dx1 = True
    for i in range(n):
        expected = 1 if i == 0 else 0
        if g[i, last] != expected:
            dual_is_dx1 = False
            failures.append(f"g_{{{i + 1}{n}}} = {g[i, last].as_expr()}, expected {expected}")

    dx1_in_kernel: Optional[bool] = None
    if results:
        covector = dx1(n)
        missing = [r for r in results if not r.contains(covector)]
        dx1_in_kernel = not missing
        for r in missing:
            failures.append(f"dx¹ not in kernel at {[format_rational(x) for x in r.point.coords]}")

    return NullParallelReport(is_null, is_parallel, dual_is_dx1, dx1_in_kernel, failures)


def rank1_kernel_structure(A: RationalMatrix, result: OlszakResult) -> CheckResult:
    """
    For rank A = 1 and d = 2: the direction w completing dx¹ has w_n = 0 and
    (w_2, ..., w_{n-1}) proportional to every nonzero row of A.
    """
    name = 'rank1_kernel_structure'
    rank_A = exact_rank(A)
    if rank_A != 1 or result.d != 2:
        return CheckResult(name, CheckStatus.SKIP, f"rank A = {rank_A}, d = {result.d}")

    n = len(result.point)
    if not result.contains(dx1(n)):
        return CheckResult(name, CheckStatus.FAIL, "kernel does not contain dx¹")
    # with dx¹ in a reduced echelon basis, the other vector has no x¹ slot
    candidates = [v for v in result.kernel_basis if any(v[1:])]
    w = (QQ.zero,) + tuple(candidates[0][1:])

    if w[n - 1] != 0:
        return CheckResult(name, CheckStatus.FAIL, f"ξ_{n} = {format_rational(w[n - 1])} != 0")

    block = w[1:n - 1]
    for r, row in enumerate(matrix_rows(A)):
        if any(row) and not proportional(block, row):
            return CheckResult(name, CheckStatus.FAIL,
                               f"kernel direction {[format_rational(x) for x in block]} "
                               f"not proportional to row {r + 1} of A")
    return CheckResult(name, CheckStatus.PASS,
                       f"w = {[format_rational(x) for x in w]} spans the rows of A, ξ_{n} = 0")
