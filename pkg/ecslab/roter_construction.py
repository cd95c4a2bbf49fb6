"""
Roter Metric Construction
Validates Roter parameters, assembles the polynomial metric on R^n and
instantiates the closed-form essential components used as an independent oracle
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ

from .exact_algebra import (
    MultiPoly, RationalLike, RationalMatrix, coordinate, coordinate_ring,
    depends_only_on, exact_det, exact_rank, format_rational, is_symmetric,
    matrix_rows, poly_partial, rational_matrix, univariate_in_x1,
)
from .tensor_geometry import TensorField, metric_from_rows

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]


class CheckStatus(Enum):
    """Outcome of a single named check"""
    PASS = "PASS"
    FAIL = "FAIL"
    WARN = "WARN"
    SKIP = "SKIP"


@dataclass
class CheckResult:
    """One named check with its status and a human-readable detail"""
    name: str
    status: CheckStatus
    detail: str = ""

    def to_dict(self) -> Dict:
        return {'name': self.name, 'status': self.status.value, 'detail': self.detail}


@dataclass
class ValidationReport:
    """Pass/fail record of every Roter parameter constraint"""
    checks: List[CheckResult] = field(default_factory=list)

    def add(self, name: str, status: CheckStatus, detail: str = "") -> CheckResult:
        result = CheckResult(name, status, detail)
        self.checks.append(result)
        return result

    @property
    def ok(self) -> bool:
        return not any(c.status is CheckStatus.FAIL for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.status is CheckStatus.FAIL]

    def to_dict(self) -> Dict:
        return {'ok': self.ok, 'checks': [c.to_dict() for c in self.checks]}


class RoterParamsError(ValueError):
    """Raised when a construction step is asked to use parameters that failed validation"""

    def __init__(self, report: ValidationReport):
        self.report = report
        names = ", ".join(c.name for c in report.failures) or "unknown"
        super().__init__(f"Invalid Roter parameters: {names}")


@dataclass(frozen=True, eq=False)
class RoterParams:
    """
    Construction data (n, f, G, A).
    G and A are (n-2)x(n-2); row/column r corresponds to coordinate x^(r+2).
    """
    n: int
    f: MultiPoly
    G: RationalMatrix
    A: RationalMatrix

    @classmethod
    def from_data(cls, n: int, f_coeffs: Sequence[RationalLike],
                  G_rows: Sequence[Sequence[RationalLike]],
                  A_rows: Sequence[Sequence[RationalLike]]) -> 'RoterParams':
        size = max(n - 2, 0)
        return cls(
            n=n,
            f=univariate_in_x1(f_coeffs, n),
            G=rational_matrix(G_rows, cols=size),
            A=rational_matrix(A_rows, cols=size),
        )

    @property
    def block_size(self) -> int:
        return self.n - 2


def trace_coupling(params: RoterParams):
    """g^{λμ} a_{λμ} with [g^{λμ}] = G^{-1}"""
    G_inv = matrix_rows(params.G.inv())
    A = matrix_rows(params.A)
    m = params.block_size
    return sum((G_inv[r][c] * A[r][c] for r, c in product(range(m), repeat=2)), QQ.zero)


def _is_definite(G: RationalMatrix) -> bool:
    """Sylvester's criterion on leading principal minors (positive or negative definite)"""
    m = G.shape[0]
    minors = [exact_det(G.extract(list(range(k)), list(range(k)))) for k in range(1, m + 1)]
    positive = all(d > 0 for d in minors)
    negative = all((d < 0) if k % 2 == 1 else (d > 0) for k, d in enumerate(minors, start=1))
    return positive or negative


def validate(params: RoterParams) -> ValidationReport:
    """Check every Roter constraint; hard failures are FAIL entries, never exceptions"""
    report = ValidationReport()
    n = params.n
    m = n - 2

    if n >= 4:
        report.add('dimension', CheckStatus.PASS, f"n = {n}")
    else:
        report.add('dimension', CheckStatus.FAIL, f"n = {n} < 4")

    shapes_ok = params.G.shape == (m, m) and params.A.shape == (m, m) and m > 0
    if shapes_ok:
        report.add('block_shape', CheckStatus.PASS, f"G, A are {m}x{m}")
    else:
        report.add('block_shape', CheckStatus.FAIL,
                   f"G is {params.G.shape}, A is {params.A.shape}, expected ({m}, {m})")

    G_ok = False
    if shapes_ok:
        if is_symmetric(params.G):
            report.add('G_symmetric', CheckStatus.PASS)
        else:
            report.add('G_symmetric', CheckStatus.FAIL, "G is not symmetric")

        det_G = exact_det(params.G)
        if det_G != 0:
            report.add('G_nondegenerate', CheckStatus.PASS, f"det G = {format_rational(det_G)}")
            G_ok = is_symmetric(params.G)
        else:
            report.add('G_nondegenerate', CheckStatus.FAIL, "det G = 0")

        if is_symmetric(params.A):
            report.add('A_symmetric', CheckStatus.PASS)
        else:
            report.add('A_symmetric', CheckStatus.FAIL, "A is not symmetric")

        rank_A = exact_rank(params.A)
        if rank_A > 0:
            report.add('A_nonzero', CheckStatus.PASS, f"rank A = {rank_A}")
        else:
            report.add('A_nonzero', CheckStatus.FAIL, "[a_{λμ}] = 0")

        if G_ok:
            trace = trace_coupling(params)
            if trace == 0:
                report.add('trace_coupling', CheckStatus.PASS, "g^{λμ}a_{λμ} = 0")
            else:
                report.add('trace_coupling', CheckStatus.FAIL,
                           f"g^{{λμ}}a_{{λμ}} = {format_rational(trace)} != 0")
            if rank_A == 1 and _is_definite(params.G):
                report.add('rank1_needs_indefinite_G', CheckStatus.WARN,
                           "rank-1 trace-free A requires indefinite G (A = c v v^T with v null)")
        else:
            report.add('trace_coupling', CheckStatus.SKIP, "G unusable")

    if params.f.ring.ngens != n:
        report.add('f_of_x1', CheckStatus.FAIL, f"f lives in {params.f.ring.ngens} variables, expected {n}")
    elif not depends_only_on(params.f, [1]):
        report.add('f_of_x1', CheckStatus.FAIL, f"f = {params.f.as_expr()} involves variables other than x1")
    else:
        report.add('f_of_x1', CheckStatus.PASS, f"f = {params.f.as_expr()}")
        if params.f.is_ground:
            report.add('f_nonconstant', CheckStatus.WARN, "f constant: not ECS (nonconstant f required)")
        else:
            report.add('f_nonconstant', CheckStatus.PASS)

    for failure in report.failures:
        logger.debug(f"Validation failure {failure.name}: {failure.detail}")
    return report


def _require_valid(params: RoterParams) -> None:
    report = validate(params)
    if not report.ok:
        raise RoterParamsError(report)


def metric_g11(params: RoterParams) -> MultiPoly:
    """g_{11} = [f(x^1) g_{λμ} + a_{λμ}] x^λ x^μ"""
    n = params.n
    R = coordinate_ring(n)
    G = matrix_rows(params.G)
    A = matrix_rows(params.A)
    g11 = R.zero
    for r, c in product(range(params.block_size), repeat=2):
        coefficient = params.f * G[r][c] + A[r][c]
        if coefficient:
            g11 += coefficient * coordinate(n, r + 2) * coordinate(n, c + 2)
    return g11


def build_metric(params: RoterParams) -> TensorField:
    """Assemble g: g_{11} as above, g_{1n} = g_{n1} = 1, g_{λμ} constant, all others zero"""
    _require_valid(params)
    n = params.n
    R = coordinate_ring(n)
    G = matrix_rows(params.G)
    rows = [[R.zero for _ in range(n)] for _ in range(n)]
    rows[0][0] = metric_g11(params)
    rows[0][n - 1] = R.one
    rows[n - 1][0] = R.one
    for r, c in product(range(params.block_size), repeat=2):
        rows[r + 1][c + 1] = R.ground_new(G[r][c])
    logger.debug(f"Built Roter metric with g11 = {rows[0][0].as_expr()}")
    return metric_from_rows(rows)


@dataclass
class ClosedForms:
    """
    Closed-form essential components, keyed by 0-based index tuples.
    'inverse', 'christoffel' and 'ricci' list every nonzero component of their
    tensors; 'riemann' and 'weyl' list the anchored R_{1λμ1} and W_{1λμ1}.
    """
    g11: MultiPoly
    inverse: Dict[Index, MultiPoly]
    christoffel: Dict[Index, MultiPoly]
    riemann: Dict[Index, MultiPoly]
    ricci: Dict[Index, MultiPoly]
    weyl: Dict[Index, MultiPoly]


def closed_forms(params: RoterParams) -> ClosedForms:
    """Instantiate the closed-form components without touching the curvature pipeline"""
    _require_valid(params)
    n = params.n
    R = coordinate_ring(n)
    half = QQ(1, 2)
    last = n - 1
    block = range(1, n - 1)  # internal indices of λ, μ
    G = matrix_rows(params.G)
    A = matrix_rows(params.A)
    G_inv = matrix_rows(params.G.inv())
    g11 = metric_g11(params)

    inverse = {(0, last): R.one, (last, 0): R.one, (last, last): -g11}
    for lam, mu in product(block, repeat=2):
        inverse[(lam, mu)] = R.ground_new(G_inv[lam - 1][mu - 1])

    christoffel = {(last, 0, 0): poly_partial(g11, 1) * half}
    for lam in block:
        gradient = R.zero
        for mu in block:
            gradient += poly_partial(g11, mu + 1) * G_inv[lam - 1][mu - 1]
        christoffel[(lam, 0, 0)] = -gradient * half
        christoffel[(last, 0, lam)] = poly_partial(g11, lam + 1) * half
        christoffel[(last, lam, 0)] = poly_partial(g11, lam + 1) * half

    riemann = {}
    weyl = {}
    for lam, mu in product(block, repeat=2):
        riemann[(0, lam, mu, 0)] = params.f * G[lam - 1][mu - 1] + A[lam - 1][mu - 1]
        weyl[(0, lam, mu, 0)] = R.ground_new(A[lam - 1][mu - 1])

    ricci = {(0, 0): params.f * (2 - n)}

    return ClosedForms(
        g11=g11,
        inverse={k: v for k, v in inverse.items() if v},
        christoffel={k: v for k, v in christoffel.items() if v},
        riemann=riemann,
        ricci={k: v for k, v in ricci.items() if v},
        weyl=weyl,
    )


def predicted_rank(params: RoterParams) -> int:
    """d = 1 when rank A >= 2, d = 2 when rank A = 1"""
    rank_A = exact_rank(params.A)
    if rank_A == 0:
        report = ValidationReport()
        report.add('A_nonzero', CheckStatus.FAIL, "[a_{λμ}] = 0")
        raise RoterParamsError(report)
    return 1 if rank_A >= 2 else 2


def random_roter_params(n: int, rank_a: int, rng: np.random.Generator,
                        f_degree: int = 1) -> RoterParams:
    """
    Random valid parameters with rank(A) = rank_a.
    A diagonal (or null rank-one) seed is spread out by a random unimodular
    congruence G -> P^T G P, A -> P^T A P, which keeps symmetry, det G != 0,
    rank A and the trace coupling.
    """
    m = n - 2
    if n < 4 or not 1 <= rank_a <= m:
        raise ValueError(f"Cannot build rank-{rank_a} A in dimension n={n}")
    if rank_a == 1 and m < 2:
        raise ValueError("Rank-one trace-free A needs n >= 4")

    signs = [int(rng.choice([-1, 1])) for _ in range(m)]
    if rank_a == 1:
        signs[0], signs[1] = 1, -1
    G0 = [[signs[r] if r == c else 0 for c in range(m)] for r in range(m)]

    A0 = [[0] * m for _ in range(m)]
    if rank_a == 1:
        scale = int(rng.choice([-3, -2, -1, 1, 2, 3]))
        for r, c in product((0, 1), repeat=2):
            A0[r][c] = scale
    else:
        slots = [int(s) for s in rng.permutation(m)[:rank_a]]
        while True:
            values = [int(rng.choice([-3, -2, -1, 1, 2, 3])) for _ in slots[:-1]]
            # Σ a_rr / g_rr over the chosen slots must vanish
            balance = sum(v * signs[s] for v, s in zip(values, slots[:-1]))
            if balance != 0:
                break
        for v, s in zip(values, slots[:-1]):
            A0[s][s] = v
        A0[slots[-1]][slots[-1]] = -balance * signs[slots[-1]]

    P_rows = [[1 if r == c else (int(rng.integers(-2, 3)) if c > r else 0) for c in range(m)] for r in range(m)]
    P = rational_matrix(P_rows)
    G = P.transpose().matmul(rational_matrix(G0)).matmul(P)
    A = P.transpose().matmul(rational_matrix(A0)).matmul(P)

    coeffs = [int(rng.integers(-3, 4)) for _ in range(f_degree + 1)]
    if coeffs[-1] == 0:
        coeffs[-1] = 1
    logger.debug(f"Random Roter params: n={n}, rank A={rank_a}, f coefficients {coeffs}")
    return RoterParams(n=n, f=univariate_in_x1(coeffs, n), G=G, A=A)
