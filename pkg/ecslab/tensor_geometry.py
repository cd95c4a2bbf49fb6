"""
Coordinate Tensor Calculus over Polynomial Fields
Levi-Civita connection, curvature, Ricci, Weyl and covariant derivatives of
polynomial metrics, computed exactly and independently of any closed forms
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .exact_algebra import (
    MultiPoly, Rational, RationalLike, coordinate_ring, exact_det, poly_eval,
    poly_partial, to_rational,
)

logger = logging.getLogger(__name__)


class TensorGeometryError(ValueError):
    """Raised when a tensor operation is asked for something it cannot do exactly"""


class Variance(Enum):
    """Slot variance"""
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class Point:
    """A point x = (x^1, ..., x^n) with exact rational coordinates"""
    coords: Tuple[Rational, ...]

    @classmethod
    def of(cls, values: Sequence[RationalLike]) -> 'Point':
        return cls(tuple(to_rational(v) for v in values))

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True, eq=False)
class TensorField:
    """
    Dense component array of polynomials with per-slot variance.
    Components are indexed 0-based; component [i, j, ...] is the coordinate
    component with 1-based indices (i+1, j+1, ...).
    """
    n: int
    variance: Tuple[Variance, ...]
    components: np.ndarray
    symmetry: Optional[str] = None  # 'symmetric' (rank 2) or 'riemann' (rank 4)
    name: str = ""

    def __post_init__(self):
        expected = (self.n,) * len(self.variance)
        if self.components.shape != expected:
            raise TensorGeometryError(
                f"Tensor {self.name or '?'} has shape {self.components.shape}, expected {expected}"
            )
        self.components.flags.writeable = False

    @classmethod
    def from_function(cls, n: int, variance: Sequence[Variance],
                      component: Callable[[Tuple[int, ...]], MultiPoly],
                      symmetry: Optional[str] = None, name: str = "") -> 'TensorField':
        """Build a tensor by evaluating component(idx) on every index tuple"""
        shape = (n,) * len(variance)
        array = np.empty(shape, dtype=object)
        for idx in np.ndindex(*shape):
            array[idx] = component(idx)
        return cls(n, tuple(variance), array, symmetry, name)

    @classmethod
    def from_array(cls, n: int, variance: Sequence[Variance], array: np.ndarray,
                   symmetry: Optional[str] = None, name: str = "") -> 'TensorField':
        return cls(n, tuple(variance), array, symmetry, name)

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def ring(self):
        return coordinate_ring(self.n)

    def __getitem__(self, idx) -> MultiPoly:
        return self.components[idx]

    def indices(self) -> Iterator[Tuple[int, ...]]:
        return np.ndindex(*self.components.shape)

    def nonzero_items(self) -> Iterator[Tuple[Tuple[int, ...], MultiPoly]]:
        for idx in self.indices():
            value = self.components[idx]
            if value:
                yield idx, value

    def is_zero(self) -> bool:
        return not any(True for _ in self.nonzero_items())

    def all_lower(self) -> bool:
        return all(v is Variance.LOWER for v in self.variance)

    def scaled(self, factor: RationalLike) -> 'TensorField':
        c = to_rational(factor)
        return TensorField.from_function(
            self.n, self.variance, lambda idx: self.components[idx] * c,
            self.symmetry, self.name
        )


def metric_from_rows(rows: Sequence[Sequence[MultiPoly]], name: str = "g") -> TensorField:
    """Wrap a square array of polynomials as a symmetric rank-2 lower tensor"""
    n = len(rows)
    array = np.empty((n, n), dtype=object)
    for i in range(n):
        if len(rows[i]) != n:
            raise TensorGeometryError(f"Metric row {i + 1} has {len(rows[i])} entries, expected {n}")
        for j in range(n):
            array[i, j] = rows[i][j]
    return TensorField(n, (Variance.LOWER, Variance.LOWER), array, 'symmetric', name)


# ---------------------------------------------------------------------------
# Connection and curvature
# ---------------------------------------------------------------------------

def invert_metric(g: TensorField) -> TensorField:
    """
    Exact inverse of a metric whose determinant is a nonzero constant.
    The inverse is adj(g)/det(g), which stays polynomial only in that case.
    """
    if g.variance != (Variance.LOWER, Variance.LOWER):
        raise TensorGeometryError("invert_metric expects a rank-2 lower tensor")
    n = g.n
    rows = [[g[i, j] for j in range(n)] for i in range(n)]
    det = exact_det(rows)
    if not det:
        raise TensorGeometryError("Metric is degenerate: det(g) is the zero polynomial")
    if not det.is_ground:
        raise TensorGeometryError(
            f"det(g) = {det.as_expr()} is not constant; the inverse would not be polynomial"
        )

    matrix = DomainMatrix(rows, (n, n), g.ring.to_domain())
    adjugate = matrix.adjugate().to_list()
    inverse_det = QQ.one / det.LC
    logger.debug(f"Inverted {n}x{n} metric with constant determinant {det.LC}")
    return TensorField.from_function(
        n, (Variance.UPPER, Variance.UPPER),
        lambda idx: adjugate[idx[0]][idx[1]] * inverse_det,
        'symmetric', "g^-1"
    )


def christoffel(g: TensorField, ginv: TensorField) -> TensorField:
    """
    Levi-Civita symbols Gamma[k, i, j] = Γ^k_{ij}
    = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}).
    """
    n = g.n
    R = g.ring
    half = QQ(1, 2)
    dg = [[[poly_partial(g[i, j], l + 1) for j in range(n)] for i in range(n)] for l in range(n)]

    # First kind: Γ_{l,ij}
    first = np.empty((n, n, n), dtype=object)
    for l, i in product(range(n), repeat=2):
        for j in range(i, n):
            value = (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]) * half
            first[l, i, j] = value
            first[l, j, i] = value

    ginv_nonzero = [[(l, ginv[k, l]) for l in range(n) if ginv[k, l]] for k in range(n)]
    gamma = np.empty((n, n, n), dtype=object)
    for k, i in product(range(n), repeat=2):
        for j in range(i, n):
            value = R.zero
            for l, gkl in ginv_nonzero[k]:
                if first[l, i, j]:
                    value += gkl * first[l, i, j]
            gamma[k, i, j] = value
            gamma[k, j, i] = value

    return TensorField(n, (Variance.UPPER, Variance.LOWER, Variance.LOWER), gamma, None, "Gamma")


def _nonzero_gamma(gamma: TensorField) -> List[List[List[Tuple[int, MultiPoly]]]]:
    """table[m][i] = [(p, Γ^p_{mi}) for nonzero entries]"""
    n = gamma.n
    return [[[(p, gamma[p, m, i]) for p in range(n) if gamma[p, m, i]] for i in range(n)] for m in range(n)]


def riemann(gamma: TensorField, g: TensorField) -> Tuple[TensorField, TensorField]:
    """
    Curvature with the convention
        R_{ijk}^l = ∂_j Γ^l_{ik} − ∂_i Γ^l_{jk} + Γ^p_{ik} Γ^l_{jp} − Γ^p_{jk} Γ^l_{ip},
        R_{ijkl}  = R_{ijk}^m g_{ml},
    so that Ric_{ij} = R_{ikj}^k and R_{abcd} = g_{ac}g_{bd} − g_{ad}g_{bc} on the unit sphere.
    Returns (R with last slot upper, fully lowered R).
    """
    n = g.n
    R = g.ring
    dgamma = np.empty((n, n, n, n), dtype=object)  # dgamma[m, l, i, k] = ∂_m Γ^l_{ik}
    for m, l, i, k in product(range(n), repeat=4):
        dgamma[m, l, i, k] = poly_partial(gamma[l, i, k], m + 1) if gamma[l, i, k] else R.zero

    upper = np.empty((n, n, n, n), dtype=object)
    for i, k, l in product(range(n), repeat=3):
        upper[i, i, k, l] = R.zero
    for i in range(n):
        for j in range(i + 1, n):
            for k, l in product(range(n), repeat=2):
                value = dgamma[j, l, i, k] - dgamma[i, l, j, k]
                for p in range(n):
                    if gamma[p, i, k] and gamma[l, j, p]:
                        value += gamma[p, i, k] * gamma[l, j, p]
                    if gamma[p, j, k] and gamma[l, i, p]:
                        value -= gamma[p, j, k] * gamma[l, i, p]
                upper[i, j, k, l] = value
                upper[j, i, k, l] = -value

    g_nonzero = [[(m, g[m, l]) for m in range(n) if g[m, l]] for l in range(n)]
    lower = np.empty((n, n, n, n), dtype=object)
    for i, j, k, l in product(range(n), repeat=4):
        value = R.zero
        for m, gml in g_nonzero[l]:
            if upper[i, j, k, m]:
                value += upper[i, j, k, m] * gml
        lower[i, j, k, l] = value

    lowered = (Variance.LOWER,) * 4
    return (
        TensorField(n, lowered[:3] + (Variance.UPPER,), upper, None, "R^"),
        TensorField(n, lowered, lower, 'riemann', "R"),
    )


def ricci_and_scalar(riemann_upper: TensorField, ginv: TensorField) -> Tuple[TensorField, MultiPoly]:
    """Ric_{ij} = R_{ikj}^k and s = g^{ij} Ric_{ij}"""
    n = ginv.n
    R = ginv.ring
    ric = np.empty((n, n), dtype=object)
    for i, j in product(range(n), repeat=2):
        value = R.zero
        for k in range(n):
            value += riemann_upper[i, k, j, k]
        ric[i, j] = value

    scalar = R.zero
    for i, j in product(range(n), repeat=2):
        if ginv[i, j] and ric[i, j]:
            scalar += ginv[i, j] * ric[i, j]

    return TensorField(n, (Variance.LOWER, Variance.LOWER), ric, 'symmetric', "Ric"), scalar


def schouten(g: TensorField, ricci: TensorField, scalar: MultiPoly) -> TensorField:
    """P = (Ric − s g / (2(n−1))) / (n−2)"""
    n = g.n
    if n < 3:
        raise TensorGeometryError(f"Schouten tensor needs n >= 3, got n={n}")
    trace_factor = QQ(1, 2 * (n - 1))
    outer = QQ(1, n - 2)
    return TensorField.from_function(
        n, (Variance.LOWER, Variance.LOWER),
        lambda idx: (ricci[idx] - scalar * g[idx] * trace_factor) * outer,
        'symmetric', "P"
    )


def weyl(g: TensorField, ginv: TensorField, riemann_lower: TensorField,
         ricci: TensorField, scalar: MultiPoly) -> TensorField:
    """
    Weyl tensor W = R − P ⊙ g, where
    (P ⊙ g)_{abcd} = g_{ac}P_{bd} − g_{ad}P_{bc} + g_{bd}P_{ac} − g_{bc}P_{ad}.
    """
    n = g.n
    if n < 4:
        raise TensorGeometryError(f"Weyl decomposition is degenerate for n={n} < 4")
    P = schouten(g, ricci, scalar)

    def component(idx):
        a, b, c, d = idx
        value = riemann_lower[a, b, c, d]
        for gg, pp, sign in ((g[a, c], P[b, d], -1), (g[a, d], P[b, c], 1),
                             (g[b, d], P[a, c], -1), (g[b, c], P[a, d], 1)):
            if gg and pp:
                value = value + gg * pp if sign > 0 else value - gg * pp
        return value

    return TensorField.from_function(n, (Variance.LOWER,) * 4, component, 'riemann', "W")


def covariant_derivative(T: TensorField, gamma: TensorField) -> TensorField:
    """
    ∇T for an all-lower tensor, derivative slot appended last:
    (∇T)_{i1..ir;m} = ∂_m T_{i1..ir} − Σ_s Γ^p_{m i_s} T_{..p..}.
    """
    if not T.all_lower():
        raise TensorGeometryError("covariant_derivative supports all-lower tensors only")
    n = T.n
    R = T.ring
    table = _nonzero_gamma(gamma)
    shape = (n,) * (T.rank + 1)
    result = np.empty(shape, dtype=object)
    for idx in np.ndindex(*T.components.shape):
        base = T[idx]
        for m in range(n):
            value = poly_partial(base, m + 1) if base else R.zero
            for slot, i in enumerate(idx):
                for p, gam in table[m][i]:
                    other = T[idx[:slot] + (p,) + idx[slot + 1:]]
                    if other:
                        value -= gam * other
            result[idx + (m,)] = value
    return TensorField(n, (Variance.LOWER,) * (T.rank + 1), result, None, f"∇{T.name}")


def evaluate_at(T: TensorField, point: Point) -> np.ndarray:
    """Componentwise exact evaluation; returns an object array of rationals"""
    if len(point) != T.n:
        raise TensorGeometryError(f"Point has {len(point)} coordinates, tensor lives in dimension {T.n}")
    values = np.empty(T.components.shape, dtype=object)
    for idx in T.indices():
        values[idx] = poly_eval(T[idx], point.coords)
    return values


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------

def metric_product_is_identity(g: TensorField, ginv: TensorField) -> bool:
    n = g.n
    for i, k in product(range(n), repeat=2):
        value = g.ring.zero
        for j in range(n):
            if g[i, j] and ginv[j, k]:
                value += g[i, j] * ginv[j, k]
        if value != (1 if i == k else 0):
            return False
    return True


def christoffel_is_symmetric(gamma: TensorField) -> bool:
    n = gamma.n
    return all(gamma[k, i, j] == gamma[k, j, i] for k, i, j in product(range(n), repeat=3))


def riemann_symmetry_violations(Rl: TensorField) -> List[str]:
    """Names of the algebraic curvature identities that fail (empty when all hold)"""
    n = Rl.n
    failures = []
    checks = {
        'antisymmetry_ij': lambda i, j, k, l: Rl[i, j, k, l] == -Rl[j, i, k, l],
        'antisymmetry_kl': lambda i, j, k, l: Rl[i, j, k, l] == -Rl[i, j, l, k],
        'pair_symmetry': lambda i, j, k, l: Rl[i, j, k, l] == Rl[k, l, i, j],
        'first_bianchi': lambda i, j, k, l: not (Rl[i, j, k, l] + Rl[j, k, i, l] + Rl[k, i, j, l]),
    }
    for name, holds in checks.items():
        if not all(holds(*idx) for idx in product(range(n), repeat=4)):
            failures.append(name)
    return failures


def second_bianchi_holds(nabla_riemann: TensorField) -> bool:
    """R_{ijkl;m} + R_{jmkl;i} + R_{mikl;j} = 0"""
    D = nabla_riemann
    n = D.n
    for i, j, k, l, m in product(range(n), repeat=5):
        if D[i, j, k, l, m] + D[j, m, k, l, i] + D[m, i, k, l, j]:
            return False
    return True


def is_trace_free(W: TensorField, ginv: TensorField) -> bool:
    """g^{ik} W_{ijkl} = 0 for all j, l"""
    n = W.n
    ginv_nonzero = [(i, k, ginv[i, k]) for i, k in product(range(n), repeat=2) if ginv[i, k]]
    for j, l in product(range(n), repeat=2):
        value = W.ring.zero
        for i, k, gik in ginv_nonzero:
            if W[i, j, k, l]:
                value += gik * W[i, j, k, l]
        if value:
            return False
    return True


def is_ricci_recurrent(ricci: TensorField, nabla_ricci: TensorField) -> bool:
    """
    ∇Ric = Ric ⊗ ω for some 1-form ω, tested against a nonzero reference
    component by exact cross-multiplication. A vanishing Ricci tensor is
    recurrent exactly when ∇Ric vanishes too.
    """
    n = ricci.n
    reference = next((idx for idx, _ in ricci.nonzero_items()), None)
    if reference is None:
        return nabla_ricci.is_zero()
    a, b = reference
    for k, l, m in product(range(n), repeat=3):
        if ricci[a, b] * nabla_ricci[k, l, m] != ricci[k, l] * nabla_ricci[a, b, m]:
            return False
    return True


@dataclass
class Curvature:
    """Every tensor the generic pipeline derives from one metric"""
    g: TensorField
    ginv: TensorField
    gamma: TensorField
    riemann_upper: TensorField
    riemann: TensorField
    ricci: TensorField
    scalar: MultiPoly
    weyl: Optional[TensorField]
    _derivatives: Dict[str, TensorField] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.g.n

    def nabla(self, name: str) -> TensorField:
        """Cached covariant derivative of 'g', 'riemann', 'ricci' or 'weyl'"""
        if name not in self._derivatives:
            tensor = getattr(self, name)
            if tensor is None:
                raise TensorGeometryError(f"No {name} tensor to differentiate")
            logger.debug(f"Computing covariant derivative of {name} (n={self.n})")
            self._derivatives[name] = covariant_derivative(tensor, self.gamma)
        return self._derivatives[name]


def compute_curvature(g: TensorField) -> Curvature:
    """Factory: run the full generic pipeline on a polynomial metric"""
    logger.info(f"Computing curvature of {g.n}-dimensional metric")
    ginv = invert_metric(g)
    gamma = christoffel(g, ginv)
    riemann_upper, riemann_lower = riemann(gamma, g)
    ricci, scalar = ricci_and_scalar(riemann_upper, ginv)
    W = weyl(g, ginv, riemann_lower, ricci, scalar) if g.n >= 4 else None
    return Curvature(g, ginv, gamma, riemann_upper, riemann_lower, ricci, scalar, W)
