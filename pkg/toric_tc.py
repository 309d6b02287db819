# toric_tc.py
"""
Toric test configurations from a concave piecewise-affine roof g on a moment
polytope P: the roof polytope, weight measures, the induced filtration and F0.

Sign convention: the section t has weight -1, so the height of the roof
enters weights with a positive sign. Weights at finite k are
floor(k * g(alpha / k)).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

from errors import DegeneratePolytopeError, InvalidParameterError, NegativeRoofError, ValidationError
from filtration import WeightFiltration
from measures import MeasureOnR, moment
from parallel import ordered_map
from polytope import (
    AffineForm,
    ConcavePLFunction,
    LatticePoint,
    RationalPolytope,
    dilate,
    integrate_pl,
    lattice_points,
)
from rationals import dot, fraction_to_str, to_vector, vector_to_str
from settings import DEFAULT_F0_DEGREES

logger = logging.getLogger(__name__)

__all__ = [
    'AffineForm', 'ConcavePLFunction', 'ToricTestConfiguration', 'roof_polytope', 'weight_measure',
    'toric_filtration', 'f0_invariant', 'product_configuration', 'trivial_configuration',
    'weight_total', 'dimension', 'weight_bound_holds', 'transform_deviation',
]


@dataclass(frozen=True)
class ToricTestConfiguration:
    base: ConcavePLFunction
    scale: Optional[int] = None

    def __post_init__(self):
        if self.base.min_value < 0:
            raise NegativeRoofError(
                f"Roof function takes the negative value {self.base.min_value} on P", subject=self.base
            )
        if self.scale is not None and (not isinstance(self.scale, int) or self.scale < 1):
            raise ValidationError(f"Scale must be a positive integer, got {self.scale!r}")
        if not self.base.domain.is_integral:
            logger.warning("Moment polytope is not integral; lattice counts need not equal dim H0(kL)")

    @property
    def P(self) -> RationalPolytope:
        return self.base.domain

    @property
    def g(self) -> ConcavePLFunction:
        return self.base

    @property
    def integral_scale(self) -> int:
        """Smallest r making every vertex of the roof polytope of r*g integral."""
        if self.scale is not None:
            return self.scale
        denominators = [x.denominator for v in roof_polytope(self).vertices for x in v]
        return reduce(lambda u, v: u * v // math.gcd(u, v), denominators, 1)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ToricTestConfiguration':
        if not isinstance(data, dict) or 'polytope' not in data or 'g' not in data:
            raise ValidationError("Test configuration JSON needs 'polytope' and 'g'", subject=data)
        P = RationalPolytope.from_dict(data['polytope'])
        return cls(ConcavePLFunction.from_dict(data['g'], P), data.get('scale'))

    def to_dict(self) -> Dict[str, Any]:
        data = {'polytope': self.P.to_dict(), 'g': self.g.to_dict()}
        if self.scale is not None:
            data['scale'] = self.scale
        return data

    def weight(self, k: int, alpha: Sequence[int]) -> int:
        """floor(k * g(alpha / k)), computed as floor(min(a.alpha + k*b))."""
        return math.floor(min(dot(p.a, alpha) + k * p.b for p in self.g.pieces))


def product_configuration(P: RationalPolytope, direction: Sequence[Any]) -> ToricTestConfiguration:
    """Product configuration of a one-parameter subgroup: g(x) = l.x - min_P l.x."""
    direction = to_vector(direction)
    if len(direction) != P.dim:
        raise ValidationError(f"Direction {vector_to_str(direction)} does not match dimension {P.dim}")
    shift = min(dot(direction, v) for v in P.vertices)
    return ToricTestConfiguration(ConcavePLFunction(P, (AffineForm(direction, -shift),)))


def trivial_configuration(P: RationalPolytope) -> ToricTestConfiguration:
    return ToricTestConfiguration(ConcavePLFunction.constant(P, 0))


# Operations

def roof_polytope(T: ToricTestConfiguration) -> RationalPolytope:
    """Q = {(x, y) : x in P, 0 <= y <= g(x)}."""
    n = T.P.dim
    rows = [(a + (Fraction(0),), b) for a, b in T.P.inequalities]
    rows.append(((Fraction(0),) * n + (Fraction(-1),), Fraction(0)))
    rows.extend((tuple(-x for x in p.a) + (Fraction(1),), p.b) for p in T.g.pieces)
    return RationalPolytope.from_inequalities(n + 1, rows)


def _weights(T: ToricTestConfiguration, k: int) -> List[Tuple[LatticePoint, int]]:
    if k < 1:
        raise InvalidParameterError(f"Degree must be >= 1, got {k}")
    return [(alpha, T.weight(k, alpha)) for alpha in lattice_points(dilate(T.P, k))]


def weight_measure(T: ToricTestConfiguration, k: int) -> Tuple[MeasureOnR, MeasureOnR]:
    """(mu(T,k), rescaled mu): unit atoms at the weights, then atoms at eta/k of mass 1/k^n."""
    raw = MeasureOnR.atomic((w, 1) for _, w in _weights(T, k))
    normalized = raw.relocated(Fraction(1, k)).scaled(Fraction(1, k ** T.P.dim))
    logger.debug(f"Weight measure at k={k}: {len(raw.atoms)} distinct weights, mass {raw.total_mass}")
    return raw, normalized


def weight_total(T: ToricTestConfiguration, k: int) -> Fraction:
    """w_k, the total weight: first moment of mu(T,k)."""
    return moment(weight_measure(T, k)[0], 1)


def dimension(T: ToricTestConfiguration, k: int) -> int:
    """d_k = |kP cap Z^n|"""
    return len(lattice_points(dilate(T.P, k)))


def toric_filtration(T: ToricTestConfiguration, degree_bound: int) -> WeightFiltration:
    if degree_bound < 1:
        raise InvalidParameterError(f"Degree bound must be >= 1, got {degree_bound}")
    bound = max(abs(T.g.min_value), abs(T.g.max_value))
    return WeightFiltration.from_function(T.P, T.weight, range(1, degree_bound + 1), bound_constant=bound)


def weight_bound_holds(T: ToricTestConfiguration, k: int) -> bool:
    raw, _ = weight_measure(T, k)
    return not raw.atoms or raw.atoms[-1][0] <= k * T.g.max_value


@dataclass(frozen=True)
class TransformDeviation:
    k: int
    max_gap: Fraction
    within_bound: bool
    exact_on_integral: bool


def transform_deviation(T: ToricTestConfiguration, k: int) -> TransformDeviation:
    """Compare w_k(alpha)/k with g(alpha/k): below by less than 1/k, equal where k*g(alpha/k) is an integer."""
    gaps = []
    exact = True
    for alpha, w in _weights(T, k):
        exact_value = T.g(tuple(Fraction(a, k) for a in alpha))
        gap = exact_value - Fraction(w, k)
        gaps.append(gap)
        if (k * exact_value).denominator == 1 and gap != 0:
            exact = False
    within = all(0 <= gap < Fraction(1, k) for gap in gaps)
    return TransformDeviation(k, max(gaps), within, exact)


@dataclass(frozen=True)
class F0Row:
    k: int
    w_k: Fraction
    d_k: int

    @property
    def ratio(self) -> Fraction:
        return self.w_k / (self.k * self.d_k)


@dataclass(frozen=True)
class F0Report:
    f0: Fraction
    rows: Tuple[F0Row, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'f0': fraction_to_str(self.f0),
            'table': [{'k': r.k, 'w_k': fraction_to_str(r.w_k), 'd_k': r.d_k,
                       'ratio': fraction_to_str(r.ratio)} for r in self.rows],
        }


def f0_invariant(T: ToricTestConfiguration, k_list: Sequence[int] = DEFAULT_F0_DEGREES) -> F0Report:
    """F0 = integral of g over P divided by volume(P), with the exact finite-k ratios w_k / (k d_k)."""
    P = T.P
    if not P.is_full_dimensional:
        raise DegeneratePolytopeError("F0 needs a full-dimensional moment polytope", subject=P)
    f0 = integrate_pl(T.g) / P.volume

    def row(k: int) -> F0Row:
        raw, _ = weight_measure(T, k)
        return F0Row(k, moment(raw, 1), int(raw.total_mass))

    rows = tuple(ordered_map(row, list(k_list)))
    logger.info(f"F0 = {f0}")
    return F0Report(f0, rows)
