# filtration.py
"""
Filtrations of the section ring modelled as integer weights on the
lattice-point basis: F_t H^0(kL) is spanned by the points alpha of kP with
w_k(alpha) >= t.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from errors import (
    DegreeOutOfRangeError,
    DimensionMismatchError,
    FiltrationTableError,
    InvalidParameterError,
    ValidationError,
)
from measures import MeasureOnR
from parallel import ordered_map
from polytope import ConcavePLFunction, LatticePoint, Point, RationalPolytope, dilate, lattice_points
from rationals import fraction_to_str, to_fraction, to_int_vector, vector_to_str

logger = logging.getLogger(__name__)

WeightTable = Dict[LatticePoint, int]


class WeightFiltration:
    """Per-degree integer weights w_k on the lattice points of kP.

    Degrees may be sparse; every listed degree must cover all of kP.
    """

    def __init__(self, base: RationalPolytope, table: Mapping[int, WeightTable],
                 bound_constant: Optional[Any] = None):
        if base.is_empty:
            raise ValidationError("Filtration base polytope is empty", subject=base)
        self.base = base
        self._table: Dict[int, WeightTable] = {}
        for k in sorted(table):
            if not isinstance(k, int) or k < 1:
                raise FiltrationTableError(f"Degree {k!r} is not a positive integer")
            self._table[k] = dict(sorted(table[k].items()))
        if not self._table:
            raise FiltrationTableError("Filtration has no materialized degrees")
        # A C read off the table satisfies |w_k| <= C*k by construction
        self.bound_derived = bound_constant is None
        if self.bound_derived:
            bound_constant = max(
                (Fraction(abs(w), k) for k, weights in self._table.items() for w in weights.values()),
                default=Fraction(0),
            )
        self.bound_constant = to_fraction(bound_constant)

    @classmethod
    def from_function(cls, base: RationalPolytope, fn: Callable[[int, LatticePoint], int],
                      degrees: Iterable[int], bound_constant: Optional[Any] = None) -> 'WeightFiltration':
        degrees = sorted(set(degrees))
        if not degrees or degrees[0] < 1:
            raise InvalidParameterError(f"Degrees must be positive integers, got {degrees}")

        def materialize(k: int) -> WeightTable:
            return {alpha: fn(k, alpha) for alpha in lattice_points(dilate(base, k))}

        tables = ordered_map(materialize, degrees)
        logger.debug(f"Materialized weights for degrees {degrees}")
        return cls(base, dict(zip(degrees, tables)), bound_constant)

    @classmethod
    def from_table(cls, base: RationalPolytope, weights: Mapping[Any, Iterable[Tuple[Sequence[Any], Any]]],
                   bound_constant: Optional[Any] = None) -> 'WeightFiltration':
        table: Dict[int, WeightTable] = {}
        for key, rows in weights.items():
            try:
                k = int(key)
            except (TypeError, ValueError):
                raise FiltrationTableError(f"Degree key {key!r} is not an integer")
            if k < 1:
                raise FiltrationTableError(f"Degree {k} is not positive")
            expected = set(lattice_points(dilate(base, k)))
            entries: WeightTable = {}
            for alpha, w in rows:
                alpha = to_int_vector(alpha)
                if len(alpha) != base.dim:
                    raise DimensionMismatchError(f"Point {list(alpha)} at degree {k} has the wrong length")
                if alpha not in expected:
                    raise FiltrationTableError(f"Point {list(alpha)} is not a lattice point of {k}P")
                if alpha in entries:
                    raise FiltrationTableError(f"Point {list(alpha)} appears twice at degree {k}")
                entries[alpha] = int(to_int_vector([w])[0])
            missing = expected - set(entries)
            if missing:
                raise FiltrationTableError(
                    f"Degree {k} is missing weights for {len(missing)} lattice points, e.g. {list(min(missing))}"
                )
            table[k] = entries
        return cls(base, table, bound_constant)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'WeightFiltration':
        if not isinstance(data, dict) or 'base' not in data or 'weights' not in data:
            raise ValidationError("Filtration JSON needs 'base' and 'weights'", subject=data)
        base = RationalPolytope.from_dict(data['base'])
        try:
            weights = {k: [(row[:-1], row[-1]) for row in rows] for k, rows in data['weights'].items()}
        except (AttributeError, TypeError):
            raise ValidationError("Filtration 'weights' must map degrees to [alpha..., w] rows")
        return cls.from_table(base, weights, data.get('bound'))

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'base': self.base.to_dict(),
            'weights': {str(k): [list(alpha) + [w] for alpha, w in table.items()]
                        for k, table in self._table.items()},
        }
        if not self.bound_derived:
            data['bound'] = fraction_to_str(self.bound_constant)
        return data

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(self._table)

    @property
    def degree_bound(self) -> int:
        return self.degrees[-1]

    @property
    def dim(self) -> int:
        return self.base.dim

    def has_degree(self, k: int) -> bool:
        return k in self._table

    def weights(self, k: int) -> WeightTable:
        if k not in self._table:
            raise DegreeOutOfRangeError(
                f"Degree {k} is not materialized (degrees {list(self.degrees)})", subject=k
            )
        return self._table[k]

    def weight(self, k: int, alpha: Sequence[int]) -> int:
        return self.weights(k)[tuple(alpha)]

    def __repr__(self) -> str:
        return f"WeightFiltration(base={self.base!r}, degrees={list(self.degrees)}, C={self.bound_constant})"


@dataclass(frozen=True)
class GkFunction:
    """G_k on Delta_k: G_k(alpha / k) = w_k(alpha)."""
    k: int
    values: Tuple[Tuple[Point, int], ...]

    def value(self, point: Sequence[Any]) -> int:
        return dict(self.values)[tuple(to_fraction(x) for x in point)]

    @property
    def points(self) -> Tuple[Point, ...]:
        return tuple(p for p, _ in self.values)

    def pushforward(self) -> MeasureOnR:
        """(G_k)_* of counting measure on Delta_k: one unit atom per point."""
        return MeasureOnR.atomic((w, 1) for _, w in self.values)


# Operations

def _threshold(t: Any) -> Optional[Union[int, float]]:
    if isinstance(t, float):
        if math.isinf(t):
            return t
        if math.isnan(t):
            raise InvalidParameterError("Threshold is NaN")
        return math.ceil(Fraction(t))
    return math.ceil(to_fraction(t))


def dim_filtration(F: WeightFiltration, k: int, t: Any) -> int:
    """#{alpha in kP : w_k(alpha) >= ceil(t)}."""
    weights = F.weights(k)
    level = _threshold(t)
    return sum(1 for w in weights.values() if w >= level)


def weight_spaces(F: WeightFiltration, k: int) -> Dict[int, int]:
    """eta -> dim V_eta"""
    spaces: Dict[int, int] = {}
    for w in F.weights(k).values():
        spaces[w] = spaces.get(w, 0) + 1
    return dict(sorted(spaces.items()))


def jump_locations(F: WeightFiltration, k: int) -> List[Tuple[int, int]]:
    """(t, dim F_t - dim F_{t+}) at every t where dim F_t drops."""
    return [(eta, dim_filtration(F, k, eta) - dim_filtration(F, k, eta + 1))
            for eta in weight_spaces(F, k)]


def nu_measure(F: WeightFiltration, k: int) -> MeasureOnR:
    """Atoms w_k(alpha)/k of mass 1/k^n."""
    mass = Fraction(1, k ** F.dim)
    return MeasureOnR.atomic((Fraction(w, k), mass) for w in F.weights(k).values())


def gk_function(F: WeightFiltration, k: int) -> GkFunction:
    values = tuple((tuple(Fraction(a, k) for a in alpha), w) for alpha, w in F.weights(k).items())
    return GkFunction(k, tuple(sorted(values)))


@dataclass(frozen=True)
class EnvelopeSample:
    point: Point
    value: Fraction
    degree: int
    on_boundary: bool


@dataclass(frozen=True)
class EnvelopeEstimate:
    function: ConcavePLFunction
    samples: Tuple[EnvelopeSample, ...]

    @property
    def extrapolated(self) -> int:
        return sum(1 for s in self.samples if s.on_boundary)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'domain': self.function.domain.to_dict(),
            'g': self.function.to_dict(),
            'samples': len(self.samples),
            'extrapolated': self.extrapolated,
        }

    def sample_rows(self) -> List[List[Any]]:
        return [
            vector_to_str(s.point) + [fraction_to_str(s.value), s.degree, int(s.on_boundary)]
            for s in self.samples
        ]


def concave_transform_estimate(F: WeightFiltration, k_list: Sequence[int]) -> EnvelopeEstimate:
    """Upper concave envelope of the points (alpha/k, w_k(alpha)/k) over the sampled degrees.

    Samples on the boundary of the base polytope are flagged; there the
    envelope is an extension of the data, not a limit.
    """
    k_list = sorted(set(k_list))
    if not k_list:
        raise InvalidParameterError("empty sample: no degrees given")
    samples = []
    for k in k_list:
        for point, w in gk_function(F, k).values:
            samples.append((point, Fraction(w, k), k))

    lifted = RationalPolytope.from_vertices([p + (v,) for p, v, _ in samples], dim=F.dim + 1)
    domain = RationalPolytope.from_vertices([p for p, _, _ in samples], dim=F.dim)
    pieces = []
    for a, b in lifted.inequalities:
        a_y = a[-1]
        if a_y > 0:
            pieces.append((tuple(-x / a_y for x in a[:-1]), b / a_y))
    envelope = ConcavePLFunction.of(domain, pieces)

    facets = [(a, b) for a, b in F.base.inequalities
              if not all(sum(x * y for x, y in zip(a, v)) == b for v in F.base.vertices)]
    flagged = tuple(
        EnvelopeSample(p, v, k, any(sum(x * y for x, y in zip(a, p)) == b for a, b in facets))
        for p, v, k in samples
    )
    estimate = EnvelopeEstimate(envelope, flagged)
    if estimate.extrapolated:
        logger.warning(f"{estimate.extrapolated} of {len(flagged)} samples lie on the boundary and are extrapolated")
    logger.info(f"Envelope from degrees {k_list}: {len(envelope.pieces)} pieces")
    return estimate


@dataclass(frozen=True)
class Counterexample:
    k: int
    m: int
    alpha: LatticePoint
    beta: LatticePoint
    combined: int
    separate: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k, 'm': self.m,
            'alpha': list(self.alpha), 'beta': list(self.beta),
            'w_k_plus_m': self.combined, 'w_k_plus_w_m': self.separate,
        }


@dataclass(frozen=True)
class AdmissibilityReport:
    k_max: int
    passed: bool
    counterexample: Optional[Counterexample] = None
    bound_violation: Optional[Tuple[int, LatticePoint, int]] = None
    bound_constant: Fraction = Fraction(0)
    bound_derived: bool = False

    def to_dict(self) -> Dict[str, Any]:
        report = {
            'k_max': self.k_max,
            'passed': self.passed,
            'bound_constant': fraction_to_str(self.bound_constant),
            'bound_derived': self.bound_derived,
            'counterexample': self.counterexample.to_dict() if self.counterexample else None,
            'bound_violation': None,
        }
        if self.bound_violation:
            k, alpha, w = self.bound_violation
            report['bound_violation'] = {'k': k, 'alpha': list(alpha), 'w': w}
        return report


def check_admissible(F: WeightFiltration, k_max: int) -> AdmissibilityReport:
    """Superadditivity w_{k+m}(a+b) >= w_k(a) + w_m(b) for k + m <= k_max, and |w_k| <= C*k.

    Pairs are scanned with k <= m, then alpha and beta lexicographically, so
    the reported counterexample is the first one in that order. When C was
    derived from the table itself the bound half cannot fail; the report
    flags this with bound_derived.
    """
    if k_max < 1:
        raise InvalidParameterError(f"k_max must be >= 1, got {k_max}")
    if k_max > F.degree_bound:
        raise DegreeOutOfRangeError(f"k_max={k_max} exceeds the materialized bound {F.degree_bound}", subject=k_max)

    pairs = [(k, m) for k in range(1, k_max + 1) for m in range(k, k_max + 1 - k)
             if F.has_degree(k) and F.has_degree(m) and F.has_degree(k + m)]

    def scan(pair: Tuple[int, int]) -> Optional[Counterexample]:
        k, m = pair
        wk, wm, wkm = F.weights(k), F.weights(m), F.weights(k + m)
        for alpha, a in wk.items():
            for beta, b in wm.items():
                if k == m and beta < alpha:
                    continue
                combined = wkm[tuple(x + y for x, y in zip(alpha, beta))]
                if combined < a + b:
                    return Counterexample(k, m, alpha, beta, combined, a + b)
        return None

    counterexample = next((c for c in ordered_map(scan, pairs) if c is not None), None)

    bound_violation = None
    for k in F.degrees:
        if k > k_max:
            break
        for alpha, w in F.weights(k).items():
            if abs(w) > F.bound_constant * k:
                bound_violation = (k, alpha, w)
                break
        if bound_violation:
            break

    report = AdmissibilityReport(k_max, counterexample is None and bound_violation is None,
                                 counterexample, bound_violation, F.bound_constant, F.bound_derived)
    if F.bound_derived:
        logger.info(f"No bound constant supplied; C={F.bound_constant} was derived from the weights")
    if report.passed:
        logger.info(f"Filtration admissible up to k_max={k_max} ({len(pairs)} degree pairs)")
    else:
        logger.warning(f"Filtration fails admissibility: {report.to_dict()}")
    return report
