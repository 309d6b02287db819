# normal_cone.py
"""
Deformation to the normal cone of a torus-invariant divisor Z on a toric
variety. Coordinates are adapted so that Z is the facet {x_i = 0} of P for
the configured facet coordinate i; the Okounkov coordinate x_i is the
vanishing order along Z.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy as sp

from errors import (
    DegreeOutOfRangeError,
    InvalidParameterError,
    NormalConeDatumError,
    ParameterRangeError,
    ValidationError,
)
from filtration import WeightFiltration, dim_filtration
from measures import DensityPiece, MeasureOnR, T
from parallel import ordered_map
from polytope import AffineForm, ConcavePLFunction, LatticePoint, RationalPolytope, dilate, lattice_points, superlevel_set
from rationals import fraction_to_str, from_sympy, to_fraction, to_sympy

logger = logging.getLogger(__name__)

A = sp.Symbol('a')


@dataclass(frozen=True)
class NormalConeDatum:
    base: RationalPolytope
    c: Fraction
    facet_coordinate: int = 1

    def __post_init__(self):
        c = to_fraction(self.c)
        object.__setattr__(self, 'c', c)
        P = self.base
        if not isinstance(self.facet_coordinate, int) or not 1 <= self.facet_coordinate <= P.dim:
            raise ValidationError(f"facet_coordinate must be in 1..{P.dim}, got {self.facet_coordinate!r}")
        if c <= 0:
            raise NormalConeDatumError(f"c must be positive, got {c}", subject=c)
        if not P.is_full_dimensional or not P.is_integral:
            raise NormalConeDatumError("Moment polytope must be integral and full-dimensional", subject=P)
        i = self.index
        if P.coordinate_range(i)[0] != 0 or not P.facet_supported_on(i, 0):
            raise NormalConeDatumError(f"P has no facet on x{self.facet_coordinate} = 0 bounding it below", subject=P)
        # P_a contains P_c for a <= c, so one check covers the whole range
        sliced = self._slice(c)
        if not sliced.is_full_dimensional:
            raise NormalConeDatumError(f"L - cZ is not ample: P_c is not full-dimensional for c = {c}", subject=sliced)

    @property
    def index(self) -> int:
        return self.facet_coordinate - 1

    def _slice(self, a: Fraction) -> RationalPolytope:
        e = tuple(Fraction(-1 if j == self.index else 0) for j in range(self.base.dim))
        return self.base.intersect([(e, -a)])

    def with_c(self, c: Any) -> 'NormalConeDatum':
        return NormalConeDatum(self.base, to_fraction(c), self.facet_coordinate)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'NormalConeDatum':
        if not isinstance(data, dict) or 'polytope' not in data or 'c' not in data:
            raise ValidationError("Normal-cone JSON needs 'polytope' and 'c'", subject=data)
        return cls(RationalPolytope.from_dict(data['polytope']), to_fraction(data['c']),
                   data.get('facet_coordinate', 1))

    def to_dict(self) -> Dict[str, Any]:
        return {'polytope': self.base.to_dict(), 'c': fraction_to_str(self.c),
                'facet_coordinate': self.facet_coordinate}


def g_ck(c: Any, k: int, eta: int) -> int:
    """ceil(max(eta + c*k, 0)), the power of the ideal of Z in F_eta H^0(kL)."""
    return math.ceil(max(eta + to_fraction(c) * k, 0))


# Operations

def shrunken_polytope(D: NormalConeDatum, a: Any) -> RationalPolytope:
    """P_a = P cap {x_i >= a}, the polytope of L - aZ."""
    a = to_fraction(a)
    if not 0 <= a <= D.c:
        raise ParameterRangeError(f"a = {a} lies outside [0, {D.c}]", subject=a)
    return D._slice(a)


def materialized_degrees(D: NormalConeDatum, degree_bound: int) -> Tuple[List[int], List[int]]:
    """Degrees k <= degree_bound split into those with c*k integral and the skipped rest."""
    kept, skipped = [], []
    for k in range(1, degree_bound + 1):
        (kept if (D.c * k).denominator == 1 else skipped).append(k)
    return kept, skipped


def normal_cone_filtration(D: NormalConeDatum, degree_bound: int) -> WeightFiltration:
    """w_k(alpha) = min(alpha_i - c*k, 0), materialized for the degrees with c*k integral."""
    if degree_bound < 1:
        raise InvalidParameterError(f"Degree bound must be >= 1, got {degree_bound}")
    kept, skipped = materialized_degrees(D, degree_bound)
    if skipped:
        logger.warning(f"Skipping degrees {skipped}: c*k is not an integer for c = {D.c}")
    if not kept:
        raise DegreeOutOfRangeError(f"No degree up to {degree_bound} has c*k integral for c = {D.c}")
    i = D.index

    def weight(k: int, alpha: LatticePoint) -> int:
        return int(min(alpha[i] - D.c * k, 0))

    return WeightFiltration.from_function(D.base, weight, kept, bound_constant=D.c)


def ideal_dimension(D: NormalConeDatum, k: int, eta: int) -> int:
    """dim H^0(kL tensor J_Z^{g_ck(eta)}): lattice points of kP vanishing to order g_ck(eta) along Z."""
    points = lattice_points(dilate(D.base, k))
    if eta > 0:
        return 0
    order = g_ck(D.c, k, eta)
    return sum(1 for alpha in points if alpha[D.index] >= order)


def filtration_identity_holds(D: NormalConeDatum, k: int, F: Optional[WeightFiltration] = None) -> bool:
    """dim F_eta H^0(kL) = dim H^0(kL tensor J_Z^{g_ck(eta)}) for every integer eta in [-ck-1, 1]."""
    if (D.c * k).denominator != 1:
        raise DegreeOutOfRangeError(f"c*k is not an integer for k = {k}", subject=k)
    F = F or normal_cone_filtration(D, k)
    ck = int(D.c * k)
    return all(dim_filtration(F, k, eta) == ideal_dimension(D, k, eta) for eta in range(-ck - 1, 2))


def normal_cone_transform(D: NormalConeDatum) -> ConcavePLFunction:
    """min(x_i - c, 0) on P."""
    n = D.base.dim
    e = tuple(Fraction(int(j == D.index)) for j in range(n))
    return ConcavePLFunction(D.base, (AffineForm(e, -D.c), AffineForm((Fraction(0),) * n, Fraction(0))))


@dataclass(frozen=True)
class VolumePiece:
    """volume(P_a) = sum coeffs[j] * a^j for a in [low, high]."""
    low: Fraction
    high: Fraction
    coeffs: Tuple[Fraction, ...]

    @property
    def poly(self) -> sp.Poly:
        return sp.Poly([to_sympy(x) for x in reversed(self.coeffs)] or [0], A, domain=sp.QQ)


def volume_polynomial(D: NormalConeDatum) -> List[VolumePiece]:
    """a -> volume(P_a) on [0, c], interpolated between consecutive vertex coordinates."""
    n = D.base.dim
    cuts = {Fraction(0), D.c}
    cuts.update(v[D.index] for v in D.base.vertices if 0 < v[D.index] < D.c)
    cuts = sorted(cuts)

    def piece(interval: Tuple[Fraction, Fraction]) -> VolumePiece:
        low, high = interval
        # volume(P_a) is continuous on [0, c] because P_c is full-dimensional
        nodes = [low + (high - low) * Fraction(j, n) for j in range(n + 1)]
        data = [(to_sympy(a), to_sympy(D._slice(a).volume)) for a in nodes]
        poly = sp.Poly(sp.interpolate(data, A), A, domain=sp.QQ)
        coeffs = [from_sympy(x) for x in reversed(poly.all_coeffs())]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return VolumePiece(low, high, tuple(coeffs))

    return ordered_map(piece, list(zip(cuts, cuts[1:])))


def normal_cone_pushforward(D: NormalConeDatum) -> MeasureOnR:
    """volume(P_c) at 0 plus the density -d/dx volume(P_{x+c}) on [-c, 0]."""
    pieces = []
    for vp in volume_polynomial(D):
        derivative = -vp.poly.diff(A)
        shifted = sp.Poly(derivative.as_expr().subs(A, T + to_sympy(D.c)), T, domain=sp.QQ)
        coeffs = tuple(from_sympy(x) for x in reversed(shifted.all_coeffs()))
        pieces.append(DensityPiece(vp.low - D.c, vp.high - D.c, coeffs))
    measure = MeasureOnR(((Fraction(0), D._slice(D.c).volume),), tuple(pieces))
    logger.info(f"Normal-cone pushforward for c={D.c}: mass {measure.total_mass}")
    return measure


def slice_check(D: NormalConeDatum, a: Any) -> bool:
    """{min(x_i - c, 0) >= a - c} equals P_a."""
    a = to_fraction(a)
    expected = shrunken_polytope(D, a)
    return superlevel_set(normal_cone_transform(D), a - D.c) == expected


def dh_breakpoints_ok(D: NormalConeDatum, m: MeasureOnR) -> bool:
    """Interior density breakpoints of m lie in {v_i - c : v a vertex of P}."""
    if not m.pieces:
        return True
    allowed = {v[D.index] - D.c for v in D.base.vertices}
    low, high = m.pieces[0].left, m.pieces[-1].right
    ends = {x for p in m.pieces for x in (p.left, p.right)}
    return all(x in allowed for x in ends if low < x < high)
