# okounkov.py
"""Okounkov bodies of finitely generated graded semigroups and the lowest-term valuation."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy as sp

from errors import (
    DimensionMismatchError,
    EmptyGradingError,
    InvalidParameterError,
    NonIntegralPolytopeError,
    UnboundedPolytopeError,
    ValidationError,
    ZeroSectionError,
)
from parallel import ordered_map
from polytope import RationalPolytope, lattice_points, vertex_hausdorff_bound
from rationals import from_sympy, to_fraction, to_int_vector, to_sympy, to_vector, vector_to_str

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RationalCone:
    """Nonnegative rational combinations of the generators."""
    generators: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.generators:
            raise ValidationError("A cone needs at least one generator")
        object.__setattr__(self, 'generators', tuple(to_vector(g) for g in self.generators))

    def slice_at_height(self, height: Any = 1) -> RationalPolytope:
        """{alpha : (alpha, height) in the cone} for a cone with compact slices."""
        height = to_fraction(height)
        if height <= 0:
            raise InvalidParameterError(f"Slice height must be positive, got {height}")
        points = []
        for g in self.generators:
            if g[-1] > 0:
                points.append(tuple(x * height / g[-1] for x in g[:-1]))
            elif any(g):
                # Height-zero rays are recession directions of every slice
                raise UnboundedPolytopeError(
                    f"Generator {vector_to_str(g)} has zero degree; the slice is not compact", subject=g
                )
        if not points:
            raise EmptyGradingError("empty grading", subject=self.generators)
        return RationalPolytope.from_vertices(points, dim=len(self.generators[0]) - 1)


@dataclass(frozen=True)
class FiniteSemigroup:
    """Sub-semigroup of N^(n+1) generated by finitely many vectors; the last coordinate is the degree."""
    ambient: int
    generators: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.ambient < 2:
            raise InvalidParameterError(f"Ambient dimension must be >= 2, got {self.ambient}")
        generators = []
        for g in self.generators:
            g = to_int_vector(g)
            if len(g) != self.ambient:
                raise DimensionMismatchError(f"Generator {list(g)} does not have length {self.ambient}", subject=g)
            if any(x < 0 for x in g):
                raise ValidationError(f"Generator {list(g)} has a negative entry", subject=g)
            generators.append(g)
        object.__setattr__(self, 'generators', tuple(dict.fromkeys(generators)))

    @property
    def n(self) -> int:
        return self.ambient - 1

    @property
    def cone(self) -> RationalCone:
        return RationalCone(tuple(tuple(Fraction(x) for x in g) for g in self.generators))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FiniteSemigroup':
        if not isinstance(data, dict) or 'generators' not in data:
            raise ValidationError("Semigroup JSON needs 'generators'", subject=data)
        generators = data['generators']
        if not generators:
            raise ValidationError("Semigroup JSON has no generators")
        ambient = data.get('ambient', len(generators[0]))
        return cls(ambient, tuple(tuple(g) for g in generators))

    def to_dict(self) -> Dict[str, Any]:
        return {'ambient': self.ambient, 'generators': [list(g) for g in self.generators]}


@dataclass(frozen=True, order=True)
class MultiIndex:
    exponents: Tuple[int, ...]

    def __post_init__(self):
        exponents = to_int_vector(self.exponents)
        if any(x < 0 for x in exponents):
            raise ValidationError(f"Multi-index {list(exponents)} has a negative entry")
        object.__setattr__(self, 'exponents', exponents)

    def __add__(self, other: 'MultiIndex') -> 'MultiIndex':
        if len(self.exponents) != len(other.exponents):
            raise DimensionMismatchError("Multi-indices of different lengths")
        return MultiIndex(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __len__(self) -> int:
        return len(self.exponents)


Terms = Union[Dict[Any, Any], Iterable[Tuple[Any, Any]]]


def _parse_terms(terms: Terms) -> List[Tuple[MultiIndex, Fraction]]:
    items = terms.items() if isinstance(terms, dict) else terms
    parsed: List[Tuple[MultiIndex, Fraction]] = []
    seen = set()
    for index, coeff in items:
        index = index if isinstance(index, MultiIndex) else MultiIndex(tuple(index))
        coeff = to_fraction(coeff)
        if coeff == 0:
            raise ValidationError(f"Term {list(index.exponents)} has zero coefficient")
        if index in seen:
            raise ValidationError(f"Multi-index {list(index.exponents)} appears twice")
        seen.add(index)
        parsed.append((index, coeff))
    if parsed and len({len(i) for i, _ in parsed}) > 1:
        raise DimensionMismatchError("Multi-indices of different lengths in one section")
    return parsed


# Operations

def okounkov_body(S: FiniteSemigroup) -> RationalPolytope:
    """Height-one slice of the cone spanned by the generators."""
    body = S.cone.slice_at_height(1)
    logger.info(f"Okounkov body of {len(S.generators)} generators: {body!r}")
    return body


def _levels(S: FiniteSemigroup, k: int) -> List[set]:
    """levels[d] = {alpha : (alpha, d) is a sum of generators}, d = 0..k."""
    for g in S.generators:
        if g[-1] == 0 and any(g):
            raise UnboundedPolytopeError(f"Generator {list(g)} has zero degree", subject=g)
    graded = [g for g in S.generators if g[-1] > 0]
    levels: List[set] = [{(0,) * S.n}]
    for d in range(1, k + 1):
        level = set()
        for g in graded:
            h = g[-1]
            if h > d:
                continue
            level.update(tuple(a + b for a, b in zip(alpha, g[:-1])) for alpha in levels[d - h])
        levels.append(level)
    return levels


def delta_k(S: FiniteSemigroup, k: int) -> List[Tuple[Fraction, ...]]:
    """{alpha : (k*alpha, k) in the semigroup}, lexicographically sorted, denominators k."""
    if k < 1:
        raise InvalidParameterError(f"Degree must be >= 1, got {k}")
    points = _levels(S, k)[k]
    return sorted(tuple(Fraction(a, k) for a in alpha) for alpha in points)


def lowest_term_valuation(terms: Terms) -> MultiIndex:
    """Lexicographically smallest multi-index with a nonzero coefficient."""
    parsed = _parse_terms(terms)
    if not parsed:
        raise ZeroSectionError("zero section has no valuation")
    return min(index for index, _ in parsed)


def multiply_sections(s: Terms, t: Terms) -> List[Tuple[MultiIndex, Fraction]]:
    """Exact product of two sections in monomial form."""
    left, right = _parse_terms(s), _parse_terms(t)
    if not left or not right:
        return []
    n = len(left[0][0])
    if len(right[0][0]) != n:
        raise DimensionMismatchError("Sections live in different numbers of variables")
    gens = sp.symbols(f"z1:{n + 1}")
    p = sp.Poly.from_dict({i.exponents: to_sympy(c) for i, c in left}, *gens, domain=sp.QQ)
    q = sp.Poly.from_dict({i.exponents: to_sympy(c) for i, c in right}, *gens, domain=sp.QQ)
    return sorted((MultiIndex(tuple(monom)), from_sympy(coeff)) for monom, coeff in (p * q).terms())


def toric_semigroup(P: RationalPolytope) -> FiniteSemigroup:
    """Generated by (alpha, 1) for the lattice points alpha of an integral polytope."""
    if P.is_empty or not P.is_integral:
        raise NonIntegralPolytopeError("Toric semigroups need a nonempty integral polytope", subject=P)
    return FiniteSemigroup(P.dim + 1, tuple(alpha + (1,) for alpha in lattice_points(P)))


def delta_k_hull(S: FiniteSemigroup, k_max: int) -> RationalPolytope:
    if k_max < 1:
        raise InvalidParameterError(f"k_max must be >= 1, got {k_max}")
    levels = _levels(S, k_max)
    points = {tuple(Fraction(a, k) for a in alpha) for k in range(1, k_max + 1) for alpha in levels[k]}
    if not points:
        return RationalPolytope.empty(S.n)
    return RationalPolytope.from_vertices(points, dim=S.n)


def hull_gap(S: FiniteSemigroup, k_max: int) -> Fraction:
    """How far the vertices of the body are from the hull of the Delta_k, k <= k_max (sup-norm)."""
    gap = vertex_hausdorff_bound(delta_k_hull(S, k_max), okounkov_body(S))
    logger.debug(f"Hull gap at k_max={k_max}: {gap}")
    return gap


def delta_additivity_violation(S: FiniteSemigroup, k_max: int) -> Optional[Tuple[int, int, Tuple, Tuple]]:
    """First (k, m, alpha, beta) with (k*alpha + m*beta)/(k+m) missing from Delta_{k+m}, for k, m <= k_max."""
    levels = _levels(S, 2 * k_max)

    def scan(k: int):
        for m in range(1, k_max + 1):
            for alpha in sorted(levels[k]):
                for beta in sorted(levels[m]):
                    if tuple(a + b for a, b in zip(alpha, beta)) not in levels[k + m]:
                        return (k, m,
                                tuple(Fraction(a, k) for a in alpha),
                                tuple(Fraction(b, m) for b in beta))
        return None

    for found in ordered_map(scan, range(1, k_max + 1)):
        if found is not None:
            return found
    return None
