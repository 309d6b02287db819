# polytope.py
"""
Exact rational polytopes.

The H-representation is primary. Vertices come from exact double description
(pycddlib with fraction arithmetic) and are used to drop redundant inequalities,
to triangulate, and to decide equality of polytopes by mutual inclusion.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import cdd
import sympy as sp

from errors import (
    DegeneratePolytopeError,
    DimensionMismatchError,
    InvalidParameterError,
    UnboundedPolytopeError,
    ValidationError,
)
from parallel import ordered_map
from rationals import dot, fraction_to_str, to_fraction, to_sympy, to_vector, from_sympy, vector_to_str

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]
Inequality = Tuple[Tuple[Fraction, ...], Fraction]
LatticePoint = Tuple[int, ...]


def _normalize_inequality(a: Sequence[Fraction], b: Fraction) -> Inequality:
    """Scale a.x <= b by a positive factor to a primitive integer row."""
    a = tuple(Fraction(x) for x in a)
    b = Fraction(b)
    if all(x == 0 for x in a):
        return a, Fraction((b > 0) - (b < 0))
    denominators = [x.denominator for x in a] + [b.denominator]
    scale = reduce(lambda u, v: u * v // math.gcd(u, v), denominators, 1)
    ints = [int(x * scale) for x in a] + [int(b * scale)]
    divisor = reduce(math.gcd, (abs(x) for x in ints if x), 0) or 1
    return tuple(Fraction(x // divisor) for x in ints[:-1]), Fraction(ints[-1] // divisor)


@lru_cache(maxsize=8192)
def _affine_rank(points: Tuple[Point, ...]) -> int:
    """Dimension of the affine hull; -1 for no points."""
    if not points:
        return -1
    if len(points) == 1:
        return 0
    base = points[0]
    rows = [[to_sympy(x - y) for x, y in zip(p, base)] for p in points[1:]]
    return sp.Matrix(rows).rank()


def _cdd_vertices(inequalities: Sequence[Inequality]) -> List[Point]:
    """Vertex enumeration of {x : a.x <= b} in exact arithmetic."""
    rows = [[b] + [-x for x in a] for a, b in inequalities]
    mat = cdd.Matrix(rows, number_type='fraction')
    mat.rep_type = cdd.RepType.INEQUALITY
    generators = cdd.Polyhedron(mat).get_generators()
    if generators.lin_set:
        raise UnboundedPolytopeError("Inequalities admit a line; polytope is unbounded",
                                     subject=inequalities)
    vertices = set()
    for i in range(generators.row_size):
        row = [Fraction(x) for x in generators[i]]
        if row[0] == 0:
            raise UnboundedPolytopeError(f"Inequalities admit the ray {vector_to_str(row[1:])}",
                                         subject=inequalities)
        vertices.add(tuple(x / row[0] for x in row[1:]))
    return sorted(vertices)


def _cdd_hull(vertices: Sequence[Point]) -> List[Inequality]:
    """Inequalities of the convex hull of finitely many points."""
    rows = [[Fraction(1)] + list(v) for v in vertices]
    mat = cdd.Matrix(rows, number_type='fraction')
    mat.rep_type = cdd.RepType.GENERATOR
    ineqs = cdd.Polyhedron(mat).get_inequalities()
    result = []
    for i in range(ineqs.row_size):
        row = [Fraction(x) for x in ineqs[i]]
        a, b = tuple(-x for x in row[1:]), row[0]
        if all(x == 0 for x in a):
            continue
        result.append((a, b))
        if i in ineqs.lin_set:
            result.append((tuple(-x for x in a), -b))
    return result


def _canonical_inequalities(dim: int, candidates: Sequence[Inequality],
                            vertices: Sequence[Point]) -> Tuple[Inequality, ...]:
    """Keep equalities and one inequality per facet; drop everything redundant."""
    rank = _affine_rank(tuple(vertices))
    if rank < dim:
        candidates = _cdd_hull(vertices)
    kept: List[Inequality] = []
    seen_rows = set()
    seen_faces = set()
    for a, b in candidates:
        a, b = _normalize_inequality(a, b)
        if all(x == 0 for x in a):
            continue
        tight = tuple(v for v in vertices if dot(a, v) == b)
        if not tight:
            continue
        if len(tight) == len(vertices):
            if (a, b) not in seen_rows:
                seen_rows.add((a, b))
                kept.append((a, b))
            continue
        if tight in seen_faces or _affine_rank(tight) != rank - 1:
            continue
        seen_faces.add(tight)
        kept.append((a, b))
    return tuple(kept)


@dataclass(frozen=True, eq=False)
class RationalPolytope:
    """Bounded rational polytope {x : a.x <= b for every inequality}.

    Build instances with the classmethod constructors; the raw constructor
    assumes an already canonical representation.
    """
    dim: int
    inequalities: Tuple[Inequality, ...]
    vertices: Tuple[Point, ...]

    # Constructors

    @classmethod
    def from_inequalities(cls, dim: int, inequalities: Iterable[Tuple[Any, Any]]) -> 'RationalPolytope':
        if dim < 1:
            raise InvalidParameterError(f"Ambient dimension must be >= 1, got {dim}")
        rows = []
        for a, b in inequalities:
            a = to_vector(a)
            if len(a) != dim:
                raise DimensionMismatchError(f"Inequality of length {len(a)} in dimension {dim}", subject=a)
            b = to_fraction(b)
            if all(x == 0 for x in a):
                if b < 0:
                    logger.debug("Infeasible constant inequality; polytope is empty")
                    return cls.empty(dim)
                continue
            rows.append((a, b))
        if not rows:
            raise UnboundedPolytopeError("No inequalities given; the whole space is unbounded")
        vertices = _cdd_vertices(rows)
        if not vertices:
            return cls.empty(dim)
        return cls(dim, _canonical_inequalities(dim, rows, vertices), tuple(vertices))

    @classmethod
    def from_vertices(cls, points: Iterable[Sequence[Any]], dim: Optional[int] = None) -> 'RationalPolytope':
        vertices = sorted({to_vector(p) for p in points})
        if not vertices:
            if dim is None:
                raise ValidationError("Cannot infer the dimension of an empty point set")
            return cls.empty(dim)
        dim = dim if dim is not None else len(vertices[0])
        if any(len(v) != dim for v in vertices):
            raise DimensionMismatchError(f"Points must all have length {dim}", subject=vertices)
        if len(vertices) > 1:
            ineqs = _cdd_hull(vertices)
            vertices = _cdd_vertices(ineqs)
        else:
            ineqs = []
        return cls(dim, _canonical_inequalities(dim, ineqs, vertices), tuple(vertices))

    @classmethod
    def empty(cls, dim: int) -> 'RationalPolytope':
        return cls(dim, (((Fraction(0),) * dim, Fraction(-1)),), ())

    @classmethod
    def point(cls, p: Sequence[Any]) -> 'RationalPolytope':
        return cls.from_vertices([p])

    @classmethod
    def box(cls, lower: Sequence[Any], upper: Sequence[Any]) -> 'RationalPolytope':
        lower, upper = to_vector(lower), to_vector(upper)
        if len(lower) != len(upper):
            raise DimensionMismatchError("Box corners have different lengths")
        dim = len(lower)
        ineqs = []
        for i in range(dim):
            e = tuple(Fraction(int(j == i)) for j in range(dim))
            ineqs.append((e, upper[i]))
            ineqs.append((tuple(-x for x in e), -lower[i]))
        return cls.from_inequalities(dim, ineqs)

    @classmethod
    def simplex(cls, dim: int, scale: Any = 1) -> 'RationalPolytope':
        """conv{0, scale*e_1, ..., scale*e_n}"""
        scale = to_fraction(scale)
        points = [tuple(Fraction(0) for _ in range(dim))]
        for i in range(dim):
            points.append(tuple(scale if j == i else Fraction(0) for j in range(dim)))
        return cls.from_vertices(points)

    # Serialization

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RationalPolytope':
        if not isinstance(data, dict) or 'dim' not in data:
            raise ValidationError("Polytope JSON needs a 'dim' field", subject=data)
        dim = data['dim']
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise ValidationError(f"Polytope 'dim' must be an integer, got {dim!r}")
        if 'ineqs' in data:
            try:
                rows = [(row['a'], row['b']) for row in data['ineqs']]
            except (KeyError, TypeError):
                raise ValidationError("Each inequality needs 'a' and 'b'", subject=data['ineqs'])
            return cls.from_inequalities(dim, rows)
        if 'vertices' in data:
            return cls.from_vertices(data['vertices'], dim=dim)
        raise ValidationError("Polytope JSON needs 'ineqs' (or 'vertices')", subject=data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dim': self.dim,
            'ineqs': [{'a': vector_to_str(a), 'b': fraction_to_str(b)} for a, b in self.inequalities],
        }

    # Basic predicates

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def affine_dimension(self) -> int:
        return _affine_rank(self.vertices)

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dimension == self.dim

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for v in self.vertices for x in v)

    def contains(self, x: Sequence[Any]) -> bool:
        if self.is_empty:
            return False
        return all(dot(a, x) <= b for a, b in self.inequalities)

    def contains_polytope(self, other: 'RationalPolytope') -> bool:
        self._check_dim(other)
        return all(self.contains(v) for v in other.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalPolytope):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return self.contains_polytope(other) and other.contains_polytope(self)

    def __hash__(self) -> int:
        return hash((self.dim, self.vertices))

    def __repr__(self) -> str:
        shown = ', '.join('(' + ', '.join(vector_to_str(v)) + ')' for v in self.vertices[:8])
        more = ', ...' if len(self.vertices) > 8 else ''
        return f"RationalPolytope(dim={self.dim}, vertices=[{shown}{more}])"

    def _check_dim(self, other: 'RationalPolytope') -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"Dimension mismatch: {self.dim} vs {other.dim}")

    # Derived polytopes

    def intersect(self, extra: Iterable[Tuple[Any, Any]]) -> 'RationalPolytope':
        if self.is_empty:
            return self
        return RationalPolytope.from_inequalities(self.dim, list(self.inequalities) + list(extra))

    def translate(self, v: Sequence[Any]) -> 'RationalPolytope':
        v = to_vector(v)
        if len(v) != self.dim:
            raise DimensionMismatchError("Translation vector has the wrong length")
        if self.is_empty:
            return self
        ineqs = tuple(_normalize_inequality(a, b + dot(a, v)) for a, b in self.inequalities)
        vertices = tuple(sorted(tuple(x + y for x, y in zip(p, v)) for p in self.vertices))
        return RationalPolytope(self.dim, ineqs, vertices)

    def coordinate_range(self, i: int) -> Tuple[Fraction, Fraction]:
        values = [v[i] for v in self.vertices]
        return min(values), max(values)

    def facet_supported_on(self, coordinate: int, value: Any) -> bool:
        """True iff {x_coordinate = value} cuts out a facet of P (coordinate is 0-based)."""
        if self.is_empty:
            return False
        value = to_fraction(value)
        low, high = self.coordinate_range(coordinate)
        if value not in (low, high) or low == high:
            return False
        tight = tuple(v for v in self.vertices if v[coordinate] == value)
        return _affine_rank(tight) == self.affine_dimension - 1

    # Triangulation and volume

    @cached_property
    def _vertex_incidence(self) -> Tuple[frozenset, ...]:
        return tuple(
            frozenset(j for j, (a, b) in enumerate(self.inequalities) if dot(a, v) == b)
            for v in self.vertices
        )

    def _subfacets(self, face: frozenset, face_dim: int) -> List[frozenset]:
        incidence = self._vertex_incidence
        found: List[frozenset] = []
        for j in range(len(self.inequalities)):
            sub = frozenset(i for i in face if j in incidence[i])
            if not sub or sub == face or sub in found:
                continue
            if _affine_rank(tuple(self.vertices[i] for i in sorted(sub))) == face_dim - 1:
                found.append(sub)
        return found

    @cached_property
    def triangulation(self) -> Tuple[Tuple[Point, ...], ...]:
        """Pulling triangulation: cone the lowest vertex over the facets avoiding it, recursively."""
        if not self.is_full_dimensional:
            return ()

        def pull(face: frozenset, face_dim: int) -> List[Tuple[int, ...]]:
            if face_dim == 0:
                return [(min(face),)]
            apex = min(face)
            simplices = []
            for sub in self._subfacets(face, face_dim):
                if apex in sub:
                    continue
                simplices.extend((apex,) + s for s in pull(sub, face_dim - 1))
            return simplices

        indices = pull(frozenset(range(len(self.vertices))), self.dim)
        return tuple(tuple(self.vertices[i] for i in simplex) for simplex in indices)

    @cached_property
    def volume(self) -> Fraction:
        total = sum((simplex_volume(s) for s in self.triangulation), Fraction(0))
        logger.debug(f"Volume of {self!r}: {total}")
        return total


def simplex_volume(simplex: Sequence[Point]) -> Fraction:
    """|det(v_i - v_0)| / n! for an n-simplex in R^n."""
    base = simplex[0]
    n = len(base)
    rows = [[to_sympy(x - y) for x, y in zip(v, base)] for v in simplex[1:]]
    det = from_sympy(sp.Matrix(rows).det(method='bareiss'))
    return abs(det) / math.factorial(n)


# Operations

def volume(P: RationalPolytope) -> Fraction:
    """Exact Lebesgue volume; 0 for empty or lower-dimensional polytopes."""
    return P.volume


def triangulate(P: RationalPolytope) -> Tuple[Tuple[Point, ...], ...]:
    return P.triangulation


def dilate(P: RationalPolytope, k: Any) -> RationalPolytope:
    k = to_fraction(k)
    if k <= 0:
        raise InvalidParameterError(f"Dilation factor must be positive, got {k}", subject=k)
    if P.is_empty:
        return P
    ineqs = tuple(_normalize_inequality(a, k * b) for a, b in P.inequalities)
    vertices = tuple(tuple(k * x for x in v) for v in P.vertices)
    return RationalPolytope(P.dim, ineqs, vertices)


def minkowski_sum(P: RationalPolytope, Q: RationalPolytope) -> RationalPolytope:
    P._check_dim(Q)
    if P.is_empty or Q.is_empty:
        return RationalPolytope.empty(P.dim)
    sums = {tuple(x + y for x, y in zip(p, q)) for p in P.vertices for q in Q.vertices}
    return RationalPolytope.from_vertices(sums, dim=P.dim)


def lattice_points(P: RationalPolytope) -> List[LatticePoint]:
    """All integer points of P in lexicographic order."""
    if P.is_empty:
        return []
    ranges = []
    for i in range(P.dim):
        low, high = P.coordinate_range(i)
        ranges.append(range(math.ceil(low), math.floor(high) + 1))
    rows = [(tuple(int(x) for x in a), int(b)) for a, b in P.inequalities]

    def slab(first: int) -> List[LatticePoint]:
        return [
            p for p in itertools.product((first,), *ranges[1:])
            if all(sum(ai * pi for ai, pi in zip(a, p)) <= b for a, b in rows)
        ]

    # Slabs by first coordinate keep the concatenation lexicographic
    slabs = ordered_map(slab, list(ranges[0]))
    return [p for points in slabs for p in points]


def ehrhart_polynomial(P: RationalPolytope) -> sp.Poly:
    """Interpolate |kP ∩ Z^n| at k = 1..n+1; exact for integral P."""
    k = sp.Symbol('k')
    data = [(j, len(lattice_points(dilate(P, j)))) for j in range(1, P.dim + 2)]
    return sp.Poly(sp.interpolate(data, k), k, domain=sp.QQ)


def ehrhart_leading_coefficient(P: RationalPolytope) -> Fraction:
    poly = ehrhart_polynomial(P)
    k = poly.gens[0]
    return from_sympy(poly.coeff_monomial(k ** P.dim))


def vertex_hausdorff_bound(inner: RationalPolytope, outer: RationalPolytope) -> Fraction:
    """Sup-norm bound on the distance from the vertices of outer to inner."""
    inner._check_dim(outer)
    if inner.is_empty:
        raise DegeneratePolytopeError("Inner polytope is empty", subject=inner)
    return max(
        (min(max(abs(x - y) for x, y in zip(v, w)) for w in inner.vertices) for v in outer.vertices),
        default=Fraction(0),
    )


# Piecewise-affine concave functions

@dataclass(frozen=True)
class AffineForm:
    """x -> a.x + b"""
    a: Tuple[Fraction, ...]
    b: Fraction

    @classmethod
    def of(cls, a: Sequence[Any], b: Any) -> 'AffineForm':
        return cls(to_vector(a), to_fraction(b))

    @property
    def dim(self) -> int:
        return len(self.a)

    def __call__(self, x: Sequence[Any]) -> Fraction:
        return dot(self.a, x) + self.b

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AffineForm':
        try:
            return cls.of(data['a'], data['b'])
        except (KeyError, TypeError):
            raise ValidationError("Affine piece needs 'a' and 'b'", subject=data)

    def to_dict(self) -> Dict[str, Any]:
        return {'a': vector_to_str(self.a), 'b': fraction_to_str(self.b)}


@dataclass(frozen=True, eq=False)
class ConcavePLFunction:
    """Concave piecewise-affine function: the minimum of its affine pieces over a domain polytope."""
    domain: RationalPolytope
    pieces: Tuple[AffineForm, ...]

    def __post_init__(self):
        if not self.pieces:
            raise ValidationError("A piecewise-affine function needs at least one piece")
        if self.domain.is_empty:
            raise DegeneratePolytopeError("Domain polytope is empty", subject=self.domain)
        for piece in self.pieces:
            if piece.dim != self.domain.dim:
                raise DimensionMismatchError(
                    f"Piece of dimension {piece.dim} on a domain of dimension {self.domain.dim}",
                    subject=piece,
                )
        unique = tuple(dict.fromkeys(self.pieces))
        object.__setattr__(self, 'pieces', unique)

    @classmethod
    def of(cls, domain: RationalPolytope, pieces: Iterable[Tuple[Any, Any]]) -> 'ConcavePLFunction':
        return cls(domain, tuple(AffineForm.of(a, b) for a, b in pieces))

    @classmethod
    def constant(cls, domain: RationalPolytope, value: Any) -> 'ConcavePLFunction':
        return cls(domain, (AffineForm((Fraction(0),) * domain.dim, to_fraction(value)),))

    @classmethod
    def from_dict(cls, data: Dict[str, Any], domain: RationalPolytope) -> 'ConcavePLFunction':
        if not isinstance(data, dict) or 'pieces' not in data:
            raise ValidationError("Function JSON needs 'pieces'", subject=data)
        return cls(domain, tuple(AffineForm.from_dict(p) for p in data['pieces']))

    def to_dict(self) -> Dict[str, Any]:
        return {'pieces': [p.to_dict() for p in self.pieces]}

    def __call__(self, x: Sequence[Any]) -> Fraction:
        return min(piece(x) for piece in self.pieces)

    def equals(self, other: 'ConcavePLFunction') -> bool:
        """Same domain and same values; comparing on each side's linearity cells suffices."""
        if self.domain != other.domain:
            return False
        return (all(other(v) >= self(v) for v in self.subdivision_vertices)
                and all(self(v) >= other(v) for v in other.subdivision_vertices))

    @cached_property
    def cells(self) -> Tuple[Tuple[AffineForm, RationalPolytope], ...]:
        """Nonempty linearity domains {x in P : piece_i(x) <= piece_j(x) for all j}."""
        result = []
        for i, piece in enumerate(self.pieces):
            rows = [
                (tuple(x - y for x, y in zip(piece.a, other.a)), other.b - piece.b)
                for j, other in enumerate(self.pieces) if j != i
            ]
            cell = self.domain.intersect(rows) if rows else self.domain
            if not cell.is_empty:
                result.append((piece, cell))
        return tuple(result)

    @cached_property
    def subdivision_vertices(self) -> Tuple[Point, ...]:
        return tuple(sorted({v for _, cell in self.cells for v in cell.vertices}))

    @cached_property
    def breakpoint_values(self) -> Tuple[Fraction, ...]:
        return tuple(sorted({self(v) for v in self.subdivision_vertices}))

    @property
    def min_value(self) -> Fraction:
        return self.breakpoint_values[0]

    @property
    def max_value(self) -> Fraction:
        return self.breakpoint_values[-1]

    @property
    def is_affine(self) -> bool:
        return sum(1 for _, cell in self.cells if cell.is_full_dimensional) <= 1

    def __repr__(self) -> str:
        pieces = ', '.join(
            ' + '.join(f"{fraction_to_str(c)}*x{i + 1}" for i, c in enumerate(p.a) if c) + f" + {fraction_to_str(p.b)}"
            for p in self.pieces
        )
        return f"ConcavePLFunction(min({pieces}) on {self.domain!r})"


def superlevel_set(g: ConcavePLFunction, t: Any) -> RationalPolytope:
    """{x in P : g(x) >= t}, one halfspace per affine piece."""
    t = to_fraction(t)
    return g.domain.intersect((tuple(-x for x in p.a), p.b - t) for p in g.pieces)


def _complete_homogeneous(values: Sequence[Fraction], r: int) -> Fraction:
    total = Fraction(0)
    for combo in itertools.combinations_with_replacement(values, r):
        term = Fraction(1)
        for v in combo:
            term *= v
        total += term
    return total


def integrate_pl_power(g: ConcavePLFunction, r: int) -> Fraction:
    """Exact integral of g^r over its domain, simplex by simplex."""
    if r < 0:
        raise InvalidParameterError(f"Power must be nonnegative, got {r}")
    n = g.domain.dim
    weight = Fraction(math.factorial(n) * math.factorial(r), math.factorial(n + r))
    total = Fraction(0)
    for piece, cell in g.cells:
        for simplex in cell.triangulation:
            values = [piece(v) for v in simplex]
            total += simplex_volume(simplex) * weight * _complete_homogeneous(values, r)
    return total


def integrate_pl(g: ConcavePLFunction) -> Fraction:
    """Exact integral of g over its domain: simplex volume times mean vertex value."""
    total = Fraction(0)
    for piece, cell in g.cells:
        for simplex in cell.triangulation:
            mean = sum((piece(v) for v in simplex), Fraction(0)) / len(simplex)
            total += simplex_volume(simplex) * mean
    return total
