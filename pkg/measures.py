# measures.py
"""
Finite positive measures on the real line: finitely many atoms plus a
piecewise-polynomial density. Tails are closed, m([t, oo)), so they are
left-continuous like dim F_t.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy as sp

from errors import DegeneratePolytopeError, InvalidParameterError, ValidationError
from parallel import ordered_map
from polytope import ConcavePLFunction, superlevel_set
from rationals import fraction_to_str, from_sympy, to_fraction, to_sympy
from settings import DEFAULT_CDF_SAMPLES

logger = logging.getLogger(__name__)

T = sp.Symbol('t')

Distance = Union[Fraction, sp.Expr]


def _to_poly(coeffs: Sequence[Fraction]) -> sp.Poly:
    """Polynomial in t from ascending coefficients."""
    if not coeffs:
        return sp.Poly(0, T, domain=sp.QQ)
    return sp.Poly([to_sympy(c) for c in reversed(coeffs)], T, domain=sp.QQ)


def _from_poly(poly: sp.Poly) -> Tuple[Fraction, ...]:
    coeffs = [from_sympy(c) for c in reversed(poly.all_coeffs())]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _eval(poly: sp.Poly, x: Fraction) -> Fraction:
    return from_sympy(poly.eval(to_sympy(x)))


@dataclass(frozen=True)
class DensityPiece:
    """Polynomial density on [left, right]; coeffs in ascending powers of t."""
    left: Fraction
    right: Fraction
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        left, right = to_fraction(self.left), to_fraction(self.right)
        if left >= right:
            raise ValidationError(f"Density interval [{left}, {right}] is empty")
        coeffs = [to_fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'left', left)
        object.__setattr__(self, 'right', right)
        object.__setattr__(self, 'coeffs', tuple(coeffs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @cached_property
    def poly(self) -> sp.Poly:
        return _to_poly(self.coeffs)

    @cached_property
    def antiderivative(self) -> sp.Poly:
        return self.poly.integrate()

    def density_at(self, x: Any) -> Fraction:
        return _eval(self.poly, to_fraction(x))

    def mass_between(self, a: Fraction, b: Fraction) -> Fraction:
        return _eval(self.antiderivative, b) - _eval(self.antiderivative, a)

    @cached_property
    def mass(self) -> Fraction:
        return self.mass_between(self.left, self.right)

    def moment(self, r: int) -> Fraction:
        integrand = (self.poly * sp.Poly(T ** r, T, domain=sp.QQ)).integrate()
        return _eval(integrand, self.right) - _eval(integrand, self.left)

    def is_nonnegative(self) -> bool:
        """Exact sign check: no odd-multiplicity root inside, and nonnegative somewhere nonzero."""
        if self.is_zero:
            return True
        p = self.poly
        low, high = to_sympy(self.left), to_sympy(self.right)
        if p.eval(low) < 0 or p.eval(high) < 0:
            return False
        _, factors = p.sqf_list()
        for factor, multiplicity in factors:
            if multiplicity % 2 == 0 or factor.degree() < 1:
                continue
            interior = factor.count_roots(low, high) - int(factor.eval(low) == 0) - int(factor.eval(high) == 0)
            if interior > 0:
                return False
        # Constant sign inside; find a point where p does not vanish
        steps = self.degree + 2
        for j in range(1, steps):
            value = p.eval(low + (high - low) * sp.Rational(j, steps))
            if value != 0:
                return value > 0
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            'l': fraction_to_str(self.left),
            'r': fraction_to_str(self.right),
            'coeffs': [fraction_to_str(c) for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DensityPiece':
        try:
            return cls(data['l'], data['r'], tuple(data['coeffs']))
        except (KeyError, TypeError):
            raise ValidationError("Density piece needs 'l', 'r' and 'coeffs'", subject=data)


@dataclass(frozen=True)
class MeasureOnR:
    """Atoms (location, mass) plus density pieces, kept in canonical form so == is exact equality."""
    atoms: Tuple[Tuple[Fraction, Fraction], ...] = ()
    pieces: Tuple[DensityPiece, ...] = field(default=())

    def __post_init__(self):
        merged: Dict[Fraction, Fraction] = {}
        for loc, mass in self.atoms:
            loc, mass = to_fraction(loc), to_fraction(mass)
            if mass < 0:
                raise ValidationError(f"Atom at {loc} has negative mass {mass}")
            merged[loc] = merged.get(loc, Fraction(0)) + mass
        atoms = tuple(sorted((loc, mass) for loc, mass in merged.items() if mass))

        pieces = [p if isinstance(p, DensityPiece) else DensityPiece(*p) for p in self.pieces]
        pieces = sorted((p for p in pieces if not p.is_zero), key=lambda p: (p.left, p.right))
        for first, second in zip(pieces, pieces[1:]):
            if first.right > second.left:
                raise ValidationError(
                    f"Density intervals [{first.left}, {first.right}] and [{second.left}, {second.right}] overlap"
                )
        canonical: List[DensityPiece] = []
        for piece in pieces:
            if canonical and canonical[-1].right == piece.left and canonical[-1].coeffs == piece.coeffs:
                piece = DensityPiece(canonical.pop().left, piece.right, piece.coeffs)
            canonical.append(piece)
        for piece in canonical:
            if not piece.is_nonnegative():
                raise ValidationError(f"Density is negative somewhere on [{piece.left}, {piece.right}]",
                                      subject=piece)

        object.__setattr__(self, 'atoms', atoms)
        object.__setattr__(self, 'pieces', tuple(canonical))

    @classmethod
    def zero(cls) -> 'MeasureOnR':
        return cls()

    @classmethod
    def atomic(cls, masses: Union[Dict[Any, Any], Iterable[Tuple[Any, Any]]]) -> 'MeasureOnR':
        items = masses.items() if isinstance(masses, dict) else masses
        return cls(atoms=tuple(items))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MeasureOnR':
        if not isinstance(data, dict):
            raise ValidationError("Measure JSON must be an object", subject=data)
        try:
            atoms = tuple((loc, mass) for loc, mass in data.get('atoms', []))
        except (TypeError, ValueError):
            raise ValidationError("Measure atoms must be [location, mass] pairs", subject=data)
        pieces = tuple(DensityPiece.from_dict(p) for p in data.get('pieces', []))
        return cls(atoms, pieces)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'atoms': [[fraction_to_str(loc), fraction_to_str(mass)] for loc, mass in self.atoms],
            'pieces': [p.to_dict() for p in self.pieces],
        }

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.pieces

    @cached_property
    def total_mass(self) -> Fraction:
        return sum((m for _, m in self.atoms), Fraction(0)) + sum((p.mass for p in self.pieces), Fraction(0))

    @cached_property
    def breakpoints(self) -> Tuple[Fraction, ...]:
        points = {loc for loc, _ in self.atoms}
        for p in self.pieces:
            points.update((p.left, p.right))
        return tuple(sorted(points))

    @property
    def support_bounds(self) -> Optional[Tuple[Fraction, Fraction]]:
        if self.is_zero:
            return None
        return self.breakpoints[0], self.breakpoints[-1]

    def atom_mass(self, loc: Any) -> Fraction:
        return dict(self.atoms).get(to_fraction(loc), Fraction(0))

    def scaled(self, c: Any) -> 'MeasureOnR':
        c = to_fraction(c)
        if c < 0:
            raise InvalidParameterError(f"Cannot scale a positive measure by {c}")
        return MeasureOnR(
            tuple((loc, c * mass) for loc, mass in self.atoms),
            tuple(DensityPiece(p.left, p.right, tuple(c * x for x in p.coeffs)) for p in self.pieces),
        )

    def relocated(self, s: Any) -> 'MeasureOnR':
        """Pushforward under x -> s*x for s > 0."""
        s = to_fraction(s)
        if s <= 0:
            raise InvalidParameterError(f"Relocation factor must be positive, got {s}")
        pieces = tuple(
            DensityPiece(s * p.left, s * p.right, tuple(c / s ** (j + 1) for j, c in enumerate(p.coeffs)))
            for p in self.pieces
        )
        return MeasureOnR(tuple((s * loc, mass) for loc, mass in self.atoms), pieces)

    def _tail_segment(self, u: Fraction, v: Fraction) -> sp.Poly:
        """The tail as a polynomial on an open interval (u, v) free of breakpoints."""
        const = sum((m for loc, m in self.atoms if loc >= v), Fraction(0))
        const += sum((p.mass for p in self.pieces if p.left >= v), Fraction(0))
        poly = sp.Poly(to_sympy(const), T, domain=sp.QQ)
        for p in self.pieces:
            if p.left <= u and p.right >= v:
                top = p.antiderivative.eval(to_sympy(p.right))
                poly = poly + sp.Poly(top, T, domain=sp.QQ) - p.antiderivative
        return poly

    def __repr__(self) -> str:
        atoms = ', '.join(f"{fraction_to_str(m)}@{fraction_to_str(loc)}" for loc, m in self.atoms)
        pieces = ', '.join(
            f"[{fraction_to_str(p.left)},{fraction_to_str(p.right)}]:{[fraction_to_str(c) for c in p.coeffs]}"
            for p in self.pieces
        )
        return f"MeasureOnR(atoms=[{atoms}], pieces=[{pieces}])"


# Operations

def tail(m: MeasureOnR, t: Any) -> Fraction:
    """m([t, oo)); an atom at t counts."""
    t = to_fraction(t)
    total = sum((mass for loc, mass in m.atoms if loc >= t), Fraction(0))
    for p in m.pieces:
        if p.right > t:
            total += p.mass_between(max(p.left, t), p.right)
    return total


def moment(m: MeasureOnR, r: int) -> Fraction:
    if r < 0:
        raise InvalidParameterError(f"Moment order must be nonnegative, got {r}")
    total = sum((mass * loc ** r for loc, mass in m.atoms), Fraction(0))
    return total + sum((p.moment(r) for p in m.pieces), Fraction(0))


def tail_integral(m: MeasureOnR) -> Fraction:
    """Integral of the tail over [0, oo), segment by segment."""
    points = m.breakpoints
    if not points:
        return Fraction(0)
    total = Fraction(0)
    if points[0] > 0:
        total += m.total_mass * points[0]
    for u, v in zip(points, points[1:]):
        low, high = max(u, Fraction(0)), v
        if high <= low:
            continue
        integral = m._tail_segment(u, v).integrate()
        total += _eval(integral, high) - _eval(integral, low)
    return total


def _exceeds(candidate: sp.Expr, best: Distance) -> bool:
    return bool(sp.N(candidate - (to_sympy(best) if isinstance(best, Fraction) else best), 60) > 0)


def kolmogorov_distance(m1: MeasureOnR, m2: MeasureOnR) -> Distance:
    """sup_t |tail(m1, t) - tail(m2, t)|.

    Candidates are the closed values at every breakpoint, the one-sided limits
    at the ends of every open segment, and the critical points of the tail
    difference inside a segment. Returns a Fraction unless the supremum sits at
    an irrational critical point.
    """
    points = sorted(set(m1.breakpoints) | set(m2.breakpoints))
    best: Distance = Fraction(0)
    for b in points:
        best = max(best, abs(tail(m1, b) - tail(m2, b)))

    irrational: List[sp.Expr] = []
    for u, v in zip(points, points[1:]):
        diff = m1._tail_segment(u, v) - m2._tail_segment(u, v)
        for x in (u, v):
            best = max(best, abs(_eval(diff, x)))
        if diff.degree() < 2:
            continue
        for root in diff.diff(T).real_roots():
            if not (to_sympy(u) < root < to_sympy(v)):
                continue
            value = sp.expand(sp.Abs(diff.as_expr().subs(T, root)))
            if value.is_Rational:
                best = max(best, from_sympy(value))
            else:
                irrational.append(value)

    for value in irrational:
        if _exceeds(value, best):
            best = value
    return best


def dh_structure_check(m: MeasureOnR, n: int) -> bool:
    """Density degree < n on every piece; atoms are finitely many by construction."""
    if n < 1:
        raise InvalidParameterError(f"Dimension must be >= 1, got {n}")
    return all(p.degree <= n - 1 for p in m.pieces)


def pushforward_lebesgue(g: ConcavePLFunction) -> MeasureOnR:
    """g_* of Lebesgue measure on the domain of g.

    The tail t -> volume({g >= t}) is a polynomial of degree <= n between
    consecutive values of g at subdivision vertices. It is interpolated there
    from n+1 nodes in [u, v), the density is minus its derivative, and the top
    level set contributes an atom when it is full-dimensional.
    """
    P = g.domain
    if not P.is_full_dimensional:
        raise DegeneratePolytopeError("Pushforward needs a full-dimensional domain", subject=P)
    n = P.dim
    values = g.breakpoint_values
    top = values[-1]

    intervals = list(zip(values, values[1:]))

    def piece_on(interval: Tuple[Fraction, Fraction]) -> DensityPiece:
        u, v = interval
        nodes = [u + (v - u) * Fraction(j, n + 1) for j in range(n + 1)]
        data = [(to_sympy(x), to_sympy(superlevel_set(g, x).volume)) for x in nodes]
        tail_poly = sp.Poly(sp.interpolate(data, T), T, domain=sp.QQ)
        return DensityPiece(u, v, _from_poly(-tail_poly.diff(T)))

    pieces = ordered_map(piece_on, intervals)
    roof = superlevel_set(g, top)
    atoms = ((top, roof.volume),) if roof.is_full_dimensional else ()
    measure = MeasureOnR(atoms, tuple(pieces))
    logger.debug(f"Pushforward over {len(intervals)} intervals: {measure!r}")
    return measure


def sample_tail(m: MeasureOnR, points: Optional[Iterable[Any]] = None,
                samples: int = DEFAULT_CDF_SAMPLES) -> List[Tuple[Fraction, Fraction]]:
    """(t, tail(t)) rows; by default all breakpoints plus a uniform grid over the support."""
    if points is None:
        grid = set(m.breakpoints)
        bounds = m.support_bounds
        if bounds and bounds[0] < bounds[1] and samples >= 2:
            low, high = bounds
            grid.update(low + (high - low) * Fraction(j, samples - 1) for j in range(samples))
        points = grid
    ts = sorted({to_fraction(t) for t in points})
    return [(t, tail(m, t)) for t in ts]


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    distance: Distance
    rate: Distance
    moment_gaps: Tuple[Tuple[int, Fraction], ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'distance': _distance_to_str(self.distance),
            'rate': _distance_to_str(self.rate),
            'moment_gaps': {str(r): fraction_to_str(gap) for r, gap in self.moment_gaps},
        }


def _distance_to_str(value: Distance) -> str:
    return fraction_to_str(value) if isinstance(value, Fraction) else str(value)


def convergence_table(measure_at_k: Callable[[int], MeasureOnR], limit: MeasureOnR,
                      k_list: Sequence[int], moments: Sequence[int] = (1, 2, 3)) -> List[ConvergenceRow]:
    """Kolmogorov distance, k times distance, and signed moment gaps against the limit."""
    if not k_list:
        raise InvalidParameterError("k list is empty")
    limit_moments = {r: moment(limit, r) for r in moments}

    def row(k: int) -> ConvergenceRow:
        m = measure_at_k(k)
        distance = kolmogorov_distance(m, limit)
        gaps = tuple((r, moment(m, r) - limit_moments[r]) for r in moments)
        rate = k * distance if isinstance(distance, Fraction) else sp.expand(k * distance)
        logger.info(f"k={k}: distance={_distance_to_str(distance)}")
        return ConvergenceRow(k, distance, rate, gaps)

    return ordered_map(row, list(k_list))
