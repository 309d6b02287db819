from fractions import Fraction as Q

import pytest

import parallel

from errors import (
    DimensionMismatchError,
    InvalidParameterError,
    UnboundedPolytopeError,
    ValidationError,
)
from polytope import (
    ConcavePLFunction,
    RationalPolytope,
    dilate,
    ehrhart_leading_coefficient,
    ehrhart_polynomial,
    integrate_pl,
    integrate_pl_power,
    lattice_points,
    minkowski_sum,
    superlevel_set,
    triangulate,
    vertex_hausdorff_bound,
    volume,
)


class TestConstruction:
    def test_box_vertices(self, unit_square):
        assert unit_square.vertices == ((0, 0), (0, 1), (1, 0), (1, 1))
        assert len(unit_square.inequalities) == 4

    def test_redundant_inequality_removed(self):
        P = RationalPolytope.from_inequalities(1, [((1,), 1), ((-1,), 0), ((1,), 5), ((2,), 2)])
        assert P.inequalities == (((Q(1),), Q(1)), ((Q(-1),), Q(0)))

    def test_inequalities_are_primitive_integer_rows(self):
        P = RationalPolytope.from_inequalities(2, [(('1/2', '1/2'), '1/2'), ((-1, 0), 0), ((0, -1), 0)])
        assert ((Q(1), Q(1)), Q(1)) in P.inequalities
        assert P == RationalPolytope.simplex(2)

    def test_unbounded_halfline(self):
        with pytest.raises(UnboundedPolytopeError):
            RationalPolytope.from_inequalities(1, [((1,), 1)])

    def test_unbounded_strip(self):
        with pytest.raises(UnboundedPolytopeError):
            RationalPolytope.from_inequalities(2, [((1, 0), 1), ((-1, 0), 0)])

    def test_infeasible_is_empty(self):
        P = RationalPolytope.from_inequalities(1, [((1,), 0), ((-1,), -1)])
        assert P.is_empty
        assert volume(P) == 0
        assert lattice_points(P) == []

    def test_float_rejected(self):
        with pytest.raises(ValidationError):
            RationalPolytope.box([0.5], [1])

    def test_wrong_row_length(self):
        with pytest.raises(DimensionMismatchError):
            RationalPolytope.from_inequalities(2, [((1,), 1)])

    def test_dict_round_trip(self, triangle):
        assert RationalPolytope.from_dict(triangle.to_dict()) == triangle

    def test_dict_from_vertices(self):
        P = RationalPolytope.from_dict({'dim': 2, 'vertices': [[0, 0], [1, 0], [0, 1]]})
        assert P == RationalPolytope.simplex(2)

    def test_dict_missing_dim(self):
        with pytest.raises(ValidationError):
            RationalPolytope.from_dict({'ineqs': []})

    def test_lower_dimensional_keeps_equalities(self):
        segment = RationalPolytope.from_vertices([(0, 0), (1, 1)])
        assert segment.affine_dimension == 1
        assert segment.contains((Q(1, 2), Q(1, 2)))
        assert not segment.contains((Q(1, 2), Q(0)))

    def test_equality_and_hash(self, unit_square):
        same = RationalPolytope.from_vertices([(0, 0), (1, 0), (0, 1), (1, 1), (Q(1, 2), Q(1, 2))])
        assert same == unit_square
        assert hash(same) == hash(unit_square)
        assert unit_square != RationalPolytope.simplex(2)

    def test_facet_supported_on(self, unit_square, triangle):
        assert unit_square.facet_supported_on(0, 0)
        assert unit_square.facet_supported_on(1, 1)
        assert not unit_square.facet_supported_on(0, Q(1, 2))
        assert not triangle.facet_supported_on(0, 1)

    def test_translate(self, unit_square):
        assert unit_square.translate([1, 2]) == RationalPolytope.box([1, 2], [2, 3])


class TestVolume:
    @pytest.mark.parametrize('P, expected', [
        (RationalPolytope.box([0, 0], [1, 1]), Q(1)),
        (RationalPolytope.simplex(2), Q(1, 2)),
        (RationalPolytope.box([0, 0], [2, 1]), Q(2)),
        (RationalPolytope.from_vertices([(0, 0), (4, 0), (0, 3)]), Q(6)),
        (RationalPolytope.simplex(3), Q(1, 6)),
        (RationalPolytope.from_vertices([(0, 0), (2, 0), (3, 1), (2, 2), (0, 2), (-1, 1)]), Q(6)),
    ])
    def test_known_volumes(self, P, expected):
        assert volume(P) == expected

    def test_dilated_interval(self, interval):
        assert volume(dilate(interval, 3)) == 3

    def test_lower_dimensional_is_zero(self):
        assert volume(RationalPolytope.from_vertices([(0, 0), (1, 1)])) == 0
        assert volume(RationalPolytope.point([1, 1])) == 0

    @pytest.mark.parametrize('k', [Q(5), Q(1, 3), Q(7, 2)])
    def test_homogeneity(self, triangle, k):
        assert volume(dilate(triangle, k)) == k ** 2 * volume(triangle)

    def test_simplex_dilated_by_five(self, triangle):
        assert volume(dilate(triangle, 5)) == Q(25, 2)

    def test_triangulation_covers_volume(self):
        hexagon = RationalPolytope.from_vertices([(0, 0), (2, 0), (3, 1), (2, 2), (0, 2), (-1, 1)])
        simplices = triangulate(hexagon)
        assert len(simplices) == 4
        assert all(len(s) == 3 for s in simplices)

    def test_square_has_two_triangles(self, unit_square):
        assert len(triangulate(unit_square)) == 2


class TestDilate:
    def test_interval(self, interval):
        assert dilate(interval, 2) == RationalPolytope.box([0], [2])

    def test_square(self, unit_square):
        assert dilate(unit_square, 3) == RationalPolytope.box([0, 0], [3, 3])

    @pytest.mark.parametrize('k', [0, -1])
    def test_nonpositive_rejected(self, interval, k):
        with pytest.raises(InvalidParameterError):
            dilate(interval, k)


class TestMinkowskiSum:
    def test_intervals(self, interval, interval02):
        assert minkowski_sum(interval, interval02) == RationalPolytope.box([0], [3])

    def test_translation_by_point(self, unit_square):
        shifted = minkowski_sum(unit_square, RationalPolytope.point([1, 1]))
        assert shifted == RationalPolytope.box([1, 1], [2, 2])

    def test_simplex_doubles(self, triangle):
        assert minkowski_sum(triangle, triangle) == dilate(triangle, 2)

    def test_dilates_add(self):
        P = RationalPolytope.from_vertices([(0, 0), (2, 0), (1, 3)])
        assert minkowski_sum(dilate(P, 2), dilate(P, 3)) == dilate(P, 5)

    def test_dimension_mismatch(self, interval, unit_square):
        with pytest.raises(DimensionMismatchError):
            minkowski_sum(interval, unit_square)


class TestLatticePoints:
    def test_interval(self, interval02):
        assert lattice_points(interval02) == [(0,), (1,), (2,)]

    def test_square(self, unit_square):
        assert lattice_points(unit_square) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_dilated_square_count(self, unit_square):
        assert len(lattice_points(dilate(unit_square, 10))) == 121

    def test_fractional_vertices(self):
        P = RationalPolytope.simplex(2, '3/2')
        assert lattice_points(P) == [(0, 0), (0, 1), (1, 0)]

    def test_lexicographic(self, triangle):
        points = lattice_points(dilate(triangle, 4))
        assert points == sorted(points)
        assert len(points) == 15

    def test_single_thread_matches(self, monkeypatch, triangle):
        expected = lattice_points(dilate(triangle, 6))
        parallel.shutdown()
        monkeypatch.setenv('OKOUNKOV_THREADS', '1')
        assert lattice_points(dilate(triangle, 6)) == expected


class TestEhrhart:
    def test_square_polynomial(self, unit_square):
        poly = ehrhart_polynomial(unit_square)
        assert [int(c) for c in poly.all_coeffs()] == [1, 2, 1]

    @pytest.mark.parametrize('P', [
        RationalPolytope.box([0, 0], [1, 1]),
        RationalPolytope.simplex(2),
        RationalPolytope.box([0, 0], [2, 1]),
    ])
    def test_leading_coefficient_is_volume(self, P):
        assert ehrhart_leading_coefficient(P) == volume(P)

    def test_agrees_up_to_twenty(self, triangle):
        poly = ehrhart_polynomial(triangle)
        for k in range(1, 21):
            assert len(lattice_points(dilate(triangle, k))) == poly.eval(k)


class TestSuperlevelSet:
    def test_single_piece(self, ramp):
        assert superlevel_set(ramp, Q(1, 2)) == RationalPolytope.box([0], [Q(1, 2)])

    def test_tent_top(self, tent, triangle):
        assert superlevel_set(tent, 1) == triangle

    def test_below_minimum(self, tent, unit_square):
        assert superlevel_set(tent, -1) == unit_square

    def test_above_maximum_is_empty(self, tent):
        assert superlevel_set(tent, 2).is_empty

    def test_monotone(self, tent):
        levels = [Q(-1), Q(0), Q(1, 3), Q(1, 2), Q(1)]
        sets = [superlevel_set(tent, t) for t in levels]
        for larger, smaller in zip(sets, sets[1:]):
            assert larger.contains_polytope(smaller)


class TestIntegration:
    def test_ramp(self, ramp):
        assert integrate_pl(ramp) == Q(1, 2)

    def test_affine_on_square(self, unit_square):
        g = ConcavePLFunction.of(unit_square, [((-1, -1), 2)])
        assert integrate_pl(g) == 1

    def test_constant(self, triangle):
        assert integrate_pl(ConcavePLFunction.constant(triangle, 3)) == Q(3, 2)

    def test_tent(self, tent):
        assert integrate_pl(tent) == Q(5, 6)

    def test_powers(self, tent, ramp):
        assert integrate_pl_power(tent, 0) == 1
        assert integrate_pl_power(tent, 1) == integrate_pl(tent)
        assert integrate_pl_power(tent, 2) == Q(3, 4)
        assert integrate_pl_power(ramp, 2) == Q(1, 3)


class TestConcavePLFunction:
    def test_values(self, tent):
        assert tent((Q(1, 4), Q(1, 4))) == 1
        assert tent((1, 1)) == 0
        assert tent.min_value == 0
        assert tent.max_value == 1
        assert tent.breakpoint_values == (0, 1)

    def test_cells(self, tent, triangle):
        cells = dict((piece.b, cell) for piece, cell in tent.cells)
        assert cells[Q(1)] == triangle
        assert cells[Q(2)] == RationalPolytope.from_vertices([(1, 0), (0, 1), (1, 1)])
        assert not tent.is_affine

    def test_duplicate_pieces_collapse(self, interval):
        g = ConcavePLFunction.of(interval, [((-1,), 1), ((-1,), 1)])
        assert len(g.pieces) == 1
        assert g.is_affine

    def test_redundant_piece_still_affine(self, interval):
        g = ConcavePLFunction.of(interval, [((-1,), 1), ((0,), 5)])
        assert g.is_affine

    def test_dimension_mismatch(self, interval):
        with pytest.raises(DimensionMismatchError):
            ConcavePLFunction.of(interval, [((1, 1), 0)])

    def test_equals(self, tent, unit_square):
        same = ConcavePLFunction.of(unit_square, [((-1, -1), 2), ((0, 0), 1), ((0, 0), 3)])
        assert tent.equals(same)
        assert not tent.equals(ConcavePLFunction.constant(unit_square, 1))


def test_vertex_hausdorff_bound(interval):
    half = RationalPolytope.box([0], [Q(1, 2)])
    assert vertex_hausdorff_bound(half, interval) == Q(1, 2)
    assert vertex_hausdorff_bound(interval, interval) == 0
