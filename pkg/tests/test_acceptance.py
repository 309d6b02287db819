"""End-to-end checks on the reference examples: the square, the standard triangle and the 2x1 rectangle."""

from fractions import Fraction as Q

import pytest

from filtration import WeightFiltration, check_admissible
from measures import MeasureOnR, dh_structure_check, kolmogorov_distance, pushforward_lebesgue, tail
from normal_cone import NormalConeDatum, normal_cone_pushforward, normal_cone_transform, slice_check
from okounkov import FiniteSemigroup, delta_additivity_violation, delta_k, okounkov_body
from polytope import RationalPolytope, dilate, ehrhart_leading_coefficient, ehrhart_polynomial, lattice_points, volume
from toric_tc import (
    f0_invariant,
    product_configuration,
    toric_filtration,
    transform_deviation,
    weight_measure,
)

SQUARE = RationalPolytope.box([0, 0], [1, 1])
TRIANGLE = RationalPolytope.simplex(2)
RECTANGLE = RationalPolytope.box([0, 0], [2, 1])


def _brute_force_distance(atoms: MeasureOnR, limit: MeasureOnR) -> Q:
    """Sup of the tail gap over every atom location, approached from both sides."""
    gap = abs(atoms.total_mass - limit.total_mass)
    for loc, mass in atoms.atoms:
        gap = max(gap, abs(tail(atoms, loc) - tail(limit, loc)),
                  abs(tail(atoms, loc) - mass - tail(limit, loc)))
    return gap


class TestVolumeAndEhrhart:
    @pytest.mark.parametrize('P', [SQUARE, TRIANGLE, RECTANGLE])
    def test_leading_coefficient(self, P):
        assert ehrhart_leading_coefficient(P) == volume(P)

    @pytest.mark.parametrize('P', [SQUARE, TRIANGLE])
    def test_normalized_count_at_sixty(self, P):
        k = 60
        assert abs(Q(len(lattice_points(dilate(P, k))), k ** 2) - volume(P)) <= Q(1, 20)

    def test_rectangle_count_at_sixty(self):
        # 121 * 61 points: the boundary term 3/k + 1/k^2 sits just above 1/20 here
        k = 60
        count = len(lattice_points(dilate(RECTANGLE, k)))
        assert count == ehrhart_polynomial(RECTANGLE).eval(k) == (2 * k + 1) * (k + 1)
        assert Q(count, k ** 2) - volume(RECTANGLE) == Q(3, k) + Q(1, k ** 2)


def test_transform_deviation(ramp_tc, tent_tc):
    for T in (ramp_tc, tent_tc):
        for k in range(1, 13):
            deviation = transform_deviation(T, k)
            assert deviation.within_bound
            assert deviation.exact_on_integral


class TestKolmogorovConvergence:
    UNIFORM = MeasureOnR(pieces=((0, 1, (1,)),))

    @pytest.mark.parametrize('k', [10, 50, 100])
    def test_segment_rate(self, ramp_tc, k):
        _, normalized = weight_measure(ramp_tc, k)
        distance = kolmogorov_distance(normalized, self.UNIFORM)
        assert distance == Q(1, k)
        assert distance == _brute_force_distance(normalized, self.UNIFORM)

    def test_square_decreases(self, tent_tc, tent):
        limit = pushforward_lebesgue(tent)
        distances = [kolmogorov_distance(weight_measure(tent_tc, k)[1], limit) for k in (5, 10, 20, 40)]
        assert distances == [Q(11, 25), Q(21, 100), Q(41, 400), Q(81, 1600)]
        assert distances == sorted(distances, reverse=True)
        assert distances[-1] <= Q(1, 10)


class TestF0:
    def test_segment_exact(self, ramp_tc):
        report = f0_invariant(ramp_tc, range(1, 101))
        assert report.f0 == Q(1, 2)
        assert all(row.ratio == Q(1, 2) for row in report.rows)

    def test_square_within_two_over_k(self, tent_tc):
        report = f0_invariant(tent_tc, [10, 40])
        assert report.f0 == Q(5, 6)
        for row in report.rows:
            assert abs(row.ratio - report.f0) <= Q(2, row.k)


class TestNormalCone:
    @pytest.mark.parametrize('P, c, expected', [
        (RationalPolytope.box([0], [2]), Q(1), MeasureOnR(((0, 1),), ((-1, 0, (1,)),))),
        (SQUARE, Q(1, 2), MeasureOnR(((0, Q(1, 2)),), ((Q(-1, 2), 0, (1,)),))),
    ])
    def test_pushforward(self, P, c, expected):
        D = NormalConeDatum(P, c)
        assert normal_cone_pushforward(D) == expected
        assert pushforward_lebesgue(normal_cone_transform(D)) == expected
        for a in (0, c / 2, c):
            assert slice_check(D, a)


def test_duistermaat_heckman_shape(ramp, tent):
    measures = [
        (pushforward_lebesgue(ramp), 1),
        (pushforward_lebesgue(tent), 2),
        (pushforward_lebesgue(product_configuration(SQUARE, (1, 1)).g), 2),
        (pushforward_lebesgue(product_configuration(TRIANGLE, (2, -1)).g), 2),
        (normal_cone_pushforward(NormalConeDatum(SQUARE, Q(1, 2))), 2),
        (normal_cone_pushforward(NormalConeDatum(RationalPolytope.box([0], [2]), 1)), 1),
    ]
    for m, n in measures:
        assert dh_structure_check(m, n)


class TestAdmissibility:
    def test_toric_filtrations(self, ramp_tc, tent_tc):
        for T in (ramp_tc, tent_tc):
            F = toric_filtration(T, 8)
            assert check_admissible(F, 8).passed
            bound = max(abs(T.g.min_value), abs(T.g.max_value))
            for k in range(1, 9):
                raw, _ = weight_measure(T, k)
                assert all(abs(loc) <= k * bound for loc, _ in raw.atoms)

    def test_handcrafted_rejected(self, interval):
        F = WeightFiltration.from_table(interval, {
            1: [((0,), 0), ((1,), 1)],
            2: [((0,), 0), ((1,), 0), ((2,), 0)],
        })
        report = check_admissible(F, 2)
        assert not report.passed
        assert (report.counterexample.alpha, report.counterexample.beta) == ((0,), (1,))


class TestOkounkovBodies:
    CASES = [
        (FiniteSemigroup(2, ((0, 1), (1, 1))), RationalPolytope.box([0], [1])),
        (FiniteSemigroup(2, ((0, 1),)), RationalPolytope.point([0])),
        (FiniteSemigroup(3, ((0, 0, 1), (1, 0, 1), (0, 1, 1))), TRIANGLE),
    ]

    @pytest.mark.parametrize('S, expected', CASES)
    def test_body(self, S, expected):
        assert okounkov_body(S) == expected

    @pytest.mark.parametrize('S, body', CASES)
    def test_delta_k(self, S, body):
        for k in range(1, 6):
            assert all(body.contains(p) for p in delta_k(S, k))
        assert delta_additivity_violation(S, 5) is None
