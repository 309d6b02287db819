from fractions import Fraction as Q

import pytest

from errors import DegreeOutOfRangeError, FiltrationTableError, InvalidParameterError
from filtration import (
    Counterexample,
    WeightFiltration,
    check_admissible,
    concave_transform_estimate,
    dim_filtration,
    gk_function,
    jump_locations,
    nu_measure,
    weight_spaces,
)
from measures import MeasureOnR
from normal_cone import normal_cone_filtration
from polytope import ConcavePLFunction, dilate, lattice_points
from toric_tc import toric_filtration


@pytest.fixture
def ramp_filtration(ramp_tc):
    return toric_filtration(ramp_tc, 6)


@pytest.fixture
def failing_filtration(interval):
    return WeightFiltration.from_table(interval, {
        1: [((0,), 0), ((1,), 1)],
        2: [((0,), 0), ((1,), 0), ((2,), 0)],
    })


class TestDimFiltration:
    @pytest.mark.parametrize('t, expected', [
        (1, 2), (-5, 3), (Q(5, 2), 0), ('1/2', 2), (0, 3),
        (float('-inf'), 3), (float('inf'), 0),
    ])
    def test_thresholds(self, ramp_filtration, t, expected):
        # weights at k=2 are 2, 1, 0
        assert dim_filtration(ramp_filtration, 2, t) == expected

    def test_left_continuous(self, ramp_filtration):
        assert dim_filtration(ramp_filtration, 2, Q(1, 100)) == dim_filtration(ramp_filtration, 2, 1)

    def test_unmaterialized_degree(self, ramp_filtration):
        with pytest.raises(DegreeOutOfRangeError):
            dim_filtration(ramp_filtration, 7, 0)

    def test_full_dimension(self, ramp_filtration):
        for k in ramp_filtration.degrees:
            assert dim_filtration(ramp_filtration, k, float('-inf')) == k + 1


class TestWeightData:
    def test_weight_spaces(self, segment_datum):
        F = normal_cone_filtration(segment_datum, 2)
        assert weight_spaces(F, 2) == {-2: 1, -1: 1, 0: 3}
        assert jump_locations(F, 2) == [(-2, 1), (-1, 1), (0, 3)]

    def test_nu_measure(self, ramp_filtration):
        assert nu_measure(ramp_filtration, 1) == MeasureOnR.atomic({0: 1, 1: 1})
        assert nu_measure(ramp_filtration, 2) == MeasureOnR.atomic({0: Q(1, 2), Q(1, 2): Q(1, 2), 1: Q(1, 2)})

    def test_nu_mass(self, tent_tc):
        F = toric_filtration(tent_tc, 4)
        for k in F.degrees:
            assert nu_measure(F, k).total_mass * k ** 2 == dim_filtration(F, k, float('-inf'))

    def test_constant_weights(self, unit_square):
        F = WeightFiltration.from_function(unit_square, lambda k, alpha: 0, [3])
        assert nu_measure(F, 3) == MeasureOnR.atomic({0: Q(16, 9)})
        assert F.bound_constant == 0

    def test_gk_function(self, ramp_filtration):
        G = gk_function(ramp_filtration, 2)
        assert G.value((Q(1, 2),)) == 1
        assert G.points == ((Q(0),), (Q(1, 2),), (Q(1),))
        assert gk_function(ramp_filtration, 1).value((1,)) == 0

    def test_gk_pushforward_matches_jumps(self, tent_tc):
        F = toric_filtration(tent_tc, 3)
        for k in F.degrees:
            pushed = gk_function(F, k).pushforward()
            assert [(int(loc), int(mass)) for loc, mass in pushed.atoms] == jump_locations(F, k)


class TestTables:
    def test_missing_point(self, interval):
        with pytest.raises(FiltrationTableError):
            WeightFiltration.from_table(interval, {1: [((0,), 0)]})

    def test_point_outside(self, interval):
        with pytest.raises(FiltrationTableError):
            WeightFiltration.from_table(interval, {1: [((0,), 0), ((1,), 0), ((2,), 0)]})

    def test_sparse_degrees(self, interval):
        F = WeightFiltration.from_table(interval, {'3': [((a,), a) for a in range(4)]})
        assert F.degrees == (3,)
        assert F.degree_bound == 3
        assert F.bound_constant == 1

    def test_dict_round_trip(self, failing_filtration):
        assert 'bound' not in failing_filtration.to_dict()
        restored = WeightFiltration.from_dict(failing_filtration.to_dict())
        assert restored.bound_derived
        assert restored.degrees == failing_filtration.degrees
        assert restored.weights(2) == failing_filtration.weights(2)
        assert restored.bound_constant == failing_filtration.bound_constant


class TestEnvelope:
    def test_ramp_recovered(self, ramp_filtration, ramp):
        estimate = concave_transform_estimate(ramp_filtration, [1, 2, 4])
        assert estimate.function.equals(ramp)
        assert estimate.extrapolated == 6

    def test_tent_recovered(self, tent_tc, tent):
        F = toric_filtration(tent_tc, 6)
        estimate = concave_transform_estimate(F, range(1, 7))
        assert estimate.function.equals(tent)
        for v in tent.subdivision_vertices:
            assert estimate.function(v) == tent(v)

    def test_dominates_samples(self, tent_tc):
        F = toric_filtration(tent_tc, 3)
        estimate = concave_transform_estimate(F, [2, 3])
        for sample in estimate.samples:
            assert estimate.function(sample.point) >= sample.value

    def test_zero_weights(self, unit_square):
        F = WeightFiltration.from_function(unit_square, lambda k, alpha: 0, [1, 2])
        estimate = concave_transform_estimate(F, [1, 2])
        assert estimate.function.equals(ConcavePLFunction.constant(unit_square, 0))

    def test_empty_sample(self, ramp_filtration):
        with pytest.raises(InvalidParameterError, match="empty sample"):
            concave_transform_estimate(ramp_filtration, [])

    def test_sample_rows(self, ramp_filtration):
        rows = concave_transform_estimate(ramp_filtration, [2]).sample_rows()
        assert rows == [['0', '1', 2, 1], ['1/2', '1/2', 2, 0], ['1', '0', 2, 1]]


class TestAdmissibility:
    def test_toric_passes(self, ramp_filtration):
        report = check_admissible(ramp_filtration, 6)
        assert report.passed
        assert report.counterexample is None
        assert report.bound_violation is None

    def test_constant_passes(self, interval):
        F = WeightFiltration.from_function(interval, lambda k, alpha: 0, range(1, 5))
        assert check_admissible(F, 4).passed

    def test_counterexample(self, failing_filtration):
        report = check_admissible(failing_filtration, 2)
        assert not report.passed
        assert report.counterexample == Counterexample(k=1, m=1, alpha=(0,), beta=(1,), combined=0, separate=1)
        assert report.to_dict()['counterexample'] == {
            'k': 1, 'm': 1, 'alpha': [0], 'beta': [1], 'w_k_plus_m': 0, 'w_k_plus_w_m': 1,
        }

    def test_bound_violation(self, interval):
        F = WeightFiltration.from_table(interval, {1: [((0,), 1), ((1,), 1)]}, bound_constant=0)
        report = check_admissible(F, 1)
        assert not report.passed
        assert report.bound_violation == (1, (0,), 1)
        assert not report.bound_derived
        assert WeightFiltration.from_dict(F.to_dict()).bound_constant == 0

    def test_derived_bound_flagged(self, failing_filtration):
        report = check_admissible(failing_filtration, 2)
        assert report.bound_derived
        assert report.bound_violation is None
        assert report.to_dict()['bound_derived'] is True

    def test_k_max_beyond_table(self, ramp_filtration):
        with pytest.raises(DegreeOutOfRangeError):
            check_admissible(ramp_filtration, 7)

    def test_lattice_points_used(self, ramp_filtration):
        assert set(ramp_filtration.weights(3)) == set(lattice_points(dilate(ramp_filtration.base, 3)))


class TestUniformSupport:
    @pytest.mark.parametrize('build', [
        lambda request: toric_filtration(request.getfixturevalue('ramp_tc'), 8),
        lambda request: toric_filtration(request.getfixturevalue('tent_tc'), 8),
        lambda request: normal_cone_filtration(request.getfixturevalue('segment_datum'), 8),
        lambda request: normal_cone_filtration(request.getfixturevalue('square_datum'), 8),
    ], ids=['ramp', 'tent', 'segment', 'square'])
    def test_atoms_within_bound(self, request, build):
        F = build(request)
        assert check_admissible(F, 8).passed
        assert not F.bound_derived
        C = F.bound_constant
        for k in F.degrees:
            low, high = nu_measure(F, k).support_bounds
            assert -C <= low <= high <= C
