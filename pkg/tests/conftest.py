import json
from fractions import Fraction as Q

import pytest

import parallel
from normal_cone import NormalConeDatum
from polytope import ConcavePLFunction, RationalPolytope
from toric_tc import ToricTestConfiguration


@pytest.fixture(autouse=True)
def _release_pool():
    yield
    parallel.shutdown()


@pytest.fixture
def interval():
    return RationalPolytope.box([0], [1])


@pytest.fixture
def interval02():
    return RationalPolytope.box([0], [2])


@pytest.fixture
def unit_square():
    return RationalPolytope.box([0, 0], [1, 1])


@pytest.fixture
def triangle():
    return RationalPolytope.simplex(2)


@pytest.fixture
def rectangle():
    return RationalPolytope.box([0, 0], [2, 1])


@pytest.fixture
def ramp(interval):
    """g(x) = 1 - x on [0, 1]"""
    return ConcavePLFunction.of(interval, [((-1,), 1)])


@pytest.fixture
def tent(unit_square):
    """g(x, y) = min(1, 2 - x - y) on the unit square"""
    return ConcavePLFunction.of(unit_square, [((0, 0), 1), ((-1, -1), 2)])


@pytest.fixture
def ramp_tc(ramp):
    return ToricTestConfiguration(ramp)


@pytest.fixture
def tent_tc(tent):
    return ToricTestConfiguration(tent)


@pytest.fixture
def flat_tc(interval):
    return ToricTestConfiguration(ConcavePLFunction.constant(interval, 1))


@pytest.fixture
def segment_datum(interval02):
    return NormalConeDatum(interval02, Q(1))


@pytest.fixture
def square_datum(unit_square):
    return NormalConeDatum(unit_square, Q(1, 2))


@pytest.fixture
def trapezoid_datum():
    P = RationalPolytope.from_vertices([(0, 0), (3, 0), (1, 1), (0, 1)])
    return NormalConeDatum(P, Q(2))


@pytest.fixture
def write_input(tmp_path):
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding='utf-8')
        return path
    return _write


@pytest.fixture
def ramp_json():
    return {
        'polytope': {'dim': 1, 'ineqs': [{'a': ['1'], 'b': '1'}, {'a': ['-1'], 'b': '0'}]},
        'g': {'pieces': [{'a': ['-1'], 'b': '1'}]},
    }
