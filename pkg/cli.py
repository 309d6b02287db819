# cli.py
"""Command-line front end: okounkov-lab <command> --input <file> --output <file> [options]."""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from errors import DegreeOutOfRangeError, InvalidParameterError, OkounkovLabError, ValidationError
from file_utils import FileUtils
from filtration import (
    WeightFiltration,
    check_admissible,
    concave_transform_estimate,
    nu_measure,
    weight_spaces,
)
from logging_utils import setup_logging
from measures import (
    MeasureOnR,
    convergence_table,
    dh_structure_check,
    pushforward_lebesgue,
    sample_tail,
)
from normal_cone import (
    NormalConeDatum,
    dh_breakpoints_ok,
    filtration_identity_holds,
    materialized_degrees,
    normal_cone_filtration,
    normal_cone_pushforward,
    normal_cone_transform,
    slice_check,
    volume_polynomial,
)
from okounkov import FiniteSemigroup, delta_k, okounkov_body
from parallel import shutdown
from rationals import decimal_approx, fraction_to_str, to_fraction, vector_to_str
from settings import DEFAULT_CDF_SAMPLES, DEFAULT_CHECK_DEGREE, DEFAULT_F0_DEGREES, get_log_file, is_debug_mode
from toric_tc import ToricTestConfiguration, f0_invariant, toric_filtration, weight_bound_holds, weight_measure

logger = logging.getLogger(__name__)

COMMANDS = ('body', 'weights', 'transform', 'pushforward', 'converge', 'normal-cone', 'f0', 'check')
DEFAULT_TRANSFORM_DEGREES = tuple(range(1, 7))
DEFAULT_CONVERGE_DEGREES = (5, 10, 20, 40)


@dataclass
class CommandRequest:
    command: str
    input_path: str
    output_path: str
    params: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"Unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")


@dataclass
class CommandResult:
    payload: Dict[str, Any]
    summary: str
    tables: List[Tuple[str, Sequence[str], List[List[Any]]]] = field(default_factory=list)


# Parameters

def _int_param(params: Dict[str, str], name: str, default: Optional[int] = None) -> int:
    raw = params.get(name)
    if raw is None:
        if default is None:
            raise InvalidParameterError(f"--{name.replace('_', '-')} is required for this command")
        return default
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"--{name.replace('_', '-')} must be an integer, got {raw!r}")
    if value < 1:
        raise InvalidParameterError(f"--{name.replace('_', '-')} must be >= 1, got {value}")
    return value


def _k_list(params: Dict[str, str], default: Sequence[int]) -> List[int]:
    raw = params.get('k_list')
    if raw is None:
        return list(default)
    try:
        values = [int(x) for x in str(raw).split(',') if x.strip()]
    except ValueError:
        raise InvalidParameterError(f"--k-list must be comma-separated integers, got {raw!r}")
    if not values or any(k < 1 for k in values):
        raise InvalidParameterError(f"--k-list needs positive integers, got {raw!r}")
    return values


# Inputs

def input_kind(data: Any) -> str:
    if not isinstance(data, dict):
        raise ValidationError("Input JSON must be an object")
    if 'generators' in data:
        return 'semigroup'
    if 'weights' in data:
        return 'filtration'
    if 'g' in data:
        return 'test_configuration'
    if 'c' in data:
        return 'normal_cone'
    raise ValidationError("Cannot tell the input kind: expected 'generators', 'weights', 'g' or 'c'")


def _load(data: Dict[str, Any], params: Dict[str, str], accepted: Sequence[str], command: str) -> Tuple[str, Any]:
    kind = input_kind(data)
    if kind not in accepted:
        raise ValidationError(f"Command '{command}' does not accept {kind.replace('_', ' ')} input")
    if kind == 'semigroup':
        return kind, FiniteSemigroup.from_dict(data)
    if kind == 'filtration':
        return kind, WeightFiltration.from_dict(data)
    if kind == 'test_configuration':
        return kind, ToricTestConfiguration.from_dict(data)
    datum = NormalConeDatum.from_dict(data)
    if params.get('c') is not None:
        datum = datum.with_c(to_fraction(params['c']))
    return kind, datum


def _filtration_for(kind: str, obj: Any, degree_bound: int) -> WeightFiltration:
    if kind == 'test_configuration':
        return toric_filtration(obj, degree_bound)
    if kind == 'normal_cone':
        return normal_cone_filtration(obj, degree_bound)
    return obj


def _cdf_rows(m: MeasureOnR, samples: int) -> List[List[Any]]:
    return [[fraction_to_str(t), fraction_to_str(value), decimal_approx(t), decimal_approx(value)]
            for t, value in sample_tail(m, samples=samples)]


CDF_HEADER = ('t', 'tail', 't_approx', 'tail_approx')


# Handlers

def handle_body(data, params, output_path) -> CommandResult:
    _, S = _load(data, params, ('semigroup',), 'body')
    body = okounkov_body(S)
    payload = {
        'polytope': body.to_dict(),
        'vertices': [vector_to_str(v) for v in body.vertices],
        'volume': fraction_to_str(body.volume),
    }
    if 'k' in params:
        k = _int_param(params, 'k')
        payload['delta_k'] = {'k': k, 'points': [vector_to_str(p) for p in delta_k(S, k)]}
    return CommandResult(payload, f"body: {len(body.vertices)} vertices, volume {fraction_to_str(body.volume)}")


def handle_weights(data, params, output_path) -> CommandResult:
    kind, obj = _load(data, params, ('test_configuration', 'normal_cone', 'filtration'), 'weights')
    k = _int_param(params, 'k')
    if kind == 'test_configuration':
        raw, normalized = weight_measure(obj, k)
    else:
        F = _filtration_for(kind, obj, k)
        raw = MeasureOnR.atomic(weight_spaces(F, k))
        normalized = nu_measure(F, k)
    payload = {'k': k, 'raw': raw.to_dict(), 'normalized': normalized.to_dict(),
               'd_k': fraction_to_str(raw.total_mass)}
    return CommandResult(payload, f"weights: k={k}, d_k={fraction_to_str(raw.total_mass)}, "
                                  f"{len(raw.atoms)} distinct weights")


def handle_transform(data, params, output_path) -> CommandResult:
    kind, obj = _load(data, params, ('test_configuration', 'normal_cone', 'filtration'), 'transform')
    k_list = _k_list(params, DEFAULT_TRANSFORM_DEGREES)
    F = _filtration_for(kind, obj, max(k_list))
    k_list = [k for k in k_list if F.has_degree(k)]
    if not k_list:
        raise DegreeOutOfRangeError("None of the requested degrees is materialized")
    estimate = concave_transform_estimate(F, k_list)
    payload = estimate.to_dict()
    payload['k_list'] = k_list
    header = tuple(f"x{i + 1}" for i in range(F.dim)) + ('value', 'degree', 'on_boundary')
    table = (str(FileUtils.sibling_path(output_path, 'samples')), header, estimate.sample_rows())
    return CommandResult(payload, f"transform: {len(estimate.function.pieces)} pieces from "
                                  f"{len(estimate.samples)} samples ({estimate.extrapolated} extrapolated)", [table])


def handle_pushforward(data, params, output_path) -> CommandResult:
    kind, obj = _load(data, params, ('test_configuration', 'normal_cone'), 'pushforward')
    if kind == 'test_configuration':
        measure, n = pushforward_lebesgue(obj.g), obj.P.dim
    else:
        measure, n = normal_cone_pushforward(obj), obj.base.dim
    samples = _int_param(params, 'samples', DEFAULT_CDF_SAMPLES)
    payload = {
        'measure': measure.to_dict(),
        'mass': fraction_to_str(measure.total_mass),
        'dh_structure': dh_structure_check(measure, n),
    }
    table = (str(FileUtils.sibling_path(output_path, 'cdf')), CDF_HEADER, _cdf_rows(measure, samples))
    return CommandResult(payload, f"pushforward: mass {fraction_to_str(measure.total_mass)}, "
                                  f"{len(measure.atoms)} atoms, {len(measure.pieces)} density pieces", [table])


def handle_converge(data, params, output_path) -> CommandResult:
    kind, obj = _load(data, params, ('test_configuration', 'normal_cone'), 'converge')
    k_list = _k_list(params, DEFAULT_CONVERGE_DEGREES)
    if kind == 'test_configuration':
        limit = pushforward_lebesgue(obj.g)

        def measure_at_k(k: int) -> MeasureOnR:
            return weight_measure(obj, k)[1]
    else:
        limit = normal_cone_pushforward(obj)
        skipped = [k for k in k_list if (obj.c * k).denominator != 1]
        if skipped:
            raise DegreeOutOfRangeError(f"c*k is not an integer for k in {skipped}", subject=skipped)

        F = normal_cone_filtration(obj, max(k_list))

        def measure_at_k(k: int) -> MeasureOnR:
            return nu_measure(F, k)

    rows = convergence_table(measure_at_k, limit, k_list)
    payload = {'rows': [row.to_dict() for row in rows], 'limit': limit.to_dict()}
    header = ('k', 'distance', 'k_times_distance', 'moment1_gap', 'moment2_gap', 'moment3_gap',
              'distance_approx')
    csv_rows = [[row.k, payload_row['distance'], payload_row['rate']]
                + [fraction_to_str(gap) for _, gap in row.moment_gaps] + [decimal_approx(row.distance)]
                for row, payload_row in zip(rows, payload['rows'])]
    table = (str(FileUtils.sibling_path(output_path, 'table')), header, csv_rows)
    last = payload['rows'][-1]
    return CommandResult(payload, f"converge: distance {last['distance']} at k={last['k']}", [table])


def handle_normal_cone(data, params, output_path) -> CommandResult:
    _, D = _load(data, params, ('normal_cone',), 'normal-cone')
    measure = normal_cone_pushforward(D)
    slices = [Fraction(0), D.c / 2, D.c]
    if params.get('a') is not None:
        slices.append(to_fraction(params['a']))
    checks = {fraction_to_str(a): slice_check(D, a) for a in sorted(set(slices))}
    kept, _ = materialized_degrees(D, _int_param(params, 'k', DEFAULT_CHECK_DEGREE))
    identity = {str(k): filtration_identity_holds(D, k) for k in kept}
    samples = _int_param(params, 'samples', DEFAULT_CDF_SAMPLES)
    payload = {
        'c': fraction_to_str(D.c),
        'measure': measure.to_dict(),
        'mass': fraction_to_str(measure.total_mass),
        'transform': normal_cone_transform(D).to_dict(),
        'volume_polynomial': [
            {'low': fraction_to_str(p.low), 'high': fraction_to_str(p.high),
             'coeffs': [fraction_to_str(x) for x in p.coeffs]}
            for p in volume_polynomial(D)
        ],
        'slice_check': checks,
        'filtration_identity': identity,
        'dh_structure': dh_structure_check(measure, D.base.dim),
        'dh_breakpoints': dh_breakpoints_ok(D, measure),
    }
    table = (str(FileUtils.sibling_path(output_path, 'cdf')), CDF_HEADER, _cdf_rows(measure, samples))
    passed = all(checks.values()) and all(identity.values())
    return CommandResult(payload, f"normal-cone: atom {fraction_to_str(measure.atom_mass(0))} at 0, "
                                  f"slice checks {'pass' if passed else 'FAIL'}", [table])


def handle_f0(data, params, output_path) -> CommandResult:
    _, T = _load(data, params, ('test_configuration',), 'f0')
    report = f0_invariant(T, _k_list(params, DEFAULT_F0_DEGREES))
    return CommandResult(report.to_dict(), f"f0: {fraction_to_str(report.f0)}")


def handle_check(data, params, output_path) -> CommandResult:
    kind, obj = _load(data, params, ('test_configuration', 'normal_cone', 'filtration'), 'check')
    default = obj.degree_bound if kind == 'filtration' else DEFAULT_CHECK_DEGREE
    k_max = _int_param(params, 'k', default)
    F = _filtration_for(kind, obj, k_max)
    report = check_admissible(F, k_max)
    payload = report.to_dict()
    if kind == 'test_configuration':
        payload['weight_bound'] = all(weight_bound_holds(obj, k) for k in range(1, k_max + 1))
    return CommandResult(payload, f"check: {'pass' if report.passed else 'counterexample found'} (k_max={k_max})")


HANDLERS: Dict[str, Callable[[Dict[str, Any], Dict[str, str], str], CommandResult]] = {
    'body': handle_body,
    'weights': handle_weights,
    'transform': handle_transform,
    'pushforward': handle_pushforward,
    'converge': handle_converge,
    'normal-cone': handle_normal_cone,
    'f0': handle_f0,
    'check': handle_check,
}


def execute(req: CommandRequest, file_utils: Optional[FileUtils] = None) -> CommandResult:
    """Run a command and write its outputs; errors propagate."""
    file_utils = file_utils or FileUtils()
    data = file_utils.read_json(req.input_path)
    result = HANDLERS[req.command](data, req.params, req.output_path)
    payload = dict(result.payload)
    payload['command'] = req.command
    file_utils.write_json(req.output_path, payload)
    for path, header, rows in result.tables:
        file_utils.write_csv(path, header, rows)
    return result


def run(req: CommandRequest) -> int:
    """Exit status: 0 on success, 2 for invalid input, 3 for a failed precondition, 1 otherwise."""
    try:
        result = execute(req)
        print(f"{result.summary} -> {req.output_path}")
        return 0
    except OkounkovLabError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        if e.subject is not None:
            logger.error(f"Violating object: {e.subject!r}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error in '{req.command}': {str(e)}")
        logger.exception("Full error traceback:")
        return 1
    finally:
        shutdown()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='okounkov-lab',
        description='Exact Okounkov bodies, toric test configurations and their limit measures.',
    )
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--input', required=True, help='input JSON file')
    parser.add_argument('--output', required=True, help='output JSON file; CSV tables are written next to it')
    parser.add_argument('--k', help='degree (weights), degree bound (check, normal-cone) or Delta_k degree (body)')
    parser.add_argument('--k-list', dest='k_list', help='comma-separated degrees, e.g. 10,20,40')
    parser.add_argument('--c', help='override the normal-cone parameter c (p/q)')
    parser.add_argument('--a', help='extra slice value a in [0, c] for normal-cone (p/q)')
    parser.add_argument('--samples', help=f'CDF grid size (default {DEFAULT_CDF_SAMPLES})')
    parser.add_argument('--debug', action='store_true', help='DEBUG logging')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(debug_mode=args.debug or is_debug_mode(), log_file=get_log_file())
    params = {name: getattr(args, name) for name in ('k', 'k_list', 'c', 'a', 'samples')
              if getattr(args, name) is not None}
    try:
        req = CommandRequest(args.command, args.input, args.output, params)
    except OkounkovLabError as e:
        logger.error(str(e))
        return e.exit_code
    return run(req)


if __name__ == '__main__':
    sys.exit(main())
