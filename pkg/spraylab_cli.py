#!/usr/bin/env python3
"""
Spraylab command-line front end

Loads a JSON config (or a built-in example), validates every section and
dispatches to the checks and integrators.

Usage:
    python spraylab_cli.py validate --example so3_sphere
    python spraylab_cli.py check-go --config configs/so3_sphere_radial_eta.json
    python spraylab_cli.py compare --example so3_sphere_tangential_eta --y0 1,0 --t1 2
    python spraylab_cli.py geodesic --example su2_group --out geodesic.csv
    python spraylab_cli.py examples --dump sphere_chart --out sphere_chart.json

Exit codes: 0 pass, 1 check failed or inconclusive, 2 invalid input,
3 numerical failure.
"""

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from spraylab_classify import (
    GoVerdict,
    WsVerdict,
    check_go,
    check_reversal,
    check_ws,
    format_report,
    go_witness,
    verify_theorem3,
)
from spraylab_errors import (
    ConfigError,
    EvaluationDomainError,
    InvalidInputError,
    NumericalFailure,
    PreconditionError,
)
from spraylab_examples import EXAMPLES, dump_example, get_example, list_examples
from spraylab_exprdsl import parse_all
from spraylab_field import SprayField, check_all
from spraylab_flow import (
    chart_cross_check,
    compare_routes,
    geodesic,
    trajectory_json,
    verify_claim_a,
)
from spraylab_lie_core import STABILIZER_TOL, LieAlgebra, MatrixRep, matrix_exp, realify
from spraylab_local import CHART_MAPS, ChartSpec, LocalSpray, check_local_homogeneity
from spraylab_reductive import ReductiveSpace, index_set_problems, validate_decomposition

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3

SEED_ENV_VAR = 'SPRAYLAB_SEED'
DEFAULT_SEED = 42
REQUIRED_PROPERTIES = ('homogeneity', 'equivariance', 'chart_homogeneity')
CHART_POINTS = 8


@dataclass
class Tolerances:
    """Pass/fail thresholds of every check"""
    go_pass: float = 1e-8
    go_fail: float = 1e-3
    ws_pass: float = 1e-8
    homogeneity: float = 1e-9
    equivariance: float = 1e-8
    evenness: float = 1e-10
    claim_a: float = 1e-6
    theorem3: float = 1e-6
    chart: float = 1e-5


@dataclass
class NumericsConfig:
    """Integration and sampling settings"""
    step: float = 1e-3
    t_span: Tuple[float, float] = (0.0, 2.0)
    samples: int = 200
    group_samples: int = 8
    seed: int = DEFAULT_SEED
    restarts: int = 16
    iters: int = 200
    lambdas: Tuple[float, ...] = (0.5, 2.0, 3.0)
    y0: Optional[List[float]] = None
    tolerances: Tolerances = field(default_factory=Tolerances)


@dataclass
class LoadedConfig:
    """Validated objects built from one config"""
    name: str
    space: ReductiveSpace
    field: SprayField
    numerics: NumericsConfig
    chart: Optional[ChartSpec] = None
    source: Optional[str] = None

    @property
    def algebra(self) -> LieAlgebra:
        return self.space.algebra

    @property
    def rep(self) -> MatrixRep:
        return self.space.rep


def setup_logging(verbose: bool = False, log_file: Optional[str] = None):
    """Log to stderr (stdout carries results), optionally to a file as well"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


# ---------------------------------------------------------------------------
# config loading

def _as_matrix(value, size: int, where: str, violations: List[str]) -> Optional[np.ndarray]:
    """Nested rows or a flat row-major list of size*size numbers"""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        violations.append(f"{where}: not a numeric matrix")
        return None
    if arr.shape == (size * size,):
        arr = arr.reshape(size, size)
    if arr.shape != (size, size):
        violations.append(f"{where}: expected {size}x{size}, got shape {arr.shape}")
        return None
    return arr


def _as_point(value, size: int, where: str, violations: List[str]) -> Optional[np.ndarray]:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        violations.append(f"{where}: not numeric")
        return None
    if arr.shape not in ((size,), (size, size)):
        violations.append(f"{where}: expected a vector of length {size} or a {size}x{size} matrix, "
                          f"got shape {arr.shape}")
        return None
    return arr


def _split_complex(value) -> Tuple[object, object]:
    """{"real": A, "imag": B} -> (A, B); plain values have no imaginary part"""
    if isinstance(value, dict):
        return value.get('real'), value.get('imag')
    return value, None


def _load_representation(section: Dict, dim: int, violations: List[str]) -> Optional[MatrixRep]:
    size = section.get('size')
    gens = section.get('generators')
    base = section.get('base_point')
    if not isinstance(size, int) or size < 1:
        violations.append("representation.size must be a positive integer")
        return None
    if not isinstance(gens, list):
        violations.append("representation.generators must be a list of matrices")
        return None
    if len(gens) != dim:
        violations.append(f"representation has {len(gens)} generators for a {dim}-dimensional algebra")
    if base is None:
        violations.append("representation.base_point is missing")
        return None

    is_complex = any(isinstance(g, dict) for g in gens) or isinstance(base, dict)
    parts = []
    for pos, g in enumerate(gens):
        re_part, im_part = _split_complex(g)
        re_m = _as_matrix(re_part, size, f"representation.generators[{pos}]", violations)
        im_m = (np.zeros((size, size)) if im_part is None
                else _as_matrix(im_part, size, f"representation.generators[{pos}].imag", violations))
        parts.append((re_m, im_m))
    re_b, im_b = _split_complex(base)
    re_p = _as_point(re_b, size, "representation.base_point", violations)
    im_p = None
    if re_p is not None:
        im_p = (np.zeros_like(re_p) if im_b is None
                else _as_point(im_b, size, "representation.base_point.imag", violations))
        if im_p is not None and im_p.shape != re_p.shape:
            violations.append("representation.base_point: real and imaginary parts differ in shape")
            im_p = None
    if re_p is None or im_p is None or any(r is None or i is None for r, i in parts):
        return None

    if is_complex:
        generators = np.array([realify(r, i) for r, i in parts])
        base_point = realify(re_p, im_p)
    else:
        generators = np.array([r for r, _ in parts])
        base_point = re_p
    try:
        return MatrixRep(generators, base_point)
    except InvalidInputError as e:
        violations.append(f"representation: {e}")
        return None


def _load_eta(section: Dict, space: ReductiveSpace, violations: List[str]) -> Optional[SprayField]:
    if not isinstance(section, dict):
        violations.append("section 'eta' must be an object")
        return None
    kind = section.get('kind', 'zero')
    if kind == 'zero':
        sources, expected = [], 0
    elif kind == 'bracket_form':
        sources, expected = section.get('coefficients', []), space.h_dim
    elif kind == 'components':
        sources, expected = section.get('components', []), space.q
    else:
        violations.append(f"eta.kind {kind!r} is not one of zero | bracket_form | components")
        return None
    if not isinstance(sources, list) or not all(isinstance(s, str) for s in sources):
        violations.append("eta expressions must be a list of strings")
        return None
    if len(sources) != expected:
        what = '|h|' if kind == 'bracket_form' else '|m|'
        violations.append(f"eta ({kind}) has {len(sources)} expressions, {what} = {expected}")
    _, errors = parse_all(sources, space.q)
    violations.extend(f"eta: {e}" for e in errors)
    if errors or len(sources) != expected:
        return None
    return SprayField.from_strings(space, kind, sources)


def _as_tuple(value) -> Tuple:
    """Lists become tuples; anything else becomes a 1-tuple the range checks reject"""
    return tuple(value) if isinstance(value, (list, tuple)) else (value,)


def _load_numerics(section: Dict, violations: List[str]) -> NumericsConfig:
    defaults = NumericsConfig()
    if not isinstance(section, dict):
        violations.append("section 'numerics' must be an object")
        return defaults
    tolerances = Tolerances()
    tol_data = section.get('tolerances', {})
    if not isinstance(tol_data, dict):
        violations.append("numerics.tolerances must be an object")
        tol_data = {}
    known = {f.name for f in fields(Tolerances)}
    for key, value in tol_data.items():
        if key not in known:
            violations.append(f"numerics.tolerances.{key} is not a known tolerance ({', '.join(sorted(known))})")
        elif not isinstance(value, (int, float)) or value <= 0:
            violations.append(f"numerics.tolerances.{key} must be a positive number")
        else:
            setattr(tolerances, key, float(value))

    numerics = NumericsConfig(
        step=section.get('step', defaults.step),
        t_span=_as_tuple(section.get('t_span') or defaults.t_span),
        samples=section.get('samples', defaults.samples),
        group_samples=section.get('group_samples', defaults.group_samples),
        seed=section.get('seed', defaults.seed),
        restarts=section.get('restarts', defaults.restarts),
        iters=section.get('iters', defaults.iters),
        lambdas=_as_tuple(section.get('lambdas', defaults.lambdas)),
        y0=section.get('y0', defaults.y0),
        tolerances=tolerances,
    )
    if not isinstance(numerics.step, (int, float)) or not numerics.step > 0:
        violations.append("numerics.step must be a positive number")
    if len(numerics.t_span) != 2 or not all(isinstance(t, (int, float)) for t in numerics.t_span):
        violations.append("numerics.t_span must be [t0, t1]")
    for key in ('samples', 'group_samples', 'restarts', 'iters'):
        value = getattr(numerics, key)
        if not isinstance(value, int) or value < 1:
            violations.append(f"numerics.{key} must be a positive integer")
    if not isinstance(numerics.seed, int):
        violations.append("numerics.seed must be an integer")
    if not numerics.lambdas or not all(isinstance(v, (int, float)) and v > 0 for v in numerics.lambdas):
        violations.append("numerics.lambdas must be positive numbers")
    return numerics


def _load_chart(section: Dict, algebra_dim: int, violations: List[str]) -> Optional[ChartSpec]:
    if not isinstance(section, dict):
        violations.append("section 'chart' must be an object")
        return None
    dim = section.get('dim')
    sources = section.get('coefficients', [])
    map_name = section.get('map', 'sphere_polar')
    tilt = section.get('tilt')
    if not isinstance(dim, int) or dim < 1:
        violations.append("chart.dim must be a positive integer")
        return None
    if map_name not in CHART_MAPS:
        violations.append(f"chart.map {map_name!r} is not one of {', '.join(sorted(CHART_MAPS))}")
    if not isinstance(sources, list) or len(sources) != dim:
        violations.append(f"chart.coefficients must list {dim} expressions")
        return None
    _, errors = parse_all(sources, dim, chart_dim=dim)
    violations.extend(f"chart: {e}" for e in errors)
    if tilt is not None and (not isinstance(tilt, list) or len(tilt) != algebra_dim):
        violations.append(f"chart.tilt must be an algebra vector of length {algebra_dim}")
        return None
    if errors or map_name not in CHART_MAPS:
        return None
    return ChartSpec(LocalSpray.from_strings(dim, sources), map_name,
                     None if tilt is None else np.asarray(tilt, dtype=float))


def _indices(section: Dict, key: str, violations: List[str]) -> List[int]:
    """1-based JSON indices -> 0-based"""
    values = section.get(key, [])
    if not isinstance(values, list) or not all(isinstance(i, int) for i in values):
        violations.append(f"decomposition.{key} must be a list of integers")
        return []
    return [i - 1 for i in values]


def build_config(data: Dict, path: Optional[str] = None) -> LoadedConfig:
    """Validate a config dict; every violation found is reported in one ConfigError"""
    violations: List[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["top level must be a JSON object"], path)
    for key in ('algebra', 'representation', 'decomposition'):
        if not isinstance(data.get(key), dict):
            violations.append(f"section {key!r} is missing")
    if violations:
        raise ConfigError(violations, path)

    alg = data['algebra']
    dim = alg.get('dim')
    if not isinstance(dim, int) or dim < 1:
        raise ConfigError(violations + ["algebra.dim must be a positive integer"], path)
    try:
        algebra, problems = LieAlgebra.from_triples(dim, alg.get('structure_constants', []))
    except (TypeError, ValueError) as e:
        raise ConfigError(violations + [f"algebra.structure_constants: {e}"], path)
    violations.extend(f"algebra: {p}" for p in problems)
    violations.extend(f"algebra: {v}" for v in algebra.violations())

    rep = _load_representation(data['representation'], dim, violations)
    if rep is not None and rep.generators.shape[0] == dim:
        violations.extend(f"representation: {v}" for v in rep.violations(algebra))

    dec = data['decomposition']
    h = _indices(dec, 'h_indices', violations)
    m = _indices(dec, 'm_indices', violations)
    index_problems = index_set_problems(dim, h, m)
    violations.extend(f"decomposition: {p}" for p in index_problems)

    space, spray_field = None, None
    if rep is not None and not index_problems and rep.generators.shape[0] == dim:
        space = ReductiveSpace(algebra, rep, tuple(h), tuple(m))
        cert = validate_decomposition(space)
        if cert.subalgebra_residual > cert.tolerance:
            violations.append(f"decomposition: h is not a subalgebra (residual {cert.subalgebra_residual:.3e})")
        if cert.reductive_residual > cert.tolerance:
            violations.append(f"decomposition: [h, m] is not in m (residual {cert.reductive_residual:.3e})")
        if cert.stabilizer_residual > STABILIZER_TOL:
            violations.append(f"decomposition: h does not fix the base point "
                              f"(residual {cert.stabilizer_residual:.3e})")
        spray_field = _load_eta(data.get('eta', {'kind': 'zero'}), space, violations)

    numerics = _load_numerics(data.get('numerics', {}), violations)
    chart = _load_chart(data['chart'], dim, violations) if 'chart' in data else None

    if violations:
        raise ConfigError(violations, path)
    logging.info(f"Config {data.get('name', path)} loaded: dim {dim}, |h| = {space.h_dim}, |m| = {space.q}")
    return LoadedConfig(data.get('name', path or 'config'), space, spray_field, numerics, chart, path)


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not allowed in configs")


def load_config(path: str) -> LoadedConfig:
    """Read a strict UTF-8 JSON config file and validate it"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError([f"cannot read config: {e}"], path)
    except UnicodeDecodeError as e:
        raise ConfigError([f"config is not valid UTF-8 (byte offset {e.start})"], path)
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ConfigError([f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"], path)
    except ValueError as e:
        raise ConfigError([str(e)], path)
    return build_config(data, path)


# ---------------------------------------------------------------------------
# command helpers

def resolve_seed(flag: Optional[int], config_seed: Optional[int]) -> int:
    """--seed > SPRAYLAB_SEED > config numerics.seed > 42"""
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InvalidInputError(f"{SEED_ENV_VAR}={env!r} is not an integer")
    return config_seed if config_seed is not None else DEFAULT_SEED


def parse_vector(text: str, name: str) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(',')]
    except ValueError:
        raise InvalidInputError(f"--{name} must be a comma-separated list of numbers, got {text!r}")
    if not all(math.isfinite(v) for v in values):
        raise InvalidInputError(f"--{name} has non-finite entries")
    return np.array(values)


def _initial_vector(args, cfg: LoadedConfig) -> np.ndarray:
    if args.y0:
        return parse_vector(args.y0, 'y0')
    if cfg.numerics.y0 is not None:
        return np.asarray(cfg.numerics.y0, dtype=float)
    y0 = np.zeros(cfg.space.q)
    y0[0] = 1.0
    return y0


def _t_span(args, cfg: LoadedConfig) -> Tuple[float, float]:
    t0 = args.t0 if args.t0 is not None else float(cfg.numerics.t_span[0])
    t1 = args.t1 if args.t1 is not None else float(cfg.numerics.t_span[1])
    return t0, t1


def _step(args, cfg: LoadedConfig) -> float:
    return args.step if args.step is not None else float(cfg.numerics.step)


def _samples(args, cfg: LoadedConfig) -> int:
    return args.samples if args.samples is not None else cfg.numerics.samples


def _restarts(args, cfg: LoadedConfig) -> int:
    return args.restarts if args.restarts is not None else cfg.numerics.restarts


def _load_from_args(args) -> LoadedConfig:
    if args.config and args.example:
        raise InvalidInputError("give either --config or --example, not both")
    if args.example:
        return build_config(get_example(args.example), f"example:{args.example}")
    if args.config:
        return load_config(args.config)
    raise InvalidInputError("a config is required (--config PATH or --example NAME)")


def _render(payload, fmt: str) -> str:
    """payload: a certificate (to_dict) or a dict of certificates"""
    if fmt == 'text':
        if hasattr(payload, 'to_dict'):
            return format_report(payload)
        return "".join(format_report(cert) for cert in payload.values() if hasattr(cert, 'to_dict'))
    if hasattr(payload, 'to_dict'):
        data = payload.to_dict()
    else:
        data = {k: (v.to_dict() if hasattr(v, 'to_dict') else v) for k, v in payload.items()}
    return json.dumps(data, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def write_output(text: str, out: Optional[str]):
    """Results go to --out, or stdout"""
    if out:
        with open(out, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logging.info(f"Results saved to {out}")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands

@dataclass
class ValidationReport:
    """Everything `validate` checks, in one certificate"""
    name: str
    antisymmetry_residual: float
    jacobi_residual: float
    representation_residual: float
    decomposition: Dict
    properties: Dict
    expressions: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        # evenness is reported but only matters for weak symmetry
        return (self.decomposition["verdict"] == "pass"
                and all(p.passed for k, p in self.properties.items() if k in REQUIRED_PROPERTIES))

    def to_dict(self) -> Dict:
        return {
            'check': 'validate',
            'config': self.name,
            'verdict': 'pass' if self.passed else 'fail',
            'antisymmetry_residual': self.antisymmetry_residual,
            'jacobi_residual': self.jacobi_residual,
            'representation_residual': self.representation_residual,
            'decomposition': self.decomposition,
            'properties': {k: v.to_dict() for k, v in self.properties.items()},
            'expressions': self.expressions,
        }


def chart_points(cfg: LoadedConfig, count: int, seed: int) -> List[np.ndarray]:
    """Chart images of seeded points exp(t) . o on the model"""
    rng = np.random.default_rng(seed)
    points = []
    for t in rng.uniform(-math.pi, math.pi, size=(count, cfg.algebra.dim)):
        model_point = cfg.rep.act(matrix_exp(cfg.rep.rho(t)))
        try:
            points.append(np.asarray(cfg.chart.to_chart(model_point), dtype=float))
        except ValueError as e:
            raise InvalidInputError(f"chart map {cfg.chart.map_name} does not fit model points of "
                                    f"size {model_point.size}: {e}") from e
    return points


def cmd_validate(args, cfg: LoadedConfig, seed: int) -> int:
    n = cfg.numerics
    tol = asdict(n.tolerances)
    props = check_all(cfg.field, _samples(args, cfg), n.group_samples, n.lambdas, seed,
                      {k: tol[k] for k in ('homogeneity', 'equivariance', 'evenness')})
    if cfg.chart is not None:
        props['chart_homogeneity'] = check_local_homogeneity(
            cfg.chart.spray, chart_points(cfg, CHART_POINTS, seed), _samples(args, cfg), n.lambdas, seed,
            tol['homogeneity'])
    report = ValidationReport(
        cfg.name,
        cfg.algebra.antisymmetry_residual(),
        cfg.algebra.jacobi_residual(),
        cfg.rep.representation_residual(cfg.algebra),
        validate_decomposition(cfg.space).to_dict(),
        props,
        {'eta': cfg.field.sources, 'chart': None if cfg.chart is None else cfg.chart.spray.sources},
    )
    if args.format == 'text':
        text = f"\n{'=' * 70}\nSPRAYLAB VALIDATION - {cfg.name}\n{'=' * 70}\n"
        text += f"Antisymmetry residual:    {report.antisymmetry_residual:.3e}\n"
        text += f"Jacobi residual:          {report.jacobi_residual:.3e}\n"
        text += f"Representation residual:  {report.representation_residual:.3e}\n"
        text += f"Decomposition:            {report.decomposition['verdict']}\n"
        text += f"Eta:                      {', '.join(report.expressions['eta']) or '0'}\n"
        if report.expressions['chart'] is not None:
            text += f"Chart coefficients:       {', '.join(report.expressions['chart'])}\n"
        text += "".join(format_report(p) for p in props.values())
    else:
        text = _render(report, 'json')
    write_output(text, args.out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_check_go(args, cfg: LoadedConfig, seed: int) -> int:
    tol = cfg.numerics.tolerances
    cert = check_go(cfg.space, cfg.field, _samples(args, cfg), seed, tol.go_pass, tol.go_fail)
    write_output(_render(cert, args.format), args.out)
    return EXIT_OK if cert.verdict == GoVerdict.GO_EVIDENCE else EXIT_CHECK_FAILED


def cmd_check_ws(args, cfg: LoadedConfig, seed: int) -> int:
    n = cfg.numerics
    cert = check_ws(cfg.space, cfg.field, _samples(args, cfg), _restarts(args, cfg), seed,
                    n.tolerances.ws_pass, n.tolerances.evenness, n.iters)
    write_output(_render(cert, args.format), args.out)
    return EXIT_OK if cert.verdict == WsVerdict.WS_ALGEBRAIC_EVIDENCE else EXIT_CHECK_FAILED


def cmd_verify_thm3(args, cfg: LoadedConfig, seed: int) -> int:
    n = cfg.numerics
    samples, restarts = _samples(args, cfg), _restarts(args, cfg)
    ws_cert = check_ws(cfg.space, cfg.field, samples, restarts, seed,
                       n.tolerances.ws_pass, n.tolerances.evenness, n.iters)
    cert = verify_theorem3(cfg.space, cfg.field, _initial_vector(args, cfg), _t_span(args, cfg),
                           _step(args, cfg), ws_cert, n.tolerances.theorem3, samples, restarts, seed)
    write_output(_render(cert, args.format), args.out)
    return EXIT_OK if cert.passed else EXIT_CHECK_FAILED


def cmd_geodesic(args, cfg: LoadedConfig, seed: int) -> int:
    traj = geodesic(cfg.space, cfg.field, _initial_vector(args, cfg), _t_span(args, cfg), _step(args, cfg))
    if args.format == 'json':
        text = trajectory_json(traj) + "\n"
    else:
        text = traj.to_csv()
    write_output(text, args.out)
    return EXIT_OK


def cmd_compare(args, cfg: LoadedConfig, seed: int) -> int:
    s, tol = cfg.space, cfg.numerics.tolerances
    y0 = _initial_vector(args, cfg)
    t_span, step = _t_span(args, cfg), _step(args, cfg)
    if args.v:
        v = s.embed_h(parse_vector(args.v, 'v'))
    else:
        v, residual = go_witness(s, cfg.field, y0)
        if residual > tol.go_pass:
            logging.warning(f"no g.o. witness at y0 (residual {residual:.3e}); routes are expected to differ")
    results = {
        'two_route': compare_routes(s, cfg.field, y0, v, t_span, step, tol.claim_a),
        'claim_a': verify_claim_a(s, cfg.field, y0, v, t_span, step, tol.claim_a),
    }
    if cfg.chart is not None:
        results['chart'] = chart_cross_check(s, cfg.chart, y0, v, t_span, step, tol.chart)
    write_output(_render(results, args.format), args.out)
    return EXIT_OK if all(c.passed for c in results.values()) else EXIT_CHECK_FAILED


def cmd_check_reversal(args, cfg: LoadedConfig, seed: int) -> int:
    n = cfg.numerics
    cert = check_reversal(cfg.space, cfg.field, _initial_vector(args, cfg), _t_span(args, cfg),
                          _step(args, cfg), _restarts(args, cfg), seed, n.tolerances.claim_a,
                          n.tolerances.ws_pass)
    write_output(_render(cert, args.format), args.out)
    return EXIT_OK if cert.status.value == 'pass' else EXIT_CHECK_FAILED


def cmd_examples(args) -> int:
    if args.dump:
        write_output(dump_example(args.dump), args.out)
        return EXIT_OK
    lines = [f"{name:28s} {EXAMPLES[name]['description']}" for name in list_examples()]
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'check-go': cmd_check_go,
    'check-ws': cmd_check_ws,
    'verify-thm3': cmd_verify_thm3,
    'geodesic': cmd_geodesic,
    'compare': cmd_compare,
    'check-reversal': cmd_check_reversal,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Homogeneous spray manifold toolkit')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='Path to config JSON file')
    common.add_argument('--example', type=str, help='Built-in example name (see `examples --list`)')
    common.add_argument('--y0', type=str, help='Initial vector in m, comma-separated (use --y0=-1,0 for a leading minus)')
    common.add_argument('--t0', type=float, help='Start time (default: numerics.t_span[0])')
    common.add_argument('--t1', type=float, help='End time (default: numerics.t_span[1])')
    common.add_argument('--step', type=float, help='RK4 step (default: numerics.step)')
    common.add_argument('--samples', type=int, help='Number of seeded samples')
    common.add_argument('--seed', type=int, help=f'Random seed (overrides {SEED_ENV_VAR} and the config)')
    common.add_argument('--restarts', type=int, help='Multi-start count for the isotropy search')
    common.add_argument('--v', type=str, help='Witness in h-coordinates for compare, comma-separated')
    common.add_argument('--out', type=str, help='Output file (default: stdout)')
    common.add_argument('--format', choices=['json', 'text', 'csv'], help='Output format')
    common.add_argument('--verbose', action='store_true', help='Debug logging on stderr')
    common.add_argument('--log-file', type=str, help='Also write the log to this file')

    sub = parser.add_subparsers(dest='command', required=True)
    helps = {
        'validate': 'Validate a config and run the property checks on eta',
        'check-go': 'Sampled geodesic-orbit check',
        'check-ws': 'Sampled weak-symmetry check',
        'verify-thm3': 'Check weakly symmetric => geodesic orbit along a flow',
        'geodesic': 'Integrate one geodesic and write its samples',
        'compare': 'Integrated geodesic vs the homogeneous closed form (and chart, if configured)',
        'check-reversal': 'Compare g . c(t) with c(-t) for Ad(g) y0 = -y0',
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    ex = sub.add_parser('examples', help='List or dump built-in examples')
    ex.add_argument('--list', action='store_true', help='List example names (default)')
    ex.add_argument('--dump', type=str, metavar='NAME', help='Write the config of NAME')
    ex.add_argument('--out', type=str, help='Output file (default: stdout)')
    ex.add_argument('--verbose', action='store_true', help='Debug logging on stderr')
    ex.add_argument('--log-file', type=str, help='Also write the log to this file')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.log_file)

    try:
        if args.command == 'examples':
            return cmd_examples(args)
        if args.format is None:
            args.format = 'csv' if args.command == 'geodesic' else 'json'
        if args.format == 'csv' and args.command != 'geodesic':
            raise InvalidInputError("--format csv is only available for geodesic")
        if args.format == 'text' and args.command == 'geodesic':
            raise InvalidInputError("geodesic writes csv or json")
        cfg = _load_from_args(args)
        seed = resolve_seed(args.seed, cfg.numerics.seed)
        logging.info(f"Running {args.command} on {cfg.name} (seed {seed})")
        return COMMANDS[args.command](args, cfg, seed)
    except ConfigError as e:
        print(f"[X] Config error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except PreconditionError as e:
        print(f"[X] Refused: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except InvalidInputError as e:
        print(f"[X] Invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except NumericalFailure as e:
        print(f"[X] Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except EvaluationDomainError as e:
        print(f"[X] Evaluation failed: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
