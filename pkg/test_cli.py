#!/usr/bin/env python3
"""
Tests for config loading, the example registry and the command-line front end
"""

import json
import os
import tempfile

from spraylab_cli import (
    EXIT_CHECK_FAILED,
    EXIT_INVALID_INPUT,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    SEED_ENV_VAR,
    build_config,
    load_config,
    main,
    resolve_seed,
)
from spraylab_errors import ConfigError
from spraylab_examples import get_example, list_examples

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(HERE, 'configs')


def config_path(name: str) -> str:
    return os.path.join(CONFIGS, f"{name}.json")


def run(argv):
    """main() with output captured in a temp file; returns (exit code, output text)"""
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, 'out.txt')
        code = main(list(argv) + ['--out', out])
        text = ''
        if os.path.exists(out):
            with open(out, encoding='utf-8') as f:
                text = f.read()
        return code, text


def write_config(tmp: str, data) -> str:
    path = os.path.join(tmp, 'config.json')
    with open(path, 'w', encoding='utf-8') as f:
        f.write(data if isinstance(data, str) else json.dumps(data))
    return path


def test_shipped_configs_match_registry():
    shipped = sorted(name[:-5] for name in os.listdir(CONFIGS) if name.endswith('.json'))
    assert shipped == list_examples()
    for name in shipped:
        with open(config_path(name), encoding='utf-8') as f:
            assert json.load(f) == get_example(name), name


def test_every_config_loads():
    for name in list_examples():
        cfg = load_config(config_path(name))
        assert cfg.name == name
    sphere = load_config(config_path('so3_sphere'))
    assert sphere.space.q == 2 and sphere.space.h_dim == 1
    su2 = load_config(config_path('su2_group'))
    assert su2.rep.n_rep == 4
    assert load_config(config_path('sphere_chart')).chart is not None
    assert load_config(os.path.join(HERE, 'config_example.json')).numerics.tolerances.chart == 1e-5


def test_antisymmetry_violation_is_reported():
    data = get_example('so3_sphere')
    data['algebra']['structure_constants'] = [[1, 2, 3, 1.0], [2, 1, 3, 1.0], [2, 3, 1, 1.0], [3, 1, 2, 1.0]]
    try:
        build_config(data)
        assert False, "expected ConfigError"
    except ConfigError as e:
        assert any('antisymmetry' in v for v in e.violations)


def test_all_violations_are_collected():
    data = get_example('so3_sphere')
    data['algebra']['structure_constants'] = [[1, 2, 3, 1.0], [2, 1, 3, 1.0], [2, 3, 1, 1.0], [3, 1, 2, 1.0]]
    data['eta'] = {'kind': 'components', 'components': ['y1', 'y2', 'y3']}
    data['numerics']['step'] = -1.0
    try:
        build_config(data)
        assert False, "expected ConfigError"
    except ConfigError as e:
        text = "\n".join(e.violations)
        assert 'antisymmetry' in text
        assert 'eta (components) has 3 expressions' in text
        assert 'numerics.step' in text


def test_eta_count_mismatch():
    data = get_example('so3_sphere_tangential_eta')
    data['eta']['coefficients'] = ['norm()', 'norm()']
    try:
        build_config(data)
        assert False, "expected ConfigError"
    except ConfigError as e:
        assert any('|h| = 1' in v for v in e.violations)


def test_bad_expression_and_decomposition():
    data = get_example('so3_sphere_radial_eta')
    data['eta']['components'] = ['norm()*y1', 'y1 +']
    try:
        build_config(data)
        assert False, "expected ConfigError"
    except ConfigError as e:
        assert any('expression [1]' in v for v in e.violations)
    data = get_example('so3_sphere')
    data['decomposition'] = {'h_indices': [1], 'm_indices': [2, 3]}
    try:
        build_config(data)
        assert False, "expected ConfigError"
    except ConfigError as e:
        assert any('base point' in v for v in e.violations)


def test_flat_generators_are_accepted():
    data = get_example('so3_sphere')
    data['representation']['generators'] = [sum(g, []) for g in data['representation']['generators']]
    assert build_config(data).rep.generators.shape == (3, 3, 3)


def test_invalid_json_reports_location():
    with tempfile.TemporaryDirectory() as tmp:
        path = write_config(tmp, '{\n  "algebra": {"dim": 3,}\n}')
        try:
            load_config(path)
            assert False, "expected ConfigError"
        except ConfigError as e:
            assert 'line 2' in e.violations[0]
        assert main(['validate', '--config', path]) == EXIT_INVALID_INPUT


def test_check_go_exit_codes():
    code, text = run(['check-go', '--config', config_path('so3_sphere_zero_eta'), '--samples', '50'])
    assert code == EXIT_OK
    assert json.loads(text)['verdict'] == 'go_evidence'
    code, text = run(['check-go', '--config', config_path('so3_sphere_radial_eta'), '--samples', '50'])
    assert code == EXIT_CHECK_FAILED
    assert json.loads(text)['verdict'] == 'not_go'


def test_compare_tangential():
    code, text = run(['compare', '--config', config_path('so3_sphere_tangential_eta'),
                      '--y0', '1,0', '--t1', '2'])
    assert code == EXIT_OK
    result = json.loads(text)
    assert result['two_route']['max_residual'] <= 1e-6
    assert result['claim_a']['verdict'] == 'pass'
    code, text = run(['compare', '--example', 'sphere_chart'])
    assert code == EXIT_OK
    assert json.loads(text)['chart']['verdict'] == 'pass'


def test_verify_thm3_refusal_is_invalid_input():
    code, _ = run(['verify-thm3', '--example', 'so3_sphere_radial_eta', '--samples', '10', '--restarts', '2'])
    assert code == EXIT_INVALID_INPUT
    code, text = run(['verify-thm3', '--example', 'so3_sphere', '--samples', '10', '--restarts', '4',
                      '--step', '0.01'])
    assert code == EXIT_OK
    assert json.loads(text)['verdict'] == 'pass'


def test_geodesic_outputs():
    code, text = run(['geodesic', '--example', 'so3_sphere', '--t1', '0.1', '--step', '0.01'])
    assert code == EXIT_OK
    lines = text.strip().split('\n')
    assert lines[0].split(',')[:3] == ['t', 'y_1', 'y_2']
    assert len(lines) == 12
    code, text = run(['geodesic', '--example', 'so3_sphere', '--t1', '0.1', '--step', '0.01', '--format', 'json'])
    assert code == EXIT_OK
    assert len(json.loads(text)['rows']) == 11


def test_geodesic_blow_up_exit_code():
    data = get_example('so3_sphere')
    data['eta'] = {'kind': 'components', 'components': ['-norm()*y1', '-norm()*y2']}
    with tempfile.TemporaryDirectory() as tmp:
        path = write_config(tmp, data)
        code, _ = run(['geodesic', '--config', path, '--t1', '2'])
    assert code == EXIT_NUMERICAL_FAILURE


def test_invalid_flags():
    assert run(['geodesic', '--example', 'so3_sphere', '--y0', '1,a'])[0] == EXIT_INVALID_INPUT
    assert run(['geodesic', '--example', 'so3_sphere', '--y0', '1,0,0'])[0] == EXIT_INVALID_INPUT
    assert run(['check-go', '--example', 'nope'])[0] == EXIT_INVALID_INPUT
    assert run(['check-go'])[0] == EXIT_INVALID_INPUT
    assert run(['check-go', '--example', 'so3_sphere', '--format', 'csv'])[0] == EXIT_INVALID_INPUT


def test_dump_reloads_to_identical_certificates():
    with tempfile.TemporaryDirectory() as tmp:
        dumped = os.path.join(tmp, 'dumped.json')
        assert main(['examples', '--dump', 'so3_sphere_tangential_eta', '--out', dumped]) == EXIT_OK
        _, from_file = run(['check-ws', '--config', dumped, '--samples', '10', '--restarts', '2', '--seed', '5'])
        _, from_registry = run(['check-ws', '--example', 'so3_sphere_tangential_eta', '--samples', '10',
                                '--restarts', '2', '--seed', '5'])
    assert from_file == from_registry
    assert json.loads(from_file)['verdict'] == 'not_ws'


def test_examples_listing():
    code, text = run(['examples', '--list'])
    assert code == EXIT_OK
    assert [line.split()[0] for line in text.strip().split('\n')] == list_examples()


def test_seed_precedence():
    saved = os.environ.pop(SEED_ENV_VAR, None)
    try:
        assert resolve_seed(None, None) == 42
        assert resolve_seed(None, 7) == 7
        os.environ[SEED_ENV_VAR] = '11'
        assert resolve_seed(None, 7) == 11
        assert resolve_seed(3, 7) == 3
    finally:
        os.environ.pop(SEED_ENV_VAR, None)
        if saved is not None:
            os.environ[SEED_ENV_VAR] = saved


def test_text_reports():
    code, text = run(['check-go', '--example', 'so3_sphere', '--samples', '10', '--format', 'text'])
    assert code == EXIT_OK
    assert '=' * 70 in text and 'go_evidence' in text
    code, text = run(['validate', '--example', 'so3_sphere_radial_eta', '--samples', '20', '--format', 'text'])
    assert code == EXIT_OK
    assert 'SPRAYLAB VALIDATION' in text
    assert 'Eta:                      (norm() * y1), (norm() * y2)' in text


def test_validate_ignores_evenness():
    # radial eta is odd in y but still a homogeneous, equivariant spray
    code, text = run(['validate', '--example', 'so3_sphere_radial_eta', '--samples', '20'])
    assert code == EXIT_OK
    report = json.loads(text)
    assert report['verdict'] == 'pass'
    assert report['properties']['evenness']['verdict'] == 'fail'
    code, text = run(['validate', '--example', 'so3_sphere_tangential_eta', '--samples', '20'])
    assert code == EXIT_OK
    assert json.loads(text)['verdict'] == 'pass'


def test_validate_fails_on_non_equivariant_eta():
    data = get_example('so3_sphere')
    data['eta'] = {'kind': 'components', 'components': ['y1*y1', '0']}
    with tempfile.TemporaryDirectory() as tmp:
        code, text = run(['validate', '--config', write_config(tmp, data), '--samples', '20'])
    assert code == EXIT_CHECK_FAILED
    report = json.loads(text)
    assert report['properties']['equivariance']['verdict'] == 'fail'


def test_validate_checks_chart_homogeneity():
    code, text = run(['validate', '--example', 'sphere_chart', '--samples', '20'])
    assert code == EXIT_OK
    report = json.loads(text)
    assert report['properties']['chart_homogeneity']['verdict'] == 'pass'
    assert report['properties']['chart_homogeneity']['sample_count'] == 20 * 8
    assert len(report['expressions']['chart']) == 2
    code, text = run(['validate', '--example', 'so3_sphere', '--samples', '20'])
    assert 'chart_homogeneity' not in json.loads(text)['properties']


def test_validate_fails_on_non_homogeneous_chart():
    data = get_example('sphere_chart')
    data['chart']['coefficients'] = ['y1', 'cot(x1)*y1*y2']
    with tempfile.TemporaryDirectory() as tmp:
        code, text = run(['validate', '--config', write_config(tmp, data), '--samples', '20'])
    assert code == EXIT_CHECK_FAILED
    report = json.loads(text)
    assert report['properties']['chart_homogeneity']['verdict'] == 'fail'
    assert report['properties']['homogeneity']['verdict'] == 'pass'


def _expect_config_error(data, fragment: str):
    try:
        build_config(data)
        assert False, "expected ConfigError"
    except ConfigError as e:
        assert any(fragment in v for v in e.violations), e.violations
    with tempfile.TemporaryDirectory() as tmp:
        assert main(['validate', '--config', write_config(tmp, data)]) == EXIT_INVALID_INPUT


def test_sections_of_the_wrong_type():
    data = get_example('so3_sphere')
    data['eta'] = 'zero'
    _expect_config_error(data, "'eta' must be an object")
    data = get_example('so3_sphere')
    data['numerics'] = []
    _expect_config_error(data, "'numerics' must be an object")
    data = get_example('so3_sphere')
    data['numerics']['tolerances'] = [1e-8]
    _expect_config_error(data, 'numerics.tolerances must be an object')
    data = get_example('so3_sphere')
    data['chart'] = 'x'
    _expect_config_error(data, "'chart' must be an object")
    data = get_example('so3_sphere')
    data['numerics']['lambdas'] = 'x'
    _expect_config_error(data, 'numerics.lambdas')
    data = get_example('so3_sphere')
    data['numerics']['t_span'] = 5.0
    _expect_config_error(data, 'numerics.t_span')


def test_invalid_utf8_is_a_config_error():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'config.json')
        with open(path, 'wb') as f:
            f.write(b'\xff\xfe{"algebra": {}}')
        try:
            load_config(path)
            assert False, "expected ConfigError"
        except ConfigError as e:
            assert 'UTF-8' in e.violations[0]
        assert main(['validate', '--config', path]) == EXIT_INVALID_INPUT


def test_non_finite_json_constants_are_rejected():
    for constant in ('NaN', 'Infinity', '-Infinity'):
        text = json.dumps(get_example('so3_sphere')).replace('"step": 0.001', f'"step": {constant}', 1)
        assert constant in text
        with tempfile.TemporaryDirectory() as tmp:
            path = write_config(tmp, text)
            try:
                load_config(path)
                assert False, "expected ConfigError"
            except ConfigError as e:
                assert constant in e.violations[0]
            assert main(['validate', '--config', path]) == EXIT_INVALID_INPUT


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith('test_') and callable(fn):
            fn()
            print(f"[OK] {name}")
