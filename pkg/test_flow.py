#!/usr/bin/env python3
"""
Tests for geodesic integration, group-curve reconstruction and the route cross-checks
"""

import math

import numpy as np

from spraylab_cli import build_config
from spraylab_errors import BlowUpError, DomainExitError, InvalidInputError
from spraylab_examples import get_example
from spraylab_field import SprayField
from spraylab_flow import (
    chart_cross_check,
    compare_routes,
    geodesic,
    geodesic_batch,
    homogeneous_geodesic,
    integrate_eta_flow,
    lifted_homogeneous_group_curve,
    log_derivative_residuals,
    reconstruct_group_curve,
    trajectory_json,
    verify_claim_a,
)
from spraylab_lie_core import matrix_exp


def load(name: str):
    return build_config(get_example(name))


def test_zero_eta_group_curve_matches_exponential():
    for name in ('so3_group', 'su2_group'):
        cfg = load(name)
        y0 = np.array([1.0, 0.5, -0.25])
        traj = geodesic(cfg.space, cfg.field, y0, (0.0, 2.0), 1e-3)
        u = cfg.rep.rho(cfg.space.embed_m(y0))
        worst = max(float(np.max(np.abs(c - matrix_exp(t * u)))) for t, c in zip(traj.times, traj.group_samples))
        assert worst <= 1e-8, f"{name}: {worst:.3e}"


def test_tangential_flow_rotates_y():
    cfg = load('so3_sphere_tangential_eta')
    times, ys = integrate_eta_flow(cfg.field, [1.0, 0.0], (0.0, 2.0), 1e-3)
    expected = np.column_stack([np.cos(times), -np.sin(times)])
    assert np.max(np.abs(ys - expected)) <= 1e-10


def test_two_route_geodesic():
    cfg = load('so3_sphere_tangential_eta')
    v = np.array([0.0, 0.0, 1.0])
    cert = compare_routes(cfg.space, cfg.field, [1.0, 0.0], v, (0.0, 2.0), 1e-3, 1e-6)
    assert cert.passed, cert.to_dict()
    claim = verify_claim_a(cfg.space, cfg.field, [1.0, 0.0], v, (0.0, 2.0), 1e-3, 1e-6)
    assert claim.passed
    assert claim.max_residual <= 1e-6


def test_zero_eta_sphere_geodesic_is_a_great_circle():
    cfg = load('so3_sphere_zero_eta')
    traj = geodesic(cfg.space, cfg.field, [1.0, 0.0], (0.0, 2.0), 1e-3)
    expected = np.column_stack([np.zeros_like(traj.times), -np.sin(traj.times), np.cos(traj.times)])
    assert np.max(np.abs(traj.point_samples - expected)) <= 1e-8


def test_log_derivative_stays_in_m():
    cfg = load('so3_sphere_tangential_eta')
    traj = geodesic(cfg.space, cfg.field, [1.0, 0.0], (0.0, 1.0), 1e-3)
    h_res, m_res = log_derivative_residuals(cfg.space, traj)
    assert len(h_res) == len(traj.times)
    assert np.max(h_res) <= 1e-6 and np.max(m_res) <= 1e-6
    assert traj.diagnostics['initial_velocity_residual'] <= 1e-6


def test_homogeneous_geodesic_rejects_m_witness():
    cfg = load('so3_sphere_tangential_eta')
    try:
        homogeneous_geodesic(cfg.space, [1.0, 0.0], [1.0, 0.0, 1.0], (0.0, 1.0))
        assert False, "expected InvalidInputError"
    except InvalidInputError:
        pass


def test_lifted_group_curve_projects_to_closed_form():
    cfg = load('so3_sphere_tangential_eta')
    v = np.array([0.0, 0.0, 1.0])
    closed = homogeneous_geodesic(cfg.space, [1.0, 0.0], v, (0.0, 1.0), 0.1)
    lifted = lifted_homogeneous_group_curve(cfg.space, [1.0, 0.0], v, closed.times)
    points = np.array([cfg.rep.act(g) for g in lifted])
    assert np.allclose(points, closed.point_samples, atol=1e-12)


def test_reconstruction_interpolation_options():
    cfg = load('so3_sphere_tangential_eta')
    times, ys = integrate_eta_flow(cfg.field, [1.0, 0.0], (0.0, 1.0), 1e-2)
    cubic = reconstruct_group_curve(cfg.space, times, ys)
    linear = reconstruct_group_curve(cfg.space, times, ys, interpolation='linear')
    exact = lifted_homogeneous_group_curve(cfg.space, [1.0, 0.0], [0.0, 0.0, 1.0], times)
    assert np.max(np.abs(cubic - exact)) < np.max(np.abs(linear - exact))
    try:
        reconstruct_group_curve(cfg.space, times, ys, interpolation='quintic')
        assert False, "expected InvalidInputError"
    except InvalidInputError:
        pass


def test_backward_integration():
    cfg = load('so3_sphere_zero_eta')
    traj = geodesic(cfg.space, cfg.field, [1.0, 0.0], (0.0, -1.0), 1e-3)
    assert traj.times[-1] == -1.0
    assert np.allclose(traj.point_samples[-1], [0.0, math.sin(1.0), math.cos(1.0)], atol=1e-8)


def test_blow_up_is_reported():
    cfg = load('so3_sphere_zero_eta')
    f = SprayField.from_strings(cfg.space, 'components', ['-norm()*y1', '-norm()*y2'])
    try:
        geodesic(cfg.space, f, [1.0, 0.0], (0.0, 2.0), 1e-3)
        assert False, "expected BlowUpError"
    except BlowUpError as e:
        assert 0.9 <= e.reached_time <= 1.1


def test_domain_exit_is_reported():
    cfg = load('so3_sphere_zero_eta')
    # not a spray (degree 0), but y' = -y/|y| reaches the zero section at t = 1
    f = SprayField.from_strings(cfg.space, 'components', ['y1/norm()', 'y2/norm()'])
    try:
        integrate_eta_flow(f, [1.0, 0.0], (0.0, 2.0), 1e-3)
        assert False, "expected DomainExitError"
    except DomainExitError as e:
        assert abs(e.reached_time - 1.0) <= 0.01
        times, ys = e.partial
        assert len(times) == len(ys) > 900


def test_geodesic_batch_keeps_order():
    cfg = load('so3_sphere_tangential_eta')
    y0s = [[1.0, 0.0], [0.0, 2.0], [0.5, -0.5]]
    batch = geodesic_batch(cfg.space, cfg.field, y0s, (0.0, 0.5), 1e-2, max_workers=3)
    for y0, traj in zip(y0s, batch):
        single = geodesic(cfg.space, cfg.field, y0, (0.0, 0.5), 1e-2)
        assert np.array_equal(traj.point_samples, single.point_samples)


def test_chart_cross_check():
    cfg = load('sphere_chart')
    cert = chart_cross_check(cfg.space, cfg.chart, [0.0, 1.0], np.zeros(3), (0.0, math.pi / 2), 1e-3, 1e-5)
    assert cert.passed, cert.max_residual


def test_trajectory_exports():
    cfg = load('so3_sphere_zero_eta')
    traj = geodesic(cfg.space, cfg.field, [1.0, 0.0], (0.0, 0.1), 1e-2)
    csv_text = traj.to_csv()
    lines = csv_text.strip().split('\n')
    assert lines[0].startswith('t,y_1,y_2,c_11')
    assert lines[0].endswith('point_3')
    assert len(lines) == len(traj.times) + 1
    assert '"rows"' in trajectory_json(traj)


def _convergence_ratio(final_states) -> float:
    coarse, mid, fine = final_states
    return float(np.linalg.norm(coarse - mid) / np.linalg.norm(mid - fine))


def test_rk4_order_on_eta_flow():
    # halving the step should cut the error by 2^4
    cfg = load('so3_sphere_tangential_eta')
    finals = [integrate_eta_flow(cfg.field, [1.0, 0.5], (0.0, 2.0), h)[1][-1] for h in (0.1, 0.05, 0.025)]
    ratio = _convergence_ratio(finals)
    assert 12.0 <= ratio <= 20.0, ratio


def test_rk4_order_on_group_reconstruction():
    cfg = load('so3_sphere_tangential_eta')
    finals = []
    for h in (0.1, 0.05, 0.025):
        times = np.linspace(0.0, 2.0, int(round(2.0 / h)) + 1)
        ys = np.column_stack([np.cos(times), -np.sin(times)])
        y_dots = np.column_stack([-np.sin(times), -np.cos(times)])
        finals.append(reconstruct_group_curve(cfg.space, times, ys, y_dots)[-1])
    ratio = _convergence_ratio(finals)
    assert 12.0 <= ratio <= 20.0, ratio


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith('test_') and callable(fn):
            fn()
            print(f"[OK] {name}")
