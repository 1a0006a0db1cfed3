#!/usr/bin/env python3
"""
Geodesics of homogeneous spray manifolds

A geodesic c(t) with c(0) = o corresponds to an integral curve y(t) of -eta in
m \\ {0}; the lifted group curve C(t) solves C' = C rho(y(t)), C(0) = I, and
c(t) = C(t) . o. Also provides the closed-form homogeneous geodesic
exp(t(y0 - v)) . o of a g.o. witness v and checks that tie the two routes together.
"""

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from spraylab_errors import (
    BlowUpError,
    DomainExitError,
    EvaluationDomainError,
    InvalidInputError,
    NumericalFailure,
)
from spraylab_field import SprayField, eval_eta
from spraylab_lie_core import adjoint_of_group_element, matrix_exp, re_express
from spraylab_local import (
    BLOWUP_NORM,
    SLIT_THRESHOLD,
    ChartSpec,
    integrate_local,
    rk4_step,
    time_grid,
)
from spraylab_reductive import ReductiveSpace, as_m_vector

GROUP_CONSISTENCY_TOL = 1e-6


@dataclass
class Trajectory:
    """Samples of y(t) in m, the group curve C(t) and the model curve c(t) = C(t) . o"""
    times: np.ndarray
    y_samples: np.ndarray
    group_samples: np.ndarray
    point_samples: np.ndarray
    label: str = "geodesic"
    diagnostics: Dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.y_samples.shape[1]

    def header(self) -> List[str]:
        n = self.group_samples.shape[1]
        cols = ['t'] + [f'y_{i + 1}' for i in range(self.q)]
        cols += [f'c_{i + 1}{j + 1}' for i in range(n) for j in range(n)]
        cols += [f'point_{i + 1}' for i in range(self.point_samples.shape[1])]
        return cols

    def to_rows(self) -> List[List[float]]:
        rows = []
        for k, t in enumerate(self.times):
            rows.append([float(t)] + self.y_samples[k].tolist()
                        + self.group_samples[k].reshape(-1).tolist()
                        + self.point_samples[k].tolist())
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(self.header())
        for row in self.to_rows():
            writer.writerow([repr(v) for v in row])
        return buf.getvalue()

    def to_dict(self) -> Dict:
        return {
            'label': self.label,
            'columns': self.header(),
            'rows': self.to_rows(),
            'diagnostics': self.diagnostics,
        }


@dataclass
class FlowCertificate:
    """Residual of one numerical cross-check along a trajectory"""
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    records: List[Dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'check': self.name,
            'verdict': 'pass' if self.passed else 'fail',
            'tolerance': self.tolerance,
            'samples': self.records,
            'max_residual': self.max_residual,
            'notes': list(self.notes),
        }


def integrate_eta_flow(f: SprayField, y0, t_span: Sequence[float], step: float) -> Tuple[np.ndarray, np.ndarray]:
    """RK4 for y' = -eta(y); stops when ||y|| < 1e-8 or the state blows up"""
    y0 = as_m_vector(f.space, y0, nonzero=True)
    times = time_grid(t_span, step)

    def rhs(_t, y):
        if np.linalg.norm(y) < SLIT_THRESHOLD:
            raise DomainExitError("flow reached the zero section", float(_t))
        return -eval_eta(f, y)

    ys = [y0.copy()]
    for k in range(len(times) - 1):
        h = times[k + 1] - times[k]
        try:
            nxt = rk4_step(rhs, times[k], ys[-1], h)
        except DomainExitError as e:
            raise DomainExitError("flow reached the zero section", float(times[k]),
                                  (times[:len(ys)], np.array(ys))) from e
        except (EvaluationDomainError, InvalidInputError) as e:
            raise NumericalFailure(f"eta evaluation failed: {e}", float(times[k]),
                                   (times[:len(ys)], np.array(ys))) from e
        norm = float(np.linalg.norm(nxt))
        if not np.all(np.isfinite(nxt)) or norm > BLOWUP_NORM:
            logging.warning(f"eta flow blew up near t={times[k]:.6g}")
            raise BlowUpError("eta flow blew up", float(times[k]), (times[:len(ys)], np.array(ys)))
        if norm < SLIT_THRESHOLD:
            raise DomainExitError("flow reached the zero section", float(times[k + 1]),
                                  (times[:len(ys)], np.array(ys)))
        ys.append(nxt)
    return times, np.array(ys)


def _interpolant(times: np.ndarray, ys: np.ndarray, y_dots: Optional[np.ndarray], interpolation: str):
    if len(times) < 2:
        return lambda t: ys[0]
    if times[-1] < times[0]:
        # interpolants need increasing abscissae
        times, ys = times[::-1], ys[::-1]
        y_dots = None if y_dots is None else y_dots[::-1]
    if interpolation == 'linear':
        return lambda t: np.array([np.interp(t, times, ys[:, i]) for i in range(ys.shape[1])])
    if y_dots is not None:
        return CubicHermiteSpline(times, ys, y_dots, axis=0)
    return CubicSpline(times, ys, axis=0)


def reconstruct_group_curve(s: ReductiveSpace, times, y_samples, y_dots=None,
                            interpolation: str = 'cubic') -> np.ndarray:
    """
    Solve C' = C rho(y(t)), C(0) = I by RK4 on the matrix state.

    y(t) between samples comes from a cubic Hermite interpolant when y_dots is
    given, a cubic spline otherwise, or linear interpolation on request.
    """
    times = np.asarray(times, dtype=float)
    ys = np.asarray(y_samples, dtype=float)
    if ys.ndim != 2 or len(times) != len(ys) or ys.shape[1] != s.q:
        raise InvalidInputError(f"{len(times)} times vs y samples of shape {ys.shape}")
    if interpolation not in ('cubic', 'linear'):
        raise InvalidInputError(f"unknown interpolation {interpolation!r}")
    y_of_t = _interpolant(times, ys, None if y_dots is None else np.asarray(y_dots, dtype=float), interpolation)
    gens_m = s.rep.generators[list(s.m_indices)]

    def rho_m(y):
        return np.einsum('i,ijk->jk', np.asarray(y, dtype=float), gens_m)

    def rhs(t, c):
        return c @ rho_m(y_of_t(t))

    n = s.rep.n_rep
    groups = [np.eye(n)]
    for k in range(len(times) - 1):
        h = times[k + 1] - times[k]
        nxt = rk4_step(rhs, times[k], groups[-1], h)
        if not np.all(np.isfinite(nxt)):
            raise BlowUpError("group curve became non-finite", float(times[k]))
        groups.append(nxt)
    return np.array(groups)


def _points(s: ReductiveSpace, groups: np.ndarray) -> np.ndarray:
    return np.array([s.rep.act(g) for g in groups])


def _five_point_derivative(samples: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite differences along axis 0 (uniform spacing h)"""
    f = samples
    k = len(f)
    if k < 5:
        return np.gradient(f, h, axis=0)
    d = np.empty_like(f)
    d[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return d


def log_derivative_residuals(s: ReductiveSpace, traj: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
    """
    Re-expressed C^-1 C' at each sample: norm of its h-part and distance of
    its m-part from y(t). Both vanish for an exact lift.
    """
    if len(traj.times) < 2:
        return np.zeros(len(traj.times)), np.zeros(len(traj.times))
    h = float(traj.times[1] - traj.times[0])
    c_dot = _five_point_derivative(traj.group_samples, h)
    h_res, m_res = [], []
    for c, dc, y in zip(traj.group_samples, c_dot, traj.y_samples):
        coords = re_express(s.rep, np.linalg.solve(c, dc))
        h_res.append(float(np.linalg.norm(s.restrict_h(coords))))
        m_res.append(float(np.linalg.norm(s.restrict_m(coords) - y)))
    return np.array(h_res), np.array(m_res)


def _diagnose(s: ReductiveSpace, traj: Trajectory, y0: np.ndarray):
    h_res, m_res = log_derivative_residuals(s, traj)
    traj.diagnostics['log_derivative_h_residual'] = float(np.max(h_res)) if len(h_res) else 0.0
    traj.diagnostics['log_derivative_m_residual'] = float(np.max(m_res)) if len(m_res) else 0.0
    if len(traj.times) >= 5:
        h = float(traj.times[1] - traj.times[0])
        c_dot0 = _five_point_derivative(traj.point_samples, h)[0]
        expected = s.rep.act(s.rep.rho(s.embed_m(y0)))
        traj.diagnostics['initial_velocity_residual'] = float(np.max(np.abs(c_dot0 - expected)))
    if traj.diagnostics['log_derivative_h_residual'] > GROUP_CONSISTENCY_TOL:
        logging.warning(f"group curve drift: h-part of C^-1 C' reached "
                        f"{traj.diagnostics['log_derivative_h_residual']:.3e}")


def geodesic(s: ReductiveSpace, f: SprayField, y0, t_span: Sequence[float], step: float) -> Trajectory:
    """Geodesic with c(0) = o and c'(0) = y0 via the integral curve of -eta"""
    y0 = as_m_vector(s, y0, nonzero=True)
    times, ys = integrate_eta_flow(f, y0, t_span, step)
    y_dots = np.array([-eval_eta(f, y) for y in ys])
    groups = reconstruct_group_curve(s, times, ys, y_dots=y_dots)
    traj = Trajectory(times, ys, groups, _points(s, groups), label='geodesic')
    _diagnose(s, traj, y0)
    logging.info(f"geodesic from y0={y0.tolist()} over {len(times)} samples, "
                 f"log-derivative h-residual {traj.diagnostics['log_derivative_h_residual']:.3e}")
    return traj


def geodesic_batch(s: ReductiveSpace, f: SprayField, y0s: Sequence, t_span: Sequence[float],
                   step: float, max_workers: Optional[int] = None) -> List[Trajectory]:
    """geodesic() over several initial vectors, concurrently; output keeps input order"""
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda y0: geodesic(s, f, y0, t_span, step), y0s))


def homogeneous_geodesic(s: ReductiveSpace, y0, v, t_span: Sequence[float], step: float = 1e-2) -> Trajectory:
    """
    Closed form c(t) = exp(t rho(y0 - v)) . o for a witness v in h.

    group_samples hold exp(t(y0 - v)); y_samples hold Ad(exp(-t v)) y0, the
    matching integral curve of -eta.
    """
    y0 = as_m_vector(s, y0, nonzero=True)
    v = np.asarray(v, dtype=float)
    if v.shape != (s.algebra.dim,):
        raise InvalidInputError(f"witness v has shape {v.shape}, expected ({s.algebra.dim},)")
    if s.m_indices and np.any(v[list(s.m_indices)]):
        raise InvalidInputError("witness v must lie in h")
    times = time_grid(t_span, step)
    elapsed = times - times[0]
    u = s.rep.rho(s.embed_m(y0) - v)
    groups = np.array([matrix_exp(t * u) for t in elapsed])
    ys = np.array([s.restrict_m(adjoint_of_group_element(s.algebra, v, -t) @ s.embed_m(y0)) for t in elapsed])
    return Trajectory(times, ys, groups, _points(s, groups), label='homogeneous_geodesic')


def lifted_homogeneous_group_curve(s: ReductiveSpace, y0, v, times) -> np.ndarray:
    """C(t) = exp(t(y0 - v)) exp(t v), the lift whose logarithmic derivative stays in m"""
    u = s.rep.rho(s.embed_m(y0) - np.asarray(v, dtype=float))
    w = s.rep.rho(np.asarray(v, dtype=float))
    return np.array([matrix_exp(t * u) @ matrix_exp(t * w) for t in times])


def verify_claim_a(s: ReductiveSpace, f: SprayField, y0, v, t_span: Sequence[float], step: float,
                   tolerance: float = 1e-6) -> FlowCertificate:
    """max_t ||y_numeric(t) - Ad(exp(-t v)) y0||"""
    y0 = as_m_vector(s, y0, nonzero=True)
    v = np.asarray(v, dtype=float)
    times, ys = integrate_eta_flow(f, y0, t_span, step)
    records = []
    worst = 0.0
    stride = max(1, len(times) // 50)
    for k, (t, y) in enumerate(zip(times, ys)):
        closed = s.restrict_m(adjoint_of_group_element(s.algebra, v, -(t - times[0])) @ s.embed_m(y0))
        res = float(np.linalg.norm(y - closed))
        worst = max(worst, res)
        if k % stride == 0 or k == len(times) - 1:
            records.append({'t': float(t), 'residual': res})
    cert = FlowCertificate('claim_a', worst <= tolerance, worst, tolerance, records)
    cert.notes.append(f"witness v = {v.tolist()}")
    logging.info(f"Claim A check: max residual {worst:.3e} ({'pass' if cert.passed else 'fail'})")
    return cert


def compare_routes(s: ReductiveSpace, f: SprayField, y0, v, t_span: Sequence[float], step: float,
                   tolerance: float = 1e-6) -> FlowCertificate:
    """Integrated geodesic vs exp(t(y0 - v)) . o, plus the lifted group curves"""
    traj = geodesic(s, f, y0, t_span, step)
    closed = homogeneous_geodesic(s, y0, v, t_span, step)
    point_dev = float(np.max(np.abs(traj.point_samples - closed.point_samples)))
    lifted = lifted_homogeneous_group_curve(s, y0, v, traj.times - traj.times[0])
    group_dev = float(np.max(np.abs(traj.group_samples - lifted)))
    y_dev = float(np.max(np.abs(traj.y_samples - closed.y_samples)))
    worst = max(point_dev, group_dev, y_dev)
    cert = FlowCertificate('two_route_geodesic', worst <= tolerance, worst, tolerance, [{
        'point_deviation': point_dev,
        'group_deviation': group_dev,
        'y_deviation': y_dev,
        'log_derivative_h_residual': traj.diagnostics.get('log_derivative_h_residual'),
    }])
    cert.notes.append("group deviation compares C(t) against exp(t(y0 - v)) exp(t v)")
    return cert


def chart_cross_check(s: ReductiveSpace, chart: ChartSpec, y0, v, t_span: Sequence[float], step: float,
                      tolerance: float = 1e-5) -> FlowCertificate:
    """
    Map the (tilted) homogeneous geodesic into the chart and compare it with
    the LocalSpray geodesic started from the same chart state.
    """
    closed = homogeneous_geodesic(s, y0, v, t_span, step)
    tilt = np.zeros(s.algebra.dim) if chart.tilt is None else np.asarray(chart.tilt, dtype=float)
    g0 = matrix_exp(s.rep.rho(tilt))
    u = s.rep.rho(s.embed_m(y0) - np.asarray(v, dtype=float))
    points = np.array([g0 @ p for p in closed.point_samples])
    velocities = np.array([g0 @ (u @ g @ s.rep.base_point).reshape(-1) for g in closed.group_samples])
    x_model = np.array([chart.to_chart(p) for p in points])
    x0 = x_model[0]
    y_chart0 = chart.velocity_to_chart(points[0], velocities[0])
    local = integrate_local(chart.spray, x0, y_chart0, t_span, step)
    x_local = local.x_samples.copy()
    for i in chart.periodic:
        x_model[:, i] = np.unwrap(x_model[:, i])
        x_local[:, i] = np.unwrap(x_local[:, i])
    deviation = np.max(np.abs(x_local - x_model), axis=1)
    worst = float(np.max(deviation))
    stride = max(1, len(deviation) // 50)
    records = [{'t': float(t), 'deviation': float(d)}
               for k, (t, d) in enumerate(zip(local.times, deviation)) if k % stride == 0]
    cert = FlowCertificate('chart_cross_check', worst <= tolerance, worst, tolerance, records)
    cert.notes.append(f"chart map {chart.map_name}, tilt {tilt.tolist()}")
    return cert


def trajectory_json(traj: Trajectory) -> str:
    return json.dumps(traj.to_dict(), indent=2)
