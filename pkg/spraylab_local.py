#!/usr/bin/env python3
"""
Coordinate-chart spray structures

A LocalSpray holds coefficients G^i(x, y) in one chart; geodesics solve
    x' = y,   y' = -2 G(x, y)
with fixed-step classic RK4. Also hosts the shared RK4 stepper and the
model -> chart maps used to cross-check homogeneous examples in coordinates.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from spraylab_errors import (
    BlowUpError,
    DomainExitError,
    EvaluationDomainError,
    InvalidInputError,
    NumericalFailure,
)
from spraylab_exprdsl import Expr, evaluate, parse_all, pretty
from spraylab_field import (
    DEFAULT_SEED,
    PropertyCertificate,
    finish_certificate,
    sample_unit_sphere,
)

SLIT_THRESHOLD = 1e-8
BLOWUP_NORM = 1e12


def rk4_step(rhs: Callable[[float, np.ndarray], np.ndarray], t: float, state: np.ndarray, h: float) -> np.ndarray:
    """One classic Runge-Kutta step"""
    k1 = rhs(t, state)
    k2 = rhs(t + 0.5 * h, state + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, state + 0.5 * h * k2)
    k4 = rhs(t + h, state + h * k3)
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def time_grid(t_span: Sequence[float], step: float) -> np.ndarray:
    """Uniform grid from t0 to t1 whose spacing is at most |step| (t1 < t0 runs backwards)"""
    if step <= 0 or not math.isfinite(step):
        raise InvalidInputError(f"step must be positive, got {step}")
    t0, t1 = float(t_span[0]), float(t_span[1])
    length = abs(t1 - t0)
    if length == 0.0:
        return np.array([t0])
    n = max(1, math.ceil(length / step - 1e-9))
    return np.linspace(t0, t1, n + 1)


@dataclass(frozen=True, eq=False)
class LocalSpray:
    """Spray coefficients G^1..G^d as chart-dialect expressions in x1..xd, y1..yd"""
    dim: int
    coefficients: Tuple[Expr, ...]

    def __post_init__(self):
        if self.dim < 1 or len(self.coefficients) != self.dim:
            raise InvalidInputError(f"chart of dimension {self.dim} needs {self.dim} coefficients, "
                                    f"got {len(self.coefficients)}")
        object.__setattr__(self, 'coefficients', tuple(self.coefficients))

    @classmethod
    def from_strings(cls, dim: int, sources: Sequence[str]) -> 'LocalSpray':
        exprs, errors = parse_all(list(sources), dim, chart_dim=dim)
        if errors:
            raise InvalidInputError("; ".join(errors))
        return cls(dim, tuple(exprs))

    @property
    def sources(self) -> List[str]:
        return [pretty(e) for e in self.coefficients]

    def coefficients_at(self, x, y) -> np.ndarray:
        return np.array([evaluate(e, y, x) for e in self.coefficients], dtype=float)


@dataclass
class ChartTrajectory:
    """Time samples of a chart geodesic (x(t), y(t) = x'(t))"""
    times: np.ndarray
    x_samples: np.ndarray
    y_samples: np.ndarray

    def to_rows(self) -> List[List[float]]:
        return [[float(t)] + list(map(float, x)) + list(map(float, y))
                for t, x, y in zip(self.times, self.x_samples, self.y_samples)]

    def header(self) -> List[str]:
        d = self.x_samples.shape[1]
        return ['t'] + [f'x_{i + 1}' for i in range(d)] + [f'y_{i + 1}' for i in range(d)]


def geodesic_ode_rhs(s: LocalSpray, x, y) -> Tuple[np.ndarray, np.ndarray]:
    """(x', y') = (y, -2 G(x, y))"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (s.dim,) or y.shape != (s.dim,):
        raise InvalidInputError(f"chart point and velocity must have length {s.dim}")
    if not np.any(y):
        raise InvalidInputError("velocity must be nonzero (spray lives on the slit tangent bundle)")
    return y.copy(), -2.0 * s.coefficients_at(x, y)


def integrate_local(s: LocalSpray, x0, y0, t_span: Sequence[float], step: float) -> ChartTrajectory:
    """RK4 on (x, y); stops on slit-bundle exit or non-finite state"""
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    geodesic_ode_rhs(s, x0, y0)
    times = time_grid(t_span, step)
    d = s.dim

    def rhs(_t, state):
        dx, dy = geodesic_ode_rhs(s, state[:d], state[d:])
        return np.concatenate([dx, dy])

    states = [np.concatenate([x0, y0])]
    for k in range(len(times) - 1):
        h = times[k + 1] - times[k]
        try:
            nxt = rk4_step(rhs, times[k], states[-1], h)
        except InvalidInputError as e:
            # an RK4 stage reached y = 0
            raise DomainExitError(f"velocity left the slit tangent bundle: {e}", float(times[k]),
                                  _chart_partial(times, states)) from e
        except EvaluationDomainError as e:
            raise NumericalFailure(f"chart spray evaluation failed: {e}", float(times[k]),
                                   _chart_partial(times, states)) from e
        if not np.all(np.isfinite(nxt)) or np.linalg.norm(nxt[d:]) > BLOWUP_NORM:
            raise BlowUpError("chart state blew up", float(times[k]), _chart_partial(times, states))
        if np.linalg.norm(nxt[d:]) < SLIT_THRESHOLD:
            raise DomainExitError("velocity left the slit tangent bundle", float(times[k + 1]),
                                  _chart_partial(times, states))
        states.append(nxt)
    arr = np.array(states)
    logging.debug(f"chart geodesic integrated over {len(times)} samples")
    return ChartTrajectory(times, arr[:, :d], arr[:, d:])


def _chart_partial(times, states) -> ChartTrajectory:
    arr = np.array(states)
    d = arr.shape[1] // 2
    return ChartTrajectory(times[:len(states)], arr[:, :d], arr[:, d:])


def check_local_homogeneity(s: LocalSpray, x_points: Sequence[Sequence[float]], samples: int = 50,
                            lambdas: Sequence[float] = (0.5, 2.0, 3.0), seed: int = DEFAULT_SEED,
                            tolerance: float = 1e-9) -> PropertyCertificate:
    """Positive 2-homogeneity of every G^i in y at the given chart points"""
    rng = np.random.default_rng(seed)
    residuals, records, failures = [], [], []
    for x in x_points:
        x = np.asarray(x, dtype=float)
        for y in sample_unit_sphere(rng, s.dim, samples):
            try:
                base = s.coefficients_at(x, y)
                worst = float(np.max([np.linalg.norm(s.coefficients_at(x, lam * y) - lam * lam * base) / (lam * lam)
                                      for lam in lambdas]))
            except EvaluationDomainError as e:
                failures.append(f"x={x.tolist()}, y={y.tolist()}: {e}")
                continue
            residuals.append(worst)
            records.append({'x': x.tolist(), 'y': y.tolist(), 'residual': worst})
    return finish_certificate('chart_homogeneity', seed, samples * len(x_points), tolerance,
                              residuals, records, failures)


# model -> chart maps

def sphere_polar(p: np.ndarray) -> np.ndarray:
    """Unit vector in R^3 -> (theta, phi), theta measured from the +z axis"""
    x, y, z = (float(v) for v in p)
    return np.array([math.acos(max(-1.0, min(1.0, z))), math.atan2(y, x)])


def sphere_polar_velocity(p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Chart velocity of a curve through unit vector p with ambient velocity v"""
    x, y, z = (float(c) for c in p)
    vx, vy, vz = (float(c) for c in v)
    rho2 = x * x + y * y
    if rho2 == 0.0:
        raise InvalidInputError("sphere_polar chart is singular at the poles")
    return np.array([-vz / math.sqrt(rho2), (x * vy - y * vx) / rho2])


# name -> (point map, velocity map, indices of angular coordinates)
CHART_MAPS: Dict[str, Tuple[Callable, Callable, Tuple[int, ...]]] = {
    'sphere_polar': (sphere_polar, sphere_polar_velocity, (1,)),
}

ROUND_SPHERE_COEFFICIENTS = (
    "-0.5*sin(x1)*cos(x1)*y2^2",
    "cot(x1)*y1*y2",
)


def round_sphere_spray() -> LocalSpray:
    """Geodesic spray of the unit round sphere in (theta, phi)"""
    return LocalSpray.from_strings(2, ROUND_SPHERE_COEFFICIENTS)


@dataclass
class ChartSpec:
    """Chart section of a config: spray, model -> chart map and tilt"""
    spray: LocalSpray
    map_name: str = 'sphere_polar'
    tilt: Optional[np.ndarray] = None

    @property
    def to_chart(self) -> Callable:
        return CHART_MAPS[self.map_name][0]

    @property
    def velocity_to_chart(self) -> Callable:
        return CHART_MAPS[self.map_name][1]

    @property
    def periodic(self) -> Tuple[int, ...]:
        return CHART_MAPS[self.map_name][2]


def main():
    """Integrate the equator of the round sphere and print the drift in theta"""
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
    spray = round_sphere_spray()
    traj = integrate_local(spray, [math.pi / 2, 0.0], [0.0, 1.0], (0.0, math.pi), 1e-3)
    drift = float(np.max(np.abs(traj.x_samples[:, 0] - math.pi / 2)))
    print(f"equator geodesic: max |theta - pi/2| = {drift:.3e}, phi(pi) = {traj.x_samples[-1, 1]:.12f}")


if __name__ == "__main__":
    main()
