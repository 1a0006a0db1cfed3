#!/usr/bin/env python3
"""
Geodesic-orbit and weak-symmetry classification

g.o.:  eta(y) in [h, y] for every y != 0; a witness v in h with eta(y) = [v, y]
       gives the homogeneous geodesic exp(t(y - v)) . o.
w.s.:  for every y != 0 some g in H has Ad(g) y = -y; eta is then even.
Every weakly symmetric example must also be g.o.; verify_theorem3 checks this
along integral curves of -eta.

All verdicts are sampled evidence with two thresholds: pass <= 1e-8,
fail >= 1e-3, anything between is inconclusive.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares as scipy_least_squares

from spraylab_errors import EvaluationDomainError, InvalidInputError, PreconditionError
from spraylab_field import (
    DEFAULT_SEED,
    NONSMOOTH_NOTE,
    SAMPLED_EVIDENCE_NOTE,
    CheckStatus,
    PropertyCertificate,
    SprayField,
    check_evenness,
    eval_eta,
    sample_group_coords,
    sample_unit_sphere,
)
from spraylab_flow import geodesic, integrate_eta_flow
from spraylab_reductive import (
    ReductiveSpace,
    as_m_vector,
    has_invariant_norm,
    isotropy_group_element,
    isotropy_matrix,
    least_squares,
    orbit_tangent_matrix,
    tangency_residual,
)

GO_PASS = 1e-8
GO_FAIL = 1e-3
WS_PASS = 1e-8

IDENTITY_COMPONENT_NOTE = ("H is searched through exponential coordinates of its identity component only; "
                           "elements of other components are never tried")
WS_DISCREPANCY_NOTE = ("the algebraic condition (some g in H with Ad(g)y = -y) is stated as equivalent to weak "
                       "symmetry, but reversing geodesics also needs eta to be even for a non-reversible spray; "
                       "both are reported and ws_algebraic_evidence requires both")
POINTWISE_NOTE = ("only the initial-velocity condition Ad(g)y = -y is checked; one g per geodesic for all t "
                  "follows from uniqueness of geodesics")
ORBIT_NOTE = "tangency to Ad(H)-orbits is tested infinitesimally; the global orbit statement is not certified"


class GoVerdict(Enum):
    """Geodesic-orbit verdicts"""
    GO_EVIDENCE = "go_evidence"
    NOT_GO = "not_go"
    INCONCLUSIVE = "inconclusive"


class WsVerdict(Enum):
    """Weak-symmetry verdicts"""
    WS_ALGEBRAIC_EVIDENCE = "ws_algebraic_evidence"
    NOT_WS = "not_ws"
    INCONCLUSIVE = "inconclusive"


@dataclass
class GoSample:
    y: np.ndarray
    residual: Optional[float]
    witness: Optional[np.ndarray] = None
    error: Optional[str] = None

    def to_dict(self) -> Dict:
        return {
            'y': self.y.tolist(),
            'residual': self.residual,
            'witness': None if self.witness is None else self.witness.tolist(),
            'error': self.error,
        }


@dataclass
class GoCertificate:
    verdict: GoVerdict
    seed: int
    pass_threshold: float
    fail_threshold: float
    samples: List[GoSample] = field(default_factory=list)
    scale: float = 1.0
    notes: List[str] = field(default_factory=lambda: [SAMPLED_EVIDENCE_NOTE, NONSMOOTH_NOTE, ORBIT_NOTE])

    @property
    def max_residual(self) -> float:
        values = [s.residual for s in self.samples if s.residual is not None]
        return max(values) if values else 0.0

    def to_dict(self) -> Dict:
        return {
            'check': 'geodesic_orbit',
            'verdict': self.verdict.value,
            'seed': self.seed,
            'tolerance': self.pass_threshold,
            'fail_threshold': self.fail_threshold,
            'scale': self.scale,
            'samples': [s.to_dict() for s in self.samples],
            'max_residual': self.max_residual,
            'notes': list(self.notes),
        }


@dataclass
class WsSample:
    y: np.ndarray
    g_coords: np.ndarray
    value: float

    def to_dict(self) -> Dict:
        return {'y': self.y.tolist(), 'g_coords': self.g_coords.tolist(), 'value': self.value}


@dataclass
class WsCertificate:
    verdict: WsVerdict
    seed: int
    tolerance: float
    evenness: PropertyCertificate
    samples: List[WsSample] = field(default_factory=list)
    restarts: int = 16
    scale: float = 1.0
    notes: List[str] = field(default_factory=lambda: [SAMPLED_EVIDENCE_NOTE, IDENTITY_COMPONENT_NOTE,
                                                      WS_DISCREPANCY_NOTE, POINTWISE_NOTE])

    @property
    def max_residual(self) -> float:
        return max((s.value for s in self.samples), default=0.0)

    @property
    def algebraic_condition_holds(self) -> bool:
        return bool(self.samples) and all(s.value <= self.tolerance for s in self.samples)

    @property
    def algebraic_condition_fails_everywhere(self) -> bool:
        return bool(self.samples) and all(s.value > self.tolerance for s in self.samples)

    def to_dict(self) -> Dict:
        return {
            'check': 'weak_symmetry',
            'verdict': self.verdict.value,
            'seed': self.seed,
            'tolerance': self.tolerance,
            'restarts': self.restarts,
            'scale': self.scale,
            'samples': [s.to_dict() for s in self.samples],
            'max_residual': self.max_residual,
            'algebraic_condition_holds': self.algebraic_condition_holds,
            'evenness': self.evenness.to_dict(),
            'notes': list(self.notes),
        }


@dataclass
class Theorem3Certificate:
    passed: bool
    tolerance: float
    tangency_residual: float
    invariant_deviation: Optional[float]
    reflection_residual: Optional[float]
    records: List[Dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=lambda: [SAMPLED_EVIDENCE_NOTE, ORBIT_NOTE])

    def to_dict(self) -> Dict:
        return {
            'check': 'weakly_symmetric_implies_go',
            'verdict': 'pass' if self.passed else 'fail',
            'tolerance': self.tolerance,
            'samples': self.records,
            'max_residual': self.tangency_residual,
            'invariant_deviation': self.invariant_deviation,
            'reflection_residual': self.reflection_residual,
            'notes': list(self.notes),
        }


@dataclass
class ReversalCertificate:
    status: CheckStatus
    tolerance: float
    max_residual: float
    g_coords: List[float]
    witness_value: float
    records: List[Dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=lambda: [IDENTITY_COMPONENT_NOTE])

    def to_dict(self) -> Dict:
        return {
            'check': 'geodesic_reversal',
            'verdict': self.status.value,
            'tolerance': self.tolerance,
            'g_coords': self.g_coords,
            'witness_value': self.witness_value,
            'samples': self.records,
            'max_residual': self.max_residual,
            'notes': list(self.notes),
        }


def go_witness(s: ReductiveSpace, f: SprayField, y) -> Tuple[np.ndarray, float]:
    """Least-norm v in h minimizing ||eta(y) - [v, y]||, and that residual"""
    y = as_m_vector(s, y, nonzero=True)
    target = eval_eta(f, y)
    coeffs, residual, _ = least_squares(orbit_tangent_matrix(s, y), target)
    return s.embed_h(coeffs), residual


def check_go(s: ReductiveSpace, f: SprayField, samples: int = 200, seed: int = DEFAULT_SEED,
             pass_threshold: float = GO_PASS, fail_threshold: float = GO_FAIL,
             scale: float = 1.0) -> GoCertificate:
    """go_witness at seeded sphere samples (of radius scale)"""
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    if scale <= 0:
        raise InvalidInputError("scale must be positive")
    rng = np.random.default_rng(seed)
    records = []
    for y in scale * sample_unit_sphere(rng, s.q, samples):
        try:
            v, res = go_witness(s, f, y)
        except EvaluationDomainError as e:
            logging.warning(f"g.o. sample failed at y={y.tolist()}: {e}")
            records.append(GoSample(y, None, None, str(e)))
            continue
        records.append(GoSample(y, res, v if res <= pass_threshold else None))

    residuals = [r.residual for r in records if r.residual is not None]
    errors = [r for r in records if r.error]
    if residuals and max(residuals) >= fail_threshold:
        verdict = GoVerdict.NOT_GO
    elif not errors and max(residuals) <= pass_threshold:
        verdict = GoVerdict.GO_EVIDENCE
    else:
        verdict = GoVerdict.INCONCLUSIVE
    cert = GoCertificate(verdict, seed, pass_threshold, fail_threshold, records, scale)
    if errors:
        cert.notes.append(f"{len(errors)} sample(s) failed to evaluate")
    logging.info(f"check_go: {verdict.value} (max residual {cert.max_residual:.3e}, {samples} samples)")
    return cert


def orbit_search(s: ReductiveSpace, y, z, restarts: int = 16, iters: int = 200,
                 seed: int = DEFAULT_SEED, stop_below: float = 1e-12) -> Tuple[np.ndarray, float]:
    """
    Multi-start search for t with Ad(exp(sum t_i e_i)) y = z.

    Each start runs a trust-region least-squares solve on a finite-difference
    Jacobian from a seeded point of [-pi, pi]^|h|. Returns the best t and
    ||Ad(g) y - z||.
    """
    y = as_m_vector(s, y)
    z = as_m_vector(s, z)
    if s.h_dim == 0:
        return np.zeros(0), float(np.linalg.norm(y - z))

    def residual(t):
        return isotropy_matrix(s, t) @ y - z

    rng = np.random.default_rng(seed)
    best_t = np.zeros(s.h_dim)
    best_val = float(np.linalg.norm(residual(best_t)))
    for start in sample_group_coords(rng, s.h_dim, max(1, restarts)):
        if best_val <= stop_below:
            break
        result = scipy_least_squares(residual, start, jac='2-point', method='trf',
                                     ftol=1e-15, xtol=1e-15, gtol=1e-15, max_nfev=iters)
        val = float(np.linalg.norm(residual(result.x)))
        if val < best_val:
            best_t, best_val = result.x, val
    return np.asarray(best_t, dtype=float), best_val


def ws_search(s: ReductiveSpace, y, restarts: int = 16, iters: int = 200,
              seed: int = DEFAULT_SEED) -> Tuple[np.ndarray, float]:
    """Best t with Ad(exp(sum t_i e_i)) y close to -y, and ||Ad(g) y + y||"""
    y = as_m_vector(s, y, nonzero=True)
    return orbit_search(s, y, -y, restarts, iters, seed)


def check_ws(s: ReductiveSpace, f: SprayField, samples: int = 200, restarts: int = 16,
             seed: int = DEFAULT_SEED, tolerance: float = WS_PASS, evenness_tolerance: float = 1e-10,
             iters: int = 200, scale: float = 1.0) -> WsCertificate:
    """ws_search at every sample plus the evenness necessary condition"""
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    records = []
    for k, y in enumerate(scale * sample_unit_sphere(rng, s.q, samples)):
        t, value = ws_search(s, y, restarts, iters, seed + k)
        records.append(WsSample(y, t, value))
    evenness = check_evenness(f, samples, seed, evenness_tolerance)

    cert = WsCertificate(WsVerdict.INCONCLUSIVE, seed, tolerance, evenness, records, restarts, scale)
    if evenness.status == CheckStatus.FAIL:
        cert.verdict = WsVerdict.NOT_WS
        cert.notes.append(f"eta is not even (residual {evenness.max_residual:.3e}): weak symmetry is impossible")
    elif evenness.status == CheckStatus.PASS and cert.algebraic_condition_holds:
        cert.verdict = WsVerdict.WS_ALGEBRAIC_EVIDENCE
    elif cert.algebraic_condition_fails_everywhere:
        cert.notes.append("algebraic condition fails at all samples "
                          f"(min ||Ad(g)y + y|| = {min(r.value for r in records):.3e})")
    elif not cert.algebraic_condition_holds:
        failed = sum(1 for r in records if r.value > tolerance)
        cert.notes.append(f"algebraic condition not reached at {failed} of {samples} samples")
    logging.info(f"check_ws: {cert.verdict.value} (max ||Ad(g)y + y|| {cert.max_residual:.3e}, "
                 f"evenness {evenness.status.value})")
    return cert


def verify_theorem3(s: ReductiveSpace, f: SprayField, y0, t_span: Sequence[float], step: float,
                    ws_certificate: Optional[WsCertificate] = None, tolerance: float = 1e-6,
                    samples: int = 50, restarts: int = 16, seed: int = DEFAULT_SEED,
                    reflection_points: int = 4) -> Theorem3Certificate:
    """
    Along the integral curve y(t) of -eta from y0 report
      (a) max tangency residual of eta(y(t)) to [h, y(t)],
      (b) drift of ||y(t)|| when the m-norm is Ad(H)-invariant,
      (c) max ||Ad(g2) y(t1) + y0|| with Ad(g2) y(t1/2) = -y(t1/2),
    and pass iff (a) and (c) are within tolerance.
    """
    if ws_certificate is None:
        ws_certificate = check_ws(s, f, samples, restarts, seed)
    if ws_certificate.verdict != WsVerdict.WS_ALGEBRAIC_EVIDENCE:
        reason = ws_certificate.verdict.value
        if ws_certificate.verdict == WsVerdict.NOT_WS:
            reason += f" (eta not even, residual {ws_certificate.evenness.max_residual:.3e})"
        raise PreconditionError(f"verify_theorem3 needs ws_algebraic_evidence, check_ws gave {reason}")

    y0 = as_m_vector(s, y0, nonzero=True)
    times, ys = integrate_eta_flow(f, y0, t_span, step)
    records = []
    tangency = 0.0
    stride = max(1, len(times) // 200)
    for k in range(0, len(times), stride):
        res = tangency_residual(s, ys[k], eval_eta(f, ys[k]))
        tangency = max(tangency, res)
        records.append({'t': float(times[k]), 'tangency_residual': res})

    invariant = None
    if has_invariant_norm(s):
        norms = np.linalg.norm(ys, axis=1)
        invariant = float(np.max(np.abs(norms - norms[0])))

    reflection = None
    if s.h_dim > 0 and len(times) >= 3:
        reflection = 0.0
        half_count = (len(times) - 1) // 2
        for j in np.unique(np.linspace(1, half_count, reflection_points).astype(int)):
            t_val, g_val = ws_search(s, ys[j], restarts, seed=seed + int(j))
            res = float(np.linalg.norm(isotropy_matrix(s, t_val) @ ys[2 * j] + y0))
            reflection = max(reflection, res)
            records.append({'t1': float(times[2 * j]), 'witness_value': g_val, 'reflection_residual': res})

    passed = tangency <= tolerance and (reflection is None or reflection <= tolerance)
    cert = Theorem3Certificate(passed, tolerance, tangency, invariant, reflection, records)
    if invariant is None:
        cert.notes.append("m-inner product is not Ad(H)-invariant: no invariant monitored")
    logging.info(f"verify_theorem3: {'pass' if passed else 'fail'} (tangency {tangency:.3e}, "
                 f"reflection {reflection if reflection is not None else 'n/a'})")
    return cert


def check_reversal(s: ReductiveSpace, f: SprayField, y0, t_span: Sequence[float], step: float,
                   restarts: int = 16, seed: int = DEFAULT_SEED, tolerance: float = 1e-6,
                   witness_tolerance: float = WS_PASS) -> ReversalCertificate:
    """With Ad(g) y0 = -y0, compare g . c(t) against c(-t) over the span"""
    y0 = as_m_vector(s, y0, nonzero=True)
    t_coords, value = ws_search(s, y0, restarts, seed=seed)
    if value > witness_tolerance:
        cert = ReversalCertificate(CheckStatus.INCONCLUSIVE, tolerance, float('nan'), t_coords.tolist(), value)
        cert.notes.append("no g with Ad(g) y0 = -y0 was found; nothing to compare")
        return cert
    t0, t1 = float(t_span[0]), float(t_span[1])
    forward = geodesic(s, f, y0, (t0, t1), step)
    # reflected about t0: backward.times[k] = 2 t0 - forward.times[k]
    backward = geodesic(s, f, y0, (t0, 2 * t0 - t1), step)
    g = isotropy_group_element(s, t_coords)
    records = []
    worst = 0.0
    stride = max(1, len(forward.times) // 50)
    for k, (c_fwd, c_bwd) in enumerate(zip(forward.group_samples, backward.point_samples)):
        res = float(np.max(np.abs(s.rep.act(g @ c_fwd) - c_bwd)))
        worst = max(worst, res)
        if k % stride == 0:
            records.append({'t': float(forward.times[k]), 'residual': res})
    status = CheckStatus.PASS if worst <= tolerance else CheckStatus.FAIL
    return ReversalCertificate(status, tolerance, worst, t_coords.tolist(), value, records)


def format_report(cert) -> str:
    """Text report for any certificate with to_dict()"""
    data = cert.to_dict()
    report = f"""
{'=' * 70}
SPRAYLAB CERTIFICATE - {data.get('check', 'check').upper()}
{'=' * 70}

Verdict:              {data['verdict']}
"""
    if 'seed' in data:
        report += f"Seed:                 {data['seed']}\n"
    report += f"Tolerance:            {data.get('tolerance')}\n"
    report += f"Max residual:         {data.get('max_residual')}\n"
    for key in ('fail_threshold', 'restarts', 'invariant_deviation', 'reflection_residual', 'witness_value'):
        if data.get(key) is not None:
            report += f"{key.replace('_', ' ').capitalize() + ':':22s}{data[key]}\n"
    if 'evenness' in data:
        report += f"Evenness:             {data['evenness']['verdict']} " \
                  f"(max residual {data['evenness']['max_residual']})\n"
    report += f"Samples:              {len(data.get('samples', []))}\n"
    report += f"\n[*] NOTES\n{'-' * 70}\n"
    for note in data.get('notes', []):
        report += f"  - {note}\n"
    report += f"{'=' * 70}\n"
    return report
