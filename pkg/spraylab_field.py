#!/usr/bin/env python3
"""
Spray vector field eta: m \\ {0} -> m

Evaluation of eta in its three forms (zero, bracket form, component
expressions) and sampled checks of the properties a spray vector field must
have: positive 2-homogeneity, Ad(H)-equivariance, and (for weak symmetry)
evenness. Checks return certificates, never proofs.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from spraylab_errors import EvaluationDomainError, InvalidInputError
from spraylab_exprdsl import Expr, evaluate, parse_all, pretty
from spraylab_lie_core import bracket
from spraylab_reductive import ReductiveSpace, as_m_vector, isotropy_matrix

DEFAULT_SEED = 42

SAMPLED_EVIDENCE_NOTE = "sampled evidence, not proof: properties were tested at finitely many seeded samples"
NONSMOOTH_NOTE = "smoothness of eta is not checked (abs/norm may be nonsmooth on measure-zero sets)"


class EtaKind(Enum):
    """How eta is specified"""
    ZERO = "zero"
    BRACKET_FORM = "bracket_form"
    COMPONENTS = "components"


class CheckStatus(Enum):
    """Outcome of a sampled property check"""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class SprayField:
    """
    eta on a reductive space.

    bracket_form: eta(y) = [sum_i b_i(y) e_i, y] with one coefficient per h-basis
    vector; components: one expression per m-coordinate.
    """
    space: ReductiveSpace
    kind: EtaKind = EtaKind.ZERO
    expressions: Tuple[Expr, ...] = ()

    def __post_init__(self):
        expected = {EtaKind.ZERO: 0,
                    EtaKind.BRACKET_FORM: self.space.h_dim,
                    EtaKind.COMPONENTS: self.space.q}[self.kind]
        if len(self.expressions) != expected:
            raise InvalidInputError(
                f"eta kind {self.kind.value} needs {expected} expressions, got {len(self.expressions)}")
        object.__setattr__(self, 'expressions', tuple(self.expressions))

    @classmethod
    def from_strings(cls, space: ReductiveSpace, kind: str, sources: Sequence[str] = ()) -> 'SprayField':
        try:
            eta_kind = EtaKind(kind)
        except ValueError:
            raise InvalidInputError(f"unknown eta kind {kind!r} (zero | bracket_form | components)")
        exprs, errors = parse_all(list(sources), space.q)
        if errors:
            raise InvalidInputError("; ".join(errors))
        return cls(space, eta_kind, tuple(exprs))

    @property
    def sources(self) -> List[str]:
        return [pretty(e) for e in self.expressions]

    @property
    def is_bracket_form(self) -> bool:
        return self.kind == EtaKind.BRACKET_FORM


def eval_eta(f: SprayField, y) -> np.ndarray:
    """eta(y) in m-coordinates"""
    s = f.space
    y = as_m_vector(s, y, nonzero=True)
    if f.kind == EtaKind.ZERO:
        return np.zeros(s.q)
    values = [evaluate(e, y) for e in f.expressions]
    if f.kind == EtaKind.COMPONENTS:
        return np.array(values, dtype=float)
    v = s.embed_h(np.array(values, dtype=float))
    return s.restrict_m(bracket(s.algebra, v, s.embed_m(y)))


def sample_unit_sphere(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """count x dim array of uniformly distributed unit vectors"""
    raw = rng.standard_normal((count, dim))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    # standard normals never vanish in practice; guard anyway
    norms[norms == 0.0] = 1.0
    return raw / norms


def sample_group_coords(rng: np.random.Generator, h_dim: int, count: int) -> np.ndarray:
    """Exponential coordinates in the box [-pi, pi]^|h|"""
    return rng.uniform(-np.pi, np.pi, size=(count, h_dim))


@dataclass
class PropertyCertificate:
    """Sampled check of one property of eta"""
    name: str
    status: CheckStatus
    seed: int
    samples: int
    max_residual: float
    tolerance: float
    records: List[Dict] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=lambda: [SAMPLED_EVIDENCE_NOTE, NONSMOOTH_NOTE])

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    def to_dict(self) -> Dict:
        return {
            'check': self.name,
            'verdict': self.status.value,
            'seed': self.seed,
            'tolerance': self.tolerance,
            'samples': self.records,
            'sample_count': self.samples,
            'max_residual': self.max_residual,
            'failures': list(self.failures),
            'notes': list(self.notes),
        }


def finish_certificate(name: str, seed: int, samples: int, tolerance: float,
                       residuals: List[float], records: List[Dict], failures: List[str]) -> PropertyCertificate:
    """Status from the residuals: any failed or non-finite sample makes it inconclusive"""
    finite = [r for r in residuals if np.isfinite(r)]
    if len(finite) < len(residuals):
        failures = failures + [f"{len(residuals) - len(finite)} sample(s) gave a non-finite residual"]
    max_residual = max(finite) if finite else 0.0
    if failures:
        status = CheckStatus.INCONCLUSIVE
    elif max_residual <= tolerance:
        status = CheckStatus.PASS
    else:
        status = CheckStatus.FAIL
    cert = PropertyCertificate(name, status, seed, samples, float(max_residual), tolerance,
                               records, failures)
    logging.info(f"{name}: {status.value} (max residual {max_residual:.3e}, {samples} samples, seed {seed})")
    return cert


def check_homogeneity(f: SprayField, samples: int = 200, lambdas: Sequence[float] = (0.5, 2.0, 3.0),
                      seed: int = DEFAULT_SEED, tolerance: float = 1e-9) -> PropertyCertificate:
    """max over unit y and lambda of ||eta(lambda y) - lambda^2 eta(y)|| / lambda^2"""
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    if any(lam <= 0 for lam in lambdas):
        raise InvalidInputError("lambdas must be positive")
    rng = np.random.default_rng(seed)
    residuals, records, failures = [], [], []
    for y in sample_unit_sphere(rng, f.space.q, samples):
        try:
            base = eval_eta(f, y)
            # np.max keeps a NaN that max() would drop
            worst = float(np.max([np.linalg.norm(eval_eta(f, lam * y) - lam * lam * base) / (lam * lam)
                                  for lam in lambdas]))
        except EvaluationDomainError as e:
            logging.warning(f"homogeneity sample failed: {e}")
            failures.append(f"y={y.tolist()}: {e}")
            continue
        residuals.append(worst)
        records.append({'y': y.tolist(), 'residual': worst})
    return finish_certificate('homogeneity', seed, samples, tolerance, residuals, records, failures)


def check_equivariance(f: SprayField, samples: int = 200, group_samples: int = 8,
                       seed: int = DEFAULT_SEED, tolerance: float = 1e-8) -> PropertyCertificate:
    """max ||eta(Ad(g) y) - Ad(g) eta(y)|| over sampled y and g = exp(sum t_i e_i), e_i in h"""
    if samples < 1 or group_samples < 1:
        raise InvalidInputError("samples and group_samples must be >= 1")
    s = f.space
    rng = np.random.default_rng(seed)
    if s.h_dim == 0:
        cert = finish_certificate('equivariance', seed, samples, tolerance, [0.0], [], [])
        cert.notes.append("h is empty: equivariance holds vacuously")
        return cert
    ys = sample_unit_sphere(rng, s.q, samples)
    ts = sample_group_coords(rng, s.h_dim, group_samples)
    ads = [isotropy_matrix(s, t) for t in ts]
    residuals, records, failures = [], [], []
    for y in ys:
        try:
            eta_y = eval_eta(f, y)
            worst = float(np.max([np.linalg.norm(eval_eta(f, ad @ y) - ad @ eta_y) for ad in ads]))
        except EvaluationDomainError as e:
            logging.warning(f"equivariance sample failed: {e}")
            failures.append(f"y={y.tolist()}: {e}")
            continue
        residuals.append(worst)
        records.append({'y': y.tolist(), 'residual': worst})
    cert = finish_certificate('equivariance', seed, samples, tolerance, residuals, records, failures)
    cert.notes.append("group samples cover exp of the box [-pi, pi]^|h| (identity component of H only)")
    return cert


def check_evenness(f: SprayField, samples: int = 200, seed: int = DEFAULT_SEED,
                   tolerance: float = 1e-10) -> PropertyCertificate:
    """max ||eta(y) - eta(-y)|| over sampled unit y"""
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    residuals, records, failures = [], [], []
    for y in sample_unit_sphere(rng, f.space.q, samples):
        try:
            res = float(np.linalg.norm(eval_eta(f, y) - eval_eta(f, -y)))
        except EvaluationDomainError as e:
            logging.warning(f"evenness sample failed: {e}")
            failures.append(f"y={y.tolist()}: {e}")
            continue
        residuals.append(res)
        records.append({'y': y.tolist(), 'residual': res})
    return finish_certificate('evenness', seed, samples, tolerance, residuals, records, failures)


def check_all(f: SprayField, samples: int = 200, group_samples: int = 8,
              lambdas: Sequence[float] = (0.5, 2.0, 3.0), seed: int = DEFAULT_SEED,
              tolerances: Optional[Dict[str, float]] = None) -> Dict[str, PropertyCertificate]:
    tol = {'homogeneity': 1e-9, 'equivariance': 1e-8, 'evenness': 1e-10}
    tol.update(tolerances or {})
    return {
        'homogeneity': check_homogeneity(f, samples, lambdas, seed, tol['homogeneity']),
        'equivariance': check_equivariance(f, samples, group_samples, seed, tol['equivariance']),
        'evenness': check_evenness(f, samples, seed, tol['evenness']),
    }
