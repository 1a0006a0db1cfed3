#!/usr/bin/env python3
"""
Reductive decomposition g = h + m

Basis-aligned split of a Lie algebra into the isotropy subalgebra h and its
Ad(H)-invariant complement m, with invariance certificates, projections and
the tangent spaces [h, y] of Ad(H)-orbits in m.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.linalg import lstsq, qr

from spraylab_errors import InvalidInputError
from spraylab_lie_core import (
    STABILIZER_TOL,
    LieAlgebra,
    MatrixRep,
    ad_matrix,
    bracket,
    matrix_exp,
)

DECOMPOSITION_TOL = 1e-12
RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ReductiveSpace:
    """Lie algebra + representation + index split (0-based internally)"""
    algebra: LieAlgebra
    rep: MatrixRep
    h_indices: Tuple[int, ...]
    m_indices: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'h_indices', tuple(int(i) for i in self.h_indices))
        object.__setattr__(self, 'm_indices', tuple(int(i) for i in self.m_indices))
        problems = index_set_problems(self.algebra.dim, self.h_indices, self.m_indices)
        if problems:
            raise InvalidInputError("; ".join(problems))

    @property
    def q(self) -> int:
        return len(self.m_indices)

    @property
    def h_dim(self) -> int:
        return len(self.h_indices)

    def embed_m(self, y) -> np.ndarray:
        """m-coordinates -> full algebra vector"""
        y = as_m_vector(self, y)
        x = np.zeros(self.algebra.dim)
        x[list(self.m_indices)] = y
        return x

    def embed_h(self, t) -> np.ndarray:
        """h-coordinates -> full algebra vector"""
        t = np.asarray(t, dtype=float)
        if t.shape != (self.h_dim,):
            raise InvalidInputError(f"h-vector has shape {t.shape}, expected ({self.h_dim},)")
        x = np.zeros(self.algebra.dim)
        x[list(self.h_indices)] = t
        return x

    def restrict_m(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float)[list(self.m_indices)]

    def restrict_h(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float)[list(self.h_indices)]


@dataclass
class DecompositionCertificate:
    """Result of validate_decomposition"""
    subalgebra_residual: float
    reductive_residual: float
    stabilizer_residual: float
    tolerance: float = DECOMPOSITION_TOL
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.subalgebra_residual <= self.tolerance
                and self.reductive_residual <= self.tolerance
                and self.stabilizer_residual <= STABILIZER_TOL)

    def to_dict(self) -> Dict:
        return {
            'verdict': 'pass' if self.passed else 'fail',
            'subalgebra_residual': self.subalgebra_residual,
            'reductive_residual': self.reductive_residual,
            'stabilizer_residual': self.stabilizer_residual,
            'tolerance': self.tolerance,
            'notes': list(self.notes),
        }


def index_set_problems(dim: int, h_indices: Sequence[int], m_indices: Sequence[int]) -> List[str]:
    problems = []
    h, m = set(h_indices), set(m_indices)
    if len(h) != len(h_indices) or len(m) != len(m_indices):
        problems.append("index sets contain duplicates")
    if h & m:
        problems.append(f"h and m overlap at basis indices {sorted(i + 1 for i in h & m)}")
    out_of_range = sorted(i + 1 for i in h | m if not 0 <= i < dim)
    if out_of_range:
        problems.append(f"indices out of range 1..{dim}: {out_of_range}")
    missing = sorted(i + 1 for i in set(range(dim)) - h - m)
    if missing:
        problems.append(f"basis indices in neither h nor m: {missing}")
    if not m:
        problems.append("m is empty")
    return problems


def as_m_vector(s: ReductiveSpace, y, nonzero: bool = False) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (s.q,):
        raise InvalidInputError(f"m-vector has shape {y.shape}, expected ({s.q},)")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("m-vector has non-finite entries")
    if nonzero and not np.any(y):
        raise InvalidInputError("y must be nonzero (m \\ {0})")
    return y


def validate_decomposition(s: ReductiveSpace) -> DecompositionCertificate:
    """Residuals of [h,h] in h and [h,m] in m, plus the base-point stabilizer check"""
    a = s.algebra
    h, m = list(s.h_indices), list(s.m_indices)
    sub_res = 0.0
    red_res = 0.0
    for i in h:
        ei = a.basis_vector(i)
        for j in h:
            w = bracket(a, ei, a.basis_vector(j))
            if m:
                sub_res = max(sub_res, float(np.max(np.abs(w[m]))))
        for j in m:
            w = bracket(a, ei, a.basis_vector(j))
            if h:
                red_res = max(red_res, float(np.max(np.abs(w[h]))))
    stab = s.rep.stabilizer_residual(h)
    cert = DecompositionCertificate(sub_res, red_res, stab)
    if not h:
        cert.notes.append("h is empty: invariance conditions hold trivially")
    logging.debug(f"decomposition residuals: [h,h] {sub_res:.3e}, [h,m] {red_res:.3e}, stabilizer {stab:.3e}")
    return cert


def project_h(s: ReductiveSpace, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[list(s.h_indices)] = x[list(s.h_indices)]
    return out


def project_m(s: ReductiveSpace, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[list(s.m_indices)] = x[list(s.m_indices)]
    return out


def orbit_tangent_matrix(s: ReductiveSpace, y) -> np.ndarray:
    """q x |h| matrix whose columns are [e_i, y] (i in h) in m-coordinates"""
    y = as_m_vector(s, y, nonzero=True)
    full_y = s.embed_m(y)
    columns = [s.restrict_m(bracket(s.algebra, s.algebra.basis_vector(i), full_y)) for i in s.h_indices]
    if not columns:
        return np.zeros((s.q, 0))
    return np.column_stack(columns)


def orbit_tangent_basis(s: ReductiveSpace, y) -> List[np.ndarray]:
    """Spanning set of [h, y] = T_y(Ad(H) y)"""
    mat = orbit_tangent_matrix(s, y)
    return [mat[:, k].copy() for k in range(mat.shape[1])]


def least_squares(a: np.ndarray, b: np.ndarray, rank_tol: float = RANK_TOL) -> Tuple[np.ndarray, float, int]:
    """
    Least-norm minimizer of ||a x - b||, the residual, and the numerical rank.

    Rank comes from QR with column pivoting; columns whose |R_kk| falls below
    rank_tol times the largest column norm are treated as dependent.
    """
    b = np.asarray(b, dtype=float)
    if a.shape[1] == 0:
        return np.zeros(0), float(np.linalg.norm(b)), 0
    q_mat, r_mat, _ = qr(a, mode='economic', pivoting=True)
    diag = np.abs(np.diag(r_mat))
    scale = float(np.max(np.linalg.norm(a, axis=0)))
    if scale == 0.0:
        return np.zeros(a.shape[1]), float(np.linalg.norm(b)), 0
    rank = int(np.sum(diag > rank_tol * scale))
    basis = q_mat[:, :rank]
    residual = float(np.linalg.norm(b - basis @ (basis.T @ b)))
    x, *_ = lstsq(a, b, cond=rank_tol)
    return x, residual, rank


def tangency_residual(s: ReductiveSpace, y, w) -> float:
    """Distance from w to [h, y] in m-coordinates"""
    w = as_m_vector(s, w)
    _, residual, _ = least_squares(orbit_tangent_matrix(s, y), w)
    return residual


def isotropy_matrix(s: ReductiveSpace, t) -> np.ndarray:
    """Ad(exp(sum t_i e_i)), e_i in h, restricted to m (q x q)"""
    x = s.embed_h(t)
    full = matrix_exp(ad_matrix(s.algebra, x))
    m = list(s.m_indices)
    return full[np.ix_(m, m)]


def isotropy_group_element(s: ReductiveSpace, t) -> np.ndarray:
    """rho(exp(sum t_i e_i)) in the representation"""
    return matrix_exp(s.rep.rho(s.embed_h(t)))


def killing_form(a: LieAlgebra) -> np.ndarray:
    """B(e_i, e_j) = tr(ad e_i ad e_j)"""
    ads = [ad_matrix(a, a.basis_vector(i)) for i in range(a.dim)]
    return np.array([[np.trace(ads[i] @ ads[j]) for j in range(a.dim)] for i in range(a.dim)])


def invariant_inner_product_residual(s: ReductiveSpace) -> float:
    """How far ad(e_i), e_i in h, is from skew-symmetric on m (0 => ||y|| is Ad(H)-invariant)"""
    m = list(s.m_indices)
    worst = 0.0
    for i in s.h_indices:
        block = ad_matrix(s.algebra, s.algebra.basis_vector(i))[np.ix_(m, m)]
        worst = max(worst, float(np.max(np.abs(block + block.T))))
    return worst


def has_invariant_norm(s: ReductiveSpace, tol: float = 1e-12) -> bool:
    return invariant_inner_product_residual(s) <= tol
