#!/usr/bin/env python3
"""
Real Lie algebra arithmetic

Structure constants, brackets, adjoint matrices, matrix exponentials and the
matrix representations used to realize group elements and the base point.

Conventions:
    [e_i, e_j] = sum_k c[i, j, k] e_k      (0-based internally, 1-based in configs)
    algebra vectors are plain float arrays of length n
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from spraylab_errors import InvalidInputError

JACOBI_TOL = 1e-12
ANTISYMMETRY_TOL = 1e-12
REPRESENTATION_TOL = 1e-10
STABILIZER_TOL = 1e-10
RE_EXPRESS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Finite-dimensional real Lie algebra given by dense structure constants"""
    structure_constants: np.ndarray
    basis_labels: Tuple[str, ...] = ()

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] < 1:
            raise InvalidInputError(f"structure constants must be n x n x n, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("structure constants contain non-finite entries")
        c.setflags(write=False)
        object.__setattr__(self, 'structure_constants', c)
        labels = tuple(self.basis_labels) or tuple(f"e{i + 1}" for i in range(c.shape[0]))
        if len(labels) != c.shape[0]:
            raise InvalidInputError(
                f"{len(labels)} basis labels for a {c.shape[0]}-dimensional algebra")
        object.__setattr__(self, 'basis_labels', labels)

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def antisymmetry_residual(self) -> float:
        c = self.structure_constants
        return float(np.max(np.abs(c + c.transpose(1, 0, 2))))

    def jacobi_residual(self) -> float:
        """max over basis triples of ||[[e_i,e_j],e_k] + cyclic||_inf"""
        c = self.structure_constants
        # [[e_i,e_j],e_k] = sum_l c[i,j,l] c[l,k,:]
        term = np.einsum('ijl,lkm->ijkm', c, c)
        total = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)
        return float(np.max(np.abs(total)))

    def violations(self) -> List[str]:
        found = []
        anti = self.antisymmetry_residual()
        if anti > ANTISYMMETRY_TOL:
            found.append(f"antisymmetry violated: max |c[i][j][k] + c[j][i][k]| = {anti:.3e}")
        jac = self.jacobi_residual()
        if jac > JACOBI_TOL:
            found.append(f"Jacobi identity violated: residual {jac:.3e} > {JACOBI_TOL:g}")
        return found

    @classmethod
    def from_triples(cls, dim: int, entries: Sequence[Sequence[float]],
                     labels: Sequence[str] = ()) -> Tuple['LieAlgebra', List[str]]:
        """
        Build from 1-based [i, j, k, value] entries with antisymmetric completion.

        Returns the algebra and the list of entry-level problems (out-of-range
        indices, conflicting or diagonal entries). Conflicts are kept in the
        array so that the antisymmetry check reports them as well.
        """
        problems = []
        c = np.zeros((dim, dim, dim))
        given = set()
        for pos, entry in enumerate(entries):
            if len(entry) != 4:
                problems.append(f"structure_constants[{pos}]: expected [i, j, k, value]")
                continue
            i, j, k = (int(v) - 1 for v in entry[:3])
            if not all(0 <= idx < dim for idx in (i, j, k)):
                problems.append(f"structure_constants[{pos}]: index out of range 1..{dim}")
                continue
            value = float(entry[3])
            if i == j and value != 0.0:
                problems.append(f"structure_constants[{pos}]: [e{i + 1}, e{i + 1}] must vanish")
            c[i, j, k] = value
            given.add((i, j, k))
        for (i, j, k) in given:
            if (j, i, k) not in given:
                c[j, i, k] = -c[i, j, k]
        return cls(c, tuple(labels)), problems

    @classmethod
    def from_matrices(cls, generators: Sequence[np.ndarray],
                      labels: Sequence[str] = ()) -> 'LieAlgebra':
        """Structure constants of the matrix Lie algebra spanned by the generators"""
        gens = np.asarray(generators, dtype=float)
        n = gens.shape[0]
        c = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                comm = gens[i] @ gens[j] - gens[j] @ gens[i]
                c[i, j] = _solve_in_span(gens, comm)
        return cls(c, tuple(labels))


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """
    Matrix representation rho: g -> gl(N, R) plus the base point o = eH.

    A vector base point is acted on by matrix-vector product; a matrix base
    point by left multiplication (the identity models G/{e}).
    """
    generators: np.ndarray
    base_point: np.ndarray
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        gens = np.asarray(self.generators, dtype=float)
        if gens.ndim != 3 or gens.shape[1] != gens.shape[2]:
            raise InvalidInputError(f"generators must be a list of square matrices, got {gens.shape}")
        base = np.asarray(self.base_point, dtype=float)
        size = gens.shape[1]
        if base.shape not in ((size,), (size, size)):
            raise InvalidInputError(f"base point shape {base.shape} does not fit {size}x{size} generators")
        gens.setflags(write=False)
        base.setflags(write=False)
        object.__setattr__(self, 'generators', gens)
        object.__setattr__(self, 'base_point', base)

    @property
    def n_rep(self) -> int:
        return self.generators.shape[1]

    def rho(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.generators.shape[0],):
            raise InvalidInputError(f"algebra vector of length {x.shape} for {self.generators.shape[0]} generators")
        return np.einsum('i,ijk->jk', x, self.generators)

    def act(self, g: np.ndarray) -> np.ndarray:
        """g . o, flattened row-major"""
        return (g @ self.base_point).reshape(-1)

    def representation_residual(self, algebra: LieAlgebra) -> float:
        """max_ij ||rho([e_i,e_j]) - [rho(e_i), rho(e_j)]||_inf"""
        gens = self.generators
        worst = 0.0
        for i in range(algebra.dim):
            for j in range(algebra.dim):
                lhs = np.einsum('k,kab->ab', algebra.structure_constants[i, j], gens)
                rhs = gens[i] @ gens[j] - gens[j] @ gens[i]
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def stabilizer_residual(self, indices: Sequence[int]) -> float:
        """How far exp(rho(e_i)), i in indices, moves the base point"""
        worst = 0.0
        for i in indices:
            for t in (1.0, np.pi / 3):
                moved = self.act(matrix_exp(t * self.generators[i]))
                worst = max(worst, float(np.max(np.abs(moved - self.base_point.reshape(-1)))))
        return worst

    def violations(self, algebra: LieAlgebra) -> List[str]:
        if self.generators.shape[0] != algebra.dim:
            return [f"{self.generators.shape[0]} generators for a {algebra.dim}-dimensional algebra"]
        found = []
        res = self.representation_residual(algebra)
        if res > REPRESENTATION_TOL:
            found.append(f"representation property violated: residual {res:.3e} > {REPRESENTATION_TOL:g}")
        return found


def _solve_in_span(generators: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Coordinates of target in span(generators); raises if it is not in the span"""
    basis = generators.reshape(generators.shape[0], -1).T
    flat = np.asarray(target, dtype=float).reshape(-1)
    coords, *_ = np.linalg.lstsq(basis, flat, rcond=None)
    residual = float(np.linalg.norm(basis @ coords - flat))
    if residual > RE_EXPRESS_TOL:
        raise InvalidInputError(
            f"matrix is not in the span of the generators (residual {residual:.3e}); "
            f"representation may be unfaithful")
    return coords


def _check_vector(a: LieAlgebra, x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (a.dim,):
        raise InvalidInputError(f"{name} has shape {x.shape}, expected ({a.dim},)")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return x


def bracket(a: LieAlgebra, x, y) -> np.ndarray:
    """[x, y] = sum_ij x_i y_j c[i, j, :]"""
    x = _check_vector(a, x, 'x')
    y = _check_vector(a, y, 'y')
    return np.einsum('i,j,ijk->k', x, y, a.structure_constants)


def ad_matrix(a: LieAlgebra, x) -> np.ndarray:
    """Matrix M with M @ z = [x, z]"""
    x = _check_vector(a, x, 'x')
    return np.einsum('i,ijk->kj', x, a.structure_constants)


def matrix_exp(m) -> np.ndarray:
    """e^M (Pade scaling-and-squaring)"""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"matrix_exp needs a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix_exp: non-finite entries")
    return expm(m)


def adjoint_of_group_element(a: LieAlgebra, v, t: float) -> np.ndarray:
    """Ad(exp(t v)) = e^{t ad(v)}"""
    return matrix_exp(t * ad_matrix(a, v))


def re_express(rep: MatrixRep, m: np.ndarray) -> np.ndarray:
    """Algebra coordinates of a matrix in rho(g)"""
    return _solve_in_span(rep.generators, m)


def adjoint_via_rep(a: LieAlgebra, rep: MatrixRep, g: np.ndarray) -> np.ndarray:
    """Ad(g) from conjugation g rho(e_j) g^-1, re-expressed in the basis"""
    g_inv = np.linalg.inv(g)
    columns = [re_express(rep, g @ rep.generators[j] @ g_inv) for j in range(a.dim)]
    return np.column_stack(columns)


def so3_algebra() -> LieAlgebra:
    """so(3) with [e1,e2]=e3 and cyclic"""
    algebra, _ = LieAlgebra.from_triples(3, [[1, 2, 3, 1.0], [2, 3, 1, 1.0], [3, 1, 2, 1.0]])
    return algebra


def so3_defining_rep(base_point: Optional[Sequence[float]] = None) -> MatrixRep:
    """3x3 rotation generators; base point defaults to the north pole"""
    gens = np.array([
        [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
        [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
        [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
    ], dtype=float)
    base = np.array([0.0, 0.0, 1.0]) if base_point is None else np.asarray(base_point, dtype=float)
    return MatrixRep(gens, base)


def realify(real_part, imag_part) -> np.ndarray:
    """A + iB -> [[A, -B], [B, A]] (vectors: [Re; Im])"""
    a = np.asarray(real_part, dtype=float)
    b = np.asarray(imag_part, dtype=float)
    if a.shape != b.shape:
        raise InvalidInputError(f"real part {a.shape} and imaginary part {b.shape} differ")
    if a.ndim == 1:
        return np.concatenate([a, b])
    return np.block([[a, -b], [b, a]])


def main():
    """Print a quick health check of the built-in so(3)"""
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
    algebra = so3_algebra()
    rep = so3_defining_rep()
    print(f"so(3) antisymmetry residual: {algebra.antisymmetry_residual():.3e}")
    print(f"so(3) Jacobi residual:       {algebra.jacobi_residual():.3e}")
    print(f"rep residual:                {rep.representation_residual(algebra):.3e}")
    print(f"[e1, e2] = {bracket(algebra, algebra.basis_vector(0), algebra.basis_vector(1))}")


if __name__ == "__main__":
    main()
