#!/usr/bin/env python3
"""
Tests for reductive decompositions, orbit tangents and the isotropy action
"""

import math

import numpy as np

from spraylab_errors import InvalidInputError
from spraylab_lie_core import so3_algebra, so3_defining_rep
from spraylab_reductive import (
    ReductiveSpace,
    as_m_vector,
    has_invariant_norm,
    index_set_problems,
    isotropy_group_element,
    isotropy_matrix,
    killing_form,
    least_squares,
    orbit_tangent_basis,
    orbit_tangent_matrix,
    project_h,
    project_m,
    tangency_residual,
    validate_decomposition,
)


def sphere_space() -> ReductiveSpace:
    return ReductiveSpace(so3_algebra(), so3_defining_rep(), (2,), (0, 1))


def test_sphere_decomposition_is_valid():
    cert = validate_decomposition(sphere_space())
    assert cert.passed
    assert cert.subalgebra_residual == 0.0 and cert.reductive_residual == 0.0
    assert cert.to_dict()['verdict'] == 'pass'


def test_group_decomposition_has_empty_h():
    s = ReductiveSpace(so3_algebra(), so3_defining_rep(np.eye(3)), (), (0, 1, 2))
    cert = validate_decomposition(s)
    assert cert.passed
    assert any('empty' in n for n in cert.notes)


def test_non_subalgebra_is_rejected():
    s = ReductiveSpace(so3_algebra(), so3_defining_rep(), (0, 1), (2,))
    cert = validate_decomposition(s)
    assert not cert.passed
    assert cert.subalgebra_residual == 1.0


def test_h_must_fix_base_point():
    # h = span(e1) is a subalgebra with [h, m] in m, but e1 moves the north pole
    s = ReductiveSpace(so3_algebra(), so3_defining_rep(), (0,), (1, 2))
    cert = validate_decomposition(s)
    assert cert.subalgebra_residual == 0.0 and cert.reductive_residual == 0.0
    assert not cert.passed


def test_index_set_problems():
    assert index_set_problems(3, [2], [0, 1]) == []
    problems = index_set_problems(3, [0, 1], [1])
    assert any('overlap' in p for p in problems)
    assert any('neither' in p for p in problems)
    assert any('out of range' in p for p in index_set_problems(3, [5], [0, 1, 2]))
    try:
        ReductiveSpace(so3_algebra(), so3_defining_rep(), (2,), (0,))
        assert False, "expected InvalidInputError"
    except InvalidInputError:
        pass


def test_projections_split_the_algebra():
    s = sphere_space()
    x = np.array([1.0, 2.0, 3.0])
    assert np.allclose(project_h(s, x), [0.0, 0.0, 3.0])
    assert np.allclose(project_m(s, x), [1.0, 2.0, 0.0])
    assert np.allclose(project_h(s, x) + project_m(s, x), x)


def test_orbit_tangent_at_e1():
    s = sphere_space()
    mat = orbit_tangent_matrix(s, [1.0, 0.0])
    assert mat.shape == (2, 1)
    assert np.allclose(mat[:, 0], [0.0, 1.0])
    assert len(orbit_tangent_basis(s, [0.0, 2.0])) == 1


def test_tangency_residual():
    s = sphere_space()
    assert tangency_residual(s, [1.0, 0.0], [0.0, 5.0]) <= 1e-14
    assert math.isclose(tangency_residual(s, [1.0, 0.0], [3.0, 5.0]), 3.0, rel_tol=1e-12)


def test_least_squares_rank_deficient():
    a = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
    b = np.array([1.0, 2.0, 1.0])
    x, residual, rank = least_squares(a, b)
    assert rank == 1
    assert math.isclose(residual, 1.0, rel_tol=1e-12)
    # least-norm solution is along (1, 2)
    assert np.allclose(x, np.array([1.0, 2.0]) / 5.0, atol=1e-12)


def test_least_squares_without_columns():
    x, residual, rank = least_squares(np.zeros((2, 0)), np.array([3.0, 4.0]))
    assert x.shape == (0,) and rank == 0
    assert residual == 5.0


def test_isotropy_rotates_m():
    s = sphere_space()
    ad = isotropy_matrix(s, [math.pi / 2])
    assert np.allclose(ad @ np.array([1.0, 0.0]), [0.0, 1.0], atol=1e-14)
    assert np.allclose(isotropy_matrix(s, [math.pi]) @ np.array([0.3, -0.7]), [-0.3, 0.7], atol=1e-14)
    g = isotropy_group_element(s, [0.8])
    assert np.allclose(s.rep.act(g), [0.0, 0.0, 1.0], atol=1e-14)


def test_killing_form_of_so3():
    assert np.allclose(killing_form(so3_algebra()), -2.0 * np.eye(3))


def test_invariant_norm_on_sphere():
    assert has_invariant_norm(sphere_space())


def test_as_m_vector_checks():
    s = sphere_space()
    for bad in ([1.0], [np.inf, 0.0]):
        try:
            as_m_vector(s, bad)
            assert False, "expected InvalidInputError"
        except InvalidInputError:
            pass
    try:
        as_m_vector(s, [0.0, 0.0], nonzero=True)
        assert False, "expected InvalidInputError"
    except InvalidInputError:
        pass


def test_tangency_residual_is_isotropy_equivariant():
    s = sphere_space()
    rng = np.random.default_rng(11)
    for _ in range(20):
        y, w = rng.normal(size=2), rng.normal(size=2)
        ad = isotropy_matrix(s, rng.uniform(-math.pi, math.pi, size=1))
        assert abs(tangency_residual(s, ad @ y, ad @ w) - tangency_residual(s, y, w)) <= 1e-9


def test_tangency_residual_ignores_spanning_set_scale():
    s = sphere_space()
    rng = np.random.default_rng(12)
    for _ in range(20):
        y, w = rng.normal(size=2), rng.normal(size=2)
        scale = rng.uniform(1e-3, 1e3)
        base = tangency_residual(s, y, w)
        _, scaled, rank = least_squares(scale * orbit_tangent_matrix(s, y), w)
        assert rank == 1
        assert abs(scaled - base) <= 1e-9 * max(1.0, base)
        # [h, c y] = c [h, y] spans the same line
        assert abs(tangency_residual(s, scale * y, w) - base) <= 1e-9 * max(1.0, base)


def test_tangency_residual_is_subadditive():
    s = sphere_space()
    rng = np.random.default_rng(13)
    for _ in range(20):
        y, w1, w2 = rng.normal(size=2), rng.normal(size=2), rng.normal(size=2)
        total = tangency_residual(s, y, w1 + w2)
        assert total <= tangency_residual(s, y, w1) + tangency_residual(s, y, w2) + 1e-12


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith('test_') and callable(fn):
            fn()
            print(f"[OK] {name}")
