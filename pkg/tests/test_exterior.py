import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conelab.errors import DimensionError, GradeError
from conelab.exterior import (Blade, Subspace, blade_norm, dist_to_subspace, gram_inner,
                              projection_factor, subspace_angle)


def orth(rng, n, d):
    return Subspace(np.linalg.qr(rng.standard_normal((n, d)))[0])


dims = st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n)))
seeds = st.integers(0, 2**31 - 1)


def test_blade_norm_is_volume():
    assert blade_norm(Blade([[1.0, 0, 0], [0, 2.0, 0]])) == pytest.approx(2.0)
    assert blade_norm(Blade([[1.0, 1.0], [1.0, -1.0]])) == pytest.approx(2.0)
    assert blade_norm(Blade([[3.0, 4.0]])) == pytest.approx(5.0)


def test_gram_inner_is_determinant():
    a = Blade([[1.0, 0, 0], [0, 1.0, 0]])
    b = Blade([[1.0, 0, 0], [0, 1.0, 1.0]])
    assert gram_inner(a, b) == pytest.approx(1.0)
    assert gram_inner(a, Blade([[0, 1.0, 0], [1.0, 0, 0]])) == pytest.approx(-1.0)


def test_degenerate_blade():
    assert Blade([[1.0, 2.0], [2.0, 4.0]]).is_degenerate()
    assert not Blade([[1.0, 0.0], [0.0, 1.0]]).is_degenerate()


def test_grade_and_dimension_errors():
    with pytest.raises(GradeError):
        Blade(np.ones((3, 2)))
    with pytest.raises(GradeError):
        gram_inner(Blade([[1.0, 0, 0]]), Blade([[1.0, 0, 0], [0, 1.0, 0]]))
    with pytest.raises(DimensionError):
        gram_inner(Blade([[1.0, 0]]), Blade([[1.0, 0, 0]]))
    with pytest.raises(DimensionError):
        subspace_angle(Subspace.span([[1.0, 0, 0]]), Subspace.span([[1.0, 0, 0], [0, 1.0, 0]]))


def test_dist_to_subspace_examples():
    V = Subspace.span([[1.0, 0.0]])
    assert dist_to_subspace([3.0, 4.0], V) == pytest.approx(4.0)
    assert dist_to_subspace([3.0, 4.0], Subspace.zero(2)) == pytest.approx(5.0)
    assert dist_to_subspace([3.0, 4.0], Subspace(np.eye(2))) == 0.0


def test_angle_examples():
    xy = Subspace.span([[1.0, 0, 0], [0, 1.0, 0]])
    tilted = Subspace.span([[1.0, 0, 0], [0, 1.0, 1.0]])
    assert subspace_angle(xy, tilted) == pytest.approx(math.pi / 4)
    assert subspace_angle(xy, Subspace.span([[0, 1.0, 0], [0, 0, 1.0]])) == pytest.approx(math.pi / 2)


def test_subspace_requires_orthonormal_basis():
    with pytest.raises(ValueError):
        Subspace(np.array([[2.0], [0.0]]))


@given(dims, seeds)
def test_angle_matches_principal_angles(nd, seed):
    n, d = nd
    rng = np.random.default_rng(seed)
    V, W = orth(rng, n, d), orth(rng, n, d)
    sv = np.linalg.svd(V.basis.T @ W.basis, compute_uv=False)
    assert math.cos(subspace_angle(V, W)) == pytest.approx(np.prod(sv), abs=1e-9)
    assert 0.0 <= subspace_angle(V, W) <= math.pi / 2 + 1e-12


@given(dims, seeds)
def test_angle_symmetric_and_zero_on_diagonal(nd, seed):
    n, d = nd
    rng = np.random.default_rng(seed)
    V, W = orth(rng, n, d), orth(rng, n, d)
    # compare cosines: arccos near 1 only resolves angles to about sqrt(eps)
    assert projection_factor(V, W) == pytest.approx(projection_factor(W, V), abs=1e-12)
    assert subspace_angle(V, V) == pytest.approx(0.0, abs=1e-6)


@given(dims, seeds)
def test_angle_invariant_under_rotation(nd, seed):
    n, d = nd
    rng = np.random.default_rng(seed)
    V, W = orth(rng, n, d), orth(rng, n, d)
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    V2, W2 = Subspace(Q @ V.basis), Subspace(Q @ W.basis)
    assert projection_factor(V2, W2) == pytest.approx(projection_factor(V, W), abs=1e-9)


@given(dims, seeds)
def test_dist_triangle_inequality_and_residual(nd, seed):
    n, d = nd
    rng = np.random.default_rng(seed)
    V = orth(rng, n, d)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    dx, dy = dist_to_subspace(x, V), dist_to_subspace(y, V)
    assert dist_to_subspace(x + y, V) <= dx + dy + 1e-9
    assert dx == pytest.approx(np.linalg.norm(x - V.project(x)), abs=1e-9)
    assert dist_to_subspace(2.5 * x, V) == pytest.approx(2.5 * dx, abs=1e-9)


@given(dims, seeds)
def test_blade_norm_matches_gram(nd, seed):
    n, d = nd
    v = np.random.default_rng(seed).standard_normal((d, n))
    b = Blade(v)
    assert blade_norm(b) ** 2 == pytest.approx(np.linalg.det(v @ v.T), rel=1e-8, abs=1e-10)
