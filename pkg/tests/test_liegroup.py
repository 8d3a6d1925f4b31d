import math

import numpy as np
import pytest
from scipy.linalg import expm

from conelab.errors import CatalogError
from conelab.exterior import Subspace, subspace_angle
from conelab.liegroup import (algebra_subspace, analytic_algebra, bracket_closure_check,
                              estimate_infinitesimal_group, four_cones_check_at_identity, sample_group,
                              translate_subspace, translation_covariance_check)


def rot(t):
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])


@pytest.fixture(scope="module")
def so2():
    return sample_group("SO2", extra_centers=[rot(0.3)])


def test_samples_are_group_elements(so2):
    M = so2.elements()
    assert np.allclose(M @ M.transpose(0, 2, 1), np.eye(2), atol=1e-12)
    assert np.allclose(np.linalg.det(M), 1.0)
    D = sample_group("diag_pos", 2, budget=40, centers=1).elements()
    assert np.allclose(D[:, 0, 1], 0) and np.all(D[:, [0, 1], [0, 1]] > 0)
    U = sample_group("unipotent_upper", 3, budget=40, centers=1).elements()
    assert np.allclose(np.tril(U, -1), 0) and np.allclose(U[:, [0, 1, 2], [0, 1, 2]], 1)


def test_finest_shell_certified(so2):
    assert so2.delta == pytest.approx(so2.shell_delta[-1])
    assert so2.delta <= 1e-3


def test_so2_algebra(so2):
    J = estimate_infinitesimal_group(so2)
    assert J.dim == 1
    assert subspace_angle(J, algebra_subspace(analytic_algebra("SO2"))) < 0.05


def test_covariance_at_chosen_elements(so2):
    assert translation_covariance_check(so2, rot(0.3)) <= 0.05
    assert translation_covariance_check(so2, so2.identity) == pytest.approx(0.0, abs=1e-6)
    D = sample_group("diag_pos", 2, extra_centers=[np.diag([1.2, 0.9])])
    assert translation_covariance_check(D, np.diag([1.2, 0.9])) <= 0.05


def test_bracket_closure():
    assert bracket_closure_check(algebra_subspace(analytic_algebra("SO3"))) == pytest.approx(0.0, abs=1e-12)
    e11 = Subspace.span([np.array([[1.0, 0.0], [0.0, 0.0]]).ravel()])
    assert bracket_closure_check(e11) == 0.0
    # span{E12, E21} is not closed: the bracket is diagonal
    not_closed = Subspace.span([np.array([[0.0, 1.0], [0.0, 0.0]]).ravel(),
                                np.array([[0.0, 0.0], [1.0, 0.0]]).ravel()])
    assert bracket_closure_check(not_closed) > 0.5


def test_translate_subspace():
    J = algebra_subspace(analytic_algebra("SO2"))
    A = 2.0 * np.eye(2)
    assert subspace_angle(translate_subspace(J, A, 2), J) == pytest.approx(0.0, abs=1e-7)


def test_identity_cones_so2(so2):
    rep = four_cones_check_at_identity(so2)
    assert rep.passed
    assert rep.members["pTan-"] > 0


def test_custom_and_unknown_groups():
    X = np.array([[0.0, 1.0], [0.0, 0.0]])
    G = sample_group("custom", generators=[X], budget=10, centers=1)
    M = G.elements()[5]
    assert np.allclose(M, expm(M[0, 1] * X))
    assert estimate_infinitesimal_group(G).dim == 1
    with pytest.raises(CatalogError):
        sample_group("nope")
    with pytest.raises(ValueError):
        sample_group("custom")
