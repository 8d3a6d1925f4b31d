import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conelab.catalog import build_example
from conelab.cones import ConeEstimate, DirectionGrid, estimate_cone
from conelab.exterior import Subspace, subspace_angle
from conelab.subspaces import (SubspaceField, field_continuity, grid_trace, is_vector_space, linear_hull,
                               lower_limit_defect, sequence_limit_verdicts, span_of_directions,
                               upper_limit_defect)

G2 = DirectionGrid.angular_2d()
G3 = DirectionGrid.fibonacci_3d()


def cone_from_mask(grid, mask, tau=0.15):
    scores = np.where(mask, 0.0, 1.0)
    return ConeEstimate(np.zeros(grid.ambient_dim), "Tan+", scores, tau, grid)


def test_hull_of_line_and_ray():
    line = cone_from_mask(G2, np.abs(G2.dirs[:, 1]) < 1e-9)
    ray = cone_from_mask(G2, (np.abs(G2.dirs[:, 1]) < 1e-9) & (G2.dirs[:, 0] > 0))
    assert linear_hull(line).dim == 1 and linear_hull(ray).dim == 1
    assert is_vector_space(line).ok
    assert not is_vector_space(ray).ok
    assert linear_hull(cone_from_mask(G2, np.zeros(len(G2), bool))).dim == 0


def test_hull_of_half_plane_is_plane():
    half = cone_from_mask(G2, G2.dirs[:, 1] >= -1e-12)
    assert linear_hull(half).dim == 2
    assert not is_vector_space(half).ok


def test_vector_space_on_samples():
    c = estimate_cone(build_example("circle"), [1.0, 0.0], "Tan+")
    V = linear_hull(c)
    assert V.dim == 1 and abs(V.basis[1, 0]) == pytest.approx(1.0, abs=1e-2)
    assert is_vector_space(c).ok
    h = estimate_cone(build_example("half-line"), [0.0], "Tan+")
    assert not is_vector_space(h).ok


@given(st.integers(0, 10**6), st.integers(1, 2))
def test_hull_idempotent(seed, d):
    # hull of the grid trace of a subspace gives back the subspace
    rng = np.random.default_rng(seed)
    V = Subspace(np.linalg.qr(rng.standard_normal((3, d)))[0])
    trace = grid_trace(V, G3, tol=G3.mesh)
    W = span_of_directions(trace, 3)
    assert W.dim == d
    assert subspace_angle(V, W) < 1e-6
    again = span_of_directions(grid_trace(W, G3, tol=G3.mesh), 3)
    assert subspace_angle(W, again) < 1e-6


def test_field_roundtrip_and_continuity():
    th = np.linspace(0, 0.2, 21)
    pts = np.column_stack([np.cos(th), np.sin(th)])
    subs = tuple(Subspace.span([[-math.sin(t), math.cos(t)]]) for t in th)
    F = SubspaceField(pts, subs)
    G = SubspaceField.from_json(F.to_json())
    assert G.dims == [1] * 21
    assert np.allclose(G.points, F.points)
    rep = field_continuity(G, 10, radius=0.015)
    assert rep.neighbors == 2 and rep.defect == pytest.approx(0.01, abs=1e-6)
    assert not rep.dim_mismatch


def test_field_dim_mismatch_flagged():
    pts = np.array([[0.0, 0.0], [0.01, 0.0]])
    F = SubspaceField(pts, (Subspace.span([[1.0, 0.0]]), Subspace(np.eye(2))))
    assert field_continuity(F, 0, 0.1).dim_mismatch
    with pytest.raises(ValueError):
        SubspaceField(pts, (Subspace.span([[1.0, 0.0]]),))


@given(st.floats(0.0, 1.0), st.integers(1, 3))
def test_limit_verdicts_for_rotating_lines(a, p):
    # V_m spanned by (1, a / m^p) converges to the x axis
    V = Subspace.span([[1.0, 0.0]])
    seq = [Subspace.span([[1.0, a / m ** p]]) for m in range(1, 2001)]
    by_angle, by_cont = sequence_limit_verdicts(V, seq, tol=1e-3)
    expect = math.atan(a / 2000 ** p) <= 1e-3
    assert by_angle == expect
    assert by_cont == by_angle


def test_limit_defects():
    X = Subspace.span([[1.0, 0.0, 0.0]])
    P = Subspace.span([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    assert lower_limit_defect(X, P) == pytest.approx(0.0)
    assert upper_limit_defect(X, P) == pytest.approx(1.0)
    W = Subspace.span([[1.0, 1.0, 0.0]])
    assert lower_limit_defect(X, W) == pytest.approx(math.sin(math.pi / 4))
