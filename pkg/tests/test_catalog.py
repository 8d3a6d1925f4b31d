import math

import numpy as np
import pytest

from conelab.catalog import build_example, catalog_names, describe
from conelab.errors import CatalogError
from conelab.setmodel import dist_query


def test_catalog_size_and_descriptions():
    names = catalog_names()
    assert len(names) >= 15
    assert all(describe(n) for n in names)


def test_unknown_entry():
    with pytest.raises(CatalogError):
        build_example("no-such-set")


@pytest.mark.parametrize("name", ["singleton", "factorial-sequence", "half-line", "circle",
                                  "cusp-y3x2", "two-parabolas", "polyline-corner", "dense-box"])
def test_test_points_lie_on_the_set(name):
    F = build_example(name)
    for x in F.meta["test_points"]:
        assert dist_query(F, x) <= F.delta


def test_factorial_terms():
    F = build_example("factorial-sequence", m_max=12)
    assert len(F) == 13  # twelve terms plus the limit point
    assert np.isclose(F.points[:, 0], 1 / 6).any()


def test_circle_resolution():
    F = build_example("circle")
    th = np.linspace(0, 2 * math.pi, 997, endpoint=False)
    q = np.column_stack([np.cos(th), np.sin(th)])
    assert F.dist_many(q).max() <= F.delta


def test_graph_entry():
    F = build_example("graph-of-custom-function", expr="sin(x)", h=1e-3, test_points=[0.0, 0.2])
    assert F.meta["graph_split"] == 1
    assert F.meta["test_points"][1] == pytest.approx([0.2, math.sin(0.2)])
    with pytest.raises(ValueError):
        build_example("graph-of-custom-function", expr="__import__('os')")


def test_sequence_delta_covers_tail():
    F = build_example("harmonic-sequence", m_max=1000)
    assert F.delta == pytest.approx(1e-3)
