import csv
import io
import json
import math

import numpy as np
import pytest

from conelab.catalog import build_example
from conelab.classify import (FAIL, INCONCLUSIVE, PASS, ClassifierParams, angle_condition_scores,
                              classify, coincidence_defect, combine, defect_tol, four_cones_classify,
                              gluck_secant_test, no_vertical_lines_test, open_set_test,
                              severi_simplicity, shchepin_repovs_classify,
                              strict_differentiability_test, tierno_classify, upper_check,
                              valiron_condition)
from conelab.cones import ConeEstimate, DirectionGrid
from conelab.errors import GraphSplitError, PointNotOnSetError
from conelab.setmodel import SampledSet


@pytest.fixture(scope="module")
def cat():
    cache = {}

    def get(name, **kw):
        key = (name, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = build_example(name, **kw)
        return cache[key]
    return get


def test_tri_state_and_combine():
    assert upper_check("a", 0.1, 0.5, 0.05).verdict == PASS
    assert upper_check("a", 0.9, 0.5, 0.05).verdict == FAIL
    assert upper_check("a", 0.52, 0.5, 0.05).verdict == INCONCLUSIVE
    assert upper_check("a", 0.9, 0.5, 0.05).margin == pytest.approx(-0.4)
    assert combine([PASS, INCONCLUSIVE]) == INCONCLUSIVE
    assert combine([PASS, FAIL, INCONCLUSIVE]) == FAIL
    assert combine([PASS, PASS]) == PASS


def test_coincidence_defect_edge_cases():
    g = DirectionGrid.angular_2d(8)
    empty = ConeEstimate(np.zeros(2), "pTan-", np.ones(8), 0.15, g)
    full = ConeEstimate(np.zeros(2), "pTan+", np.zeros(8), 0.15, g)
    assert coincidence_defect(full, empty) == math.pi
    assert coincidence_defect(empty, full) == 0.0
    assert coincidence_defect(full, full) == pytest.approx(0.0, abs=1e-7)
    assert defect_tol(0.01, 0.05) == pytest.approx(0.07)


def test_four_cones_circle_passes(cat):
    rep = four_cones_classify(cat("circle"), [[1.0, 0.0], [0.0, -1.0]])
    assert rep.verdict == PASS
    assert all(p.extra["chain_violations"] == 0 for p in rep.points)


@pytest.mark.parametrize("name", ["cusp-y3x2", "two-parabolas"])
def test_four_cones_singular_origin_fails(cat, name):
    rep = four_cones_classify(cat(name), [[0.0, 0.0]])
    chk = rep.points[0].check("four-cones")
    assert chk.verdict == FAIL and -chk.margin >= 2 * chk.tol


def test_off_set_point_rejected(cat):
    with pytest.raises(PointNotOnSetError):
        four_cones_classify(cat("circle"), [[0.5, 0.0]])


def test_report_serialisation(cat):
    rep = four_cones_classify(cat("two-parabolas"))
    d = json.loads(rep.to_json())
    assert d["schema_version"] == "1.0" and d["verdict"] == FAIL
    assert rep.to_json() == four_cones_classify(cat("two-parabolas")).to_json()
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["point_index", "point", "test", "verdict", "value", "tol", "margin"]
    assert len(rows) == 1 + sum(len(p.checks) for p in rep.points)


def test_tierno(cat):
    assert tierno_classify(cat("circle"), [[1.0, 0.0]], 1).verdict == PASS
    rep = tierno_classify(cat("concentric-spheres"), [[0.0, 0.0]], 1)
    assert rep.verdict == FAIL and rep.points[0].cone_dims["Tan+"] == 2
    with pytest.raises(ValueError):
        tierno_classify(cat("circle"), None, 3)


def test_shchepin_repovs(cat):
    assert shchepin_repovs_classify(cat("factorial-sequence"), [[0.0]], 0).verdict == FAIL
    rep = shchepin_repovs_classify(cat("symmetric-harmonic"), [[0.0], [0.5]], 1)
    assert [p.verdict for p in rep.points] == [PASS, FAIL]


def test_valiron(cat):
    assert valiron_condition(cat("circle"), [1.0, 0.0]).passed
    assert valiron_condition(cat("two-parabolas"), [0.0, 0.0]).verdict == FAIL
    assert valiron_condition(cat("cusp-y3x2"), [0.0, 0.0]).verdict == FAIL


def test_severi(cat):
    assert severi_simplicity(cat("circle"), [1.0, 0.0], 1).passed
    v = severi_simplicity(cat("two-parabolas"), [0.0, 0.0], 1)
    assert v.verdict == FAIL and v.details["hull_dim"] == 2


def test_gluck(cat):
    ok = gluck_secant_test(cat("circle"), [1.0, 0.0])
    assert ok.passed and abs(ok.details["line"][1]) == pytest.approx(1.0, abs=1e-3)
    assert gluck_secant_test(cat("cusp-y3x2"), [0.0, 0.0]).verdict == FAIL
    assert gluck_secant_test(cat("polyline-corner"), [0.0, 0.0]).verdict == FAIL
    assert gluck_secant_test(cat("dense-box"), [0.0, 0.0]).verdict == "unsupported"


def test_open_set(cat):
    assert open_set_test(cat("dense-box"), [0.0, 0.0]).passed
    assert open_set_test(cat("circle"), [1.0, 0.0]).verdict == FAIL
    assert open_set_test(cat("half-line"), [0.0]).verdict == FAIL


def graph(expr, h=1e-4, **kw):
    return build_example("graph-of-custom-function", expr=expr, h=h, **kw)


def test_no_vertical_lines():
    assert no_vertical_lines_test(graph("abs(x)"), [0.0, 0.0]).passed
    assert no_vertical_lines_test(graph("x**2"), [0.0, 0.0]).passed
    assert no_vertical_lines_test(graph("cbrt(x**2)"), [0.0, 0.0]).verdict == FAIL
    with pytest.raises(GraphSplitError):
        no_vertical_lines_test(build_example("circle"), [1.0, 0.0])


def test_strict_differentiability():
    r = strict_differentiability_test(graph("x**2", test_points=[0.0, 0.3]), [0.0, 0.0])
    assert r.verdict == PASS and abs(r.differential[0, 0]) < 1e-2
    F = graph("x**2", test_points=[0.3])
    r = strict_differentiability_test(F, F.meta["test_points"][0])
    assert r.differential[0, 0] == pytest.approx(0.6, abs=1e-2)
    bad = strict_differentiability_test(graph("abs(x)"), [0.0, 0.0])
    assert bad.verdict == FAIL and bad.details["hull_dim"] == 2


def test_discontinuous_graph_flagged():
    # g(x, y) = 0 for x >= 0 and 1 otherwise, sampled over a square
    h = 2e-3
    g = np.arange(-0.1, 0.1 + h / 2, h)
    X, Y = np.meshgrid(g, g, indexing="ij")
    Z = np.where(X >= 0, 0.0, 1.0)
    pts = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    F = SampledSet(pts, h, "step", meta={"graph_split": 2,
                                         "params": {"lam0": 0.04, "rho0": 0.08, "count": 2}})
    r = strict_differentiability_test(F, [0.0, 0.0, 0.0])
    assert r.verdict == FAIL and not r.continuous


def test_angle_condition_scores(cat):
    c = angle_condition_scores(cat("circle"), [1.0, 0.0])
    assert max(c.fixed_center) < 0.01 and max(c.moving_center) < 0.01
    assert c.fixed_center[-1] < c.fixed_center[0]
    p = angle_condition_scores(cat("two-parabolas"), [0.0, 0.0])
    assert min(p.fixed_center) > 0.9
    h = angle_condition_scores(cat("half-line"), [0.5])
    assert max(h.fixed_center + h.moving_center) == 0.0


def test_dispatcher(cat):
    rep = classify(cat("two-parabolas"), "severi", [[0.0, 0.0]], 1)
    assert rep.verdict == FAIL and rep.theorem == "severi"
    with pytest.raises(ValueError):
        classify(cat("circle"), "nonsense")


def test_custom_tolerances(cat):
    strict = ClassifierParams(defect_slack=-0.5)
    assert four_cones_classify(cat("circle"), [[1.0, 0.0]], strict).verdict == FAIL
