"""Point-level manifold tests built on the four cone estimates.

Each check compares a measured value with a tolerance and yields a tri-state
verdict. Margins are signed: positive on the passing side, negative on the
failing side. A check whose margin lies within the discretisation budget
``mesh / 2 + BUDGET_C * delta / lam_min`` is reported as inconclusive.

Examples of the secant computations behind the expected outcomes:

- cusp (t^3, t^2): the pair (t^3, t^2), (-t^3, t^2) has secant (1, 0), while
  Tan+ at the origin is the ray (0, 1); pTan+ therefore holds the horizontal
  line and differs from pTan-.
- two parabolas y = x^2, y = 2 x^2: the pair (t, t^2), (t, 2 t^2) has secant
  (0, 1), vertical, while both branches are tangent to y = 0.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .cones import KINDS, ConeEstimate, ConeParams, chain_violations, estimate_cones, params_for
from .errors import GraphSplitError, PointNotOnSetError
from .exterior import Subspace, dist_to_subspace, subspace_angle
from .setmodel import SampledSet, dist_query, neighbors_within, spread_subsample
from .subspaces import SIGMA_TOL, is_vector_space, linear_hull, singular_gap

SCHEMA_VERSION = "1.0"
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
BUDGET_C = 0.1


@dataclass(frozen=True)
class ClassifierParams:
    """Tolerances for the classifiers; ``cone`` None means the set's recommended cone parameters."""

    cone: ConeParams | None = None
    sigma_tol: float = SIGMA_TOL
    defect_slack: float = 0.05
    vector_space_tol: float = 0.05
    probe_radius: float | None = None
    injectivity_tol: float = 0.1
    continuity_tol: float = 0.1
    budget_c: float = BUDGET_C

    def cone_params(self, F: SampledSet) -> ConeParams:
        return params_for(F) if self.cone is None else self.cone

    def probe_for(self, F: SampledSet) -> float:
        if self.probe_radius is not None:
            return self.probe_radius
        cp = self.cone_params(F)
        ladder = cp.ladder_for(F)
        return float(ladder.base_radii[0])

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cone"] = None if self.cone is None else asdict(self.cone)
        return d


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    margin: float
    verdict: str
    decisive: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _num(self.value), "tol": _num(self.tol),
                "margin": _num(self.margin), "verdict": self.verdict, "decisive": self.decisive}


def _num(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _tri(margin: float, budget: float) -> str:
    if abs(margin) <= budget:
        return INCONCLUSIVE
    return PASS if margin > 0 else FAIL


def combine(verdicts) -> str:
    v = list(verdicts)
    if FAIL in v:
        return FAIL
    if INCONCLUSIVE in v:
        return INCONCLUSIVE
    return PASS


def upper_check(name: str, value: float, tol: float, budget: float, decisive: bool = True) -> Check:
    """Check passing when ``value <= tol``."""
    margin = tol - value
    return Check(name, value, tol, margin, _tri(margin, budget), decisive)


def dim_check(name: str, dim: int, target: int, gap: float, decisive: bool = True, at_most: bool = False) -> Check:
    ok = dim <= target if at_most else dim == target
    return Check(name, float(dim), float(target), gap if ok else -gap - abs(dim - target),
                 PASS if ok else FAIL, decisive)


@dataclass
class PointResult:
    index: int
    point: list
    checks: list = field(default_factory=list)
    cone_dims: dict = field(default_factory=dict)
    defects: dict = field(default_factory=dict)
    hull_angles: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return combine(c.verdict for c in self.checks if c.decisive)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"index": self.index, "point": self.point, "verdict": self.verdict,
                "checks": [c.to_dict() for c in self.checks], "cone_dims": self.cone_dims,
                "defects": {k: _num(v) for k, v in self.defects.items()},
                "hull_angles": {k: _num(v) for k, v in self.hull_angles.items()},
                "extra": self.extra}


@dataclass
class ClassificationReport:
    theorem: str
    dataset: str
    points: list
    params: dict = field(default_factory=dict)
    locally_compact: bool = True

    @property
    def verdict(self) -> str:
        return combine(p.verdict for p in self.points)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "theorem": self.theorem, "dataset": self.dataset,
                "verdict": self.verdict, "locally_compact": self.locally_compact,
                "params": self.params, "points": [p.to_dict() for p in self.points]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point_index", "point", "test", "verdict", "value", "tol", "margin"])
        for p in self.points:
            for c in p.checks:
                w.writerow([p.index, " ".join(f"{v:.12g}" for v in p.point), c.name, c.verdict,
                            f"{c.value:.12g}", f"{c.tol:.12g}", f"{c.margin:.12g}"])
        return buf.getvalue()


# ----------------------------------------------------------------- helpers

def coincidence_defect(big: ConeEstimate, small: ConeEstimate) -> float:
    """Max over members of ``big`` of the angle to the nearest member of ``small``.

    pi when ``small`` has no members but ``big`` does; 0 when ``big`` is empty.
    """
    if not big.member_mask.any():
        return 0.0
    if not small.member_mask.any():
        return math.pi
    c = np.clip(big.members @ small.members.T, -1.0, 1.0)
    return float(np.arccos(np.max(c, axis=1)).max())


def defect_tol(grid_mesh: float, slack: float) -> float:
    return 2.0 * grid_mesh + slack


class _Ctx:
    """Per-set plumbing shared by the classifiers."""

    def __init__(self, F: SampledSet, params: ClassifierParams | None):
        self.F = F
        self.params = params or ClassifierParams()
        self.cp = self.params.cone_params(F)
        self.ladder = self.cp.ladder_for(F)
        self.grid = self.cp.grid_for(F.ambient_dim)
        self.tol = defect_tol(self.grid.mesh, self.params.defect_slack)
        self.budget = self.grid.mesh / 2 + self.params.budget_c * F.delta / self.ladder.lam_min

    def point(self, x) -> np.ndarray:
        x = np.asarray(x, float).ravel()
        d = dist_query(self.F, x)
        if d > self.F.delta * (1 + 1e-9):
            raise PointNotOnSetError(f"test point {x.tolist()} is {d:.3g} from the samples (delta {self.F.delta:.3g})")
        return x

    def cones(self, x) -> dict[str, ConeEstimate]:
        return estimate_cones(self.F, x, self.cp, self.grid)

    def hull(self, cone: ConeEstimate) -> Subspace:
        return linear_hull(cone, self.params.sigma_tol)

    def summarize(self, res: PointResult, cones: dict[str, ConeEstimate]) -> dict[str, Subspace]:
        hulls = {k: self.hull(cones[k]) for k in KINDS}
        res.cone_dims = {k: hulls[k].dim for k in KINDS}
        res.extra["members"] = {k: int(cones[k].member_mask.sum()) for k in KINDS}
        res.extra["chain_violations"] = chain_violations(cones)
        return hulls

    def report_params(self) -> dict:
        return {"classifier": self.params.to_dict(), "cone": asdict(self.cp),
                "ladder": self.ladder.to_dict(), "grid": self.grid.to_dict(),
                "defect_tol": self.tol, "budget": self.budget}


def _test_points(F: SampledSet, test_points) -> np.ndarray:
    if test_points is None:
        test_points = F.meta.get("test_points")
        if test_points is None:
            raise ValueError("no test points given and the set carries none")
    return np.asarray(test_points, float).reshape(-1, F.ambient_dim)


def _hull_angle(V: Subspace, W: Subspace) -> float:
    if V.dim != W.dim or V.dim == 0:
        return math.pi / 2 if V.dim != W.dim else 0.0
    return subspace_angle(V, W)


def _report(theorem: str, ctx: _Ctx, results: list[PointResult], **extra) -> ClassificationReport:
    prm = ctx.report_params()
    prm.update(extra)
    return ClassificationReport(theorem, ctx.F.generator_id or "custom", results, prm,
                                bool(ctx.F.meta.get("locally_compact", True)))


# ------------------------------------------------------------- classifiers

def four_cones_classify(F: SampledSet, test_points=None, params: ClassifierParams | None = None) -> ClassificationReport:
    """Pass at x when the pTan+ and pTan- estimates coincide up to ``defect_tol``.

    The local-version condition (pTan+ equal to its linear hull) is reported
    as a non-decisive check.
    """
    ctx = _Ctx(F, params)
    results = []
    for i, x in enumerate(_test_points(F, test_points)):
        x = ctx.point(x)
        cones = ctx.cones(x)
        res = PointResult(i, x.tolist())
        hulls = ctx.summarize(res, cones)
        d = coincidence_defect(cones["pTan+"], cones["pTan-"])
        res.defects = {"pTan+/pTan-": d,
                       "Tan+/Tan-": coincidence_defect(cones["Tan+"], cones["Tan-"]),
                       "pTan+/Tan+": coincidence_defect(cones["pTan+"], cones["Tan+"])}
        res.hull_angles = {"Tan+/pTan+": _hull_angle(hulls["Tan+"], hulls["pTan+"])}
        res.checks.append(upper_check("four-cones", d, ctx.tol, ctx.budget))
        vs = is_vector_space(cones["pTan+"], ctx.params.vector_space_tol, ctx.params.sigma_tol)
        res.checks.append(upper_check("pTan+-vector-space", vs.margin, ctx.params.vector_space_tol,
                                      0.0, decisive=False))
        results.append(res)
    return _report("four-cones", ctx, results)


def _tangent_dim_checks(ctx: _Ctx, res: PointResult, cones, hulls, d: int):
    res.checks.append(dim_check("dim", hulls["Tan+"].dim, d, singular_gap(cones["Tan+"], ctx.params.sigma_tol)))


def tierno_classify(F: SampledSet, test_points, d: int, params: ClassifierParams | None = None) -> ClassificationReport:
    """Tan+ is a d-dimensional vector space containing pTan+ (up to tolerance) at every point."""
    if not 0 <= d <= F.ambient_dim:
        raise ValueError(f"dimension {d} outside [0, {F.ambient_dim}]")
    ctx = _Ctx(F, params)
    results = []
    for i, x in enumerate(_test_points(F, test_points)):
        x = ctx.point(x)
        cones = ctx.cones(x)
        res = PointResult(i, x.tolist())
        hulls = ctx.summarize(res, cones)
        vs = is_vector_space(cones["Tan+"], ctx.params.vector_space_tol, ctx.params.sigma_tol)
        res.checks.append(upper_check("Tan+-vector-space", vs.margin, ctx.params.vector_space_tol, ctx.budget))
        _tangent_dim_checks(ctx, res, cones, hulls, d)
        para = coincidence_defect(cones["pTan+"], cones["Tan+"])
        res.defects = {"pTan+/Tan+": para}
        res.checks.append(upper_check("pTan+-in-hull", para, ctx.tol, ctx.budget))
        results.append(res)
    return _report("tierno", ctx, results, dim=d)


def shchepin_repovs_classify(F: SampledSet, test_points, d: int,
                             params: ClassifierParams | None = None) -> ClassificationReport:
    """Tan+ = pTan+ (coincidence defect) and dim hull(Tan+) = d at every point."""
    if not 0 <= d <= F.ambient_dim:
        raise ValueError(f"dimension {d} outside [0, {F.ambient_dim}]")
    ctx = _Ctx(F, params)
    results = []
    for i, x in enumerate(_test_points(F, test_points)):
        x = ctx.point(x)
        cones = ctx.cones(x)
        res = PointResult(i, x.tolist())
        hulls = ctx.summarize(res, cones)
        dd = coincidence_defect(cones["pTan+"], cones["Tan+"])
        res.defects = {"pTan+/Tan+": dd}
        res.checks.append(upper_check("Tan+=pTan+", dd, ctx.tol, ctx.budget))
        _tangent_dim_checks(ctx, res, cones, hulls, d)
        results.append(res)
    return _report("shchepin-repovs", ctx, results, dim=d)


# -------------------------------------------------------- point-level tests

@dataclass(frozen=True)
class PointVerdict:
    verdict: str
    margin: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "margin": _num(self.margin), "details": self.details}


def _local_samples(F: SampledSet, x, radius: float, cap: int) -> np.ndarray:
    pts = neighbors_within(F, x, radius)
    return spread_subsample(pts, cap, np.asarray(x, float)) if pts.shape[0] > cap else pts


def valiron_condition(F: SampledSet, x, params: ClassifierParams | None = None,
                      cap: int = 1500) -> PointVerdict:
    """Injectivity of the orthogonal projection onto hull(Tan+(F, x)) near x.

    Samples p, q in the probe ball with ||p - q|| > 2 delta must keep
    ||P(p - q)|| >= injectivity_tol * ||p - q||. The margin is the smallest
    such ratio minus the tolerance.
    """
    ctx = _Ctx(F, params)
    x = ctx.point(x)
    V = ctx.hull(estimate_cones(F, x, ctx.cp, ctx.grid, kinds=("Tan+",))["Tan+"])
    if V.dim == 0:
        raise ValueError("linear hull of Tan+ is zero-dimensional")
    pts = _local_samples(F, x, ctx.params.probe_for(F), cap)
    coords = pts @ V.basis
    worst = math.inf
    for i in range(0, pts.shape[0], 256):
        dp = pts[i:i + 256, None, :] - pts[None, :, :]
        dc = coords[i:i + 256, None, :] - coords[None, :, :]
        full = np.linalg.norm(dp, axis=2)
        proj = np.linalg.norm(dc, axis=2)
        ok = full > 2 * F.delta
        if ok.any():
            worst = min(worst, float(np.min(proj[ok] / full[ok])))
    if not math.isfinite(worst):
        worst = 1.0
    margin = worst - ctx.params.injectivity_tol
    return PointVerdict(_tri(margin, ctx.budget), margin,
                        {"hull_dim": V.dim, "min_ratio": worst, "samples": int(pts.shape[0])})


def severi_simplicity(F: SampledSet, x, d: int, params: ClassifierParams | None = None) -> PointVerdict:
    """dim hull(pTan+(F, x)) <= d; margin is the singular-value gap at the threshold."""
    ctx = _Ctx(F, params)
    x = ctx.point(x)
    c = estimate_cones(F, x, ctx.cp, ctx.grid, kinds=("pTan+",))["pTan+"]
    V = ctx.hull(c)
    gap = singular_gap(c, ctx.params.sigma_tol)
    ok = V.dim <= d
    return PointVerdict(PASS if ok else FAIL, gap if ok else -gap, {"hull_dim": V.dim, "d": d})


def _secant_defect(pts: np.ndarray, line: np.ndarray, min_sep: float) -> float:
    worst = 0.0
    for i in range(0, pts.shape[0], 256):
        dp = pts[i:i + 256, None, :] - pts[None, :, :]
        nrm = np.linalg.norm(dp, axis=2)
        ok = nrm > min_sep
        if ok.any():
            c = np.abs(dp[ok] @ line) / nrm[ok]
            worst = max(worst, float(np.arccos(np.clip(c.min(), 0.0, 1.0))))
    return worst


def gluck_secant_test(F: SampledSet, x, params: ClassifierParams | None = None, cap: int = 600,
                      tol: float | None = None) -> PointVerdict:
    """Secant lines through pairs near x converge to a single line.

    The candidate limit line is the dominant direction of the pTan+
    estimate. The defect at radius r is the largest angle between that line
    and a secant of two samples in B_r(x) further apart than 2 delta;
    it is evaluated on three dyadic radii and must not grow and end below
    ``tol``.
    """
    ctx = _Ctx(F, params)
    x = ctx.point(x)
    if int(F.meta.get("manifold_dim", 1)) != 1:
        return PointVerdict("unsupported", 0.0, {"reason": "not a curve sample"})
    c = estimate_cones(F, x, ctx.cp, ctx.grid, kinds=("pTan+",))["pTan+"]
    if not c.member_mask.any():
        return PointVerdict(FAIL, -math.pi / 2, {"reason": "empty pTan+ estimate"})
    _, _, vt = np.linalg.svd(c.members, full_matrices=False)
    line = vt[0]
    R = ctx.params.probe_for(F)
    radii = [R, R / 2, R / 4]
    min_sep = 2 * F.delta
    defects = [_secant_defect(_local_samples(F, x, r, cap), line, min_sep) for r in radii]
    tol = ctx.tol if tol is None else tol
    growing = any(b > a + ctx.budget for a, b in zip(defects, defects[1:]))
    margin = tol - defects[-1]
    verdict = FAIL if growing else _tri(margin, ctx.budget)
    return PointVerdict(verdict, margin, {"radii": radii, "defects": defects, "line": line.tolist()})


def open_set_test(F: SampledSet, x, params: ClassifierParams | None = None) -> PointVerdict:
    """x is interior iff every grid direction lies in the pTan- estimate."""
    ctx = _Ctx(F, params)
    x = ctx.point(x)
    c = estimate_cones(F, x, ctx.cp, ctx.grid, kinds=("pTan-",))["pTan-"]
    margin = float(c.tau - c.scores.max())
    verdict = PASS if margin >= 0 else FAIL
    return PointVerdict(verdict, margin, {"non_members": int((~c.member_mask).sum())})


def _graph_split(F: SampledSet) -> int:
    k = F.meta.get("graph_split")
    if k is None:
        raise GraphSplitError("set is not tagged as a graph (missing domain/codomain split)")
    k = int(k)
    if not 1 <= k < F.ambient_dim:
        raise GraphSplitError(f"invalid domain dimension {k} for R^{F.ambient_dim}")
    return k


def _angle_to_vertical(v: np.ndarray, k: int) -> np.ndarray:
    """Angle between unit vectors and the vertical subspace {0} x R^m."""
    return np.arcsin(np.clip(np.linalg.norm(v[:, :k], axis=1), 0.0, 1.0))


def no_vertical_lines_test(F: SampledSet, x, params: ClassifierParams | None = None) -> PointVerdict:
    """No pTan+ member within ``defect_tol`` of the vertical subspace."""
    k = _graph_split(F)
    ctx = _Ctx(F, params)
    x = ctx.point(x)
    c = estimate_cones(F, x, ctx.cp, ctx.grid, kinds=("pTan+",))["pTan+"]
    closest = float(_angle_to_vertical(c.members, k).min()) if c.member_mask.any() else math.pi / 2
    margin = closest - ctx.tol
    return PointVerdict(_tri(margin, ctx.budget), margin, {"closest_vertical_angle": closest})


def graph_continuity(F: SampledSet, x, radius: float) -> float:
    """Largest codomain deviation among samples whose domain part lies within ``radius`` of x's."""
    k = _graph_split(F)
    x = np.asarray(x, float).ravel()
    near = np.linalg.norm(F.points[:, :k] - x[:k], axis=1) <= radius
    return float(np.linalg.norm(F.points[near, k:] - x[k:], axis=1).max())


@dataclass(frozen=True)
class StrictDiffResult:
    verdict: str
    margin: float
    differential: np.ndarray | None
    continuous: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "margin": _num(self.margin), "continuous": self.continuous,
                "differential": None if self.differential is None else self.differential.tolist(),
                "details": self.details}


def strict_differentiability_test(F: SampledSet, x, params: ClassifierParams | None = None) -> StrictDiffResult:
    """hull(pTan+) has the domain dimension and no vertical direction, and f is continuous at x.

    The candidate differential L is read off the hull as the graph of a
    linear map: with basis blocks B_dom (k x k) and B_cod (m x k),
    L = B_cod B_dom^{-1}.
    """
    k = _graph_split(F)
    ctx = _Ctx(F, params)
    x = ctx.point(x)
    c = estimate_cones(F, x, ctx.cp, ctx.grid, kinds=("pTan+",))["pTan+"]
    V = ctx.hull(c)
    R = ctx.params.probe_for(F)
    jump = graph_continuity(F, x, R)
    continuous = jump <= ctx.params.continuity_tol
    details = {"hull_dim": V.dim, "jump": jump, "probe_radius": R}
    if V.dim != k:
        return StrictDiffResult(FAIL, -singular_gap(c, ctx.params.sigma_tol), None, continuous, details)
    B = V.basis
    smin = float(np.linalg.svd(B[:k], compute_uv=False).min())
    # smin = cos of the angle between V and the domain, i.e. sin of its angle to the vertical
    vert = math.asin(min(1.0, smin))
    details["vertical_angle"] = vert
    L = B[k:] @ np.linalg.inv(B[:k]) if smin > 1e-12 else None
    margin = vert - ctx.tol
    verdict = _tri(margin, ctx.budget)
    if not continuous:
        verdict, margin = FAIL, min(margin, ctx.params.continuity_tol - jump)
    return StrictDiffResult(verdict, margin, L, continuous, details)


@dataclass(frozen=True)
class AngleConditionScores:
    radii: list
    fixed_center: list
    moving_center: list
    ls_alignment: float

    def to_dict(self) -> dict:
        return asdict(self)


def angle_condition_scores(F: SampledSet, x, params: ClassifierParams | None = None,
                           cap: int = 400, moving_centers: int = 6) -> AngleConditionScores:
    """Secant-to-tangent-space ratios dist(y - z, T) / ||y - z|| over shrinking balls.

    ``fixed_center`` uses T = hull(Tan+(F, x)) for every pair; ``moving_center``
    uses T = hull(Tan+(F, z)) at the first point z of each pair, for a few
    spread-out z. ``ls_alignment`` is the angle between the hulls of Tan+ and
    pTan+ at x (pi/2 when their dimensions differ).
    """
    ctx = _Ctx(F, params)
    x = ctx.point(x)
    cones = estimate_cones(F, x, ctx.cp, ctx.grid, kinds=("Tan+", "pTan+"))
    T = ctx.hull(cones["Tan+"])
    R = ctx.params.probe_for(F)
    radii = [R, R / 2, R / 4]
    min_sep = 2 * F.delta
    fixed, moving = [], []
    for r in radii:
        pts = _local_samples(F, x, r, cap)
        fixed.append(_pair_ratio(pts, pts, T, min_sep))
        centers = spread_subsample(pts, moving_centers, x)
        worst = 0.0
        for z in centers:
            Tz = ctx.hull(estimate_cones(F, z, ctx.cp, ctx.grid, kinds=("Tan+",))["Tan+"])
            worst = max(worst, _pair_ratio(z[None, :], pts, Tz, min_sep))
        moving.append(worst)
    return AngleConditionScores(radii, fixed, moving, _hull_angle(T, ctx.hull(cones["pTan+"])))


def _pair_ratio(A: np.ndarray, B: np.ndarray, T: Subspace, min_sep: float) -> float:
    worst = 0.0
    for i in range(0, A.shape[0], 256):
        dp = (B[None, :, :] - A[i:i + 256, None, :]).reshape(-1, A.shape[1])
        nrm = np.linalg.norm(dp, axis=1)
        ok = nrm > min_sep
        if not ok.any():
            continue
        dp, nrm = dp[ok], nrm[ok]
        if T.dim == 0:
            res = nrm
        else:
            res = np.linalg.norm(dp - (dp @ T.basis) @ T.basis.T, axis=1)
        worst = max(worst, float(np.max(res / nrm)))
    return worst


THEOREMS = ("four-cones", "tierno", "shchepin-repovs", "valiron", "severi", "gluck")


def classify(F: SampledSet, theorem: str, test_points=None, d: int | None = None,
             params: ClassifierParams | None = None) -> ClassificationReport:
    """Dispatch by theorem name; point-level tests are wrapped into a report."""
    if theorem == "four-cones":
        return four_cones_classify(F, test_points, params)
    if theorem in ("tierno", "shchepin-repovs"):
        if d is None:
            d = int(F.meta.get("manifold_dim", 1))
        fn = tierno_classify if theorem == "tierno" else shchepin_repovs_classify
        return fn(F, test_points, d, params)
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    ctx = _Ctx(F, params)
    results = []
    for i, x in enumerate(_test_points(F, test_points)):
        if theorem == "valiron":
            pv = valiron_condition(F, x, params)
        elif theorem == "severi":
            pv = severi_simplicity(F, x, int(F.meta.get("manifold_dim", 1)) if d is None else d, params)
        else:
            pv = gluck_secant_test(F, x, params)
        res = PointResult(i, np.asarray(x, float).tolist())
        res.checks.append(Check(theorem, pv.margin, 0.0, pv.margin, pv.verdict))
        res.extra = pv.details
        results.append(res)
    return _report(theorem, ctx, results, dim=d)
