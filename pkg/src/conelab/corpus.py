"""The acceptance corpus: one function per criterion, shared by the CLI and the tests.

Every ``criterion_*`` function returns a :class:`CriterionResult` whose
``details`` hold plain JSON values only, so that two runs with the same seed
serialise to identical bytes. Wall-clock timings are kept out of the JSON.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .catalog import build_example, catalog_names
from .classify import (FAIL, PASS, ClassificationReport, four_cones_classify,
                       strict_differentiability_test, tierno_classify)
from .cones import (KINDS, chain_violations, estimate_cones, integer_scale_lower_cone, params_for,
                    ratio_test_1d)
from .exterior import Subspace, dist_to_subspace, subspace_angle
from .liegroup import algebra_report, sample_group
from .setmodel import SampledSet
from .catalog import sequence_set

SCHEMA_VERSION = "1.0"


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": self.passed,
                "summary": self.summary, "details": self.details}


def _clean(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats into JSON values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


class Session:
    """Caches built sets and per-point chain checks across criteria."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self._sets: dict[str, SampledSet] = {}
        # (set name, point index) -> number of chain violations
        self.chain: dict[tuple[str, int], int] = {}

    def set(self, name: str) -> SampledSet:
        if name not in self._sets:
            self._sets[name] = build_example(name)
        return self._sets[name]

    def record_report(self, name: str, rep: ClassificationReport) -> None:
        for p in rep.points:
            self.chain[(name, p.index)] = int(p.extra["chain_violations"])

    def cones(self, name: str, index: int):
        F = self.set(name)
        x = F.meta["test_points"][index]
        c = estimate_cones(F, x, params_for(F))
        self.chain[(name, index)] = chain_violations(c)
        return c


# ------------------------------------------------------------ criterion 1

# members at 0 under the two-direction grid: "+" for +1, "-" for -1
EXPECTED_1D = {
    "factorial-sequence": {"pTan-": "", "Tan-": "", "Tan+": "+", "pTan+": "+-"},
    "half-line": {"pTan-": "+", "Tan-": "+", "Tan+": "+", "pTan+": "+-"},
    "singleton": {"pTan-": "", "Tan-": "", "Tan+": "", "pTan+": ""},
    "harmonic-sequence": {"pTan-": "", "Tan-": "+", "Tan+": "+", "pTan+": "+-"},
    "symmetric-harmonic": {"pTan-": "", "Tan-": "+-", "Tan+": "+-", "pTan+": "+-"},
    # read with the second "pTan-" of the source listing as Tan-
    "factorial-plus-harmonic": {"pTan-": "", "Tan-": "-", "Tan+": "+-", "pTan+": "+-"},
}


def _signs(cone) -> str:
    out = ""
    for v, m in zip(cone.grid.dirs[:, 0], cone.member_mask):
        if m:
            out += "+" if v > 0 else "-"
    return "".join(sorted(out))


def criterion_1(S: Session) -> CriterionResult:
    rows, ok = {}, True
    for name, expected in EXPECTED_1D.items():
        cones = S.cones(name, 0)
        got = {k: _signs(cones[k]) for k in KINDS}
        want = {k: "".join(sorted(v)) for k, v in expected.items()}
        good = got == want
        ok &= good
        rows[name] = {"got": got, "expected": want, "match": good,
                      "scores": {k: cones[k].scores.tolist() for k in KINDS}}
    return CriterionResult(1, "one-dimensional worked examples", ok,
                           f"{sum(r['match'] for r in rows.values())}/{len(rows)} sets match", rows)


# ------------------------------------------------------------ criterion 2

def criterion_2(S: Session) -> CriterionResult:
    name = "t-sin-1-over-t"
    c = S.cones(name, 0)["Tan-"]
    h, k = np.abs(c.grid.dirs[:, 0]), np.abs(c.grid.dirs[:, 1])
    inner = k <= 0.95 * h
    outer = k >= 1.05 * h
    missed = int((inner & ~c.member_mask).sum())
    extra = int((outer & c.member_mask).sum())
    ok = missed == 0 and extra == 0
    return CriterionResult(2, "double cone of t sin(1/t)", ok,
                           f"inner non-members {missed}, outer members {extra}",
                           {"inner": int(inner.sum()), "outer": int(outer.sum()),
                            "inner_non_members": missed, "outer_members": extra,
                            "members": int(c.member_mask.sum())})


# ------------------------------------------------------------ criterion 3

def criterion_3(S: Session) -> CriterionResult:
    name = "ray-plus-diagonal-sequence"
    c = S.cones(name, 0)["Tan-"]
    rays = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2)
    mem = c.members
    mesh = c.grid.mesh
    if mem.shape[0]:
        ang = np.arccos(np.clip(mem @ rays.T, -1, 1))
        stray = int((ang.min(axis=1) > mesh * (1 + 1e-9)).sum())
        covered = [bool(ang[:, j].min() <= mesh * (1 + 1e-9)) for j in range(2)]
    else:
        stray, covered = 0, [False, False]
    ok = stray == 0 and all(covered)
    return CriterionResult(3, "two diagonal rays", ok,
                           f"{mem.shape[0]} members, stray {stray}, rays covered {covered}",
                           {"members": mem.tolist(), "stray": stray, "covered": covered, "mesh": mesh})


# ------------------------------------------------------------ criterion 4

M_MAX_INTEGER = 1000


def terms_until(fn, floor: float, limit: int = 400_000) -> np.ndarray:
    out = []
    m = 1
    while m <= limit:
        t = fn(m)
        if not t > 0:
            break
        out.append(t)
        if t <= floor and m >= 8:
            break
        m += 1
    return np.asarray(out, float)


def _log_fact(m: int) -> float:
    return math.lgamma(m + 1)


# (label, term function, expected membership of +1)
SEQUENCES = [
    ("1/m^0.75", lambda m: m ** -0.75, True),
    ("1/m", lambda m: 1.0 / m, True),
    ("1/m^1.25", lambda m: m ** -1.25, True),
    ("1/m^1.5", lambda m: m ** -1.5, True),
    ("1/m^2", lambda m: m ** -2.0, True),
    ("1/(m log(m+1))", lambda m: 1.0 / (m * math.log(m + 1)), True),
    ("1/(m log(m+1)^2)", lambda m: 1.0 / (m * math.log(m + 1) ** 2), True),
    ("1/(m + sqrt m)", lambda m: 1.0 / (m + math.sqrt(m)), True),
    ("exp(-sqrt m)", lambda m: math.exp(-math.sqrt(m)), True),
    ("2/(m(m+1))", lambda m: 2.0 / (m * (m + 1)), True),
    ("1/m!", lambda m: math.exp(-_log_fact(m)), False),
    ("1/2^m", lambda m: 2.0 ** -m, False),
    ("1/3^m", lambda m: 3.0 ** -m, False),
    ("0.3^m", lambda m: 0.3 ** m, False),
    ("1/10^m", lambda m: 10.0 ** -m, False),
    ("exp(-m^2)", lambda m: math.exp(-m * m), False),
    ("1/m^m", lambda m: math.exp(-m * math.log(m)), False),
    ("1/(m 2^m)", lambda m: 2.0 ** -m / m, False),
    ("1/(2^m m!)", lambda m: math.exp(-m * math.log(2) - _log_fact(m)), False),
    ("1/(m!)^2", lambda m: math.exp(-2 * _log_fact(m)), False),
]


def criterion_4(S: Session) -> CriterionResult:
    floor = 1.0 / (8.0 * M_MAX_INTEGER)
    rows, agree = [], 0
    for label, fn, expected in SEQUENCES:
        terms = terms_until(fn, floor)
        F = sequence_set(terms, name=label)
        by_ratio = ratio_test_1d(terms)
        c = integer_scale_lower_cone(F, [0.0], m_max=M_MAX_INTEGER)
        by_scale = bool(c.member_mask[int(np.argmax(c.grid.dirs[:, 0]))])
        same = by_ratio == by_scale
        agree += same
        rows.append({"sequence": label, "terms": int(terms.size), "ratio_test": by_ratio,
                     "integer_scale": by_scale, "expected": expected, "agree": same,
                     "score": float(c.scores[int(np.argmax(c.grid.dirs[:, 0]))])})
    oracle = sum(r["ratio_test"] == r["expected"] for r in rows)
    ok = agree == len(SEQUENCES) and oracle == len(SEQUENCES)
    return CriterionResult(4, "ratio criterion vs integer blow-ups", ok,
                           f"{agree}/{len(SEQUENCES)} agree, {oracle}/{len(SEQUENCES)} match the ratio limit",
                           {"sequences": rows})


# ------------------------------------------------------------ criterion 5

def _verdict_counts(rep: ClassificationReport) -> dict:
    out: dict = {}
    for p in rep.points:
        out[p.verdict] = out.get(p.verdict, 0) + 1
    return dict(sorted(out.items()))


def criterion_5(S: Session) -> CriterionResult:
    details, ok = {}, True
    for name in ("circle", "sphere"):
        rep = four_cones_classify(S.set(name))
        S.record_report(name, rep)
        counts = _verdict_counts(rep)
        good = counts.get(PASS, 0) == len(rep.points)
        ok &= good
        details[name] = {"points": len(rep.points), "verdicts": counts,
                         "max_defect": max(p.defects["pTan+/pTan-"] for p in rep.points),
                         "defect_tol": rep.params["defect_tol"], "ok": good}
    for name in ("cusp-y3x2", "two-parabolas"):
        rep = four_cones_classify(S.set(name))
        S.record_report(name, rep)
        origin = rep.points[0]
        chk = origin.check("four-cones")
        good = origin.verdict == FAIL and -chk.margin >= 2 * chk.tol
        ok &= good
        details[name] = {"origin_verdict": origin.verdict, "margin": chk.margin, "defect_tol": chk.tol,
                         "others": [p.verdict for p in rep.points[1:]], "ok": good}
    summ = "; ".join(f"{k}: {'ok' if v['ok'] else 'FAILED'}" for k, v in details.items())
    return CriterionResult(5, "four-cones classifier separation", ok, summ, details)


# ------------------------------------------------------------ criterion 6

def criterion_6(S: Session) -> CriterionResult:
    details, ok = {}, True
    for name, d, hull_at_origin in (("concentric-spheres", None, None), ("pinched-torus", 2, 1)):
        F = S.set(name)
        d = F.ambient_dim - 1 if d is None else d
        want_dim = F.ambient_dim if hull_at_origin is None else hull_at_origin
        rep = tierno_classify(F, None, d)
        S.record_report(name, rep)
        origin, rest = rep.points[0], rep.points[1:]
        good = (origin.verdict == FAIL and origin.cone_dims["Tan+"] == want_dim
                and len(rest) == 10 and all(p.verdict == PASS for p in rest))
        ok &= good
        details[name] = {"d": d, "origin_verdict": origin.verdict, "origin_hull_dim": origin.cone_dims["Tan+"],
                         "expected_hull_dim": want_dim, "others": _verdict_counts(
                             ClassificationReport("", "", rest)), "ok": good}
    summ = "; ".join(f"{k}: origin {v['origin_verdict']} (hull dim {v['origin_hull_dim']}), others {v['others']}"
                     for k, v in details.items())
    return CriterionResult(6, "counterexamples at the origin", ok, summ, details)


# ------------------------------------------------------------ criterion 7

def random_subspace(rng: np.random.Generator, n: int, d: int) -> Subspace:
    return Subspace(np.linalg.qr(rng.standard_normal((n, d)))[0])


def criterion_7(S: Session, pairs: int = 200) -> CriterionResult:
    rng = np.random.default_rng(S.seed)
    worst_cos = worst_dist = 0.0
    for _ in range(pairs):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, min(4, n) + 1))
        V, W = random_subspace(rng, n, d), random_subspace(rng, n, d)
        B1 = np.linalg.qr(V.basis)[0]
        B2 = np.linalg.qr(W.basis)[0]
        det = abs(np.linalg.det(B1.T @ B2))
        # principal-angle oracle: product of singular values of B1^T B2
        sv = np.prod(np.linalg.svd(B1.T @ B2, compute_uv=False))
        c = math.cos(subspace_angle(V, W))
        worst_cos = max(worst_cos, abs(c - det), abs(c - sv))
        x = rng.standard_normal(n) * rng.uniform(0.1, 10)
        resid = float(np.linalg.norm(x - B1 @ (B1.T @ x)))
        worst_dist = max(worst_dist, abs(dist_to_subspace(x, V) - resid))
    ok = worst_cos <= 1e-9 and worst_dist <= 1e-9
    return CriterionResult(7, "exterior algebra vs linear algebra", ok,
                           f"max |cos - det| {worst_cos:.2e}, max dist error {worst_dist:.2e}",
                           {"pairs": pairs, "max_cos_error": worst_cos, "max_dist_error": worst_dist})


# ------------------------------------------------------------ criterion 8

def criterion_8(S: Session) -> CriterionResult:
    per_set = {}
    for name in catalog_names():
        F = S.set(name)
        for i in range(len(F.meta.get("test_points", []))):
            if (name, i) not in S.chain:
                S.cones(name, i)
        per_set[name] = {"points": len(F.meta.get("test_points", [])),
                         "violations": sum(v for (nm, _), v in S.chain.items() if nm == name)}
    total = sum(v["violations"] for v in per_set.values())
    points = sum(v["points"] for v in per_set.values())
    return CriterionResult(8, "chain of score inequalities", total == 0,
                           f"{points} points on {len(per_set)} sets, {total} violations", per_set)


# ------------------------------------------------------------ criterion 9

LIE_CASES = [("SO2", None, 1), ("SO3", None, 3), ("diag_pos", 2, 2), ("diag_pos", 3, 3),
             ("diag_pos", 4, 4), ("unipotent_upper", 3, 3)]
LIE_TOL = 0.05


def criterion_9(S: Session) -> CriterionResult:
    rows, ok = [], True
    for name, n, dim in LIE_CASES:
        G = sample_group(name, n, seed=S.seed)
        r = algebra_report(G)
        good = (r.dim == dim and r.analytic_dim == dim and r.angle is not None and r.angle <= LIE_TOL
                and r.bracket_residual <= LIE_TOL and len(r.covariance_angles) == 5
                and max(r.covariance_angles) <= LIE_TOL)
        ok &= good
        rows.append({"group": name, "n": G.n, "dim": r.dim, "analytic_dim": r.analytic_dim,
                     "angle": r.angle, "bracket_residual": r.bracket_residual,
                     "covariance_angles": r.covariance_angles, "delta": r.delta, "ok": good})
    worst = max(max([x["angle"]] + [x["bracket_residual"]] + x["covariance_angles"]) for x in rows)
    return CriterionResult(9, "Lie algebras of matrix groups", ok,
                           f"{sum(x['ok'] for x in rows)}/{len(rows)} groups ok, worst error {worst:.4f}",
                           {"groups": rows})


# ------------------------------------------------------------ criterion 10

GRAPHS = [("x**2", lambda x: 2 * x, PASS), ("sin(x)", math.cos, PASS),
          ("abs(x)", lambda x: math.copysign(1.0, x), FAIL),
          ("cbrt(x**2)", lambda x: (2.0 / 3.0) / math.copysign(abs(x) ** (1 / 3), x), FAIL)]
GRAPH_POINTS = [-0.4, -0.2, 0.1, 0.3, 0.45]


def criterion_10(S: Session) -> CriterionResult:
    rows, ok = [], True
    for expr, deriv, expected in GRAPHS:
        F = build_example("graph-of-custom-function", expr=expr, h=1e-4, test_points=[0.0] + GRAPH_POINTS)
        res = [strict_differentiability_test(F, x) for x in F.meta["test_points"]]
        errs = []
        for r, x in zip(res[1:], GRAPH_POINTS):
            errs.append(math.inf if r.differential is None
                        else float(np.linalg.norm(r.differential - deriv(x), 2)))
        good = res[0].verdict == expected and max(errs) <= 1e-2
        ok &= good
        rows.append({"expr": expr, "verdict_at_0": res[0].verdict, "expected": expected,
                     "margin_at_0": res[0].margin, "differential_errors": errs, "ok": good})
    summ = ", ".join(f"{r['expr']}: {r['verdict_at_0']}" for r in rows)
    worst = max(max(r["differential_errors"]) for r in rows)
    return CriterionResult(10, "strict differentiability of graphs", ok,
                           f"{summ}; worst differential error {worst:.2e}", {"graphs": rows})


# ------------------------------------------------------------ runner

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_all(seed: int = 0, only=None, progress=None) -> list[CriterionResult]:
    """Run the criteria in order; criterion 8 reuses the cones computed before it."""
    S = Session(seed)
    out = []
    for cid, fn in CRITERIA.items():
        if only is not None and cid not in only and cid != 8:
            continue
        if only is not None and cid == 8 and 8 not in only:
            continue
        t = time.perf_counter()
        r = fn(S)
        r.seconds = time.perf_counter() - t
        r.details = _clean(r.details)
        out.append(r)
        if progress is not None:
            progress(r)
    return out


def results_payload(results: list[CriterionResult], seed: int) -> dict:
    return {"schema_version": SCHEMA_VERSION, "seed": int(seed),
            "criteria": [r.to_dict() for r in results],
            "all_passed": all(r.passed for r in results)}


def payload_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def format_table(results: list[CriterionResult]) -> str:
    lines = [f"{'#':>2}  {'result':<6}  {'time':>7}  criterion"]
    for r in results:
        lines.append(f"{r.id:>2}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:6.1f}s  {r.name}: {r.summary}")
    return "\n".join(lines)
