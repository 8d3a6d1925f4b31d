"""Linear hulls of cone estimates and continuity of subspace-valued maps."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cones import ConeEstimate, DirectionGrid
from .errors import DimensionError
from .exterior import Subspace, dist_to_subspace, subspace_angle

SCHEMA_VERSION = "1.0"

# Surfaces sampled with a thresholded cone fill a band of half-width
# asin(tau) around the tangent plane; the resulting thickness direction
# reaches ~0.12 of the top singular value in R^3, so 0.1 is too tight.
SIGMA_TOL = 0.25


def hull_spectrum(directions: np.ndarray) -> np.ndarray:
    """Singular values of the stacked (unweighted) member directions."""
    d = np.atleast_2d(np.asarray(directions, float))
    if d.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.svd(d, compute_uv=False)


def span_of_directions(directions, ambient_dim: int, sigma_tol: float = SIGMA_TOL) -> Subspace:
    d = np.asarray(directions, float).reshape(-1, ambient_dim)
    if d.shape[0] == 0:
        return Subspace.zero(ambient_dim)
    _, s, vt = np.linalg.svd(d, full_matrices=False)
    rank = int(np.sum(s > sigma_tol * s[0]))
    return Subspace(vt[:rank].T)


def linear_hull(cone: ConeEstimate, sigma_tol: float = SIGMA_TOL) -> Subspace:
    """Span of the member directions, thresholding singular values at ``sigma_tol`` * top."""
    return span_of_directions(cone.members, cone.ambient_dim, sigma_tol)


def singular_gap(cone: ConeEstimate, sigma_tol: float = SIGMA_TOL) -> float:
    """Distance of the nearest relative singular value to the threshold (dimension margin)."""
    s = hull_spectrum(cone.members)
    if s.size == 0 or s[0] == 0:
        return 1.0
    return float(np.min(np.abs(s / s[0] - sigma_tol)))


def grid_trace(V: Subspace, grid: DirectionGrid, tol: float | None = None) -> np.ndarray:
    """Grid directions within ``tol`` (default half the mesh) of ``V``, projected into V."""
    if V.dim == 0:
        return np.empty((0, V.ambient_dim))
    tol = grid.mesh / 2 if tol is None else tol
    proj = grid.dirs @ V.basis @ V.basis.T
    nrm = np.linalg.norm(proj, axis=1)
    near = nrm >= np.cos(tol) - 1e-12
    return proj[near] / nrm[near, None]


@dataclass(frozen=True)
class VectorSpaceCheck:
    ok: bool
    margin: float
    hull_dim: int
    checked: int


def is_vector_space(cone: ConeEstimate, tol: float = 0.05, sigma_tol: float = SIGMA_TOL) -> VectorSpaceCheck:
    """Whether the cone fills its linear hull.

    Every grid direction within half a mesh step of the hull must score at
    most tau + tol. ``margin`` is the worst excess score - tau (negative when
    all pass with room to spare).
    """
    V = linear_hull(cone, sigma_tol)
    if V.dim == 0:
        return VectorSpaceCheck(True, -cone.tau, 0, 0)
    d = cone.grid.dirs
    if V.dim == V.ambient_dim:
        near = np.ones(d.shape[0], bool)
    else:
        cos = np.linalg.norm(d @ V.basis, axis=1)
        near = cos >= np.cos(cone.grid.mesh / 2) - 1e-12
        if not near.any():
            # sparse grids: fall back to the closest direction per basis vector and its negative
            idx = {int(np.argmax(d @ s * b)) for b in V.basis.T for s in (1, -1)}
            near[list(idx)] = True
    excess = float(np.max(cone.scores[near]) - cone.tau)
    return VectorSpaceCheck(excess <= tol, excess, V.dim, int(near.sum()))


# ------------------------------------------------------------------ fields

@dataclass(frozen=True, eq=False)
class SubspaceField:
    """Subspaces attached to base points, e.g. x -> hull of Tan+(F, x)."""

    points: np.ndarray
    subspaces: tuple

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, float))
        subs = tuple(self.subspaces)
        if pts.shape[0] != len(subs):
            raise ValueError("one subspace per base point required")
        if any(V.ambient_dim != pts.shape[1] for V in subs):
            raise DimensionError("subspace ambient dim differs from the base points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "subspaces", subs)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def dims(self) -> list[int]:
        return [V.dim for V in self.subspaces]

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "ambient_dim": self.ambient_dim,
                "entries": [{"point": p.tolist(), "dim": V.dim, "basis": V.basis.T.tolist()}
                            for p, V in zip(self.points, self.subspaces)]}

    @classmethod
    def from_dict(cls, d: dict) -> "SubspaceField":
        n = int(d["ambient_dim"])
        pts, subs = [], []
        for e in d["entries"]:
            pts.append(e["point"])
            rows = np.asarray(e["basis"], float).reshape(-1, n)
            subs.append(Subspace(rows.T))
        return cls(np.asarray(pts, float).reshape(-1, n), tuple(subs))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SubspaceField":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ContinuityReport:
    defect: float
    radius: float
    neighbors: int
    dim_mismatch: bool


def field_continuity(field: SubspaceField, at, radius: float) -> ContinuityReport:
    """Largest angle between the subspace at ``at`` and those at field points within ``radius``.

    ``at`` is an index into the field or a point of it. Neighbours of a
    different dimension are skipped and flagged.
    """
    if np.ndim(at) == 0:
        i = int(at)
    else:
        x = np.asarray(at, float).ravel()
        i = int(np.argmin(np.linalg.norm(field.points - x, axis=1)))
    x = field.points[i]
    V = field.subspaces[i]
    r = np.linalg.norm(field.points - x, axis=1)
    nbrs = [j for j in np.flatnonzero(r <= radius) if j != i]
    if not nbrs:
        raise ValueError("no other field point within the probe radius")
    worst, mismatch, used = 0.0, False, 0
    for j in nbrs:
        W = field.subspaces[j]
        if W.dim != V.dim:
            mismatch = True
            continue
        used += 1
        if V.dim:
            worst = max(worst, subspace_angle(W, V))
    return ContinuityReport(worst, float(radius), used, mismatch)


# ------------------------------------------------- limits of subspace sequences

def lower_limit_defect(V: Subspace, W: Subspace) -> float:
    """max over unit x in V of dist(x, W); tends to 0 iff V is inside the lower limit."""
    if V.dim == 0:
        return 0.0
    return float(max(dist_to_subspace(b, W) for b in _sphere_probe(V)))


def upper_limit_defect(V: Subspace, W: Subspace) -> float:
    """max over unit x in W of dist(x, V); tends to 0 iff the upper limit sits inside V."""
    return lower_limit_defect(W, V)


def _sphere_probe(V: Subspace) -> np.ndarray:
    # worst case of a linear map restricted to the unit sphere of V is attained
    # at a right singular vector, so probing those is exact
    return V.basis.T


def sequence_limit_verdicts(V: Subspace, seq, tol: float = 1e-6) -> tuple[bool, bool]:
    """(angle criterion, containment criterion) for V_m -> V, judged on the last term.

    For equal dimensions ang(V_m, V) -> 0 iff V is in the lower limit iff the
    upper limit is in V; both are evaluated independently here.
    """
    last = seq[-1]
    by_angle = subspace_angle(last, V) <= tol
    ls = np.linalg.norm(last.basis - V.project(last.basis), axis=0).max() if last.dim else 0.0
    li = lower_limit_defect(V, last)
    by_containment = max(ls, li) <= np.sin(tol) + 1e-15
    return bool(by_angle), bool(by_containment)
