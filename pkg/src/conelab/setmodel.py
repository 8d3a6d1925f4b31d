"""Finite samples of subsets F of R^n with exact nearest-distance queries.

A :class:`SampledSet` carries the declared resolution ``delta``: every point
of the intended set inside the region of interest lies within ``delta`` of
some sample. Cone estimators use it to refuse scales they cannot resolve.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionError, EmptySetError

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True, eq=False)
class SampledSet:
    points: np.ndarray
    delta: float
    generator_id: str | None = None
    roi_center: np.ndarray | None = None
    roi_radius: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise EmptySetError("a sampled set needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite sample coordinates")
        if not self.delta > 0:
            raise ValueError(f"resolution must be positive, got {self.delta}")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        c = np.zeros(pts.shape[1]) if self.roi_center is None else np.asarray(self.roi_center, float).ravel()
        if c.shape[0] != pts.shape[1]:
            raise DimensionError("region-of-interest center has the wrong dimension")
        object.__setattr__(self, "roi_center", c)
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "roi_radius", float(self.roi_radius))

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.points, balanced_tree=False, compact_nodes=False)

    def _as_queries(self, x) -> np.ndarray:
        q = np.asarray(x, dtype=float)
        if q.ndim == 0:
            q = q.reshape(1, 1)
        elif q.ndim == 1:
            q = q.reshape(1, -1) if self.ambient_dim > 1 or q.shape[0] == 1 else q.reshape(-1, 1)
        if q.shape[-1] != self.ambient_dim:
            raise DimensionError(f"query in R^{q.shape[-1]}, set in R^{self.ambient_dim}")
        return q

    def dist_many(self, queries, bound: float | None = None, return_index: bool = False):
        """Distances from each row of ``queries`` to the nearest sample.

        ``bound`` is a promise that every distance is at most ``bound``; it
        only prunes the tree search. Queries it misses are redone unbounded,
        so an under-estimate costs time but not correctness. With
        ``return_index`` the indices of the nearest samples come back too.
        """
        q = np.asarray(queries, dtype=float).reshape(-1, self.ambient_dim)
        d, i = nearest_in_tree(self.tree, q, bound)
        return (d, i) if return_index else d

    def nearest(self, x) -> tuple[float, np.ndarray]:
        q = self._as_queries(x)[0]
        d, i = self.tree.query(q, k=1)
        return float(d), self.points[i]

    def with_meta(self, **kw) -> "SampledSet":
        meta = dict(self.meta)
        meta.update(kw)
        return SampledSet(self.points, self.delta, self.generator_id, self.roi_center,
                          self.roi_radius, meta)

    def transformed(self, rotation=None, translation=None, scale: float = 1.0) -> "SampledSet":
        """Image of the set under x -> scale * R x + t; delta, ROI, test points and scales follow along."""
        n = self.ambient_dim
        R = np.eye(n) if rotation is None else np.asarray(rotation, float)
        t = np.zeros(n) if translation is None else np.asarray(translation, float)
        pts = scale * self.points @ R.T + t
        meta = dict(self.meta)
        if "params" in meta:
            prm = dict(meta["params"])
            for key in ("lam0", "rho0"):
                if prm.get(key) is not None:
                    prm[key] = prm[key] * scale
            meta["params"] = prm
        if "test_points" in meta:
            meta["test_points"] = (scale * np.asarray(meta["test_points"], float) @ R.T + t).tolist()
        if "patches" in meta:
            meta["patches"] = [((scale * R @ np.asarray(c, float) + t).tolist(), scale * r)
                               for c, r in meta["patches"]]
        return SampledSet(pts, scale * self.delta, self.generator_id,
                          scale * R @ self.roi_center + t, scale * self.roi_radius, meta)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "dim": self.ambient_dim,
                             "delta": self.delta, "points": self.points.tolist()}
        if self.generator_id:
            d["generator_id"] = self.generator_id
        d["region_of_interest"] = {"center": self.roi_center.tolist(), "radius": self.roi_radius}
        if "matrix_shape" in self.meta:
            d["matrix_shape"] = list(self.meta["matrix_shape"])
        return d


def nearest_in_tree(tree: cKDTree, q: np.ndarray, bound: float | None = None):
    """(distance, index) of the nearest tree point per query row, pruned by ``bound`` when given."""
    if bound is None:
        return tree.query(q, k=1)
    d, i = tree.query(q, k=1, distance_upper_bound=bound * (1 + 1e-9) + 1e-300)
    miss = ~np.isfinite(d)
    if miss.any():
        d[miss], i[miss] = tree.query(q[miss], k=1)
    return d, i


def dist_query(F: SampledSet, x) -> float:
    """dist(x, F) = min over samples p of ||x - p||."""
    q = F._as_queries(x)
    return float(F.dist_many(q)[0])


def neighbors_within(F: SampledSet, x, rho: float) -> np.ndarray:
    """All samples p with ||p - x|| <= rho, sorted by distance to x."""
    if rho < 0:
        raise ValueError("radius must be non-negative")
    q = F._as_queries(x)[0]
    idx = F.tree.query_ball_point(q, rho * (1 + 1e-12))
    if not idx:
        return np.empty((0, F.ambient_dim))
    pts = F.points[np.asarray(idx)]
    order = np.argsort(np.linalg.norm(pts - q, axis=1), kind="stable")
    return pts[order]


def farthest_point_subsample(points: np.ndarray, k: int, start: np.ndarray | None = None) -> np.ndarray:
    """Greedy farthest-point subsample of at most ``k`` rows, deterministic.

    Seeded at ``start`` (not included in the output) so the picks spread away
    from it first.
    """
    m = points.shape[0]
    if m <= k:
        return points
    if start is None:
        start = points[0]
    dmin = np.linalg.norm(points - start, axis=1)
    chosen = np.empty(k, dtype=np.intp)
    for j in range(k):
        i = int(np.argmax(dmin))
        chosen[j] = i
        dmin = np.minimum(dmin, np.linalg.norm(points - points[i], axis=1))
    return points[np.sort(chosen)]


def spread_subsample(points: np.ndarray, k: int, center: np.ndarray) -> np.ndarray:
    """At most ``k`` rows that cover both the dense core and the extent of ``points``.

    Half the budget goes to rank quantiles of the distance to ``center`` (so
    accumulation points keep their share), half to one sample per occupied
    voxel. In two or more dimensions the union is thinned by farthest-point
    sampling. Deterministic, O(m log m).
    """
    m, n = points.shape
    if m <= k:
        return points
    r = np.linalg.norm(points - center, axis=1)
    order = np.argsort(r, kind="stable")
    pre = 4 * k if n > 1 else k
    ranks = order[np.unique(np.linspace(0, m - 1, pre // 2).round().astype(np.intp))]
    extent = float(r[order[-1]]) or 1.0
    cells_per_axis = max(1, int(round((pre / 2) ** (1.0 / n) / 2)))
    cell = extent / cells_per_axis
    keys = np.floor((points - center) / cell).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    idx = np.union1d(ranks, first)
    sub = points[idx]
    if sub.shape[0] > k:
        if n == 1:
            sub = sub[np.unique(np.linspace(0, sub.shape[0] - 1, k).round().astype(np.intp))]
        else:
            sub = farthest_point_subsample(sub, k, start=center)
    return sub


# --------------------------------------------------------------------------- I/O

def load_csv(path, delta: float, **kw) -> SampledSet:
    """One point per row, comma-separated coordinates; '#' lines are comments."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise EmptySetError(f"{path}: no points")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows have differing dimensions")
    return SampledSet(np.array(rows), delta, generator_id=kw.pop("generator_id", Path(path).name), **kw)


def load_json(path_or_obj) -> SampledSet:
    """Read ``{"dim": n, "delta": d, "points": [[...], ...]}``."""
    if isinstance(path_or_obj, dict):
        d = path_or_obj
    else:
        with open(path_or_obj) as fh:
            d = json.load(fh)
    for key in ("dim", "delta", "points"):
        if key not in d:
            raise ValueError(f"point-cloud JSON lacks '{key}'")
    pts = np.asarray(d["points"], dtype=float).reshape(-1, int(d["dim"]))
    roi = d.get("region_of_interest") or {}
    meta = {}
    if "matrix_shape" in d:
        meta["matrix_shape"] = tuple(d["matrix_shape"])
    return SampledSet(pts, float(d["delta"]), d.get("generator_id"), roi.get("center"),
                      roi.get("radius", 1.0), meta)


def save_json(F: SampledSet, path) -> None:
    Path(path).write_text(json.dumps(F.to_dict(), sort_keys=True))


