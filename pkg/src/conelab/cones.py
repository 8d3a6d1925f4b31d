"""Multiscale estimates of the lower/upper tangent and paratangent cones.

Every estimator scores a unit direction v by the blow-up quotient

    q(y, lam, v) = dist(y + lam * v, F) / lam

over a geometric ladder of scales lam_k and, for the paratangent cones, over
base points y in F within rho_k of x. Limits become max (lower cones: small at
every scale / base point) or min (upper cones: small at some scale / base
point). The base point x itself is always among the y's, so per direction

    score[pTan-] >= score[Tan-] >= score[Tan+] >= score[pTan+]

holds exactly, and so do the member-set inclusions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientDataError, ScaleError
from .setmodel import SampledSet, nearest_in_tree, spread_subsample

SCHEMA_VERSION = "1.0"

C_FLOOR = 8.0
DEFAULT_TAU = 0.15

LOWER_PARATANGENT = "pTan-"
LOWER_TANGENT = "Tan-"
UPPER_TANGENT = "Tan+"
UPPER_PARATANGENT = "pTan+"
KINDS = (LOWER_PARATANGENT, LOWER_TANGENT, UPPER_TANGENT, UPPER_PARATANGENT)

_KIND_ALIASES = {
    "ptan-": LOWER_PARATANGENT, "lower-paratangent": LOWER_PARATANGENT, "clarke": LOWER_PARATANGENT,
    "tan-": LOWER_TANGENT, "lower-tangent": LOWER_TANGENT, "adjacent": LOWER_TANGENT,
    "tan+": UPPER_TANGENT, "upper-tangent": UPPER_TANGENT, "contingent": UPPER_TANGENT,
    "ptan+": UPPER_PARATANGENT, "upper-paratangent": UPPER_PARATANGENT, "paratingent": UPPER_PARATANGENT,
}


def parse_kind(name: str) -> str:
    try:
        return _KIND_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown cone kind {name!r}; expected one of {KINDS}") from None


# ----------------------------------------------------------------- scale ladder

@dataclass(frozen=True)
class ScaleLadder:
    """Scales lam_k = lam0 * ratio**k and base radii rho_k = rho0 * sqrt(lam_k / lam0).

    ``rho0`` defaults to ``lam0``; the base radii then shrink like
    sqrt(lam0 * lam_k), i.e. strictly slower than the scales.
    """

    lam0: float
    ratio: float = 0.5
    count: int = 10
    rho0: float | None = None

    def __post_init__(self):
        if not self.lam0 > 0:
            raise ValueError("lam0 must be positive")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 2:
            raise ValueError("a ladder needs at least two scales")
        if self.rho0 is not None and self.rho0 < self.lam0:
            raise ScaleError(f"rho0={self.rho0} below lam0={self.lam0}: base radii must dominate scales")

    @property
    def scales(self) -> np.ndarray:
        return self.lam0 * self.ratio ** np.arange(self.count)

    @property
    def base_radii(self) -> np.ndarray:
        rho0 = self.lam0 if self.rho0 is None else self.rho0
        return rho0 * np.sqrt(self.scales / self.lam0)

    @property
    def lam_min(self) -> float:
        return float(self.scales[-1])

    def check(self, delta: float, c_floor: float = C_FLOOR) -> None:
        if self.lam_min < c_floor * delta * (1 - 1e-12):
            raise ScaleError(
                f"finest scale {self.lam_min:.3g} < {c_floor:g} * delta = {c_floor * delta:.3g}")

    def scaled(self, s: float) -> "ScaleLadder":
        return ScaleLadder(self.lam0 * s, self.ratio, self.count,
                           None if self.rho0 is None else self.rho0 * s)

    @classmethod
    def fitted(cls, delta: float, lam0: float, ratio: float = 0.5, count: int = 10,
               rho0: float | None = None, c_floor: float = C_FLOOR) -> "ScaleLadder":
        """Ladder with at most ``count`` scales, truncated to respect the resolution floor."""
        if lam0 < c_floor * delta:
            raise ScaleError(f"lam0={lam0:.3g} is below the resolution floor {c_floor * delta:.3g}")
        k = 1 + int(math.floor(math.log(lam0 / (c_floor * delta)) / math.log(1 / ratio) + 1e-9))
        return cls(lam0, ratio, max(2, min(count, k)), rho0)

    def to_dict(self) -> dict:
        return {"lam0": self.lam0, "ratio": self.ratio, "count": self.count,
                "rho0": self.lam0 if self.rho0 is None else self.rho0,
                "scales": self.scales.tolist(), "base_radii": self.base_radii.tolist()}


# --------------------------------------------------------------- direction grid

def _max_nn_angle(dirs: np.ndarray) -> float:
    if dirs.shape[0] < 2:
        return math.pi
    d, _ = cKDTree(dirs).query(dirs, k=2)
    chord = float(np.max(d[:, 1]))
    return 2.0 * math.asin(min(1.0, chord / 2.0))


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Unit directions on which cones are sampled.

    ``mesh`` is the largest angle from a grid direction to its nearest
    neighbour; 0 for the exact two-direction grid of the real line.
    """

    dirs: np.ndarray
    scheme: str
    mesh: float

    def __post_init__(self):
        d = np.asarray(self.dirs, dtype=float)
        d = d / np.linalg.norm(d, axis=1, keepdims=True)
        d.setflags(write=False)
        object.__setattr__(self, "dirs", d)

    @property
    def ambient_dim(self) -> int:
        return self.dirs.shape[1]

    def __len__(self) -> int:
        return self.dirs.shape[0]

    @classmethod
    def signs_1d(cls) -> "DirectionGrid":
        return cls(np.array([[1.0], [-1.0]]), "signs-1d", 0.0)

    @classmethod
    def angular_2d(cls, count: int = 720) -> "DirectionGrid":
        t = 2 * np.pi * np.arange(count) / count
        return cls(np.column_stack([np.cos(t), np.sin(t)]), "angular-2d", 2 * np.pi / count)

    @classmethod
    def fibonacci_3d(cls, count: int = 2000) -> "DirectionGrid":
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        r = np.sqrt(1 - z * z)
        phi = np.pi * (1 + 5 ** 0.5) * i
        dirs = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
        return cls(dirs, "fibonacci-3d", _max_nn_angle(dirs))

    @classmethod
    def random_nd(cls, n: int, count: int | None = None, seed: int = 0) -> "DirectionGrid":
        count = 50 * n * n if count is None else count
        g = np.random.default_rng(seed).standard_normal((count, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return cls(g, "random-quasi-uniform-nd", _max_nn_angle(g))

    @classmethod
    def default(cls, n: int, seed: int = 0) -> "DirectionGrid":
        if n == 1:
            return cls.signs_1d()
        if n == 2:
            return cls.angular_2d()
        if n == 3:
            return cls.fibonacci_3d()
        return cls.random_nd(n, seed=seed)

    @cached_property
    def antipodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Index of the grid direction nearest to -v for each v, and the chord |w + v| to it."""
        d, i = cKDTree(self.dirs).query(-self.dirs, k=1)
        return i, d

    def augmented(self, extra, symmetric: bool = True) -> "DirectionGrid":
        """Grid plus extra directions (e.g. secants to nearby samples), optionally with negatives."""
        e = np.asarray(extra, dtype=float).reshape(-1, self.ambient_dim)
        nrm = np.linalg.norm(e, axis=1)
        e = e[nrm > 0] / nrm[nrm > 0, None]
        if symmetric:
            e = np.vstack([e, -e])
        return DirectionGrid(np.vstack([self.dirs, e]), self.scheme + "+secant", self.mesh)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "count": len(self), "mesh": self.mesh}


# ---------------------------------------------------------------- cone estimate

@dataclass(frozen=True, eq=False)
class ConeEstimate:
    base_point: np.ndarray
    kind: str
    scores: np.ndarray
    tau: float
    grid: DirectionGrid
    ladder: dict = field(default_factory=dict)

    @property
    def member_mask(self) -> np.ndarray:
        return self.scores <= self.tau

    @property
    def members(self) -> np.ndarray:
        return self.grid.dirs[self.member_mask]

    @property
    def ambient_dim(self) -> int:
        return self.grid.ambient_dim

    def rethreshold(self, tau: float) -> "ConeEstimate":
        return ConeEstimate(self.base_point, self.kind, self.scores, tau, self.grid, self.ladder)

    def score_of(self, v) -> float:
        """Score of the grid direction closest to ``v``."""
        v = np.asarray(v, float).ravel()
        return float(self.scores[int(np.argmax(self.grid.dirs @ (v / np.linalg.norm(v))))])

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "base_point": np.asarray(self.base_point, float).ravel().tolist(),
            "kind": self.kind,
            "tau": self.tau,
            "ladder": self.ladder,
            "grid": self.grid.to_dict(),
            "directions": [{"v": v.tolist(), "score": float(s)}
                           for v, s in zip(self.grid.dirs, self.scores)],
        }


@dataclass(frozen=True)
class ConeParams:
    """Everything a cone estimate depends on besides the set and the base point."""

    lam0: float | None = None
    ratio: float = 0.5
    count: int = 10
    rho0: float | None = None
    tau: float = DEFAULT_TAU
    c_floor: float = C_FLOOR
    max_base_points: int | None = None
    grid_count: int | None = None
    seed: int = 0

    def ladder_for(self, F: SampledSet) -> ScaleLadder:
        """Explicit ``lam0`` gives an exact ladder (checked); otherwise one fitted to F."""
        if self.lam0 is not None:
            ladder = ScaleLadder(self.lam0, self.ratio, self.count, self.rho0)
            ladder.check(F.delta, self.c_floor)
            return ladder
        return ScaleLadder.fitted(F.delta, 0.1 * F.roi_radius, self.ratio, self.count,
                                  self.rho0, self.c_floor)

    def grid_for(self, n: int) -> DirectionGrid:
        return _cached_grid(n, self.grid_count, self.seed)

    def base_cap(self, n: int) -> int:
        if self.max_base_points is not None:
            return self.max_base_points
        return default_base_cap(n)

    def replace(self, **kw) -> "ConeParams":
        d = dict(self.__dict__)
        d.update(kw)
        return ConeParams(**d)


def default_base_cap(n: int) -> int:
    """Base points per scale besides x: dense in 1-D, fewer as the direction grid grows."""
    return {1: 4096, 2: 64}.get(n, 16)


_GRID_CACHE: dict = {}


def _cached_grid(n: int, count: int | None, seed: int) -> DirectionGrid:
    key = (n, count, seed)
    if key not in _GRID_CACHE:
        if count is None:
            g = DirectionGrid.default(n, seed)
        elif n == 2:
            g = DirectionGrid.angular_2d(count)
        elif n == 3:
            g = DirectionGrid.fibonacci_3d(count)
        elif n == 1:
            g = DirectionGrid.signs_1d()
        else:
            g = DirectionGrid.random_nd(n, count, seed)
        _GRID_CACHE[key] = g
    return _GRID_CACHE[key]


def params_for(F: SampledSet, **overrides) -> ConeParams:
    """Recommended parameters stored with catalog sets, then explicit overrides."""
    base = dict(F.meta.get("params", {}))
    base = {k: v for k, v in base.items() if k in ConeParams.__dataclass_fields__}
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ConeParams(**base)


# ----------------------------------------------------------------------- scoring

def base_points(F: SampledSet, x, radii, cap: int) -> list[np.ndarray]:
    """Per-scale base points: x first, then up to ``cap`` spread-out samples within rho_k."""
    x = np.asarray(x, dtype=float).ravel()
    out = []
    for rho in radii:
        idx = F.tree.query_ball_point(x, float(rho) * (1 + 1e-12))
        pts = F.points[np.asarray(idx, dtype=np.intp)] if idx else np.empty((0, F.ambient_dim))
        if pts.shape[0]:
            pts = pts[np.any(pts != x, axis=1)]
            pts = spread_subsample(pts, cap, x)
        out.append(np.vstack([x[None, :], pts]))
    return out


def quotient_table(F: SampledSet, x, dirs: np.ndarray, scales, radii=None,
                   cap: int = 64, grid: DirectionGrid | None = None):
    """Blow-up quotients per scale: entry k has shape (bases_k, n_dirs), row 0 for y = x.

    Without ``radii`` only y = x is used (tangent cones) and the witness is
    None. With radii, the second value bounds the pTan+ score per direction
    from mirrored pairs: if base y and direction v meet their nearest sample
    p at distance d, and p lies within rho_k of x, then base p and direction
    -v meet y at the same distance, so score(w) <= d / lam + |w + v| for the
    grid direction w nearest -v. This keeps the subsampled upper paratangent
    estimate (nearly) bilateral without scoring every sample.
    """
    x = np.asarray(x, dtype=float).ravel()
    dirs = np.asarray(dirs, dtype=float).reshape(-1, F.ambient_dim)
    if radii is not None:
        bases = base_points(F, x, radii, cap)
    else:
        bases = [x[None, :]] * len(scales)
    # every base point but x is a sample, so dist(y + lam v, F) <= lam + dist(x, F)
    d0 = F.dist_many(x[None, :])[0]
    reach = max(np.max([np.max(np.linalg.norm(Y - x, axis=1)) for Y in bases]), 0.0)
    tree, pts = _local_tree(F, x, reach + 2 * float(np.max(scales)) + d0)
    nd = dirs.shape[0]
    witness = None
    if radii is not None:
        witness = np.full(nd, np.inf)
        if grid is not None and grid.dirs.shape == dirs.shape:
            anti, chord = grid.antipodes
        else:
            anti, chord = DirectionGrid(dirs, "adhoc", 0.0).antipodes
    table = []
    for k, (lam, Y) in enumerate(zip(scales, bases)):
        q = (Y[:, None, :] + lam * dirs[None, :, :]).reshape(-1, F.ambient_dim)
        d, idx = nearest_in_tree(tree, q, lam + d0)
        table.append(d.reshape(Y.shape[0], -1) / lam)
        if witness is not None:
            inside = np.linalg.norm(pts[idx] - x, axis=1) <= radii[k] * (1 + 1e-12)
            j = np.flatnonzero(inside) % nd
            np.minimum.at(witness, anti[j], d[inside] / lam + chord[j])
    return table, witness


def _local_tree(F: SampledSet, x: np.ndarray, radius: float) -> tuple[cKDTree, np.ndarray]:
    """KD-tree over the samples within ``radius`` of x when that is a small part of F, else F's own.

    Every query point lies within radius - (lam + d0) of x and has a sample
    within lam + d0 of itself, so nearest distances are unchanged.
    """
    idx = F.tree.query_ball_point(x, radius * (1 + 1e-9))
    if len(idx) * 4 > len(F):
        return F.tree, F.points
    pts = F.points[np.asarray(idx, dtype=np.intp)]
    return cKDTree(pts), pts


def reduce_table(table: list[np.ndarray], witness: np.ndarray | None = None) -> dict[str, np.ndarray]:
    at_x = np.vstack([t[0] for t in table])
    upper_para = np.min(np.vstack([t.min(axis=0) for t in table]), axis=0)
    if witness is not None:
        upper_para = np.minimum(upper_para, witness)
    return {
        LOWER_PARATANGENT: np.max(np.vstack([t.max(axis=0) for t in table]), axis=0),
        LOWER_TANGENT: at_x.max(axis=0),
        UPPER_TANGENT: at_x.min(axis=0),
        UPPER_PARATANGENT: upper_para,
    }


def _check_base(F: SampledSet, x, ladder: ScaleLadder, c_floor: float):
    ladder.check(F.delta, c_floor)
    x = np.asarray(x, float).ravel()
    if x.shape[0] != F.ambient_dim:
        from .errors import DimensionError
        raise DimensionError(f"base point in R^{x.shape[0]}, set in R^{F.ambient_dim}")
    return x


def _unit(v, n: int) -> np.ndarray:
    v = np.asarray(v, float).reshape(1, n)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("direction must be non-zero")
    return v / nv


def _single(F, x, v, ladder, kind, base_radii=None, cap=None, c_floor=C_FLOOR) -> float:
    x = _check_base(F, x, ladder, c_floor)
    radii = None
    if kind in (LOWER_PARATANGENT, UPPER_PARATANGENT):
        radii = ladder.base_radii if base_radii is None else np.asarray(base_radii, float)
        if radii.shape != (ladder.count,) or np.any(radii < ladder.scales * (1 - 1e-12)):
            raise ScaleError("base radii must match the ladder and dominate the scales")
        if np.any(np.diff(radii) > 0):
            raise ScaleError("base radii must be non-increasing")
    cap = cap if cap is not None else default_base_cap(F.ambient_dim)
    table, witness = quotient_table(F, x, _unit(v, F.ambient_dim), ladder.scales, radii, cap)
    return float(reduce_table(table, witness)[kind][0])


def score_upper_tangent(F: SampledSet, x, v, ladder: ScaleLadder) -> float:
    """min_k dist(x + lam_k v, F) / lam_k."""
    return _single(F, x, v, ladder, UPPER_TANGENT)


def score_lower_tangent(F: SampledSet, x, v, ladder: ScaleLadder) -> float:
    """max_k dist(x + lam_k v, F) / lam_k."""
    return _single(F, x, v, ladder, LOWER_TANGENT)


def score_upper_paratangent(F: SampledSet, x, v, ladder: ScaleLadder, base_radii=None,
                            max_base_points: int | None = None) -> float:
    return _single(F, x, v, ladder, UPPER_PARATANGENT, base_radii, max_base_points)


def score_lower_paratangent(F: SampledSet, x, v, ladder: ScaleLadder, base_radii=None,
                            max_base_points: int | None = None) -> float:
    return _single(F, x, v, ladder, LOWER_PARATANGENT, base_radii, max_base_points)


def estimate_cones(F: SampledSet, x, params: ConeParams | None = None,
                   grid: DirectionGrid | None = None, kinds=KINDS) -> dict[str, ConeEstimate]:
    """All requested cones at ``x`` from one shared quotient table."""
    params = params_for(F) if params is None else params
    ladder = params.ladder_for(F)
    x = _check_base(F, x, ladder, params.c_floor)
    grid = params.grid_for(F.ambient_dim) if grid is None else grid
    para = any(k in (LOWER_PARATANGENT, UPPER_PARATANGENT) for k in kinds)
    table, witness = quotient_table(F, x, grid.dirs, ladder.scales, ladder.base_radii if para else None,
                                    params.base_cap(F.ambient_dim), grid)
    red = reduce_table(table, witness)
    lad = ladder.to_dict()
    return {k: ConeEstimate(x.copy(), k, red[k], params.tau, grid, lad) for k in kinds}


def chain_violations(cones: dict[str, ConeEstimate]) -> int:
    """Directions where pTan- >= Tan- >= Tan+ >= pTan+ fails for the scores (0 by construction)."""
    s = [cones[k].scores for k in KINDS]
    ok = (s[0] >= s[1]) & (s[1] >= s[2]) & (s[2] >= s[3])
    return int((~ok).sum())


def estimate_cone(F: SampledSet, x, kind: str, ladder: ScaleLadder | None = None,
                  grid: DirectionGrid | None = None, tau: float | None = None,
                  params: ConeParams | None = None) -> ConeEstimate:
    kind = parse_kind(kind)
    params = params_for(F) if params is None else params
    if ladder is not None:
        params = params.replace(lam0=ladder.lam0, ratio=ladder.ratio, count=ladder.count, rho0=ladder.rho0)
    if tau is not None:
        params = params.replace(tau=tau)
    return estimate_cones(F, x, params, grid, kinds=(kind,))[kind]


# ------------------------------------------------------------- integer scales

def default_integer_window(m_max: int) -> tuple[int, int]:
    return max(2, int(math.ceil(m_max / 10))), m_max


def integer_scale_lower_cone(F: SampledSet, x, m_max: int = 1000, grid: DirectionGrid | None = None,
                             tau: float = DEFAULT_TAU, m_lo: int | None = None,
                             c_floor: float = C_FLOOR) -> ConeEstimate:
    """Lower tangent cone through integer blow-ups: max over m of m * dist(x + v/m, F)."""
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    lo, hi = default_integer_window(m_max)
    lo = lo if m_lo is None else m_lo
    if not 1 <= lo <= hi:
        raise ValueError("empty integer window")
    if 1.0 / hi < c_floor * F.delta:
        raise ScaleError(f"1/m_max = {1 / hi:.3g} below the resolution floor {c_floor * F.delta:.3g}")
    x = np.asarray(x, float).ravel()
    grid = DirectionGrid.default(F.ambient_dim) if grid is None else grid
    m = np.arange(lo, hi + 1, dtype=float)
    q = x[None, None, :] + grid.dirs[None, :, :] / m[:, None, None]
    d = F.dist_many(q.reshape(-1, F.ambient_dim)).reshape(m.size, -1) * m[:, None]
    return ConeEstimate(x, LOWER_TANGENT, d.max(axis=0), tau, grid,
                        {"integer_window": [lo, hi]})


def ratio_test_1d(terms, tau: float = DEFAULT_TAU, tail: float = 0.5) -> bool:
    """Whether x_{m+1}/x_m -> 1 for a decreasing positive sequence.

    Judged on the last ``tail`` fraction of the terms: every consecutive ratio
    r must satisfy (1 - r) / (1 + r) <= tau, i.e. r >= (1 - tau) / (1 + tau).
    That quotient is the relative distance from the midpoint of two
    consecutive terms to the set, so ``tau`` matches the cone threshold.
    """
    x = np.asarray(terms, dtype=float).ravel()
    if x.size < 4:
        raise InsufficientDataError("ratio test needs at least 4 terms")
    if np.any(x <= 0) or np.any(np.diff(x) >= 0):
        raise ValueError("terms must be positive and strictly decreasing")
    start = min(int(x.size * (1 - tail)), x.size - 3)
    t = x[start:]
    r = t[1:] / t[:-1]
    return bool(np.all((1 - r) / (1 + r) <= tau))
