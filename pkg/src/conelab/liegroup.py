"""Lie algebras of sampled matrix groups as upper tangent cones at the identity.

Matrices are flattened row-major into R^{n^2} with the Frobenius inner
product, so the cone machinery applies unchanged.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .cones import ConeParams, DirectionGrid, estimate_cones
from .errors import CatalogError
from .exterior import Subspace, dist_to_subspace, subspace_angle
from .setmodel import SampledSet
from .subspaces import linear_hull

GROUPS = ("SO2", "SO3", "diag_pos", "unipotent_upper", "custom")


def _unit(n: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


def analytic_algebra(name: str, n: int | None = None) -> list[np.ndarray]:
    """Generator basis of the Lie algebra of a catalog group."""
    if name == "SO2":
        return [np.array([[0.0, -1.0], [1.0, 0.0]])]
    if name == "SO3":
        return [_unit(3, i, j) - _unit(3, j, i) for i, j in ((1, 2), (0, 2), (0, 1))]
    if name == "diag_pos":
        n = 2 if n is None else n
        return [_unit(n, i, i) for i in range(n)]
    if name == "unipotent_upper":
        n = 3 if n is None else n
        return [_unit(n, i, j) for i in range(n) for j in range(i + 1, n)]
    raise CatalogError(f"unknown group {name!r}; expected one of {GROUPS}")


def algebra_subspace(generators) -> Subspace:
    g = [np.asarray(m, float) for m in generators]
    return Subspace.span(np.array([m.ravel() for m in g]), g[0].size)


def _sphere_directions(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Frame directions +-e_i plus random rotations of the frame, as unit vectors in R^d."""
    frame = np.vstack([np.eye(d), -np.eye(d)])
    if d == 1:
        return frame
    if d == 2:
        t = 2 * np.pi * np.arange(max(count, 4)) / max(count, 4)
        return np.vstack([frame, np.column_stack([np.cos(t), np.sin(t)])])
    out = [frame]
    while sum(len(o) for o in out) < count:
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        q = q * np.sign(np.diag(r))
        out.append(np.vstack([q, -q]))
    return np.vstack(out)[:max(count, 2 * d)]


def covering_angle(dirs: np.ndarray, probes: int = 4000, seed: int = 1) -> float:
    """Largest angle from a probe direction to the set (exact for d <= 2, estimated above)."""
    d = dirs.shape[1]
    if d == 1:
        return 0.0
    if d == 2:
        a = np.sort(np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * np.pi))
        gaps = np.diff(np.concatenate([a, [a[0] + 2 * np.pi]]))
        return float(gaps.max() / 2)
    g = np.random.default_rng(seed).standard_normal((probes, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    c = np.clip((g @ dirs.T).max(axis=1), -1, 1)
    return float(np.arccos(c).max())


@dataclass(frozen=True, eq=False)
class MatrixGroupSample:
    """Rays A exp(t xi) around a few centers A (the identity first), flattened to R^{n^2}."""

    name: str
    n: int
    generators: tuple
    centers: np.ndarray
    radii: np.ndarray
    shell_delta: np.ndarray
    points: SampledSet
    ray_dirs: np.ndarray = field(repr=False)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.n).ravel()

    @property
    def delta(self) -> float:
        return self.points.delta

    def elements(self) -> np.ndarray:
        return self.points.points.reshape(-1, self.n, self.n)


DELTA_TARGET = 1e-3


def _shell_delta(radii, theta: float, steps: int) -> np.ndarray:
    r = np.asarray(radii, float)
    lower = np.concatenate([r[1:], [0.0]])
    return r * theta + (r - lower) / steps / 2


def sample_group(name: str, n: int | None = None, radii=None, budget: int = 300, centers: int = 5,
                 seed: int = 0, generators=None, steps_per_shell: int = 6,
                 center_scale: float = 0.4, extra_centers=None) -> MatrixGroupSample:
    """Sample a matrix group near E and near ``centers`` random elements.

    Shell k holds exp(t xi) for t in (r_{k+1}, r_k] at ``steps_per_shell``
    equally spaced values, for ``budget`` unit algebra directions xi (the
    generator frame and random rotations of it). A group element exp(t xi')
    of shell k lies within delta_k = r_k * theta + h_k / 2 of a sample, with
    theta the covering angle of the directions and h_k the step in t (up to
    O(r_k^2) terms). The set's delta is that of the finest shell.
    ``extra_centers`` are further group elements (n x n) to sample around,
    appended after the random ones.
    """
    if name == "custom":
        if generators is None:
            raise ValueError("custom groups need generators")
        gens = [np.asarray(g, float) for g in generators]
    else:
        gens = analytic_algebra(name, n)
    n = gens[0].shape[0]
    rng = np.random.default_rng(seed)
    basis = np.array([g.ravel() for g in gens])
    q, _ = np.linalg.qr(basis.T)
    d = q.shape[1]
    coef = _sphere_directions(d, budget, rng)
    xis = coef @ q.T
    xis /= np.linalg.norm(xis, axis=1, keepdims=True)
    theta = covering_angle(coef)
    if radii is None:
        # halve until the finest shell is certified at DELTA_TARGET
        radii = [0.04]
        while _shell_delta(radii, theta, steps_per_shell)[-1] > DELTA_TARGET and len(radii) < 12:
            radii.append(radii[-1] / 2)
    radii = np.asarray(radii, float)
    if np.any(np.diff(radii) >= 0):
        raise ValueError("radius ladder must be strictly decreasing")
    bounds = np.concatenate([radii, [0.0]])
    ts = np.concatenate([np.linspace(bounds[k + 1], bounds[k], steps_per_shell + 1)[1:]
                         for k in range(len(radii))])
    shell_delta = _shell_delta(radii, theta, steps_per_shell)
    cs = [np.eye(n)]
    for _ in range(centers):
        c = rng.standard_normal(d)
        c *= center_scale / np.linalg.norm(c)
        cs.append(expm((q @ c).reshape(n, n)))
    for A in extra_centers or ():
        cs.append(np.asarray(A, float).reshape(n, n))
    mats = [c.ravel()[None, :] for c in cs]
    for c in cs:
        for xi in xis:
            X = xi.reshape(n, n)
            e = c @ expm(ts[:, None, None] * X)
            mats.append(e.reshape(len(ts), -1))
    pts = np.unique(np.vstack(mats), axis=0)
    dets = np.linalg.det(pts.reshape(-1, n, n))
    if np.any(np.abs(dets) <= 1e-8):
        raise ValueError("sampled a singular matrix")
    meta = {"matrix_shape": (n, n), "params": group_params(shell_delta[-1]),
            "test_points": [c.ravel().tolist() for c in cs]}
    F = SampledSet(pts, float(shell_delta[-1]), f"group:{name}", np.eye(n).ravel(), float(radii[0]), meta)
    return MatrixGroupSample(name, n, tuple(gens), np.array([c.ravel() for c in cs]), radii,
                             shell_delta, F, xis)


def group_params(delta: float, tau: float = 0.15) -> dict:
    lam_min = 8 * delta
    return {"lam0": 2 * lam_min, "ratio": 0.5, "count": 2, "tau": tau, "rho0": 2 * lam_min}


def _secant_grid(G: MatrixGroupSample, center: np.ndarray, params: ConeParams) -> DirectionGrid:
    base = params.grid_for(G.n * G.n)
    C = center.reshape(G.n, G.n)
    sec = np.array([(C @ xi.reshape(G.n, G.n)).ravel() for xi in G.ray_dirs])
    return base.augmented(sec)


def _params(G: MatrixGroupSample, params: ConeParams | None) -> ConeParams:
    if params is not None:
        return params
    return ConeParams(**G.points.meta["params"])


def tangent_hull_at(G: MatrixGroupSample, center, params: ConeParams | None = None,
                    sigma_tol: float = 0.25) -> Subspace:
    """hull(Tan+(G, A)) scored on the random grid plus directions A xi of the sampled rays."""
    p = _params(G, params)
    A = np.asarray(center, float).ravel()
    grid = _secant_grid(G, A, p)
    cone = estimate_cones(G.points, A, p, grid, kinds=("Tan+",))["Tan+"]
    return linear_hull(cone, sigma_tol)


def estimate_infinitesimal_group(G: MatrixGroupSample, params: ConeParams | None = None,
                                 sigma_tol: float = 0.25) -> Subspace:
    """Candidate Lie algebra: the linear hull of Tan+ at the identity."""
    return tangent_hull_at(G, G.identity, params, sigma_tol)


def subspace_matrices(V: Subspace, n: int) -> list[np.ndarray]:
    return [V.basis[:, i].reshape(n, n) for i in range(V.dim)]


def bracket_closure_check(J: Subspace, n: int | None = None) -> float:
    """max over basis pairs (X, Y) of dist(XY - YX, J) / (||X|| ||Y||)."""
    if J.dim == 0:
        raise ValueError("bracket check needs a non-trivial subspace")
    n = int(round(math.sqrt(J.ambient_dim))) if n is None else n
    mats = subspace_matrices(J, n)
    worst = 0.0
    for X, Y in itertools.combinations_with_replacement(mats, 2):
        br = (X @ Y - Y @ X).ravel()
        worst = max(worst, dist_to_subspace(br, J) / (np.linalg.norm(X) * np.linalg.norm(Y)))
    return float(worst)


def translate_subspace(J: Subspace, A, n: int) -> Subspace:
    """A J = {A X : X in J}."""
    A = np.asarray(A, float).reshape(n, n)
    return Subspace.span(np.array([(A @ X).ravel() for X in subspace_matrices(J, n)]), n * n)


def translation_covariance_check(G: MatrixGroupSample, A, params: ConeParams | None = None,
                                 J: Subspace | None = None) -> float:
    """Angle between hull(Tan+(G, A)) and A hull(Tan+(G, E)); pi/2 on a dimension mismatch."""
    J = estimate_infinitesimal_group(G, params) if J is None else J
    TA = tangent_hull_at(G, A, params)
    AJ = translate_subspace(J, A, G.n)
    if TA.dim != AJ.dim or TA.dim == 0:
        return math.pi / 2
    return subspace_angle(TA, AJ)


@dataclass(frozen=True)
class IdentityConesReport:
    defects: dict
    tol: float
    members: dict

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.defects.values())

    def to_dict(self) -> dict:
        return {"defects": self.defects, "tol": self.tol, "members": self.members, "passed": self.passed}


def lattice_patch(G: MatrixGroupSample, spacing: float, radius: float) -> SampledSet:
    """exp of a cubic lattice in algebra coordinates, |c| <= radius (d <= 3 only)."""
    d = len(G.generators)
    if d > 3:
        raise ValueError("lattice patches are limited to algebras of dimension <= 3")
    q, _ = np.linalg.qr(np.array([g.ravel() for g in G.generators]).T)
    k = int(math.ceil(radius / spacing))
    ax = np.arange(-k, k + 1) * spacing
    c = np.array(list(itertools.product(ax, repeat=d)))
    c = c[np.linalg.norm(c, axis=1) <= radius]
    pts = expm((c @ q.T).reshape(-1, G.n, G.n)).reshape(len(c), -1)
    # exp is 1 + O(radius)-Lipschitz on the patch
    delta = spacing * math.sqrt(d) / 2 * (1 + radius)
    return SampledSet(pts, delta, f"patch:{G.name}", G.identity, radius)


def four_cones_check_at_identity(G: MatrixGroupSample, tau: float = 0.15, random_dirs: int = 100,
                                 seed: int = 0, slack: float = 0.05) -> IdentityConesReport:
    """All four cones at E on a dense exp-lattice patch; reports pairwise coincidence defects.

    Directions: ``random_dirs`` random ones plus the sampled ray directions.
    The patch certifies delta <= lam_min / 8.
    """
    from .classify import coincidence_defect

    d = len(G.generators)
    lam_min = 0.01
    lam0 = 2 * lam_min
    rho0 = lam0
    spacing = lam_min / 8 / (math.sqrt(d) / 2 * 1.1)
    P = lattice_patch(G, spacing, rho0 + 2 * lam0)
    p = ConeParams(lam0=lam0, ratio=0.5, count=2, rho0=rho0, tau=tau, max_base_points=16)
    base = DirectionGrid.random_nd(G.n * G.n, random_dirs, seed)
    grid = base.augmented(G.ray_dirs[: min(len(G.ray_dirs), 200)])
    cones = estimate_cones(P, G.identity, p, grid)
    tol = slack
    defects = {"pTan+/pTan-": coincidence_defect(cones["pTan+"], cones["pTan-"]),
               "Tan+/Tan-": coincidence_defect(cones["Tan+"], cones["Tan-"])}
    return IdentityConesReport(defects, tol, {k: int(c.member_mask.sum()) for k, c in cones.items()})


@dataclass(frozen=True)
class AlgebraReport:
    group: str
    n: int
    dim: int
    analytic_dim: int | None
    angle: float | None
    bracket_residual: float
    covariance_angles: list
    basis: list
    delta: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def algebra_report(G: MatrixGroupSample, params: ConeParams | None = None,
                   covariance_points: int | None = None) -> AlgebraReport:
    J = estimate_infinitesimal_group(G, params)
    analytic = None if G.name == "custom" else algebra_subspace(G.generators)
    angle = None
    if analytic is not None and analytic.dim == J.dim and J.dim:
        angle = subspace_angle(J, analytic)
    elif analytic is not None:
        angle = math.pi / 2
    br = bracket_closure_check(J, G.n) if J.dim else 0.0
    centers = G.centers[1:] if covariance_points is None else G.centers[1:1 + covariance_points]
    cov = [translation_covariance_check(G, A, params, J) for A in centers]
    return AlgebraReport(G.name, G.n, J.dim, None if analytic is None else analytic.dim, angle, br, cov,
                         [m.tolist() for m in subspace_matrices(J, G.n)], G.delta)
