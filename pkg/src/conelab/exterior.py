"""Simple k-vectors (blades) and equi-dimensional subspace geometry.

Blades are kept as lists of spanning vectors; every inner product is a Gram
determinant, so nothing is ever expanded into the C(n, k) coordinates of the
exterior power.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, GradeError

EPS_RANK = 1e-10
EPS_ORTHO = 1e-10


def _gram_det(g: np.ndarray) -> float:
    # LU with partial pivoting; slogdet keeps the sign and avoids overflow.
    if g.shape == (1, 1):
        return float(g[0, 0])
    sign, logdet = np.linalg.slogdet(g)
    if sign == 0:
        return 0.0
    return float(sign * np.exp(logdet))


@dataclass(frozen=True)
class Blade:
    """Wedge product v_1 ^ ... ^ v_k, stored as the k x n array of its factors."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if v.shape[0] < 1 or v.shape[0] > v.shape[1]:
            raise GradeError(f"blade grade {v.shape[0]} not in [1, {v.shape[1]}]")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def grade(self) -> int:
        return self.vectors.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[1]

    def wedge(self, x) -> "Blade":
        return Blade(np.vstack([self.vectors, np.asarray(x, dtype=float)]))

    def is_degenerate(self) -> bool:
        scale = float(np.prod(np.linalg.norm(self.vectors, axis=1)))
        return scale == 0.0 or blade_norm(self) <= EPS_RANK * scale


def _volume(v: np.ndarray) -> float:
    # Householder QR: |det R| is the k-volume, and a nearly dependent last
    # factor comes out with absolute (not squared) accuracy.
    r = np.linalg.qr(v.T, mode="r")
    return float(np.prod(np.abs(np.diag(r))))


def gram_inner(a: Blade, b: Blade) -> float:
    """<a, b> = det(<v_i, w_j>) for simple k-vectors a = ^v_i, b = ^w_j."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(f"ambient dims differ: {a.ambient_dim} vs {b.ambient_dim}")
    if a.grade != b.grade:
        raise GradeError(f"grades differ: {a.grade} vs {b.grade}")
    if a is b or np.array_equal(a.vectors, b.vectors):
        return _volume(a.vectors) ** 2
    return _gram_det(a.vectors @ b.vectors.T)


def blade_norm(a: Blade) -> float:
    """k-volume of the parallelepiped spanned by the factors of ``a``."""
    return _volume(a.vectors)


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^n given by an n x d orthonormal basis (columns)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.ndim != 2:
            raise DimensionError("basis must be a 2-D array")
        if b.shape[1] > b.shape[0]:
            raise DimensionError(f"{b.shape[1]} basis columns in R^{b.shape[0]}")
        if b.shape[1] and not np.allclose(b.T @ b, np.eye(b.shape[1]), atol=EPS_ORTHO):
            raise ValueError("basis is not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, rtol: float = EPS_RANK) -> "Subspace":
        """Orthonormal basis of the span of the given vectors (rows)."""
        v = np.asarray(vectors, dtype=float)
        if v.size == 0:
            if ambient_dim is None:
                raise DimensionError("ambient_dim required for an empty span")
            return cls.zero(ambient_dim)
        v = np.atleast_2d(v)
        u, s, _ = np.linalg.svd(v.T, full_matrices=False)
        rank = int(np.sum(s > rtol * max(s[0], 1e-300))) if s.size else 0
        return cls(u[:, :rank])

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0)))

    def blade(self) -> Blade:
        return Blade(self.basis.T)

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.basis @ (self.basis.T @ x)

    def to_dict(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "dim": self.dim,
                "basis": self.basis.T.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Subspace":
        rows = np.asarray(d["basis"], dtype=float).reshape(-1, d["ambient_dim"])
        return cls(rows.T)


def dist_to_subspace(x, V: Subspace) -> float:
    """Distance from ``x`` to ``V`` via ||(^v_i) ^ x|| / ||^v_i||.

    A zero-dimensional ``V`` is {0}, so the result is ||x||.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != V.ambient_dim:
        raise DimensionError(f"point in R^{x.shape[0]}, subspace in R^{V.ambient_dim}")
    if V.dim == 0:
        return float(np.linalg.norm(x))
    if V.dim == V.ambient_dim:
        return 0.0
    base = V.blade()
    return blade_norm(base.wedge(x)) / blade_norm(base)


def _check_pair(V: Subspace, W: Subspace):
    if V.ambient_dim != W.ambient_dim:
        raise DimensionError(f"ambient dims differ: {V.ambient_dim} vs {W.ambient_dim}")
    if V.dim != W.dim:
        raise DimensionError(f"subspace dims differ: {V.dim} vs {W.dim}")
    if V.dim == 0:
        raise DimensionError("angle undefined for zero-dimensional subspaces")


def projection_factor(V: Subspace, W: Subspace) -> float:
    """Volume reduction factor of the orthogonal projection of V onto W."""
    _check_pair(V, W)
    a, b = V.blade(), W.blade()
    c = abs(gram_inner(a, b)) / (blade_norm(a) * blade_norm(b))
    return float(min(c, 1.0))


def subspace_angle(V: Subspace, W: Subspace) -> float:
    """Angle in [0, pi/2] between two non-oriented subspaces of equal dimension."""
    return float(np.arccos(np.clip(projection_factor(V, W), 0.0, 1.0)))
