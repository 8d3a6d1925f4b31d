"""Generators for the worked example sets and a few control sets.

Every builder returns a :class:`SampledSet` whose ``delta`` is certified by
construction inside its region of interest, plus catalog metadata:

``params``       recommended cone/classifier parameters for this set
``test_points``  designated test points (e.g. the singular point first)
``graph_split``  domain dimension, for graphs of functions
``patches``      list of (center, radius) balls when only parts are sampled
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import CatalogError
from .setmodel import SampledSet

_REGISTRY: dict[str, Callable[..., SampledSet]] = {}
_DOCS: dict[str, str] = {}


def register(name: str):
    def deco(fn):
        _REGISTRY[name] = fn
        _DOCS[name] = (fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else ""
        return fn
    return deco


def catalog_names() -> list[str]:
    return sorted(_REGISTRY)


def describe(name: str) -> str:
    return _DOCS.get(name, "")


def build_example(name: str, **params) -> SampledSet:
    try:
        fn = _REGISTRY[name]
    except KeyError:
        raise CatalogError(f"unknown catalog entry {name!r}; known: {', '.join(catalog_names())}") from None
    return fn(**params)


# ------------------------------------------------------------------ helpers

def arc_resample(chunks, h: float) -> np.ndarray:
    """Pick points at arc-length spacing ``h`` along a finely sampled polyline.

    ``chunks`` yields consecutive (m, n) arrays of points along the curve; the
    fine steps must be well below ``h``. Endpoints are always kept.
    """
    out = []
    carry_len = 0.0
    next_mark = 0.0
    prev = None
    last = None
    for pts in chunks:
        if prev is not None:
            pts = np.vstack([prev[None, :], pts])
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        cum = carry_len + np.concatenate([[0.0], np.cumsum(seg)])
        marks = np.arange(next_mark, cum[-1] + 1e-300, h)
        if marks.size:
            idx = np.searchsorted(cum, marks, side="left")
            idx = np.clip(idx, 0, len(pts) - 1)
            out.append(pts[idx])
            next_mark = marks[-1] + h
        carry_len = cum[-1]
        prev = pts[-1]
        last = pts[-1]
    if last is not None:
        out.append(last[None, :])
    pts = np.vstack(out)
    keep = np.ones(len(pts), bool)
    keep[1:] = np.any(np.diff(pts, axis=0) != 0, axis=1)
    return pts[keep]


def _chunks_from_grid(fn, grid: np.ndarray, size: int = 1 << 20):
    for i in range(0, grid.size, size):
        yield fn(grid[i:i + size])


def _dedupe(points: np.ndarray) -> np.ndarray:
    return np.unique(points, axis=0)


def _resample_graph_1d(f, a: float, b: float, h: float, max_passes: int = 12) -> np.ndarray:
    """Graph of f on [a, b] refined until chords are below h/4, then arc-resampled."""
    t = np.linspace(a, b, int(math.ceil((b - a) / (h / 4))) + 1)
    for _ in range(max_passes):
        y = f(t)
        chord = np.hypot(np.diff(t), np.diff(y))
        bad = chord > h / 4
        if not np.any(bad):
            break
        reps = np.where(bad, np.ceil(chord / (h / 8)).astype(int), 1)
        pieces = [np.linspace(t[i], t[i + 1], r + 1)[:-1] for i, r in zip(np.flatnonzero(bad), reps[bad])]
        t = np.unique(np.concatenate([t] + pieces))
    pts = np.column_stack([t, f(t)])
    return arc_resample([pts], h)


def _safe_function(expr: str):
    ns = {k: getattr(np, k) for k in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "cbrt",
                                       "sign", "where", "pi", "arctan", "sinh", "cosh", "tanh",
                                       "minimum", "maximum", "heaviside")}
    code = compile(expr, "<expr>", "eval")
    for name in code.co_names:
        if name not in ns and name not in ("x", "y"):
            raise ValueError(f"name {name!r} not allowed in function expression")

    def f(x, y=None):
        with np.errstate(all="ignore"):
            v = eval(code, {"__builtins__": {}}, dict(ns, x=x, y=y))
        return np.broadcast_to(np.asarray(v, dtype=float), np.shape(x)).copy()
    return f


def _params(**kw) -> dict:
    return kw


# ------------------------------------------------------------- 1-D sequences

def sequence_set(terms, include_zero: bool = True, name: str = "sequence-1d", tail_bound: float | None = None,
                 **meta) -> SampledSet:
    """Exact finite sequence set; ``tail_bound`` bounds |x_m| for the omitted terms."""
    t = np.asarray(terms, dtype=float).ravel()
    pts = np.concatenate([[0.0], t]) if include_zero else t
    pts = np.unique(pts)
    tail = float(np.min(np.abs(t[t != 0]))) if tail_bound is None else tail_bound
    delta = max(tail, 1e-15)
    meta.setdefault("test_points", [[0.0]])
    return SampledSet(pts.reshape(-1, 1), delta, name, np.zeros(1), 1.0, meta)


_SEQ_PARAMS = _params(ratio=0.5, count=10, tau=0.15, lam0=0.1, rho0=0.6)


@register("singleton")
def singleton(n: int = 1) -> SampledSet:
    """{0} in R^n."""
    return SampledSet(np.zeros((1, n)), 1e-12, "singleton", np.zeros(n), 1.0,
                      {"params": dict(_SEQ_PARAMS), "test_points": [[0.0] * n]})


def factorial_terms(m_max: int) -> np.ndarray:
    return np.array([1.0 / math.factorial(m) for m in range(1, m_max + 1)])


def harmonic_terms(m_max: int) -> np.ndarray:
    return 1.0 / np.arange(1, m_max + 1, dtype=float)


@register("factorial-sequence")
def factorial_sequence(m_max: int = 20) -> SampledSet:
    """{0} u {1/m! : 1 <= m <= m_max}."""
    t = factorial_terms(m_max)
    return sequence_set(t, name="factorial-sequence", params=dict(_SEQ_PARAMS))


@register("harmonic-sequence")
def harmonic_sequence(m_max: int = 10 ** 5) -> SampledSet:
    """{0} u {1/m : 1 <= m <= m_max}."""
    return sequence_set(harmonic_terms(m_max), name="harmonic-sequence", params=dict(_SEQ_PARAMS))


@register("symmetric-harmonic")
def symmetric_harmonic(m_max: int = 10 ** 5) -> SampledSet:
    """{0} u {+-1/m : 1 <= m <= m_max}."""
    t = harmonic_terms(m_max)
    return sequence_set(np.concatenate([t, -t]), name="symmetric-harmonic", params=dict(_SEQ_PARAMS))


@register("factorial-plus-harmonic")
def factorial_plus_harmonic(m_max_factorial: int = 20, m_max: int = 10 ** 5) -> SampledSet:
    """{0} u {1/m!} u {-1/m}."""
    t = np.concatenate([factorial_terms(m_max_factorial), -harmonic_terms(m_max)])
    return sequence_set(t, name="factorial-plus-harmonic", tail_bound=1.0 / m_max, params=dict(_SEQ_PARAMS))


@register("half-line")
def half_line(length: float = 1.5, h: float = 1e-5) -> SampledSet:
    """R_+ = [0, inf), sampled on [0, length] with spacing h."""
    n = int(math.ceil(length / h))
    pts = (np.arange(n + 1) * (length / n)).reshape(-1, 1)
    return SampledSet(pts, length / n / 2, "half-line", np.zeros(1), 1.0,
                      {"params": dict(_SEQ_PARAMS), "test_points": [[0.0], [0.5]]})


# ------------------------------------------------------------------ curves

_CURVE_PARAMS = _params(lam0=0.0016, rho0=0.005, ratio=0.5, count=5, tau=0.15)


@register("circle")
def circle(delta: float = 1e-5, radius: float = 1.0, n_test: int = 16) -> SampledSet:
    """Circle of given radius about the origin, ceil(2 pi r / delta) equally spaced samples."""
    n = int(math.ceil(2 * math.pi * radius / delta))
    t = 2 * np.pi * np.arange(n) / n
    pts = radius * np.column_stack([np.cos(t), np.sin(t)])
    s = 2 * np.pi * np.arange(n_test) / n_test
    tests = (radius * np.column_stack([np.cos(s), np.sin(s)])).tolist()
    return SampledSet(pts, delta, "circle", np.zeros(2), radius,
                      {"params": dict(_CURVE_PARAMS), "test_points": tests, "manifold_dim": 1})


@register("cusp-y3x2")
def cusp(h: float = 1e-5, extent: float = 0.45) -> SampledSet:
    """{(x, y) : y^3 = x^2}, i.e. (t^3, t^2), near the origin."""
    t = np.linspace(-extent, extent, int(math.ceil(2 * extent / (h / 4))) | 1)
    pts = arc_resample(_chunks_from_grid(lambda s: np.column_stack([s ** 3, s ** 2]), t), h)
    # away from 0 the branches must be farther apart than the base radius
    tests = [[0.0, 0.0], [0.3 ** 3, 0.3 ** 2], [-(0.35 ** 3), 0.35 ** 2]]
    return SampledSet(pts, h, "cusp-y3x2", np.zeros(2), 0.05,
                      {"params": dict(_CURVE_PARAMS), "test_points": tests, "manifold_dim": 1})


@register("two-parabolas")
def two_parabolas(h: float = 1e-5, extent: float = 0.4) -> SampledSet:
    """{(y - x^2)(y - 2 x^2) = 0} near the origin."""
    x = np.linspace(-extent, extent, int(math.ceil(2 * extent / (h / 4))) | 1)
    a = arc_resample([np.column_stack([x, x ** 2])], h)
    b = arc_resample([np.column_stack([x, 2 * x ** 2])], h)
    pts = _dedupe(np.vstack([a, b]))
    tests = [[0.0, 0.0], [0.3, 0.09], [-0.3, 0.18]]
    return SampledSet(pts, h, "two-parabolas", np.zeros(2), 0.05,
                      {"params": dict(_CURVE_PARAMS, lam0=4e-4, rho0=0.02, count=3), "test_points": tests, "manifold_dim": 1})


@register("polyline-corner")
def polyline_corner(angle_deg: float = 90.0, h: float = 1e-5, length: float = 0.1) -> SampledSet:
    """Two segments leaving the origin, along e1 and at ``angle_deg`` from it."""
    s = np.linspace(0, length, int(math.ceil(length / h)) + 1)[:, None]
    a = math.radians(angle_deg)
    pts = _dedupe(np.vstack([s * [1.0, 0.0], s * [math.cos(a), math.sin(a)]]))
    return SampledSet(pts, h, "polyline-corner", np.zeros(2), 0.05,
                      {"params": dict(_CURVE_PARAMS), "test_points": [[0.0, 0.0]], "manifold_dim": 1})


@register("t-sin-1-over-t")
def t_sin_inv_t(h: float = 5e-6, t_max: float = 0.006, t_min: float | None = None) -> SampledSet:
    """{(t, t sin(1/t)) : t != 0}, sampled by arc length for t_min <= |t| <= t_max."""
    t_min = h if t_min is None else t_min
    # on a uniform grid in u = ln t each step moves at most (2t + 1) du along the curve
    du = h / 4
    u = np.arange(math.log(t_min), math.log(t_max) + du, du)

    def branch(sign):
        def fn(uu):
            t = sign * np.exp(uu)
            return np.column_stack([t, t * np.sin(1 / t)])
        return arc_resample(_chunks_from_grid(fn, u), h)

    pts = _dedupe(np.vstack([branch(1.0), branch(-1.0)]))
    # unsampled part |t| < t_min lies within sqrt(2) t_min of the origin
    delta = max(h, 3 * t_min)
    return SampledSet(pts, delta, "t-sin-1-over-t", np.zeros(2), t_max,
                      {"params": _params(lam0=0.002, ratio=0.5, count=2, tau=0.01, rho0=0.002),
                       "test_points": [[0.0, 0.0]]})


@register("ray-plus-diagonal-sequence")
def ray_plus_diagonal(h: float = 2.5e-6, length: float = 0.03, m_max: int = 10 ** 5) -> SampledSet:
    """{(t, -t) : t < 0} u {(1/m, 1/m) : m >= 1}."""
    s = np.arange(1, int(math.ceil(length / h)) + 1) * h
    ray = np.column_stack([-s, s])
    seq = np.repeat(harmonic_terms(m_max)[:, None], 2, axis=1)
    pts = np.vstack([ray, seq])
    delta = max(h * math.sqrt(2) / 2, math.sqrt(2) / m_max)
    return SampledSet(pts, delta, "ray-plus-diagonal-sequence", np.zeros(2), 0.1,
                      {"params": _params(lam0=0.01, ratio=0.5, count=4, tau=0.005),
                       "test_points": [[0.0, 0.0]]})


@register("graph-of-custom-function")
def graph_of_function(expr: str = "x**2", domain=(-0.5, 0.5), h: float = 1e-4,
                      test_points=None, domain_dim: int = 1) -> SampledSet:
    """Graph of a user expression in x (or x, y for domain_dim=2), arc-length sampled."""
    f = _safe_function(expr)
    a, b = float(domain[0]), float(domain[1])
    if domain_dim == 1:
        pts = _resample_graph_1d(f, a, b, h)
        tx = [0.0] if test_points is None else list(test_points)
        tests = [[float(t), float(f(np.array([t]))[0])] for t in tx]
        n = 2
        delta = h
    elif domain_dim == 2:
        g = np.arange(a, b + h / 2, h)
        X, Y = np.meshgrid(g, g, indexing="ij")
        Z = f(X, Y)
        pts = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
        tx = [[0.0, 0.0]] if test_points is None else [list(t) for t in test_points]
        tests = [[t[0], t[1], float(f(np.array([t[0]]), np.array([t[1]]))[0])] for t in tx]
        n = 3
        delta = h
    else:
        raise ValueError("domain_dim must be 1 or 2")
    lam0 = max(0.0016, 16 * delta)
    return SampledSet(pts, delta, f"graph:{expr}", np.zeros(n), 0.5 * (b - a),
                      {"params": _params(lam0=lam0, rho0=max(0.005, 2 * lam0), ratio=0.5, count=2, tau=0.15),
                       "test_points": tests, "graph_split": domain_dim, "expr": expr})


# ---------------------------------------------------------- dense box

@register("dense-box")
def dense_box(n: int = 2, h: float = 1e-4, half_width: float = 0.01) -> SampledSet:
    """Cubic lattice filling [-w, w]^n (a sampled open set near its centre)."""
    g = np.arange(-half_width, half_width + h / 2, h)
    mesh = np.meshgrid(*([g] * n), indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    return SampledSet(pts, h * math.sqrt(n) / 2, "dense-box", np.zeros(n), half_width,
                      {"params": _params(lam0=0.002, rho0=0.002, ratio=0.5, count=2, tau=0.15),
                       "test_points": [[0.0] * n], "manifold_dim": n})


# ---------------------------------------------------- surfaces of revolution

def _ring_samples(profile, u_grid: np.ndarray, h: float, patches) -> np.ndarray:
    """Samples of the surface (rho(u) cos phi, rho(u) sin phi, z(u)), restricted to patches.

    Rings sit at the profile parameters ``u_grid`` (unit-speed profile, spacing
    h); ring j carries ceil(2 pi rho_j / h) equally spaced samples. Any surface
    point is within h of a sample: at most h/2 along the meridian, then at
    most h/2 along the ring.
    """
    rho, z = profile(u_grid)
    rho = np.abs(rho)
    nphi = np.maximum(1, np.ceil(2 * np.pi * rho / h)).astype(np.int64)
    keys = []
    ring_pts = []
    if patches is None:
        for j in range(u_grid.size):
            i = np.arange(nphi[j])
            phi = 2 * np.pi * i / nphi[j]
            ring_pts.append(np.column_stack([rho[j] * np.cos(phi), rho[j] * np.sin(phi),
                                             np.full(i.size, z[j])]))
        return np.vstack(ring_pts)
    for c, R in patches:
        c = np.asarray(c, float)
        R = float(R) + 2 * h
        cxy = math.hypot(c[0], c[1])
        phic = math.atan2(c[1], c[0])
        near = (rho - cxy) ** 2 + (z - c[2]) ** 2 <= R * R
        for j in np.flatnonzero(near):
            n = int(nphi[j])
            if cxy * rho[j] == 0:
                idx = np.arange(n)
            else:
                cosmin = (rho[j] ** 2 + cxy ** 2 + (z[j] - c[2]) ** 2 - R * R) / (2 * rho[j] * cxy)
                if cosmin <= -1:
                    idx = np.arange(n)
                else:
                    w = math.acos(min(1.0, cosmin))
                    lo = int(math.floor((phic - w) * n / (2 * np.pi)))
                    hi = int(math.ceil((phic + w) * n / (2 * np.pi)))
                    idx = np.unique(np.arange(lo, hi + 1) % n)
            keys.append(j * (1 << 32) + idx)
    keys = np.unique(np.concatenate(keys)) if keys else np.empty(0, np.int64)
    j = keys >> 32
    i = keys & ((1 << 32) - 1)
    phi = 2 * np.pi * i / nphi[j]
    return np.column_stack([rho[j] * np.cos(phi), rho[j] * np.sin(phi), z[j]])


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    zz = 1 - 2 * i / count
    r = np.sqrt(1 - zz * zz)
    phi = np.pi * (1 + 5 ** 0.5) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), zz])


_SURFACE_PARAMS = _params(lam0=0.01, rho0=0.02, ratio=0.5, count=2, tau=0.15)


@register("sphere")
def sphere(h: float = 6e-4, n_test: int = 64, patch_radius: float | None = None,
           full: bool = False) -> SampledSet:
    """Unit sphere in R^3; by default sampled only in caps around the test points."""
    tests = fibonacci_sphere(n_test)
    prm = dict(_SURFACE_PARAMS)
    R = patch_radius if patch_radius is not None else prm["rho0"] + 2 * prm["lam0"] + 0.01
    patches = None if full else [(c, R) for c in tests]
    u = np.arange(0.0, math.pi + h / 2, h)
    u[-1] = min(u[-1], math.pi)
    pts = _ring_samples(lambda s: (np.sin(s), np.cos(s)), u, h, patches)
    meta = {"params": prm, "test_points": tests.tolist(), "manifold_dim": 2}
    if patches is not None:
        meta["patches"] = [(c.tolist(), R) for c, R in patches]
    return SampledSet(pts, h, "sphere", np.zeros(3), 1.0, meta)


def _torus_profile(u):
    return 1 + np.cos(u), np.sin(u)


def pinched_torus_test_points(count: int = 10, seed: int = 7) -> np.ndarray:
    """Origin first, then random points of the outer half (distance >= 1 from the z-axis)."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-math.pi / 2, math.pi / 2, count)
    phi = rng.uniform(0, 2 * math.pi, count)
    rho, z = _torus_profile(u)
    pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    return np.vstack([np.zeros((1, 3)), pts])


@register("pinched-torus")
def pinched_torus(h: float = 6e-4, n_random: int = 10, seed: int = 7,
                  patch_radius: float | None = None) -> SampledSet:
    """(x^2 + y^2 + z^2)^2 = 4 (x^2 + y^2): the circle (y-1)^2 + z^2 = 1 turned about the z-axis."""
    tests = pinched_torus_test_points(n_random, seed)
    prm = dict(_SURFACE_PARAMS)
    R = patch_radius if patch_radius is not None else prm["rho0"] + 2 * prm["lam0"] + 0.01
    patches = [(c, R) for c in tests]
    u = np.arange(-math.pi, math.pi, h)
    pts = _ring_samples(_torus_profile, u, h, patches)
    pts = _dedupe(np.vstack([pts, np.zeros((1, 3))]))
    return SampledSet(pts, h, "pinched-torus", np.zeros(3), 2.0,
                      {"params": prm, "test_points": tests.tolist(), "manifold_dim": 2,
                       "patches": [(c.tolist(), R) for c, R in patches]})


def concentric_test_points(n: int, count: int = 10, seed: int = 11) -> np.ndarray:
    """Origin first, then random points on the spheres of radius 1 and 1/2."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = 1.0 / rng.integers(1, 3, count)
    return np.vstack([np.zeros((1, n)), g * r[:, None]])


@register("concentric-spheres")
def concentric_spheres(n: int = 2, h: float = 2e-4, n_random: int = 10, seed: int = 11,
                       origin_radius: float = 0.02, patch_radius: float = 0.03) -> SampledSet:
    """{0} u {x : 1/||x|| in N} in R^n (n = 2 or 3), sampled around the test points."""
    tests = concentric_test_points(n, n_random, seed)
    m_max = int(math.ceil(1 / h))
    patches = [(tests[0], origin_radius)] + [(c, patch_radius) for c in tests[1:]]
    chunks = [np.zeros((1, n))]
    for m in range(1, m_max + 1):
        r = 1.0 / m
        hit = [(c, R) for c, R in patches if abs(np.linalg.norm(c) - r) <= R + 2 * h]
        if not hit:
            continue
        if n == 2:
            k = int(math.ceil(2 * math.pi * r / h))
            idx_all = []
            for c, R in hit:
                cn = float(np.linalg.norm(c))
                if cn == 0 or r + cn <= R + 2 * h:
                    idx_all.append(np.arange(k))
                    continue
                cosmin = (r * r + cn * cn - (R + 2 * h) ** 2) / (2 * r * cn)
                w = math.acos(max(-1.0, min(1.0, cosmin)))
                phic = math.atan2(c[1], c[0])
                lo = int(math.floor((phic - w) * k / (2 * math.pi)))
                hi = int(math.ceil((phic + w) * k / (2 * math.pi)))
                idx_all.append(np.arange(lo, hi + 1) % k)
            idx = np.unique(np.concatenate(idx_all))
            t = 2 * np.pi * idx / k
            chunks.append(r * np.column_stack([np.cos(t), np.sin(t)]))
        else:
            u = np.arange(0.0, math.pi * r + h / 2, h) / r
            u[-1] = min(u[-1], math.pi)
            pts = _ring_samples(lambda s: (r * np.sin(s), r * np.cos(s)), u, h, hit)
            chunks.append(pts)
    pts = _dedupe(np.vstack(chunks))
    delta = h
    return SampledSet(pts, delta, "concentric-spheres", np.zeros(n), 1.0,
                      {"params": _params(lam0=0.004, rho0=0.006, ratio=0.5, count=2, tau=0.15),
                       "test_points": tests.tolist(), "manifold_dim": n - 1,
                       "patches": [(np.asarray(c).tolist(), R) for c, R in patches]})
