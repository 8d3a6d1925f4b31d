"""``cones`` command-line front end.

Exit codes: 0 success (including a failing verdict), 2 configuration error,
3 scale ladder finer than the sampling resolution allows, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import build_example, catalog_names, describe
from .classify import THEOREMS, ClassifierParams, classify
from .cones import KINDS, ConeParams, estimate_cones, parse_kind, params_for
from .errors import CatalogError, ConelabError, ScaleError
from .exterior import Blade, Subspace, blade_norm, dist_to_subspace, gram_inner, subspace_angle
from .setmodel import SampledSet, load_csv, load_json

EXIT_OK, EXIT_CONFIG, EXIT_SCALE, EXIT_IO = 0, 2, 3, 4
SEED_ENV = "CONELAB_SEED"


class ConfigError(ConelabError):
    pass


class InputError(ConelabError):
    pass


@dataclass
class RunConfig:
    """Everything a run depends on. Built from defaults, then --config JSON, then flags."""

    catalog: str | None = None
    catalog_params: dict = field(default_factory=dict)
    input: str | None = None
    delta: float | None = None
    points: list | None = None
    point_indices: list | None = None
    random_k: int | None = None
    seed: int = 0
    lam0: float | None = None
    ratio: float | None = None
    count: int | None = None
    rho0: float | None = None
    tau: float | None = None
    grid_count: int | None = None
    max_base_points: int | None = None
    defect_slack: float | None = None
    sigma_tol: float | None = None
    vector_space_tol: float | None = None
    output: str | None = None
    format: str = "json"

    @classmethod
    def from_sources(cls, args: argparse.Namespace, env=None) -> "RunConfig":
        env = os.environ if env is None else env
        cfg = cls()
        if getattr(args, "config", None):
            try:
                raw = json.loads(Path(args.config).read_text())
            except OSError as exc:
                raise InputError(f"cannot read config: {exc}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from None
            cfg.update(raw)
        if env.get(SEED_ENV) not in (None, ""):
            try:
                cfg.seed = int(env[SEED_ENV])
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer") from None
        cfg.update({k: v for k, v in vars(args).items() if v is not None and k in cls.__dataclass_fields__})
        cfg.validate()
        return cfg

    def update(self, raw: dict) -> None:
        names = {f.name for f in fields(self)}
        unknown = set(raw) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for k, v in raw.items():
            setattr(self, k, v)

    def validate(self) -> None:
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.catalog is not None and self.input is not None:
            raise ConfigError("give either a catalog name or an input file, not both")
        if self.input is not None and self.delta is None and not str(self.input).endswith(".json"):
            raise ConfigError("CSV input needs --delta")
        if self.random_k is not None and self.random_k < 1:
            raise ConfigError("random-k must be positive")

    def cone_params(self, F: SampledSet) -> ConeParams:
        over = {k: getattr(self, k) for k in ("lam0", "ratio", "count", "rho0", "tau", "grid_count",
                                              "max_base_points")}
        try:
            return params_for(F, seed=self.seed, **over)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def classifier_params(self, F: SampledSet) -> ClassifierParams:
        over = {k: getattr(self, k) for k in ("defect_slack", "sigma_tol", "vector_space_tol")
                if getattr(self, k) is not None}
        return ClassifierParams(cone=self.cone_params(F), **over)


# ------------------------------------------------------------------ plumbing

def load_source(cfg: RunConfig) -> SampledSet:
    if cfg.catalog is not None:
        try:
            return build_example(cfg.catalog, **cfg.catalog_params)
        except CatalogError as exc:
            raise ConfigError(str(exc.args[0] if exc.args else exc)) from None
        except TypeError as exc:
            raise ConfigError(f"bad catalog parameters: {exc}") from None
    if cfg.input is None:
        raise ConfigError("no input: use --catalog NAME or --input FILE")
    try:
        if str(cfg.input).endswith(".json"):
            F = load_json(cfg.input)
            if cfg.delta is not None:
                F = SampledSet(F.points, cfg.delta, F.generator_id, F.roi_center, F.roi_radius, F.meta)
            return F
        return load_csv(cfg.input, cfg.delta)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot load {cfg.input}: {exc}") from None


def select_points(cfg: RunConfig, F: SampledSet) -> np.ndarray:
    """Explicit points, else sample indices, else k random samples, else the set's own test points."""
    n = F.ambient_dim
    if cfg.points is not None:
        try:
            return np.asarray(cfg.points, float).reshape(-1, n)
        except ValueError:
            raise ConfigError(f"points must have {n} coordinates each") from None
    if cfg.point_indices is not None:
        idx = np.asarray(cfg.point_indices, int)
        if np.any(idx < 0) or np.any(idx >= len(F)):
            raise ConfigError(f"point index outside [0, {len(F)})")
        return F.points[idx]
    if cfg.random_k is not None:
        rng = np.random.default_rng(cfg.seed)
        k = min(cfg.random_k, len(F))
        return F.points[np.sort(rng.choice(len(F), size=k, replace=False))]
    tp = F.meta.get("test_points")
    if tp is None:
        raise ConfigError("no test points: use --point, --point-index or --random-k")
    return np.asarray(tp, float).reshape(-1, n)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_atomic(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` in one rename (stdout when path is None or '-')."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


# ------------------------------------------------------------------ commands

def cmd_estimate(args) -> int:
    cfg = RunConfig.from_sources(args)
    F = load_source(cfg)
    cp = cfg.cone_params(F)
    cp.ladder_for(F)  # scale gate before any work
    kinds = KINDS if args.kinds in (None, "all") else tuple(parse_kind(k) for k in args.kinds.split(","))
    pts = select_points(cfg, F)
    reports = []
    for x in pts:
        cones = estimate_cones(F, x, cp, kinds=kinds)
        reports.extend(cones[k].to_dict() for k in kinds)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point", "kind", "direction", "score", "member"])
        for r in reports:
            p = " ".join(f"{v:.12g}" for v in r["base_point"])
            for d in r["directions"]:
                w.writerow([p, r["kind"], " ".join(f"{v:.12g}" for v in d["v"]), f"{d['score']:.12g}",
                            int(d["score"] <= r["tau"])])
        text = buf.getvalue()
    else:
        text = dumps({"schema_version": "1.0", "dataset": F.generator_id or "custom",
                      "delta": F.delta, "seed": cfg.seed, "cones": reports})
    write_atomic(cfg.output, text)
    for r in reports:
        members = sum(d["score"] <= r["tau"] for d in r["directions"])
        print(f"{r['kind']:>6} at {np.round(r['base_point'], 6).tolist()}: "
              f"{members}/{len(r['directions'])} directions", file=sys.stderr)
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = RunConfig.from_sources(args)
    F = load_source(cfg)
    prm = cfg.classifier_params(F)
    prm.cone_params(F).ladder_for(F)
    pts = select_points(cfg, F)
    rep = classify(F, args.theorem, pts, args.dim, prm)
    write_atomic(cfg.output, rep.to_csv() if cfg.format == "csv" else rep.to_json() + "\n")
    counts = {}
    for p in rep.points:
        counts[p.verdict] = counts.get(p.verdict, 0) + 1
    print(f"{args.theorem} on {rep.dataset}: {rep.verdict} "
          f"({', '.join(f'{v} {k}' for k, v in sorted(counts.items()))})", file=sys.stderr)
    return EXIT_OK


def cmd_liegroup(args) -> int:
    from .liegroup import GROUPS, algebra_report, four_cones_check_at_identity, sample_group

    cfg = RunConfig.from_sources(args)
    if args.group not in GROUPS:
        raise ConfigError(f"unknown group {args.group!r}; expected one of {GROUPS}")
    gens = None
    if args.group == "custom":
        if not args.generators:
            raise ConfigError("custom groups need --generators FILE (JSON list of square matrices)")
        try:
            gens = json.loads(Path(args.generators).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read generators: {exc}") from None
    try:
        G = sample_group(args.group, args.n, budget=args.budget, centers=args.centers, seed=cfg.seed,
                         generators=gens)
    except (ValueError, IndexError) as exc:
        raise ConfigError(str(exc)) from None
    rep = algebra_report(G).to_dict()
    rep.update({"schema_version": "1.0", "seed": cfg.seed, "shell_delta": G.shell_delta.tolist(),
                "radii": G.radii.tolist(), "samples": len(G.points)})
    if args.identity_cones:
        ic = four_cones_check_at_identity(G)
        rep["identity_cones"] = ic.to_dict() if hasattr(ic, "to_dict") else asdict(ic)
    write_atomic(cfg.output, dumps(rep))
    print(f"{G.name} (n={G.n}): algebra dim {rep['dim']}"
          + ("" if rep["angle"] is None else f", angle to analytic {rep['angle']:.4f} rad"), file=sys.stderr)
    return EXIT_OK


def cmd_examples(args) -> int:
    if args.action == "list":
        for name in catalog_names():
            print(f"{name:<28} {describe(name)}")
        return EXIT_OK
    from .corpus import digest, format_table, payload_json, results_payload, run_all

    cfg = RunConfig.from_sources(args)
    only = set(args.only) if args.only else None
    results = run_all(cfg.seed, only)
    text = payload_json(results_payload(results, cfg.seed))
    if args.json:
        write_atomic(args.json, text)
    print(format_table(results))
    print(f"report sha256 {digest(text)}")
    return EXIT_OK


def _matrix(text: str) -> np.ndarray:
    """A JSON matrix (rows are vectors) given inline or as a file path."""
    try:
        src = Path(text).read_text() if not text.lstrip().startswith("[") else text
    except OSError as exc:
        raise InputError(str(exc)) from None
    try:
        return np.atleast_2d(np.asarray(json.loads(src), float))
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"not a numeric JSON matrix: {exc}") from None


def cmd_angle(args) -> int:
    A = _matrix(args.a)
    out: dict = {"schema_version": "1.0", "op": args.op}
    if args.op == "norm":
        out["norm"] = blade_norm(Blade(A))
    elif args.op == "dist":
        if args.x is None:
            raise ConfigError("dist needs --x")
        V = Subspace.span(A, A.shape[1])
        out["dist"] = dist_to_subspace(np.asarray(_parse_floats(args.x)), V)
    else:
        if args.b is None:
            raise ConfigError(f"{args.op} needs --b")
        B = _matrix(args.b)
        if args.op == "inner":
            out["inner"] = gram_inner(Blade(A), Blade(B))
        else:
            V, W = Subspace.span(A, A.shape[1]), Subspace.span(B, B.shape[1])
            out["angle"] = subspace_angle(V, W)
    write_atomic(args.output, dumps(out))
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_source(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--catalog", help="catalog set name (see `cones examples list`)")
    g.add_argument("--input", help="point cloud file (.csv or .json)")
    g.add_argument("--delta", type=float, help="sampling resolution of --input")
    g.add_argument("--point", dest="points", type=_parse_floats, action="append",
                   help="base point, comma-separated (repeatable)")
    g.add_argument("--point-index", dest="point_indices", type=_parse_ints,
                   help="comma-separated sample indices used as base points")
    g.add_argument("--random-k", type=int, help="k random samples as base points (seeded)")
    s = p.add_argument_group("parameters")
    s.add_argument("--config", help="JSON file with RunConfig fields")
    s.add_argument("--seed", type=int)
    s.add_argument("--lam0", type=float)
    s.add_argument("--ratio", type=float)
    s.add_argument("--count", type=int)
    s.add_argument("--rho0", type=float)
    s.add_argument("--tau", type=float)
    s.add_argument("--grid-count", type=int)
    s.add_argument("--max-base-points", type=int)
    o = p.add_argument_group("output")
    o.add_argument("--output", "-o", help="report path (default stdout)")
    o.add_argument("--format", choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cones", description="Tangent and paratangent cones of sampled sets.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="estimate cones at base points")
    _add_source(e)
    e.add_argument("--kinds", default="all", help="all, or comma-separated of pTan-,Tan-,Tan+,pTan+")
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("classify", help="run a manifold classifier")
    _add_source(c)
    c.add_argument("--theorem", required=True, choices=THEOREMS)
    c.add_argument("--dim", type=int, help="target manifold dimension")
    c.add_argument("--defect-slack", type=float)
    c.add_argument("--sigma-tol", type=float)
    c.add_argument("--vector-space-tol", type=float)
    c.set_defaults(func=cmd_classify)

    lg = sub.add_parser("liegroup", help="recover the Lie algebra of a sampled matrix group")
    lg.add_argument("--group", required=True)
    lg.add_argument("--n", type=int)
    lg.add_argument("--budget", type=int, default=300, help="one-parameter directions per centre")
    lg.add_argument("--centers", type=int, default=5)
    lg.add_argument("--generators", help="JSON file with generator matrices (custom group)")
    lg.add_argument("--identity-cones", action="store_true", help="also compare the four cones at E")
    lg.add_argument("--config")
    lg.add_argument("--seed", type=int)
    lg.add_argument("--output", "-o")
    lg.set_defaults(func=cmd_liegroup)

    ex = sub.add_parser("examples", help="catalog listing and the acceptance corpus")
    ex.add_argument("action", choices=("list", "run-all"))
    ex.add_argument("--json", help="write machine-readable results here")
    ex.add_argument("--only", type=_parse_ints, help="comma-separated criterion ids")
    ex.add_argument("--config")
    ex.add_argument("--seed", type=int)
    ex.set_defaults(func=cmd_examples)

    a = sub.add_parser("angle", help="exterior-algebra operations on user matrices")
    a.add_argument("op", choices=("angle", "inner", "norm", "dist"))
    a.add_argument("--a", required=True, help="JSON matrix, rows are vectors (inline or file)")
    a.add_argument("--b", help="second matrix for angle/inner")
    a.add_argument("--x", help="vector for dist, comma-separated")
    a.add_argument("--output", "-o")
    a.set_defaults(func=cmd_angle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "points", None) is not None:
        args.points = [list(p) for p in args.points]
    try:
        return args.func(args)
    except ScaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ConelabError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
