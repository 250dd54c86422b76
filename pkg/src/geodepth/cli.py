"""Command-line front end.

Three subcommands: depth scores a CSV dataset, simulate draws a named
preset and scores it, asym runs the large-sample experiments. Every
output table starts with a metadata block so the file itself records
how to regenerate it; thread count and output path are deliberately
left out of that block, letting reruns with different parallelism
produce byte-identical files.

Exit codes: 0 success, 2 input validation, 3 degenerate computation,
4 sampler failure.
"""

import argparse
import sys
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from . import __version__
from . import manifolds as mf
from .baselines import atd_sphere, pd1, pd2
from .depth import (
    Dataset,
    RaySpec,
    empirical_depth_batch,
    subsampled_depth,
)
from .asymptotics import clt_experiment, gc_experiment, p2_gaussian
from .errors import (
    CutLocus,
    DegenerateSample,
    GeodepthError,
    SamplerFailure,
    UnknownPreset,
    ValidationError,
)
from .samplers import Gaussian, Mixture, RngStream, preset, sample_labeled
from .tableio import Table, read_matrix, write_svg, write_table

__all__ = ["RunConfig", "main", "cmd_depth", "cmd_simulate", "cmd_asymptotics"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_SAMPLER = 4


def _parse_manifold(text):
    if text is None:
        raise ValidationError("--manifold is required")
    name, _, arg = text.partition(":")
    try:
        size = int(arg)
    except ValueError:
        raise ValidationError(f"bad manifold {text!r}; use name:dim")
    table = {
        "euclid": mf.Euclidean,
        "sphere": mf.Sphere,
        "torus": mf.Torus,
        "spd": mf.SPDCone,
    }
    if name not in table:
        raise ValidationError(
            f"unknown manifold {name!r}; pick one of {sorted(table)}"
        )
    return table[name](size)


def _manifold_text(spec):
    if isinstance(spec, mf.Euclidean):
        tag = f"euclid:{spec.dim}"
        if spec.weights is not None:
            tag += ":weighted"
        return tag
    if isinstance(spec, mf.Sphere):
        return f"sphere:{spec.dim}"
    if isinstance(spec, mf.Torus):
        return f"torus:{spec.dim}"
    return f"spd:{spec.size}"


def _parse_floats(text):
    try:
        return np.array([float(v) for v in text.split(",")], dtype=np.float64)
    except ValueError:
        raise ValidationError(f"bad number list {text!r}")


def _parse_ints(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"bad integer list {text!r}")


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"bad range {text!r}; use start:stop:step")
    try:
        start, stop, step = (float(v) for v in parts)
    except ValueError:
        raise ValidationError(f"bad range {text!r}")
    if step <= 0 or stop < start:
        raise ValidationError("range needs stop >= start and step > 0")
    count = int(round((stop - start) / step))
    return start + step * np.arange(count + 1)


def _parse_direction(text, dim):
    if text.startswith("e") and text[1:].isdigit():
        idx = int(text[1:])
        if not 1 <= idx <= dim:
            raise ValidationError(f"basis direction {text} out of range for dim {dim}")
        out = np.zeros(dim)
        out[idx - 1] = 1.0
        return out
    vec = _parse_floats(text)
    if vec.shape[0] != dim:
        raise ValidationError(f"direction needs {dim} entries")
    return vec


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation; the metadata block mirrors these fields."""

    command: str
    manifold: object = None
    in_path: str = None
    queries_path: str = None
    query_self: bool = False
    method: str = "dcops"
    preset_name: str = None
    n: object = None
    seed: int = 0
    directions: int = 500
    pair_budget: int = None
    profile_ray: str = None
    lam: str = None
    exp_type: str = None
    x: str = None
    reps: int = 500
    k_list: str = "1,2,5,10,50"
    l_range: str = "-4:4:0.1"
    mc_budget: int = 100_000
    ref_pairs: int = 1_000_000
    grid_size: int = 24
    fmt: str = "csv"
    out: str = None
    threads: int = None

    def __post_init__(self):
        if self.in_path is not None and self.preset_name is not None:
            raise ValidationError("pick an input file or a preset, not both")
        if self.command == "depth" and self.in_path is None:
            raise ValidationError("depth needs --in FILE")
        if self.command == "simulate" and self.preset_name is None:
            raise ValidationError("simulate needs --preset NAME")
        if self.command == "asym" and self.exp_type in ("clt", "gc") and (
            self.preset_name is None
        ):
            raise ValidationError(f"--type {self.exp_type} needs --preset NAME")
        if self.fmt not in ("csv", "json", "svg"):
            raise ValidationError(f"unknown format {self.fmt!r}")

    def command_line(self):
        """Normalized reproduction command (threads and out omitted)."""
        parts = [self.command]
        if self.manifold is not None:
            parts += ["--manifold", _manifold_text(self.manifold)]
        if self.in_path is not None:
            parts += ["--in", self.in_path]
        if self.queries_path is not None:
            parts += ["--queries", self.queries_path]
        if self.query_self:
            parts.append("--query-self")
        if self.command == "depth":
            parts += ["--method", self.method]
        if self.preset_name is not None:
            parts += ["--preset", self.preset_name]
        if self.exp_type is not None:
            parts += ["--type", self.exp_type]
        if self.n is not None:
            value = self.n
            if isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            parts += ["--n", str(value)]
        if self.x is not None:
            parts += ["--x", self.x]
        if self.profile_ray is not None:
            parts += ["--profile-ray", self.profile_ray]
        if self.lam is not None:
            parts += ["--lambda", self.lam]
        if self.exp_type == "clt":
            parts += ["--reps", str(self.reps)]
        if self.exp_type == "variance-curve":
            parts += ["--k", self.k_list, "--l", self.l_range]
        if self.pair_budget is not None:
            parts += ["--pair-budget", str(self.pair_budget)]
        parts += ["--seed", str(self.seed), "--format", self.fmt]
        return " ".join(parts)

    def meta(self, **extra):
        out = {
            "generator": f"geodepth {__version__}",
            "command": self.command_line(),
            "seed": self.seed,
        }
        if self.manifold is not None:
            out["manifold"] = _manifold_text(self.manifold)
        out.update(extra)
        return out


def _default_out(cfg):
    ext = cfg.fmt if cfg.fmt != "svg" else "svg"
    return f"geodepth-{cfg.command}.{ext}"


def _emit(cfg, table, svg_spec):
    out = cfg.out or _default_out(cfg)
    if cfg.fmt == "svg":
        if svg_spec is None:
            raise ValidationError(f"{cfg.command} has no svg form; use csv or json")
        x, ys, mode, title = svg_spec
        write_svg(table, out, x, ys, mode=mode, title=title)
    else:
        write_table(table, out, fmt=cfg.fmt)
    return out


# ---------------------------------------------------------------------------
# depth
# ---------------------------------------------------------------------------


def _load_dataset(spec, path):
    X = read_matrix(path, expect_cols=mf.flat_len(spec))
    try:
        return Dataset(spec, X)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}")


def cmd_depth(cfg):
    spec = cfg.manifold
    if spec is None:
        raise ValidationError("--manifold is required")
    ds = _load_dataset(spec, cfg.in_path)
    if cfg.query_self and cfg.queries_path is not None:
        raise ValidationError("pick --queries FILE or --query-self, not both")
    if cfg.query_self:
        Q = ds.coords
    elif cfg.queries_path is not None:
        Q = read_matrix(cfg.queries_path, expect_cols=mf.flat_len(spec))
        Q = mf.point_array(spec, Q)
    else:
        raise ValidationError("need --queries FILE or --query-self")

    method = cfg.method
    extra_meta = {}
    if method == "dcops":
        if cfg.pair_budget is not None:
            rep = subsampled_depth(ds, Q, cfg.pair_budget, seed=cfg.seed)
            extra_meta["pair_budget"] = cfg.pair_budget
        else:
            rep = empirical_depth_batch(ds, Q, threads=cfg.threads)
    elif method == "pd1":
        rep = pd1(ds, Q, n_directions=cfg.directions, seed=cfg.seed)
        extra_meta["skipped_directions"] = rep.skipped_directions
    elif method == "pd2":
        rep = pd2(ds, Q, n_directions=cfg.directions, seed=cfg.seed)
    elif method == "atd":
        rep = atd_sphere(ds, Q, n_poles=cfg.directions, seed=cfg.seed)
    else:
        raise ValidationError(f"unknown method {method!r}")

    rows = [
        (qi, float(rep.values[qi]), rep.method, rep.n, rep.skipped_pairs)
        for qi in range(len(rep.values))
    ]
    table = Table(
        ("query_index", "depth", "method", "n", "skipped_pairs"),
        rows,
        cfg.meta(**extra_meta),
    )
    out = _emit(cfg, table, ("query_index", ["depth"], "scatter", f"{rep.method} depth"))
    return table, out


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_REFERENCE_BUILDERS = {
    "sphere-vmf": lambda spec: np.array([1.0, 0.0, 0.0]),
    "sphere-vmf-mixture": lambda spec: np.array([1.0, 0.0, 0.0]),
    "torus-mvm-mixture": lambda spec: np.array([np.pi / 2, 0.0]),
    "spd-wishart": lambda spec: (20.0 * np.eye(3)).reshape(-1),
    "spd-wishart-mixture": lambda spec: (20.0 * np.eye(3)).reshape(-1),
}


def _preset_reference(name, spec):
    builder = _REFERENCE_BUILDERS.get(name)
    if builder is not None:
        return builder(spec)
    return np.zeros(mf.flat_len(spec))  # gaussian families center at the origin


def _is_standard_gauss_preset(sampler):
    return (
        isinstance(sampler, Gaussian)
        and np.all(np.asarray(sampler.mean) == 0.0)
        and np.array_equal(np.asarray(sampler.cov), np.eye(len(sampler.mean)))
    )


def cmd_simulate(cfg):
    spec, sampler = preset(cfg.preset_name)
    n = int(cfg.n) if cfg.n is not None else 100
    if n < 2:
        raise ValidationError("need --n >= 2")
    ds, labels = sample_labeled(sampler, cfg.seed, n, manifold=spec)

    if cfg.profile_ray is not None:
        if cfg.lam is None:
            raise ValidationError("--profile-ray needs --lambda start:stop:step")
        if not isinstance(spec, mf.Euclidean):
            raise ValidationError("profile rays are for flat presets")
        grid = _parse_range(cfg.lam)
        base = _preset_reference(cfg.preset_name, spec)
        direction = _parse_direction(cfg.profile_ray, spec.dim)
        ray = RaySpec(base=base, direction=direction, grid=grid)
        pts = ray.points(spec)
        rep = empirical_depth_batch(ds, pts, threads=cfg.threads)
        rep1 = pd1(ds, pts, n_directions=cfg.directions, seed=cfg.seed)
        rep2 = pd2(ds, pts, n_directions=cfg.directions, seed=cfg.seed)
        base_pt = mf.validate(spec, base)
        cols = ["lambda", "dist", "depth_x2", "pd1", "pd2_x4"]
        tail = None
        if _is_standard_gauss_preset(sampler):
            # reference curve: mass outside the centered ball of radius l
            cols.append("tail_ref")
            tail = _scipy_stats.chi2.sf(np.maximum(grid, 0.0) ** 2, spec.dim)
        rows = []
        for i, lam in enumerate(grid):
            row = [
                float(lam),
                float(mf.distance(spec, base_pt, mf.validate(spec, pts[i]))),
                2.0 * float(rep.values[i]),
                float(rep1.values[i]),
                4.0 * float(rep2.values[i]),
            ]
            if tail is not None:
                row.append(float(tail[i]))
            rows.append(tuple(row))
        table = Table(
            tuple(cols),
            rows,
            cfg.meta(preset=cfg.preset_name, n=n, ray=cfg.profile_ray),
        )
        ys = [c for c in cols[2:]]
        out = _emit(cfg, table, ("lambda", ys, "line", f"{cfg.preset_name} profile"))
        return table, out

    if cfg.pair_budget is not None:
        rep = subsampled_depth(ds, ds.coords, cfg.pair_budget, seed=cfg.seed)
    else:
        rep = empirical_depth_batch(ds, ds.coords, threads=cfg.threads)
    ref_row = _preset_reference(cfg.preset_name, spec)
    ref_pt = mf.validate(spec, ref_row)
    labeled = isinstance(sampler, Mixture)
    cols = ["index", "dist_to_ref", "depth"] + (["component"] if labeled else [])
    rows = []
    for i in range(ds.n):
        row = [
            i,
            float(mf.distance(spec, ref_pt, ds.points[i])),
            float(rep.values[i]),
        ]
        if labeled:
            row.append(int(labels[i]))
        rows.append(tuple(row))
    table = Table(
        tuple(cols),
        rows,
        cfg.meta(
            preset=cfg.preset_name,
            n=n,
            reference=",".join(repr(float(v)) for v in ref_row),
            skipped_pairs=rep.skipped_pairs,
        ),
    )
    out = _emit(
        cfg, table, ("dist_to_ref", ["depth"], "scatter", cfg.preset_name)
    )
    return table, out


# ---------------------------------------------------------------------------
# asym
# ---------------------------------------------------------------------------


def cmd_asymptotics(cfg):
    if cfg.exp_type == "clt":
        spec, sampler = preset(cfg.preset_name)
        x = (
            _parse_floats(cfg.x)
            if cfg.x is not None
            else np.zeros(mf.flat_len(spec))
        )
        n = int(cfg.n) if cfg.n is not None else 500
        rep = clt_experiment(
            spec,
            sampler,
            x,
            n=n,
            R=cfg.reps,
            seed=cfg.seed,
            ref_pairs=cfg.ref_pairs,
            var_pairs=cfg.mc_budget,
        )
        cols = (
            "n",
            "reps",
            "ref_value",
            "mean_scaled",
            "var_scaled",
            "var_raw",
            "var_marginal",
            "var_projection",
            "ks_stat",
        )
        rows = [
            (
                rep.n,
                rep.reps,
                rep.ref_value,
                rep.mean_scaled,
                rep.var_scaled,
                rep.var_raw,
                rep.var_marginal,
                rep.var_projection,
                rep.ks_stat,
            )
        ]
        table = Table(
            cols,
            rows,
            cfg.meta(
                preset=cfg.preset_name,
                query=",".join(repr(v) for v in rep.query),
            ),
        )
        out = _emit(cfg, table, None)
        return table, out

    if cfg.exp_type == "gc":
        spec, sampler = preset(cfg.preset_name)
        sizes = cfg.n if isinstance(cfg.n, (list, tuple)) else _parse_ints(str(cfg.n))
        from .samplers import as_stream, sample

        grid = sample(
            sampler,
            as_stream(cfg.seed).substream(0xA110),
            cfg.grid_size,
            manifold=spec,
        ).coords
        rep = gc_experiment(
            spec, sampler, grid, sizes, seed=cfg.seed, ref_pairs=cfg.ref_pairs
        )
        rows = list(zip(rep.sizes, rep.sup_errors))
        table = Table(
            ("n", "sup_error"),
            rows,
            cfg.meta(
                preset=cfg.preset_name,
                grid_size=cfg.grid_size,
                ref_pairs=cfg.ref_pairs,
            ),
        )
        out = _emit(cfg, table, ("n", ["sup_error"], "line", "sup-error vs n"))
        return table, out

    if cfg.exp_type == "variance-curve":
        ks = _parse_ints(cfg.k_list)
        ls = _parse_range(cfg.l_range) if ":" in cfg.l_range else _parse_floats(cfg.l_range)
        rows = []
        for ki, k in enumerate(ks):
            for li, l in enumerate(ls):
                p, se = p2_gaussian(
                    float(l),
                    k=k,
                    N=cfg.mc_budget,
                    seed=RngStream(cfg.seed, (ki, li)),
                )
                sig = 4.0 * p * (1.0 - p)
                rows.append(
                    (k, float(l), sig, 4.0 * abs(1.0 - 2.0 * p) * se + 4.0 * se * se)
                )
        table = Table(
            ("k", "l", "sigma2", "se"),
            rows,
            cfg.meta(N=cfg.mc_budget),
        )
        if cfg.fmt == "svg":
            # pivot wide so each k becomes one line series
            wide_cols = ["l"] + [f"k{k}" for k in ks]
            wide = []
            for li, l in enumerate(ls):
                row = [float(l)] + [rows[ki * len(ls) + li][2] for ki in range(len(ks))]
                wide.append(tuple(row))
            table_w = Table(tuple(wide_cols), wide, table.meta)
            out = _emit(
                cfg,
                table_w,
                ("l", wide_cols[1:], "line", "marginal variance"),
            )
            return table_w, out
        out = _emit(cfg, table, None)
        return table, out

    raise ValidationError(
        f"unknown experiment type {cfg.exp_type!r}; pick clt, gc, or variance-curve"
    )


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="geodepth",
        description="Geodesic pair-ball depth: scoring, simulation, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--format", dest="fmt", default="csv")
        p.add_argument("--out", default=None)
        p.add_argument("--config", default=None, help="key = value file of defaults")

    p_depth = sub.add_parser("depth", help="score a CSV dataset")
    p_depth.add_argument("--manifold", default=None, help="euclid:K sphere:K torus:D spd:K")
    p_depth.add_argument("--in", dest="in_path", default=None)
    p_depth.add_argument("--queries", dest="queries_path", default=None)
    p_depth.add_argument("--query-self", action="store_true")
    p_depth.add_argument("--method", default="dcops", help="dcops pd1 pd2 atd")
    p_depth.add_argument("--directions", type=int, default=500)
    p_depth.add_argument("--pair-budget", type=int, default=None)
    common(p_depth)

    p_sim = sub.add_parser("simulate", help="draw a preset and score it")
    p_sim.add_argument("--preset", dest="preset_name", default=None)
    p_sim.add_argument("--n", default=None)
    p_sim.add_argument("--directions", type=int, default=500)
    p_sim.add_argument("--pair-budget", type=int, default=None)
    p_sim.add_argument("--profile-ray", default=None, help="e1 or comma vector")
    p_sim.add_argument("--lambda", dest="lam", default=None, help="start:stop:step")
    common(p_sim)

    p_asym = sub.add_parser("asym", help="large-sample experiments")
    p_asym.add_argument("--type", dest="exp_type", default=None)
    p_asym.add_argument("--preset", dest="preset_name", default=None)
    p_asym.add_argument("--x", default=None, help="query point, comma floats")
    p_asym.add_argument("--n", default=None, help="size or comma list")
    p_asym.add_argument("--reps", type=int, default=500)
    p_asym.add_argument("--k", dest="k_list", default="1,2,5,10,50")
    p_asym.add_argument("--l", dest="l_range", default="-4:4:0.1")
    p_asym.add_argument("--N", dest="mc_budget", type=int, default=100_000)
    p_asym.add_argument("--ref-pairs", type=int, default=1_000_000)
    p_asym.add_argument("--grid-size", type=int, default=24)
    common(p_asym)
    return parser


def _config_tokens(path):
    tokens = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValidationError(f"{path}: bad config line {line!r}")
            key = key.strip().replace("_", "-")
            val = val.strip().strip('"').strip("'")
            if key in ("query-self",):
                if val.lower() in ("1", "true", "yes"):
                    tokens.append("--query-self")
            else:
                tokens.extend([f"--{key}", val])
    return tokens


def _namespace_to_config(ns):
    n = getattr(ns, "n", None)
    if isinstance(n, str) and "," in n:
        n = _parse_ints(n)
    manifold = getattr(ns, "manifold", None)
    return RunConfig(
        command=ns.command,
        manifold=_parse_manifold(manifold) if manifold else None,
        in_path=getattr(ns, "in_path", None),
        queries_path=getattr(ns, "queries_path", None),
        query_self=getattr(ns, "query_self", False),
        method=getattr(ns, "method", "dcops"),
        preset_name=getattr(ns, "preset_name", None),
        n=n,
        seed=ns.seed,
        directions=getattr(ns, "directions", 500),
        pair_budget=getattr(ns, "pair_budget", None),
        profile_ray=getattr(ns, "profile_ray", None),
        lam=getattr(ns, "lam", None),
        exp_type=getattr(ns, "exp_type", None),
        x=getattr(ns, "x", None),
        reps=getattr(ns, "reps", 500),
        k_list=getattr(ns, "k_list", "1,2,5,10,50"),
        l_range=getattr(ns, "l_range", "-4:4:0.1"),
        mc_budget=getattr(ns, "mc_budget", 100_000),
        ref_pairs=getattr(ns, "ref_pairs", 1_000_000),
        grid_size=getattr(ns, "grid_size", 24),
        fmt=ns.fmt,
        out=ns.out,
        threads=ns.threads,
    )


_DISPATCH = {
    "depth": cmd_depth,
    "simulate": cmd_simulate,
    "asym": cmd_asymptotics,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.config is not None:
            # config supplies defaults; explicit flags come later and win
            merged = [argv[0]] + _config_tokens(ns.config) + argv[1:]
            clean = []
            skip = False
            for tok in merged:
                if skip:
                    skip = False
                    continue
                if tok == "--config":
                    skip = True
                    continue
                clean.append(tok)
            ns = parser.parse_args(clean)
        cfg = _namespace_to_config(ns)
        table, out = _DISPATCH[cfg.command](cfg)
        print(f"wrote {out} ({len(table.rows)} rows)")
        return EXIT_OK
    except (UnknownPreset, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DegenerateSample, CutLocus) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except SamplerFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except GeodepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
