"""Pair-ball depth: empirical estimator, Monte-Carlo population depth,
deepest point, and depth-along-a-ray profiles.

The empirical estimator of depth at p is the fraction of unordered sample
pairs whose connecting geodesic ball covers p. Pairs sitting on the cut
locus (antipodal sphere points, half-period torus coordinates) have no
unique ball; they are dropped from numerator and denominator alike and
reported in skipped_pairs.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from geodepth import _mc
from geodepth import manifolds as mf
from geodepth._backend import kernels
from geodepth.errors import (
    DegenerateSample,
    ManifoldMismatch,
    SamplerFailure,
    ValidationError,
)


class Dataset:
    """A validated sample on one manifold.

    Rows are stored canonicalized (torus angles reduced, sphere rows
    renormalized, SPD rows symmetrized) in a read-only array so every
    consumer sees identical bits.
    """

    __slots__ = ("spec", "coords", "_points")

    def __init__(self, spec, rows):
        if isinstance(rows, (list, tuple)) and rows and isinstance(rows[0], mf.Point):
            for p in rows:
                if p.spec != spec:
                    raise ManifoldMismatch(
                        f"point lives on {p.spec}, dataset expects {spec}"
                    )
            rows = np.stack([p.coords for p in rows])
        coords = mf.point_array(spec, rows)
        coords.setflags(write=False)
        self.spec = spec
        self.coords = coords
        self._points = None

    @classmethod
    def _from_canonical(cls, spec, coords):
        # samplers and resampling paths hand over rows that are already
        # canonical; skipping re-validation keeps bits untouched
        ds = cls.__new__(cls)
        coords = np.asarray(coords, dtype=np.float64)
        coords.setflags(write=False)
        ds.spec = spec
        ds.coords = coords
        ds._points = None
        return ds

    @property
    def n(self):
        return self.coords.shape[0]

    def __len__(self):
        return self.coords.shape[0]

    @property
    def points(self):
        if self._points is None:
            self._points = tuple(mf._wrap(self.spec, row) for row in self.coords)
        return self._points

    def subset(self, indices):
        return Dataset._from_canonical(self.spec, self.coords[np.asarray(indices)])

    def __repr__(self):
        return f"Dataset({type(self.spec).__name__}, n={self.n})"


@dataclass(frozen=True, eq=False)
class DepthReport:
    """Batch depth output: one value per query, plus bookkeeping.

    skipped_pairs counts cut-locus pairs dropped by the pair-ball methods;
    skipped_directions counts degenerate projection directions dropped by
    the projection baselines. Each is zero where it does not apply.
    """

    method: str
    values: np.ndarray
    n: int
    skipped_pairs: int
    seed: int = None
    skipped_directions: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _resolve_threads(threads):
    if threads is None:
        env = os.environ.get("GEODEPTH_THREADS", "")
        try:
            threads = int(env) if env else 1
        except ValueError:
            threads = 1
    return max(1, int(threads))


def _query_rows(spec, queries):
    if isinstance(queries, Dataset):
        if queries.spec != spec:
            raise ManifoldMismatch("query dataset lives on a different manifold")
        return queries.coords
    if isinstance(queries, mf.Point):
        queries = [queries]
    if isinstance(queries, (list, tuple)) and queries and isinstance(queries[0], mf.Point):
        for p in queries:
            if p.spec != spec:
                raise ManifoldMismatch(
                    f"query lives on {p.spec}, dataset expects {spec}"
                )
        return np.stack([p.coords for p in queries])
    return mf.point_array(spec, queries)


def _counts(ds, Q, threads):
    kind = mf.kind_code(ds.spec)
    w = mf.weight_vector(ds.spec)
    m = Q.shape[0]
    T = min(_resolve_threads(threads), m) if m else 1
    if T <= 1:
        return kernels.depth_counts(kind, ds.coords, Q, w)
    # queries are data-parallel; each worker runs the identical kernel on
    # its slice, so the merged result cannot depend on the schedule
    chunks = [c for c in np.array_split(np.arange(m), T) if c.size]
    counts = np.zeros(m, dtype=np.int64)
    skipped = None
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        futs = [
            (c, pool.submit(kernels.depth_counts, kind, ds.coords, Q[c], w))
            for c in chunks
        ]
        for c, fut in futs:
            part, sk = fut.result()
            counts[c] = part
            if skipped is None:
                skipped = sk
            elif skipped != sk:  # pragma: no cover - would mean a kernel bug
                raise AssertionError("skipped-pair count varied across workers")
    return counts, skipped


def empirical_depth(ds, p):
    """Depth of one point: (value, skipped_pairs).

    value = containing pairs / (C(n,2) - skipped_pairs). Raises
    DegenerateSample when every pair sat on the cut locus.
    """
    if ds.n < 2:
        raise ValidationError(f"depth needs n >= 2 sample points, got {ds.n}")
    Q = _query_rows(ds.spec, p)
    counts, skipped = _counts(ds, Q, threads=1)
    total = ds.n * (ds.n - 1) // 2
    denom = total - skipped
    if denom <= 0:
        raise DegenerateSample(
            f"all {total} pairs fell on the cut locus; no depth is defined"
        )
    return counts[0] / denom, skipped


def empirical_depth_batch(ds, queries, threads=None):
    """Depth of many points at once; values match per-point calls exactly."""
    if ds.n < 2:
        raise ValidationError(f"depth needs n >= 2 sample points, got {ds.n}")
    Q = _query_rows(ds.spec, queries)
    counts, skipped = _counts(ds, Q, threads)
    total = ds.n * (ds.n - 1) // 2
    denom = total - skipped
    if denom <= 0:
        raise DegenerateSample(
            f"all {total} pairs fell on the cut locus; no depth is defined"
        )
    return DepthReport(
        method="DCOPS",
        values=counts / denom,
        n=ds.n,
        skipped_pairs=int(skipped),
    )


def subsampled_depth(ds, queries, pair_budget, seed=0):
    """Depth estimated from a random subset of pairs instead of all C(n,2).

    Pairs are drawn uniformly over unordered pairs with a seeded generator;
    the estimate is the containing fraction among non-cut-locus draws. Use
    where n makes the full pair set unaffordable.
    """
    if ds.n < 2:
        raise ValidationError(f"depth needs n >= 2 sample points, got {ds.n}")
    if pair_budget < 1:
        raise ValidationError("pair_budget must be >= 1")
    Q = _query_rows(ds.spec, queries)
    gen = np.random.default_rng(np.random.PCG64(np.random.SeedSequence(seed)))
    n = ds.n
    ii = gen.integers(0, n, size=pair_budget)
    jj = gen.integers(0, n - 1, size=pair_budget)
    jj[jj >= ii] += 1
    counts, valid = _mc.count_contained(ds.spec, ds.coords[ii], ds.coords[jj], Q)
    denom = int(valid.sum())
    if denom == 0:
        raise DegenerateSample("every sampled pair fell on the cut locus")
    return DepthReport(
        method="DCOPS",
        values=counts / denom,
        n=n,
        skipped_pairs=int(pair_budget - denom),
        seed=seed,
    )


def population_depth_mc(spec, sampler, p, N, seed=0):
    """Monte-Carlo population depth: fraction of N iid pairs whose ball
    contains p, with the binomial standard error. Cut-locus pairs are
    redrawn (they carry zero probability in the models used here)."""
    if N < 100:
        raise ValidationError(f"N must be >= 100, got {N}")
    from geodepth import samplers as smp

    stream = smp.as_stream(seed)
    Q = _query_rows(spec, p)
    got = 0
    hit = 0
    rnd = 0
    while got < N:
        need = N - got
        draw = min(max(need, 1024), 200_000)
        X1 = smp.sample(sampler, stream.substream(0, rnd), draw).coords
        X2 = smp.sample(sampler, stream.substream(1, rnd), draw).coords
        contains, valid = _mc.contains_rows(spec, X1, X2, Q)
        rows = np.nonzero(valid)[0][:need]
        hit += int(contains[rows, 0].sum())
        got += rows.size
        rnd += 1
        if rnd > 1000:
            raise SamplerFailure(
                "could not collect enough non-cut-locus pairs "
                f"({got}/{N} after {rnd} rounds)"
            )
    v = hit / N
    return v, math.sqrt(v * (1.0 - v) / N)


def deepest_point(ds, pair_budget=None, seed=0):
    """Sample point of maximal depth: (index, value), lowest index on ties.

    With pair_budget set, scoring uses subsampled_depth instead of the full
    O(n^3) sweep.
    """
    if ds.n < 2:
        raise ValidationError(f"depth needs n >= 2 sample points, got {ds.n}")
    if pair_budget is None:
        report = empirical_depth_batch(ds, ds.coords)
    else:
        report = subsampled_depth(ds, ds.coords, pair_budget, seed=seed)
    idx = int(np.argmax(report.values))
    return idx, float(report.values[idx])


@dataclass(frozen=True)
class RaySpec:
    """A parameterized path for depth profiles.

    base: raw coordinates of the path's origin. direction: manifold
    interpretation varies; Euclidean/torus move linearly in coordinates,
    the sphere follows the great circle toward the tangent component of
    direction, SPD follows base^(1/2) expm(lam * direction) base^(1/2).
    grid: strictly increasing parameter values.
    """

    base: tuple
    direction: tuple
    grid: tuple

    def __init__(self, base, direction, grid):
        b = tuple(float(x) for x in np.asarray(base, dtype=np.float64).reshape(-1))
        u = tuple(float(x) for x in np.asarray(direction, dtype=np.float64).reshape(-1))
        g = tuple(float(x) for x in grid)
        if len(g) == 0:
            raise ValidationError("ray grid is empty")
        if any(not (g[i] < g[i + 1]) for i in range(len(g) - 1)):
            raise ValidationError("ray grid must be strictly increasing")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "direction", u)
        object.__setattr__(self, "grid", g)

    def points(self, spec):
        """Canonical query rows, one per grid value."""
        base = mf.validate(spec, np.asarray(self.base)).coords
        lam = np.asarray(self.grid, dtype=np.float64)
        if isinstance(spec, (mf.Euclidean, mf.Torus)):
            u = np.asarray(self.direction, dtype=np.float64)
            if u.shape != base.shape:
                raise ValidationError("direction length does not match manifold")
            raw = base[None, :] + lam[:, None] * u[None, :]
            return mf.point_array(spec, raw)
        if isinstance(spec, mf.Sphere):
            u = np.asarray(self.direction, dtype=np.float64)
            if u.shape != base.shape:
                raise ValidationError("direction length does not match manifold")
            t = u - float(np.dot(u, base)) * base
            nrm = float(np.linalg.norm(t))
            if nrm <= 1e-12:
                raise ValidationError(
                    "direction has no tangent component at the base point"
                )
            t = t / nrm
            raw = np.cos(lam)[:, None] * base[None, :] + np.sin(lam)[:, None] * t[None, :]
            return mf.point_array(spec, raw)
        k = spec.size
        H = np.asarray(self.direction, dtype=np.float64).reshape(k, k)
        H = 0.5 * (H + H.T)
        Bs = mf.spd_map("sqrt", base.reshape(k, k))
        rows = np.empty((lam.size, k * k))
        for i, l in enumerate(lam):
            E = mf.spd_map("exp", l * H)
            rows[i] = (Bs @ E @ Bs).reshape(-1)
        return mf.point_array(spec, rows)


@dataclass(frozen=True)
class ProfileRow:
    lam: float
    distance: float
    depth: float


@dataclass(frozen=True)
class ProfileResult:
    rows: tuple
    method: str

    @property
    def increases(self):
        """How many consecutive steps moved upward. Descriptive only: depth
        is expected to fall along a ray leaving the data, but nothing
        guarantees it sample by sample."""
        return sum(
            1
            for a, b in zip(self.rows, self.rows[1:])
            if b.depth > a.depth
        )


def depth_profile(source, ray, method="dcops", n=None, seed=0, threads=None):
    """Depth at each point of a ray.

    source is a Dataset, or a sampler spec (then n draws are taken with the
    given seed). Returns rows of (lambda, distance to base, depth).
    """
    from geodepth import samplers as smp

    if isinstance(source, Dataset):
        ds = source
    else:
        if n is None:
            raise ValidationError("sampling a profile source needs n")
        ds = smp.sample(source, smp.as_stream(seed), n)
    spec = ds.spec
    Q = ray.points(spec)
    method = method.lower()
    if method == "dcops":
        values = empirical_depth_batch(ds, Q, threads=threads).values
    else:
        from geodepth import baselines

        if method == "pd1":
            values = baselines.pd1(ds, Q, seed=seed).values
        elif method == "pd2":
            values = baselines.pd2(ds, Q, seed=seed).values
        elif method == "atd":
            values = baselines.atd_sphere(ds, Q, seed=seed).values
        else:
            raise ValidationError(f"unknown depth method {method!r}")
    base_pt = mf.validate(spec, np.asarray(ray.base))
    rows = tuple(
        ProfileRow(
            lam=float(l),
            distance=float(mf.distance(spec, base_pt, mf._wrap(spec, q))),
            depth=float(v),
        )
        for l, q, v in zip(ray.grid, Q, values)
    )
    return ProfileResult(rows=rows, method=method)
