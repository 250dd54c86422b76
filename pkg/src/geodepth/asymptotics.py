"""Large-sample diagnostics for the pairwise-ball depth estimator.

Closed forms exist only for the standard Gaussian, where the chance that
a ball grown from one fixed point covers the query reduces to a normal
tail. Everything else is seeded Monte Carlo: marginal and projection
variances of the pair-containment indicator, replicated CLT runs at a
fixed query, and sup-error curves over a query grid as n grows.

Two variance notions coexist on purpose. The marginal variance
4 p (1 - p) treats the pair indicator as a whole; the projection
variance 4 zeta1 conditions on one endpoint first and is the one the
sqrt(n) fluctuation of the estimator actually follows. The first can
only exceed the second, and both are reported side by side.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from . import _mc
from . import manifolds as mf
from . import samplers as smp
from .depth import _query_rows, empirical_depth, empirical_depth_batch, population_depth_mc
from .errors import CoincidentPoints, ValidationError

__all__ = [
    "CLTReport",
    "ConsistencyReport",
    "clt_experiment",
    "containment_covariance",
    "gc_experiment",
    "gx_gaussian",
    "p2_gaussian",
    "sigma2_marginal",
    "zeta1",
]

_MIN_REF_PAIRS = 1_000_000


def gx_gaussian(x, y):
    """Probability that the ball spanned by y and a fresh standard normal
    draw covers x. Equals the upper normal tail at <x - y, x> / |x - y|."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape != y.shape:
        raise ValidationError("x and y must have the same dimension")
    diff = x - y
    nrm = float(np.linalg.norm(diff))
    if nrm == 0.0:
        raise CoincidentPoints("x == y leaves the half-space undefined")
    t = float(diff @ x) / nrm
    return 0.5 * math.erfc(t / math.sqrt(2.0))


def _gx_rows(x, Y):
    diff = x[None, :] - Y
    nrm = np.linalg.norm(diff, axis=1)
    good = nrm > 0.0
    t = np.zeros(Y.shape[0])
    t[good] = (diff[good] @ x) / nrm[good]
    g = 0.5 * special.erfc(t / math.sqrt(2.0))
    return g, good


def p2_gaussian(x, k=None, N=100_000, seed=0):
    """Pair-containment probability at x under the standard normal,
    averaging the one-endpoint closed form over Monte-Carlo endpoints.

    x may be a vector, or a scalar radius combined with a dimension k
    (the point l * e1, enough by rotational symmetry). Returns the
    estimate and its standard error.
    """
    if np.isscalar(x):
        if k is None:
            raise ValidationError("scalar x needs the dimension k")
        row = np.zeros(int(k))
        row[0] = float(x)
        x = row
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    N = int(N)
    if N < 10_000:
        raise ValidationError("need at least 1e4 draws")
    gen = smp.as_stream(seed).generator()
    Y = gen.standard_normal((N, x.shape[0]))
    g, good = _gx_rows(x, Y)
    g = g[good]
    est = float(g.mean())
    se = float(g.std(ddof=1) / math.sqrt(g.shape[0]))
    return est, se


def _is_standard_gaussian(sampler):
    if not isinstance(sampler, smp.Gaussian):
        return False
    mean = np.asarray(sampler.mean)
    cov = np.asarray(sampler.cov)
    return np.all(mean == 0.0) and np.array_equal(cov, np.eye(mean.shape[0]))


def sigma2_marginal(spec, sampler, x, N, seed=0):
    """Marginal variance 4 p (1 - p) of the pair indicator at x.

    Standard Gaussian samplers take the averaged-tail route (lower
    variance); everything else estimates p by raw pair Monte Carlo.
    Returns the value and a delta-method standard error.
    """
    N = int(N)
    if _is_standard_gaussian(sampler) and N >= 10_000:
        row = _query_rows(spec, x)[0]
        p, se = p2_gaussian(row, N=N, seed=seed)
    else:
        p, se = population_depth_mc(spec, sampler, x, N, seed=seed)
    value = 4.0 * p * (1.0 - p)
    return value, 4.0 * abs(1.0 - 2.0 * p) * se + 4.0 * se * se


def _cheap_canonical(spec, rows):
    # raw draws skip Dataset validation; apply only the cheap per-kind
    # normalization the containment tests rely on
    if isinstance(spec, mf.Sphere):
        return rows / np.linalg.norm(rows, axis=1)[:, None]
    if isinstance(spec, mf.Torus):
        red = np.mod(rows, mf.TWO_PI)
        red[red >= mf.TWO_PI] -= mf.TWO_PI
        return red
    return rows


def zeta1(spec, sampler, x, N_outer=10_000, N_inner=1_000, seed=0):
    """Variance of the conditional containment probability g(Y), the
    projection component of the estimator's variance.

    Each outer draw y gets N_inner fresh partners z; the binomial noise
    of the inner fractions is debiased out of the outer sample variance.
    """
    N_outer = int(N_outer)
    N_inner = int(N_inner)
    if N_outer < 1_000 or N_inner < 1_000:
        raise ValidationError("need N_outer and N_inner >= 1e3")
    stream = smp.as_stream(seed)
    Q = _query_rows(spec, x)
    ghat = np.empty(N_outer)
    noise = np.empty(N_outer)
    chunk = max(1, 500_000 // N_inner)
    done = 0
    ci = 0
    while done < N_outer:
        take = min(chunk, N_outer - done)
        ys = _cheap_canonical(
            spec, smp._draw(sampler, stream.substream(0, ci), take)
        )
        zs = _cheap_canonical(
            spec, smp._draw(sampler, stream.substream(1, ci), take * N_inner)
        )
        X1 = np.repeat(ys, N_inner, axis=0)
        valid, test = _mc._prepare(spec, X1, zs)
        hit = test(Q)[:, 0] & valid
        c = hit.reshape(take, N_inner).sum(axis=1).astype(np.float64)
        v = valid.reshape(take, N_inner).sum(axis=1).astype(np.float64)
        v = np.maximum(v, 2.0)
        ghat[done : done + take] = c / v
        noise[done : done + take] = c * (v - c) / (v * (v - 1.0)) / v
        done += take
        ci += 1
    s2 = float(ghat.var(ddof=1))
    return max(0.0, s2 - float(noise.mean()))


def containment_covariance(spec, sampler, x, y, N, seed=0):
    """Monte-Carlo covariance of the pair indicators at two queries.

    Diagnostic only; nothing downstream consumes it.
    """
    N = int(N)
    if N < 100:
        raise ValidationError("need at least 100 pairs")
    stream = smp.as_stream(seed)
    Q = np.vstack([_query_rows(spec, x), _query_rows(spec, y)])
    X1 = _cheap_canonical(spec, smp._draw(sampler, stream.substream(0), N))
    X2 = _cheap_canonical(spec, smp._draw(sampler, stream.substream(1), N))
    valid, test = _mc._prepare(spec, X1, X2)
    hits = test(Q) & valid[:, None]
    ix = hits[valid, 0].astype(np.float64)
    iy = hits[valid, 1].astype(np.float64)
    cov = float((ix * iy).mean() - ix.mean() * iy.mean())
    infl = (ix - ix.mean()) * (iy - iy.mean())
    se = float(infl.std(ddof=1) / math.sqrt(infl.shape[0]))
    return cov, se


@dataclass(frozen=True)
class CLTReport:
    """Replicated fluctuation summary at a fixed query point."""

    query: tuple
    n: int
    reps: int
    ref_value: float
    mean_scaled: float  # mean of sqrt(n) * (estimate - reference)
    var_scaled: float  # variance of the scaled deviations
    var_raw: float  # variance of the unscaled estimates
    var_marginal: float  # 4 p (1 - p)
    var_projection: float  # 4 * zeta1
    ks_stat: float

    def __post_init__(self):
        if self.reps < 100:
            raise ValidationError("need at least 100 replications")
        for name in ("var_scaled", "var_raw", "var_marginal", "var_projection"):
            if getattr(self, name) < 0.0:
                raise ValidationError(name + " must be nonnegative")


def clt_experiment(
    spec,
    sampler,
    x,
    n,
    R,
    seed=0,
    ref=None,
    ref_pairs=_MIN_REF_PAIRS,
    var_pairs=200_000,
    proj_outer=4_000,
    proj_inner=1_000,
):
    """R fresh samples of size n, each scored at x; reports how the
    sqrt(n)-scaled deviations from a high-precision reference spread.

    ref overrides the Monte-Carlo reference value when the caller
    already has one (grids of experiments share it that way).
    """
    n = int(n)
    R = int(R)
    if R < 100:
        raise ValidationError("need at least 100 replications")
    if n < 2:
        raise ValidationError("need n >= 2")
    stream = smp.as_stream(seed)
    Q = _query_rows(spec, x)
    if ref is None:
        ref, _ = population_depth_mc(
            spec, sampler, Q[0], ref_pairs, seed=stream.substream(0)
        )
    vals = np.empty(R)
    for r in range(R):
        ds = smp.sample(sampler, stream.substream(1, r), n, manifold=spec)
        vals[r], _ = empirical_depth(ds, Q[0])
    devs = math.sqrt(n) * (vals - ref)
    var_marginal, _ = sigma2_marginal(
        spec, sampler, Q[0], var_pairs, seed=stream.substream(2)
    )
    var_projection = 4.0 * zeta1(
        spec, sampler, Q[0], proj_outer, proj_inner, seed=stream.substream(3)
    )
    sd = float(devs.std(ddof=1))
    if sd > 0.0:
        ks = float(stats.kstest(devs, "norm", args=(float(devs.mean()), sd)).statistic)
    else:
        ks = 0.0
    return CLTReport(
        query=tuple(float(v) for v in Q[0]),
        n=n,
        reps=R,
        ref_value=float(ref),
        mean_scaled=float(devs.mean()),
        var_scaled=float(devs.var(ddof=1)),
        var_raw=float(vals.var(ddof=1)),
        var_marginal=float(var_marginal),
        var_projection=float(var_projection),
        ks_stat=ks,
    )


@dataclass(frozen=True)
class ConsistencyReport:
    """Worst-case estimation error over a query grid, per sample size."""

    grid: np.ndarray
    sizes: tuple
    sup_errors: tuple
    ref_values: tuple

    def __post_init__(self):
        if self.grid.shape[0] < 1:
            raise ValidationError("grid must be nonempty")
        if len(self.sizes) != len(self.sup_errors):
            raise ValidationError("one sup-error per sample size")


def gc_experiment(spec, sampler, grid, n_sequence, seed=0, ref=None, ref_pairs=_MIN_REF_PAIRS):
    """Sup-error of the sample depth over a fixed grid as n grows.

    The reference surface comes from pair Monte Carlo with at least 1e6
    pairs per grid point, unless a precomputed ref vector is supplied.
    """
    rows = mf.point_array(spec, grid)
    if rows.shape[0] < 20:
        raise ValidationError("need a grid of at least 20 points")
    sizes = [int(v) for v in n_sequence]
    if len(sizes) < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError("n_sequence must be strictly increasing")
    if any(v < 2 for v in sizes):
        raise ValidationError("sample sizes must be >= 2")
    stream = smp.as_stream(seed)
    if ref is None:
        if ref_pairs < _MIN_REF_PAIRS:
            raise ValidationError("reference needs at least 1e6 pairs")
        ref = np.array(
            [
                population_depth_mc(
                    spec, sampler, rows[i], ref_pairs, seed=stream.substream(0, i)
                )[0]
                for i in range(rows.shape[0])
            ]
        )
    else:
        ref = np.asarray(ref, dtype=np.float64)
        if ref.shape != (rows.shape[0],):
            raise ValidationError("ref must hold one value per grid point")
    sups = []
    for idx, size in enumerate(sizes):
        ds = smp.sample(sampler, stream.substream(1, idx), size, manifold=spec)
        rep = empirical_depth_batch(ds, rows)
        sups.append(float(np.max(np.abs(rep.values - ref))))
    rows = rows.copy()
    rows.setflags(write=False)
    return ConsistencyReport(
        grid=rows,
        sizes=tuple(sizes),
        sup_errors=tuple(sups),
        ref_values=tuple(float(v) for v in ref),
    )
