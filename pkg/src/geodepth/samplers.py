"""Seeded samplers for every model the experiments use.

All randomness flows through RngStream, a frozen (seed, path) pair mapped
onto numpy's SeedSequence/PCG64. Substreams derive new independent streams
by extending the path, so parallel or multi-part draws stay reproducible
no matter the execution order.
"""

import math
from dataclasses import dataclass

import numpy as np

from geodepth import manifolds as mf
from geodepth.depth import Dataset
from geodepth.errors import (
    RejectionStall,
    UnknownPreset,
    ValidationError,
    WrongDimension,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream: a 64-bit seed plus a derivation path.

    generator() builds a fresh PCG64 Generator from the same state every
    time, so a stream can be replayed; substream(i, ...) derives a child
    stream that never collides with the parent or siblings.
    """

    seed: int
    path: tuple = ()

    def __post_init__(self):
        s = int(self.seed)
        if not (0 <= s < 2**64):
            raise ValidationError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", s)
        object.__setattr__(self, "path", tuple(int(x) for x in self.path))

    def substream(self, *idx):
        return RngStream(self.seed, self.path + idx)

    def generator(self):
        ss = np.random.SeedSequence((self.seed,) + self.path)
        return np.random.Generator(np.random.PCG64(ss))


def as_stream(rng):
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise ValidationError(f"expected an RngStream or integer seed, got {rng!r}")


def _frozen_array(obj, name, arr):
    a = np.asarray(arr, dtype=np.float64)
    a.setflags(write=False)
    object.__setattr__(obj, name, a)
    return a


class SamplerSpec:
    """Marker base for sampler parameterizations."""

    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Gaussian(SamplerSpec):
    """Multivariate normal with mean vector and covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen_array(self, "mean", np.reshape(self.mean, -1))
        cov = _frozen_array(self, "cov", self.cov)
        k = mean.size
        if cov.shape != (k, k):
            raise WrongDimension(f"cov shape {cov.shape} does not match mean ({k})")
        if np.max(np.abs(cov - cov.T)) > 1e-9 * max(1.0, float(np.max(np.abs(cov)))):
            raise ValidationError("covariance must be symmetric")

    @property
    def manifold(self):
        return mf.Euclidean(self.mean.size)


@dataclass(frozen=True, eq=False)
class VMF(SamplerSpec):
    """Von Mises-Fisher on the unit sphere: mean direction mu, concentration
    kappa >= 0 (kappa = 0 is the uniform law)."""

    mu: np.ndarray
    kappa: float

    def __post_init__(self):
        mu = np.reshape(np.asarray(self.mu, dtype=np.float64), -1)
        nrm = float(np.linalg.norm(mu))
        if abs(nrm - 1.0) > 1e-6:
            raise ValidationError(f"mu must be unit norm, got {nrm:.6g}")
        _frozen_array(self, "mu", mu / nrm)
        kappa = float(self.kappa)
        if kappa < 0.0:
            raise ValidationError("kappa must be >= 0")
        object.__setattr__(self, "kappa", kappa)

    @property
    def manifold(self):
        return mf.Sphere(self.mu.size)


@dataclass(frozen=True, eq=False)
class MVM(SamplerSpec):
    """Multivariate von Mises on the torus: per-coordinate centers mu and
    concentrations kappa, plus the pairwise coupling matrix delta
    (symmetric, zero diagonal)."""

    mu: np.ndarray
    kappa: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        mu = np.mod(np.reshape(np.asarray(self.mu, dtype=np.float64), -1), TWO_PI)
        mu[mu >= TWO_PI] -= TWO_PI
        _frozen_array(self, "mu", mu)
        kappa = _frozen_array(self, "kappa", np.reshape(self.kappa, -1))
        delta = _frozen_array(self, "delta", self.delta)
        d = mu.size
        if kappa.size != d:
            raise WrongDimension("kappa length does not match mu")
        if np.any(kappa < 0.0):
            raise ValidationError("kappa entries must be >= 0")
        if delta.shape != (d, d):
            raise WrongDimension("delta must be square matching mu")
        if np.max(np.abs(delta - delta.T)) != 0.0:
            raise ValidationError("delta must be exactly symmetric")
        if np.any(np.diag(delta) != 0.0):
            raise ValidationError("delta diagonal must be exactly zero")

    @property
    def manifold(self):
        return mf.Torus(self.mu.size)


@dataclass(frozen=True, eq=False)
class Wishart(SamplerSpec):
    """Wishart: sum of dof outer products of N(0, scale) vectors."""

    scale: np.ndarray
    dof: int

    def __post_init__(self):
        scale = _frozen_array(self, "scale", self.scale)
        k = scale.shape[0]
        if scale.shape != (k, k):
            raise WrongDimension("scale must be square")
        if np.max(np.abs(scale - scale.T)) > 1e-9 * max(1.0, float(np.max(np.abs(scale)))):
            raise ValidationError("scale must be symmetric")
        w = np.linalg.eigvalsh(0.5 * (scale + scale.T))
        if w[0] <= 0.0:
            raise ValidationError("scale must be positive definite")
        dof = int(self.dof)
        if dof < k:
            raise ValidationError(f"dof must be >= matrix size ({k}), got {dof}")
        object.__setattr__(self, "dof", dof)

    @property
    def manifold(self):
        return mf.SPDCone(self.scale.shape[0])


@dataclass(frozen=True, eq=False)
class PointMass(SamplerSpec):
    """Degenerate sampler: every draw is the same point."""

    manifold_spec: mf.ManifoldSpec
    coords: np.ndarray

    def __post_init__(self):
        p = mf.validate(self.manifold_spec, np.asarray(self.coords, dtype=np.float64))
        object.__setattr__(self, "coords", p.coords)

    @property
    def manifold(self):
        return self.manifold_spec


@dataclass(frozen=True, eq=False)
class Mixture(SamplerSpec):
    """Finite mixture: categorical component choice, then a component draw."""

    components: tuple
    weights: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValidationError("mixture needs at least one component")
        wts = tuple(float(w) for w in self.weights)
        if len(wts) != len(comps):
            raise WrongDimension("weights length does not match components")
        if any(w < 0.0 for w in wts):
            raise ValidationError("mixture weights must be >= 0")
        if abs(sum(wts) - 1.0) > 1e-12:
            raise ValidationError(f"mixture weights sum to {sum(wts)!r}, not 1")
        first = comps[0].manifold
        for c in comps[1:]:
            if c.manifold != first:
                raise ValidationError("mixture components live on different manifolds")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", wts)

    @property
    def manifold(self):
        return self.components[0].manifold


# ---------------------------------------------------------------------------
# drawing
# ---------------------------------------------------------------------------


def _chol_factor(cov):
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        # positive semidefinite (or nearly so): eigen square root
        w, V = np.linalg.eigh(cov)
        return V * np.sqrt(np.clip(w, 0.0, None))


def _draw_gaussian(s, stream, n):
    gen = stream.generator()
    L = _chol_factor(s.cov)
    Z = gen.standard_normal((n, s.mean.size))
    return s.mean[None, :] + Z @ L.T


def _draw_vmf(s, stream, n):
    gen = stream.generator()
    mu = s.mu
    d = mu.size
    kappa = s.kappa
    if kappa == 0.0:
        Z = gen.standard_normal((n, d))
        return Z / np.linalg.norm(Z, axis=1)[:, None]
    # Ulrich-Wood: sample the cosine W against mu, then a uniform tangent
    m = d - 1
    b = m / (math.sqrt(4.0 * kappa * kappa + m * m) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + m * math.log(1.0 - x0 * x0)
    W = np.empty(n)
    filled = 0
    while filled < n:
        todo = n - filled
        batch = max(todo, 256)
        Z = gen.beta(0.5 * m, 0.5 * m, size=batch)
        U = gen.uniform(size=batch)
        w = (1.0 - (1.0 + b) * Z) / (1.0 - (1.0 - b) * Z)
        keep = kappa * w + m * np.log(1.0 - x0 * w) - c >= np.log(U)
        take = w[keep][:todo]
        W[filled : filled + take.size] = take
        filled += take.size
    T = gen.standard_normal((n, d))
    T = T - (T @ mu)[:, None] * mu[None, :]
    nrm = np.linalg.norm(T, axis=1)
    while np.any(nrm <= 1e-12):  # pragma: no cover - measure-zero redraw
        bad = nrm <= 1e-12
        T[bad] = gen.standard_normal((int(bad.sum()), d))
        T[bad] -= (T[bad] @ mu)[:, None] * mu[None, :]
        nrm = np.linalg.norm(T, axis=1)
    T = T / nrm[:, None]
    return W[:, None] * mu[None, :] + np.sqrt(np.clip(1.0 - W * W, 0.0, None))[:, None] * T


def _draw_mvm(s, stream, n):
    gen = stream.generator()
    mu = s.mu
    kap = s.kappa
    D = s.delta
    d = mu.size
    half_pen = 0.5 * float(np.sum(np.abs(D)))
    out = np.empty((n, d))
    filled = 0
    proposals = 0
    accepts = 0
    while filled < n:
        batch = max(n - filled, 512)
        theta = gen.vonmises(mu[None, :], kap[None, :], size=(batch, d))
        sin_dev = np.sin(theta - mu[None, :])
        quad = 0.5 * np.einsum("bi,ij,bj->b", sin_dev, D, sin_dev)
        keep = np.log(gen.uniform(size=batch)) < quad - half_pen
        proposals += batch
        accepts += int(keep.sum())
        take = theta[keep][: n - filled]
        out[filled : filled + take.shape[0]] = take
        filled += take.shape[0]
        if proposals >= 100_000 and accepts / proposals < 1e-4:
            raise RejectionStall(
                f"mvm acceptance rate {accepts / proposals:.2e} after "
                f"{proposals} proposals; coupling too extreme"
            )
    return out


def _draw_wishart(s, stream, n):
    gen = stream.generator()
    k = s.scale.shape[0]
    L = _chol_factor(s.scale)
    Z = gen.standard_normal((n, s.dof, k)) @ L.T
    S = np.einsum("nmi,nmj->nij", Z, Z)
    S = 0.5 * (S + S.transpose(0, 2, 1))
    return S.reshape(n, k * k)


def _draw_mixture_labeled(s, stream, n):
    gen = stream.generator()
    labels = gen.choice(len(s.components), size=n, p=np.asarray(s.weights))
    out = np.empty((n, mf.flat_len(s.manifold)))
    for ci, comp in enumerate(s.components):
        mask = labels == ci
        cnt = int(mask.sum())
        if cnt:
            out[mask] = _draw(comp, stream.substream(ci + 1), cnt)
    return out, labels.astype(np.int64)


def _draw_mixture(s, stream, n):
    return _draw_mixture_labeled(s, stream, n)[0]


def _draw(sampler, stream, n):
    if isinstance(sampler, Gaussian):
        return _draw_gaussian(sampler, stream, n)
    if isinstance(sampler, VMF):
        return _draw_vmf(sampler, stream, n)
    if isinstance(sampler, MVM):
        return _draw_mvm(sampler, stream, n)
    if isinstance(sampler, Wishart):
        return _draw_wishart(sampler, stream, n)
    if isinstance(sampler, PointMass):
        return np.tile(sampler.coords, (n, 1))
    if isinstance(sampler, Mixture):
        return _draw_mixture(sampler, stream, n)
    raise ValidationError(f"not a sampler spec: {sampler!r}")


def sample(sampler, rng, n, manifold=None):
    """Draw n points; returns a validated Dataset.

    manifold overrides the sampler's default target (used when the same
    draws should live on a weighted Euclidean space). Same (sampler, rng,
    n) always yields the same Dataset.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    stream = as_stream(rng)
    spec = sampler.manifold if manifold is None else manifold
    if mf.kind_code(spec) != mf.kind_code(sampler.manifold) or mf.flat_len(
        spec
    ) != mf.flat_len(sampler.manifold):
        raise ValidationError(
            f"manifold override {spec} is incompatible with sampler on "
            f"{sampler.manifold}"
        )
    return Dataset(spec, _draw(sampler, stream, int(n)))


def sample_labeled(sampler, rng, n, manifold=None):
    """Like sample(), also returning the mixture component index of each
    point (all zeros when the sampler is not a mixture). The draw is
    bit-identical to sample() with the same arguments."""
    ds = sample(sampler, rng, n, manifold=manifold)
    if isinstance(sampler, Mixture):
        stream = as_stream(rng)
        _, labels = _draw_mixture_labeled(sampler, stream, int(n))
    else:
        labels = np.zeros(ds.n, dtype=np.int64)
    labels.setflags(write=False)
    return ds, labels


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _preset_table():
    e1_s2 = (1.0, 0.0, 0.0)
    cross = np.array([[0.0, 1.0], [1.0, 0.0]])
    table = {}

    table["torus-mvm-mixture"] = lambda: (
        mf.Torus(2),
        Mixture(
            (
                MVM((math.pi / 2.0, 0.0), (20.0, 20.0), cross),
                MVM((7.0 * math.pi / 4.0, 0.0), (100.0, 100.0), cross),
            ),
            (0.9, 0.1),
        ),
    )
    table["sphere-vmf"] = lambda: (mf.Sphere(3), VMF(e1_s2, 15.0))
    table["sphere-vmf-mixture"] = lambda: (
        mf.Sphere(3),
        Mixture((VMF(e1_s2, 10.0), VMF((0.0, 0.0, 1.0), 50.0)), (0.9, 0.1)),
    )
    table["spd-wishart"] = lambda: (mf.SPDCone(3), Wishart(np.eye(3), 20))
    table["spd-wishart-mixture"] = lambda: (
        mf.SPDCone(3),
        Mixture(
            (Wishart(np.eye(3), 20), Wishart(np.eye(3) / 10.0, 50)),
            (0.9, 0.1),
        ),
    )

    def gauss(k):
        return lambda: (mf.Euclidean(k), Gaussian(np.zeros(k), np.eye(k)))

    table["gauss-k2"] = gauss(2)
    table["gauss-k5"] = gauss(5)
    table["gauss-k20"] = gauss(20)
    table["gauss-contaminated-k10"] = lambda: (
        mf.Euclidean(10),
        Mixture(
            (
                Gaussian(np.zeros(10), np.eye(10)),
                Gaussian(2.0 * np.ones(10), np.eye(10)),
            ),
            (0.9, 0.1),
        ),
    )

    def fda():
        # 50-point grid on [0, 1]; squared-exponential covariance with
        # length scale 0.2 plus a tiny jitter; trapezoid quadrature weights
        # turn coordinates into a discretized L2 space
        t = np.linspace(0.0, 1.0, 50)
        K = np.exp(-((t[:, None] - t[None, :]) ** 2) / (2.0 * 0.2**2))
        K = K + 1e-10 * np.eye(50)
        h = t[1] - t[0]
        w = np.full(50, h)
        w[0] = w[-1] = h / 2.0
        return (
            mf.Euclidean(50, weights=tuple(w)),
            Gaussian(np.zeros(50), K),
        )

    table["fda-gp50"] = fda
    return table


_PRESETS = None

PRESET_DESCRIPTIONS = {
    "torus-mvm-mixture": "0.9/0.1 mix of coupled bivariate von Mises on the 2-torus",
    "sphere-vmf": "von Mises-Fisher on S2, kappa 15, mean (1,0,0)",
    "sphere-vmf-mixture": "0.9 vMF(e1, 10) + 0.1 vMF(e3, 50) on S2",
    "spd-wishart": "Wishart(I3, 20) on the 3x3 SPD cone",
    "spd-wishart-mixture": "0.9 Wishart(I3, 20) + 0.1 Wishart(I3/10, 50)",
    "gauss-k2": "standard normal in R^2",
    "gauss-k5": "standard normal in R^5",
    "gauss-k20": "standard normal in R^20",
    "gauss-contaminated-k10": "0.9 N(0, I10) + 0.1 N(2*ones, I10)",
    "fda-gp50": "Gaussian process curves on a 50-point grid, trapezoid-weighted L2",
}


def preset_names():
    return tuple(sorted(PRESET_DESCRIPTIONS))


def preset(name):
    """Named (manifold, sampler) pair for the standard experiments."""
    global _PRESETS
    if _PRESETS is None:
        _PRESETS = _preset_table()
    try:
        build = _PRESETS[name]
    except KeyError:
        known = ", ".join(preset_names())
        raise UnknownPreset(f"unknown preset {name!r}; known: {known}") from None
    return build()
