"""Comparison depths: projection outlyingness (PD1), averaged random
projection depth (PD2), and an angular Tukey depth approximation on the
sphere (ATD).

PD1 and PD2 scan random directions in flat space; ATD scans candidate
hemisphere poles. All three are deterministic given their seed.
"""

from dataclasses import dataclass

import numpy as np

from geodepth import manifolds as mf
from geodepth.depth import DepthReport, _query_rows
from geodepth.errors import (
    ManifoldMismatch,
    NoValidPole,
    ValidationError,
    ZeroMAD,
)
from geodepth.samplers import RngStream


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """K unit vectors plus the seed that produced them."""

    directions: np.ndarray
    seed: int = None

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] < 1:
            raise ValidationError("need a (K, dim) array with K >= 1")
        nrm = np.linalg.norm(d, axis=1)
        if np.any(np.abs(nrm - 1.0) > 1e-10):
            raise ValidationError("directions must be unit vectors")
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    @classmethod
    def random(cls, dim, count=500, seed=0):
        """Normalized standard Gaussian directions."""
        if count < 1:
            raise ValidationError("count must be >= 1")
        gen = RngStream(int(seed), (0x0D12,)).generator()
        out = gen.standard_normal((count, dim))
        nrm = np.linalg.norm(out, axis=1)
        while np.any(nrm <= 1e-12):  # pragma: no cover - measure-zero redraw
            bad = nrm <= 1e-12
            out[bad] = gen.standard_normal((int(bad.sum()), dim))
            nrm = np.linalg.norm(out, axis=1)
        out = out / nrm[:, None]
        return cls(out, seed=int(seed))

    def __len__(self):
        return self.directions.shape[0]


def _euclid_only(ds, what):
    if not isinstance(ds.spec, mf.Euclidean):
        raise ManifoldMismatch(f"{what} is defined for Euclidean data only")


def _resolve_dirs(ds, dirs, n_directions, seed):
    if dirs is None:
        dirs = DirectionSet.random(ds.coords.shape[1], n_directions, seed)
    elif not isinstance(dirs, DirectionSet):
        dirs = DirectionSet(np.asarray(dirs, dtype=np.float64))
    if dirs.directions.shape[1] != ds.coords.shape[1]:
        raise ManifoldMismatch("direction dimension does not match the data")
    return dirs


def pd1(ds, queries, dirs=None, n_directions=500, seed=0):
    """Projection outlyingness depth: 1 / (1 + max directional z-score),
    where the score uses median and MAD of the projected sample.

    Directions whose projected sample has zero MAD carry no information
    and are skipped (reported in skipped_directions); if every direction
    degenerates the data is essentially collinear and ZeroMAD is raised.
    """
    _euclid_only(ds, "pd1")
    if ds.n < 2:
        raise ValidationError("pd1 needs n >= 2")
    dirs = _resolve_dirs(ds, dirs, n_directions, seed)
    Q = _query_rows(ds.spec, queries)
    U = dirs.directions
    proj = ds.coords @ U.T  # (n, K)
    med = np.median(proj, axis=0)
    mad = np.median(np.abs(proj - med[None, :]), axis=0)
    keep = mad > 0.0
    skipped = int((~keep).sum())
    if not np.any(keep):
        raise ZeroMAD(
            f"all {len(dirs)} directions had zero MAD; data is degenerate"
        )
    qproj = Q @ U[keep].T  # (m, K')
    ou = np.max(np.abs(qproj - med[keep][None, :]) / mad[keep][None, :], axis=1)
    return DepthReport(
        method="PD1",
        values=1.0 / (1.0 + ou),
        n=ds.n,
        skipped_pairs=0,
        seed=dirs.seed,
        skipped_directions=skipped,
    )


def pd2(ds, queries, dirs=None, n_directions=500, seed=0):
    """Averaged projection rank depth: mean over directions of F(1-F) at
    the query's projection, F being the right-continuous empirical CDF.
    Bounded by 1/4."""
    _euclid_only(ds, "pd2")
    if ds.n < 2:
        raise ValidationError("pd2 needs n >= 2")
    dirs = _resolve_dirs(ds, dirs, n_directions, seed)
    Q = _query_rows(ds.spec, queries)
    U = dirs.directions
    n = ds.n
    proj = np.sort(ds.coords @ U.T, axis=0)  # (n, K)
    qproj = Q @ U.T  # (m, K)
    m = Q.shape[0]
    acc = np.zeros(m)
    for k in range(U.shape[0]):
        F = np.searchsorted(proj[:, k], qproj[:, k], side="right") / n
        acc += F * (1.0 - F)
    return DepthReport(
        method="PD2",
        values=acc / U.shape[0],
        n=n,
        skipped_pairs=0,
        seed=dirs.seed,
    )


def atd_sphere(ds, queries, poles=None, n_poles=500, seed=0):
    """Angular Tukey depth, hemisphere-minimum form: the smallest sample
    fraction among closed hemispheres containing the query.

    The scan covers the random poles, the query itself, and one
    boundary-tight pole per sample point (the query's component orthogonal
    to that point, putting the point on the hemisphere's edge). A finite
    pole set makes this an upper bound that tightens as poles are added.
    """
    if not isinstance(ds.spec, mf.Sphere):
        raise ManifoldMismatch("atd_sphere needs data on a sphere")
    if ds.n < 1:
        raise ValidationError("atd_sphere needs n >= 1")
    poles = _resolve_dirs(ds, poles, n_poles, seed)
    Q = _query_rows(ds.spec, queries)
    X = ds.coords
    n = ds.n
    values = np.empty(Q.shape[0])
    base = poles.directions
    for qi in range(Q.shape[0]):
        p = Q[qi]
        dots = X @ p  # (n,)
        tight = p[None, :] - dots[:, None] * X
        nrm = np.linalg.norm(tight, axis=1)
        ok = nrm > 1e-12
        tight = tight[ok] / nrm[ok][:, None]
        cand = np.concatenate([base, p[None, :], tight], axis=0)
        side = cand @ p
        cand = cand[side >= 0.0]
        if cand.shape[0] == 0:  # pragma: no cover - p itself always qualifies
            raise NoValidPole("no candidate hemisphere contains the query")
        frac = (cand @ X.T >= 0.0).sum(axis=1) / n
        values[qi] = float(frac.min())
    return DepthReport(
        method="ATD",
        values=values,
        n=n,
        skipped_pairs=0,
        seed=poles.seed,
    )
