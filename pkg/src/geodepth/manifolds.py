"""Manifold geometry: distance, geodesic midpoint, ball containment.

Four geometries share one small interface: flat space (optionally with a
diagonal inner-product weighting, which is how discretized function data
comes in), the unit sphere, the flat torus with 2*pi-periodic coordinates,
and the cone of symmetric positive definite matrices under the
affine-invariant metric.

Coordinate canonicalization happens in exactly one place (point_array),
with numpy elementwise arithmetic only, so the canonical form of a dataset
never depends on which kernel backend is active.
"""

import math
from dataclasses import dataclass

import numpy as np

from geodepth._backend import kernels
from geodepth.errors import (
    CutLocus,
    ManifoldMismatch,
    NotPositiveDefinite,
    NotSymmetric,
    NotUnitNorm,
    ValidationError,
    WrongDimension,
)

TWO_PI = 2.0 * math.pi

UNIT_NORM_TOL = 1e-6
SYMMETRY_RTOL = 1e-9
EIG_FLOOR_RTOL = 1e-10
BALL_SLACK = 1e-12


class ManifoldSpec:
    """Marker base for the four concrete geometries."""

    __slots__ = ()


@dataclass(frozen=True)
class Euclidean(ManifoldSpec):
    """Flat k-space. Optional strictly positive weights turn the inner
    product into sum(w_i * x_i * y_i), a trapezoid-rule stand-in for an
    L2 inner product on a grid."""

    dim: int
    weights: tuple = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"euclidean dim must be >= 1, got {self.dim}")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != self.dim:
                raise WrongDimension(
                    f"weights length {len(w)} != dim {self.dim}"
                )
            if any(not (x > 0.0) for x in w):
                raise ValidationError("weights must be strictly positive")
            object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class Sphere(ManifoldSpec):
    """Unit sphere in R^dim (dim is the ambient length, so dim=3 is the
    ordinary sphere S^2)."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError(f"sphere ambient dim must be >= 2, got {self.dim}")


@dataclass(frozen=True)
class Torus(ManifoldSpec):
    """Flat torus, dim circular coordinates in [0, 2*pi)."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"torus dim must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class SPDCone(ManifoldSpec):
    """Symmetric positive definite size x size matrices, affine-invariant
    metric. Points store the matrix row-major as a flat vector."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValidationError(f"spd size must be >= 1, got {self.size}")


def flat_len(spec):
    """Coordinate-vector length a point on spec carries."""
    if isinstance(spec, SPDCone):
        return spec.size * spec.size
    return spec.dim


def kind_code(spec):
    if isinstance(spec, Euclidean):
        return kernels.KIND_EUCLID
    if isinstance(spec, Sphere):
        return kernels.KIND_SPHERE
    if isinstance(spec, Torus):
        return kernels.KIND_TORUS
    if isinstance(spec, SPDCone):
        return kernels.KIND_SPD
    raise TypeError(f"not a manifold spec: {spec!r}")


def weight_vector(spec):
    """Euclidean weight vector (ones when unweighted), else None."""
    if not isinstance(spec, Euclidean):
        return None
    if spec.weights is None:
        return np.ones(spec.dim)
    return np.asarray(spec.weights, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Point:
    """A validated location on a manifold. coords is read-only."""

    spec: ManifoldSpec
    coords: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.spec, self.coords.tobytes()))

    @property
    def matrix(self):
        """Matrix view for SPD points."""
        if not isinstance(self.spec, SPDCone):
            raise TypeError("matrix view only exists for SPD points")
        k = self.spec.size
        return self.coords.reshape(k, k)


def _wrap(spec, coords):
    # trusted constructor: coords already canonical for spec
    c = np.asarray(coords, dtype=np.float64)
    c.setflags(write=False)
    return Point(spec, c)


@dataclass(frozen=True)
class GeodesicBall:
    """Closed geodesic ball; center is the midpoint of a point pair and
    radius half their distance."""

    center: Point
    radius: float

    def __post_init__(self):
        if not (self.radius >= 0.0):
            raise ValidationError(f"radius must be >= 0, got {self.radius}")

    def contains(self, p):
        d = distance(self.center.spec, self.center, p)
        return d <= self.radius + BALL_SLACK


def ball_between(spec, x, y):
    """Ball centered at midpoint(x, y) with radius d(x, y)/2."""
    return GeodesicBall(midpoint(spec, x, y), 0.5 * distance(spec, x, y))


def point_array(spec, rows):
    """Validate and canonicalize a batch of raw coordinate rows.

    Returns an (n, flat_len) float array. Torus entries are reduced to
    [0, 2*pi), sphere rows within 1e-6 of unit norm are renormalized, SPD
    rows are checked for symmetry and a positive spectrum and exactly
    symmetrized. Raises on anything out of tolerance.
    """
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise WrongDimension(f"expected a 2-d batch, got shape {arr.shape}")
    want = flat_len(spec)
    if arr.shape[1] != want:
        raise WrongDimension(
            f"row length {arr.shape[1]} does not match {type(spec).__name__} "
            f"(expected {want})"
        )
    if not np.all(np.isfinite(arr)):
        bad = int(np.argwhere(~np.isfinite(arr).all(axis=1))[0][0])
        raise ValidationError(f"non-finite coordinate in row {bad}")

    if isinstance(spec, Euclidean):
        return arr.copy()

    if isinstance(spec, Sphere):
        norms = np.sqrt(np.einsum("ij,ij->i", arr, arr))
        dev = np.abs(norms - 1.0)
        if np.any(dev > UNIT_NORM_TOL):
            bad = int(np.argmax(dev > UNIT_NORM_TOL))
            raise NotUnitNorm(
                f"row {bad} has norm {norms[bad]:.9g}, more than "
                f"{UNIT_NORM_TOL:g} from 1"
            )
        return arr / norms[:, None]

    if isinstance(spec, Torus):
        red = np.mod(arr, TWO_PI)
        # np.mod can land exactly on 2*pi for tiny negative inputs
        red[red >= TWO_PI] -= TWO_PI
        return red

    k = spec.size
    mats = arr.reshape(-1, k, k)
    asym = np.max(np.abs(mats - mats.transpose(0, 2, 1)), axis=(1, 2))
    fro = np.sqrt(np.einsum("ijk,ijk->i", mats, mats))
    tol = SYMMETRY_RTOL * np.maximum(1.0, fro)
    if np.any(asym > tol):
        bad = int(np.argmax(asym > tol))
        raise NotSymmetric(
            f"row {bad}: max asymmetry {asym[bad]:.3g} exceeds {tol[bad]:.3g}"
        )
    sym = 0.5 * (mats + mats.transpose(0, 2, 1))
    for i in range(sym.shape[0]):
        w = kernels.spd_eigvals(sym[i])
        lam_max = w[0]
        if not (lam_max > 0.0) or w[-1] <= EIG_FLOOR_RTOL * lam_max:
            raise NotPositiveDefinite(
                f"row {i}: eigenvalue {w[-1]:.6g} below floor "
                f"{EIG_FLOOR_RTOL:g} * {lam_max:.6g}"
            )
    return sym.reshape(-1, k * k)


def validate(spec, p):
    """Validate one raw coordinate vector (or Point) against spec."""
    if isinstance(p, Point):
        if p.spec != spec:
            raise ManifoldMismatch(
                f"point lives on {p.spec}, operation expects {spec}"
            )
        p = p.coords
    row = np.asarray(p, dtype=np.float64).reshape(-1)
    out = point_array(spec, row[None, :])[0]
    return _wrap(spec, out)


def _coords(spec, p):
    if isinstance(p, Point):
        if p.spec != spec:
            raise ManifoldMismatch(
                f"point lives on {p.spec}, operation expects {spec}"
            )
        return p.coords
    return validate(spec, p).coords


def distance(spec, p, q):
    """Geodesic distance between two points on spec."""
    cp = _coords(spec, p)
    cq = _coords(spec, q)
    if isinstance(spec, Euclidean):
        return kernels.euclid_distance(cp, cq, weight_vector(spec))
    if isinstance(spec, Sphere):
        return kernels.sphere_distance(cp, cq)
    if isinstance(spec, Torus):
        return kernels.torus_distance(cp, cq)
    k = spec.size
    return kernels.spd_distance(cp.reshape(k, k), cq.reshape(k, k))


def midpoint(spec, p, q):
    """Geodesic midpoint. Raises CutLocus where the minimizing geodesic
    is not unique (antipodal sphere pairs, half-period torus coordinates).
    """
    cp = _coords(spec, p)
    cq = _coords(spec, q)
    if isinstance(spec, Euclidean):
        return _wrap(spec, 0.5 * (cp + cq))
    if isinstance(spec, Sphere):
        return _wrap(spec, kernels.sphere_midpoint(cp, cq))
    if isinstance(spec, Torus):
        return _wrap(spec, kernels.torus_midpoint(cp, cq))
    k = spec.size
    m = kernels.spd_midpoint(cp.reshape(k, k), cq.reshape(k, k))
    return _wrap(spec, m.reshape(-1))


def ball_contains(spec, x1, x2, p):
    """Closed-ball test: is p within d(x1,x2)/2 of the midpoint of x1,x2?

    The Euclidean case uses the algebraically equivalent inner-product
    sign test and never forms the midpoint.
    """
    c1 = _coords(spec, x1)
    c2 = _coords(spec, x2)
    cp = _coords(spec, p)
    if isinstance(spec, Euclidean):
        return kernels.euclid_ball_contains(c1, c2, cp, weight_vector(spec))
    if isinstance(spec, Sphere):
        return kernels.sphere_ball_contains(c1, c2, cp)
    if isinstance(spec, Torus):
        return kernels.torus_ball_contains(c1, c2, cp)
    k = spec.size
    return kernels.spd_ball_contains(
        c1.reshape(k, k), c2.reshape(k, k), cp.reshape(k, k)
    )


def sym_eig(A):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (eigenvalues descending, matrix whose columns are the matching
    orthonormal eigenvectors).
    """
    a = np.asarray(A, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise WrongDimension(f"expected a square matrix, got shape {a.shape}")
    fro = math.sqrt(float(np.sum(a * a)))
    dev = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if dev > SYMMETRY_RTOL * max(1.0, fro):
        raise NotSymmetric(f"asymmetry {dev:.3g} exceeds tolerance")
    return kernels.jacobi_eig(a, want_vectors=True)


_FUN_CODES = None


def spd_map(fun, A, s=None):
    """Apply a scalar function to a symmetric matrix through its
    eigenvalues. fun is one of "sqrt", "inv_sqrt", "log", "exp", "pow"
    (pow takes the exponent as s). exp accepts any symmetric matrix; the
    others require a positive spectrum.
    """
    global _FUN_CODES
    if _FUN_CODES is None:
        _FUN_CODES = {
            "sqrt": kernels.FUN_SQRT,
            "inv_sqrt": kernels.FUN_INVSQRT,
            "log": kernels.FUN_LOG,
            "exp": kernels.FUN_EXP,
            "pow": kernels.FUN_POW,
        }
    if fun not in _FUN_CODES:
        raise ValidationError(f"unknown matrix function {fun!r}")
    if fun == "pow":
        if s is None:
            raise ValidationError("pow needs an exponent s")
    else:
        s = 0.0
    if isinstance(A, Point):
        A = A.matrix
    a = np.asarray(A, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise WrongDimension(f"expected a square matrix, got shape {a.shape}")
    return kernels.sym_matfun(a, _FUN_CODES[fun], float(s))
