"""Empirical depth, population Monte-Carlo, deepest point, profiles."""

import math

import numpy as np
import pytest

from geodepth import (
    Dataset,
    DegenerateSample,
    Euclidean,
    ManifoldMismatch,
    PointMass,
    RaySpec,
    RngStream,
    SPDCone,
    Sphere,
    Torus,
    ValidationError,
    deepest_point,
    depth_profile,
    empirical_depth,
    empirical_depth_batch,
    population_depth_mc,
    preset,
    sample,
    subsampled_depth,
    validate,
)

TWO_PI = 2.0 * math.pi


def line_ds(*xs):
    return Dataset(Euclidean(1), np.array([[float(x)] for x in xs]))


# ---------------------------------------------------------------------------
# single-point estimator
# ---------------------------------------------------------------------------


def test_three_point_line_center():
    # balls [0,1], [0,2], [1,2] all contain 1
    v, skipped = empirical_depth(line_ds(0, 1, 2), [1.0])
    assert v == 1.0 and skipped == 0


def test_far_point_has_zero_depth():
    rng = np.random.default_rng(0)
    ds = Dataset(Euclidean(3), rng.standard_normal((40, 3)))
    v, _ = empirical_depth(ds, np.full(3, 1e6))
    assert v == 0.0


def test_pair_midpoint_has_full_depth():
    ds = line_ds(0, 4)
    v, _ = empirical_depth(ds, [2.0])
    assert v == 1.0


def test_needs_two_points():
    with pytest.raises(ValidationError):
        empirical_depth(Dataset(Euclidean(1), [[1.0]]), [1.0])


def test_one_dim_matches_interval_count():
    # in 1-d the ball of a pair is just the closed interval between them
    rng = np.random.default_rng(1)
    xs = rng.standard_normal(25)
    ds = line_ds(*xs)
    for p in (-0.7, 0.0, 0.4, xs[3]):
        total = 0
        inside = 0
        for i in range(len(xs) - 1):
            for j in range(i + 1, len(xs)):
                lo, hi = min(xs[i], xs[j]), max(xs[i], xs[j])
                total += 1
                if lo <= p <= hi:
                    inside += 1
        v, _ = empirical_depth(ds, [p])
        assert v == inside / total


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------


def test_batch_singleton_equals_single():
    rng = np.random.default_rng(2)
    ds = Dataset(Euclidean(2), rng.standard_normal((30, 2)))
    p = rng.standard_normal(2)
    v, skipped = empirical_depth(ds, p)
    rep = empirical_depth_batch(ds, p[None, :])
    assert rep.values[0] == v
    assert rep.skipped_pairs == skipped
    assert rep.n == 30 and rep.method == "DCOPS"


def test_batch_on_sample_has_floor():
    rng = np.random.default_rng(3)
    n = 25
    ds = Dataset(Euclidean(3), rng.standard_normal((n, 3)))
    rep = empirical_depth_batch(ds, ds.coords)
    floor = (n - 1) / (n * (n - 1) / 2)
    assert np.all(rep.values >= floor)
    assert np.all(rep.values <= 1.0)


def test_batch_shuffle_consistency():
    rng = np.random.default_rng(4)
    ds = Dataset(Torus(2), rng.uniform(0, TWO_PI, (20, 2)))
    Q = rng.uniform(0, TWO_PI, (9, 2))
    perm = rng.permutation(9)
    a = empirical_depth_batch(ds, Q).values
    b = empirical_depth_batch(ds, Q[perm]).values
    assert np.array_equal(a[perm], b)


def test_batch_threads_do_not_change_bits():
    rng = np.random.default_rng(5)
    ds = Dataset(Sphere(3), _unit(rng.standard_normal((40, 3))))
    Q = _unit(rng.standard_normal((11, 3)))
    a = empirical_depth_batch(ds, Q, threads=1)
    b = empirical_depth_batch(ds, Q, threads=4)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.skipped_pairs == b.skipped_pairs


def _unit(X):
    return X / np.linalg.norm(X, axis=1)[:, None]


def test_skipped_pairs_reported_and_removed_from_denominator():
    X = np.array([[1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0]])
    ds = Dataset(Sphere(3), X)
    rep = empirical_depth_batch(ds, X[:1])
    assert rep.skipped_pairs == 1
    # 3 pairs, 1 skipped: denominator is 2
    assert rep.values[0] in (0.0, 0.5, 1.0)
    v, skipped = empirical_depth(ds, X[0])
    assert skipped == 1 and v == rep.values[0]


def test_all_pairs_skipped_raises():
    ds = Dataset(Sphere(3), np.array([[1.0, 0, 0], [-1.0, 0, 0]]))
    with pytest.raises(DegenerateSample):
        empirical_depth(ds, np.array([0.0, 1.0, 0.0]))


# ---------------------------------------------------------------------------
# invariance
# ---------------------------------------------------------------------------


def test_euclid_rigid_motion_invariance_exact():
    rng = np.random.default_rng(6)
    ds = Dataset(Euclidean(3), rng.standard_normal((35, 3)))
    Q = rng.standard_normal((8, 3))
    rot, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    shift = rng.standard_normal(3)
    moved = Dataset(Euclidean(3), ds.coords @ rot.T + shift)
    a = empirical_depth_batch(ds, Q).values
    b = empirical_depth_batch(moved, Q @ rot.T + shift).values
    assert np.array_equal(a, b)


def test_sphere_rotation_invariance_exact():
    rng = np.random.default_rng(7)
    ds = Dataset(Sphere(4), _unit(rng.standard_normal((30, 4))))
    Q = _unit(rng.standard_normal((6, 4)))
    rot, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    a = empirical_depth_batch(ds, Q).values
    b = empirical_depth_batch(Dataset(Sphere(4), ds.coords @ rot.T), Q @ rot.T).values
    assert np.array_equal(a, b)


def test_spd_congruence_invariance_exact():
    rng = np.random.default_rng(8)
    mats = []
    for _ in range(16):
        Z = rng.standard_normal((5, 3))
        M = Z.T @ Z
        mats.append((0.5 * (M + M.T)).reshape(-1))
    X = np.array(mats)
    ds = Dataset(SPDCone(3), X)
    G = rng.standard_normal((3, 3))
    moved = np.array(
        [(G @ row.reshape(3, 3) @ G.T).reshape(-1) for row in X]
    )
    a = empirical_depth_batch(ds, X[:5]).values
    b = empirical_depth_batch(Dataset(SPDCone(3), moved), moved[:5]).values
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# limit behavior
# ---------------------------------------------------------------------------


def test_vanishing_at_infinity():
    rng = np.random.default_rng(9)
    ds = Dataset(Euclidean(2), rng.standard_normal((50, 2)))
    diam = 0.0
    for i in range(49):
        diam = max(diam, np.max(np.linalg.norm(ds.coords[i] - ds.coords[i + 1 :], axis=1)))
    dirs = _unit(rng.standard_normal((12, 2)))
    prev = 1.0
    for mult in (0.5, 1.0, 2.0, 4.0, 8.0):
        M = mult * diam
        Q = dirs * (M + 1e-9)
        cur = float(np.max(empirical_depth_batch(ds, Q).values))
        assert cur <= prev + 1e-15
        prev = cur
    assert prev == 0.0  # beyond the diameter no ball can reach


def test_continuity_along_shrinking_steps():
    rng = np.random.default_rng(10)
    ds = Dataset(Euclidean(2), rng.standard_normal((40, 2)))
    p = np.array([0.3, -0.2])
    u = _unit(rng.standard_normal((1, 2)))[0]
    vp, _ = empirical_depth(ds, p)
    gaps = []
    for j in range(1, 16):
        q = p + (2.0**-j) * u
        vq, _ = empirical_depth(ds, q)
        gaps.append(abs(vq - vp))
    assert gaps[-1] == 0.0  # small enough steps stop crossing ball boundaries
    assert max(gaps[-4:]) <= max(gaps[:4]) + 1e-15


# ---------------------------------------------------------------------------
# population Monte-Carlo
# ---------------------------------------------------------------------------


def test_population_gaussian_center_is_half():
    spec, sam = preset("gauss-k5")
    est, se = population_depth_mc(spec, sam, np.zeros(5), 20_000, seed=11)
    assert abs(est - 0.5) <= 3.0 * se


def test_population_point_mass_is_one():
    spec = Euclidean(2)
    sam = PointMass(spec, (0.5, -1.0))
    est, se = population_depth_mc(spec, sam, (0.5, -1.0), 500, seed=0)
    assert est == 1.0 and se == 0.0


def test_population_matches_simplicial_closed_form_1d():
    # in 1-d the pair ball is the interval, so population depth is
    # 2 F(p)(1 - F(p)); check two quantiles of the standard normal
    spec, sam = preset("gauss-k2")
    spec1 = Euclidean(1)
    from geodepth import Gaussian

    sam1 = Gaussian(np.zeros(1), np.eye(1))
    for p, F in ((0.0, 0.5), (0.6744897501960817, 0.75)):
        est, se = population_depth_mc(spec1, sam1, [p], 40_000, seed=13)
        assert abs(est - 2.0 * F * (1.0 - F)) <= 4.0 * max(se, 1e-4)


def test_population_needs_min_pairs():
    spec, sam = preset("gauss-k2")
    with pytest.raises(ValidationError):
        population_depth_mc(spec, sam, np.zeros(2), 99, seed=0)


def test_unbiasedness_against_population():
    spec, sam = preset("gauss-k2")
    p = np.array([0.4, 0.1])
    est, se = population_depth_mc(spec, sam, p, 100_000, seed=14)
    reps = 200
    stream = RngStream(15)
    vals = np.empty(reps)
    for r in range(reps):
        ds = sample(sam, stream.substream(r), 40)
        vals[r], _ = empirical_depth(ds, p)
    gap = abs(vals.mean() - est)
    bound = 4.0 * math.sqrt(vals.var(ddof=1) / reps + se * se)
    assert gap <= bound


# ---------------------------------------------------------------------------
# deepest point
# ---------------------------------------------------------------------------


def test_deepest_on_three_point_line():
    assert deepest_point(line_ds(0, 1, 2)) == (1, 1.0)


def test_deepest_tie_takes_lowest_index():
    ds = Dataset(Euclidean(2), np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]]))
    idx, val = deepest_point(ds)
    rep = empirical_depth_batch(ds, ds.coords)
    assert np.all(rep.values == rep.values[0])  # symmetric configuration
    assert idx == 0 and val == rep.values[0]


def test_deepest_never_picks_far_outlier():
    ds = Dataset(Euclidean(2), np.array([[0.0, 0], [0.1, 0], [0, 0.1], [50.0, 50.0]]))
    idx, _ = deepest_point(ds)
    assert idx != 3


def test_subsampled_close_to_full():
    rng = np.random.default_rng(16)
    ds = Dataset(Euclidean(2), rng.standard_normal((100, 2)))
    p = np.zeros((1, 2))
    full = empirical_depth_batch(ds, p).values[0]
    sub = subsampled_depth(ds, p, pair_budget=20_000, seed=1).values[0]
    assert abs(sub - full) <= 4.0 * math.sqrt(0.25 / 20_000) + 0.01
    again = subsampled_depth(ds, p, pair_budget=20_000, seed=1).values[0]
    assert sub == again


def test_deepest_with_budget_matches_full_argmax_roughly():
    rng = np.random.default_rng(17)
    ds = Dataset(Euclidean(2), rng.standard_normal((60, 2)))
    idx_full, _ = deepest_point(ds)
    idx_sub, _ = deepest_point(ds, pair_budget=40_000, seed=2)
    full_vals = empirical_depth_batch(ds, ds.coords).values
    # the subsampled argmax must land on a near-maximal point
    assert full_vals[idx_sub] >= full_vals[idx_full] - 0.05


# ---------------------------------------------------------------------------
# rays and profiles
# ---------------------------------------------------------------------------


def test_ray_grid_must_increase():
    with pytest.raises(ValidationError):
        RaySpec(base=[0.0], direction=[1.0], grid=[0.0, 0.0, 1.0])
    with pytest.raises(ValidationError):
        RaySpec(base=[0.0], direction=[1.0], grid=[])


def test_profile_base_row_matches_direct_depth():
    spec, sam = preset("gauss-k5")
    ds = sample(sam, RngStream(18), 300)
    ray = RaySpec(base=np.zeros(5), direction=[1, 0, 0, 0, 0], grid=[0.0, 1.0, 2.0])
    prof = depth_profile(ds, ray)
    v, _ = empirical_depth(ds, np.zeros(5))
    assert prof.rows[0].depth == v
    assert prof.rows[0].lam == 0.0 and prof.rows[0].distance == 0.0


def test_profile_rotation_invariance():
    rng = np.random.default_rng(19)
    spec = Euclidean(3)
    X = rng.standard_normal((80, 3))
    rot, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    base = np.zeros(3)
    u = np.array([1.0, 0.0, 0.0])
    grid = [0.0, 0.5, 1.0, 2.0]
    a = depth_profile(Dataset(spec, X), RaySpec(base, u, grid))
    b = depth_profile(
        Dataset(spec, X @ rot.T), RaySpec(rot @ base, rot @ u, grid)
    )
    for ra, rb in zip(a.rows, b.rows):
        assert ra.depth == rb.depth


def test_profile_from_sampler_source():
    spec, sam = preset("gauss-k2")
    ray = RaySpec(base=[0.0, 0.0], direction=[1.0, 0.0], grid=[0.0, 4.0])
    prof = depth_profile(sam, ray, n=200, seed=3)
    assert len(prof.rows) == 2
    assert prof.rows[1].depth <= prof.rows[0].depth


def test_sphere_ray_needs_tangent():
    ray = RaySpec(base=[1.0, 0, 0], direction=[1.0, 0, 0], grid=[0.0, 0.1])
    with pytest.raises(ValidationError):
        ray.points(Sphere(3))


def test_spd_ray_walks_a_geodesic():
    from geodepth import distance

    spec = SPDCone(2)
    H = np.array([[0.3, 0.1], [0.1, -0.2]])
    ray = RaySpec(
        base=np.eye(2).reshape(-1), direction=H.reshape(-1), grid=[0.0, 0.5, 1.0]
    )
    rows = ray.points(spec)
    base = validate(spec, np.eye(2))
    d1 = distance(spec, base, validate(spec, rows[1]))
    d2 = distance(spec, base, validate(spec, rows[2]))
    assert d2 == pytest.approx(2.0 * d1, rel=1e-9)


# ---------------------------------------------------------------------------
# dataset plumbing
# ---------------------------------------------------------------------------


def test_dataset_from_points_list():
    spec = Euclidean(2)
    pts = [validate(spec, (0.0, 0.0)), validate(spec, (1.0, 1.0))]
    ds = Dataset(spec, pts)
    assert ds.n == 2
    with pytest.raises(ManifoldMismatch):
        Dataset(Euclidean(3), pts)


def test_dataset_points_round_trip():
    rng = np.random.default_rng(20)
    ds = Dataset(Euclidean(2), rng.standard_normal((5, 2)))
    assert len(ds.points) == 5
    assert np.array_equal(ds.points[2].coords, ds.coords[2])
    sub = ds.subset([0, 3])
    assert sub.n == 2 and np.array_equal(sub.coords[1], ds.coords[3])
