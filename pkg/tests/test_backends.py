"""Cross-backend agreement.

The compiled extension and the pure module implement the same operation
sequences, so everything they return must match bit for bit, not just to
rounding. These tests import both modules directly (backend selection
only decides which one the package uses).
"""

import math

import numpy as np
import pytest

from geodepth import _kernels_py

compiled = pytest.importorskip(
    "geodepth._kernels", reason="compiled kernels not built"
)

TWO_PI = 2.0 * math.pi


def spd_batch(rng, n, k):
    out = np.empty((n, k * k))
    for i in range(n):
        Z = rng.standard_normal((k + 2, k))
        M = Z.T @ Z
        out[i] = (0.5 * (M + M.T)).reshape(-1)
    return out


def sphere_batch(rng, n, k):
    X = rng.standard_normal((n, k))
    return X / np.linalg.norm(X, axis=1)[:, None]


def test_constants_agree():
    assert compiled.KIND_EUCLID == _kernels_py.KIND_EUCLID
    assert compiled.KIND_SPHERE == _kernels_py.KIND_SPHERE
    assert compiled.KIND_TORUS == _kernels_py.KIND_TORUS
    assert compiled.KIND_SPD == _kernels_py.KIND_SPD
    assert compiled.COMPILED and not _kernels_py.COMPILED


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8, 12])
def test_jacobi_bitwise_identical(k):
    rng = np.random.default_rng(40 + k)
    A = rng.standard_normal((k, k))
    A = A + A.T
    w1, V1 = compiled.jacobi_eig(A)
    w2, V2 = _kernels_py.jacobi_eig(A)
    assert w1.tobytes() == w2.tobytes()
    assert V1.tobytes() == V2.tobytes()


def test_jacobi_matches_lapack_values():
    rng = np.random.default_rng(41)
    for k in (2, 4, 7):
        A = rng.standard_normal((k, k))
        A = A + A.T
        w, V = compiled.jacobi_eig(A)
        ref = np.linalg.eigvalsh(A)[::-1]
        assert np.max(np.abs(w - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))
        assert np.max(np.abs(V @ np.diag(w) @ V.T - A)) <= 1e-10 * np.linalg.norm(A)


def test_scalar_ops_bitwise_identical():
    rng = np.random.default_rng(42)
    for _ in range(30):
        u, v, p = sphere_batch(rng, 3, 4)
        assert compiled.sphere_distance(u, v) == _kernels_py.sphere_distance(u, v)
        m1 = compiled.sphere_midpoint(u, v)
        m2 = _kernels_py.sphere_midpoint(u, v)
        assert m1.tobytes() == m2.tobytes()
        assert compiled.sphere_ball_contains(u, v, p) == _kernels_py.sphere_ball_contains(u, v, p)

        a = rng.uniform(0, TWO_PI, 3)
        b = rng.uniform(0, TWO_PI, 3)
        q = rng.uniform(0, TWO_PI, 3)
        assert compiled.torus_distance(a, b) == _kernels_py.torus_distance(a, b)
        assert (
            compiled.torus_midpoint(a, b).tobytes()
            == _kernels_py.torus_midpoint(a, b).tobytes()
        )
        assert compiled.torus_ball_contains(a, b, q) == _kernels_py.torus_ball_contains(a, b, q)

        x = rng.standard_normal(5)
        y = rng.standard_normal(5)
        z = rng.standard_normal(5)
        w = rng.uniform(0.5, 2.0, 5)
        assert compiled.euclid_distance(x, y, w) == _kernels_py.euclid_distance(x, y, w)
        assert compiled.euclid_ball_contains(x, y, z, w) == _kernels_py.euclid_ball_contains(x, y, z, w)


def test_spd_ops_bitwise_identical():
    rng = np.random.default_rng(43)
    for k in (2, 3, 4):
        for _ in range(10):
            A = spd_batch(rng, 1, k)[0].reshape(k, k)
            B = spd_batch(rng, 1, k)[0].reshape(k, k)
            P = spd_batch(rng, 1, k)[0].reshape(k, k)
            assert compiled.spd_distance(A, B) == _kernels_py.spd_distance(A, B)
            assert (
                compiled.spd_midpoint(A, B).tobytes()
                == _kernels_py.spd_midpoint(A, B).tobytes()
            )
            assert compiled.spd_ball_contains(A, B, P) == _kernels_py.spd_ball_contains(A, B, P)
            for code in (0, 1, 2, 3):
                assert (
                    compiled.sym_matfun(A, code).tobytes()
                    == _kernels_py.sym_matfun(A, code).tobytes()
                )
            assert (
                compiled.sym_matfun(A, compiled.FUN_POW, 0.3).tobytes()
                == _kernels_py.sym_matfun(A, _kernels_py.FUN_POW, 0.3).tobytes()
            )


def _naive_counts(mod, kind, X, Q, w=None):
    n = X.shape[0]
    counts = np.zeros(Q.shape[0], dtype=np.int64)
    skipped = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            for qi in range(Q.shape[0]):
                try:
                    if kind == mod.KIND_EUCLID:
                        ok = mod.euclid_ball_contains(X[i], X[j], Q[qi], w)
                    elif kind == mod.KIND_SPHERE:
                        ok = mod.sphere_ball_contains(X[i], X[j], Q[qi])
                    elif kind == mod.KIND_TORUS:
                        ok = mod.torus_ball_contains(X[i], X[j], Q[qi])
                    else:
                        k = int(round(math.sqrt(X.shape[1])))
                        ok = mod.spd_ball_contains(
                            X[i].reshape(k, k), X[j].reshape(k, k), Q[qi].reshape(k, k)
                        )
                except Exception:
                    if qi == 0:
                        skipped += 1
                    break
                if ok:
                    counts[qi] += 1
    return counts, skipped


@pytest.mark.parametrize("kind_name", ["euclid", "sphere", "torus", "spd"])
def test_batch_counts_match_scalar_loop_and_cross_backend(kind_name):
    rng = np.random.default_rng(44)
    w = None
    if kind_name == "euclid":
        kind = compiled.KIND_EUCLID
        X = rng.standard_normal((30, 3))
        Q = rng.standard_normal((6, 3))
        w = np.ones(3)
    elif kind_name == "sphere":
        kind = compiled.KIND_SPHERE
        X = sphere_batch(rng, 30, 3)
        Q = sphere_batch(rng, 6, 3)
    elif kind_name == "torus":
        kind = compiled.KIND_TORUS
        X = rng.uniform(0, TWO_PI, (30, 2))
        Q = rng.uniform(0, TWO_PI, (6, 2))
    else:
        kind = compiled.KIND_SPD
        X = spd_batch(rng, 20, 2)
        Q = spd_batch(rng, 5, 2)

    c_fast, s_fast = compiled.depth_counts(kind, X, Q, w)
    c_pure, s_pure = _kernels_py.depth_counts(kind, X, Q, w)
    assert c_fast.tobytes() == c_pure.tobytes()
    assert s_fast == s_pure

    c_naive, s_naive = _naive_counts(_kernels_py, kind, X, Q, w)
    assert np.array_equal(c_fast, c_naive)
    assert s_fast == s_naive


def test_batch_counts_skip_antipodal_pairs():
    X = np.array([[1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]])
    Q = X[:1]
    c, skipped = compiled.depth_counts(compiled.KIND_SPHERE, X, Q)
    c2, skipped2 = _kernels_py.depth_counts(_kernels_py.KIND_SPHERE, X, Q)
    assert skipped == skipped2 == 1
    assert c.tobytes() == c2.tobytes()
