"""Pure-Python kernel backend.

This module defines the reference semantics for every geometry kernel. The
compiled backend (_kernels.pyx) mirrors each routine operation-for-operation:
same accumulation order, same branches, same libm calls. Keep them in
lockstep; cross-backend bit-identical containment decisions depend on it.

Scalar work happens on Python floats (CPython float arithmetic is IEEE double,
identical to C), transcendentals go through math.* (bitwise libm). numpy is
used only where elementwise IEEE ops make vectorization exact (the Euclidean
batch path) or for array plumbing.
"""

import math

import numpy as np

from geodepth.errors import CutLocus, NoConvergence, NotPositiveDefinite

COMPILED = False

TWO_PI = 2.0 * math.pi
BALL_SLACK = 1e-12      # closed-ball comparison slack, distance scale
CUT_EPS = 1e-9          # antipode / half-period guard
JACOBI_TOL = 1e-14      # off-diagonal threshold relative to ||A||_F
JACOBI_MAX_SWEEPS = 100

KIND_EUCLID = 0
KIND_SPHERE = 1
KIND_TORUS = 2
KIND_SPD = 3

FUN_SQRT = 0
FUN_INVSQRT = 1
FUN_LOG = 2
FUN_EXP = 3
FUN_POW = 4


# ---------------------------------------------------------------------------
# dense symmetric eigensolver (cyclic Jacobi) on flat row-major lists
# ---------------------------------------------------------------------------

def _jacobi_flat(a, k, want_vectors):
    # a is destroyed; returns (eigenvalues descending, flat V or None)
    for i in range(k - 1):
        for j in range(i + 1, k):
            x = 0.5 * (a[i * k + j] + a[j * k + i])
            a[i * k + j] = x
            a[j * k + i] = x
    v = None
    if want_vectors:
        v = [0.0] * (k * k)
        for i in range(k):
            v[i * k + i] = 1.0
    s_norm = 0.0
    for i in range(k * k):
        s_norm += a[i] * a[i]
    nrm = math.sqrt(s_norm)
    thresh = JACOBI_TOL * nrm
    converged = nrm == 0.0 or k == 1
    if not converged:
        for _sweep in range(JACOBI_MAX_SWEEPS):
            rotated = False
            for p in range(k - 1):
                for q in range(p + 1, k):
                    apq = a[p * k + q]
                    if abs(apq) <= thresh:
                        continue
                    rotated = True
                    theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq)
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    app = a[p * k + p]
                    aqq = a[q * k + q]
                    a[p * k + p] = app - t * apq
                    a[q * k + q] = aqq + t * apq
                    a[p * k + q] = 0.0
                    a[q * k + p] = 0.0
                    for i in range(k):
                        if i == p or i == q:
                            continue
                        aip = a[i * k + p]
                        aiq = a[i * k + q]
                        x = c * aip - s * aiq
                        y = s * aip + c * aiq
                        a[i * k + p] = x
                        a[p * k + i] = x
                        a[i * k + q] = y
                        a[q * k + i] = y
                    if want_vectors:
                        for i in range(k):
                            vip = v[i * k + p]
                            viq = v[i * k + q]
                            v[i * k + p] = c * vip - s * viq
                            v[i * k + q] = s * vip + c * viq
            if not rotated:
                converged = True
                break
    if not converged:
        raise NoConvergence(
            f"jacobi: off-diagonal mass above {thresh:g} after "
            f"{JACOBI_MAX_SWEEPS} sweeps (k={k})"
        )
    # selection sort, descending, first maximum wins (deterministic ties)
    idx = list(range(k))
    for i in range(k - 1):
        m = i
        for j in range(i + 1, k):
            if a[idx[j] * k + idx[j]] > a[idx[m] * k + idx[m]]:
                m = j
        if m != i:
            idx[i], idx[m] = idx[m], idx[i]
    w = [a[idx[i] * k + idx[i]] for i in range(k)]
    if want_vectors:
        vs = [0.0] * (k * k)
        for r in range(k):
            for i in range(k):
                vs[r * k + i] = v[r * k + idx[i]]
        v = vs
    return w, v


def jacobi_eig(A, want_vectors=True):
    """Eigen-decomposition of a symmetric matrix, eigenvalues descending."""
    A = np.asarray(A, dtype=np.float64)
    k = A.shape[0]
    w, v = _jacobi_flat(list(A.reshape(-1)), k, want_vectors)
    wv = np.array(w, dtype=np.float64)
    if not want_vectors:
        return wv, None
    return wv, np.array(v, dtype=np.float64).reshape(k, k)


# ---------------------------------------------------------------------------
# flat-matrix helpers shared by the SPD routines
# ---------------------------------------------------------------------------

def _mm(x, y, k):
    out = [0.0] * (k * k)
    for i in range(k):
        for j in range(k):
            s = 0.0
            for l in range(k):
                s += x[i * k + l] * y[l * k + j]
            out[i * k + j] = s
    return out


def _recompose(w, v, f, k):
    # V diag(f(w)) V^T with the l-sum innermost and ascending
    fw = [f(x) for x in w]
    out = [0.0] * (k * k)
    for i in range(k):
        for j in range(i, k):
            s = 0.0
            for l in range(k):
                s += v[i * k + l] * fw[l] * v[j * k + l]
            out[i * k + j] = s
            out[j * k + i] = s
    return out


def _check_pos(w, what):
    for x in w:
        if x <= 0.0:
            raise NotPositiveDefinite(f"{what}: eigenvalue {x:g} <= 0")


def sym_matfun(A, code, s=0.0):
    """Apply a scalar function to a symmetric matrix through its eigenvalues."""
    A = np.asarray(A, dtype=np.float64)
    k = A.shape[0]
    w, v = _jacobi_flat(list(A.reshape(-1)), k, True)
    if code == FUN_SQRT:
        _check_pos(w, "sqrt")
        f = math.sqrt
    elif code == FUN_INVSQRT:
        _check_pos(w, "inv_sqrt")
        f = lambda x: 1.0 / math.sqrt(x)
    elif code == FUN_LOG:
        _check_pos(w, "log")
        f = math.log
    elif code == FUN_EXP:
        f = math.exp
    elif code == FUN_POW:
        _check_pos(w, "pow")
        f = lambda x: math.pow(x, s)
    else:
        raise ValueError(f"unknown matfun code {code}")
    out = _recompose(w, v, f, k)
    return np.array(out, dtype=np.float64).reshape(k, k)


def spd_eigvals(A):
    A = np.asarray(A, dtype=np.float64)
    k = A.shape[0]
    w, _ = _jacobi_flat(list(A.reshape(-1)), k, False)
    return np.array(w, dtype=np.float64)


def _whitened(a, b, k):
    # S B S with S = A^{-1/2}; returns (W flat, S flat)
    w, v = _jacobi_flat(list(a), k, True)
    _check_pos(w, "spd whitening")
    sm = _recompose(w, v, lambda x: 1.0 / math.sqrt(x), k)
    t = _mm(sm, b, k)
    return _mm(t, sm, k), sm


def _log_norm(w):
    s = 0.0
    for x in w:
        lg = math.log(x)
        s += lg * lg
    return math.sqrt(s)


def spd_distance(A, B):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    k = A.shape[0]
    a = list(A.reshape(-1))
    b = list(B.reshape(-1))
    # order the operands by their first differing entry: the metric is
    # symmetric, but whitening by A vs by B rounds differently, and exact
    # d(A,B) == d(B,A) is part of the contract
    for i in range(k * k):
        if a[i] != b[i]:
            if b[i] < a[i]:
                a, b = b, a
            break
    wmat, _ = _whitened(a, b, k)
    w, _ = _jacobi_flat(wmat, k, False)
    _check_pos(w, "spd distance")
    return _log_norm(w)


def _spd_mid_flat(a, b, k):
    w, v = _jacobi_flat(list(a), k, True)
    _check_pos(w, "spd midpoint")
    asq = _recompose(w, v, math.sqrt, k)
    sm = _recompose(w, v, lambda x: 1.0 / math.sqrt(x), k)
    t = _mm(sm, b, k)
    wmat = _mm(t, sm, k)
    ww, vw = _jacobi_flat(wmat, k, True)
    _check_pos(ww, "spd midpoint")
    wh = _recompose(ww, vw, math.sqrt, k)
    return _mm(_mm(asq, wh, k), asq, k), ww


def spd_midpoint(A, B):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    k = A.shape[0]
    m, _ = _spd_mid_flat(list(A.reshape(-1)), list(B.reshape(-1)), k)
    return np.array(m, dtype=np.float64).reshape(k, k)


def _spd_query_dist(msi, p, k):
    # d(M, P) given M^{-1/2}; one eigenvalue-only solve per query
    t = _mm(msi, p, k)
    w2 = _mm(t, msi, k)
    w, _ = _jacobi_flat(w2, k, False)
    _check_pos(w, "spd containment")
    return _log_norm(w)


def _spd_pair(a, b, k):
    # midpoint M, its inverse square root, and the pair radius
    m, ww = _spd_mid_flat(a, b, k)
    r = 0.5 * _log_norm(ww)
    wm, vm = _jacobi_flat(list(m), k, True)
    _check_pos(wm, "spd midpoint")
    msi = _recompose(wm, vm, lambda x: 1.0 / math.sqrt(x), k)
    return msi, r


def spd_ball_contains(A, B, P):
    A = np.asarray(A, dtype=np.float64)
    k = A.shape[0]
    msi, r = _spd_pair(
        list(A.reshape(-1)),
        list(np.asarray(B, dtype=np.float64).reshape(-1)),
        k,
    )
    d = _spd_query_dist(msi, list(np.asarray(P, dtype=np.float64).reshape(-1)), k)
    return d <= r + BALL_SLACK


# ---------------------------------------------------------------------------
# sphere
# ---------------------------------------------------------------------------

def _dot(u, v, k):
    s = 0.0
    for d in range(k):
        s += u[d] * v[d]
    return s


def _clamp1(c):
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


def sphere_distance(u, v):
    u = np.asarray(u, dtype=np.float64).tolist()
    v = np.asarray(v, dtype=np.float64).tolist()
    return math.acos(_clamp1(_dot(u, v, len(u))))


def _sphere_pair(x1, x2, k):
    # midpoint and radius; ok=False flags the antipodal cut locus
    c12 = _clamp1(_dot(x1, x2, k))
    if c12 <= -1.0 + CUT_EPS:
        return False, None, 0.0
    r = 0.5 * math.acos(c12)
    m = [x1[d] + x2[d] for d in range(k)]
    nrm = math.sqrt(_dot(m, m, k))
    for d in range(k):
        m[d] = m[d] / nrm
    return True, m, r


def sphere_midpoint(u, v):
    u = np.asarray(u, dtype=np.float64).tolist()
    v = np.asarray(v, dtype=np.float64).tolist()
    ok, m, _ = _sphere_pair(u, v, len(u))
    if not ok:
        raise CutLocus("sphere midpoint: antipodal pair")
    return np.array(m, dtype=np.float64)


def sphere_ball_contains(x1, x2, p):
    x1 = np.asarray(x1, dtype=np.float64).tolist()
    x2 = np.asarray(x2, dtype=np.float64).tolist()
    p = np.asarray(p, dtype=np.float64).tolist()
    k = len(x1)
    ok, m, r = _sphere_pair(x1, x2, k)
    if not ok:
        raise CutLocus("sphere ball: antipodal pair")
    return math.acos(_clamp1(_dot(m, p, k))) <= r + BALL_SLACK


# ---------------------------------------------------------------------------
# flat torus
# ---------------------------------------------------------------------------

def torus_distance(a, b):
    a = np.asarray(a, dtype=np.float64).tolist()
    b = np.asarray(b, dtype=np.float64).tolist()
    s = 0.0
    for d in range(len(a)):
        diff = abs(a[d] - b[d])
        if diff > math.pi:
            diff = TWO_PI - diff
        s += diff * diff
    return math.sqrt(s)


def _torus_pair(a, b, k):
    # circular midpoint along the minimizing arc, per coordinate
    m = [0.0] * k
    s = 0.0
    for d in range(k):
        diff = abs(a[d] - b[d])
        if abs(diff - math.pi) <= CUT_EPS:
            return False, None, 0.0
        if diff > math.pi:
            cd = TWO_PI - diff
            md = math.fmod(0.5 * (a[d] + b[d]) + math.pi, TWO_PI)
        else:
            cd = diff
            md = 0.5 * (a[d] + b[d])
        s += cd * cd
        m[d] = md
    return True, m, 0.5 * math.sqrt(s)


def _torus_dist_flat(m, p, k):
    s = 0.0
    for d in range(k):
        diff = abs(m[d] - p[d])
        if diff > math.pi:
            diff = TWO_PI - diff
        s += diff * diff
    return math.sqrt(s)


def torus_midpoint(a, b):
    a = np.asarray(a, dtype=np.float64).tolist()
    b = np.asarray(b, dtype=np.float64).tolist()
    ok, m, _ = _torus_pair(a, b, len(a))
    if not ok:
        raise CutLocus("torus midpoint: half-period coordinate")
    return np.array(m, dtype=np.float64)


def torus_ball_contains(a, b, p):
    a = np.asarray(a, dtype=np.float64).tolist()
    b = np.asarray(b, dtype=np.float64).tolist()
    p = np.asarray(p, dtype=np.float64).tolist()
    k = len(a)
    ok, m, r = _torus_pair(a, b, k)
    if not ok:
        raise CutLocus("torus ball: half-period coordinate")
    return _torus_dist_flat(m, p, k) <= r + BALL_SLACK


# ---------------------------------------------------------------------------
# Euclidean / Hilbert (weighted inner product)
# ---------------------------------------------------------------------------

def euclid_distance(x, y, w):
    x = np.asarray(x, dtype=np.float64).tolist()
    y = np.asarray(y, dtype=np.float64).tolist()
    w = np.asarray(w, dtype=np.float64).tolist()
    s = 0.0
    for d in range(len(x)):
        diff = x[d] - y[d]
        s += w[d] * diff * diff
    return math.sqrt(s)


def euclid_ball_contains(x1, x2, p, w):
    # inner-product form; no midpoint, no slack (<= 0 already closes the ball)
    x1 = np.asarray(x1, dtype=np.float64).tolist()
    x2 = np.asarray(x2, dtype=np.float64).tolist()
    p = np.asarray(p, dtype=np.float64).tolist()
    w = np.asarray(w, dtype=np.float64).tolist()
    s = 0.0
    for d in range(len(x1)):
        s += w[d] * (x1[d] - p[d]) * (x2[d] - p[d])
    return s <= 0.0


# ---------------------------------------------------------------------------
# batch pair-containment counting
# ---------------------------------------------------------------------------

def _euclid_counts(X, Q, w):
    # Vectorized but bit-exact against the scalar loop: only IEEE elementwise
    # +,-,* are used, accumulated in ascending dimension order.
    n, dim = X.shape
    m = Q.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    cols = np.arange(n)
    block = max(1, 4_000_000 // max(n, 1))
    for qi in range(m):
        D = X - Q[qi]
        DW = D * w
        total = 0
        for i0 in range(0, n, block):
            i1 = min(i0 + block, n)
            acc = np.zeros((i1 - i0, n), dtype=np.float64)
            for d in range(dim):
                acc += DW[i0:i1, d, None] * D[None, :, d]
            mask = cols[None, :] > np.arange(i0, i1)[:, None]
            total += int(np.count_nonzero((acc <= 0.0) & mask))
        counts[qi] = total
    return counts, 0


def depth_counts(kind, X, Q, w=None):
    """Count containing pairs per query point.

    Returns (counts, skipped): counts[qi] is the number of unordered sample
    pairs whose geodesic ball contains query qi, over the pairs that did not
    hit the cut locus; skipped is the number of cut-locus pairs (a property
    of the dataset, independent of the queries).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    n = X.shape[0]
    m = Q.shape[0]
    if kind == KIND_EUCLID:
        wv = np.ones(X.shape[1]) if w is None else np.asarray(w, dtype=np.float64)
        return _euclid_counts(X, Q, wv)
    counts = np.zeros(m, dtype=np.int64)
    skipped = 0
    Xl = X.tolist()
    Ql = Q.tolist()
    if kind == KIND_SPHERE:
        k = X.shape[1]
        for i in range(n - 1):
            xi = Xl[i]
            for j in range(i + 1, n):
                ok, mid, r = _sphere_pair(xi, Xl[j], k)
                if not ok:
                    skipped += 1
                    continue
                lim = r + BALL_SLACK
                for qi in range(m):
                    if math.acos(_clamp1(_dot(mid, Ql[qi], k))) <= lim:
                        counts[qi] += 1
    elif kind == KIND_TORUS:
        k = X.shape[1]
        for i in range(n - 1):
            xi = Xl[i]
            for j in range(i + 1, n):
                ok, mid, r = _torus_pair(xi, Xl[j], k)
                if not ok:
                    skipped += 1
                    continue
                lim = r + BALL_SLACK
                for qi in range(m):
                    if _torus_dist_flat(mid, Ql[qi], k) <= lim:
                        counts[qi] += 1
    elif kind == KIND_SPD:
        k = int(round(math.sqrt(X.shape[1])))
        for i in range(n - 1):
            xi = Xl[i]
            for j in range(i + 1, n):
                msi, r = _spd_pair(xi, Xl[j], k)
                lim = r + BALL_SLACK
                for qi in range(m):
                    if _spd_query_dist(msi, Ql[qi], k) <= lim:
                        counts[qi] += 1
    else:
        raise ValueError(f"unknown manifold kind {kind}")
    return counts, skipped
