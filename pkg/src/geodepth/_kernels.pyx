# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Operation-for-operation mirror of _kernels_py (which holds the reference
semantics). Same accumulation order, same branches, same libm calls; the
extension is compiled with -ffp-contract=off so results stay bit-identical
to the pure backend.
"""

import numpy as np

from libc.math cimport M_PI, acos, exp, fabs, fmod, log, pow, sqrt
from libc.stdlib cimport free, malloc

from geodepth.errors import CutLocus, NoConvergence, NotPositiveDefinite

COMPILED = True

cdef double TWO_PI = 2.0 * M_PI
cdef double BALL_SLACK = 1e-12
cdef double CUT_EPS = 1e-9
cdef double JACOBI_TOL = 1e-14
cdef int JACOBI_MAX_SWEEPS = 100

cdef int _K_EUCLID = 0
cdef int _K_SPHERE = 1
cdef int _K_TORUS = 2
cdef int _K_SPD = 3

KIND_EUCLID = _K_EUCLID
KIND_SPHERE = _K_SPHERE
KIND_TORUS = _K_TORUS
KIND_SPD = _K_SPD

FUN_SQRT = 0
FUN_INVSQRT = 1
FUN_LOG = 2
FUN_EXP = 3
FUN_POW = 4


# ---------------------------------------------------------------------------
# cyclic Jacobi
# ---------------------------------------------------------------------------

cdef int _jacobi_flat(double* a, double* v, double* w, int* idx, int k,
                      bint want_vectors) noexcept nogil:
    # destroys a; returns 0 ok, 1 no convergence
    cdef int i, j, p, q, m, sweep
    cdef double s_norm, nrm, thresh, apq, theta, t, c, s
    cdef double app, aqq, aip, aiq, x, y, vip, viq
    cdef bint rotated, converged
    for i in range(k - 1):
        for j in range(i + 1, k):
            x = 0.5 * (a[i * k + j] + a[j * k + i])
            a[i * k + j] = x
            a[j * k + i] = x
    if want_vectors:
        for i in range(k * k):
            v[i] = 0.0
        for i in range(k):
            v[i * k + i] = 1.0
    s_norm = 0.0
    for i in range(k * k):
        s_norm += a[i] * a[i]
    nrm = sqrt(s_norm)
    thresh = JACOBI_TOL * nrm
    converged = nrm == 0.0 or k == 1
    if not converged:
        for sweep in range(JACOBI_MAX_SWEEPS):
            rotated = False
            for p in range(k - 1):
                for q in range(p + 1, k):
                    apq = a[p * k + q]
                    if fabs(apq) <= thresh:
                        continue
                    rotated = True
                    theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq)
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
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
        return 1
    for i in range(k):
        idx[i] = i
    for i in range(k - 1):
        m = i
        for j in range(i + 1, k):
            if a[idx[j] * k + idx[j]] > a[idx[m] * k + idx[m]]:
                m = j
        if m != i:
            j = idx[i]
            idx[i] = idx[m]
            idx[m] = j
    for i in range(k):
        w[i] = a[idx[i] * k + idx[i]]
    if want_vectors:
        for p in range(k):
            for i in range(k):
                a[p * k + i] = v[p * k + idx[i]]
        for i in range(k * k):
            v[i] = a[i]
    return 0


cdef int _eigfun(double* w, double* fw, int code, double s, int k) noexcept nogil:
    # returns 1 when positivity is required and violated
    cdef int l
    cdef double x
    for l in range(k):
        x = w[l]
        if code == 3:
            fw[l] = exp(x)
        else:
            if x <= 0.0:
                return 1
            if code == 0:
                fw[l] = sqrt(x)
            elif code == 1:
                fw[l] = 1.0 / sqrt(x)
            elif code == 2:
                fw[l] = log(x)
            else:
                fw[l] = pow(x, s)
    return 0


cdef void _recompose(double* v, double* fw, double* out, int k) noexcept nogil:
    cdef int i, j, l
    cdef double acc
    for i in range(k):
        for j in range(i, k):
            acc = 0.0
            for l in range(k):
                acc += v[i * k + l] * fw[l] * v[j * k + l]
            out[i * k + j] = acc
            out[j * k + i] = acc


cdef void _mm(double* x, double* y, double* out, int k) noexcept nogil:
    cdef int i, j, l
    cdef double acc
    for i in range(k):
        for j in range(k):
            acc = 0.0
            for l in range(k):
                acc += x[i * k + l] * y[l * k + j]
            out[i * k + j] = acc


cdef bint _allpos(double* w, int k) noexcept nogil:
    cdef int i
    for i in range(k):
        if w[i] <= 0.0:
            return False
    return True


cdef double _log_norm(double* w, int k) noexcept nogil:
    cdef double s = 0.0, lg
    cdef int i
    for i in range(k):
        lg = log(w[i])
        s += lg * lg
    return sqrt(s)


# SPD scratch arena: 10 k*k matrix slots, 3 k-vectors, k ints.
cdef struct SpdWork:
    double* c0
    double* c1
    double* c2
    double* c3
    double* c4
    double* c5
    double* c6
    double* c7
    double* msi
    double* mid
    double* w1
    double* w2
    double* fw
    int* idx


cdef int _spd_alloc(SpdWork* ws, int k) except -1:
    cdef double* buf = <double*>malloc(sizeof(double) * (10 * k * k + 3 * k))
    cdef int* ib = <int*>malloc(sizeof(int) * k)
    if buf == NULL or ib == NULL:
        free(buf)
        free(ib)
        raise MemoryError()
    ws.c0 = buf
    ws.c1 = buf + k * k
    ws.c2 = buf + 2 * k * k
    ws.c3 = buf + 3 * k * k
    ws.c4 = buf + 4 * k * k
    ws.c5 = buf + 5 * k * k
    ws.c6 = buf + 6 * k * k
    ws.c7 = buf + 7 * k * k
    ws.msi = buf + 8 * k * k
    ws.mid = buf + 9 * k * k
    ws.w1 = buf + 10 * k * k
    ws.w2 = buf + 10 * k * k + k
    ws.fw = buf + 10 * k * k + 2 * k
    ws.idx = ib
    return 0


cdef void _spd_free(SpdWork* ws) noexcept nogil:
    free(ws.c0)
    free(ws.idx)


cdef int _spd_mid_flat(double* a, double* b, int k, double* m_out, double* ww,
                       SpdWork* ws) noexcept nogil:
    # returns 0 ok, 1 not positive definite, 2 no convergence
    cdef int i
    for i in range(k * k):
        ws.c0[i] = a[i]
    if _jacobi_flat(ws.c0, ws.c1, ws.w1, ws.idx, k, True):
        return 2
    if not _allpos(ws.w1, k):
        return 1
    _eigfun(ws.w1, ws.fw, 0, 0.0, k)
    _recompose(ws.c1, ws.fw, ws.c2, k)          # A^{1/2}
    _eigfun(ws.w1, ws.fw, 1, 0.0, k)
    _recompose(ws.c1, ws.fw, ws.c3, k)          # A^{-1/2}
    _mm(ws.c3, b, ws.c4, k)
    _mm(ws.c4, ws.c3, ws.c5, k)                 # whitened B
    if _jacobi_flat(ws.c5, ws.c6, ww, ws.idx, k, True):
        return 2
    if not _allpos(ww, k):
        return 1
    _eigfun(ww, ws.fw, 0, 0.0, k)
    _recompose(ws.c6, ws.fw, ws.c4, k)          # sqrt of whitened B
    _mm(ws.c2, ws.c4, ws.c3, k)
    _mm(ws.c3, ws.c2, m_out, k)
    return 0


cdef int _spd_pair(double* a, double* b, int k, double* msi_out, double* r_out,
                   SpdWork* ws) noexcept nogil:
    cdef int st, i
    st = _spd_mid_flat(a, b, k, ws.mid, ws.w2, ws)
    if st:
        return st
    r_out[0] = 0.5 * _log_norm(ws.w2, k)
    for i in range(k * k):
        ws.c0[i] = ws.mid[i]
    if _jacobi_flat(ws.c0, ws.c1, ws.w1, ws.idx, k, True):
        return 2
    if not _allpos(ws.w1, k):
        return 1
    _eigfun(ws.w1, ws.fw, 1, 0.0, k)
    _recompose(ws.c1, ws.fw, msi_out, k)
    return 0


cdef int _spd_query_dist(double* msi, double* p, int k, SpdWork* ws,
                         double* out) noexcept nogil:
    _mm(msi, p, ws.c4, k)
    _mm(ws.c4, msi, ws.c5, k)
    if _jacobi_flat(ws.c5, NULL, ws.w1, ws.idx, k, False):
        return 2
    if not _allpos(ws.w1, k):
        return 1
    out[0] = _log_norm(ws.w1, k)
    return 0


cdef void _raise_spd(int st):
    if st == 1:
        raise NotPositiveDefinite("spd kernel: nonpositive eigenvalue")
    raise NoConvergence("spd kernel: jacobi did not converge")


# ---------------------------------------------------------------------------
# sphere / torus / euclid primitives
# ---------------------------------------------------------------------------

cdef double _dot(double* u, double* v, int k) noexcept nogil:
    cdef double s = 0.0
    cdef int d
    for d in range(k):
        s += u[d] * v[d]
    return s


cdef double _clamp1(double c) noexcept nogil:
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


cdef int _sphere_pair(double* x1, double* x2, int k, double* m,
                      double* r) noexcept nogil:
    cdef double c12 = _clamp1(_dot(x1, x2, k))
    cdef double nrm
    cdef int d
    if c12 <= -1.0 + CUT_EPS:
        return 0
    r[0] = 0.5 * acos(c12)
    for d in range(k):
        m[d] = x1[d] + x2[d]
    nrm = sqrt(_dot(m, m, k))
    for d in range(k):
        m[d] = m[d] / nrm
    return 1


cdef int _torus_pair(double* a, double* b, int k, double* m, double* r) noexcept nogil:
    cdef double s = 0.0, diff, cd, md
    cdef int d
    for d in range(k):
        diff = fabs(a[d] - b[d])
        if fabs(diff - M_PI) <= CUT_EPS:
            return 0
        if diff > M_PI:
            cd = TWO_PI - diff
            md = fmod(0.5 * (a[d] + b[d]) + M_PI, TWO_PI)
        else:
            cd = diff
            md = 0.5 * (a[d] + b[d])
        s += cd * cd
        m[d] = md
    r[0] = 0.5 * sqrt(s)
    return 1


cdef double _torus_dist(double* m, double* p, int k) noexcept nogil:
    cdef double s = 0.0, diff
    cdef int d
    for d in range(k):
        diff = fabs(m[d] - p[d])
        if diff > M_PI:
            diff = TWO_PI - diff
        s += diff * diff
    return sqrt(s)


# ---------------------------------------------------------------------------
# scalar API (mirrors _kernels_py signatures)
# ---------------------------------------------------------------------------

cdef _as_vec(x):
    return np.ascontiguousarray(np.asarray(x, dtype=np.float64))


def jacobi_eig(A, want_vectors=True):
    """Eigen-decomposition of a symmetric matrix, eigenvalues descending."""
    a = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    cdef int k = a.shape[0]
    acopy = a.reshape(-1).copy()
    cdef double[::1] av = acopy
    w = np.empty(k, dtype=np.float64)
    cdef double[::1] wv = w
    cdef bint wantv = bool(want_vectors)
    v = np.empty(k * k, dtype=np.float64) if wantv else None
    cdef double[::1] vv
    cdef double* vp = NULL
    if wantv:
        vv = v
        vp = &vv[0]
    idxa = np.empty(k, dtype=np.intc)
    cdef int[::1] idxv = idxa
    cdef int st
    st = _jacobi_flat(&av[0], vp, &wv[0], &idxv[0], k, wantv)
    if st:
        raise NoConvergence(
            f"jacobi: off-diagonal mass above threshold after "
            f"{JACOBI_MAX_SWEEPS} sweeps (k={k})"
        )
    if not wantv:
        return w, None
    return w, v.reshape(k, k)


def sym_matfun(A, code, s=0.0):
    """Apply a scalar function to a symmetric matrix through its eigenvalues."""
    a = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    cdef int k = a.shape[0]
    cdef int icode = code
    cdef double sv = s
    acopy = a.reshape(-1).copy()
    cdef double[::1] av = acopy
    out = np.empty(k * k, dtype=np.float64)
    cdef double[::1] ov = out
    cdef SpdWork ws
    _spd_alloc(&ws, k)
    cdef int st = 0
    try:
        st = _jacobi_flat(&av[0], ws.c1, ws.w1, ws.idx, k, True)
        if st:
            raise NoConvergence("sym_matfun: jacobi did not converge")
        if _eigfun(ws.w1, ws.fw, icode, sv, k):
            names = {0: "sqrt", 1: "inv_sqrt", 2: "log", 4: "pow"}
            raise NotPositiveDefinite(f"{names.get(icode, icode)}: eigenvalue <= 0")
        _recompose(ws.c1, ws.fw, &ov[0], k)
    finally:
        _spd_free(&ws)
    return out.reshape(k, k)


def spd_eigvals(A):
    w, _ = jacobi_eig(A, want_vectors=False)
    return w


def spd_distance(A, B):
    a = np.ascontiguousarray(np.asarray(A, dtype=np.float64)).reshape(-1)
    b = np.ascontiguousarray(np.asarray(B, dtype=np.float64)).reshape(-1)
    cdef int k = <int>np.asarray(A).shape[0]
    cdef int i
    # order the operands by their first differing entry: the metric is
    # symmetric, but whitening by A vs by B rounds differently, and exact
    # d(A,B) == d(B,A) is part of the contract
    for i in range(k * k):
        if a[i] != b[i]:
            if b[i] < a[i]:
                a, b = b, a
            break
    cdef double[::1] av = a.copy()
    cdef const double[::1] bv = b
    cdef SpdWork ws
    _spd_alloc(&ws, k)
    cdef int st
    cdef double out = 0.0
    try:
        st = _jacobi_flat(&av[0], ws.c1, ws.w1, ws.idx, k, True)
        if st == 0 and not _allpos(ws.w1, k):
            st = 1
        if st == 0:
            _eigfun(ws.w1, ws.fw, 1, 0.0, k)
            _recompose(ws.c1, ws.fw, ws.c3, k)
            _mm(ws.c3, &bv[0], ws.c4, k)
            _mm(ws.c4, ws.c3, ws.c5, k)
            st = _jacobi_flat(ws.c5, NULL, ws.w2, ws.idx, k, False)
            if st == 0 and not _allpos(ws.w2, k):
                st = 1
            if st == 0:
                out = _log_norm(ws.w2, k)
        if st:
            _raise_spd(st)
    finally:
        _spd_free(&ws)
    return out


def spd_midpoint(A, B):
    a = np.ascontiguousarray(np.asarray(A, dtype=np.float64)).reshape(-1)
    b = np.ascontiguousarray(np.asarray(B, dtype=np.float64)).reshape(-1)
    cdef int k = <int>np.asarray(A).shape[0]
    cdef const double[::1] av = a
    cdef const double[::1] bv = b
    out = np.empty(k * k, dtype=np.float64)
    cdef double[::1] ov = out
    cdef SpdWork ws
    _spd_alloc(&ws, k)
    cdef int st
    try:
        st = _spd_mid_flat(&av[0], &bv[0], k, &ov[0], ws.w2, &ws)
        if st:
            _raise_spd(st)
    finally:
        _spd_free(&ws)
    return out.reshape(k, k)


def spd_ball_contains(A, B, P):
    a = np.ascontiguousarray(np.asarray(A, dtype=np.float64)).reshape(-1)
    b = np.ascontiguousarray(np.asarray(B, dtype=np.float64)).reshape(-1)
    p = np.ascontiguousarray(np.asarray(P, dtype=np.float64)).reshape(-1)
    cdef int k = <int>np.asarray(A).shape[0]
    cdef const double[::1] av = a
    cdef const double[::1] bv = b
    cdef const double[::1] pv = p
    cdef SpdWork ws
    _spd_alloc(&ws, k)
    cdef int st
    cdef double r = 0.0, d = 0.0
    cdef bint res = False
    try:
        st = _spd_pair(&av[0], &bv[0], k, ws.msi, &r, &ws)
        if st == 0:
            st = _spd_query_dist(ws.msi, &pv[0], k, &ws, &d)
        if st:
            _raise_spd(st)
        res = d <= r + BALL_SLACK
    finally:
        _spd_free(&ws)
    return bool(res)


def sphere_distance(u, v):
    uu = _as_vec(u)
    vv_ = _as_vec(v)
    cdef const double[::1] uv = uu
    cdef const double[::1] vv = vv_
    return acos(_clamp1(_dot(&uv[0], &vv[0], uu.shape[0])))


def sphere_midpoint(u, v):
    uu = _as_vec(u)
    vv_ = _as_vec(v)
    cdef int k = uu.shape[0]
    cdef const double[::1] uv = uu
    cdef const double[::1] vv = vv_
    m = np.empty(k, dtype=np.float64)
    cdef double[::1] mv = m
    cdef double r = 0.0
    if not _sphere_pair(&uv[0], &vv[0], k, &mv[0], &r):
        raise CutLocus("sphere midpoint: antipodal pair")
    return m


def sphere_ball_contains(x1, x2, p):
    a = _as_vec(x1)
    b = _as_vec(x2)
    q = _as_vec(p)
    cdef int k = a.shape[0]
    cdef const double[::1] av = a
    cdef const double[::1] bv = b
    cdef const double[::1] qv = q
    m = np.empty(k, dtype=np.float64)
    cdef double[::1] mv = m
    cdef double r = 0.0
    if not _sphere_pair(&av[0], &bv[0], k, &mv[0], &r):
        raise CutLocus("sphere ball: antipodal pair")
    return bool(acos(_clamp1(_dot(&mv[0], &qv[0], k))) <= r + BALL_SLACK)


def torus_distance(a, b):
    aa = _as_vec(a)
    bb = _as_vec(b)
    cdef const double[::1] av = aa
    cdef const double[::1] bv = bb
    return _torus_dist(&av[0], &bv[0], aa.shape[0])


def torus_midpoint(a, b):
    aa = _as_vec(a)
    bb = _as_vec(b)
    cdef int k = aa.shape[0]
    cdef const double[::1] av = aa
    cdef const double[::1] bv = bb
    m = np.empty(k, dtype=np.float64)
    cdef double[::1] mv = m
    cdef double r = 0.0
    if not _torus_pair(&av[0], &bv[0], k, &mv[0], &r):
        raise CutLocus("torus midpoint: half-period coordinate")
    return m


def torus_ball_contains(a, b, p):
    aa = _as_vec(a)
    bb = _as_vec(b)
    qq = _as_vec(p)
    cdef int k = aa.shape[0]
    cdef const double[::1] av = aa
    cdef const double[::1] bv = bb
    cdef const double[::1] qv = qq
    m = np.empty(k, dtype=np.float64)
    cdef double[::1] mv = m
    cdef double r = 0.0
    if not _torus_pair(&av[0], &bv[0], k, &mv[0], &r):
        raise CutLocus("torus ball: half-period coordinate")
    return bool(_torus_dist(&mv[0], &qv[0], k) <= r + BALL_SLACK)


def euclid_distance(x, y, w):
    xx = _as_vec(x)
    yy = _as_vec(y)
    ww_ = _as_vec(w)
    cdef const double[::1] xv = xx
    cdef const double[::1] yv = yy
    cdef const double[::1] wv = ww_
    cdef double s = 0.0, diff
    cdef int d
    for d in range(xx.shape[0]):
        diff = xv[d] - yv[d]
        s += wv[d] * diff * diff
    return sqrt(s)


def euclid_ball_contains(x1, x2, p, w):
    a = _as_vec(x1)
    b = _as_vec(x2)
    q = _as_vec(p)
    ww_ = _as_vec(w)
    cdef const double[::1] av = a
    cdef const double[::1] bv = b
    cdef const double[::1] qv = q
    cdef const double[::1] wv = ww_
    cdef double s = 0.0
    cdef int d
    for d in range(a.shape[0]):
        s += wv[d] * (av[d] - qv[d]) * (bv[d] - qv[d])
    return bool(s <= 0.0)


# ---------------------------------------------------------------------------
# batch pair-containment counting
# ---------------------------------------------------------------------------

def depth_counts(int kind, X, Q, w=None):
    """Count containing pairs per query; see _kernels_py.depth_counts."""
    Xa = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    Qa = np.ascontiguousarray(np.asarray(Q, dtype=np.float64))
    cdef const double[:, ::1] Xv = Xa
    cdef const double[:, ::1] Qv = Qa
    cdef int n = Xv.shape[0]
    cdef int m = Qv.shape[0]
    cdef int dim = Xv.shape[1]
    counts = np.zeros(m, dtype=np.int64)
    cdef long[::1] cv = counts
    cdef long skipped = 0
    cdef int i, j, qi, d, k, st
    cdef double s, r, lim, dist
    cdef double* mid
    cdef double* Dbuf
    cdef double* DWbuf
    cdef const double[::1] wv
    cdef SpdWork ws
    st = 0

    if kind == _K_EUCLID:
        warr = np.ones(dim) if w is None else np.asarray(w, dtype=np.float64)
        warr = np.ascontiguousarray(warr)
        wv = warr
        Dbuf = <double*>malloc(sizeof(double) * n * dim)
        DWbuf = <double*>malloc(sizeof(double) * n * dim)
        if Dbuf == NULL or DWbuf == NULL:
            free(Dbuf)
            free(DWbuf)
            raise MemoryError()
        with nogil:
            for qi in range(m):
                for i in range(n):
                    for d in range(dim):
                        Dbuf[i * dim + d] = Xv[i, d] - Qv[qi, d]
                        DWbuf[i * dim + d] = wv[d] * Dbuf[i * dim + d]
                for i in range(n - 1):
                    for j in range(i + 1, n):
                        s = 0.0
                        for d in range(dim):
                            s += DWbuf[i * dim + d] * Dbuf[j * dim + d]
                        if s <= 0.0:
                            cv[qi] += 1
        free(Dbuf)
        free(DWbuf)
        return counts, 0

    if kind == _K_SPHERE or kind == _K_TORUS:
        mid = <double*>malloc(sizeof(double) * dim)
        if mid == NULL:
            raise MemoryError()
        with nogil:
            for i in range(n - 1):
                for j in range(i + 1, n):
                    if kind == _K_SPHERE:
                        if not _sphere_pair(&Xv[i, 0], &Xv[j, 0], dim, mid, &r):
                            skipped += 1
                            continue
                        lim = r + BALL_SLACK
                        for qi in range(m):
                            if acos(_clamp1(_dot(mid, &Qv[qi, 0], dim))) <= lim:
                                cv[qi] += 1
                    else:
                        if not _torus_pair(&Xv[i, 0], &Xv[j, 0], dim, mid, &r):
                            skipped += 1
                            continue
                        lim = r + BALL_SLACK
                        for qi in range(m):
                            if _torus_dist(mid, &Qv[qi, 0], dim) <= lim:
                                cv[qi] += 1
        free(mid)
        return counts, int(skipped)

    if kind == _K_SPD:
        k = <int>round(sqrt(dim))
        _spd_alloc(&ws, k)
        st = 0
        with nogil:
            for i in range(n - 1):
                if st:
                    break
                for j in range(i + 1, n):
                    st = _spd_pair(&Xv[i, 0], &Xv[j, 0], k, ws.msi, &r, &ws)
                    if st:
                        break
                    lim = r + BALL_SLACK
                    for qi in range(m):
                        st = _spd_query_dist(ws.msi, &Qv[qi, 0], k, &ws, &dist)
                        if st:
                            break
                        if dist <= lim:
                            cv[qi] += 1
                    if st:
                        break
        _spd_free(&ws)
        if st:
            _raise_spd(st)
        return counts, 0

    raise ValueError(f"unknown manifold kind {kind}")
