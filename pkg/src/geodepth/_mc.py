"""Vectorized pair-containment for the Monte-Carlo estimators.

Everything here serves statistical estimation (population depth, pair
subsampling), where the contract is distributional, not bitwise: numpy
transcendentals are used wholesale and results are deterministic for a
fixed numpy build but are not guaranteed to match the exact kernels bit
for bit. The exact paths live in the kernel backends.
"""

import numpy as np

from geodepth import manifolds as mf

SLACK = 1e-12
CUT_EPS = 1e-9
TWO_PI = 2.0 * np.pi

# cap on elements of the largest temporary a single chunk may allocate
_CHUNK_CELLS = 16_000_000


def _prep_euclid(X1, X2, w):
    a = np.einsum("bd,bd->b", X1 * w, X2)
    s = X1 + X2
    valid = np.ones(X1.shape[0], dtype=bool)

    def test(Q):
        c = np.einsum("md,d->m", Q * Q, w)
        ip = a[:, None] - s @ (Q * w).T + c[None, :]
        return ip <= 0.0

    return valid, test


def _prep_sphere(X1, X2):
    c12 = np.clip(np.einsum("bd,bd->b", X1, X2), -1.0, 1.0)
    valid = c12 > -1.0 + CUT_EPS
    r = 0.5 * np.arccos(c12)
    m = X1 + X2
    nrm = np.linalg.norm(m, axis=1)
    nrm[~valid] = 1.0
    m = m / nrm[:, None]
    lim = (r + SLACK)[:, None]

    def test(Q):
        out = np.arccos(np.clip(m @ Q.T, -1.0, 1.0)) <= lim
        out[~valid] = False
        return out

    return valid, test


def _prep_torus(X1, X2):
    diff = np.abs(X1 - X2)
    valid = ~np.any(np.abs(diff - np.pi) <= CUT_EPS, axis=1)
    cd = np.where(diff > np.pi, TWO_PI - diff, diff)
    r = 0.5 * np.sqrt(np.einsum("bd,bd->b", cd, cd))
    plain = 0.5 * (X1 + X2)
    mid = np.where(diff > np.pi, np.mod(plain + np.pi, TWO_PI), plain)
    lim = (r + SLACK)[:, None]

    def test(Q):
        dd = np.abs(mid[:, None, :] - Q[None, :, :])
        dd = np.where(dd > np.pi, TWO_PI - dd, dd)
        dist = np.sqrt(np.einsum("bmd,bmd->bm", dd, dd))
        out = dist <= lim
        out[~valid] = False
        return out

    return valid, test


def _stack_eig_fun(M, f):
    # V diag(f(w)) V^T for a (B, k, k) symmetric stack
    w, V = np.linalg.eigh(M)
    return np.einsum("bij,bj,bkj->bik", V, f(w), V)


def _prep_spd(X1, X2, k):
    A = X1.reshape(-1, k, k)
    B = X2.reshape(-1, k, k)
    S = _stack_eig_fun(A, lambda w: 1.0 / np.sqrt(np.maximum(w, 1e-300)))
    W = S @ B @ S
    ww = np.maximum(np.linalg.eigvalsh(W), 1e-300)
    r = 0.5 * np.sqrt(np.einsum("bk,bk->b", np.log(ww), np.log(ww)))
    Asq = _stack_eig_fun(A, lambda w: np.sqrt(np.maximum(w, 0.0)))
    Wh = _stack_eig_fun(W, lambda w: np.sqrt(np.maximum(w, 0.0)))
    mid = Asq @ Wh @ Asq
    msi = _stack_eig_fun(mid, lambda w: 1.0 / np.sqrt(np.maximum(w, 1e-300)))
    lim = r + SLACK
    valid = np.ones(A.shape[0], dtype=bool)

    def test(Q):
        Qm = Q.reshape(-1, k, k)
        out = np.empty((A.shape[0], Qm.shape[0]), dtype=bool)
        for qi in range(Qm.shape[0]):
            W2 = msi @ Qm[qi] @ msi
            w2 = np.maximum(np.linalg.eigvalsh(W2), 1e-300)
            d = np.sqrt(np.einsum("bk,bk->b", np.log(w2), np.log(w2)))
            out[:, qi] = d <= lim
        return out

    return valid, test


def _prepare(spec, X1, X2):
    if isinstance(spec, mf.Euclidean):
        return _prep_euclid(X1, X2, mf.weight_vector(spec))
    if isinstance(spec, mf.Sphere):
        return _prep_sphere(X1, X2)
    if isinstance(spec, mf.Torus):
        return _prep_torus(X1, X2)
    return _prep_spd(X1, X2, spec.size)


def count_contained(spec, X1, X2, Q):
    """Per-query containment counts over explicit pair rows.

    Returns (counts, valid): counts[q] is the number of valid (non
    cut-locus) pairs whose ball contains query q, valid the per-pair
    retention mask.
    """
    B = X1.shape[0]
    m = Q.shape[0]
    L = X1.shape[1]
    counts = np.zeros(m, dtype=np.int64)
    valid_all = np.empty(B, dtype=bool)
    pair_step = max(1, _CHUNK_CELLS // max(1, 4 * L))
    for lo in range(0, B, pair_step):
        hi = min(B, lo + pair_step)
        valid, test = _prepare(spec, X1[lo:hi], X2[lo:hi])
        valid_all[lo:hi] = valid
        q_step = max(1, _CHUNK_CELLS // max(1, (hi - lo) * L))
        for qlo in range(0, m, q_step):
            qhi = min(m, qlo + q_step)
            counts[qlo:qhi] += test(Q[qlo:qhi]).sum(axis=0, dtype=np.int64)
    return counts, valid_all


def contains_rows(spec, X1, X2, Q):
    """Boolean containment matrix (B, m) plus the valid-pair mask.

    Small-B convenience used by the redraw loop; cut-locus rows are False
    across the board.
    """
    valid, test = _prepare(spec, X1, X2)
    return test(Q), valid
