"""Hot loops, compiled with numba when available.

Set ``SPECTRA_NUMBA=0`` to force the pure numpy/scipy path.  Every public
function takes an optional ``backend`` argument ("numba" or "numpy") so both
paths can be compared side by side.
"""
import os

import numpy as np

try:
    import numba
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA and os.environ.get("SPECTRA_NUMBA", "1") != "0" else "numpy"


def _pick(backend):
    b = backend or BACKEND
    if b == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return b


if HAS_NUMBA:

    @njit(cache=True)
    def _vecmat_nb(indptr, indices, data, x, out):
        out[:] = 0.0
        for i in range(len(indptr) - 1):
            xi = x[i]
            if xi == 0.0:
                continue
            for p in range(indptr[i], indptr[i + 1]):
                out[indices[p]] += xi * data[p]

    @njit(cache=True)
    def _power_nb(indptr, indices, data, n, tol, max_iter):
        u = np.ones(n) / n
        v = np.empty(n)
        hist = np.zeros(4)
        prev = -1.0
        for it in range(max_iter):
            _vecmat_nb(indptr, indices, data, u, v)
            s = v.sum()
            if s == 0.0:
                return 0.0, u, it + 1
            hist[it % 4] = s / u.sum()
            u[:] = v / s
            if it >= 3:
                avg = hist.mean()
                if prev > 0 and abs(avg - prev) <= tol * avg:
                    return avg, u, it + 1
                prev = avg
        return -1.0, u, max_iter

    @njit(cache=True)
    def _perron_nb(indptr, indices, data, lam, tol, max_iter, n_reach, slack):
        n = len(indptr) - 1
        u = np.zeros(n)
        u[0] = 1.0
        v = np.empty(n)
        first_pos = -1
        bad_n = -1
        bad_i = -1
        for it in range(1, max_iter + 1):
            _vecmat_nb(indptr, indices, data, u, v)
            v /= lam
            diff = 0.0
            npos = 0
            for i in range(n):
                d = abs(v[i] - u[i])
                if d > diff:
                    diff = d
                if v[i] > 0.0:
                    npos += 1
            if first_pos < 0 and npos >= n_reach:
                first_pos = it
            if bad_n < 0:
                top = v[0] * (1.0 + slack)
                for i in range(n):
                    if v[i] > top:
                        bad_n = it
                        bad_i = i
                        break
            u[:] = v
            if diff < tol:
                return u, it, first_pos, bad_n, bad_i, diff
        return u, -1, first_pos, bad_n, bad_i, diff

    @njit(cache=True)
    def _w1_nb(pos, mass, lo, hi):
        # exact integral of |F_m - F_ref| over the real line, F_ref uniform on [lo, hi]
        L = hi - lo
        total = 0.0
        F = 0.0
        a = min(lo, pos[0])
        for k in range(len(pos) + 1):
            b = pos[k] if k < len(pos) else max(hi, pos[-1])
            total += _seg_nb(a, b, F, lo, hi, L)
            if k < len(pos):
                F += mass[k]
            a = b
        return total

    @njit(cache=True)
    def _seg_nb(a, b, F, lo, hi, L):
        # integral over [a, b] of |F - G(t)| with G the uniform CDF
        if b <= a:
            return 0.0
        out = 0.0
        if a < lo:
            e = min(b, lo)
            out += (e - a) * abs(F)
            a = e
        if b > hi:
            s = max(a, hi)
            out += (b - s) * abs(F - 1.0)
            b = s
        if b > a:
            ga = (a - lo) / L
            gb = (b - lo) / L
            out += _lin_abs(F - ga, F - gb, b - a)
        return out

    @njit(cache=True)
    def _lin_abs(p, q, w):
        if p * q >= 0.0:
            return 0.5 * w * (abs(p) + abs(q))
        t = p / (p - q)
        return 0.5 * w * (t * abs(p) + (1.0 - t) * abs(q))

    @njit(cache=True)
    def _projdist_nb(U, V):
        # rows are full vectors with positive first entry
        m, k = U.shape
        out = np.zeros(m)
        for r in range(m):
            best = 0.0
            for i in range(1, k):
                a = U[r, i]
                b = V[r, i]
                if a == 0.0 and b == 0.0:
                    continue
                if a == 0.0 or b == 0.0:
                    best = np.inf
                    break
                d = abs(np.log(b / V[r, 0]) - np.log(a / U[r, 0]))
                if d > best:
                    best = d
            out[r] = best
        return out


def _csr_parts(M):
    M = M.tocsr()
    return M.indptr.astype(np.int64), M.indices.astype(np.int64), M.data.astype(np.float64)


def vecmat(M, x, backend=None):
    """Row vector times sparse matrix, x @ M."""
    if _pick(backend) == "numba":
        ip, ix, dt = _csr_parts(M)
        out = np.empty(M.shape[1])
        _vecmat_nb(ip, ix, dt, np.ascontiguousarray(x, dtype=np.float64), out)
        return out
    return np.asarray(M.T @ x, dtype=float)


def power_iteration(M, tol=1e-12, max_iter=10**6, backend=None):
    """Left power iteration with a 4-step averaged growth ratio.

    Returns (lambda, normalized vector, iterations); lambda = -1 on failure.
    """
    n = M.shape[0]
    if _pick(backend) == "numba":
        ip, ix, dt = _csr_parts(M)
        lam, u, it = _power_nb(ip, ix, dt, n, tol, max_iter)
        return float(lam), u, int(it)
    MT = M.T.tocsr().astype(float)
    u = np.full(n, 1.0 / n)
    hist = np.zeros(4)
    prev = -1.0
    for it in range(max_iter):
        v = MT @ u
        s = v.sum()
        if s == 0.0:
            return 0.0, u, it + 1
        hist[it % 4] = s / u.sum()
        u = v / s
        if it >= 3:
            avg = hist.mean()
            if prev > 0 and abs(avg - prev) <= tol * avg:
                return float(avg), u, it + 1
            prev = avg
    return -1.0, u, max_iter


def perron_iterate(M, lam, tol=1e-13, max_iter=10**6, n_reach=None, slack=1e-12, backend=None):
    """Iterate u <- u M / lam from e_1.

    Returns (u, iterations or -1, first n with n_reach positive entries,
    first (n, index) where u[index] > u[0], final step size).
    """
    n = M.shape[0]
    n_reach = n if n_reach is None else n_reach
    if _pick(backend) == "numba":
        ip, ix, dt = _csr_parts(M)
        u, it, fp, bn, bi, diff = _perron_nb(ip, ix, dt, float(lam), tol, max_iter, n_reach, slack)
        return u, int(it), int(fp), (int(bn), int(bi)), float(diff)
    MT = M.T.tocsr().astype(float)
    u = np.zeros(n)
    u[0] = 1.0
    first_pos, bad = -1, (-1, -1)
    diff = np.inf
    for it in range(1, max_iter + 1):
        v = (MT @ u) / lam
        diff = float(np.max(np.abs(v - u)))
        if first_pos < 0 and np.count_nonzero(v > 0) >= n_reach:
            first_pos = it
        if bad[0] < 0:
            over = np.nonzero(v > v[0] * (1.0 + slack))[0]
            if len(over):
                bad = (it, int(over[0]))
        u = v
        if diff < tol:
            return u, it, first_pos, bad, diff
    return u, -1, first_pos, bad, diff


def w1_uniform(pos, mass, lo, hi, backend=None):
    """Exact W1 between atoms (sorted pos, mass summing to 1) and uniform on [lo, hi]."""
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    if _pick(backend) == "numba":
        return float(_w1_nb(pos, mass, float(lo), float(hi)))
    L = hi - lo
    F = np.concatenate([[0.0], np.cumsum(mass)])
    knots = np.concatenate([[min(lo, pos[0])], pos, [max(hi, pos[-1])]])
    # split every segment at lo and hi so the reference CDF is linear on each piece
    pts = np.unique(np.concatenate([knots, [lo, hi]]))
    a, b = pts[:-1], pts[1:]
    idx = np.searchsorted(pos, a, side="right")
    Fs = F[idx]
    ga = np.clip((a - lo) / L, 0.0, 1.0)
    gb = np.clip((b - lo) / L, 0.0, 1.0)
    p, q, w = Fs - ga, Fs - gb, b - a
    same = p * q >= 0
    t = np.where(same, 0.0, p / np.where(same, 1.0, p - q))
    val = np.where(same, 0.5 * w * (np.abs(p) + np.abs(q)), 0.5 * w * (t * np.abs(p) + (1 - t) * np.abs(q)))
    return float(val.sum())


def proj_distance_rows(U, V, backend=None):
    """Projective distance between corresponding rows of U and V."""
    U = np.ascontiguousarray(U, dtype=np.float64)
    V = np.ascontiguousarray(V, dtype=np.float64)
    if _pick(backend) == "numba":
        return _projdist_nb(U, V)
    a = U[:, 1:] / U[:, :1]
    b = V[:, 1:] / V[:, :1]
    za, zb = a == 0, b == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.abs(np.log(np.where(zb, 1.0, b)) - np.log(np.where(za, 1.0, a)))
    d[za & zb] = 0.0
    d[za ^ zb] = np.inf
    return d.max(axis=1) if d.shape[1] else np.zeros(len(U))
