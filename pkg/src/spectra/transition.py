"""Counting matrices, the growth constant lambda and the limit measure mu.

Matrices are scipy CSR with small non-negative integer entries, indexed by an
ordered list of lattice points.  Counting uses exact Python-int row vectors;
spectral work uses float vector-matrix products only.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .algebraic import LatticePoint, NumberField, require_pisot
from .errors import AssumptionViolated, ConvergenceFailure, TooLarge
from .spectrum import DIGITS, DeltaSet, SpectrumPatch


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    matrix: sp.csr_matrix
    index: List[LatticePoint]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def entries(self):
        """(row, col, value) triples in row-major order."""
        M = self.matrix.tocoo()
        order = np.lexsort((M.col, M.row))
        return [(int(M.row[k]), int(M.col[k]), int(M.data[k])) for k in order]


def _csr(rows, cols, vals, n) -> sp.csr_matrix:
    M = sp.coo_matrix((np.asarray(vals, dtype=np.int64), (np.asarray(rows), np.asarray(cols))), shape=(n, n))
    M = M.tocsr()
    M.sum_duplicates()
    M.sort_indices()
    return M


def _digit_weight(d: int) -> int:
    return 2 if d == 0 else 1


def build_lambda_R(patch: SpectrumPatch) -> TransitionMatrix:
    """Lambda_R(i, j) = 2 if T_0(x_i) = x_j, 1 if T_{+-1}(x_i) = x_j."""
    rows, cols, vals = [], [], []
    for c, d in enumerate(DIGITS):
        for i, j in enumerate(patch.edges[:, c]):
            if j >= 0:
                rows.append(i)
                cols.append(int(j))
                vals.append(_digit_weight(d))
    return TransitionMatrix(_csr(rows, cols, vals, len(patch)), list(patch.points))


@dataclass(frozen=True, eq=False)
class DigitMatrices:
    """The family A_{-1}, A_0, A_1 indexed by a difference set."""

    mats: Dict[int, TransitionMatrix]
    index: List[LatticePoint]

    def __getitem__(self, i: int) -> TransitionMatrix:
        return self.mats[i]

    @property
    def dim(self) -> int:
        return len(self.index)

    def product(self, word: Sequence[int]) -> np.ndarray:
        """Dense integer product A_{w_1} ... A_{w_n}."""
        P = np.eye(self.dim, dtype=object)
        for c in word:
            P = P.dot(self.mats[c].matrix.toarray().astype(object))
        return P


def digit_matrices_from(field: NumberField, points: Sequence[LatticePoint]) -> DigitMatrices:
    """(A_i)_{m,n} = 2 if T_{-i}(v_m) = v_n, 1 if T_{j-i}(v_m) = v_n for j = +-1."""
    index = {p: k for k, p in enumerate(points)}
    n = len(points)
    mats = {}
    for i in DIGITS:
        rows, cols, vals = [], [], []
        for m, v in enumerate(points):
            for j in DIGITS:
                t = field.T(j - i, v)
                k = index.get(t)
                if k is not None:
                    rows.append(m)
                    cols.append(k)
                    vals.append(_digit_weight(j))
        mats[i] = TransitionMatrix(_csr(rows, cols, vals, n), list(points))
    return DigitMatrices(mats, list(points))


def build_digit_matrices(delta: DeltaSet) -> DigitMatrices:
    return digit_matrices_from(delta.field, delta.elements)


def build_M0_pisot(V: Sequence[LatticePoint], field: NumberField) -> TransitionMatrix:
    """(M_0)_{i,j} = 2 if v_j = beta v_i, 1 if v_j = beta v_i +- 1."""
    require_pisot(field)
    index = {p: k for k, p in enumerate(V)}
    rows, cols, vals = [], [], []
    for i, v in enumerate(V):
        for d in DIGITS:
            k = index.get(field.T(d, v))
            if k is not None:
                rows.append(i)
                cols.append(k)
                vals.append(_digit_weight(d))
    return TransitionMatrix(_csr(rows, cols, vals, len(V)), list(V))


# --- spectral quantities --------------------------------------------------


def _component_of_first(M: sp.csr_matrix) -> np.ndarray:
    _, labels = connected_components(M, directed=True, connection="strong")
    return np.nonzero(labels == labels[0])[0]


def spectral_radius(M, tol: float = 1e-12, max_iter: int = 10**6, backend=None) -> float:
    """Spectral radius of the irreducible component containing index 1 (index 0 here)."""
    A = M.matrix if isinstance(M, TransitionMatrix) else sp.csr_matrix(M)
    comp = _component_of_first(A)
    sub = A[comp][:, comp].tocsr().astype(float)
    if sub.nnz == 0:
        return 0.0
    lam, _, it = _kernels.power_iteration(sub, tol=tol, max_iter=max_iter, backend=backend)
    if lam < 0:
        raise ConvergenceFailure(f"power iteration did not converge in {max_iter} steps")
    return lam


@dataclass(frozen=True, eq=False)
class SpectralData:
    """lambda, the Perron limit W = lim e_1 M^n / lambda^n and bookkeeping."""

    lam: float
    W: np.ndarray
    index: List[LatticePoint]
    residual: float
    iterations: int
    first_positive: int
    step: float

    @property
    def mu0(self) -> float:
        return float(self.W[0])

    @property
    def dim(self) -> int:
        return len(self.W)

    def probability(self) -> np.ndarray:
        return self.W / self.W.sum()

    def to_dict(self):
        return {"lambda": self.lam, "mu0": self.mu0, "dim": self.dim, "residual": self.residual}


def _reachable_count(A: sp.csr_matrix) -> int:
    seen = np.zeros(A.shape[0], dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        i = stack.pop()
        for j in A.indices[A.indptr[i]:A.indptr[i + 1]]:
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return int(seen.sum())


def perron_limit(M, lam: Optional[float] = None, tol: float = 1e-13, max_iter: int = 10**6,
                 check_maximality: bool = True, backend=None):
    """lim e_1 M^n / lambda^n by direct iteration.

    Returns (W, iterations, first n with e_1 M^n positive on the reachable
    set, final step size).  Raises AssumptionViolated when an entry exceeds
    the first one along the run.
    """
    A = M.matrix if isinstance(M, TransitionMatrix) else sp.csr_matrix(M)
    if A[0, 0] <= 0:
        raise AssumptionViolated("i", 0, 0)
    if lam is None:
        lam = spectral_radius(A, backend=backend)
    u, it, first_pos, bad, step = _kernels.perron_iterate(
        A, lam, tol=tol, max_iter=max_iter, n_reach=_reachable_count(A), backend=backend)
    if it < 0:
        raise ConvergenceFailure(f"Perron limit not converged after {max_iter} steps (last step {step:.3g})")
    if check_maximality and bad[0] >= 0:
        raise AssumptionViolated("iii", bad[0], bad[1])
    return u, it, first_pos, step


def spectral_data(M: TransitionMatrix, tol: float = 1e-12, limit_tol: float = 1e-13,
                  max_iter: int = 10**6, check_maximality: bool = True, backend=None) -> SpectralData:
    # the limit is scale sensitive, so lambda is pushed well past the requested tolerance
    lam = spectral_radius(M, tol=min(tol, 1e-15), max_iter=max_iter, backend=backend)
    W, it, first_pos, step = perron_limit(M, lam, tol=limit_tol, max_iter=max_iter,
                                          check_maximality=check_maximality, backend=backend)
    res = float(np.max(np.abs(_kernels.vecmat(M.matrix, W, backend=backend) / lam - W)))
    return SpectralData(lam, W, list(M.index), res, it, first_pos, step)


# --- exact counting -------------------------------------------------------


def exact_row_powers(M: TransitionMatrix, n: int, start: int = 0) -> List[List[int]]:
    """e_start M^k for k = 0..n as Python-int lists."""
    A = M.matrix
    ip, ix, dt = A.indptr, A.indices, A.data
    u = [0] * M.dim
    u[start] = 1
    out = [u]
    for _ in range(n):
        v = [0] * M.dim
        for i, ui in enumerate(u):
            if ui:
                for p in range(ip[i], ip[i + 1]):
                    v[ix[p]] += ui * int(dt[p])
        out.append(v)
        u = v
    return out


def coding_count(mats: DigitMatrices, word: Sequence[int]) -> List[int]:
    """e_1 A_{c_1} ... A_{c_n} in exact integers: entry j counts N_n(x + v_j)."""
    u = [0] * mats.dim
    u[0] = 1
    for c in word:
        A = mats[c].matrix
        v = [0] * mats.dim
        for i, ui in enumerate(u):
            if ui:
                for p in range(A.indptr[i], A.indptr[i + 1]):
                    v[A.indices[p]] += ui * int(A.data[p])
        u = v
    return u


def _word_values(field: NumberField, n: int) -> np.ndarray:
    """Lattice points sum a_i beta^(n-i) for all a in {0,1}^n, shape (2^n, deg)."""
    pw = [field.integer(1)]
    for _ in range(n - 1):
        pw.append(field.times_beta(pw[-1]))
    P = np.array(pw[::-1], dtype=np.int64)  # row i is beta^(n-1-i)
    bits = ((np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int64)
    return bits @ P


def brute_force_counts(field: NumberField, n: int, max_n: int = 14) -> Counter:
    """N_n(x) for every x by enumerating all pairs (a, b) in {0,1}^n x {0,1}^n."""
    if n > max_n:
        raise TooLarge(f"n = {n} exceeds the enumeration cap {max_n}")
    if n == 0:
        return Counter({field.zero(): 1})
    A = _word_values(field, n)
    lo = A.min(axis=0) - A.max(axis=0)
    span = A.max(axis=0) - A.min(axis=0)
    radix = 2 * span + 1
    mult = np.cumprod(np.concatenate([[1], radix[:-1]]))
    if float(np.prod(radix.astype(float))) > 2**62:
        raise TooLarge("key space too large")
    total: Counter = Counter()
    chunk = max(1, 2**20 // len(A))
    for s in range(0, len(A), chunk):
        D = A[s:s + chunk, None, :] - A[None, :, :]
        keys = ((D.reshape(-1, field.degree) - lo) * mult).sum(axis=1)
        u, c = np.unique(keys, return_counts=True)
        for k, v in zip(u.tolist(), c.tolist()):
            total[k] += v
    out = Counter()
    for k, v in total.items():
        z = []
        for r in radix:
            z.append(k % int(r))
            k //= int(r)
        out[tuple(int(a + b) for a, b in zip(z, lo))] = v
    return out


def brute_force_N(field: NumberField, x: LatticePoint, n: int) -> int:
    return brute_force_counts(field, n).get(tuple(x), 0)


def apply_L(counts: Mapping[LatticePoint, int], field: NumberField) -> Dict[LatticePoint, int]:
    """(L nu)(x) = nu(T_{-1}^{-1} x) + 2 nu(T_0^{-1} x) + nu(T_1^{-1} x)."""
    out: Dict[LatticePoint, int] = {}
    for y, m in counts.items():
        if not m:
            continue
        for d in DIGITS:
            t = field.T(d, y)
            out[t] = out.get(t, 0) + _digit_weight(d) * m
    return out


# --- measure values -------------------------------------------------------


def local_vector(spec: SpectralData, mats: DigitMatrices, word: Sequence[int], backend=None) -> np.ndarray:
    """lambda^-n W A_{c_1} ... A_{c_n}; entry j is mu(x + v_j)."""
    v = np.array(spec.W, dtype=float)
    for c in word:
        v = _kernels.vecmat(mats[c].matrix, v, backend=backend) / spec.lam
    return v


def measure_at(spec: SpectralData, mats: DigitMatrices, word: Sequence[int], backend=None) -> float:
    return float(local_vector(spec, mats, word, backend=backend)[0])


def delta_spectral_data(mats: DigitMatrices, **kw) -> SpectralData:
    """Spectral data of A_0, whose Perron limit is the local vector of 0."""
    return spectral_data(mats[0], **kw)


def patch_local_vectors(patch: SpectrumPatch, spec: SpectralData, mats: DigitMatrices) -> np.ndarray:
    """Local vectors of every patch point, propagated along the BFS tree."""
    out = np.zeros((len(patch), mats.dim))
    out[0] = spec.W
    for k in range(1, len(patch)):
        p, d = patch.parent[k]
        out[k] = _kernels.vecmat(mats[d].matrix, out[p]) / spec.lam
    return out


def patch_measure(patch: SpectrumPatch, spec: SpectralData, mats: DigitMatrices) -> np.ndarray:
    return patch_local_vectors(patch, spec, mats)[:, 0]
