"""Projective log-ratio metric on local vectors, mixing words and contraction."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .algebraic import LatticePoint, NumberField
from .errors import NoContraction, NullWordNotFound, SearchExhausted, ZeroMass
from .spectrum import DIGITS, DeltaSet, SpectrumPatch
from .transition import DigitMatrices, SpectralData, local_vector

CONNECTOR_CAP = 40
SAFETY = 1.05


def to_projective(v) -> np.ndarray:
    """Ratios v[i] / v[0] for i >= 1."""
    v = np.asarray(v, dtype=float)
    if not v[0] > 0:
        raise ZeroMass("first entry must be positive")
    return v[1:] / v[0]


def proj_distance(U, V) -> float:
    """max_i |ln V_i - ln U_i| on ratio vectors, with ln 0 - ln 0 = 0."""
    a = np.asarray(U, dtype=float)
    b = np.asarray(V, dtype=float)
    if a.size == 0:
        return 0.0
    return float(_kernels.proj_distance_rows(np.concatenate([[1.0], a])[None], np.concatenate([[1.0], b])[None])[0])


def vector_distance(u, v) -> float:
    """Distance between full vectors with positive first entry."""
    return float(_kernels.proj_distance_rows(np.asarray(u, float)[None], np.asarray(v, float)[None])[0])


# --- mixing word ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MixingWordResult:
    word: Tuple[int, ...]
    zero_rows: Tuple[int, ...]
    zero_cols: Tuple[int, ...]
    product: np.ndarray

    def to_dict(self):
        return {"word": "".join({-1: "-", 0: "0", 1: "+"}[c] for c in self.word),
                "length": len(self.word), "I": list(self.zero_rows), "J": list(self.zero_cols)}


def mixing_pattern(P: np.ndarray) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """(I, J) if P_ij = 0 exactly when i in I or j in J, with 0 outside both; else None."""
    nz = P != 0
    I = tuple(np.nonzero(~nz.any(axis=1))[0].tolist())
    J = tuple(np.nonzero(~nz.any(axis=0))[0].tolist())
    if 0 in I or 0 in J:
        return None
    live = np.ones(P.shape, dtype=bool)
    live[list(I), :] = False
    live[:, list(J)] = False
    if np.array_equal(live, nz):
        return I, J
    return None


def _supports(mats: DigitMatrices, transpose: bool) -> Dict[int, List[FrozenSet[int]]]:
    out = {}
    for c in DIGITS:
        A = mats[c].matrix
        if transpose:
            A = A.T.tocsr()
        out[c] = [frozenset(A.indices[A.indptr[i]:A.indptr[i + 1]].tolist()) for i in range(A.shape[0])]
    return out


def _step(sup, S: FrozenSet[int], c: int) -> FrozenSet[int]:
    out = set()
    for i in S:
        out |= sup[c][i]
    return frozenset(out)


def _connector(sup, S: FrozenSet[int], cap: int) -> Tuple[int, ...]:
    """Shortest word u with 0 -> 0 under u and S either dying or reaching 0."""
    start = (S, frozenset([0]))
    seen = {start}
    q = deque([(start, ())])
    while q:
        (A, B), w = q.popleft()
        if w and 0 in B and (not A or 0 in A):
            return w
        if len(w) >= cap:
            continue
        for c in DIGITS:
            nxt = (_step(sup, A, c), _step(sup, B, c))
            if nxt not in seen:
                seen.add(nxt)
                q.append((nxt, w + (c,)))
    raise SearchExhausted(f"no connector word of length <= {cap}")


def _half_word(mats: DigitMatrices, transpose: bool, cap: int) -> Tuple[int, ...]:
    """Word p whose product has every row zero or positive in column 0."""
    sup = _supports(mats, transpose)
    n = mats.dim
    rows = [frozenset([i]) for i in range(n)]
    word: Tuple[int, ...] = ()
    for m in range(n):
        if rows[m] and 0 not in rows[m]:
            u = _connector(sup, rows[m], cap)
            word += u
            for c in u:
                rows = [_step(sup, S, c) for S in rows]
    return word


EXACT_DIM = 200


def word_product(mats: DigitMatrices, word: Sequence[int]) -> np.ndarray:
    """A_w exactly in Python ints for small families, else rescaled floats.

    Rescaling keeps the zero pattern and every ratio between entries.
    """
    if mats.dim <= EXACT_DIM:
        return mats.product(word)
    P = sp.identity(mats.dim, format="csr", dtype=float)
    for c in word:
        P = P @ mats[c].matrix.astype(float)
        P = P / P.max()
    return P.toarray()


def _sparse_pattern_ok(B: sp.csr_matrix) -> bool:
    rows = np.diff(B.indptr) > 0
    cols = np.zeros(B.shape[1], dtype=bool)
    cols[B.indices] = True
    return bool(rows[0] and cols[0] and B.nnz == int(rows.sum()) * int(cols.sum()))


def find_mixing_word(mats: DigitMatrices, cap: int = CONNECTOR_CAP, zero_run: int = 40) -> MixingWordResult:
    """A word w whose product A_w has the zero-row/zero-column/positive structure.

    Plain runs of the digit 0 are tried first; otherwise w = p s where p sends
    every live row to index 0 and s reaches every live column from index 0.
    """
    Z = (mats[0].matrix != 0).astype(np.int8)
    B = sp.identity(mats.dim, format="csr", dtype=np.int8)
    for k in range(1, zero_run + 1):
        B = ((B @ Z) != 0).astype(np.int8)
        B.eliminate_zeros()
        if _sparse_pattern_ok(B):
            P = word_product(mats, (0,) * k)
            pat = mixing_pattern(P)
            return MixingWordResult((0,) * k, pat[0], pat[1], P)
    p = _half_word(mats, False, cap)
    s = _half_word(mats, True, cap)[::-1]
    w = p + s
    P = word_product(mats, w)
    pat = mixing_pattern(P)
    if pat is None:  # pragma: no cover - would contradict the construction
        raise SearchExhausted("constructed word does not have the mixing pattern")
    return MixingWordResult(w, pat[0], pat[1], P)


# --- contraction constants -----------------------------------------------


@dataclass(frozen=True)
class ContractionConstants:
    C1: float
    C2: float
    C2_birkhoff: float
    trials: int
    finite_pairs: int

    def to_dict(self):
        return {"C1_emp": self.C1, "C2_emp": self.C2, "C2_birkhoff": self.C2_birkhoff,
                "trials": self.trials, "finite_pairs": self.finite_pairs}


def sample_pairs(dim: int, trials: int, rng: np.random.Generator, spread: float = 4.0,
                 sparse: float = 0.5, same_support: float = 0.8) -> Tuple[np.ndarray, np.ndarray]:
    """Random vector pairs with positive first entry and log-uniform entries.

    Roughly half of the rows carry random zero patterns; most pairs share
    their support so that their distance is finite.
    """
    def one(shape):
        return np.exp(rng.uniform(-spread, spread, size=shape))

    U = one((trials, dim))
    V = one((trials, dim))
    mask_u = np.ones((trials, dim), dtype=bool)
    rows = rng.random(trials) < sparse
    mask_u[rows] = rng.random((int(rows.sum()), dim)) < rng.uniform(0.2, 0.9, size=(int(rows.sum()), 1))
    mask_u[:, 0] = True
    mask_v = mask_u.copy()
    diff = rng.random(trials) >= same_support
    mask_v[diff] = rng.random((int(diff.sum()), dim)) < 0.5
    mask_v[:, 0] = True
    return U * mask_u, V * mask_v


def birkhoff_coefficient(P: np.ndarray, I: Sequence[int], J: Sequence[int]) -> float:
    """tanh(D/4) with D the projective diameter of the positive block."""
    rows = [i for i in range(P.shape[0]) if i not in set(I)]
    cols = [j for j in range(P.shape[1]) if j not in set(J)]
    B = np.log(np.asarray(P, dtype=float)[np.ix_(rows, cols)])
    # ln(B_ik B_jl / (B_il B_jk)) maximized over row pairs (i, j) and column pairs (k, l)
    D = 0.0
    for i in range(len(rows)):
        t = B[i] - B  # t[j, k] = ln B_ik - ln B_jk
        D = max(D, float((t.max(axis=1) - t.min(axis=1)).max()))
    return float(np.tanh(D / 4.0))


def distances_under(A, U: np.ndarray, V: np.ndarray, backend=None) -> Tuple[np.ndarray, np.ndarray]:
    """(d(U, V), d(U A, V A)) row by row."""
    A = np.asarray(A, dtype=float)
    return (_kernels.proj_distance_rows(U, V, backend=backend),
            _kernels.proj_distance_rows(U @ A, V @ A, backend=backend))


def contraction_constants(mw: MixingWordResult, trials: int = 10**4, seed: int = 0, backend=None) -> ContractionConstants:
    rng = np.random.default_rng(seed)
    P = np.asarray(mw.product, dtype=float)
    # scale the product to keep float entries moderate; the metric is scale free
    P = P / P.max()
    U, V = sample_pairs(P.shape[0], trials, rng)
    d0, d1 = distances_under(P, U, V, backend=backend)
    if not np.all(np.isfinite(d1)):
        raise NoContraction("image vectors at infinite distance")
    C1 = SAFETY * float(d1.max())
    fin = np.isfinite(d0) & (d0 > 0)
    ratio = d1[fin] / d0[fin]
    C2 = SAFETY * float(ratio.max()) if ratio.size else 0.0
    if C2 >= 1.0:
        raise NoContraction(f"empirical contraction ratio {C2:.4f} >= 1")
    return ContractionConstants(C1, C2, birkhoff_coefficient(mw.product, mw.zero_rows, mw.zero_cols),
                                trials, int(fin.sum()))


@dataclass(frozen=True)
class ExpansionReport:
    digit: int
    pairs: int
    violations: int
    worst_ratio: float
    example: Optional[Tuple[np.ndarray, np.ndarray]] = None


def single_digit_expansion(mats: DigitMatrices, trials: int = 10**4, seed: int = 0,
                           tol: float = 1e-12, backend=None) -> List[ExpansionReport]:
    """Count pairs with d(U A_i, V A_i) > d(U, V) over sampled finite-distance pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for c in DIGITS:
        U, V = sample_pairs(mats.dim, trials, rng, same_support=1.0)
        d0, d1 = distances_under(mats[c].dense(), U, V, backend=backend)
        fin = np.isfinite(d0) & (d0 > 0)
        ratio = np.where(fin, d1 / np.where(fin, d0, 1.0), 0.0)
        bad = np.nonzero(fin & (d1 > d0 * (1 + tol) + tol))[0]
        ex = (U[bad[0]], V[bad[0]]) if len(bad) else None
        out.append(ExpansionReport(c, int(fin.sum()), len(bad), float(ratio.max()), ex))
    return out


# --- translation ratios ---------------------------------------------------


def f_translation(spec: SpectralData, mats: DigitMatrices, word: Sequence[int], j: int) -> float:
    """ln(mu(x + v_j) / mu(x)) from the local vector of a coding of x."""
    v = local_vector(spec, mats, word)
    if v[0] <= 0 or v[j] <= 0:
        raise ZeroMass(f"zero mass at index {j if v[0] > 0 else 0}")
    return float(np.log(v[j]) - np.log(v[0]))


# --- spanning ---------------------------------------------------------------


def find_null_word(field: NumberField, R: float = 2.0, max_len: int = 64) -> Tuple[int, ...]:
    """Shortest a_1..a_m over {-1,0,1} with a_1 != 0 and sum a_i beta^(m-i) = 0."""
    from .algebraic import in_box
    zero = field.zero()
    seen = {}
    q = deque()
    for a in (1, -1):
        z = field.T(a, zero)
        seen[z] = (a,)
        q.append(z)
    while q:
        z = q.popleft()
        w = seen[z]
        if len(w) >= max_len:
            continue
        for d in DIGITS:
            t = field.T(d, z)
            if t == zero:
                return w + (d,)
            if t not in seen and in_box(field, t, R, closed=True):
                seen[t] = w + (d,)
                q.append(t)
    raise NullWordNotFound(f"no null word with leading nonzero digit inside B({R})")


def delta_spanning_check(delta: DeltaSet, patch: SpectrumPatch) -> bool:
    """Every patch point is a finite sum of elements of delta."""
    field = delta.field
    find_null_word(field)
    E = field.embed_all(patch.points)
    bound = np.abs(E).max(axis=0) + 1e-9
    target = set(patch.points)
    seen = {field.zero()}
    q = deque([field.zero()])
    gens = [v for v in delta.elements if any(v)]
    while q and not target <= seen:
        z = q.popleft()
        for v in gens:
            t = field.add(z, v)
            if t in seen:
                continue
            if np.all(np.abs(field.embed_all([t])[0]) <= bound):
                seen.add(t)
                q.append(t)
    return target <= seen
