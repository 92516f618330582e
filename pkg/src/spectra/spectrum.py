"""Finite pieces of the spectrum as exact lattice point sets.

Patches, the interval set V, the difference set Delta, the contracting
window (attractor of y -> rho*y + i) and the Condition 1 check all live here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .algebraic import (
    AMBIGUOUS,
    BOUNDARY,
    INSIDE,
    OUTSIDE,
    LatticePoint,
    NumberField,
    require_hyperbolic,
    require_pisot,
)
from .errors import BoundaryAmbiguous, DepthTooLarge, PatchTooLarge

DIGITS = (-1, 0, 1)
DEFAULT_CAP = 10**7
TABLE1_MARGIN = 0.01


def _as_array(points: Sequence[LatticePoint]) -> np.ndarray:
    if not points:
        return np.zeros((0, 0), dtype=np.int64)
    big = max(max(abs(v) for v in p) for p in points)
    return np.array(points, dtype=np.int64 if big < 2**40 else object)


def _children(field: NumberField, Z: np.ndarray, digits) -> List[np.ndarray]:
    B = Z @ field.companion.T.astype(Z.dtype)
    out = []
    for i in digits:
        Ci = B.copy()
        Ci[:, 0] += i
        out.append(Ci)
    return out


def _bfs(field, keep, digits, cap, start=None):
    """Layered BFS from 0 under T_i, keeping points for which keep(array) is true.

    Returns the points in BFS-layer then lexicographic order and the
    (parent index, digit) of each point's first discovery.
    """
    start = field.zero() if start is None else start
    points = [start]
    index = {start: 0}
    parent = [(-1, 0)]
    layer = [0]
    while layer:
        Z = _as_array([points[k] for k in layer])
        found = {}
        for i, Ci in zip(digits, _children(field, Z, digits)):
            ok = keep(Ci)
            for r in np.nonzero(ok)[0]:
                t = tuple(int(v) for v in Ci[r])
                if t not in index and t not in found:
                    found[t] = (layer[r], i)
        if len(points) + len(found) > cap:
            raise PatchTooLarge(f"more than {cap} points")
        new = sorted(found)
        layer = []
        for t in new:
            index[t] = len(points)
            layer.append(len(points))
            points.append(t)
            parent.append(found[t])
    return points, index, parent


def _edges(field, points, index, digits) -> np.ndarray:
    E = np.full((len(points), len(digits)), -1, dtype=np.int64)
    if not points:
        return E
    Z = _as_array(points)
    for c, Ci in enumerate(_children(field, Z, digits)):
        for r in range(len(points)):
            E[r, c] = index.get(tuple(int(v) for v in Ci[r]), -1)
    return E


def _box_keep(field, R, closed):
    def keep(Z):
        st = field.box_status(Z, R)
        amb = np.nonzero(st == AMBIGUOUS)[0]
        if len(amb):
            p = tuple(int(v) for v in Z[amb[0]])
            raise BoundaryAmbiguous(f"point {p} is within the tolerance band of B({R})", p)
        return (st == INSIDE) | ((st == BOUNDARY) if closed else False)

    return keep


@dataclass(frozen=True, eq=False)
class SpectrumPatch:
    """Spectrum points inside B(R) with their T-edges (digits -1, 0, 1)."""

    field: NumberField
    R: float
    closed: bool
    points: List[LatticePoint]
    index: Dict[LatticePoint, int]
    edges: np.ndarray  # (n, 3): index of T_i(point) or -1, columns for digits -1, 0, 1
    parent: List[Tuple[int, int]]

    def __len__(self):
        return len(self.points)

    def values(self) -> np.ndarray:
        return self.field.embed_all(self.points)[:, 0].real

    def coding(self, k: int) -> List[int]:
        """A digit word c_1..c_n with point k = T_{c_n} o ... o T_{c_1}(0)."""
        word = []
        while k > 0:
            k, d = self.parent[k]
            word.append(d)
        return word[::-1]

    def check_closure(self) -> bool:
        f = self.field
        keep = _box_keep(f, self.R, self.closed)
        Z = _as_array(self.points)
        for c, Ci in enumerate(_children(f, Z, DIGITS)):
            ok = keep(Ci)
            if np.any(ok & (self.edges[:, c] < 0)):
                return False
        return True


def enumerate_patch(field: NumberField, R: float, closed: bool = False, cap: int = DEFAULT_CAP) -> SpectrumPatch:
    """All spectrum points in B(R) (closed box if requested), by BFS from 0."""
    require_hyperbolic(field)
    if R < 1:
        raise ValueError("R must be at least 1")
    points, index, parent = _bfs(field, _box_keep(field, R, closed), DIGITS, cap)
    edges = _edges(field, points, index, DIGITS)
    return SpectrumPatch(field, float(R), closed, points, index, edges, parent)


def interval_radius(field: NumberField) -> float:
    return 1.0 / (field.beta - 1.0)


def compute_V_interval(field: NumberField, margin: float = TABLE1_MARGIN, cap: int = DEFAULT_CAP) -> List[LatticePoint]:
    """X(beta) intersected with the closed interval |x| <= 1/(beta-1) + margin.

    Ordered with 0 first, then by increasing real value.  margin=0 gives the
    exact closed interval, with endpoint hits decided by lattice arithmetic.
    """
    require_pisot(field)
    r = interval_radius(field)
    h = r + margin
    col = field.powers[:, 0].real

    def keep(Z):
        x = np.abs(Z.astype(float) @ col)
        ok = x <= h
        if margin == 0:
            near = np.nonzero(np.abs(x - r) <= 1e-9 * max(1.0, r))[0]
            for k in near:
                ok[k] = field._on_real_boundary(tuple(int(v) for v in Z[k]), 0, 1)
        return ok

    points, _, _ = _bfs(field, keep, DIGITS, cap)
    vals = field.embed_all(points)[:, 0].real
    order = [0] + sorted(range(1, len(points)), key=lambda k: vals[k])
    return [points[k] for k in order]


@dataclass(frozen=True, eq=False)
class DeltaSet:
    field: NumberField
    elements: List[LatticePoint]
    index: Dict[LatticePoint, int]

    def __len__(self):
        return len(self.elements)


def compute_delta(field: NumberField, cap: int = DEFAULT_CAP) -> DeltaSet:
    """Points of the closed box B(2) reachable from 0 and co-reachable to 0 under T_j, |j| <= 2."""
    require_hyperbolic(field)
    digits = (-2, -1, 0, 1, 2)
    points, index, _ = _bfs(field, _box_keep(field, 2.0, True), digits, cap)
    E = _edges(field, points, index, digits)
    back = [[] for _ in points]
    for a in range(len(points)):
        for b in E[a]:
            if b >= 0:
                back[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        b = stack.pop()
        for a in back[b]:
            if a not in seen:
                seen.add(a)
                stack.append(a)
    rest = sorted(points[k] for k in seen if k != 0)
    elements = [field.zero()] + rest
    return DeltaSet(field, elements, {p: k for k, p in enumerate(elements)})


# --- contracting window -------------------------------------------------


@dataclass(frozen=True, eq=False)
class Window:
    """Real coordinates of contracting space and the hull polydisc of the attractor."""

    field: NumberField
    reps: Tuple[int, ...]  # contracting root indices, one per real coordinate or conjugate pair
    is_complex: Tuple[bool, ...]
    rho: np.ndarray  # complex, one per rep
    hull: np.ndarray  # hull radius 1/(1-|rho|) per rep

    @property
    def dim(self) -> int:
        return sum(2 if c else 1 for c in self.is_complex)

    def coords(self, z) -> np.ndarray:
        """Contracting coordinates (complex), one column per rep."""
        return np.atleast_2d(self.field.embed_all(z))[:, list(self.reps)]

    def hull_margin(self, y: np.ndarray) -> np.ndarray:
        """Normalized distance inside the hull, min_j (r_j - |y_j|)/r_j (negative outside)."""
        return np.min((self.hull - np.abs(y)) / self.hull, axis=-1)


def window(field: NumberField) -> Window:
    require_hyperbolic(field)
    reps = []
    for j in range(field.n_expanding, field.degree):
        r = field.roots[j]
        if r.imag >= 0:
            reps.append(j)
    rho = field.roots[reps]
    return Window(field, tuple(reps), tuple(bool(r.imag != 0) for r in rho), rho, 1.0 / (1.0 - np.abs(rho)))


@dataclass(frozen=True, eq=False)
class WindowApprox:
    """Depth-n cylinders of the attractor with certified outer polydiscs."""

    field: NumberField
    depth: int
    words: List[Tuple[int, ...]]
    centers: np.ndarray  # complex, (n_cyl, n_reps)
    radius: np.ndarray  # per rep, common to all cylinders
    diameter_bound: float

    def __len__(self):
        return len(self.words)

    def covers(self, y: np.ndarray) -> np.ndarray:
        """Whether each row of contracting coordinates lies in some outer polydisc."""
        y = np.atleast_2d(y)
        out = np.zeros(len(y), dtype=bool)
        for k in range(len(y)):
            inside = np.all(np.abs(self.centers - y[k]) <= self.radius * (1 + 1e-12), axis=1)
            out[k] = inside.any()
        return out


def _level_points(field, depth, cap):
    """Distinct lattice points sum a_k beta^(k-1), |a| = depth, with one word each."""
    pts = {field.zero(): ()}
    for _ in range(depth):
        nxt = {}
        for y, w in pts.items():
            for i in DIGITS:
                t = field.T(i, y)
                if t not in nxt:
                    nxt[t] = (i,) + w
        if len(nxt) > cap:
            raise DepthTooLarge(f"more than {cap} distinct cylinders")
        pts = nxt
    return pts


def approximate_attractor(field: NumberField, depth: int, cap: int = 2 * 10**6) -> WindowApprox:
    """Cylinders S_{a_1} o ... o S_{a_depth}(hull) of the contracting IFS.

    Words sharing a lattice point give identical cylinders and are merged.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    W = window(field)
    pts = _level_points(field, depth, cap)
    keys = sorted(pts)
    centers = W.coords(keys)
    radius = W.hull * np.abs(W.rho) ** depth
    return WindowApprox(field, depth, [pts[k] for k in keys], centers, radius, float(2 * W.hull.sum()))


# --- inner certificate ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class InnerCertificate:
    """A polydisc K = prod D(0, a_j) with K contained in the union of its depth-m images.

    Such a K lies inside the attractor, so any point landing in K is in it.
    """

    radii: np.ndarray
    theta: float
    level: int
    cells: int


def _square_in_disc(lo, hi, c, r):
    # axis-aligned square [lo, hi]^2 (in the complex plane) inside closed disc D(c, r)
    dx = np.maximum(np.abs(lo[0] - c.real), np.abs(hi[0] - c.real))
    dy = np.maximum(np.abs(lo[1] - c.imag), np.abs(hi[1] - c.imag))
    return dx * dx + dy * dy <= r * r


def _cover_check(W: Window, a: np.ndarray, m: int, field, max_cells: int) -> Tuple[bool, int]:
    pts = _level_points(field, m, 10**6)
    centers = W.coords(sorted(pts))
    img = a * np.abs(W.rho) ** m
    # real-coordinate layout
    cols = []
    for j, cx in enumerate(W.is_complex):
        cols += [(j, 0), (j, 1)] if cx else [(j, 0)]
    D = len(cols)
    creal = np.empty((len(centers), D))
    for k, (j, part) in enumerate(cols):
        creal[:, k] = centers[:, j].imag if part else centers[:, j].real
    tree = cKDTree(creal)
    reach = float(np.sqrt(np.sum(img[[j for j, _ in cols]] ** 2)))
    lo0 = np.array([-a[j] for j, _ in cols])
    stack = [(lo0, -lo0)]
    cells = 0
    min_w = 1e-4 * float(a.min())
    while stack:
        lo, hi = stack.pop()
        cells += 1
        if cells > max_cells:
            return False, cells
        mid = 0.5 * (lo + hi)
        # drop cells that miss K
        miss = False
        for j, cx in enumerate(W.is_complex):
            ks = [k for k, (jj, _) in enumerate(cols) if jj == j]
            near = np.clip(0.0, lo[ks], hi[ks])
            if np.sqrt(np.sum(near**2)) > a[j]:
                miss = True
        if miss:
            continue
        half = float(np.sqrt(np.sum((hi - mid) ** 2)))
        ok = False
        for c in tree.query_ball_point(mid, reach + half):
            good = True
            for j, cx in enumerate(W.is_complex):
                ks = [k for k, (jj, _) in enumerate(cols) if jj == j]
                if cx:
                    if not _square_in_disc(lo[ks], hi[ks], centers[c, j], img[j] * (1 - 1e-12)):
                        good = False
                        break
                else:
                    k = ks[0]
                    if lo[k] < creal[c, k] - img[j] * (1 - 1e-12) or hi[k] > creal[c, k] + img[j] * (1 - 1e-12):
                        good = False
                        break
            if good:
                ok = True
                break
        if ok:
            continue
        if np.max(hi - lo) < min_w:
            return False, cells
        for corner in itertools.product((0, 1), repeat=D):
            c = np.array(corner)
            stack.append((np.where(c, mid, lo), np.where(c, hi, mid)))
    return True, cells


def support_radius(W: Window, terms: int = 400, directions: int = 720) -> np.ndarray:
    """Per coordinate, an upper bound on the radius of any disc about 0 inside the attractor.

    The attractor's support function in direction u is sum_k |Re(conj(u) rho^k)|;
    a disc of radius a fits only if a is below its minimum.
    """
    out = []
    for rho, cx in zip(W.rho, W.is_complex):
        pw = rho ** np.arange(terms)
        if not cx:
            out.append(float(np.sum(np.abs(pw.real))))
            continue
        u = np.exp(1j * np.linspace(0, np.pi, directions, endpoint=False))
        h = np.abs((np.conj(u)[:, None] * pw[None, :]).real).sum(axis=1)
        out.append(float(h.min()))
    return np.array(out)


def certify_inner_region(field: NumberField, fractions=(0.95, 0.85, 0.75, 0.6, 0.45, 0.3),
                         max_level: int = 10, max_cells: int = 100_000) -> Optional[InnerCertificate]:
    """Search for a polydisc about 0 that is covered by its own depth-m images.

    Radii are fractions of the support-function bound, largest first.
    """
    W = window(field)
    cap = support_radius(W)
    for frac in fractions:
        a = frac * np.minimum(cap, W.hull)
        for m in range(1, max_level + 1):
            if 3**m > 10**6:
                break
            ok, cells = _cover_check(W, a, m, field, max_cells)
            if ok:
                return InnerCertificate(a, float(a[0] / W.hull[0]), m, cells)
    return None


# --- Condition 1 ----------------------------------------------------------

HOLDS, FAILS, UNDETERMINED = "Holds", "Fails", "Undetermined"
IN, OUT, UNKNOWN = "in", "out", "unknown"


@dataclass
class Condition1Verdict:
    status: str
    witness: Optional[LatticePoint] = None
    ambiguous: List[LatticePoint] = dc_field(default_factory=list)
    lhs_size: int = 0
    rhs_size: int = 0
    candidates: int = 0
    certificate: Optional[InnerCertificate] = None
    failures: List[LatticePoint] = dc_field(default_factory=list)

    def to_dict(self):
        return {
            "verdict": self.status,
            "witness": list(self.witness) if self.witness is not None else None,
            "failures": [list(p) for p in self.failures],
            "ambiguous": [list(p) for p in self.ambiguous],
            "lhs_size": self.lhs_size,
            "rhs_size": self.rhs_size,
            "candidates": self.candidates,
            "inner_theta": None if self.certificate is None else self.certificate.theta,
            "inner_level": None if self.certificate is None else self.certificate.level,
        }


def _in_inner(W: Window, cert: InnerCertificate, y: np.ndarray) -> bool:
    return bool(np.all(np.abs(y) < cert.radii * (1 - 1e-9)))


def _disc_in_attractor(c: complex, r: float, rho: complex, hull: float, inner: float, budget: int = 400) -> bool:
    """Certify the closed disc D(c, r) lies in the attractor (single contracting coordinate).

    D is inside R once some inverse-branch image lands in the inner disc;
    images that poke out of the hull are dropped.
    """
    stack = [(c, r)]
    ar = abs(rho)
    nodes = 0
    while stack:
        c, r = stack.pop()
        if abs(c) + r < inner:
            return True
        nodes += 1
        if nodes > budget:
            return False
        kids = []
        for i in DIGITS:
            c2, r2 = (c - i) / rho, r / ar
            m = hull - abs(c2) - r2
            if m > 0:
                kids.append((m, c2, r2))
        kids.sort(key=lambda u: u[0])
        stack.extend((c2, r2) for _, c2, r2 in kids)
    return False


def _point_outside(q: complex, rho: complex, hull: float, depth: int = 60, budget: int = 20000) -> bool:
    """Certify q is not in the attractor: every inverse branch leaves the hull."""
    stack = [(q, 0)]
    nodes = 0
    tol = 1e-9 * hull
    while stack:
        y, k = stack.pop()
        if k == depth:
            return False
        for i in DIGITS:
            t = (y - i) / rho
            if abs(t) <= hull + tol:
                stack.append((t, k + 1))
                nodes += 1
        if nodes > budget:
            return False
    return True


def _germ_status(W: Window, cert: InnerCertificate, levels, gap: float, samples: int = 4000,
                 max_cells: int = 200_000) -> str:
    """Decide interiority of a point whose inverse-branch level sets cycle without reaching K.

    Offsets d around the point transform as d -> d/rho along the finite
    graph, so 0 < |d| <= s0|rho|^k reduces to the annulus
    s0|rho| <= |d| <= s0 seen from every node of level set k.  ``levels`` lists the distinct
    level sets; the last ``period`` of them recur forever.
    """
    rho = complex(W.rho[0])
    hull = float(W.hull[0])
    inner = float(cert.radii[0]) * (1 - 1e-9)
    ar = abs(rho)
    s0 = 0.9 * gap
    real = not W.is_complex[0]
    sets, period = levels
    # not interior: one offset outside R from every node of a recurring level set
    rng = np.random.default_rng(0)
    for S in sets[len(sets) - period:]:
        ys = [complex(v) for v in S]
        for _ in range(samples):
            rad = s0 * (ar + (1 - ar) * rng.random())
            d = rad * (rng.choice([-1.0, 1.0]) if real else np.exp(2j * np.pi * rng.random()))
            if all(_point_outside(y + d, rho, hull) for y in ys):
                return OUT
    # interior: offsets below s0|rho|^k0 only meet the recurring level sets
    for S in sets[len(sets) - period:]:
        ys = [complex(v) for v in S]
        if not _cover_annulus(ys, s0, ar, real, rho, hull, inner, max_cells):
            return UNKNOWN
    return IN


def _cover_annulus(ys, s0, ar, real, rho, hull, inner, max_cells) -> bool:
    lo_r = s0 * ar
    if real:
        cells = [(-s0, -lo_r), (lo_r, s0)]
    else:
        cells = [(complex(-s0, -s0), 2 * s0)]  # (lower-left corner, side)
    count = 0
    last = 0
    while cells:
        cell = cells.pop()
        count += 1
        if count > max_cells:
            return False
        if real:
            a, b = cell
            c, r = complex(0.5 * (a + b)), 0.5 * (b - a)
        else:
            ll, w = cell
            c, r = ll + complex(w, w) / 2, w / np.sqrt(2)
            far = max(abs(ll), abs(ll + w), abs(ll + 1j * w), abs(ll + complex(w, w)))
            near = abs(complex(min(max(0.0, ll.real), ll.real + w), min(max(0.0, ll.imag), ll.imag + w)))
            if near > s0 or far < lo_r:
                continue
        order = [last] + [k for k in range(len(ys)) if k != last]
        done = False
        for k in order:
            if _disc_in_attractor(ys[k] + c, r, rho, hull, inner):
                last = k
                done = True
                break
        if done:
            continue
        if r < 1e-7 * s0:
            return False
        if real:
            a, b = cell
            m = 0.5 * (a + b)
            cells += [(a, m), (m, b)]
        else:
            ll, w = cell
            h = w / 2
            cells += [(ll, h), (ll + h, h), (ll + 1j * h, h), (ll + complex(h, h), h)]
    return True


def interior_status(field: NumberField, x: LatticePoint, depth: int, cert: Optional[InnerCertificate],
                    W: Optional[Window] = None, node_cap: int = 10**6) -> str:
    """Three-valued test of pi_c(x) in the interior of the attractor.

    Follows the level sets of inverse branches T_i^{-1} on exact lattice
    points, pruning points whose contracting coordinates leave the hull.
    Reaching the inner certificate proves interiority; an empty level set
    proves non-membership.  Level sets that cycle without reaching K are
    decided by the offset analysis in ``_germ_status`` (single contracting
    coordinate only).
    """
    W = window(field) if W is None else W
    y0 = W.coords(x)[0]
    if cert is not None and _in_inner(W, cert, y0):
        return IN
    if _contracting_on_boundary(field, x):
        return OUT  # on the hull boundary, hence not interior
    level = frozenset([x])
    history = [level]
    for _ in range(depth):
        nxt = set()
        for z in level:
            for t, y, ex in _live_children(field, W, z):
                if ex <= 0 and cert is not None and _in_inner(W, cert, y):
                    return IN
                if ex <= 0:
                    nxt.add(t)
        if not nxt:
            return OUT
        level = frozenset(nxt)
        if level in history:
            break
        history.append(level)
    # the inverse-branch graph from x is finite: explore it exactly
    edges = {}
    stack = [x]
    gap = np.inf
    while stack:
        z = stack.pop()
        if z in edges:
            continue
        kids = []
        for t, y, ex in _live_children(field, W, z):
            if ex > 0:
                gap = min(gap, ex)
                continue
            if cert is not None and _in_inner(W, cert, y):
                return IN
            kids.append(t)
            if t not in edges:
                stack.append(t)
        edges[z] = kids
        if len(edges) > node_cap:
            return UNKNOWN
    level = frozenset([x])
    history = [level]
    while True:
        level = frozenset(t for z in level for t in edges[z])
        if not level:
            return OUT
        if level in history:
            break
        history.append(level)
        if len(history) > 10**4:
            return UNKNOWN
    if cert is None or len(W.reps) != 1:
        return UNKNOWN
    k0 = history.index(level)
    coords = [W.coords(sorted(S))[:, 0] for S in history]
    return _germ_status(W, cert, (coords, len(history) - k0), gap)


def _live_children(field, W, z):
    """(T_i^{-1} z, its contracting coordinates, excess over the hull) for each digit."""
    tol = 1e-9 * float(W.hull.max())
    out = []
    for i in DIGITS:
        t = field.T_inv(i, z)
        y = W.coords(t)[0]
        ex = float(np.max(np.abs(y) - W.hull))
        out.append((t, y, ex if ex > tol else 0.0))
    return out


def _contracting_on_boundary(field, x) -> bool:
    for j in range(field.n_expanding, field.degree):
        if field.roots[j].imag == 0 and field._on_real_boundary(x, j, 1):
            return True
    return False


def _candidate_scan(field: NumberField, R: float = 1.0) -> List[LatticePoint]:
    """All lattice points of the closed box B(R), via the inverse real embedding."""
    d = field.degree
    rows, bounds = [], []
    b = field.bounds(R)
    P = field.powers
    for j in range(d):
        r = field.roots[j]
        if r.imag == 0:
            rows.append(P[:, j].real)
            bounds.append(b[j])
        elif r.imag > 0:
            rows.append(P[:, j].real)
            rows.append(P[:, j].imag)
            bounds += [b[j], b[j]]
    E = np.array(rows)
    Einv = np.linalg.inv(E)
    zb = np.floor(np.abs(Einv) @ np.array(bounds)).astype(int) + 1
    ranges = [np.arange(-k, k + 1) for k in zb]
    n_total = int(np.prod([len(r) for r in ranges]))
    if n_total > 5 * 10**7:
        raise PatchTooLarge(f"candidate scan of {n_total} lattice points")
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
    C = np.abs(grid.astype(float) @ P)
    pre = np.all(C <= b * (1 + 1e-8) + 1e-8, axis=1)
    grid = grid[pre]
    st = field.box_status(grid, R)
    amb = np.nonzero(st == AMBIGUOUS)[0]
    if len(amb):
        p = tuple(int(v) for v in grid[amb[0]])
        raise BoundaryAmbiguous(f"candidate {p} is within the tolerance band of B({R})", p)
    keep = st != OUTSIDE
    return sorted(tuple(int(v) for v in row) for row in grid[keep])


def check_condition1(field: NumberField, depth: int = 20, lhs: Optional[Sequence[LatticePoint]] = None,
                     cert: Optional[InnerCertificate] = None, max_depth: int = 64) -> Condition1Verdict:
    """Compare X(beta) in the closed box B(1) with the lattice points there whose
    contracting image lies in the interior of the window.

    ``lhs`` overrides the spectrum side (used for perturbation tests).
    """
    require_hyperbolic(field)
    if depth > max_depth:
        raise DepthTooLarge(f"depth {depth} > {max_depth}")
    if lhs is None:
        lhs = enumerate_patch(field, 1.0, closed=True).points
    lhs_set = set(lhs)
    if cert is None:
        cert = certify_inner_region(field)
    W = window(field)
    cands = _candidate_scan(field, 1.0)
    ambiguous, failures = [], []
    rhs = 0
    for p in cands:
        if p in lhs_set and cert is not None:
            # pi_c of a spectrum point is an S-image of 0, interior once K is certified
            rhs += 1
            continue
        st = interior_status(field, p, depth, cert, W)
        if st == IN:
            rhs += 1
            if p not in lhs_set:
                failures.append(p)
        elif st == OUT:
            if p in lhs_set:
                failures.append(p)
        else:
            ambiguous.append(p)
    failures += sorted(lhs_set.difference(cands))
    if failures:
        status = FAILS
    else:
        status = UNDETERMINED if ambiguous else HOLDS
    return Condition1Verdict(status, failures[0] if failures else None, ambiguous, len(lhs_set), rhs,
                             len(cands), cert, failures)


def cylinder_of(field: NumberField, x: LatticePoint, n: int, cert: Optional[InnerCertificate] = None,
                extra_depth: int = 40) -> Optional[Tuple[int, ...]]:
    """A word e_1..e_n with pi_c(x) in the cylinder [e_1..e_n], or None if ambiguous.

    Branches are explored deepest-inside first; membership is certified by
    continuing past depth n until the inner certificate is reached.
    """
    cert = certify_inner_region(field) if cert is None else cert
    if cert is None:
        return None
    W = window(field)

    def certify(z, budget):
        # is pi_c(z) certainly in the attractor?
        stack = [(z, 0)]
        nodes = 0
        while stack:
            u, k = stack.pop()
            if _in_inner(W, cert, W.coords(u)[0]):
                return True
            if k == budget or nodes > 10**5:
                continue
            kids = []
            for i in DIGITS:
                t = field.T_inv(i, u)
                m = W.hull_margin(W.coords(t)[0])
                if m > 1e-9:
                    kids.append((m, t))
            nodes += len(kids)
            kids.sort(key=lambda q: q[0])
            stack.extend((t, k + 1) for _, t in kids)
        return False

    def search(z, k, word):
        if k == n:
            return word if certify(z, extra_depth) else None
        kids = []
        for i in DIGITS:
            t = field.T_inv(i, z)
            m = W.hull_margin(W.coords(t)[0])
            if m > 1e-9:
                kids.append((m, i, t))
        kids.sort(key=lambda q: -q[0])
        for _, i, t in kids:
            got = search(t, k + 1, word + (i,))
            if got is not None:
                return got
        return None

    return search(tuple(int(v) for v in x), 0, ())
