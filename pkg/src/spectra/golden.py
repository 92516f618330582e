"""The golden mean: gap function, odometer walk and log-cocycle.

Lattice points are (a0, a1) meaning a0 + a1*phi.  The contracting coordinate
of x is its Galois conjugate y, which lives in the open window (-phi^2, phi^2).
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebraic import LatticePoint, NumberField, field_from
from .errors import OutOfWindow, WindowEscape
from .spectrum import compute_delta, enumerate_patch
from .transition import (DigitMatrices, SpectralData, build_digit_matrices, coding_count,
                         delta_spectral_data, digit_matrices_from, patch_local_vectors)

PHI = (1 + math.sqrt(5)) / 2
PHI2 = PHI + 1
GAPS = (2 * PHI - 3, PHI - 1, 2 - PHI)
# the same gaps as lattice points, and the matching shifts of the conjugate
GAP_POINTS = ((-3, 2), (-1, 1), (2, -1))
SHIFTS = (-2 / PHI - 3, -1 / PHI - 1, 2 + 1 / PHI)
RESYNC = 1000
MEAN_GAP = 1 / (2 * PHI2) * GAPS[0] + 1 / (2 * PHI) * GAPS[1] + 0.5 * GAPS[2]


def golden_field() -> NumberField:
    return field_from("x^2-x-1")


def _sign(p: int, q: int) -> int:
    """Sign of p + q*phi, exactly."""
    s, t = 2 * p + q, q  # 2(p + q phi) = s + t sqrt5
    if s >= 0 and t >= 0:
        return int(s > 0 or t > 0)
    if s <= 0 and t <= 0:
        return -1
    d = s * s - 5 * t * t
    if d == 0:
        return 0
    return (1 if d > 0 else -1) * (1 if s > 0 else -1)


def conjugate(z: LatticePoint) -> float:
    return z[0] + z[1] * (1 - PHI)


def branch_of(z: LatticePoint) -> int:
    """0 for y in (phi, phi^2), 1 for y in [0, phi], 2 for y in (-phi^2, 0); exact."""
    # y = a0 + a1 (1 - phi) = (a0 + a1) - a1 phi
    p, q = z[0] + z[1], -z[1]
    if _sign(p, q) < 0:
        return 2
    if _sign(p, q - 1) > 0:
        return 0
    return 1


def gap(y: float) -> float:
    """Distance from a spectrum point with conjugate y to the next one."""
    if not -PHI2 < y < PHI2:
        raise OutOfWindow(f"y = {y} outside (-phi^2, phi^2)")
    if y > PHI:
        return GAPS[0]
    if y >= 0:
        return GAPS[1]
    return GAPS[2]


# --- the 17-point construction, kept for comparison -----------------------


def small_family_points(field: Optional[NumberField] = None) -> List[LatticePoint]:
    """The elements of Delta in (-2, 2), 0 first."""
    field = field or golden_field()
    D = compute_delta(field)
    return [v for v in D.elements if abs(field.value(v)) < 2]


def small_family_matrices(field: Optional[NumberField] = None) -> DigitMatrices:
    field = field or golden_field()
    return digit_matrices_from(field, small_family_points(field))


def small_family_mismatch(max_n: int = 8) -> Optional[Tuple[Tuple[int, ...], int, int]]:
    """First word where the 17-point family and the full difference set disagree on N_n."""
    field = golden_field()
    small = small_family_matrices(field)
    full = build_digit_matrices(compute_delta(field))
    for n in range(1, max_n + 1):
        for w in itertools.product((-1, 0, 1), repeat=n):
            a, b = coding_count(small, w)[0], coding_count(full, w)[0]
            if a != b:
                return w, a, b
    return None


# --- odometer -------------------------------------------------------------


@dataclass(frozen=True)
class OdometerState:
    n: int
    point: LatticePoint
    x: float
    y: float
    z: float

    @property
    def branch(self) -> int:
        return branch_of(self.point)


class LocalVectors:
    """Local vectors v(x) of all spectrum points of a patch, keyed by lattice point."""

    def __init__(self, R: float, field: Optional[NumberField] = None):
        self.field = field or golden_field()
        self.delta = compute_delta(self.field)
        self.mats = build_digit_matrices(self.delta)
        self.spec: SpectralData = delta_spectral_data(self.mats)
        self.patch = enumerate_patch(self.field, R)
        self.vectors = patch_local_vectors(self.patch, self.spec, self.mats)
        self.gap_index = [self.delta.index[g] for g in GAP_POINTS]

    @classmethod
    def for_steps(cls, n: int) -> "LocalVectors":
        # points up to roughly n * mean gap, padded; a box of radius R reaches R * phi
        reach = 1.1 * n * MEAN_GAP + 10
        return cls(max(2.0, reach / PHI + 2))

    def mu(self, z: LatticePoint) -> float:
        k = self.patch.index.get(tuple(z))
        return 0.0 if k is None else float(self.vectors[k, 0])

    def f(self, s: OdometerState) -> float:
        """ln(mu(x + gap) / mu(x)) from the local vector of x."""
        k = self.patch.index.get(s.point)
        if k is None:
            raise WindowEscape(f"point {s.point} outside the precomputed patch")
        v = self.vectors[k]
        return math.log(v[self.gap_index[s.branch]]) - math.log(v[0])


def initial_state() -> OdometerState:
    return OdometerState(0, (0, 0), 0.0, 0.0, 0.0)


def odometer_step(s: OdometerState, f: Callable[[OdometerState], float], resync: bool = False) -> OdometerState:
    b = s.branch
    g = GAP_POINTS[b]
    p = (s.point[0] + g[0], s.point[1] + g[1])
    y = conjugate(p) if resync else s.y + SHIFTS[b]
    if not -PHI2 < y < PHI2:
        raise WindowEscape(f"y = {y} left the window at step {s.n + 1}")
    return OdometerState(s.n + 1, p, s.x + GAPS[b], y, s.z + f(s))


def walk(n: int, lv: Optional[LocalVectors] = None) -> List[OdometerState]:
    """psi^k(0, 0, 0) for k = 0..n; y is recomputed from the lattice every RESYNC steps."""
    lv = lv or LocalVectors.for_steps(n)
    out = [initial_state()]
    s = out[0]
    for k in range(1, n + 1):
        s = odometer_step(s, lv.f, resync=(k % RESYNC == 0))
        out.append(s)
    return out


def positive_points_sorted(R: float, field: Optional[NumberField] = None) -> List[LatticePoint]:
    """Spectrum points in B(R) with positive value, in increasing order."""
    field = field or golden_field()
    P = enumerate_patch(field, R)
    vals = np.array([a + b * PHI for a, b in P.points])
    order = np.argsort(vals, kind="stable")
    return [P.points[k] for k in order if vals[k] > 0]


def write_walk_csv(states: Sequence[OdometerState], mu0: float, fh, header: Iterable[str] = ()) -> None:
    for line in header:
        fh.write(f"# {line}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "x", "y", "z", "mu"])
    for s in states:
        w.writerow([s.n, repr(s.x), repr(s.y), repr(s.z), repr(math.exp(s.z) * mu0)])
