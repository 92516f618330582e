"""The normalized limit measure on I_beta, g_beta, W1 distances and the Pisot table."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .algebraic import LatticePoint, NumberField, analyze_field, format_polynomial, require_pisot
from .errors import SpectraError
from .spectrum import TABLE1_MARGIN, compute_V_interval, interval_radius
from .transition import SpectralData, build_M0_pisot, spectral_data

SCALES = ("unit", "native")

TABLE1 = [
    # polynomial, beta, bound, W1 (on [-1, 1]), matrix size
    ("x^3-x^2-x-1", 1.8393, 0.96422, 0.13925, 7),
    ("x^3-x^2-1", 1.4656, 0.999116, 0.0547178, 51),
    ("x^3-x-1", 1.3247, 0.99999, 0.0286671, 181),
    ("x^4-x^3-x^2-x-1", 1.9276, 0.973329, 0.187067, 9),
    ("x^4-x^3-1", 1.3803, 0.999989, 0.0149032, 1257),
    ("x^5-x^4-x^3-x^2-x-1", 1.9659, 0.983565, 0.222569, 11),
    ("x^5-x^4-x^3-x^2-1", 1.8885, 0.982269, 0.0803806, 745),
    ("x^5-x^4-x^3-x^2+1", 1.7785, 0.995758, 0.0246573, 951),
    ("x^5-x^4-x^3-1", 1.7049, 0.993043, 0.0356598, 339),
    ("x^5-x^4-x^3-x-1", 1.8124, 0.982434, 0.0571201, 351),
    ("x^5-x^4-x^3+x^2-1", 1.4432, 0.999982, 0.00782515, 5423),
    ("x^5-x^4-x^2-1", 1.5702, 0.999862, 0.0195581, 847),
    ("x^5-x^3-x^2-x-1", 1.5342, 0.999833, 0.00890312, 2651),
]


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    positions: np.ndarray  # strictly increasing
    masses: np.ndarray
    lo: float
    hi: float
    points: Optional[List[LatticePoint]] = None

    def __post_init__(self):
        if len(self.positions) > 1 and np.any(np.diff(self.positions) <= 0):
            raise ValueError("atom positions must be strictly increasing")

    def __len__(self):
        return len(self.positions)

    def cdf(self, t) -> np.ndarray:
        c = np.concatenate([[0.0], np.cumsum(self.masses)])
        return c[np.searchsorted(self.positions, t, side="right")]

    def rescaled(self) -> "DiscreteMeasure":
        """Affine copy on [-1, 1]."""
        mid, half = 0.5 * (self.lo + self.hi), 0.5 * (self.hi - self.lo)
        return DiscreteMeasure((self.positions - mid) / half, self.masses, -1.0, 1.0, self.points)

    def reflected(self) -> "DiscreteMeasure":
        mid2 = self.lo + self.hi
        return DiscreteMeasure((mid2 - self.positions)[::-1], self.masses[::-1], self.lo, self.hi,
                               None if self.points is None else self.points[::-1])


def restricted_measure(field: NumberField, V: Sequence[LatticePoint], spec: SpectralData) -> DiscreteMeasure:
    """mu restricted to I_beta and normalized: Perron probability vector on the atoms of V."""
    require_pisot(field)
    x = field.embed_all(list(V))[:, 0].real
    order = np.argsort(x, kind="stable")
    p = spec.probability()
    r = interval_radius(field)
    return DiscreteMeasure(x[order], p[order], -r, r, [V[k] for k in order])


def g_beta(field: NumberField, x, margin: float = 0.0):
    """chi(beta x - 1) + 2 chi(beta x) + chi(beta x + 1) for the closed interval |t| <= 1/(beta-1) + margin."""
    h = interval_radius(field) + margin
    y = field.beta * np.asarray(x, dtype=float)
    out = (np.abs(y - 1) <= h).astype(int) + 2 * (np.abs(y) <= h) + (np.abs(y + 1) <= h)
    return out if out.ndim else int(out)


def g_beta_flags(field: NumberField, x, margin: float = 0.0, band: float = 1e-9) -> np.ndarray:
    """True where one of beta x + d sits within the band of an interval endpoint."""
    h = interval_radius(field) + margin
    y = field.beta * np.asarray(x, dtype=float)
    return np.any([np.abs(np.abs(y + d) - h) <= band * max(1.0, h) for d in (-1, 0, 1)], axis=0)


def integrate_g_beta(field: NumberField) -> float:
    """Normalized integral of g_beta over I_beta, piecewise exactly (equals 4/beta)."""
    r = interval_radius(field)
    b = field.beta
    total = 0.0
    for d, w in ((-1, 1), (0, 2), (1, 1)):
        # beta x + d in [-r, r]  <=>  x in [(-r - d)/beta, (r - d)/beta]
        lo, hi = max(-r, (-r - d) / b), min(r, (r - d) / b)
        total += w * max(0.0, hi - lo)
    return total / (2 * r)


def rowsum_identity(field: NumberField, V: Sequence[LatticePoint], spec: SpectralData,
                    margin: float = TABLE1_MARGIN) -> Tuple[float, float, float]:
    """(lambda, sum_j g_beta(v_j) mass_j, residual)."""
    x = field.embed_all(list(V))[:, 0].real
    rhs = float(np.dot(g_beta(field, x, margin), spec.probability()))
    return spec.lam, rhs, abs(spec.lam - rhs)


def wasserstein1(m: DiscreteMeasure, lo: Optional[float] = None, hi: Optional[float] = None, backend=None) -> float:
    """W1 between m and the uniform law on [lo, hi] (defaults to m's support)."""
    lo = m.lo if lo is None else lo
    hi = m.hi if hi is None else hi
    return _kernels.w1_uniform(m.positions, m.masses / m.masses.sum(), lo, hi, backend=backend)


def entropy_lower_bound(lam: float) -> float:
    return math.log(4.0) - math.log(lam)


def dimension_bound(beta: float, lam: float) -> float:
    return min(1.0, entropy_lower_bound(lam) / math.log(beta))


@dataclass
class DimensionReport:
    polynomial: str
    beta: float
    lam: float
    bound: float
    w1: float
    matrix_size: int
    entropy_lb: float
    scale: str = "unit"
    rowsum_residual: float = float("nan")
    error: Optional[str] = None
    exit_code: int = 0

    def to_dict(self):
        d = asdict(self)
        d.pop("exit_code")
        d["lambda"] = d.pop("lam")
        return d


def dimension_report(poly, margin: float = TABLE1_MARGIN, scale: str = "unit") -> DimensionReport:
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    field = analyze_field(poly)
    require_pisot(field)
    V = compute_V_interval(field, margin=margin)
    M = build_M0_pisot(V, field)
    spec = spectral_data(M)
    m = restricted_measure(field, V, spec)
    if scale == "unit":
        m = m.rescaled()
    _, _, res = rowsum_identity(field, V, spec, margin)
    return DimensionReport(format_polynomial(field.minpoly.coeffs), field.beta, spec.lam,
                           dimension_bound(field.beta, spec.lam), wasserstein1(m), len(V),
                           entropy_lower_bound(spec.lam), scale, res)


def _row(args):
    poly, margin, scale = args
    try:
        return dimension_report(poly, margin, scale)
    except SpectraError as e:
        return DimensionReport(str(poly), float("nan"), float("nan"), float("nan"), float("nan"), 0,
                               float("nan"), scale, error=f"{type(e).__name__}: {e}", exit_code=e.exit_code)


def table1_pipeline(polynomials: Optional[Sequence] = None, margin: float = TABLE1_MARGIN,
                    scale: str = "unit", threads: Optional[int] = None) -> List[DimensionReport]:
    """One DimensionReport per polynomial, in input order; failing rows carry an error."""
    if polynomials is None:
        polynomials = [row[0] for row in TABLE1]
    if threads is None:
        threads = int(os.environ.get("SPECTRA_THREADS", os.cpu_count() or 1))
    jobs = [(p, margin, scale) for p in polynomials]
    if threads <= 1 or len(jobs) <= 1:
        return [_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as ex:
        return list(ex.map(_row, jobs))
