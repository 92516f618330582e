"""Exact arithmetic in Z[beta] and the embeddings into expanding/contracting space.

A lattice point is a tuple of Python ints ``z`` standing for
``z[0] + z[1]*beta + ... + z[d-1]*beta**(d-1)``.  Tuples are hashable, exact
and unbounded, so set membership and equality on the lattice never touch
floating point.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field as dc_field
from typing import Sequence, Tuple

import numpy as np

from .errors import (
    BadConstantTerm,
    BoundaryAmbiguous,
    ConvergenceFailure,
    NoRootInRange,
    NonHyperbolic,
    NotMonic,
    NotPisot,
    ParseError,
    Reducible,
)

LatticePoint = Tuple[int, ...]

UNIT_CIRCLE_TOL = 1e-9
BOX_BAND = 1e-9

PISOT = "Pisot"
HYPERBOLIC = "HyperbolicNonPisot"
NONHYPERBOLIC = "NonHyperbolic"

# box status codes
INSIDE, BOUNDARY, OUTSIDE, AMBIGUOUS = 0, 1, 2, 3


@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic integer polynomial with constant term +-1, leading coefficient first."""

    coeffs: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self):
        return format_polynomial(self.coeffs)


def format_polynomial(coeffs: Sequence[int]) -> str:
    d = len(coeffs) - 1
    out = []
    for k, c in enumerate(coeffs):
        p = d - k
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if p == 0:
            body = str(a)
        else:
            mono = "x" if p == 1 else f"x^{p}"
            body = mono if a == 1 else f"{a}{mono}"
        out.append((sign, body))
    if not out:
        return "0"
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += sign + body
    return s


_TERM = re.compile(r"([+-]?)(\d*)\*?(x(?:\^(\d+))?)?")


def _parse_monomials(text: str) -> list:
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ParseError("empty polynomial")
    terms = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"cannot parse polynomial near {s[pos:]!r}")
        sign, num, var, exp = m.groups()
        if not num and not var:
            raise ParseError(f"dangling sign in {text!r}")
        if pos > 0 and not sign:
            raise ParseError(f"missing operator in {text!r}")
        c = int(num) if num else 1
        if sign == "-":
            c = -c
        p = (int(exp) if exp else 1) if var else 0
        terms[p] = terms.get(p, 0) + c
        pos = m.end()
    deg = max(terms)
    return [terms.get(p, 0) for p in range(deg, -1, -1)]


def _check_irreducible(coeffs: Sequence[int]) -> None:
    # trial factorization: a factor of degree k corresponds to k roots whose
    # elementary symmetric functions are all integers
    deg = len(coeffs) - 1
    roots = np.roots(np.asarray(coeffs, dtype=float))
    for k in range(1, deg // 2 + 1):
        for sub in itertools.combinations(range(deg), k):
            q = np.poly(roots[list(sub)])
            if np.all(np.abs(q.imag) < 1e-6) and np.all(np.abs(q.real - np.round(q.real)) < 1e-6):
                raise Reducible(f"{format_polynomial(coeffs)} has a factor of degree {k}")


def parse_polynomial(text) -> MinimalPolynomial:
    """Parse ``"x^3-x^2-x-1"``, ``"1,-1,-1,-1"``, ``"[1,-1,-1,-1]"`` or an int list."""
    if isinstance(text, MinimalPolynomial):
        return text
    if isinstance(text, str):
        s = text.strip()
        if "x" in s:
            coeffs = _parse_monomials(s)
        else:
            try:
                raw = json.loads(s if s.startswith("[") else f"[{s}]")
            except json.JSONDecodeError as e:
                raise ParseError(f"cannot parse coefficient list {text!r}") from e
            coeffs = raw
    else:
        coeffs = list(text)
    try:
        if any(isinstance(c, bool) or int(c) != c for c in coeffs):
            raise ParseError(f"non-integer coefficient in {text!r}")
    except (TypeError, ValueError) as e:
        raise ParseError(f"non-integer coefficient in {text!r}") from e
    coeffs = [int(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 3:
        raise ParseError("degree must be at least 2")
    if coeffs[0] != 1:
        raise NotMonic(f"leading coefficient {coeffs[0]} != 1")
    if abs(coeffs[-1]) != 1:
        raise BadConstantTerm(f"constant term {coeffs[-1]} is not +-1")
    _check_irreducible(coeffs)
    return MinimalPolynomial(tuple(coeffs))


def _polish(coeffs, r, real=False):
    c = np.asarray(coeffs, dtype=float if real else complex)
    dc = np.polyder(c)
    x = r.real if real else complex(r)
    for _ in range(60):
        fx = np.polyval(c, x)
        dfx = np.polyval(dc, x)
        if dfx == 0:
            break
        step = fx / dfx
        x = x - step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return complex(x)


@dataclass(frozen=True, eq=False)
class NumberField:
    """Roots of the minimal polynomial, ordered beta first, then expanding, then contracting."""

    minpoly: MinimalPolynomial
    roots: np.ndarray
    n_expanding: int
    classification: str
    _a: Tuple[int, ...] = dc_field(repr=False, default=())

    def __post_init__(self):
        c = self.minpoly.coeffs
        d = len(c) - 1
        # a[k] is the coefficient of x^k, k < d
        object.__setattr__(self, "_a", tuple(c[d - k] for k in range(d)))
        P = np.vander(self.roots, d, increasing=True).T  # P[k, j] = root_j^k
        object.__setattr__(self, "_powers", P)

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def beta(self) -> float:
        return float(self.roots[0].real)

    @property
    def n_contracting(self) -> int:
        return self.degree - self.n_expanding

    @property
    def expanding_roots(self) -> np.ndarray:
        return self.roots[: self.n_expanding]

    @property
    def contracting_roots(self) -> np.ndarray:
        return self.roots[self.n_expanding:]

    @property
    def is_pisot(self) -> bool:
        return self.classification == PISOT

    @property
    def powers(self) -> np.ndarray:
        return self._powers

    @property
    def companion(self) -> np.ndarray:
        """Integer matrix C with C @ z the coordinates of beta * z."""
        d = self.degree
        C = np.zeros((d, d), dtype=np.int64)
        for k in range(1, d):
            C[k, k - 1] = 1
        for k in range(d):
            C[k, d - 1] -= self._a[k]
        return C

    def zero(self) -> LatticePoint:
        return (0,) * self.degree

    def integer(self, n: int) -> LatticePoint:
        return (int(n),) + (0,) * (self.degree - 1)

    def times_beta(self, z: LatticePoint) -> LatticePoint:
        a = self._a
        top = z[-1]
        return (-a[0] * top,) + tuple(z[k - 1] - a[k] * top for k in range(1, len(z)))

    def divide_beta(self, w: LatticePoint) -> LatticePoint:
        a = self._a
        top = -a[0] * w[0]  # a0 = +-1
        return tuple(w[k] + a[k] * top for k in range(1, len(w))) + (top,)

    def T(self, i: int, z: LatticePoint) -> LatticePoint:
        w = self.times_beta(z)
        return (w[0] + i,) + w[1:]

    def T_inv(self, i: int, z: LatticePoint) -> LatticePoint:
        return self.divide_beta((z[0] - i,) + tuple(z[1:]))

    def from_word(self, word: Sequence[int]) -> LatticePoint:
        """The point sum c_i beta^(n-i), i.e. T_{c_n} o ... o T_{c_1}(0)."""
        z = self.zero()
        for c in word:
            z = self.T(c, z)
        return z

    def add(self, x: LatticePoint, y: LatticePoint) -> LatticePoint:
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x: LatticePoint, y: LatticePoint) -> LatticePoint:
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x: LatticePoint) -> LatticePoint:
        return tuple(-a for a in x)

    def embed_all(self, z) -> np.ndarray:
        """All coordinates sum_k z_k root_j^k, shape (deg,) or (n, deg)."""
        Z = np.asarray(z, dtype=float)
        return Z @ self._powers

    def value(self, z: LatticePoint) -> float:
        return float(np.dot(np.asarray(z, dtype=float), self._powers[:, 0].real))

    def bounds(self, R: float) -> np.ndarray:
        return R / np.abs(np.abs(self.roots) - 1.0)

    def box_status(self, z, R: float) -> np.ndarray:
        """Vectorized status codes INSIDE/BOUNDARY/OUTSIDE/AMBIGUOUS for the box B(R).

        Coordinates within the tolerance band of the boundary are resolved
        exactly for real conjugates; complex ones stay AMBIGUOUS.
        """
        Z = np.atleast_2d(np.asarray(z, dtype=object if _big(z) else np.int64))
        C = np.abs(Z.astype(float) @ self._powers)
        b = self.bounds(R)
        band = BOX_BAND * np.maximum(1.0, b)
        lo = C < b - band
        hi = C > b + band
        status = np.full(len(Z), INSIDE, dtype=np.int8)
        status[hi.any(axis=1)] = OUTSIDE
        near = ~(lo | hi)
        todo = np.nonzero(near.any(axis=1) & (status != OUTSIDE))[0]
        for r in todo:
            zt = tuple(int(v) for v in Z[r])
            st = INSIDE
            for j in np.nonzero(near[r])[0]:
                if self._on_real_boundary(zt, j, R):
                    st = max(st, BOUNDARY)
                else:
                    st = AMBIGUOUS
            status[r] = st
        return status if np.ndim(z) > 1 else status[:1]

    def _on_real_boundary(self, z: LatticePoint, j: int, R: float) -> bool:
        root = self.roots[j]
        if root.imag != 0.0:
            return False
        if float(R) != int(R):
            return False
        s = 1 if root.real > 0 else -1
        bz = self.times_beta(z)
        w = tuple(s * p - q for p, q in zip(bz, z))
        Ri = int(R)
        return w[1:] == (0,) * (len(w) - 1) and abs(w[0]) == Ri and Ri != 0


def _big(z) -> bool:
    try:
        arr = np.asarray(z)
        if arr.dtype == object:
            return True
        return False
    except OverflowError:
        return True


def analyze_field(p, root_tol: float = 1e-12, allow_nonhyperbolic: bool = False) -> NumberField:
    """Find, polish, order and classify the roots of ``p``."""
    p = parse_polynomial(p)
    coeffs = p.coeffs
    d = p.degree
    raw = np.roots(np.asarray(coeffs, dtype=float))
    roots = []
    for r in raw:
        r = _polish(coeffs, r)
        if abs(r.imag) < 1e-9 * max(1.0, abs(r)):
            r = _polish(coeffs, complex(r.real), real=True)
        roots.append(r)
    roots = np.array(roots, dtype=complex)
    scale = np.polyval(np.abs(np.asarray(coeffs, float)), np.abs(roots))
    resid = np.abs(np.polyval(np.asarray(coeffs, complex), roots))
    if np.any(resid > root_tol * np.maximum(1.0, scale)):
        raise ConvergenceFailure(f"root residual {resid.max():.3g} above tolerance")
    real_in = [k for k, r in enumerate(roots) if r.imag == 0 and 1 < r.real < 2]
    if not real_in:
        raise NoRootInRange(f"{p} has no real root in (1, 2)")
    k1 = max(real_in, key=lambda k: roots[k].real)
    beta = roots[k1]
    rest = [r for k, r in enumerate(roots) if k != k1]
    mods = np.abs(np.asarray(rest))
    if np.any(np.abs(mods - 1.0) < UNIT_CIRCLE_TOL) or abs(abs(beta) - 1) < UNIT_CIRCLE_TOL:
        if not allow_nonhyperbolic:
            raise NonHyperbolic(f"{p} has a conjugate on the unit circle")
        cls = NONHYPERBOLIC
    else:
        cls = None
    key = lambda r: (-round(abs(r), 12), -np.angle(r))
    expanding = sorted((r for r in rest if abs(r) > 1), key=key)
    contracting = sorted((r for r in rest if abs(r) <= 1), key=key)
    ordered = np.array([beta] + expanding + contracting, dtype=complex)
    n_exp = 1 + len(expanding)
    if cls is None:
        cls = PISOT if n_exp == 1 else HYPERBOLIC
    return NumberField(p, ordered, n_exp, cls)


def field_from(text, root_tol: float = 1e-12) -> NumberField:
    return analyze_field(parse_polynomial(text), root_tol)


def require_hyperbolic(field: NumberField) -> None:
    if field.classification == NONHYPERBOLIC:
        raise NonHyperbolic(f"{field.minpoly} is not hyperbolic")


def require_pisot(field: NumberField) -> None:
    if not field.is_pisot:
        raise NotPisot(f"{field.minpoly} is not a Pisot polynomial")


def apply_T(field: NumberField, i: int, x: LatticePoint) -> LatticePoint:
    return field.T(i, tuple(int(v) for v in x))


def apply_T_inverse(field: NumberField, i: int, x: LatticePoint) -> LatticePoint:
    return field.T_inv(i, tuple(int(v) for v in x))


def embed(field: NumberField, x: LatticePoint):
    """Return (expanding coordinates, contracting coordinates); entry 0 is the real value."""
    c = field.embed_all(x)
    return c[: field.n_expanding], c[field.n_expanding:]


def in_box(field: NumberField, x: LatticePoint, R: float, closed: bool = False) -> bool:
    st = int(field.box_status(x, R)[0])
    if st == AMBIGUOUS:
        raise BoundaryAmbiguous(f"point {tuple(x)} is within the tolerance band of B({R})", tuple(x))
    if st == BOUNDARY:
        return closed
    return st == INSIDE
