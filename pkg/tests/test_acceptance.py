"""One test per acceptance criterion, at the stated tolerances.

Known red: condition1 for the tribonacci field, and two of the three
projective checks (single-digit non-expansion, the M_0^7 pattern).
"""
import itertools
import math

import numpy as np
import pytest

from spectra.algebraic import field_from
from spectra.golden import GAPS, LocalVectors, positive_points_sorted, walk
from spectra.measure_analysis import TABLE1, rowsum_identity, table1_pipeline
from spectra.projective import (contraction_constants, find_mixing_word, mixing_pattern,
                                single_digit_expansion, word_product)
from spectra.spectrum import HOLDS, check_condition1, compute_delta, compute_V_interval, enumerate_patch
from spectra.transition import (apply_L, brute_force_counts, build_digit_matrices, build_lambda_R,
                                build_M0_pisot, delta_spectral_data, exact_row_powers, measure_at,
                                patch_measure, spectral_data)

GOLDEN, TRIB = "x^2-x-1", "x^3-x^2-x-1"


@pytest.fixture(scope="module")
def table():
    return table1_pipeline(threads=1)


def test_01_table_reproduction(table):
    bad = []
    for (poly, beta, bound, w1, size), r in zip(TABLE1, table):
        assert r.error is None, r.error
        if r.matrix_size != size or abs(r.bound - bound) > 1e-3 or abs(r.w1 - w1) > 1e-3:
            bad.append((poly, r.matrix_size, r.bound, r.w1))
    assert not bad


def test_02_counting_oracle():
    for poly in (GOLDEN, TRIB):
        f = field_from(poly)
        P = enumerate_patch(f, 2)
        rows = exact_row_powers(build_lambda_R(P), 10)
        for n in range(11):
            bf = brute_force_counts(f, n)
            assert rows[n] == [bf.get(p, 0) for p in P.points], (poly, n)
    g = field_from(GOLDEN)
    assert exact_row_powers(build_lambda_R(enumerate_patch(g, 1)), 3)[3][0] == 10


def _stationarity(poly, R=6):
    f = field_from(poly)
    mats = build_digit_matrices(compute_delta(f))
    spec = delta_spectral_data(mats)
    P = enumerate_patch(f, R)
    mu = patch_measure(P, spec, mats)
    worst = 0.0
    for k, x in enumerate(P.points):
        pre = [f.T_inv(i, x) for i in (-1, 0, 1)]
        st = f.box_status(pre, R)
        if np.any(st != 0):
            continue  # a preimage leaves the box: not an interior point
        s = sum((2 if i == 0 else 1) * (mu[P.index[p]] if p in P.index else 0.0)
                for i, p in zip((-1, 0, 1), pre))
        worst = max(worst, abs(s - spec.lam * mu[k]) / (spec.lam * mu[k]))
    return worst


def test_03_spectral_identities(table):
    for r in table:
        assert r.rowsum_residual < 1e-9, r.polynomial
        assert 2 <= r.lam < 4, r.polynomial
    for poly, *_ in TABLE1:
        f = field_from(poly)
        s = spectral_data(build_M0_pisot(compute_V_interval(f), f))
        assert s.step < 1e-9 and s.residual < 1e-9, poly
    for poly in (GOLDEN, TRIB):
        assert _stationarity(poly) < 1e-9, poly


def test_04_maximality():
    for poly in (GOLDEN, TRIB):
        f = field_from(poly)
        nu = {f.zero(): 1}
        for n in range(1, 13):
            nu = apply_L(nu, f)
            assert max(nu.values()) <= nu[f.zero()], (poly, n)


def test_05_coding_invariance():
    f = field_from(GOLDEN)
    mats = build_digit_matrices(compute_delta(f))
    spec = delta_spectral_data(mats)
    groups = {}
    for w in itertools.product((-1, 0, 1), repeat=8):
        groups.setdefault(f.from_word(w), []).append(w)
    multi = [g for g in groups.values() if len(g) > 1]
    rng = np.random.default_rng(0)
    for k in rng.choice(len(multi), size=100, replace=False):
        g = multi[k]
        a, b = rng.choice(len(g), size=2, replace=False)
        u, v = g[a], (0,) * int(rng.integers(0, 4)) + g[b]  # leading zeros keep the point
        mu, mv = measure_at(spec, mats, u), measure_at(spec, mats, v)
        assert abs(mu - mv) <= 1e-10 * max(abs(mu), abs(mv)), (u, v)


def test_06_condition1():
    verdicts = {poly: check_condition1(field_from(poly), depth=20) for poly in (GOLDEN, TRIB)}
    summary = {p: (v.status, len(v.ambiguous), v.witness) for p, v in verdicts.items()}
    assert all(v.status == HOLDS and not v.ambiguous for v in verdicts.values()), summary


def test_07_projective_contraction():
    f = field_from(GOLDEN)
    mats = build_digit_matrices(compute_delta(f))
    reps = single_digit_expansion(mats, trials=10**4, seed=0)
    violations = {r.digit: r.violations for r in reps}
    mw = find_mixing_word(mats)
    c2 = contraction_constants(mw, trials=10**4, seed=0).C2
    m07 = mixing_pattern(word_product(mats, (0,) * 7)) is not None
    status = {"violations": violations, "C2": c2, "M0^7 pattern": m07}
    assert sum(violations.values()) == 0 and c2 < 1 and m07, status


def test_08_golden_walk():
    n = 10**4
    lv = LocalVectors.for_steps(n)
    states = walk(n, lv)
    pts = positive_points_sorted(n * 0.5 / 1.618 + 5)
    assert [s.point for s in states[1:]] == pts[:n]
    d = np.diff([s.x for s in states])
    assert all(min(abs(v - g) for g in GAPS) < 1e-9 for v in d)
    mats, spec, P = lv.mats, lv.spec, lv.patch
    for s in states[:1000]:
        want = measure_at(spec, mats, P.coding(P.index[s.point]))
        assert abs(math.exp(s.z) * spec.mu0 - want) <= 1e-9 * want


def test_09_mass_growth():
    f = field_from(GOLDEN)
    mats = build_digit_matrices(compute_delta(f))
    spec = delta_spectral_data(mats)
    mass = [patch_measure(enumerate_patch(f, R), spec, mats).sum() for R in (1, 2, 4, 8)]
    assert all(b > a for a, b in zip(mass, mass[1:]))
    assert mass[-1] > 10 * spec.mu0
