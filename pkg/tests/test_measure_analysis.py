import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from spectra.algebraic import field_from
from spectra.errors import NotPisot
from spectra.measure_analysis import (DiscreteMeasure, dimension_bound, dimension_report, g_beta,
                                      g_beta_flags, integrate_g_beta, restricted_measure,
                                      rowsum_identity, table1_pipeline, wasserstein1)
from spectra.spectrum import compute_V_interval, interval_radius
from spectra.transition import TransitionMatrix, build_M0_pisot, spectral_data


def _pipeline(f, margin=0.01):
    V = compute_V_interval(f, margin=margin)
    return V, spectral_data(build_M0_pisot(V, f))


def test_g_beta_values(golden, trib):
    for f in (golden, trib):
        assert g_beta(f, 0.0) == 4
        r = interval_radius(f)
        assert g_beta(f, r) == 1
        assert g_beta(f, -r) == 1
        assert g_beta_flags(f, r)
        assert not g_beta_flags(f, 0.0)


def test_integral(golden, trib):
    for poly in ("x^2-x-1", "x^3-x^2-x-1", "x^3-x-1", "x^5-x^4-x^3+x^2-1"):
        f = field_from(poly)
        assert integrate_g_beta(f) == pytest.approx(4 / f.beta, abs=1e-12)
    # and against a fine Riemann sum
    r = interval_radius(golden)
    x = np.linspace(-r, r, 400001)
    assert np.mean(g_beta(golden, x)) == pytest.approx(4 / golden.beta, abs=1e-4)


@pytest.mark.parametrize("poly", ["x^2-x-1", "x^3-x^2-x-1"])
def test_rowsum_identity(poly):
    f = field_from(poly)
    V, spec = _pipeline(f)
    lam, rhs, res = rowsum_identity(f, V, spec)
    assert res < 1e-9
    x = f.embed_all(V)[:, 0].real
    r = build_M0_pisot(V, f).row_sums()
    assert np.array_equal(r, g_beta(f, x, 0.01))


def test_random_matrix_identity():
    rng = np.random.default_rng(3)
    for _ in range(5):
        A = rng.integers(1, 5, size=(5, 5))
        M = TransitionMatrix(sp.csr_matrix(A), [(k,) for k in range(5)])
        s = spectral_data(M, check_maximality=False)
        v = s.probability()
        assert abs(s.lam - np.dot(v, A.sum(axis=1))) < 1e-12


def test_restricted_measure(golden, trib):
    for f in (golden, trib):
        V, spec = _pipeline(f)
        m = restricted_measure(f, V, spec)
        assert m.masses.sum() == pytest.approx(1, abs=1e-14)
        assert np.all(np.abs(m.positions) <= m.hi + 0.01)
        # symmetric about 0
        assert np.allclose(m.positions, -m.positions[::-1], atol=1e-12)
        assert np.allclose(m.masses, m.masses[::-1], rtol=1e-10)
        assert m.masses.max() == pytest.approx(m.masses[np.argmin(np.abs(m.positions))], rel=1e-12)
    assert len(restricted_measure(trib, *_pipeline(trib))) == 7


def test_not_pisot():
    with pytest.raises(NotPisot):
        compute_V_interval(field_from("x^3-3x-1"))


def test_w1_examples():
    m = DiscreteMeasure(np.array([0.0]), np.array([1.0]), -1.0, 1.0)
    assert wasserstein1(m) == pytest.approx(0.5, abs=1e-15)
    n = 20000
    fine = DiscreteMeasure(-1 + (2 * np.arange(n) + 1) / n, np.full(n, 1 / n), -1.0, 1.0)
    assert wasserstein1(fine) < 1e-4
    with pytest.raises(ValueError):
        DiscreteMeasure(np.array([0.5, 0.0]), np.array([0.5, 0.5]), -1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(0.01, 1)), min_size=1, max_size=30, unique_by=lambda t: t[0]))
def test_w1_reflection_and_cdf(atoms):
    atoms.sort()
    pos = np.array([a for a, _ in atoms])
    mass = np.array([b for _, b in atoms])
    mass /= mass.sum()
    m = DiscreteMeasure(pos, mass, -1.0, 1.0)
    assert wasserstein1(m) == pytest.approx(wasserstein1(m.reflected()), abs=1e-12)
    assert m.cdf(1.0) == pytest.approx(1.0)
    assert np.all(np.diff(m.cdf(np.linspace(-1, 1, 50))) >= 0)
    assert 0 <= wasserstein1(m) <= 1


def test_w1_scale_relation(trib):
    V, spec = _pipeline(trib)
    m = restricted_measure(trib, V, spec)
    r = interval_radius(trib)
    assert wasserstein1(m) == pytest.approx(r * wasserstein1(m.rescaled()), rel=1e-12)


def test_bound_monotone():
    b = 1.8393
    lams = np.linspace(2.01, 3.9, 40)
    bounds = [dimension_bound(b, l) for l in lams]
    assert np.all(np.diff(bounds) <= 0)
    assert dimension_bound(b, 2.0) == 1.0
    assert dimension_bound(b, 3.0) == pytest.approx((math.log(4) - math.log(3)) / math.log(b))


def test_report_tribonacci():
    r = dimension_report("x^3-x^2-x-1")
    assert r.matrix_size == 7
    assert r.bound == pytest.approx(0.96422, abs=1e-3)
    assert r.w1 == pytest.approx(0.13925, abs=1e-3)
    d = r.to_dict()
    assert "lambda" in d and "exit_code" not in d


def test_pipeline_continues_after_error():
    rows = table1_pipeline(["x^3-x^2-x-1", "x^2-2", "x^3-x-1"], threads=1)
    assert [r.error is None for r in rows] == [True, False, True]
    assert rows[1].exit_code == 2
    assert rows[2].matrix_size == 181
