import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectra.errors import ZeroMass
from spectra.projective import (birkhoff_coefficient, contraction_constants, delta_spanning_check,
                                f_translation, find_mixing_word, find_null_word, mixing_pattern,
                                proj_distance, sample_pairs, single_digit_expansion,
                                to_projective, vector_distance, word_product)
from spectra.spectrum import enumerate_patch


@pytest.fixture(scope="module")
def golden_word(golden_family):
    return find_mixing_word(golden_family[1])


def test_distance_examples():
    assert proj_distance([1, 1], [1, 1]) == 0
    assert proj_distance([1, 1], [math.e, 1]) == pytest.approx(1)
    assert proj_distance([0, 1], [1, 1]) == math.inf
    assert proj_distance([0, 2], [0, 1]) == pytest.approx(math.log(2))
    assert vector_distance([2, 2, 0], [1, math.e, 0]) == pytest.approx(1)
    with pytest.raises(ZeroMass):
        to_projective([0, 1])


pos = st.floats(0.01, 100)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(pos, pos, pos), min_size=4, max_size=4))
def test_metric_axioms(rows):
    a, b, c = (np.array(r) for r in zip(*rows))
    assert proj_distance(a, b) == pytest.approx(proj_distance(b, a))
    assert proj_distance(a, c) <= proj_distance(a, b) + proj_distance(b, c) + 1e-12


def test_sample_pairs_shape():
    U, V = sample_pairs(7, 100, np.random.default_rng(0))
    assert U.shape == V.shape == (100, 7)
    assert np.all(U[:, 0] > 0) and np.all(V[:, 0] > 0)


def test_mixing_pattern_definition():
    P = np.array([[3, 0, 1], [0, 0, 0], [2, 0, 5]])
    assert mixing_pattern(P) == ((1,), (1,))
    P[2, 2] = 0
    assert mixing_pattern(P) is None
    assert mixing_pattern(np.array([[0, 1], [1, 1]])) is None


def test_mixing_word_golden(golden_word, golden_family):
    mw = golden_word
    assert 0 not in mw.zero_rows and 0 not in mw.zero_cols
    P = word_product(golden_family[1], mw.word)
    zero = P == 0
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            assert zero[i, j] == (i in mw.zero_rows or j in mw.zero_cols)
    assert mw.to_dict()["length"] == len(mw.word)


def test_mixing_word_tribonacci(trib_family):
    mw = find_mixing_word(trib_family[1])
    assert len(mw.word) <= 80  # two connector halves, each capped
    assert mixing_pattern(word_product(trib_family[1], mw.word)) is not None


def test_contraction(golden_word):
    c = contraction_constants(golden_word, trials=2000, seed=0)
    assert 0 < c.C2 < 1 and c.C1 > 0 and c.finite_pairs > 0
    assert 0 < c.C2_birkhoff < 1
    again = contraction_constants(golden_word, trials=2000, seed=0)
    assert again.to_dict() == c.to_dict()


def test_repeated_contraction(golden_word):
    c = contraction_constants(golden_word, trials=2000, seed=1)
    P = np.asarray(golden_word.product, dtype=float)
    P /= P.max()
    rng = np.random.default_rng(5)
    u, v = rng.uniform(0.1, 10, P.shape[0]), rng.uniform(0.1, 10, P.shape[0])
    d0 = vector_distance(u, v)
    steps = math.ceil(math.log(d0 / 1e-8) / math.log(1 / c.C2))
    for _ in range(steps):
        u, v = u @ P, v @ P
        u, v = u / u[0], v / v[0]
    assert vector_distance(u, v) < 1e-8


def test_birkhoff_rank_one():
    P = np.outer([1, 2, 3], [4, 5, 6]).astype(float)
    assert birkhoff_coefficient(P, (), ()) == pytest.approx(0, abs=1e-12)


def test_single_digit_counterexample():
    # a 0/1/2 matrix whose image pair is farther apart than the input pair
    B = np.array([[1, 0, 0], [1, 0, 0], [0, 0, 1]], dtype=float)
    U, V = np.array([1, 1, 1.0]), np.array([1, math.e, 1 / math.e])
    assert vector_distance(U, V) == pytest.approx(1)
    assert vector_distance(U @ B, V @ B) > 1.6


def test_single_digit_report(golden_family):
    reps = single_digit_expansion(golden_family[1], trials=500, seed=0)
    assert [r.digit for r in reps] == [-1, 0, 1]
    for r in reps:
        assert r.pairs > 0 and r.violations >= 0
        if r.violations:
            U, V = r.example
            A = golden_family[1][r.digit].dense()
            assert vector_distance(U @ A, V @ A) > vector_distance(U, V)


def test_f_translation(golden_family):
    D, mats, spec = golden_family
    assert f_translation(spec, mats, [], 0) == 0
    assert f_translation(spec, mats, [1, 0, 1], 0) == 0
    j = D.index[(1, 0)]
    a = f_translation(spec, mats, [1, 0, 0], j)
    b = f_translation(spec, mats, [0, 1, 1], j)
    assert a == pytest.approx(b, abs=1e-10)


def test_f_translation_zero_mass(golden_family):
    D, mats, spec = golden_family
    v = spec.W
    j = int(np.nonzero(v == 0)[0][0]) if np.any(v == 0) else None
    if j is None:
        pytest.skip("no zero entry in W")
    with pytest.raises(ZeroMass):
        f_translation(spec, mats, [], j)


def test_null_words(golden, trib):
    for f in (golden, trib):
        w = find_null_word(f)
        assert w[0] != 0 and f.from_word(w) == f.zero()


def test_spanning(golden, golden_family):
    assert delta_spanning_check(golden_family[0], enumerate_patch(golden, 2))
