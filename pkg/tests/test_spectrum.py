import itertools

import numpy as np
import pytest

from spectra.algebraic import field_from
from spectra.errors import DepthTooLarge
from spectra.measure_analysis import TABLE1
from spectra.spectrum import (FAILS, HOLDS, approximate_attractor, check_condition1, compute_delta,
                              compute_V_interval, cylinder_of, enumerate_patch, window)
from spectra.transition import brute_force_counts

PHI = (1 + 5 ** 0.5) / 2


def test_patch_R1(golden, trib):
    for f in (golden, trib):
        P = enumerate_patch(f, 1)
        assert set(P.points) >= {f.zero(), f.integer(1), f.integer(-1)}
        assert P.points[0] == f.zero()
    assert len(enumerate_patch(golden, 1)) == 5


def test_patch_rejects_small_R(golden):
    with pytest.raises(ValueError):
        enumerate_patch(golden, 0.5)


def test_patch_deterministic(trib):
    a, b = enumerate_patch(trib, 3), enumerate_patch(trib, 3)
    assert a.points == b.points and np.array_equal(a.edges, b.edges)


@pytest.mark.parametrize("R", [1, 2, 3.5, 6])
def test_patch_closure_and_codings(golden, R):
    P = enumerate_patch(golden, R)
    assert P.check_closure()
    for k in range(len(P)):
        assert golden.from_word(P.coding(k)) == P.points[k]


def test_patch_monotone(trib):
    small, big = enumerate_patch(trib, 2), enumerate_patch(trib, 4)
    assert set(small.points) < set(big.points)


def test_patch_matches_brute_force(golden):
    # every point reachable in n steps that lies in B(R) must be in the patch
    P = enumerate_patch(golden, 3)
    for z in brute_force_counts(golden, 9):
        if golden.box_status([z], 3)[0] == 0:
            assert z in P.index


def test_V_sizes():
    for poly, *_, size in TABLE1[:4]:
        assert len(compute_V_interval(field_from(poly))) == size


def test_V_golden(golden):
    V = compute_V_interval(golden, margin=0)
    vals = golden.embed_all(V)[:, 0].real
    assert V[0] == golden.zero()
    assert np.all(np.diff(vals[1:]) > 0)
    assert np.all(np.abs(vals) <= PHI + 1e-12)
    assert set(V) == {tuple(-c for c in v) for v in V}
    assert len(V) == len(enumerate_patch(golden, 40).values()[np.abs(enumerate_patch(golden, 40).values()) <= PHI + 1e-9])


def test_delta(golden, trib):
    for f in (golden, trib):
        D = compute_delta(f)
        assert D.elements[0] == f.zero()
        assert set(D.elements) == {tuple(-c for c in v) for v in D.elements}
    D = compute_delta(golden)
    assert len(D) == 29
    assert (-1, 1) in D.index  # phi - 1


def test_delta_merging_word(golden):
    # phi - 1 is sent to 0 by some digit word over -2..2: x beta^n + w(0) = 0
    x = (1, -1)
    found = None
    for n in range(1, 7):
        target = _power(golden, x, n)
        found = next((w for w in itertools.product(range(-2, 3), repeat=n)
                      if golden.from_word(w) == target), None)
        if found:
            break
    assert found is not None
    assert golden.from_word(found) == _power(golden, (1, -1), len(found))


def _power(field, x, n):
    for _ in range(n):
        x = field.times_beta(x)
    return x


def test_attractor_golden(golden):
    A1 = approximate_attractor(golden, 1)
    assert len(A1) == 3
    assert np.allclose(sorted(A1.centers[:, 0].real), [-1, 0, 1])
    for n in (1, 5, 10):
        A = approximate_attractor(golden, n)
        assert A.radius[0] <= PHI ** 2 * PHI ** (-n) + 1e-12


def test_cover_soundness(trib):
    P = enumerate_patch(trib, 2)
    W = window(trib)
    y = W.coords(P.points)
    for n in (1, 3, 6):
        assert approximate_attractor(trib, n).covers(y).all()


def test_condition1_golden(golden):
    v = check_condition1(golden, depth=20)
    assert v.status == HOLDS
    assert v.lhs_size == v.rhs_size


def test_condition1_perturbation(golden):
    lhs = enumerate_patch(golden, 1, closed=True).points
    drop = lhs[-1]
    v = check_condition1(golden, depth=20, lhs=[p for p in lhs if p != drop])
    assert v.status == FAILS and v.witness == drop


def test_condition1_depth_cap(golden):
    with pytest.raises(DepthTooLarge):
        check_condition1(golden, depth=100)


def test_cylinder_examples(golden):
    assert cylinder_of(golden, (0, 0), 1) == (0,)
    assert cylinder_of(golden, (1, 0), 1) == (1,)
    w = cylinder_of(golden, (-1, 1), 3)  # conjugate of phi - 1 is -phi, a branch boundary
    assert w is not None and len(w) == 3


def test_cylinder_gives_coding_suffix(golden):
    # T_{e_n}^{-1} ... T_{e_1}^{-1} x stays a lattice point whose conjugate is in the window
    P = enumerate_patch(golden, 4)
    W = window(golden)
    for k in range(0, len(P), 7):
        x = P.points[k]
        w = cylinder_of(golden, x, 4)
        assert w is not None
        z = x
        for e in w:
            z = golden.T_inv(e, z)
            assert W.hull_margin(W.coords(z)[0]) > -1e-12
