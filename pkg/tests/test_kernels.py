import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from spectra import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAS_NUMBA, reason="numba not installed")


def _random_csr(n, rng, density=0.3):
    A = sp.random(n, n, density=density, random_state=np.random.RandomState(int(rng.integers(1 << 30))),
                  data_rvs=lambda k: rng.integers(1, 3, size=k).astype(float), format="csr")
    A = A + sp.identity(n, format="csr") * 2
    return A.tocsr()


@needs_numba
def test_vecmat():
    rng = np.random.default_rng(0)
    A = _random_csr(40, rng)
    x = rng.random(40)
    want = A.T @ x
    for b in ("numba", "numpy"):
        assert np.allclose(K.vecmat(A, x, backend=b), want, rtol=1e-14)


@needs_numba
def test_power_and_perron():
    rng = np.random.default_rng(1)
    A = _random_csr(30, rng)
    l1, _, _ = K.power_iteration(A, backend="numba")
    l2, _, _ = K.power_iteration(A, backend="numpy")
    assert l1 == pytest.approx(l2, rel=1e-11)
    assert l1 == pytest.approx(max(abs(np.linalg.eigvals(A.toarray()))), rel=1e-9)
    a = K.perron_iterate(A, l1, 1e-13, 10**5, 30, 0.0, backend="numba")
    b = K.perron_iterate(A, l1, 1e-13, 10**5, 30, 0.0, backend="numpy")
    assert np.allclose(a[0], b[0], rtol=1e-10)
    assert a[1] == b[1]


@needs_numba
def test_w1_and_distances():
    rng = np.random.default_rng(2)
    pos = np.sort(rng.uniform(-1, 1, 50))
    mass = rng.random(50)
    mass /= mass.sum()
    assert K.w1_uniform(pos, mass, -1.0, 1.0, backend="numba") == pytest.approx(
        K.w1_uniform(pos, mass, -1.0, 1.0, backend="numpy"), abs=1e-14)
    U = rng.random((200, 6)) * (rng.random((200, 6)) < 0.7)
    V = rng.random((200, 6)) * (rng.random((200, 6)) < 0.7)
    U[:, 0] = V[:, 0] = 1
    a = K.proj_distance_rows(U, V, backend="numba")
    b = K.proj_distance_rows(U, V, backend="numpy")
    assert np.array_equal(np.isinf(a), np.isinf(b))
    assert np.allclose(a[np.isfinite(a)], b[np.isfinite(b)], rtol=1e-13)


def test_env_flag():
    env = dict(os.environ, SPECTRA_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "from spectra import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
