import os
import subprocess
import sys

import numpy as np
import pytest

from tinybo import _accel

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _inputs(seed, n=7, m=5, d=3):
    rng = np.random.default_rng(seed)
    return rng.random((n, d)), rng.random((m, d)), 0.5 + rng.random(d) * 3


@needs_numba
@pytest.mark.parametrize("kind", [_accel.SQUARED_EXPONENTIAL, _accel.MATERN52])
@pytest.mark.parametrize("seed", range(3))
def test_cross_kernel_backends_agree(kind, seed):
    X1, X2, inv_ls = _inputs(seed)
    a = _accel.cross_kernel_numpy(X1, X2, inv_ls, 1.7, kind)
    b = _accel.cross_kernel_numba(X1, X2, inv_ls, 1.7, kind)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("kind", [_accel.SQUARED_EXPONENTIAL, _accel.MATERN52])
@pytest.mark.parametrize("ard", [True, False])
@pytest.mark.parametrize("seed", range(3))
def test_gradient_kernels_backends_agree(kind, ard, seed):
    X, _, inv_ls = _inputs(seed)
    if not ard:
        inv_ls = np.full(X.shape[1], inv_ls[0])
    Ka, dKa = _accel.kernel_with_grads_numpy(X, inv_ls, 0.8, kind, ard)
    Kb, dKb = _accel.kernel_with_grads_numba(X, inv_ls, 0.8, kind, ard)
    assert dKa.shape == dKb.shape == ((X.shape[1] + 1 if ard else 2), X.shape[0], X.shape[0])
    np.testing.assert_allclose(Ka, Kb, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(dKa, dKb, rtol=1e-12, atol=1e-14)
    np.testing.assert_array_equal(dKa[-1], Ka)


def test_dispatch_matches_numpy_reference():
    X1, X2, inv_ls = _inputs(9)
    np.testing.assert_allclose(
        _accel.cross_kernel(X1, X2, inv_ls, 2.0, _accel.MATERN52),
        _accel.cross_kernel_numpy(X1, X2, inv_ls, 2.0, _accel.MATERN52),
        rtol=1e-12,
    )


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, TINYBO_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from tinybo import _accel; print(_accel.backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
