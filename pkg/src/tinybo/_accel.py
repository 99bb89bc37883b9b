"""Hot numeric kernels with an optional numba backend.

Every kernel exists twice: a vectorised numpy version and a loop version
compiled with ``numba.njit``.  The compiled path is used when numba is
importable and the environment variable ``TINYBO_DISABLE_NUMBA`` is unset
(or set to ``0``/``false``).  Both paths compute the same quantities in
the same order of operations per entry, so results agree to rounding.

Kernel kinds are passed as small integers so the compiled code does not
have to deal with Python enums.
"""

from __future__ import annotations

import math
import os

import numpy as np

SQUARED_EXPONENTIAL = 0
MATERN52 = 1

_SQRT5 = math.sqrt(5.0)


def _env_disables_numba() -> bool:
    flag = os.environ.get("TINYBO_DISABLE_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no", "off")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disables_numba()


# ---------------------------------------------------------------------------
# numpy reference path
# ---------------------------------------------------------------------------


def _scaled_diff_sq(X1, X2, inv_ls):
    diff = (X1[:, None, :] - X2[None, :, :]) * inv_ls
    return diff * diff


def cross_kernel_numpy(X1, X2, inv_ls, signal_var, kind):
    """Kernel matrix ``k(X1[i], X2[j])`` without any noise term."""
    s = _scaled_diff_sq(X1, X2, inv_ls).sum(axis=-1)
    if kind == SQUARED_EXPONENTIAL:
        return signal_var * np.exp(-0.5 * s)
    r = np.sqrt(s)
    return signal_var * (1.0 + _SQRT5 * r + (5.0 / 3.0) * s) * np.exp(-_SQRT5 * r)


def kernel_with_grads_numpy(X, inv_ls, signal_var, kind, ard):
    """Gram matrix of ``X`` and its derivatives w.r.t. the log-hyperparameters.

    Returns ``(K, dK)`` where ``dK`` has shape ``(p, n, n)``.  The first
    ``p - 1`` slices are derivatives w.r.t. the log-lengthscale(s) (one per
    dimension when ``ard`` is true, a single one otherwise); the last slice
    is the derivative w.r.t. the log signal variance, which equals ``K``.
    """
    t2 = _scaled_diff_sq(X, X, inv_ls)
    s = t2.sum(axis=-1)
    if kind == SQUARED_EXPONENTIAL:
        K = signal_var * np.exp(-0.5 * s)
        g = K
    else:
        r = np.sqrt(s)
        e = np.exp(-_SQRT5 * r)
        K = signal_var * (1.0 + _SQRT5 * r + (5.0 / 3.0) * s) * e
        g = signal_var * (5.0 / 3.0) * (1.0 + _SQRT5 * r) * e
    n = X.shape[0]
    if ard:
        d = X.shape[1]
        dK = np.empty((d + 1, n, n))
        dK[:d] = np.moveaxis(t2, -1, 0) * g
    else:
        dK = np.empty((2, n, n))
        dK[0] = g * s
    dK[-1] = K
    return K, dK


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def cross_kernel_numba(X1, X2, inv_ls, signal_var, kind):
        n1, d = X1.shape
        n2 = X2.shape[0]
        out = np.empty((n1, n2))
        for i in range(n1):
            for j in range(n2):
                s = 0.0
                for k in range(d):
                    t = (X1[i, k] - X2[j, k]) * inv_ls[k]
                    s += t * t
                if kind == 0:
                    out[i, j] = signal_var * math.exp(-0.5 * s)
                else:
                    r = math.sqrt(s)
                    out[i, j] = (
                        signal_var
                        * (1.0 + 2.23606797749979 * r + (5.0 / 3.0) * s)
                        * math.exp(-2.23606797749979 * r)
                    )
        return out

    @numba.njit(cache=True)
    def kernel_with_grads_numba(X, inv_ls, signal_var, kind, ard):
        n, d = X.shape
        p = d + 1 if ard else 2
        K = np.empty((n, n))
        dK = np.empty((p, n, n))
        t2 = np.empty(d)
        for i in range(n):
            for j in range(i + 1):
                s = 0.0
                for k in range(d):
                    t = (X[i, k] - X[j, k]) * inv_ls[k]
                    t2[k] = t * t
                    s += t2[k]
                if kind == 0:
                    kij = signal_var * math.exp(-0.5 * s)
                    g = kij
                else:
                    r = math.sqrt(s)
                    e = math.exp(-2.23606797749979 * r)
                    kij = signal_var * (1.0 + 2.23606797749979 * r + (5.0 / 3.0) * s) * e
                    g = signal_var * (5.0 / 3.0) * (1.0 + 2.23606797749979 * r) * e
                K[i, j] = kij
                K[j, i] = kij
                if ard:
                    for k in range(d):
                        v = g * t2[k]
                        dK[k, i, j] = v
                        dK[k, j, i] = v
                else:
                    v = g * s
                    dK[0, i, j] = v
                    dK[0, j, i] = v
                dK[p - 1, i, j] = kij
                dK[p - 1, j, i] = kij
        return K, dK

else:  # pragma: no cover
    cross_kernel_numba = None
    kernel_with_grads_numba = None


if USE_NUMBA:
    _cross_impl = cross_kernel_numba
    _grads_impl = kernel_with_grads_numba
else:
    _cross_impl = cross_kernel_numpy
    _grads_impl = kernel_with_grads_numpy


def cross_kernel(X1, X2, inv_ls, signal_var, kind):
    X1 = np.ascontiguousarray(X1, dtype=np.float64)
    X2 = np.ascontiguousarray(X2, dtype=np.float64)
    inv_ls = np.ascontiguousarray(inv_ls, dtype=np.float64)
    return _cross_impl(X1, X2, inv_ls, float(signal_var), int(kind))


def kernel_with_grads(X, inv_ls, signal_var, kind, ard):
    X = np.ascontiguousarray(X, dtype=np.float64)
    inv_ls = np.ascontiguousarray(inv_ls, dtype=np.float64)
    return _grads_impl(X, inv_ls, float(signal_var), int(kind), bool(ard))


def backend() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
