"""Exact Gaussian-process regression with SE / Matérn-5/2 kernels.

All hyperparameters are stored in log space.  The observation noise is a
fixed *variance* added to the covariance diagonal; it is never learned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.linalg.lapack import dpotri

from . import _accel
from .core import Dataset, InvalidArgument, NumericalFailure, RngStream

KERNEL_KINDS = {
    "squared_exponential": _accel.SQUARED_EXPONENTIAL,
    "matern52": _accel.MATERN52,
}
_KERNEL_ALIASES = {
    "se": "squared_exponential",
    "rbf": "squared_exponential",
    "exp": "squared_exponential",
    "matern": "matern52",
    "matern_five_halves": "matern52",
}

MEAN_KINDS = ("zero", "constant", "data")

# log-space box searched by the hyperparameter optimizer
LOG_LENGTHSCALE_BOUNDS = (math.log(1e-3), math.log(10.0))
LOG_SIGNAL_VARIANCE_BOUNDS = (math.log(1e-4), math.log(100.0))

JITTER_LADDER = (1e-10, 1e-6, 1e-4)

_LOG_2PI = math.log(2.0 * math.pi)


def canonical_kernel_kind(kind: str) -> str:
    kind = _KERNEL_ALIASES.get(kind, kind)
    if kind not in KERNEL_KINDS:
        raise InvalidArgument(f"unknown kernel kind {kind!r}; known: {sorted(KERNEL_KINDS)}")
    return kind


@dataclass(frozen=True)
class KernelConfig:
    """Stationary kernel hyperparameters.

    ``log_lengthscale`` holds one entry (isotropic) or one per input
    dimension (ARD).  ``noise_variance`` is added on the Gram diagonal.
    """

    kind: str = "squared_exponential"
    log_lengthscale: tuple[float, ...] = (0.0,)
    log_signal_variance: float = 0.0
    noise_variance: float = 0.001

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kernel_kind(self.kind))
        ls = tuple(float(v) for v in np.atleast_1d(self.log_lengthscale))
        if not ls:
            raise InvalidArgument("log_lengthscale must have at least one entry")
        object.__setattr__(self, "log_lengthscale", ls)
        object.__setattr__(self, "log_signal_variance", float(self.log_signal_variance))
        if not self.noise_variance >= 0.0:
            raise InvalidArgument(f"noise_variance must be >= 0, got {self.noise_variance}")
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

    @classmethod
    def from_natural(
        cls,
        kind: str = "squared_exponential",
        lengthscale: float | Sequence[float] = 1.0,
        signal_variance: float = 1.0,
        noise_variance: float = 0.001,
    ) -> "KernelConfig":
        ls = np.atleast_1d(np.asarray(lengthscale, dtype=float))
        if np.any(ls <= 0) or signal_variance <= 0:
            raise InvalidArgument("lengthscale and signal_variance must be positive")
        return cls(kind, tuple(np.log(ls)), math.log(signal_variance), noise_variance)

    @property
    def ard(self) -> bool:
        return len(self.log_lengthscale) > 1

    @property
    def lengthscale(self) -> np.ndarray:
        return np.exp(np.asarray(self.log_lengthscale))

    @property
    def signal_variance(self) -> float:
        return math.exp(self.log_signal_variance)

    @property
    def theta(self) -> np.ndarray:
        """Learnable log-hyperparameters: lengthscale(s) then signal variance."""
        return np.array(self.log_lengthscale + (self.log_signal_variance,))

    def with_theta(self, theta) -> "KernelConfig":
        theta = np.asarray(theta, dtype=float)
        return replace(
            self, log_lengthscale=tuple(theta[:-1].tolist()), log_signal_variance=float(theta[-1])
        )

    def with_ard(self, d: int) -> "KernelConfig":
        """Expand an isotropic lengthscale to one entry per dimension."""
        if len(self.log_lengthscale) == d:
            return self
        if self.ard:
            raise InvalidArgument(f"kernel has {len(self.log_lengthscale)} lengthscales, need {d}")
        return replace(self, log_lengthscale=self.log_lengthscale * d)

    def inv_lengthscale(self, d: int) -> np.ndarray:
        ls = self.lengthscale
        if ls.shape[0] == 1:
            ls = np.repeat(ls, d)
        elif ls.shape[0] != d:
            raise InvalidArgument(f"kernel has {ls.shape[0]} lengthscales but inputs have d={d}")
        return 1.0 / ls

    @property
    def kind_code(self) -> int:
        return KERNEL_KINDS[self.kind]


@dataclass(frozen=True)
class MeanConfig:
    """Prior mean: ``zero``, ``constant`` (value ``constant``) or ``data``.

    ``data`` uses the arithmetic mean of the observations at fit time.
    """

    kind: str = "data"
    constant: float = 0.0

    def __post_init__(self):
        if self.kind not in MEAN_KINDS:
            raise InvalidArgument(f"unknown mean kind {self.kind!r}; known: {MEAN_KINDS}")
        object.__setattr__(self, "constant", float(self.constant))

    def value(self, y: np.ndarray) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.constant
        return float(np.mean(y))


@dataclass(frozen=True)
class Posterior:
    mu: float
    sigma2: float


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def kernel_eval(cfg: KernelConfig, a, b) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise InvalidArgument(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    inv_ls = cfg.inv_lengthscale(a.shape[0])
    return float(
        _accel.cross_kernel(a[None, :], b[None, :], inv_ls, cfg.signal_variance, cfg.kind_code)[0, 0]
    )


def cross_covariance(cfg: KernelConfig, X1, X2) -> np.ndarray:
    """``k(X1, X2)`` without noise."""
    X1 = np.atleast_2d(np.asarray(X1, dtype=float))
    X2 = np.atleast_2d(np.asarray(X2, dtype=float))
    if X1.shape[1] != X2.shape[1]:
        raise InvalidArgument(f"dimension mismatch: {X1.shape[1]} vs {X2.shape[1]}")
    inv_ls = cfg.inv_lengthscale(X1.shape[1])
    return _accel.cross_kernel(X1, X2, inv_ls, cfg.signal_variance, cfg.kind_code)


def kernel_matrix(cfg: KernelConfig, X) -> np.ndarray:
    """Gram matrix of ``X`` with ``noise_variance`` added on the diagonal."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    K = cross_covariance(cfg, X, X)
    K[np.diag_indices_from(K)] += cfg.noise_variance
    return K


# ---------------------------------------------------------------------------
# fitted model
# ---------------------------------------------------------------------------


def _try_cholesky(K: np.ndarray) -> np.ndarray | None:
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        return None
    # numpy propagates NaN instead of failing
    return L if np.all(np.isfinite(np.diag(L))) else None


def _cholesky_with_jitter(K: np.ndarray) -> tuple[np.ndarray, float]:
    L = _try_cholesky(K)
    if L is not None:
        return L, 0.0
    scale = float(np.mean(np.diag(K)))
    if not scale > 0.0:
        scale = 1.0
    n = K.shape[0]
    for level in JITTER_LADDER:
        jitter = level * scale
        L = _try_cholesky(K + jitter * np.eye(n))
        if L is not None:
            return L, jitter
    raise NumericalFailure(
        f"Cholesky failed on a {n}x{n} covariance even with jitter "
        f"{JITTER_LADDER[-1] * scale:.3g}; diag range "
        f"[{np.min(np.diag(K)):.3g}, {np.max(np.diag(K)):.3g}], "
        f"finite={bool(np.all(np.isfinite(K)))}"
    )


class GpModel:
    """Immutable GP posterior conditioned on a dataset snapshot.

    Attributes
    ----------
    X, y : training inputs ``(n, d)`` and scalar observations ``(n,)``.
    kernel, mean : the configurations used for the fit.
    mean_value : the prior mean constant used for this fit.
    chol_factor : lower Cholesky factor of ``K + noise*I + jitter*I``.
    weights : solution of ``(K + noise*I) w = y - m``.
    jitter : extra diagonal actually used, zero when none was needed.
    """

    __slots__ = ("X", "y", "kernel", "mean", "mean_value", "chol_factor", "weights", "jitter")

    def __init__(self, X, y, kernel, mean, mean_value, chol_factor, weights, jitter):
        for name, arr in (("X", X), ("y", y), ("chol_factor", chol_factor), ("weights", weights)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "mean_value", mean_value)
        object.__setattr__(self, "jitter", jitter)

    def __setattr__(self, name, value):
        raise AttributeError("GpModel is immutable")

    def __eq__(self, other):
        if not isinstance(other, GpModel):
            return NotImplemented
        return (
            self.kernel == other.kernel
            and self.mean == other.mean
            and self.mean_value == other.mean_value
            and self.jitter == other.jitter
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.chol_factor, other.chol_factor)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"GpModel(n={self.n}, d={self.dim}, kernel={self.kernel})"

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def predict(self, Xq) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and latent variance at each row of ``Xq``."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        Ks = cross_covariance(self.kernel, Xq, self.X)
        mu = self.mean_value + Ks @ self.weights
        v = solve_triangular(self.chol_factor, Ks.T, lower=True, check_finite=False)
        var = self.kernel.signal_variance - np.einsum("ij,ij->j", v, v)
        return mu, np.maximum(var, 0.0)

    def query(self, x) -> Posterior:
        mu, var = self.predict(np.asarray(x, dtype=float).reshape(1, -1))
        return Posterior(float(mu[0]), float(var[0]))


def _as_xy(dataset) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(dataset, Dataset):
        if dataset.dim_out != 1:
            raise InvalidArgument(f"GP regression needs dim_out = 1, got {dataset.dim_out}")
        return np.array(dataset.X), np.array(dataset.y)
    X, y = dataset
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] != y.shape[0]:
        raise InvalidArgument(f"{X.shape[0]} inputs but {y.shape[0]} observations")
    return X, y


def gp_fit(dataset, kernel: KernelConfig, mean: MeanConfig = MeanConfig()) -> GpModel:
    """Condition the GP on ``dataset`` (a :class:`Dataset` or an ``(X, y)`` pair)."""
    X, y = _as_xy(dataset)
    if X.shape[0] == 0:
        raise InvalidArgument("cannot fit a GP to an empty dataset")
    if not np.all(np.isfinite(y)):
        raise InvalidArgument("observations must be finite")
    K = kernel_matrix(kernel, X)
    L, jitter = _cholesky_with_jitter(K)
    m = mean.value(y)
    w = cho_solve((L, True), y - m, check_finite=False)
    return GpModel(X, y, kernel, mean, m, L, w, jitter)


def gp_query(model: GpModel, x) -> Posterior:
    return model.query(x)


def log_marginal_likelihood(model: GpModel) -> float:
    r = model.y - model.mean_value
    n = model.n
    return float(
        -0.5 * r @ model.weights - np.sum(np.log(np.diag(model.chol_factor))) - 0.5 * n * _LOG_2PI
    )


def _lower_inverse_from_cholesky(L: np.ndarray) -> np.ndarray:
    # lower triangle (incl. diagonal) of K^-1; L's zero upper part is kept
    inv, info = dpotri(L, lower=1)
    if info != 0:
        raise NumericalFailure(f"dpotri failed with info={info}")
    return inv


def _lml_and_grad(theta, X, r, kind_code, ard, noise) -> tuple[float, np.ndarray]:
    d = X.shape[1]
    log_ls = theta[:-1]
    inv_ls = np.exp(-log_ls) if ard else np.full(d, math.exp(-log_ls[0]))
    K, dK = _accel.kernel_with_grads(X, inv_ls, math.exp(theta[-1]), kind_code, ard)
    K[np.diag_indices_from(K)] += noise
    L, _ = _cholesky_with_jitter(K)
    w = cho_solve((L, True), r, check_finite=False)
    lml = -0.5 * r @ w - np.sum(np.log(np.diag(L))) - 0.5 * X.shape[0] * _LOG_2PI
    # 0.5 * tr((w w^T - K^-1) dK), using symmetry of K^-1 and dK
    T = _lower_inverse_from_cholesky(L)
    quad = np.einsum("i,pij,j->p", w, dK, w)
    trace = 2.0 * np.einsum("ij,pij->p", T, dK) - np.einsum("i,pii->p", np.diag(T), dK)
    return float(lml), 0.5 * (quad - trace)


def lml_gradient(model: GpModel) -> np.ndarray:
    """Gradient of the LML w.r.t. ``kernel.theta`` (noise and mean held fixed)."""
    k = model.kernel
    _, grad = _lml_and_grad(
        k.theta, np.array(model.X), model.y - model.mean_value, k.kind_code, k.ard, k.noise_variance
    )
    return grad


# ---------------------------------------------------------------------------
# hyperparameter learning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HyperOptConfig:
    """Settings for :func:`optimize_hyperparams`.

    ``restarts`` counts the starting points including the current
    configuration.  ``iterations`` bounds the number of Rprop steps per
    start; a start also stops once every active step size has shrunk
    below ``step_tol`` (log units) or the gradient vanishes.
    """

    restarts: int = 2
    iterations: int = 50
    delta0: float = 0.1
    delta_min: float = 1e-6
    delta_max: float = 1.0
    eta_plus: float = 1.2
    eta_minus: float = 0.5
    grad_tol: float = 1e-6
    step_tol: float = 1e-3


def _theta_bounds(p: int) -> tuple[np.ndarray, np.ndarray]:
    lo = np.full(p, LOG_LENGTHSCALE_BOUNDS[0])
    hi = np.full(p, LOG_LENGTHSCALE_BOUNDS[1])
    lo[-1], hi[-1] = LOG_SIGNAL_VARIANCE_BOUNDS
    return lo, hi


def _rprop_ascent(f, theta0, lo, hi, cfg: HyperOptConfig) -> tuple[float, np.ndarray]:
    # iRprop-: sign-based steps, per-coordinate adaptive step sizes
    theta = theta0.copy()
    best_val, best_theta = -np.inf, theta.copy()
    delta = np.full(theta.shape, cfg.delta0)
    prev = np.zeros_like(theta)
    for _ in range(cfg.iterations):
        try:
            val, g = f(theta)
        except NumericalFailure:
            break
        if not np.isfinite(val) or not np.all(np.isfinite(g)):
            break
        if val > best_val:
            best_val, best_theta = val, theta.copy()
        # a bound that is active with the gradient pushing outward is converged
        g = np.where((theta <= lo) & (g < 0) | (theta >= hi) & (g > 0), 0.0, g)
        if np.max(np.abs(g)) < cfg.grad_tol:
            break
        prod = g * prev
        delta = np.where(
            prod > 0,
            np.minimum(delta * cfg.eta_plus, cfg.delta_max),
            np.where(prod < 0, np.maximum(delta * cfg.eta_minus, cfg.delta_min), delta),
        )
        g = np.where(prod < 0, 0.0, g)
        moving = g != 0
        if np.any(prod < 0) and np.all(delta[moving | (prod < 0)] < cfg.step_tol):
            break
        theta = np.clip(theta + np.sign(g) * delta, lo, hi)
        prev = g
    else:
        try:
            val, _ = f(theta)
            if np.isfinite(val) and val > best_val:
                best_val, best_theta = val, theta.copy()
        except NumericalFailure:
            pass
    return best_val, best_theta


def optimize_hyperparams(
    dataset,
    kernel: KernelConfig,
    mean: MeanConfig = MeanConfig(),
    rng: RngStream | None = None,
    config: HyperOptConfig = HyperOptConfig(),
) -> KernelConfig:
    """Maximise the LML over the log-hyperparameters.

    The current configuration is always the first start; ``restarts - 1``
    further starts are drawn log-uniformly from the hyperparameter box.
    The returned configuration never has a lower LML than ``kernel``.
    """
    X, y = _as_xy(dataset)
    if X.shape[0] < 2:
        raise InvalidArgument("hyperparameter learning needs at least two samples")
    r = y - mean.value(y)
    kind, ard, noise = kernel.kind_code, kernel.ard, kernel.noise_variance

    def f(theta):
        return _lml_and_grad(theta, X, r, kind, ard, noise)

    theta0 = kernel.theta
    lo, hi = _theta_bounds(theta0.shape[0])
    try:
        base_val = f(theta0)[0]
    except NumericalFailure:
        base_val = -np.inf

    starts = [np.clip(theta0, lo, hi)]
    if config.restarts > 1:
        gen = (rng or RngStream(0)).generator()
        for _ in range(config.restarts - 1):
            starts.append(lo + (hi - lo) * gen.random(theta0.shape[0]))

    best_val, best_theta = base_val, theta0
    for start in starts:
        val, theta = _rprop_ascent(f, start, lo, hi, config)
        if val > best_val:
            best_val, best_theta = val, theta
    if best_theta is theta0:
        return kernel
    return kernel.with_theta(best_theta)
