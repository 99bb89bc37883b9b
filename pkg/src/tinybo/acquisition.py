"""Acquisition functions (maximisation convention).

The scalar functions accept either a :class:`~tinybo.gp.Posterior` or bare
``mu``/``sigma2`` values; the latter also work element-wise on arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .core import InvalidArgument
from .gp import GpModel, Posterior

ACQUI_KINDS = ("ucb", "gp_ucb", "ei")

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AcquiConfig:
    """Which acquisition to use and its parameters.

    Only the parameter matching ``kind`` is read: ``kappa`` for ``ucb``,
    ``delta`` for ``gp_ucb`` and ``xi`` for ``ei``.
    """

    kind: str = "gp_ucb"
    kappa: float = 0.5
    delta: float = 0.1
    xi: float = 0.0

    def __post_init__(self):
        if self.kind not in ACQUI_KINDS:
            raise InvalidArgument(f"unknown acquisition {self.kind!r}; known: {ACQUI_KINDS}")
        if not self.kappa >= 0:
            raise InvalidArgument(f"kappa must be >= 0, got {self.kappa}")
        if not 0.0 < self.delta < 1.0:
            raise InvalidArgument(f"delta must lie in (0, 1), got {self.delta}")
        if not self.xi >= 0:
            raise InvalidArgument(f"xi must be >= 0, got {self.xi}")


def _unpack(p, sigma2):
    if isinstance(p, Posterior):
        return p.mu, p.sigma2
    return p, sigma2


def acqui_ucb(p, kappa: float, sigma2=None):
    """``mu + kappa * sqrt(sigma2)``.

    Call as ``acqui_ucb(posterior, kappa)`` or ``acqui_ucb(mu, kappa, sigma2)``.
    """
    mu, s2 = _unpack(p, sigma2)
    return mu + kappa * np.sqrt(s2)


def gpucb_beta(t: int, d: int, delta: float) -> float:
    """Exploration weight of GP-UCB at iteration ``t`` (1-based)."""
    if t < 1:
        raise InvalidArgument(f"t must be >= 1, got {t}")
    if not 0.0 < delta < 1.0:
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
    return 2.0 * ((d / 2.0 + 2.0) * math.log(t) + math.log(math.pi**2 / (3.0 * delta)))


def acqui_gp_ucb(p, t: int, d: int, delta: float, sigma2=None):
    return acqui_ucb(p, math.sqrt(gpucb_beta(t, d, delta)), sigma2)


def acqui_ei(p, best_y: float, xi: float = 0.0, sigma2=None):
    """Expected improvement over ``best_y + xi``; zero where ``sigma2 == 0``."""
    mu, s2 = _unpack(p, sigma2)
    mu = np.asarray(mu, dtype=float)
    s = np.sqrt(np.asarray(s2, dtype=float))
    imp = mu - best_y - xi
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = np.where(s > 0, imp / np.where(s > 0, s, 1.0), 0.0)
        ei = imp * ndtr(z) + s * _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    ei = np.where(s > 0, np.maximum(ei, 0.0), 0.0)
    return float(ei) if ei.ndim == 0 else ei


def make_acquisition(
    model: GpModel, cfg: AcquiConfig, t: int, best_y: float | None = None
) -> Callable[[np.ndarray], np.ndarray]:
    """Batched acquisition surface ``(m, d) -> (m,)`` for a fitted model.

    ``t`` is the current 1-based iteration (used by ``gp_ucb``); ``best_y``
    defaults to the best observation in the model's training data.
    """
    if cfg.kind == "ucb":
        kappa = cfg.kappa
    elif cfg.kind == "gp_ucb":
        kappa = math.sqrt(gpucb_beta(t, model.dim, cfg.delta))
    else:
        incumbent = float(np.max(model.y)) if best_y is None else float(best_y)
        xi = cfg.xi

        def ei(X):
            mu, var = model.predict(X)
            return acqui_ei(mu, incumbent, xi, var)

        return ei

    def ucb(X):
        mu, var = model.predict(X)
        return mu + kappa * np.sqrt(var)

    return ucb
