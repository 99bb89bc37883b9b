"""Registry of standard global-optimisation test functions.

Functions are stored in their usual minimisation form over their natural
domain.  :func:`eval_test_function` maps a unit-box point to the natural
domain and returns the *negated* value, ready for a maximising optimizer.

The ``known_best_value`` / ``known_best_points`` constants were produced
by ``benchmarks/derive_optima.py`` (dense grid followed by local
refinement) and are re-checked by the test-suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import InvalidArgument, NotFound


@dataclass(frozen=True)
class TestFunction:
    name: str
    dim: int
    bounds: tuple[tuple[float, float], ...]
    fn: Callable[[np.ndarray], float]
    known_best_value: float
    known_best_points: tuple[tuple[float, ...], ...]

    __test__ = False  # keep pytest from collecting this class

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    def to_natural(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.lower + u * (self.upper - self.lower)

    def to_unit(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return (z - self.lower) / (self.upper - self.lower)

    def __call__(self, z) -> float:
        """Minimisation-form value at a natural-domain point."""
        return float(self.fn(np.asarray(z, dtype=float)))

    def unit_objective(self, u) -> float:
        """Negated value at a unit-box point (the quantity the BO loop maximises)."""
        return -self(self.to_natural(u))


def my_fun(z):
    # minimisation form of the maximised example -sum(x^2 sin(2x))
    return float(np.sum(z * z * np.sin(2.0 * z)))


def branin(z):
    x1, x2 = z[0], z[1]
    b = 5.1 / (4.0 * math.pi**2)
    c = 5.0 / math.pi
    t = 1.0 / (8.0 * math.pi)
    return (x2 - b * x1 * x1 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * math.cos(x1) + 10.0


def goldstein_price(z):
    x1, x2 = z[0], z[1]
    a = 1.0 + (x1 + x2 + 1.0) ** 2 * (
        19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2
    )
    b = 30.0 + (2.0 * x1 - 3.0 * x2) ** 2 * (
        18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2
    )
    return a * b


_H_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_H3_A = np.array([[3.0, 10.0, 30.0], [0.1, 10.0, 35.0], [3.0, 10.0, 30.0], [0.1, 10.0, 35.0]])
_H3_P = 1e-4 * np.array(
    [[3689, 1170, 2673], [4699, 4387, 7470], [1091, 8732, 5547], [381, 5743, 8828]]
)
_H6_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ]
)
_H6_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ]
)


def _hartmann(z, A, P):
    inner = np.sum(A * (z[None, :] - P) ** 2, axis=1)
    return float(-np.sum(_H_ALPHA * np.exp(-inner)))


def hartmann3(z):
    return _hartmann(z, _H3_A, _H3_P)


def hartmann6(z):
    return _hartmann(z, _H6_A, _H6_P)


def sphere(z):
    return float(np.sum(z * z))


_FUNCTIONS = [
    TestFunction("my_fun", 2, ((0.0, 1.0), (0.0, 1.0)), my_fun, 0.0, ((0.0, 0.0),)),
    TestFunction(
        "branin",
        2,
        ((-5.0, 10.0), (0.0, 15.0)),
        branin,
        0.39788735772973816,
        ((-math.pi, 12.275), (math.pi, 2.275), (3.0 * math.pi, 2.475)),
    ),
    TestFunction(
        "goldstein_price", 2, ((-2.0, 2.0), (-2.0, 2.0)), goldstein_price, 3.0, ((0.0, -1.0),)
    ),
    TestFunction(
        "hartmann3",
        3,
        ((0.0, 1.0),) * 3,
        hartmann3,
        -3.862779787332663,
        ((0.1145888585, 0.5556488952, 0.8525469841),),
    ),
    TestFunction(
        "hartmann6",
        6,
        ((0.0, 1.0),) * 6,
        hartmann6,
        -3.322368011415515,
        ((0.2016895111, 0.1500106878, 0.4768739726, 0.2753324311, 0.3116516161, 0.6573005328),),
    ),
    TestFunction("sphere", 2, ((-5.12, 5.12), (-5.12, 5.12)), sphere, 0.0, ((0.0, 0.0),)),
]

REGISTRY: dict[str, TestFunction] = {f.name: f for f in _FUNCTIONS}


def get_function(name: str) -> TestFunction:
    try:
        return REGISTRY[name]
    except KeyError:
        raise NotFound(f"unknown test function {name!r}; registered: {', '.join(REGISTRY)}") from None


def eval_test_function(name: str, x_unit) -> float:
    f = get_function(name)
    x_unit = np.asarray(x_unit, dtype=float).reshape(-1)
    if x_unit.shape[0] != f.dim:
        raise InvalidArgument(f"{name} takes {f.dim} inputs, got {x_unit.shape[0]}")
    return f.unit_objective(x_unit)
