"""Composable derivative-free maximisers over the unit box.

An optimizer spec is a small frozen dataclass with a ``run`` method; specs
nest (``Chain``, ``ParallelRestarts``) so global and local searches can be
combined.  New kinds only need to provide the same ``run`` signature.

Objectives are *batched* internally: ``f(X)`` takes an ``(m, d)`` array and
returns ``m`` values.  :func:`inner_maximize` wraps scalar functions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence, Union

import numpy as np

from .core import STREAM_CHAIN, STREAM_RESTART, InvalidArgument, RngStream, clamp_to_box

BatchObjective = Callable[[np.ndarray], np.ndarray]

MIN_STEP = 1e-6


@dataclass(frozen=True)
class OptResult:
    x_best: np.ndarray
    value_best: float
    evaluations_used: int


class InnerOptimizer(Protocol):
    def run(
        self, f: BatchObjective, d: int, rng: RngStream, start: Optional[np.ndarray], workers: int
    ) -> OptResult: ...


def _best(X: np.ndarray, vals: np.ndarray, evals: int) -> OptResult:
    i = int(np.argmax(vals))
    return OptResult(X[i].copy(), float(vals[i]), evals)


@dataclass(frozen=True)
class RandomSearch:
    n_candidates: int = 1000

    def __post_init__(self):
        if self.n_candidates < 1:
            raise InvalidArgument("random_search needs n_candidates >= 1")

    def run(self, f, d, rng, start=None, workers=1):
        X = rng.generator().random((self.n_candidates, d))
        if start is not None:
            X = np.vstack([start, X])
        return _best(X, np.asarray(f(X), dtype=float), X.shape[0])


@dataclass(frozen=True)
class LocalSearch:
    """Compass pattern search started from ``start`` or the box centre."""

    max_steps: int = 100
    init_step: float = 0.1
    shrink: float = 0.5

    def __post_init__(self):
        if self.max_steps < 1:
            raise InvalidArgument("local_search needs max_steps >= 1")
        if not 0.0 < self.init_step <= 1.0:
            raise InvalidArgument("local_search init_step must lie in (0, 1]")
        if not 0.0 < self.shrink < 1.0:
            raise InvalidArgument("local_search shrink must lie in (0, 1)")

    def run(self, f, d, rng, start=None, workers=1):
        x = np.full(d, 0.5) if start is None else clamp_to_box(start)
        fx = float(f(x[None, :])[0])
        evals = 1
        step = self.init_step
        eye = np.eye(d)
        for _ in range(self.max_steps):
            if step < MIN_STEP:
                break
            probes = clamp_to_box(np.vstack([x + step * eye, x - step * eye]))
            vals = np.asarray(f(probes), dtype=float)
            evals += probes.shape[0]
            j = int(np.argmax(vals))
            if vals[j] > fx:
                x, fx = probes[j], float(vals[j])
            else:
                step *= self.shrink
        return OptResult(x.copy(), fx, evals)


@dataclass(frozen=True)
class Chain:
    """Run stages in order, each starting from the previous stage's best."""

    stages: tuple

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise InvalidArgument("chain needs at least one stage")

    def run(self, f, d, rng, start=None, workers=1):
        best = None
        evals = 0
        for i, stage in enumerate(self.stages):
            # the first stage sees the caller's stream unchanged
            stage_rng = rng if i == 0 else rng.child(STREAM_CHAIN, i)
            res = stage.run(f, d, stage_rng, start, workers)
            evals += res.evaluations_used
            if best is None or res.value_best > best.value_best:
                best = res
            start = res.x_best
        return OptResult(best.x_best, best.value_best, evals)


@dataclass(frozen=True)
class ParallelRestarts:
    """Independent restarts of ``inner``; the best one wins, lowest index on ties."""

    inner: object
    n_restarts: int = 4

    def __post_init__(self):
        if self.n_restarts < 1:
            raise InvalidArgument("parallel_restarts needs n_restarts >= 1")

    def run(self, f, d, rng, start=None, workers=1):
        def one(j):
            return self.inner.run(f, d, rng.child(STREAM_RESTART, j), start, 1)

        if workers > 1 and self.n_restarts > 1:
            with ThreadPoolExecutor(max_workers=min(workers, self.n_restarts)) as pool:
                results = list(pool.map(one, range(self.n_restarts)))
        else:
            results = [one(j) for j in range(self.n_restarts)]
        best = results[0]
        for res in results[1:]:
            if res.value_best > best.value_best:
                best = res
        evals = sum(r.evaluations_used for r in results)
        return OptResult(best.x_best, best.value_best, evals)


InnerOptimizerSpec = Union[RandomSearch, LocalSearch, Chain, ParallelRestarts]


def default_inner_optimizer(d: int) -> ParallelRestarts:
    return ParallelRestarts(Chain((RandomSearch(1000 * d), LocalSearch(100, 0.1, 0.5))), 4)


def _batched(f: Callable[[np.ndarray], float]) -> BatchObjective:
    def fb(X):
        return np.array([float(f(x)) for x in X])

    return fb


def inner_maximize(
    spec,
    f: Callable,
    d: int,
    rng: RngStream,
    start: Optional[Sequence[float]] = None,
    *,
    vectorized: bool = False,
    workers: int = 1,
) -> OptResult:
    """Maximise ``f`` over ``[0, 1]**d`` with the optimizer described by ``spec``.

    ``f`` maps one ``d``-vector to a float unless ``vectorized`` is true, in
    which case it maps an ``(m, d)`` array to ``m`` values.  ``workers > 1``
    runs restart branches on a thread pool; the result does not depend on it.
    """
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    fb = f if vectorized else _batched(f)
    if start is not None:
        start = clamp_to_box(np.asarray(start, dtype=float).reshape(d))
    return spec.run(fb, d, rng, start, workers)
