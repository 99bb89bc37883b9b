"""The Bayesian-optimisation driver: an ask/tell state machine and ``optimize``.

The state is a frozen value; :func:`tell` returns a new state and
:func:`ask` never mutates anything.  All randomness is derived from the
state's :class:`~tinybo.core.RngStream` and the current dataset size, so a
run is fully determined by its configuration and master seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .acquisition import make_acquisition
from .config import ParamsConfig
from .core import (
    STREAM_ASK,
    STREAM_HYPER,
    STREAM_INIT,
    Dataset,
    InvalidArgument,
    InvalidState,
    ObjectiveError,
    ObjectiveSpec,
    RngStream,
    in_box,
    latin_or_uniform_init,
)
from .gp import GpModel, KernelConfig, gp_fit, optimize_hyperparams
from .inner_opt import inner_maximize

INITIALIZING = "initializing"
OPTIMIZING = "optimizing"
FINISHED = "finished"


@dataclass(frozen=True)
class BoState:
    """Snapshot of a run.

    ``kernel`` holds the current hyperparameters (updated by refits when
    hyperparameter learning is enabled); ``init_points`` is the initial
    design, fixed when the state is created.
    """

    dataset: Dataset
    model: Optional[GpModel]
    kernel: KernelConfig
    config: ParamsConfig
    rng: RngStream
    init_points: tuple[tuple[float, ...], ...]

    @property
    def dim(self) -> int:
        return self.dataset.dim_in

    @property
    def n(self) -> int:
        return len(self.dataset)

    @property
    def iteration_t(self) -> int:
        """Observations made beyond the initial design."""
        return max(0, self.n - self.config.init_samples)

    @property
    def phase(self) -> str:
        if self.n >= self.config.max_evaluations:
            return FINISHED
        if self.n < self.config.init_samples:
            return INITIALIZING
        return OPTIMIZING

    @property
    def best_index(self) -> int:
        if self.n == 0:
            raise InvalidState("no observations yet")
        return int(np.argmax(self.dataset.y))


def initial_state(
    spec: ObjectiveSpec | int, config: ParamsConfig = ParamsConfig(), rng: RngStream = RngStream(0)
) -> BoState:
    d = spec.dim_in if isinstance(spec, ObjectiveSpec) else int(spec)
    dim_out = spec.dim_out if isinstance(spec, ObjectiveSpec) else 1
    kernel = config.run_kernel()
    if kernel.ard:
        kernel = kernel.with_ard(d)
    kernel.inv_lengthscale(d)  # validates the lengthscale count
    pts = latin_or_uniform_init(d, config.init_samples, rng.child(STREAM_INIT), config.init_strategy)
    return BoState(
        dataset=Dataset(dim_in=d, dim_out=dim_out),
        model=None,
        kernel=kernel,
        config=config,
        rng=rng,
        init_points=tuple(tuple(float(v) for v in p) for p in pts),
    )


def ask(state: BoState, workers: int = 1) -> np.ndarray:
    """Next point to evaluate.

    During the initial design this is the next design point; afterwards
    it is the acquisition maximiser on the current model.
    """
    phase = state.phase
    if phase == FINISHED:
        raise InvalidState("the evaluation budget is exhausted")
    if phase == INITIALIZING:
        return np.array(state.init_points[state.n])
    model = state.model
    acq = make_acquisition(model, state.config.acqui, state.iteration_t + 1)
    res = inner_maximize(
        state.config.inner_spec(state.dim),
        acq,
        state.dim,
        state.rng.child(STREAM_ASK, state.n),
        vectorized=True,
        workers=workers,
    )
    return res.x_best


def tell(state: BoState, x, y) -> BoState:
    """Record the observation ``y`` at ``x`` and refit the model."""
    if state.phase == FINISHED:
        raise InvalidState("the evaluation budget is exhausted")
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.atleast_1d(np.asarray(y, dtype=float)).reshape(-1)
    if x.shape[0] != state.dim:
        raise InvalidArgument(f"x has {x.shape[0]} coordinates, expected {state.dim}")
    if not in_box(x):
        raise InvalidArgument(f"x={x.tolist()} lies outside the unit box")
    if y.shape[0] != state.dataset.dim_out:
        raise InvalidArgument(f"y has {y.shape[0]} entries, expected {state.dataset.dim_out}")
    if not np.all(np.isfinite(y)):
        raise InvalidArgument(f"observation must be finite, got {y.tolist()}")

    dataset = state.dataset.append(x, y)
    cfg = state.config
    n = len(dataset)
    kernel, model = state.kernel, None
    if n >= cfg.init_samples:
        t = n - cfg.init_samples
        if cfg.hp_opt_enabled and n >= 2 and t % cfg.hp_opt_period == 0:
            kernel = optimize_hyperparams(
                dataset, kernel, cfg.mean, state.rng.child(STREAM_HYPER, n), cfg.hyper
            )
        model = gp_fit(dataset, kernel, cfg.mean)
    return BoState(dataset, model, kernel, cfg, state.rng, state.init_points)


class HistoryEntry(NamedTuple):
    x: np.ndarray
    y: float
    wall_time: float  # seconds spent on ask + evaluate + tell


@dataclass(frozen=True)
class BoResult:
    best_x: np.ndarray
    best_observed_y: float
    history: list = field(repr=False)
    total_evaluations: int
    state: BoState = field(repr=False)

    @property
    def iteration_times(self) -> np.ndarray:
        return np.array([h.wall_time for h in self.history])


def optimize(
    objective: ObjectiveSpec | Callable,
    config: ParamsConfig = ParamsConfig(),
    rng: RngStream = RngStream(0),
    *,
    dim: int | None = None,
    workers: int = 1,
    callback: Callable[[BoState], None] | None = None,
) -> BoResult:
    """Maximise ``objective`` over the unit box within ``config.max_evaluations``.

    ``objective`` is an :class:`ObjectiveSpec` or a plain callable together
    with ``dim``.  Exceptions from the objective are re-raised as
    :class:`ObjectiveError` carrying the offending point.
    """
    if not isinstance(objective, ObjectiveSpec):
        if dim is None:
            raise InvalidArgument("pass dim= when the objective is a bare callable")
        objective = ObjectiveSpec(dim, 1, objective)
    if objective.dim_out != 1:
        raise InvalidArgument(f"optimize needs a scalar objective, got dim_out={objective.dim_out}")

    state = initial_state(objective, config, rng)
    history = []
    while state.phase != FINISHED:
        t0 = time.perf_counter()
        x = ask(state, workers)
        try:
            y = objective(x)
        except Exception as exc:
            raise ObjectiveError(x, exc) from exc
        if not math.isfinite(float(y[0])):
            raise ObjectiveError(x, ValueError(f"non-finite objective value {y[0]}"))
        state = tell(state, x, y)
        history.append(HistoryEntry(x, float(y[0]), time.perf_counter() - t0))
        if callback is not None:
            callback(state)

    i = state.best_index
    return BoResult(
        best_x=np.array(state.dataset.X[i]),
        best_observed_y=float(state.dataset.y[i]),
        history=history,
        total_evaluations=state.n,
        state=state,
    )
