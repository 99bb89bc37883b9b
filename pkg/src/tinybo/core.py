"""Shared value types: objectives, samples, datasets, RNG streams, the unit box."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np


class TinyBOError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(TinyBOError, ValueError):
    pass


class InvalidState(TinyBOError, RuntimeError):
    pass


class NumericalFailure(TinyBOError, ArithmeticError):
    pass


class NotFound(TinyBOError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ObjectiveError(TinyBOError, RuntimeError):
    """The user objective raised while being evaluated at ``x``."""

    def __init__(self, x, cause: BaseException):
        self.x = np.array(x, dtype=float)
        self.cause = cause
        super().__init__(f"objective failed at x={self.x.tolist()}: {cause!r}")


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

_U64 = (1 << 64) - 1

# Keys used to derive named sub-streams; fixed so runs stay reproducible
# across versions.
STREAM_INIT = 1
STREAM_ASK = 2
STREAM_HYPER = 3
STREAM_CHAIN = 4
STREAM_RESTART = 5


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by ``(master_seed, stream_id)``.

    ``path`` addresses nested sub-streams; :meth:`child` extends it.  The
    sequence is built from :class:`numpy.random.SeedSequence`, so distinct
    ids or paths give statistically independent generators.
    """

    master_seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.stream_id < 0:
            raise InvalidArgument(f"stream_id must be non-negative, got {self.stream_id}")
        if any(k < 0 for k in self.path):
            raise InvalidArgument(f"sub-stream keys must be non-negative, got {self.path}")

    def child(self, *keys: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_id, self.path + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            self.master_seed & _U64, spawn_key=(self.stream_id,) + self.path
        )
        return np.random.Generator(np.random.PCG64(seq))


# ---------------------------------------------------------------------------
# objective, samples, datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObjectiveSpec:
    """A black-box objective over the unit box ``[0, 1]**dim_in``.

    ``evaluator`` maps a ``dim_in`` vector to a ``dim_out`` vector (a bare
    float is accepted when ``dim_out == 1``).  Larger is better.
    """

    dim_in: int
    dim_out: int
    evaluator: Callable[[np.ndarray], object]

    def __post_init__(self):
        if int(self.dim_in) < 1 or int(self.dim_out) < 1:
            raise InvalidArgument(
                f"dim_in and dim_out must be >= 1, got {self.dim_in}, {self.dim_out}"
            )

    def __call__(self, x) -> np.ndarray:
        y = np.atleast_1d(np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float))
        if y.shape != (self.dim_out,):
            raise InvalidArgument(
                f"evaluator returned shape {y.shape}, expected ({self.dim_out},)"
            )
        return y


@dataclass(frozen=True, eq=False)
class Sample:
    x: np.ndarray
    y: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class Dataset:
    """Ordered, append-only collection of evaluated samples.

    Instances are immutable: :meth:`append` returns a new dataset that
    shares nothing mutable with the old one.
    """

    __slots__ = ("_X", "_Y")

    def __init__(self, X=None, Y=None, *, dim_in: int | None = None, dim_out: int = 1):
        if X is None:
            if dim_in is None:
                raise InvalidArgument("an empty Dataset needs dim_in")
            X = np.empty((0, dim_in))
            Y = np.empty((0, dim_out))
        X = np.array(X, dtype=float, ndmin=2)
        Y = np.array(Y, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        if X.shape[0] != Y.shape[0]:
            raise InvalidArgument(f"{X.shape[0]} inputs but {Y.shape[0]} outputs")
        if X.shape[1] < 1 or Y.shape[1] < 1:
            raise InvalidArgument("dim_in and dim_out must be >= 1")
        if X.size and (np.any(X < 0.0) or np.any(X > 1.0)):
            raise InvalidArgument("sample inputs must lie in the unit box")
        self._X = _frozen(X)
        self._Y = _frozen(Y)

    @property
    def X(self) -> np.ndarray:
        return self._X

    @property
    def Y(self) -> np.ndarray:
        return self._Y

    @property
    def y(self) -> np.ndarray:
        """First output column, the scalar objective."""
        return self._Y[:, 0]

    @property
    def dim_in(self) -> int:
        return self._X.shape[1]

    @property
    def dim_out(self) -> int:
        return self._Y.shape[1]

    @property
    def samples(self) -> list[Sample]:
        return list(self)

    def __len__(self) -> int:
        return self._X.shape[0]

    def __iter__(self) -> Iterator[Sample]:
        for x, y in zip(self._X, self._Y):
            yield Sample(x.copy(), y.copy())

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self._X, other._X) and np.array_equal(self._Y, other._Y)

    def __repr__(self) -> str:
        return f"Dataset(n={len(self)}, dim_in={self.dim_in}, dim_out={self.dim_out})"

    def append(self, x, y) -> "Dataset":
        x = np.asarray(x, dtype=float).reshape(-1)
        y = np.atleast_1d(np.asarray(y, dtype=float)).reshape(-1)
        if x.shape[0] != self.dim_in or y.shape[0] != self.dim_out:
            raise InvalidArgument(
                f"sample shapes ({x.shape[0]}, {y.shape[0]}) do not match "
                f"dataset ({self.dim_in}, {self.dim_out})"
            )
        return Dataset(np.vstack([self._X, x]), np.vstack([self._Y, y]))

    @classmethod
    def from_samples(cls, samples: Sequence[Sample]) -> "Dataset":
        if not samples:
            raise InvalidArgument("from_samples needs at least one sample")
        return cls([s.x for s in samples], [np.atleast_1d(s.y) for s in samples])


# ---------------------------------------------------------------------------
# unit box helpers
# ---------------------------------------------------------------------------


def clamp_to_box(x) -> np.ndarray:
    return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)


def in_box(x) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all((x >= 0.0) & (x <= 1.0)))


def _uniform(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    return rng.random((n, d))


def _latin(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    # one point per stratum along every axis, strata shuffled independently
    u = rng.random((n, d))
    pts = np.empty((n, d))
    for j in range(d):
        pts[:, j] = (rng.permutation(n) + u[:, j]) / n
    return pts


INIT_STRATEGIES: dict[str, Callable[[np.random.Generator, int, int], np.ndarray]] = {
    "uniform": _uniform,
    "latin": _latin,
}


def latin_or_uniform_init(
    spec: ObjectiveSpec | int, n: int, rng: RngStream, strategy: str = "uniform"
) -> list[np.ndarray]:
    """Draw ``n`` initial design points in the unit box.

    ``spec`` may be an :class:`ObjectiveSpec` or just the input dimension.
    ``strategy`` is ``"uniform"`` (default) or ``"latin"`` (Latin
    hypercube); further strategies can be registered in
    :data:`INIT_STRATEGIES`.
    """
    d = spec.dim_in if isinstance(spec, ObjectiveSpec) else int(spec)
    if n < 1:
        raise InvalidArgument(f"need at least one initial point, got n={n}")
    try:
        draw = INIT_STRATEGIES[strategy]
    except KeyError:
        raise InvalidArgument(
            f"unknown init strategy {strategy!r}; known: {sorted(INIT_STRATEGIES)}"
        ) from None
    pts = clamp_to_box(draw(rng.generator(), n, d))
    return [p for p in pts]
