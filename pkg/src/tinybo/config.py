"""Static run configuration and its plain-text ``section.key = value`` form.

Values are layered: dataclass defaults, then a config file, then explicit
overrides (e.g. from CLI flags), each layer replacing only the keys it sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from .acquisition import AcquiConfig
from .core import INIT_STRATEGIES, InvalidArgument
from .gp import HyperOptConfig, KernelConfig, MeanConfig, canonical_kernel_kind
from .inner_opt import Chain, LocalSearch, ParallelRestarts, RandomSearch


@dataclass(frozen=True)
class InnerConfig:
    """Flat description of the default restarts(chain(random, local)) optimizer."""

    candidates_per_dim: int = 1000
    local_steps: int = 100
    init_step: float = 0.1
    shrink: float = 0.5
    restarts: int = 4

    def build(self, d: int) -> ParallelRestarts:
        stages = (
            RandomSearch(self.candidates_per_dim * d),
            LocalSearch(self.local_steps, self.init_step, self.shrink),
        )
        return ParallelRestarts(Chain(stages), self.restarts)


@dataclass(frozen=True)
class ParamsConfig:
    """Everything a BO run needs besides the objective and the seed.

    ``noise`` is an observation-noise *variance*; it overrides
    ``kernel.noise_variance`` when the run starts.  ``inner`` is either an
    :class:`InnerConfig` or any optimizer spec from :mod:`tinybo.inner_opt`.
    """

    noise: float = 0.001
    init_samples: int = 10
    max_evaluations: int = 50
    hp_opt_enabled: bool = False
    hp_opt_period: int = 1
    init_strategy: str = "uniform"
    kernel: KernelConfig = field(default_factory=KernelConfig)
    mean: MeanConfig = field(default_factory=MeanConfig)
    acqui: AcquiConfig = field(default_factory=AcquiConfig)
    inner: Any = field(default_factory=InnerConfig)
    hyper: HyperOptConfig = field(default_factory=HyperOptConfig)

    def __post_init__(self):
        if not self.noise >= 0:
            raise InvalidArgument(f"noise must be >= 0, got {self.noise}")
        if self.init_samples < 1:
            raise InvalidArgument(f"init_samples must be >= 1, got {self.init_samples}")
        if self.max_evaluations < self.init_samples:
            raise InvalidArgument(
                f"max_evaluations ({self.max_evaluations}) < init_samples ({self.init_samples})"
            )
        if self.hp_opt_period < 1:
            raise InvalidArgument(f"hp_opt_period must be >= 1, got {self.hp_opt_period}")
        if self.init_strategy not in INIT_STRATEGIES:
            raise InvalidArgument(f"unknown init strategy {self.init_strategy!r}")

    def inner_spec(self, d: int):
        return self.inner.build(d) if isinstance(self.inner, InnerConfig) else self.inner

    def run_kernel(self) -> KernelConfig:
        """Starting kernel with the run's noise variance filled in."""
        return replace(self.kernel, noise_variance=self.noise)


# ---------------------------------------------------------------------------
# key/value file format
# ---------------------------------------------------------------------------


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_floats(s: str) -> tuple[float, ...]:
    return tuple(float(t) for t in s.split(",") if t.strip())


def _fmt_floats(v: Iterable[float]) -> str:
    return ",".join(repr(float(t)) for t in v)


# Setters and getters work on a plain dict of ParamsConfig fields so that
# cross-field validation runs only once all overrides are in.
Fields = dict


def _top(name: str):
    def setter(f: Fields, v):
        f[name] = v

    return setter, (lambda f: f[name])


def _sub(part: str, name: str):
    def setter(f: Fields, v):
        f[part] = replace(f[part], **{name: v})

    return setter, (lambda f: getattr(f[part], name))


def _inner(name: str):
    def current(f: Fields) -> InnerConfig:
        return f["inner"] if isinstance(f["inner"], InnerConfig) else InnerConfig()

    def setter(f: Fields, v):
        f["inner"] = replace(current(f), **{name: v})

    return setter, (lambda f: getattr(current(f), name))


def _set_lengthscale(f: Fields, v):
    if any(t <= 0 for t in v):
        raise ValueError("lengthscales must be positive")
    f["kernel"] = replace(f["kernel"], log_lengthscale=tuple(math.log(t) for t in v))


def _set_signal_variance(f: Fields, v):
    if v <= 0:
        raise ValueError("signal_variance must be positive")
    f["kernel"] = replace(f["kernel"], log_signal_variance=math.log(v))


# key -> (parse, format, setter, getter)
KEYS: dict[str, tuple[Callable, Callable, Callable, Callable]] = {}


def _register(key, parse, fmt, accessors):
    KEYS[key] = (parse, fmt, *accessors)


def _fmt_bool(v: bool) -> str:
    return "true" if v else "false"


_register("bo.noise", float, repr, _top("noise"))
_register("bo.init_samples", int, str, _top("init_samples"))
_register("bo.max_evaluations", int, str, _top("max_evaluations"))
_register("bo.hp_opt_enabled", _parse_bool, _fmt_bool, _top("hp_opt_enabled"))
_register("bo.hp_opt_period", int, str, _top("hp_opt_period"))
_register("bo.init_strategy", str.strip, str, _top("init_strategy"))
_register("kernel.kind", canonical_kernel_kind, str, _sub("kernel", "kind"))
_register(
    "kernel.lengthscale",
    _parse_floats,
    _fmt_floats,
    (_set_lengthscale, lambda f: tuple(f["kernel"].lengthscale.tolist())),
)
_register(
    "kernel.signal_variance",
    float,
    repr,
    (_set_signal_variance, lambda f: f["kernel"].signal_variance),
)
_register("mean.kind", str.strip, str, _sub("mean", "kind"))
_register("mean.constant", float, repr, _sub("mean", "constant"))
_register("acqui.kind", str.strip, str, _sub("acqui", "kind"))
_register("acqui.kappa", float, repr, _sub("acqui", "kappa"))
_register("acqui.delta", float, repr, _sub("acqui", "delta"))
_register("acqui.xi", float, repr, _sub("acqui", "xi"))
_register("inner.candidates_per_dim", int, str, _inner("candidates_per_dim"))
_register("inner.local_steps", int, str, _inner("local_steps"))
_register("inner.init_step", float, repr, _inner("init_step"))
_register("inner.shrink", float, repr, _inner("shrink"))
_register("inner.restarts", int, str, _inner("restarts"))
_register("hp_opt.restarts", int, str, _sub("hyper", "restarts"))
_register("hp_opt.iterations", int, str, _sub("hyper", "iterations"))


def _fields(cfg: ParamsConfig) -> Fields:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


def parse_config_text(text: str, source: str = "<string>") -> dict[str, str]:
    """Split ``section.key = value`` lines into a raw mapping.

    Blank lines and ``#`` comments are ignored; later lines win.
    """
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise InvalidArgument(f"{source}:{lineno}: expected 'section.key = value', got {raw!r}")
        if key not in KEYS:
            raise InvalidArgument(f"{source}:{lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def apply_overrides(cfg: ParamsConfig, overrides: Mapping[str, Any]) -> ParamsConfig:
    """Return ``cfg`` with the given keys replaced.

    Values may be strings (parsed like the config file) or already typed.
    Cross-field validation runs once, after every key is applied.
    """
    fields = _fields(cfg)
    for key, value in overrides.items():
        if key not in KEYS:
            raise InvalidArgument(f"unknown config key {key!r}; known: {sorted(KEYS)}")
        parse, _fmt, setter, _getter = KEYS[key]
        try:
            setter(fields, parse(value) if isinstance(value, str) else value)
        except (ValueError, TypeError) as exc:
            raise InvalidArgument(f"bad value for {key}: {exc}") from None
    return ParamsConfig(**fields)


def load_config(path: str | Path, base: ParamsConfig | None = None) -> ParamsConfig:
    path = Path(path)
    raw = parse_config_text(path.read_text(), str(path))
    return apply_overrides(base or ParamsConfig(), raw)


def format_config(cfg: ParamsConfig) -> str:
    """Serialise every key; ``parse_config_text`` + ``apply_overrides`` invert it."""
    fields = _fields(cfg)
    lines = [f"{key} = {fmt(getter(fields))}" for key, (_p, fmt, _s, getter) in KEYS.items()]
    return "\n".join(lines) + "\n"
