"""Replicated benchmark runs, CSV records and JSON summaries."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .. import _accel
from ..bo import optimize
from ..config import ParamsConfig, format_config
from ..core import InvalidArgument, RngStream
from ..gp import KernelConfig
from .functions import get_function
from .stats import summarize

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "function",
    "replicate",
    "seed",
    "hp_opt",
    "best_value",
    "gap",
    "wall_time_ms",
    "evaluations",
    "status",
)

HP_SETTINGS = {"on": (True,), "off": (False,), "both": (False, True)}

CI_REPLICATES = 25
FULL_REPLICATES = 250


def default_bench_params() -> ParamsConfig:
    """Bench defaults: 10 initial samples + 190 iterations.

    The kernel starts at lengthscale 0.2 / signal variance 100, a scale
    suited to the registry's unit-box objectives; with hyperparameter
    learning off it stays there.
    """
    return ParamsConfig(
        init_samples=10,
        max_evaluations=200,
        kernel=KernelConfig.from_natural("squared_exponential", 0.2, 100.0),
    )


@dataclass(frozen=True)
class BenchRecord:
    function: str
    replicate: int
    seed: int
    hp_opt: bool
    best_value: float
    gap: float
    wall_time_ms: float
    evaluations: int
    status: str = "ok"
    iteration_ms: tuple = field(default=(), repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def sort_key(self):
        return (self.function, self.hp_opt, self.replicate)


def run_replicate(
    name: str, replicate: int, seed: int, hp_opt: bool, params: ParamsConfig, timing: bool = True
) -> BenchRecord:
    """One BO run on a registered function; failures become a record, not an exception."""
    f = get_function(name)
    params = replace(params, hp_opt_enabled=hp_opt)
    t0 = time.perf_counter()
    try:
        res = optimize(f.unit_objective, params, RngStream(seed, replicate), dim=f.dim)
    except Exception as exc:  # one broken replicate must not sink the run
        log.warning("%s replicate %d (hp_opt=%s) failed: %r", name, replicate, hp_opt, exc)
        msg = " ".join(f"error: {type(exc).__name__}: {exc}".split())
        return BenchRecord(name, replicate, seed, hp_opt, math.nan, math.nan, 0.0, 0, msg)
    elapsed_ms = (time.perf_counter() - t0) * 1e3
    best_value = -res.best_observed_y
    iteration_ms = tuple(1e3 * h.wall_time for h in res.history)
    if not timing:
        elapsed_ms, iteration_ms = 0.0, tuple(0.0 for _ in iteration_ms)
    return BenchRecord(
        function=name,
        replicate=replicate,
        seed=seed,
        hp_opt=hp_opt,
        best_value=best_value,
        gap=abs(f.known_best_value - best_value),
        wall_time_ms=elapsed_ms,
        evaluations=res.total_evaluations,
        iteration_ms=iteration_ms,
    )


def _run_task(args):
    return run_replicate(*args)


def run_benchmark(
    functions: Sequence[str],
    replicates: int,
    hp_opt: str = "both",
    params: ParamsConfig | None = None,
    master_seed: int = 42,
    parallelism: int = 1,
    timing: bool = True,
) -> list[BenchRecord]:
    """All (function, hp setting, replicate) runs, sorted canonically.

    Replicate ``i`` uses stream ``i`` of ``master_seed`` for both hp
    settings.  ``parallelism > 1`` spreads replicates over processes; the
    returned list does not depend on it.
    """
    if replicates < 1:
        raise InvalidArgument(f"replicates must be >= 1, got {replicates}")
    if hp_opt not in HP_SETTINGS:
        raise InvalidArgument(f"hp_opt must be one of {sorted(HP_SETTINGS)}, got {hp_opt!r}")
    if parallelism < 1:
        raise InvalidArgument(f"parallelism must be >= 1, got {parallelism}")
    for name in functions:
        get_function(name)
    params = params or default_bench_params()
    tasks = [
        (name, i, master_seed, hp, params, timing)
        for name in functions
        for hp in HP_SETTINGS[hp_opt]
        for i in range(replicates)
    ]
    if parallelism == 1 or len(tasks) == 1:
        records = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(_run_task, tasks))
    return sorted(records, key=lambda r: r.sort_key)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt_float(v: float) -> str:
    return "nan" if math.isnan(v) else repr(float(v))


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(
            [
                r.function,
                r.replicate,
                r.seed,
                "on" if r.hp_opt else "off",
                _fmt_float(r.best_value),
                _fmt_float(r.gap),
                _fmt_float(r.wall_time_ms),
                r.evaluations,
                r.status,
            ]
        )
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows


def summary_dict(records: Sequence[BenchRecord], meta: dict | None = None) -> dict:
    """Box-plot statistics per (function, hp setting) for gap and timings.

    ``iteration_wall_time_ms`` pools the per-iteration wall times of every
    successful replicate in the group.
    """
    groups = []
    keys = sorted({(r.function, r.hp_opt) for r in records})
    for name, hp in keys:
        rows = [r for r in records if r.function == name and r.hp_opt == hp]
        ok = [r for r in rows if r.ok]
        entry = {"function": name, "hp_opt": "on" if hp else "off", "n": len(ok), "failed": len(rows) - len(ok)}
        if ok:
            iters = [t for r in ok for t in r.iteration_ms]
            entry["gap"] = summarize(r.gap for r in ok).to_dict()
            entry["wall_time_ms"] = summarize(r.wall_time_ms for r in ok).to_dict()
            if iters:
                entry["iteration_wall_time_ms"] = summarize(iters).to_dict()
                entry["mean_iteration_wall_time_ms"] = float(np.mean(iters))
        groups.append(entry)
    return {"meta": meta or {}, "groups": groups}


def summary_json(records: Sequence[BenchRecord], meta: dict | None = None) -> str:
    return json.dumps(summary_dict(records, meta), indent=2, sort_keys=False) + "\n"


def run_meta(params: ParamsConfig, **extra) -> dict:
    return {"backend": _accel.backend(), "config": format_config(params).splitlines(), **extra}
