"""Box-plot statistics: linear-interpolation quartiles and Tukey whiskers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from ..core import InvalidArgument

WHISKER_FACTOR = 1.5


@dataclass(frozen=True)
class SummaryStats:
    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: list = field(default_factory=list)
    n: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(values: Iterable[float]) -> SummaryStats:
    """Median, quartiles, whiskers and outliers of ``values``.

    Whiskers end at the most extreme observations inside
    ``[q1 - 1.5 IQR, q3 + 1.5 IQR]``; everything outside is an outlier
    (reported in ascending order).
    """
    v = np.sort(np.asarray(list(values), dtype=float))
    if v.size == 0:
        raise InvalidArgument("summarize needs at least one value")
    q1, median, q3 = (float(q) for q in np.quantile(v, [0.25, 0.5, 0.75], method="linear"))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - WHISKER_FACTOR * iqr, q3 + WHISKER_FACTOR * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    outliers = v[(v < lo_fence) | (v > hi_fence)]
    return SummaryStats(
        median=median,
        q1=q1,
        q3=q3,
        whisker_lo=float(inside.min()),
        whisker_hi=float(inside.max()),
        outliers=[float(o) for o in outliers],
        n=int(v.size),
    )
