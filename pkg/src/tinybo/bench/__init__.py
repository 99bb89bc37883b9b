"""Benchmark harness: test-function registry, replicated runs, box-plot summaries."""

from .functions import REGISTRY, TestFunction, eval_test_function, get_function
from .runner import BenchRecord, records_to_csv, run_benchmark, summary_dict
from .stats import SummaryStats, summarize

__all__ = [
    "REGISTRY",
    "BenchRecord",
    "SummaryStats",
    "TestFunction",
    "eval_test_function",
    "get_function",
    "records_to_csv",
    "run_benchmark",
    "summarize",
    "summary_dict",
]
