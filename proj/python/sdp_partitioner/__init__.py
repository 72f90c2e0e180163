"""Streaming dynamic graph partitioner: engine, runs and metrics."""

from ._core import (
    Dataset,
    Decision,
    Engine,
    __version__,
    balance_snapshot,
    compare,
    decode_frame,
    load_dataset,
    run,
    synthetic,
)

__all__ = [
    "Dataset",
    "Decision",
    "Engine",
    "__version__",
    "balance_snapshot",
    "compare",
    "decode_frame",
    "load_dataset",
    "run",
    "synthetic",
]
