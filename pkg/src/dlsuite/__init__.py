"""Duckworth-Lewis par scores, chase-outcome prediction and table tooling."""

from .data import (
    Dataset,
    MatchRecord,
    OverSnapshot,
    ParseError,
    ValidationError,
    Winner,
    load_dataset,
    parse_matches,
    parse_snapshots,
    write_matches,
    write_snapshots,
)
from .dls import (
    AccuracyReport,
    OverFilter,
    ResourceTable,
    WinnerPrediction,
    default_table,
    evaluate,
    load_table,
    par_score,
    predict_winner,
    resource_value,
    save_table,
)

__all__ = [
    "AccuracyReport",
    "Dataset",
    "MatchRecord",
    "OverFilter",
    "OverSnapshot",
    "ParseError",
    "ResourceTable",
    "ValidationError",
    "Winner",
    "WinnerPrediction",
    "default_table",
    "evaluate",
    "load_dataset",
    "load_table",
    "par_score",
    "parse_matches",
    "parse_snapshots",
    "predict_winner",
    "resource_value",
    "save_table",
    "write_matches",
    "write_snapshots",
]

__version__ = "0.1.0"
