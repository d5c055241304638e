"""Ranking diagnostics: BM25 candidates, TREC metrics, rank provenance, masking."""

from ._core import (
    Bm25Params,
    DataError,
    Error,
    Index,
    IoError,
    analyze,
    average_precision,
    bm25_run_files,
    evaluate_files,
    mask_drop_q,
    mask_files,
    mask_only_q,
    ndcg_at_k,
    provenance_files,
    reciprocal_rank,
)

__all__ = [
    "Bm25Params",
    "DataError",
    "Error",
    "Index",
    "IoError",
    "analyze",
    "average_precision",
    "bm25_run_files",
    "evaluate_files",
    "mask_drop_q",
    "mask_files",
    "mask_only_q",
    "ndcg_at_k",
    "provenance_files",
    "reciprocal_rank",
]

__version__ = "1.0.0"
