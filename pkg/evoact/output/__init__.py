"""Result files and text reports."""

from evoact.output.files import (
    provenance,
    provenance_header,
    read_csv,
    write_atomic,
    write_csv,
    write_history,
    write_text,
)
from evoact.output.report import ReportRenderer
from evoact.output.tables import (
    CURVE_COLUMNS,
    TRAJECTORY_COLUMNS,
    benchmark_frame,
    curves_frame,
    rerank_frame,
    summaries_frame,
    trajectory_frame,
)

__all__ = [
    "CURVE_COLUMNS",
    "ReportRenderer",
    "TRAJECTORY_COLUMNS",
    "benchmark_frame",
    "curves_frame",
    "provenance",
    "provenance_header",
    "read_csv",
    "rerank_frame",
    "summaries_frame",
    "trajectory_frame",
    "write_atomic",
    "write_csv",
    "write_history",
    "write_text",
]
