"""Latency metrics for simultaneous translation: AL, LAAL and AWLD."""

__version__ = "0.1.0"

from .metrics import (
    AlignmentPair,
    InvalidTraceError,
    OracleSchedule,
    SentenceLatency,
    UndefinedLatency,
    UndefinedMetricError,
    UtteranceTrace,
    aligned_lagging,
    cutoff_index,
    oracle_schedule,
    score_trace,
    sentence_al,
    sentence_laal,
    sentence_metrics,
)
from .report import CorpusReport, aggregate, awld, compare, write_report
from .traceio import IngestionReport, parse_traces, read_traces, tokenize
from .synthetic import SynthConfig, gen_waitk_trace, generate_corpus, inject_overgeneration
from .estimator import LatencyScorer

__all__ = [
    "AlignmentPair", "CorpusReport", "IngestionReport", "InvalidTraceError", "LatencyScorer",
    "OracleSchedule", "SentenceLatency", "SynthConfig", "UndefinedLatency", "UndefinedMetricError",
    "UtteranceTrace", "aggregate", "aligned_lagging", "awld", "compare", "cutoff_index",
    "gen_waitk_trace", "generate_corpus", "inject_overgeneration", "oracle_schedule",
    "parse_traces", "read_traces", "score_trace", "sentence_al", "sentence_laal",
    "sentence_metrics", "tokenize", "write_report",
]
