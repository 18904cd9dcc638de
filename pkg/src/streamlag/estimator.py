"""scikit-learn compatible wrapper around the latency metrics."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .metrics import SentenceLatency, UtteranceTrace, score_trace
from .report import ALL_METRICS, DEFAULT_THRESHOLDS, aggregate, check_thresholds

FEATURE_NAMES = ("al", "laal", "cutoff_index", "length_diff")


def check_traces(X) -> list[UtteranceTrace]:
    """Validate that ``X`` is a non-empty sequence of :class:`UtteranceTrace`."""
    if isinstance(X, UtteranceTrace):
        raise TypeError("expected a sequence of traces, got a single trace")
    traces = list(X)
    if not traces:
        raise ValueError("found an empty corpus; at least one trace is required")
    for i, t in enumerate(traces):
        if not isinstance(t, UtteranceTrace):
            raise TypeError(f"element {i} is {type(t).__name__}, expected UtteranceTrace")
    return traces


class LatencyScorer(TransformerMixin, BaseEstimator):
    """Scores a corpus of decoding traces.

    ``fit`` computes the corpus report (``report_``), ``transform`` returns
    one row per trace with columns :data:`FEATURE_NAMES` (NaN where the
    metric is undefined) and ``score`` returns the negated corpus latency so
    that higher is better, as scikit-learn expects.

    Parameters
    ----------
    thresholds : sequence of float
        Regime boundaries in ms, strictly increasing.
    clip_oracle : bool
        Hold the reference-paced oracle at the last reference word.
    metric : {"laal", "al"}
        Latency used by ``score``.
    """

    def __init__(self, thresholds=DEFAULT_THRESHOLDS, clip_oracle=False, metric="laal"):
        self.thresholds = thresholds
        self.clip_oracle = clip_oracle
        self.metric = metric

    def fit(self, X, y=None):
        traces = check_traces(X)
        check_thresholds(self.thresholds)
        if self.metric not in ("al", "laal"):
            raise ValueError(f"metric must be 'al' or 'laal', got {self.metric!r}")
        results = [score_trace(t, clip_oracle=self.clip_oracle) for t in traces]
        self.report_ = aggregate(results, self.thresholds, metrics=ALL_METRICS)
        self.n_traces_ = len(traces)
        return self

    def _check_fitted(self):
        if not hasattr(self, "report_"):
            raise NotFittedError(f"This {type(self).__name__} instance is not fitted yet.")

    def transform(self, X):
        self._check_fitted()
        traces = check_traces(X)
        out = np.full((len(traces), len(FEATURE_NAMES)), np.nan)
        for row, trace in zip(out, traces):
            r = score_trace(trace, clip_oracle=self.clip_oracle)
            if isinstance(r, SentenceLatency):
                row[:] = (r.al, r.laal, r.cutoff_index, r.length_diff)
            else:
                row[3] = r.length_diff
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)

    def score(self, X, y=None):
        report = LatencyScorer(**self.get_params()).fit(X).report_
        return -(report.corpus_laal if self.metric == "laal" else report.corpus_al)
