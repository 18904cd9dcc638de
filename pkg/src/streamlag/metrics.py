"""Sentence-level latency metrics for simultaneous translation.

All delays and durations are in milliseconds of consumed source audio.
Token positions are 1-based in the documentation and 0-based in code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

# Slack for deciding that a delay has reached the end of the source.
END_EPSILON_MS = 1e-6


class InvalidTraceError(ValueError):
    """Raised when a trace violates its structural invariants."""


class UndefinedMetricError(ValueError):
    """Raised when a metric has no value for a trace (empty hypothesis)."""


@dataclass(frozen=True)
class UtteranceTrace:
    """Decoding record of one sentence.

    ``delays[i]`` is the amount of source audio consumed when hypothesis
    token ``i`` was emitted. ``index`` identifies the sentence in its corpus.
    """

    source_duration: float
    delays: tuple[float, ...]
    hypothesis_tokens: tuple[str, ...]
    reference_tokens: tuple[str, ...]
    index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "delays", tuple(float(d) for d in self.delays))
        object.__setattr__(self, "hypothesis_tokens", tuple(self.hypothesis_tokens))
        object.__setattr__(self, "reference_tokens", tuple(self.reference_tokens))
        if not math.isfinite(self.source_duration) or self.source_duration <= 0:
            raise InvalidTraceError(f"source_duration must be positive, got {self.source_duration!r}")
        if len(self.delays) != len(self.hypothesis_tokens):
            raise InvalidTraceError(
                f"{len(self.delays)} delays for {len(self.hypothesis_tokens)} hypothesis tokens"
            )
        prev = 0.0
        for d in self.delays:
            if not math.isfinite(d) or d < 0 or d > self.source_duration:
                raise InvalidTraceError(f"delay {d!r} outside [0, {self.source_duration}]")
            if d < prev:
                raise InvalidTraceError("non-monotone delays")
            prev = d

    @property
    def hyp_length(self) -> int:
        return len(self.hypothesis_tokens)

    @property
    def ref_length(self) -> int:
        return len(self.reference_tokens)

    def scaled(self, factor: float) -> "UtteranceTrace":
        """Copy with the duration and every delay multiplied by ``factor``."""
        return UtteranceTrace(
            self.source_duration * factor,
            tuple(d * factor for d in self.delays),
            self.hypothesis_tokens,
            self.reference_tokens,
            self.index,
        )


@dataclass(frozen=True)
class OracleSchedule:
    word_duration: float
    denominator_length: int
    delays: tuple[float, ...]


@dataclass(frozen=True)
class SentenceLatency:
    al: float
    laal: float
    cutoff_index: int
    lagging_series_al: tuple[float, ...]
    lagging_series_laal: tuple[float, ...]
    hyp_length: int
    ref_length: int
    length_diff: int
    index: int = 0


@dataclass(frozen=True)
class UndefinedLatency:
    """Placeholder for a sentence whose AL/LAAL cannot be computed."""

    index: int
    hyp_length: int
    ref_length: int
    reason: str = "empty hypothesis"

    @property
    def length_diff(self) -> int:
        return self.hyp_length - self.ref_length


@dataclass(frozen=True)
class AlignmentPair:
    system_delay: float
    oracle_word_index: int


def cutoff_index(delays: Sequence[float], source_duration: float) -> int:
    """1-based index of the first token emitted once the whole source was read.

    Falls back to ``len(delays)`` when no delay reaches the end of the source.
    """
    if len(delays) == 0:
        raise InvalidTraceError("cannot take the cutoff of an empty delay sequence")
    end = source_duration - END_EPSILON_MS
    for i, d in enumerate(delays, start=1):
        if d >= end:
            return i
    return len(delays)


def oracle_schedule(
    source_duration: float,
    denominator_length: int,
    count: int,
    clip: bool = False,
) -> OracleSchedule:
    """Emission times of an ideal translator speaking ``denominator_length`` words.

    Positions past ``denominator_length`` keep growing linearly unless
    ``clip`` is set, in which case they stay at the last oracle word.
    """
    if denominator_length < 1:
        raise ValueError("oracle denominator must be a positive length")
    if source_duration <= 0:
        raise ValueError("source_duration must be positive")
    if count < 1:
        raise ValueError("count must be positive")
    step = source_duration / denominator_length
    last = denominator_length if clip else count
    delays = tuple(min(i, last - 1) * step for i in range(count))
    return OracleSchedule(step, denominator_length, delays)


def _lagging(trace: UtteranceTrace, denominator: int, clip: bool = False):
    if trace.ref_length < 1:
        raise InvalidTraceError("reference has no tokens")
    if trace.hyp_length < 1:
        raise UndefinedMetricError("lagging is undefined for an empty hypothesis")
    tau = cutoff_index(trace.delays, trace.source_duration)
    oracle = oracle_schedule(trace.source_duration, denominator, tau, clip=clip)
    series = tuple(d - o for d, o in zip(trace.delays[:tau], oracle.delays))
    return math.fsum(series) / tau, series, tau


def sentence_al(trace: UtteranceTrace, clip_oracle: bool = False) -> tuple[float, tuple[float, ...], int]:
    """Average Lagging with the oracle paced by the reference length.

    Returns ``(al, lagging_series, cutoff)``. ``clip_oracle`` holds the oracle
    at the last reference word for positions beyond the reference length,
    the convention used when laggings are drawn against the reference words.
    """
    return _lagging(trace, trace.ref_length, clip=clip_oracle)


def sentence_laal(trace: UtteranceTrace) -> tuple[float, tuple[float, ...], int]:
    """Length-adaptive AL: the oracle is paced by the longer of hypothesis and reference."""
    return _lagging(trace, max(trace.hyp_length, trace.ref_length))


def sentence_metrics(trace: UtteranceTrace, clip_oracle: bool = False) -> SentenceLatency:
    al, series_al, tau = sentence_al(trace, clip_oracle=clip_oracle)
    laal, series_laal, _ = sentence_laal(trace)
    return SentenceLatency(
        al=al,
        laal=laal,
        cutoff_index=tau,
        lagging_series_al=series_al,
        lagging_series_laal=series_laal,
        hyp_length=trace.hyp_length,
        ref_length=trace.ref_length,
        length_diff=trace.hyp_length - trace.ref_length,
        index=trace.index,
    )


def score_trace(trace: UtteranceTrace, clip_oracle: bool = False) -> SentenceLatency | UndefinedLatency:
    """Like :func:`sentence_metrics` but maps an empty hypothesis to :class:`UndefinedLatency`."""
    try:
        return sentence_metrics(trace, clip_oracle=clip_oracle)
    except UndefinedMetricError as exc:
        return UndefinedLatency(trace.index, trace.hyp_length, trace.ref_length, str(exc))


def aligned_lagging(
    pairs: Sequence[AlignmentPair],
    source_duration: float,
    ref_length: int,
) -> float:
    """Mean lagging of hand-aligned hypothesis tokens against reference oracle words."""
    if not pairs:
        raise ValueError("aligned_lagging needs at least one pair")
    if ref_length < 1:
        raise ValueError("ref_length must be positive")
    step = source_duration / ref_length
    total = []
    for pair in pairs:
        j = pair.oracle_word_index
        if not 1 <= j <= ref_length:
            raise ValueError(f"oracle word index {j} outside 1..{ref_length}")
        total.append(pair.system_delay - (j - 1) * step)
    return math.fsum(total) / len(total)
