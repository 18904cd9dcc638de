"""Synthetic wait-k decoding traces with controllable length mismatch.

A wait-k policy reads ``k`` source words, then alternates one target word
per newly read source word. Traces produced here let the over-generation
bias of AL be reproduced without a trained model.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from itertools import accumulate
from typing import IO

from .metrics import UtteranceTrace, cutoff_index
from .traceio import dumps_traces

RNG_NAME = "python-random.Random (MT19937)"
DUPLICATE_SUFFIX = "~dup"


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of a synthetic corpus.

    ``target_length_offset`` is either a fixed integer or an inclusive
    ``(low, high)`` range for ``|Y| - n_src``.
    """

    k: int = 3
    source_word_count_range: tuple[int, int] = (8, 20)
    source_word_duration_range_ms: tuple[float, float] = (250.0, 450.0)
    target_length_offset: int | tuple[int, int] = 0
    overgen_insert_prob: float = 0.0
    seed: int = 0
    num_sentences: int = 100

    def __post_init__(self):
        object.__setattr__(self, "source_word_count_range", tuple(self.source_word_count_range))
        object.__setattr__(self, "source_word_duration_range_ms", tuple(self.source_word_duration_range_ms))
        if not isinstance(self.target_length_offset, int):
            object.__setattr__(self, "target_length_offset", tuple(self.target_length_offset))
        self.validate()

    def validate(self):
        lo, hi = self.source_word_count_range
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if lo < 1 or hi < lo:
            raise ValueError(f"empty source word count range {self.source_word_count_range}")
        dlo, dhi = self.source_word_duration_range_ms
        if dlo <= 0 or dhi < dlo:
            raise ValueError(f"empty word duration range {self.source_word_duration_range_ms}")
        if isinstance(self.target_length_offset, tuple):
            olo, ohi = self.target_length_offset
            if ohi < olo:
                raise ValueError(f"empty target length offset range {self.target_length_offset}")
        if not 0.0 <= self.overgen_insert_prob <= 1.0:
            raise ValueError("overgen_insert_prob must lie in [0, 1]")
        if self.num_sentences < 1:
            raise ValueError("num_sentences must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def waitk_delays(word_durations, k: int, target_length: int) -> list[float]:
    """Delay of each target token under wait-k, capped at the end of the source."""
    ends = list(accumulate(word_durations))
    n = len(ends)
    return [ends[min(k + i, n) - 1] for i in range(target_length)]


def _draw_offset(config: SynthConfig, rng: random.Random) -> int:
    if isinstance(config.target_length_offset, int):
        return config.target_length_offset
    return rng.randint(*config.target_length_offset)


def gen_waitk_trace(config: SynthConfig, rng: random.Random, index: int = 0) -> UtteranceTrace:
    """One wait-k trace with reference length equal to the source word count.

    Over-generation injection is not applied here; see :func:`generate_corpus`.
    """
    n = rng.randint(*config.source_word_count_range)
    dlo, dhi = config.source_word_duration_range_ms
    durations = [rng.uniform(dlo, dhi) for _ in range(n)]
    target_length = max(1, n + _draw_offset(config, rng))
    delays = waitk_delays(durations, config.k, target_length)
    # same running sum as the capped delays, so the cutoff matches bit-for-bit
    total = list(accumulate(durations))[-1]
    hyp = [f"w{i + 1}" for i in range(target_length)]
    ref = [f"r{j + 1}" for j in range(n)]
    return UtteranceTrace(total, delays, hyp, ref, index)


def inject_overgeneration(trace: UtteranceTrace, prob: float, rng: random.Random) -> UtteranceTrace:
    """Duplicate each token up to and including the cutoff with probability ``prob``.

    One uniform draw is consumed per eligible position whatever ``prob`` is,
    so corpora generated with the same seed but different probabilities are
    coupled (a higher probability duplicates a superset of positions).
    """
    if not trace.delays:
        return trace
    tau = cutoff_index(trace.delays, trace.source_duration)
    delays, tokens = [], []
    for i, (d, tok) in enumerate(zip(trace.delays, trace.hypothesis_tokens)):
        delays.append(d)
        tokens.append(tok)
        if i < tau and rng.random() < prob:
            delays.append(d)
            tokens.append(tok + DUPLICATE_SUFFIX)
    return UtteranceTrace(trace.source_duration, delays, tokens, trace.reference_tokens, trace.index)


def generate_corpus(config: SynthConfig) -> list[UtteranceTrace]:
    """Deterministic corpus for ``config``.

    Base traces and duplication draws come from separate streams seeded from
    ``config.seed``, so changing only the probability leaves the base traces
    untouched.
    """
    base_rng = random.Random(config.seed)
    dup_rng = random.Random(f"overgen:{config.seed}")
    traces = []
    for index in range(config.num_sentences):
        trace = gen_waitk_trace(config, base_rng, index)
        traces.append(inject_overgeneration(trace, config.overgen_insert_prob, dup_rng))
    return traces


def corpus_metadata(config: SynthConfig) -> dict:
    return {"generator": "wait-k", "rng": RNG_NAME, "config": config.to_dict()}


def write_corpus(config: SynthConfig, sink: IO[str], meta_sink: IO[str] | None = None):
    sink.write(dumps_traces(generate_corpus(config)))
    if meta_sink is not None:
        json.dump(corpus_metadata(config), meta_sink, indent=2)
        meta_sink.write("\n")
