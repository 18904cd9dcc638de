"""Reading and writing decoding traces.

Two line-delimited JSON layouts are understood:

``canonical-jsonl``
    ``{"index", "source_duration_ms", "delays_ms", "prediction",
    "prediction_tokens", "reference"}`` (one of ``prediction`` /
    ``prediction_tokens`` may be omitted).

``simuleval-log``
    instance logs with ``delays``, ``prediction``, ``reference`` and
    ``source_length`` (milliseconds). Other keys are ignored.

A bad record never aborts a file; it is counted in the
:class:`IngestionReport` with a reason.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

from .metrics import InvalidTraceError, UtteranceTrace

FORMATS = ("canonical-jsonl", "simuleval-log")

# Overshoot/undershoot (ms) that is silently clamped instead of rejected.
CLAMP_TOLERANCE_MS = 0.5


class TraceIOError(OSError):
    """The input could not be read at all."""


class RecordError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Split on runs of whitespace; punctuation stays attached to its word."""
    return text.split()


@dataclass
class RawTraceRecord:
    index: int
    source_duration_ms: float
    delays_ms: list[float]
    reference: str
    prediction: str | None = None
    prediction_tokens: list[str] | None = None

    def tokens(self) -> list[str]:
        if self.prediction_tokens is not None:
            if self.prediction is not None and tokenize(self.prediction) != list(self.prediction_tokens):
                raise RecordError("prediction and prediction_tokens disagree")
            return list(self.prediction_tokens)
        if self.prediction is None:
            raise RecordError("missing prediction")
        return tokenize(self.prediction)


@dataclass
class IngestionReport:
    accepted: int = 0
    repaired: int = 0
    rejected: int = 0
    rejections: list[tuple[int, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.accepted + self.rejected

    def reject(self, line_no: int, reason: str):
        self.rejected += 1
        self.rejections.append((line_no, reason))

    def summary(self) -> str:
        return f"read {self.total} records: {self.accepted} accepted ({self.repaired} repaired), {self.rejected} rejected"


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RecordError(f"{name} is not a number")
    try:
        value = float(value)
    except OverflowError:
        raise RecordError(f"{name} is out of range") from None
    if not math.isfinite(value):
        raise RecordError(f"{name} is not finite")
    return value


def _text(value, name: str) -> str:
    if not isinstance(value, str):
        raise RecordError(f"{name} is not a string")
    return value


def _record_from_obj(obj, fmt: str, default_index: int) -> RawTraceRecord:
    if not isinstance(obj, dict):
        raise RecordError("record is not a JSON object")
    if fmt == "canonical-jsonl":
        keys = ("source_duration_ms", "delays_ms")
    else:
        keys = ("source_length", "delays")
    for key in (*keys, "reference"):
        if key not in obj:
            raise RecordError(f"missing field {key!r}")
    duration_key, delays_key = keys

    index = obj.get("index", default_index)
    if isinstance(index, bool) or not isinstance(index, int) or index < 0:
        raise RecordError("index is not a non-negative integer")

    delays = obj[delays_key]
    if not isinstance(delays, list):
        raise RecordError(f"{delays_key} is not a list")

    prediction = obj.get("prediction")
    if prediction is not None:
        prediction = _text(prediction, "prediction")
    tokens = obj.get("prediction_tokens") if fmt == "canonical-jsonl" else None
    if tokens is not None:
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise RecordError("prediction_tokens is not a list of strings")
        if any(t != t.strip() or not t or len(t.split()) != 1 for t in tokens):
            raise RecordError("prediction_tokens contains empty or whitespace tokens")

    return RawTraceRecord(
        index=index,
        source_duration_ms=_number(obj[duration_key], duration_key),
        delays_ms=[_number(d, delays_key) for d in delays],
        reference=_text(obj["reference"], "reference"),
        prediction=prediction,
        prediction_tokens=tokens,
    )


def normalize_record(record: RawTraceRecord) -> tuple[UtteranceTrace, bool]:
    """Validate a raw record, returning the trace and whether it needed repair."""
    duration = record.source_duration_ms
    if duration <= 0:
        raise RecordError("non-positive source duration")
    hyp = record.tokens()
    ref = tokenize(record.reference)
    if not ref:
        raise RecordError("empty reference")
    if len(hyp) != len(record.delays_ms):
        raise RecordError(f"token/delay count mismatch ({len(hyp)} tokens, {len(record.delays_ms)} delays)")

    repaired = False
    delays = []
    prev = 0.0
    for d in record.delays_ms:
        if d < -CLAMP_TOLERANCE_MS or d > duration + CLAMP_TOLERANCE_MS:
            raise RecordError("delay out of range")
        clamped = min(max(d, 0.0), duration)
        if clamped < prev:
            if prev - clamped > CLAMP_TOLERANCE_MS:
                raise RecordError("non-monotone delays")
            clamped = prev
        repaired |= clamped != d
        delays.append(clamped)
        prev = clamped
    trace = UtteranceTrace(duration, tuple(delays), tuple(hyp), tuple(ref), record.index)
    return trace, repaired


def iter_lines(source: IO) -> Iterable[bytes | str]:
    try:
        yield from source
    except (OSError, ValueError) as exc:
        raise TraceIOError(f"cannot read trace stream: {exc}") from exc


def parse_traces(source: IO, format: str = "canonical-jsonl") -> tuple[list[UtteranceTrace], IngestionReport]:
    """Parse a byte or text stream of JSON lines into validated traces.

    Blank lines are skipped and are not counted as records. Traces keep
    input order; a missing ``index`` defaults to the record's ordinal.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown trace format {format!r}; expected one of {FORMATS}")
    traces: list[UtteranceTrace] = []
    report = IngestionReport()
    ordinal = 0
    for line_no, line in enumerate(iter_lines(source), start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError:
                report.reject(line_no, "invalid UTF-8")
                ordinal += 1
                continue
        if not line.strip():
            continue
        try:
            try:
                obj = json.loads(line)
            except (json.JSONDecodeError, RecursionError) as exc:
                raise RecordError(f"malformed JSON: {exc}") from None
            trace, repaired = normalize_record(_record_from_obj(obj, format, ordinal))
        except (RecordError, InvalidTraceError) as exc:
            report.reject(line_no, str(exc))
        else:
            traces.append(trace)
            report.accepted += 1
            report.repaired += repaired
        ordinal += 1
    return traces, report


def read_traces(path: str, format: str = "canonical-jsonl") -> tuple[list[UtteranceTrace], IngestionReport]:
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise TraceIOError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        return parse_traces(fh, format)


def trace_to_record(trace: UtteranceTrace) -> dict:
    return {
        "index": trace.index,
        "source_duration_ms": trace.source_duration,
        "delays_ms": list(trace.delays),
        "prediction": " ".join(trace.hypothesis_tokens),
        "prediction_tokens": list(trace.hypothesis_tokens),
        "reference": " ".join(trace.reference_tokens),
    }


def dumps_traces(traces: Iterable[UtteranceTrace]) -> str:
    return "".join(json.dumps(trace_to_record(t), ensure_ascii=False) + "\n" for t in traces)


def write_traces(traces: Iterable[UtteranceTrace], sink: IO[str]):
    sink.write(dumps_traces(traces))


def loads_traces(text: str, format: str = "canonical-jsonl"):
    return parse_traces(io.StringIO(text), format)
