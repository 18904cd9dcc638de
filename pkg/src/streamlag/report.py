"""Corpus aggregation, system comparison and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .metrics import SentenceLatency, UndefinedLatency, UtteranceTrace

DEFAULT_THRESHOLDS = (1000.0, 2000.0, 4000.0)
DEFAULT_LABELS = ("low", "medium", "high", "ultra-high")
ALL_METRICS = ("al", "laal", "awld")
REPORT_FORMATS = ("json", "csv", "pretty-table")
AGGREGATION = "unweighted-mean"

SentenceResult = SentenceLatency | UndefinedLatency


def regime_labels(thresholds: Sequence[float]) -> list[str]:
    if len(thresholds) == len(DEFAULT_LABELS) - 1:
        return list(DEFAULT_LABELS)
    return [f"<{t:g}" for t in thresholds] + [f">={thresholds[-1]:g}"] if thresholds else ["all"]


def regime_index(value: float, thresholds: Sequence[float]) -> int:
    """Bin ``value``: label ``i`` when ``value < thresholds[i]``, else the last label."""
    return bisect_right(thresholds, value)


def check_thresholds(thresholds: Sequence[float]) -> tuple[float, ...]:
    thresholds = tuple(float(t) for t in thresholds)
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError(f"regime thresholds must be strictly increasing, got {list(thresholds)}")
    return thresholds


def awld(traces: Iterable[UtteranceTrace | SentenceResult]) -> float:
    """Average word length difference ``mean(|Y| - |Y*|)``; positive means over-generation."""
    diffs = [t.hyp_length - t.ref_length for t in traces]
    if not diffs:
        raise ValueError("AWLD of an empty corpus is undefined")
    return math.fsum(diffs) / len(diffs)


@dataclass
class CorpusReport:
    corpus_al: float | None = None
    corpus_laal: float | None = None
    awld: float | None = None
    sentence_count: int = 0
    skipped_count: int = 0
    skipped: list[dict] = field(default_factory=list)
    per_sentence: list[SentenceLatency] | None = None
    regime_counts: dict[str, int] = field(default_factory=dict)
    regime_thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    metrics: tuple[str, ...] = ALL_METRICS
    metadata: dict = field(default_factory=lambda: {"aggregation": AGGREGATION})

    def to_dict(self) -> dict:
        summary = {}
        if "al" in self.metrics:
            summary["corpus_al"] = self.corpus_al
        if "laal" in self.metrics:
            summary["corpus_laal"] = self.corpus_laal
        if "awld" in self.metrics:
            summary["awld"] = self.awld
        summary["sentence_count"] = self.sentence_count
        summary["skipped_count"] = self.skipped_count
        summary["skipped"] = list(self.skipped)
        summary["regime_thresholds"] = list(self.regime_thresholds)
        summary["regime_counts"] = dict(self.regime_counts)
        out = {"metrics": list(self.metrics), "summary": summary, "metadata": dict(self.metadata)}
        if self.per_sentence is not None:
            out["per_sentence"] = [_sentence_to_dict(s) for s in self.per_sentence]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusReport":
        summary = data["summary"]
        per_sentence = data.get("per_sentence")
        if per_sentence is not None:
            per_sentence = [_sentence_from_dict(s) for s in per_sentence]
        return cls(
            corpus_al=summary.get("corpus_al"),
            corpus_laal=summary.get("corpus_laal"),
            awld=summary.get("awld"),
            sentence_count=summary["sentence_count"],
            skipped_count=summary["skipped_count"],
            skipped=list(summary["skipped"]),
            per_sentence=per_sentence,
            regime_counts=dict(summary["regime_counts"]),
            regime_thresholds=tuple(summary["regime_thresholds"]),
            metrics=tuple(data["metrics"]),
            metadata=dict(data.get("metadata", {})),
        )


_SENTENCE_FIELDS = (
    "index", "al", "laal", "cutoff_index", "hyp_length", "ref_length",
    "length_diff", "lagging_series_al", "lagging_series_laal",
)


def _sentence_to_dict(s: SentenceLatency) -> dict:
    d = {name: getattr(s, name) for name in _SENTENCE_FIELDS}
    d["lagging_series_al"] = list(s.lagging_series_al)
    d["lagging_series_laal"] = list(s.lagging_series_laal)
    return d


def _sentence_from_dict(d: dict) -> SentenceLatency:
    return SentenceLatency(
        al=d["al"],
        laal=d["laal"],
        cutoff_index=d["cutoff_index"],
        lagging_series_al=tuple(d["lagging_series_al"]),
        lagging_series_laal=tuple(d["lagging_series_laal"]),
        hyp_length=d["hyp_length"],
        ref_length=d["ref_length"],
        length_diff=d["length_diff"],
        index=d["index"],
    )


def aggregate(
    results: Sequence[SentenceResult],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    per_sentence: bool = True,
    metrics: Sequence[str] = ALL_METRICS,
    metadata: dict | None = None,
) -> CorpusReport:
    """Corpus means over defined sentences; AWLD over every sentence.

    Sentences are binned into latency regimes by their LAAL.
    """
    thresholds = check_thresholds(thresholds)
    unknown = set(metrics) - set(ALL_METRICS)
    if unknown:
        raise ValueError(f"unknown metrics {sorted(unknown)}")
    defined = [r for r in results if isinstance(r, SentenceLatency)]
    if not defined:
        raise ValueError("no sentence has a defined latency")
    skipped = [{"index": r.index, "reason": r.reason} for r in results if isinstance(r, UndefinedLatency)]

    labels = regime_labels(thresholds)
    counts = dict.fromkeys(labels, 0)
    for r in defined:
        counts[labels[regime_index(r.laal, thresholds)]] += 1

    meta = {"aggregation": AGGREGATION}
    meta.update(metadata or {})
    return CorpusReport(
        corpus_al=_mean(r.al for r in defined),
        corpus_laal=_mean(r.laal for r in defined),
        awld=awld(results),
        sentence_count=len(results),
        skipped_count=len(skipped),
        skipped=skipped,
        per_sentence=defined if per_sentence else None,
        regime_counts=counts,
        regime_thresholds=thresholds,
        metrics=tuple(m for m in ALL_METRICS if m in metrics),
        metadata=meta,
    )


def _mean(values: Iterable[float]) -> float:
    values = list(values)
    # fsum is exactly rounded, which keeps the mean independent of input order
    return math.fsum(values) / len(values)


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _delta(a: float | None, b: float | None) -> float | None:
    if a is None or b is None:
        return None
    return b - a


def compare(a: CorpusReport, b: CorpusReport) -> dict:
    """Deltas ``b - a`` and sentences whose AL and LAAL rankings disagree."""
    record = {
        "deltas": {
            "corpus_al": _delta(a.corpus_al, b.corpus_al),
            "corpus_laal": _delta(a.corpus_laal, b.corpus_laal),
            "awld": _delta(a.awld, b.awld),
        },
        "ranking_disagreements": [],
        "warnings": [],
    }
    if a.per_sentence is None or b.per_sentence is None:
        record["warnings"].append("per-sentence results missing; sentence flags skipped")
    elif a.sentence_count != b.sentence_count:
        record["warnings"].append(
            f"sentence counts differ ({a.sentence_count} vs {b.sentence_count}); sentence flags skipped"
        )
    else:
        b_by_index = {s.index: s for s in b.per_sentence}
        for sa in a.per_sentence:
            sb = b_by_index.get(sa.index)
            if sb is None:
                continue
            if _sign(sa.al - sb.al) != _sign(sa.laal - sb.laal):
                record["ranking_disagreements"].append({
                    "index": sa.index,
                    "al_a": sa.al, "al_b": sb.al,
                    "laal_a": sa.laal, "laal_b": sb.laal,
                })
    return record


CSV_COLUMNS = ("index", "al", "laal", "cutoff_index", "hyp_length", "ref_length", "length_diff")


def _cell(value) -> str:
    return "" if value is None else repr(value) if isinstance(value, float) else str(value)


def format_report(report: CorpusReport, format: str = "json") -> str:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"
    if format == "csv":
        return _format_csv(report)
    if format == "pretty-table":
        return _format_table(report)
    raise ValueError(f"unknown report format {format!r}; expected one of {REPORT_FORMATS}")


def write_report(report: CorpusReport, format: str = "json", sink=None) -> bytes:
    """Serialize ``report``; the UTF-8 payload is returned and written to ``sink`` if given."""
    payload = format_report(report, format).encode("utf-8")
    if sink is not None:
        if isinstance(sink, io.TextIOBase):
            sink.write(payload.decode("utf-8"))
        else:
            sink.write(payload)
    return payload


def read_report(data: str | bytes) -> CorpusReport:
    return CorpusReport.from_dict(json.loads(data))


def _format_csv(report: CorpusReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in report.per_sentence or ():
        writer.writerow([_cell(getattr(s, c)) for c in CSV_COLUMNS])
    al = report.corpus_al if "al" in report.metrics else None
    laal = report.corpus_laal if "laal" in report.metrics else None
    awld_value = report.awld if "awld" in report.metrics else None
    # the summary row carries AWLD in the length_diff column
    writer.writerow(["summary", _cell(al), _cell(laal), "", "", "", _cell(awld_value)])
    return buf.getvalue()


def _ms(value: float | None) -> str:
    return "-" if value is None else f"{value:.0f}"


def _format_table(report: CorpusReport) -> str:
    lines = []
    if report.per_sentence:
        header = f"{'index':>6} {'AL':>8} {'LAAL':>8} {'cutoff':>6} {'|Y|':>5} {'|Y*|':>5} {'diff':>5}"
        lines.append(header)
        lines.append("-" * len(header))
        for s in report.per_sentence:
            lines.append(
                f"{s.index:>6} {_ms(s.al):>8} {_ms(s.laal):>8} {s.cutoff_index:>6} "
                f"{s.hyp_length:>5} {s.ref_length:>5} {s.length_diff:>+5d}"
            )
        lines.append("")
    if "al" in report.metrics:
        lines.append(f"AL (ms)     {_ms(report.corpus_al):>8}")
    if "laal" in report.metrics:
        lines.append(f"LAAL (ms)   {_ms(report.corpus_laal):>8}")
    if "awld" in report.metrics:
        awld_text = "-" if report.awld is None else f"{report.awld:+.2f}"
        lines.append(f"AWLD        {awld_text:>8}")
    lines.append(f"sentences   {report.sentence_count:>8}")
    lines.append(f"skipped     {report.skipped_count:>8}")
    regimes = ", ".join(f"{k}={v}" for k, v in report.regime_counts.items())
    lines.append(f"regimes     {regimes}")
    return "\n".join(lines) + "\n"
