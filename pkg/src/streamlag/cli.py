"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
Reports go to stdout (or ``--output``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .explain import explain
from .metrics import score_trace
from .report import (
    ALL_METRICS, DEFAULT_THRESHOLDS, REPORT_FORMATS, aggregate, check_thresholds, compare, format_report,
)
from .synthetic import SynthConfig, corpus_metadata, generate_corpus
from .traceio import FORMATS, TraceIOError, dumps_traces, parse_traces, read_traces

log = logging.getLogger("streamlag")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _metric_list(text: str) -> list[str]:
    metrics = [m.strip().lower() for m in text.split(",") if m.strip()]
    bad = [m for m in metrics if m not in ALL_METRICS]
    if bad or not metrics:
        raise argparse.ArgumentTypeError(f"metrics must be a subset of {','.join(ALL_METRICS)}")
    return metrics


def _range(cast):
    def parse(text: str):
        parts = str(text).split(":")
        try:
            values = [cast(p) for p in parts]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a value or LOW:HIGH, got {text!r}") from None
        if len(values) == 1:
            return values[0], values[0]
        if len(values) != 2:
            raise argparse.ArgumentTypeError(f"expected a value or LOW:HIGH, got {text!r}")
        return tuple(values)
    return parse


def _add_input_options(p):
    p.add_argument("--format", default="canonical-jsonl", choices=FORMATS, help="input trace format")
    p.add_argument("--thresholds", type=_float_list, default=list(DEFAULT_THRESHOLDS),
                   help="comma-separated latency regime boundaries in ms")
    p.add_argument("--clip-oracle", action="store_true",
                   help="hold the reference-paced AL oracle at the last reference word")
    p.add_argument("--config", help="JSON file with default values for any flag")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="streamlag", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("evaluate", help="score a trace file")
    ev.add_argument("input", help="trace file ('-' for stdin)")
    _add_input_options(ev)
    ev.add_argument("--metrics", type=_metric_list, default=list(ALL_METRICS),
                    help="comma-separated subset of al,laal,awld")
    ev.add_argument("--per-sentence", action="store_true", help="include per-sentence results")
    ev.add_argument("--output-format", default="json", choices=REPORT_FORMATS)
    ev.add_argument("-o", "--output", help="write the report here instead of stdout")

    ex = sub.add_parser("explain", help="token-by-token breakdown of one sentence")
    ex.add_argument("input")
    _add_input_options(ex)
    ex.add_argument("--index", type=int, required=True, help="sentence index")

    ge = sub.add_parser("generate", help="write a synthetic wait-k corpus")
    ge.add_argument("--num", type=int, default=100, help="number of sentences")
    ge.add_argument("--k", type=int, default=3, help="wait-k lag in source words")
    ge.add_argument("--src-words", type=_range(int), default=(8, 20), help="N or LOW:HIGH")
    ge.add_argument("--word-ms", type=_range(float), default=(250.0, 450.0), help="MS or LOW:HIGH")
    ge.add_argument("--target-offset", type=_range(int), default=(0, 0),
                    help="|Y| - source words, N or LOW:HIGH (use --target-offset=-2:0 for negatives)")
    ge.add_argument("--overgen-prob", type=float, default=0.0)
    ge.add_argument("--seed", type=int, default=0)
    ge.add_argument("-o", "--output", help="JSONL destination (default stdout)")
    ge.add_argument("--meta", help="metadata JSON destination (default OUTPUT.meta.json)")
    ge.add_argument("--config", help="JSON file with default values for any flag")

    co = sub.add_parser("compare", help="compare two systems")
    co.add_argument("input_a")
    co.add_argument("input_b")
    _add_input_options(co)
    co.add_argument("-o", "--output")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                defaults = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot load config {args.config}: {exc}")
        if not isinstance(defaults, dict):
            parser.error("config file must hold a JSON object")
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in subparser._actions}
        for key, value in defaults.items():
            dest = key.replace("-", "_")
            if dest not in known or dest in ("config", "help"):
                parser.error(f"unknown config key {key!r}")
            action = known[dest]
            if action.type is not None and isinstance(value, (str, int, float)):
                value = action.type(str(value))
            subparser.set_defaults(**{dest: value})
        args = parser.parse_args(argv)
    return args


def _load(path: str, fmt: str):
    if path == "-":
        traces, report = parse_traces(sys.stdin.buffer, fmt)
    else:
        traces, report = read_traces(path, fmt)
    log.info("%s: %s", path, report.summary())
    for line_no, reason in report.rejections:
        log.debug("%s:%d rejected: %s", path, line_no, reason)
    if not traces:
        raise DataError(f"{path}: no valid traces")
    return traces


def _corpus_report(traces, args, metrics=ALL_METRICS, per_sentence=True):
    results = [score_trace(t, clip_oracle=args.clip_oracle) for t in traces]
    try:
        return aggregate(results, args.thresholds, per_sentence=per_sentence, metrics=metrics,
                         metadata={"oracle_clip": args.clip_oracle})
    except ValueError as exc:
        raise DataError(str(exc)) from None


def _emit(text: str, path: str | None):
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise TraceIOError(f"cannot write {path}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def cmd_evaluate(args):
    traces = _load(args.input, args.format)
    report = _corpus_report(traces, args, metrics=args.metrics, per_sentence=args.per_sentence)
    _emit(format_report(report, args.output_format), args.output)


def cmd_explain(args):
    traces = _load(args.input, args.format)
    matches = [t for t in traces if t.index == args.index]
    if not matches:
        raise UsageError(f"no sentence with index {args.index}")
    trace = matches[0]
    if not trace.hyp_length:
        raise DataError(f"sentence {args.index} has an empty hypothesis; latency is undefined")
    _emit(explain(trace, clip_oracle=args.clip_oracle), None)


def cmd_generate(args):
    offset = args.target_offset
    try:
        config = SynthConfig(
            k=args.k,
            source_word_count_range=args.src_words,
            source_word_duration_range_ms=args.word_ms,
            target_length_offset=offset[0] if offset[0] == offset[1] else offset,
            overgen_insert_prob=args.overgen_prob,
            seed=args.seed,
            num_sentences=args.num,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(dumps_traces(generate_corpus(config)), args.output)
    meta_path = args.meta or (f"{args.output}.meta.json" if args.output else None)
    if meta_path:
        _emit(json.dumps(corpus_metadata(config), indent=2) + "\n", meta_path)


def cmd_compare(args):
    report_a = _corpus_report(_load(args.input_a, args.format), args)
    report_b = _corpus_report(_load(args.input_b, args.format), args)
    record = compare(report_a, report_b)
    for warning in record["warnings"]:
        log.warning(warning)
    record["a"] = {"input": args.input_a, **_summary(report_a)}
    record["b"] = {"input": args.input_b, **_summary(report_b)}
    _emit(json.dumps(record, indent=2) + "\n", args.output)


def _summary(report):
    return {"corpus_al": report.corpus_al, "corpus_laal": report.corpus_laal, "awld": report.awld,
            "sentence_count": report.sentence_count}


COMMANDS = {"evaluate": cmd_evaluate, "explain": cmd_explain, "generate": cmd_generate, "compare": cmd_compare}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)
    try:
        if hasattr(args, "thresholds"):
            check_thresholds(args.thresholds)
        COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except DataError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
