"""Token-by-token breakdown of AL and LAAL for a single sentence."""

from __future__ import annotations

from .metrics import UtteranceTrace, oracle_schedule, sentence_al, sentence_laal


def explain_rows(trace: UtteranceTrace, clip_oracle: bool = False) -> list[dict]:
    """One row per hypothesis token; tokens after the cutoff are marked ``ignored``."""
    al, series_al, tau = sentence_al(trace, clip_oracle=clip_oracle)
    _, series_laal, _ = sentence_laal(trace)
    n = trace.hyp_length
    ref_oracle = oracle_schedule(trace.source_duration, trace.ref_length, n, clip=clip_oracle).delays
    len_oracle = oracle_schedule(trace.source_duration, max(n, trace.ref_length), n).delays
    rows = []
    for i, (tok, d) in enumerate(zip(trace.hypothesis_tokens, trace.delays)):
        counted = i < tau
        rows.append({
            "position": i + 1,
            "token": tok,
            "delay": d,
            "oracle_al": ref_oracle[i],
            "oracle_laal": len_oracle[i],
            "lag_al": series_al[i] if counted else None,
            "lag_laal": series_laal[i] if counted else None,
            "ignored": not counted,
        })
    return rows


def _f(x) -> str:
    return "-" if x is None else f"{x:.2f}"


def explain(trace: UtteranceTrace, clip_oracle: bool = False) -> str:
    al, series_al, tau = sentence_al(trace, clip_oracle=clip_oracle)
    laal, series_laal, _ = sentence_laal(trace)
    rows = explain_rows(trace, clip_oracle=clip_oracle)
    width = max([5] + [len(r["token"]) for r in rows])
    out = [
        f"sentence {trace.index}: source {trace.source_duration:.2f} ms, "
        f"|Y|={trace.hyp_length}, |Y*|={trace.ref_length}, cutoff={tau}",
        f"{'#':>4} {'token':<{width}} {'d_i':>10} {'oracle(ref)':>12} {'oracle(max)':>12} "
        f"{'lag AL':>10} {'lag LAAL':>10}",
    ]
    for r in rows:
        line = (
            f"{r['position']:>4} {r['token']:<{width}} {_f(r['delay']):>10} {_f(r['oracle_al']):>12} "
            f"{_f(r['oracle_laal']):>12} {_f(r['lag_al']):>10} {_f(r['lag_laal']):>10}"
        )
        if r["ignored"]:
            line += "  ignored"
        out.append(line)
    out.append(f"AL lagging sum   {sum(series_al):.2f} / {tau} = AL {al:.2f} ms")
    out.append(f"LAAL lagging sum {sum(series_laal):.2f} / {tau} = LAAL {laal:.2f} ms")
    return "\n".join(out) + "\n"
