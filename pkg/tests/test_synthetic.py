import io
import random

import pytest
from scipy.stats import spearmanr

from streamlag.metrics import UtteranceTrace, cutoff_index, score_trace, sentence_al
from streamlag.report import aggregate
from streamlag.synthetic import (
    DUPLICATE_SUFFIX,
    SynthConfig,
    gen_waitk_trace,
    generate_corpus,
    inject_overgeneration,
    waitk_delays,
    write_corpus,
)


def fixed(n, d, k, offset=0, **kw):
    return SynthConfig(k=k, source_word_count_range=(n, n), source_word_duration_range_ms=(d, d),
                       target_length_offset=offset, **kw)


def test_waitk_example():
    trace = gen_waitk_trace(fixed(5, 500.0, 2), random.Random(0))
    assert trace.delays == (1000.0, 1500.0, 2000.0, 2500.0, 2500.0)
    assert trace.source_duration == 2500.0
    al, series, tau = sentence_al(trace)
    assert (al, series, tau) == (1000.0, (1000.0,) * 4, 4)


def test_k_at_least_n_reads_everything():
    trace = gen_waitk_trace(fixed(4, 300.0, 6), random.Random(0))
    assert set(trace.delays) == {1200.0}


def test_reference_is_source_length():
    trace = gen_waitk_trace(fixed(7, 100.0, 2, offset=-3), random.Random(0))
    assert trace.ref_length == 7 and trace.hyp_length == 4


def test_target_length_at_least_one():
    trace = gen_waitk_trace(fixed(3, 100.0, 1, offset=-10), random.Random(0))
    assert trace.hyp_length == 1


def test_waitk_delays_formula():
    assert waitk_delays([1, 2, 3, 4], 2, 6) == [3, 6, 10, 10, 10, 10]


@pytest.mark.parametrize(
    "bad",
    [
        dict(k=0),
        dict(source_word_count_range=(5, 4)),
        dict(source_word_duration_range_ms=(100.0, 50.0)),
        dict(target_length_offset=(2, 1)),
        dict(overgen_insert_prob=1.5),
        dict(num_sentences=0),
    ],
)
def test_degenerate_config(bad):
    with pytest.raises(ValueError):
        SynthConfig(**bad)


class TestInjection:
    trace = UtteranceTrace(3000, [1000, 2000, 3000], ["a", "b", "c"], ["x", "y", "z"])

    def test_zero_prob_is_identity(self):
        assert inject_overgeneration(self.trace, 0.0, random.Random(1)) == self.trace

    def test_full_prob_duplicates_up_to_cutoff(self):
        out = inject_overgeneration(self.trace, 1.0, random.Random(1))
        assert out.delays == (1000.0, 1000.0, 2000.0, 2000.0, 3000.0, 3000.0)
        assert out.hypothesis_tokens[1] == "a" + DUPLICATE_SUFFIX
        assert (out.source_duration, out.reference_tokens) == (self.trace.source_duration, self.trace.reference_tokens)

    def test_tokens_after_cutoff_untouched(self):
        trace = UtteranceTrace(3000, [1000, 3000, 3000], ["a", "b", "c"], ["x"])
        out = inject_overgeneration(trace, 1.0, random.Random(1))
        assert out.hyp_length == 5
        assert out.hypothesis_tokens[-1] == "c"

    def test_keeps_cutoff_delay(self):
        rng = random.Random(4)
        for _ in range(50):
            out = inject_overgeneration(self.trace, rng.random(), rng)
            assert out.delays[cutoff_index(out.delays, out.source_duration) - 1] == 3000.0


def test_determinism():
    cfg = SynthConfig(overgen_insert_prob=0.3, seed=42, num_sentences=50, target_length_offset=(-2, 2))
    a, b = io.StringIO(), io.StringIO()
    write_corpus(cfg, a)
    write_corpus(cfg, b)
    assert a.getvalue() == b.getvalue()
    assert generate_corpus(cfg) == generate_corpus(cfg)


def test_probability_only_changes_duplicates():
    base = generate_corpus(SynthConfig(seed=9, num_sentences=30))
    dup = generate_corpus(SynthConfig(seed=9, num_sentences=30, overgen_insert_prob=0.5))
    for t0, t1 in zip(base, dup):
        kept = [tok for tok in t1.hypothesis_tokens if not tok.endswith(DUPLICATE_SUFFIX)]
        assert tuple(kept) == t0.hypothesis_tokens
        assert t1.source_duration == t0.source_duration


def _corpus_stats(**kw):
    report = aggregate([score_trace(t) for t in generate_corpus(SynthConfig(**kw))])
    return report.awld, report.corpus_laal - report.corpus_al


def test_bias_reproduction():
    awld_pos, gap_pos = _corpus_stats(overgen_insert_prob=0.2, seed=5, num_sentences=200)
    assert awld_pos > 0 and gap_pos > 0
    awld_neg, gap_neg = _corpus_stats(target_length_offset=(-4, -1), seed=5, num_sentences=200)
    assert awld_neg < 0 and gap_neg == 0


def test_monotone_gap():
    stats = [_corpus_stats(overgen_insert_prob=p, seed=13, num_sentences=150) for p in (0, 0.1, 0.2, 0.3, 0.4, 0.5)]
    awlds, gaps = zip(*stats)
    assert list(awlds) == sorted(awlds)
    assert spearmanr(awlds, gaps).statistic > 0.9
