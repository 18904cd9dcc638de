import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from streamlag.estimator import FEATURE_NAMES, LatencyScorer, check_traces
from streamlag.metrics import UtteranceTrace
from streamlag.synthetic import SynthConfig, generate_corpus


def traces():
    return [
        UtteranceTrace(3000, [1000, 2000, 3000], list("abc"), list("xyz"), 0),
        UtteranceTrace(3000, [1000, 1000, 3000], list("abc"), list("xy"), 1),
        UtteranceTrace(3000, [], [], list("xy"), 2),
    ]


def test_fit_transform():
    scorer = LatencyScorer()
    out = scorer.fit_transform(traces())
    assert out.shape == (3, len(FEATURE_NAMES))
    np.testing.assert_allclose(out[0], [1000, 1000, 3, 0])
    np.testing.assert_allclose(out[1], [500 / 3, 2000 / 3, 3, 1])
    assert np.isnan(out[2, :3]).all() and out[2, 3] == -2
    assert scorer.report_.skipped_count == 1
    assert scorer.report_.corpus_laal == pytest.approx((1000 + 2000 / 3) / 2)


def test_params_and_clone():
    scorer = LatencyScorer(thresholds=(500.0,), clip_oracle=True)
    assert scorer.get_params() == {"thresholds": (500.0,), "clip_oracle": True, "metric": "laal"}
    twin = clone(scorer)
    assert twin.get_params() == scorer.get_params()
    assert not hasattr(twin, "report_")


def test_not_fitted():
    with pytest.raises(NotFittedError):
        LatencyScorer().transform(traces())


def test_score_prefers_lower_latency():
    fast = generate_corpus(SynthConfig(k=1, seed=0, num_sentences=20))
    slow = generate_corpus(SynthConfig(k=5, seed=0, num_sentences=20))
    scorer = LatencyScorer()
    assert scorer.score(fast) > scorer.score(slow)


def test_validation():
    with pytest.raises(ValueError):
        check_traces([])
    with pytest.raises(TypeError):
        check_traces([{"delays": []}])
    with pytest.raises(TypeError):
        check_traces(traces()[0])
    with pytest.raises(ValueError):
        LatencyScorer(metric="bleu").fit(traces())
