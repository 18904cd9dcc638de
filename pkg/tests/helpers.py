"""Independent reference computations and fixtures shared by the tests.

Nothing here imports the metric code under test.
"""

import random

# Hand alignment of 13 hypothesis words to a 14-word reference over 5000 ms of audio;
# the rounded oracle times are the whole-ms values used for a manual check.
ALIGNED_DELAYS = [1120, 1120, 2080, 2080, 2080, 2080, 3040, 3040, 4000, 4000, 4960, 4960, 5000]
ALIGNED_ORACLE_INDICES = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 14]
ALIGNED_ROUNDED_ORACLE = [0, 357, 714, 1071, 1428, 1785, 2142, 2500, 2857, 3214, 3571, 4285, 4642]

# Over-generating sentence reconstructed from the worked example: "En primer lugar,"
# plus "es" at 1120 ms, four words at 2080, two at 3040, four at 4000, two at 4960,
# the first end-of-source word at 5000 and one more word after the end.
OVERGEN_SOURCE_MS = 5000.0
OVERGEN_REF_LENGTH = 14
OVERGEN_DELAYS = [1120] * 4 + [2080] * 4 + [3040] * 2 + [4000] * 4 + [4960] * 2 + [5000] * 2
OVERGEN_TOKENS = ["En", "primer", "lugar,", "es"] + [f"y{i}" for i in range(5, 19)]

# Hand-derived traces: (duration, delays, |Y*|, expected al, expected laal)
HAND_TRIO = [
    (3000.0, [1000, 2000, 3000], 3, 1000.0, 1000.0),
    (4000.0, [0, 1000, 2000, 3000], 4, 0.0, 0.0),
    (3000.0, [1000, 1000, 3000], 2, 500.0 / 3, 2000.0 / 3),
]


def brute_force_lagging(duration, delays, denominator):
    """Literal reading of the averaged lagging with an oracle paced by ``denominator``."""
    tau = None
    for i in range(1, len(delays) + 1):
        if delays[i - 1] == duration:
            tau = i
            break
    if tau is None:
        tau = len(delays)
    total = 0.0
    for i in range(1, tau + 1):
        oracle = (i - 1) * duration / denominator
        total += delays[i - 1] - oracle
    return total / tau


def brute_force_al(duration, delays, ref_length):
    return brute_force_lagging(duration, delays, ref_length)


def brute_force_laal(duration, delays, ref_length):
    return brute_force_lagging(duration, delays, max(len(delays), ref_length))


def random_trace_fields(rng: random.Random, max_len=30):
    """(duration, delays, hyp_len, ref_len) for a valid random trace."""
    duration = rng.choice([float(rng.randint(100, 20000)), rng.uniform(50.0, 20000.0)])
    hyp_len = rng.randint(1, max_len)
    ref_len = rng.randint(1, max_len)
    delays = sorted(rng.uniform(0.0, duration) for _ in range(hyp_len))
    mode = rng.random()
    if mode < 0.6:
        # some tail reaches the end of the source
        start = rng.randint(0, hyp_len - 1)
        delays[start:] = [duration] * (hyp_len - start)
    elif mode < 0.7:
        delays = [min(float(round(d)), duration) for d in delays]
    return duration, delays, hyp_len, ref_len
