import pytest

from wcindex.services.verification import (
    SUITES,
    VerifyConfig,
    check_wildcard_query,
    random_pattern,
    run_trial,
    run_verification,
    trial_rng,
)
from wcindex.services.wildcard_pattern import parse_pattern

SMALL = VerifyConfig(n=40, sigmas=(2, 3), taus=(2, 3), lambdas=(1, 2), patterns=3, probes=4)


@pytest.mark.parametrize("suite", SUITES)
def test_each_suite_passes_a_trial(suite):
    outcome = run_trial(suite, 7, 0, SMALL)
    assert outcome.ok, outcome.message


def test_trial_streams_are_reproducible():
    a = trial_rng(1, "wildcard", 3).integers(0, 1000, size=5).tolist()
    b = trial_rng(1, "wildcard", 3).integers(0, 1000, size=5).tolist()
    c = trial_rng(1, "wildcard", 4).integers(0, 1000, size=5).tolist()
    assert a == b
    assert a != c


def test_random_pattern_respects_limits():
    rng = trial_rng(3, "wildcard", 0)
    for _ in range(50):
        p = random_pattern(rng, b"abababba", 2, SMALL)
        assert p.g <= SMALL.max_wildcards


def test_check_wildcard_query(banana_index):
    message, positions, base, fast = check_wildcard_query(b"banana", banana_index, parse_pattern("?a"), 1000)
    assert message is None
    assert positions == [0, 2, 4]
    assert fast.wildcard_lcp == 1


def test_run_verification_summary():
    summary = run_verification(2, seed=11, suites=("structure", "wildcard"), config=SMALL)
    assert summary.passed
    lines = summary.to_lines()
    assert lines[0].startswith("structure: pass (2/2)")
    assert lines[-1] == "seed=11 overall=pass"
    frame = summary.to_frame()
    assert frame["status"].tolist() == ["pass", "pass"]


def test_run_verification_rejects_bad_arguments():
    with pytest.raises(ValueError):
        run_verification(1, suites=("nope",), config=SMALL)
    with pytest.raises(ValueError):
        run_verification(0, config=SMALL)
